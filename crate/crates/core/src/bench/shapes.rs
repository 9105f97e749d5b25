//! Geometry of the synthetic benchmark shapes.
//!
//! Component sizes are fixed by the benchmark protocols. Positions, radii and
//! spreads are not given numerically anywhere, so they were chosen to
//! reproduce the published scatter plots; they all live here so they can be
//! tuned in one place.

/// Standard deviation of the Gaussian padding dimensions.
pub const NOISE_SD: f64 = 0.1;

pub mod yinyang {
    pub const OUTER_N: usize = 2000;
    pub const OUTER_RADIUS: f64 = 3.0;
    pub const OUTER_JITTER: f64 = 0.1;
    /// Each of the two semi-circles. The listed sizes (2000 + 4 x 200) fall
    /// 400 short of the stated total of 3200, which the knot count (57) and
    /// the noise protocol (640 points) depend on; the semi-circles take the
    /// difference, which also evens out the density along the curves.
    pub const ARC_N: usize = 400;
    pub const ARC_RADIUS: f64 = 1.0;
    pub const ARC_JITTER: f64 = 0.1;
    /// Semi-circle / clump centers are `(0, ±ARC_OFFSET)`.
    pub const ARC_OFFSET: f64 = 1.0;
    pub const CLUMP_N: usize = 200;
    pub const CLUMP_SD: f64 = 0.1;
}

pub mod mickey {
    pub const HEAD_N: usize = 1000;
    pub const HEAD_RADIUS: f64 = 1.0;
    pub const EAR_N: usize = 100;
    pub const EAR_RADIUS: f64 = 0.3;
    /// Ears are centered at `(±EAR_CENTER, EAR_CENTER)`.
    pub const EAR_CENTER: f64 = 1.0;
}

pub mod manifold_mixture {
    pub const PLANE_N: usize = 2000;
    /// Plane is uniform on `[0, PLANE_SIDE]²` with third coordinate 0.
    pub const PLANE_SIDE: f64 = 4.0;
    pub const BLOB_N: usize = 400;
    pub const BLOB_CENTER: [f64; 3] = [6.0, 0.0, 0.0];
    pub const BLOB_SD: f64 = 0.5;
    pub const RING_N: usize = 800;
    pub const RING_CENTER: [f64; 2] = [2.0, 6.0];
    pub const RING_RADIUS: f64 = 1.5;
    pub const RING_JITTER: f64 = 0.1;
}

pub mod ring {
    pub const N: usize = 1200;
    pub const RING_PROB: f64 = 1.0 / 6.0;
    pub const RING_RADIUS: f64 = 1.0;
    pub const SD: f64 = 0.2;
}

pub mod mix_mickey {
    pub const BIG_N: usize = 2000;
    pub const SMALL_N: usize = 600;
    pub const BIG_CENTER: [f64; 2] = [0.0, 0.0];
    pub const SMALL_CENTERS: [[f64; 2]; 2] = [[3.0, 3.0], [-3.0, 3.0]];
    pub const VARIANCE: f64 = 2.0;
}

/// Uniform noise points cover the signal's bounding box in the first two
/// dimensions, widened on each side by this fraction of the range.
pub const NOISE_BOX_MARGIN: f64 = 0.05;
