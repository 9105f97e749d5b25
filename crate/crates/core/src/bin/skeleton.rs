fn main() {
    std::process::exit(skeleton_clust::cli::main());
}
