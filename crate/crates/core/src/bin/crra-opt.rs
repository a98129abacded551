fn main() { std::process::exit(crra_opt::cli::run()) }
