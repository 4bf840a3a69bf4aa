fn main() {
    let code = treelab::cli::run(std::env::args_os());
    std::process::exit(code);
}
