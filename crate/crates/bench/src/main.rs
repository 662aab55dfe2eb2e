fn main() {
    std::process::exit(dynconn_bench::main_with_args(std::env::args_os()));
}
