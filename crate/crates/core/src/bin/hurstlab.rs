fn main() {
    hurstlab::cli::main_with_exit()
}
