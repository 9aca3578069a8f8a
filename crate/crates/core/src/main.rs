fn main() {
    rpys::cli::main();
}
