fn main() {
    std::process::exit(cayleywalk::run(std::env::args_os()));
}
