fn main() {
    std::process::exit(coughwave::pipeline::run(std::env::args().skip(1)));
}
