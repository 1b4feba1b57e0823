use clap::Parser;

fn main() {
    let cli = spmspv_bench::Cli::parse();
    if let Err(e) = spmspv_bench::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
