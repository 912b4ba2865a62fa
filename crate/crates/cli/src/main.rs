use clap::Parser;

fn main() {
    let args = focp_cli::Args::parse();
    if let Err(e) = focp_cli::run(args) {
        eprintln!("focp: {e}");
        std::process::exit(e.exit_code());
    }
}
