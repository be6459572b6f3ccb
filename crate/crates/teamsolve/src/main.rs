use clap::error::ErrorKind;
use clap::Parser;
use teamsolve::cli::Cli;
use teamsolve::Status;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("TEAMSOLVE_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // clap uses 2 for usage errors; 2 means budget exhaustion here
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => Status::InputError.code(),
            };
            std::process::exit(code);
        }
    };
    let code = match teamsolve::commands::run(&cli.command) {
        Ok(report) => {
            if !report.message.is_empty() {
                println!("{}", report.message);
            }
            report.status.code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.status().code()
        }
    };
    std::process::exit(code);
}
