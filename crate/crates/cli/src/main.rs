use std::io::Write;

use clap::Parser;
use reidkit_cli::{run, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("REIDKIT_LOG", "warn")).init();
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(outcome) => {
            let text = serde_json::to_string_pretty(&outcome.report).expect("json");
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            if let Some(msg) = &outcome.diagnostic {
                eprintln!("reidkit: {msg}");
            }
            outcome.exit.code()
        }
        Err(e) => {
            eprintln!("reidkit: {e}");
            e.exit.code()
        }
    };
    std::process::exit(code);
}
