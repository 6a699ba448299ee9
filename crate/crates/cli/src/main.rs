use std::process::ExitCode;

use clap::{CommandFactory, Parser};
use mesoscope_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let text = e.to_string();
            // value errors come without usage; add the subcommand's
            if e.use_stderr() && !text.contains("Usage:") {
                let mut cmd = Cli::command();
                cmd.build();
                let sub = std::env::args().nth(1).unwrap_or_default();
                let usage = match cmd.find_subcommand_mut(&sub) {
                    Some(s) => s.render_usage(),
                    None => cmd.render_usage(),
                };
                eprintln!("\n{usage}");
            }
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
