//! Binary entry point: parse arguments, dispatch to the subcommand, and map
//! library errors to structured stderr JSON plus distinct exit codes
//! (2 usage, 3 data, 4 degenerate statistic; 1 is reserved for failed
//! statistical checks).

mod args;
mod commands;
mod presets;

use clap::Parser;
use tracecrit::ErrorCategory;

fn main() {
    let cli = args::Cli::parse();
    let result = match &cli.command {
        args::Command::Test(a) => commands::cmd_test(a),
        args::Command::Simulate(a) => commands::cmd_simulate(a),
        args::Command::PsiCheck(a) => commands::cmd_psi_check(a),
        args::Command::Pairwise(a) => commands::cmd_pairwise(a),
    };
    let code = match result {
        Ok(code) => code,
        Err(error) => {
            eprintln!(
                "{}",
                serde_json::json!({
                    "error": { "kind": error.kind(), "message": error.to_string() }
                })
            );
            match error.category() {
                ErrorCategory::Usage => 2,
                ErrorCategory::Data => 3,
                ErrorCategory::Degeneracy => 4,
            }
        }
    };
    std::process::exit(code);
}
