use std::process::ExitCode;

use cubic_genus::acceptance::{self, Options, Status};

fn main() -> ExitCode {
    let opts = Options::default();
    let mut failed = Vec::new();
    for c in acceptance::CRITERIA.iter() {
        let outcome = acceptance::run(c, &opts);
        println!("{}", outcome.line());
        if outcome.status == Status::Fail {
            failed.push(outcome.id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", acceptance::CRITERIA.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
