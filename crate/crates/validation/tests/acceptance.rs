use std::process::ExitCode;

use validation::{criteria, evaluate};

fn main() -> ExitCode {
    let mut failed = 0;
    for c in criteria() {
        let o = evaluate(&c);
        failed += !o.pass as u32;
        println!("{} {}: {}", if o.pass { "PASS" } else { "FAIL" }, c.name, o.detail);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    } else {
        println!("all acceptance criteria passed");
        ExitCode::SUCCESS
    }
}
