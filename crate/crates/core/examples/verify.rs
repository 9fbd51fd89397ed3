//! Runs the built-in verification suites and prints one line per check.

use multinorm::cli::{verify, Suite};
use multinorm::optkernel::OptimizerConfig;

fn main() {
    let cfg = OptimizerConfig::default();
    for suite in [Suite::Closedforms, Suite::Classifier, Suite::Witnesses] {
        let report = verify(suite, &cfg);
        let passed = report.checks.iter().filter(|c| c.pass).count();
        println!("{:?}: {passed}/{} checks pass", suite, report.checks.len());
        for c in report.checks.iter().filter(|c| !c.pass) {
            println!("  FAIL {} expected {} computed {}", c.id, c.expected, c.computed);
        }
    }
}
