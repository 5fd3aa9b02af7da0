use lipsat::suite::{run_suite, SuiteConfig};
use std::time::Instant;

#[test]
fn timing_probe() {
    let cfg = SuiteConfig { timing: true, ..SuiteConfig::default() };
    let s = Instant::now();
    let report = run_suite(&cfg).unwrap();
    let total = s.elapsed().as_millis();
    eprintln!("{}", report.render(true));
    eprintln!("total: {total}ms");
    panic!("probe only");
}
