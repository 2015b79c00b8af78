//! Compares the analytic gradients of the 1x1 convolution, ReLU and the
//! two-layer adaptation stack with central finite differences.
//!
//! ```bash
//! cargo run -p pixcrypt --example gradient_check [SEED]
//! ```

use pixcrypt::adaptnet::gradcheck::TOLERANCE;
use pixcrypt::adaptnet::run_gradcheck;

fn main() -> pixcrypt::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let report = run_gradcheck(seed, 20)?;
    print!("{report}");
    for check in report.checks.iter().filter(|c| c.case < 2) {
        println!(
            "  {:<17} case {} input {:?} widths {:?}: {:.2e}",
            check.op, check.case, check.shape, check.widths, check.max_rel_error
        );
    }
    println!("within {TOLERANCE:e}: {}", report.passed(TOLERANCE));
    Ok(())
}
