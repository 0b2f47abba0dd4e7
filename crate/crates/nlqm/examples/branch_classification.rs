//! Why the tanh/sech profile is the only physical solution family.
//!
//! The second-order equation for tau has three candidate families, indexed
//! by the sign of the integration constant lambda^2 and, for real lambda, a
//! tanh/coth choice.
//!
//! ```bash
//! cargo run --example branch_classification
//! ```

use nlqm::reduced::{classify_branch, BranchSelector};

fn main() {
    let cases = [
        (-1.0, BranchSelector::Tanh, "lambda^2 < 0"),
        (4.0, BranchSelector::Coth, "lambda^2 > 0, coth"),
        (4.0, BranchSelector::Tanh, "lambda^2 > 0, tanh"),
    ];
    for (lambda_sq, selector, label) in cases {
        let report = classify_branch(lambda_sq, selector);
        println!("{label:<22} -> {:?}", report.branch_kind);
        println!("  physical: {}", report.physical);
        println!("  {}", report.reason);
        println!();
    }
}
