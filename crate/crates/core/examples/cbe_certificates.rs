//! Complete Bakry–Émery certificates and a refutation with its witness.

use qms_curvature::curvature::{cbe_check, cbe_witness_value};
use qms_curvature::report::Witness;
use qms_curvature::semigroups::{cyclic_group_semigroup, depolarizing, symmetric_group_semigroup};
use qms_curvature::Result;

fn main() -> Result<()> {
    let cases = [
        (cyclic_group_semigroup(4)?, 0.0, 2.0),
        (symmetric_group_semigroup(3)?, 0.0, 5.0),
        (depolarizing(2)?, 0.375, 4.0),
        (cyclic_group_semigroup(4)?, 1.0, 2.0),
    ];
    for (g, k, n) in &cases {
        let r = cbe_check(g, *k, *n, 1e-8)?;
        println!(
            "{:<16} CBE({k}, {n}): verdict={} min_eig={:.3e}",
            g.label(),
            r.verdict,
            r.min_eig
        );
        if let Some(Witness::Cbe { w }) = &r.witness {
            println!("  witness re-evaluates to {:.3e}", cbe_witness_value(g, *k, *n, w)?);
        }
    }
    Ok(())
}
