//! Sampled gradient estimates GE(K,N) for every operator mean, plus the
//! integrated semigroup form.

use qms_curvature::means_ge::{cge_check, ge_check, ge_semigroup_form_check, GeConfig, OperatorMean};
use qms_curvature::semigroups::depolarizing;
use qms_curvature::Result;

fn main() -> Result<()> {
    let g = depolarizing(2)?;
    let config = GeConfig::default();
    for mean in OperatorMean::ALL {
        let r = ge_check(&g, mean, 0.5, 4.0, config)?;
        println!(
            "GE(1/2, 4) {:<10} verdict={} min_eig={:+.3e}",
            mean.id(),
            r.verdict,
            r.min_eig
        );
    }
    let c = cge_check(&g, OperatorMean::Log, 0.5, 4.0, 3, config)?;
    println!(
        "CGE(1/2, 4) log up to M_3: verdict={} over {} samples",
        c.verdict, c.samples
    );
    let s = ge_semigroup_form_check(&g, OperatorMean::Log, 0.5, 4.0, 20, 0)?;
    println!("integrated form: {} checks, min slack {:.3e}", s.checks, s.min_slack);
    let refuted = ge_check(&g, OperatorMean::Log, 2.0, 4.0, config)?;
    println!(
        "GE(2, 4) log: verdict={} min_eig={:+.3e}",
        refuted.verdict, refuted.min_eig
    );
    Ok(())
}
