//! Entropy, Fisher information and entropy power along the heat flow.

use qms_curvature::flowfunc::{de_bruijn_residual, entropy_power_concavity_check, flow, mlsi_check};
use qms_curvature::means_ge::sample_state;
use qms_curvature::semigroups::depolarizing;
use qms_curvature::Result;

fn main() -> Result<()> {
    let g = depolarizing(2)?;
    let rho = sample_state(2, 0, 1);
    let trace = flow(&g, &rho, 5.0, 200, 4.0)?;
    for i in (0..trace.len()).step_by(40) {
        println!(
            "t={:.3} Ent={:.6} I={:.6} U²={:.6}",
            trace.times[i], trace.entropy[i], trace.fisher[i], trace.entropy_power[i]
        );
    }
    println!(
        "de Bruijn residual at t=0.5: {:.2e}",
        de_bruijn_residual(&g, &rho, 0.5, 1e-4)?
    );
    let c = entropy_power_concavity_check(&g, &rho, 0.5, 4.0, 5.0, 5000)?;
    println!(
        "damped concavity: verdict={} max(φ″ + 2Kφ′)={:.3e}",
        c.verdict, c.max_damped
    );
    let m = mlsi_check(&g, &rho, 0.5, 4.0)?;
    println!("MLSI: {:.6} ≤ {:.6}", m.lhs, m.fisher);
    trace.write_csv(std::io::stdout().lock())?;
    Ok(())
}
