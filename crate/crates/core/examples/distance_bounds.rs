//! Spectral distance and transport path length against the Bonnet–Myers bound.

use qms_curvature::flowfunc::{bonnet_myers_check, connes_distance, diameter_bound, flow_path_length, BonnetMyersMode};
use qms_curvature::matcore::identity;
use qms_curvature::means_ge::{sample_state, OperatorMean};
use qms_curvature::semigroups::depolarizing;
use qms_curvature::Result;

fn main() -> Result<()> {
    let g = depolarizing(2)?;
    let rho = sample_state(2, 0, 1);
    let d = connes_distance(&g, &rho, &identity(2), 8, 0)?;
    let w = flow_path_length(&g, OperatorMean::Log, &rho)?;
    println!("spectral distance to 1 ≥ {:.6}", d.value);
    println!("transport path length  = {w:.6}");
    println!("per-state bound          {:.6}", 0.5 * diameter_bound(0.5, 4.0));
    let be = bonnet_myers_check(&g, 0.5, 4.0, BonnetMyersMode::Be, 10, 0)?;
    let ge = bonnet_myers_check(&g, 0.5, 4.0, BonnetMyersMode::Ge(OperatorMean::Log), 4, 0)?;
    println!("BE mode: max {:.6}, verdict {}", be.max_estimate, be.verdict);
    println!("GE mode: max {:.6}, verdict {}", ge.max_estimate, ge.verdict);
    Ok(())
}
