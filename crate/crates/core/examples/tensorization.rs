//! CBE constants add up under tensor products; spectral gaps take the minimum.

use qms_curvature::curvature::cbe_check;
use qms_curvature::flowfunc::spectral_gap;
use qms_curvature::semigroups::{amplify, cyclic_group_semigroup, depolarizing, tensor};
use qms_curvature::Result;

fn main() -> Result<()> {
    let z2 = cyclic_group_semigroup(2)?;
    let dep = depolarizing(2)?;
    let t = tensor(&z2, &dep)?;
    println!("Z2 CBE(0,1): {}", cbe_check(&z2, 0.0, 1.0, 1e-8)?.verdict);
    println!(
        "depolarizing CBE(0.375,4): {}",
        cbe_check(&dep, 0.375, 4.0, 1e-8)?.verdict
    );
    println!("tensor CBE(0,5): {}", cbe_check(&t, 0.0, 5.0, 1e-8)?.verdict);
    println!(
        "gaps: {:.6} {:.6} -> {:.6}",
        spectral_gap(&z2)?,
        spectral_gap(&dep)?,
        spectral_gap(&t)?
    );
    let amp = amplify(&dep, 2)?;
    println!(
        "amplified to M_4: CBE(0.375,4) {}",
        cbe_check(&amp, 0.375, 4.0, 1e-8)?.verdict
    );
    Ok(())
}
