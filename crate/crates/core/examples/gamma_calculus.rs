//! Carré du champ and its iterate, computed two ways.

use qms_curvature::curvature::{bochner_gamma2, gamma, gamma2, gamma_partials};
use qms_curvature::matcore::{tau, tau_inner};
use qms_curvature::sampling::{ginibre, rng_for};
use qms_curvature::semigroups::cyclic_group_semigroup;
use qms_curvature::Result;

fn main() -> Result<()> {
    let g = cyclic_group_semigroup(4)?;
    let mut rng = rng_for(1, 0);
    let a = ginibre(&mut rng, 4);
    let b = ginibre(&mut rng, 4);

    let g_ab = gamma(&g, &a, &b)?;
    let g_partials = gamma_partials(&g, &a, &b)?;
    println!("|Γ(a,b) - Σ(∂a)*(∂b)|   = {:.2e}", (&g_ab - &g_partials).camax());

    let g2 = gamma2(&g, &a, &a)?;
    let bochner = bochner_gamma2(&g, &a)?;
    println!("|Γ₂(a) - Bochner form| = {:.2e}", (&g2 - &bochner).camax());

    let integrated = tau(&gamma(&g, &a, &a)?);
    println!(
        "τ(Γ(a)) = {:.12}, <a, La> = {:.12}",
        integrated,
        tau_inner(&a, &g.apply_l(&a))?
    );
    Ok(())
}
