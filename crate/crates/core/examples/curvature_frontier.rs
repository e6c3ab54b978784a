//! Largest CBE constant K for each dimension N, and the Poincaré bound it implies.

use qms_curvature::curvature::{frontier, poincare_check};
use qms_curvature::semigroups::{cyclic_group_semigroup, depolarizing};
use qms_curvature::Result;

fn main() -> Result<()> {
    let grid = [1.0, 2.0, 4.0, 8.0, f64::INFINITY];
    for g in [cyclic_group_semigroup(4)?, depolarizing(2)?] {
        println!("{}", g.label());
        for (n, k) in frontier(&g, &grid, 1e-8)? {
            let p = if k > 0.0 && n > 1.0 {
                Some(poincare_check(&g, k, n)?)
            } else {
                None
            };
            match p {
                Some(p) => println!("  N={n:<4} K_max={k:+.6}  λ₁={:.6} ≥ {:.6}", p.lambda1, p.bound),
                None => println!("  N={n:<4} K_max={k:+.6}"),
            }
        }
    }
    Ok(())
}
