//! Builds each kind of generator and checks the Markov properties of `P_t`.

use nalgebra::DMatrix;
use qms_curvature::matcore::c64;
use qms_curvature::semigroups::{
    cyclic_group_semigroup, depolarizing, from_jump_ops, markov_validate, schur_semigroup, symmetric_group_semigroup,
};
use qms_curvature::Result;

fn main() -> Result<()> {
    let line = DMatrix::from_fn(3, 3, |i, j| (i as f64 - j as f64).powi(2));
    let sx = DMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(1., 0.), c64(1., 0.), c64(0., 0.)]);
    let gens = vec![
        cyclic_group_semigroup(4)?,
        symmetric_group_semigroup(3)?,
        depolarizing(2)?,
        schur_semigroup(&line)?,
        from_jump_ops(vec![sx])?.with_label("Pauli X"),
    ];
    for g in &gens {
        g.check_invariants()?;
        let report = markov_validate(g, &[0.0, 0.1, 1.0, 5.0]);
        println!(
            "{:<24} n={:<2} d={:<2} kernel={} ergodic={} markov={}",
            g.label(),
            g.dim(),
            g.num_derivations(),
            g.kernel_dim(),
            g.is_ergodic(),
            report.passed
        );
    }
    Ok(())
}
