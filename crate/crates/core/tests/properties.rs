use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qms_curvature::curvature::{be_check, cbe_check, frontier, gamma, BeConfig};
use qms_curvature::flowfunc::{connes_distance, flow};
use qms_curvature::matcore::{abs_sq, c64, herm_eig, identity, kron, tau, tau_inner, vectorize};
use qms_curvature::means_ge::{ge_check, ge_form, mean_superop, GeConfig, OperatorMean};
use qms_curvature::report::{canonical_json, float};
use qms_curvature::sampling::{ginibre, ginibre_state, regularized};
use qms_curvature::semigroups::{
    cyclic_group_semigroup, depolarizing, from_jump_ops, schur_semigroup, tensor, LindbladGenerator,
};
use qms_curvature::AlgElement;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn min_rel_eig(m: &DMatrix<qms_curvature::C64>) -> f64 {
    let h = (m + m.adjoint()) * c64(0.5, 0.0);
    let e = herm_eig(&h).unwrap();
    e.min() / e.scale().max(1.0)
}

/// Small generators of every construction kind.
fn generator(kind: u8, seed: u64) -> LindbladGenerator {
    let mut r = rng(seed);
    match kind % 5 {
        0 => cyclic_group_semigroup(4).unwrap(),
        1 => depolarizing(2).unwrap(),
        2 => depolarizing(3).unwrap(),
        3 => {
            let pts: Vec<f64> = (0..3).map(|_| r.random_range(-1.0..1.0)).collect();
            schur_semigroup(&DMatrix::from_fn(3, 3, |i, j| (pts[i] - pts[j]).powi(2))).unwrap()
        }
        _ => {
            let v = ginibre(&mut r, 3) * c64(0.5, 0.0);
            from_jump_ops(vec![v.clone(), v.adjoint()]).unwrap()
        }
    }
}

fn pos_scalar() -> impl Strategy<Value = f64> {
    (-6.0f64..6.0).prop_map(f64::exp)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tuple_square_inequality(seed in any::<u64>(), d in 1usize..6, n in 1usize..5) {
        let mut r = rng(seed);
        let a: Vec<AlgElement> = (0..d).map(|_| ginibre(&mut r, n)).collect();
        let sum: AlgElement = a.iter().fold(DMatrix::zeros(n, n), |acc, x| acc + x);
        let lhs = a.iter().fold(DMatrix::zeros(n, n), |acc: AlgElement, x| acc + abs_sq(x)) * c64(d as f64, 0.0);
        prop_assert!(min_rel_eig(&(lhs - abs_sq(&sum))) >= -1e-11);
    }

    #[test]
    fn young_inequality(seed in any::<u64>(), n in 1usize..5, li in 0usize..3) {
        let lambda = [0.1, 1.0, 10.0][li];
        let mut r = rng(seed);
        let (a, b) = (ginibre(&mut r, n), ginibre(&mut r, n));
        let rhs = abs_sq(&a) * c64(1.0 + lambda, 0.0) + abs_sq(&b) * c64(1.0 + 1.0 / lambda, 0.0);
        prop_assert!(min_rel_eig(&(rhs - abs_sq(&(&a + &b)))) >= -1e-11);
    }

    #[test]
    fn blockwise_tensor_of_positive_matrices(seed in any::<u64>(), blocks in 1usize..4, m in 1usize..3) {
        let mut r = rng(seed);
        let gx = ginibre(&mut r, blocks * m);
        let gy = ginibre(&mut r, blocks * m);
        let (x, y) = (abs_sq(&gx), abs_sq(&gy));
        let mut s = DMatrix::zeros(m * m, m * m);
        for j in 0..blocks {
            for k in 0..blocks {
                let xb = x.view((j * m, k * m), (m, m)).into_owned();
                let yb = y.view((j * m, k * m), (m, m)).into_owned();
                s += kron(&xb, &yb);
            }
        }
        prop_assert!(min_rel_eig(&s) >= -1e-11);
    }

    #[test]
    fn means_normalized_homogeneous_monotone(s in pos_scalar(), t in pos_scalar(), lam in pos_scalar(), bump in 0.0f64..2.0) {
        for mean in OperatorMean::ALL {
            prop_assert!((mean.eval(s, s) - s).abs() <= 1e-12 * s);
            let scaled = mean.eval(lam * s, lam * t);
            prop_assert!((scaled - lam * mean.eval(s, t)).abs() <= 1e-10 * scaled.abs().max(1e-300));
            let base = mean.eval(s, t);
            prop_assert!(mean.eval(s * (1.0 + bump), t) >= base * (1.0 - 1e-12));
            prop_assert!(mean.eval(s, t * (1.0 + bump)) >= base * (1.0 - 1e-12));
            if mean.is_symmetric() {
                prop_assert!((mean.eval(t, s) - base).abs() <= 1e-12 * base);
            }
        }
    }

    #[test]
    fn rho_hat_monotone_on_commuting_pairs(seed in any::<u64>(), n in 1usize..4) {
        let mut r = rng(seed);
        let d: Vec<f64> = (0..n).map(|_| r.random_range(0.05..2.0)).collect();
        let e: Vec<f64> = d.iter().map(|&x| x + r.random_range(0.0..1.0)).collect();
        let diag = |v: &[f64]| DMatrix::from_fn(n, n, |i, j| if i == j { c64(v[i], 0.0) } else { c64(0.0, 0.0) });
        for mean in OperatorMean::ALL {
            let lo = mean_superop(mean, &diag(&d)).unwrap();
            let hi = mean_superop(mean, &diag(&e)).unwrap();
            prop_assert!(min_rel_eig(&(hi.superop().matrix() - lo.superop().matrix())) >= -1e-12);
            prop_assert!(min_rel_eig(lo.superop().matrix()) >= -1e-12);
        }
    }

    #[test]
    fn carre_du_champ_positive_and_integrates(kind in 0u8..5, seed in any::<u64>()) {
        let g = generator(kind, seed);
        let mut r = rng(seed ^ 1);
        let a = ginibre(&mut r, g.dim());
        let ga = gamma(&g, &a, &a).unwrap();
        prop_assert!(min_rel_eig(&ga) >= -1e-11);
        let lhs = tau(&ga);
        let rhs = tau_inner(&a, &g.apply_l(&a)).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * lhs.norm().max(1.0));
        prop_assert!(rhs.re >= -1e-10 && rhs.im.abs() <= 1e-10 * rhs.re.abs().max(1.0));
    }

    #[test]
    fn generator_and_derivations_adjoint(kind in 0u8..5, seed in any::<u64>()) {
        let g = generator(kind, seed);
        let mut r = rng(seed ^ 2);
        let (x, y) = (ginibre(&mut r, g.dim()), ginibre(&mut r, g.dim()));
        let l = tau_inner(&g.apply_l(&x), &y).unwrap() - tau_inner(&x, &g.apply_l(&y)).unwrap();
        prop_assert!(l.norm() <= 1e-10 * x.norm() * y.norm());
        for j in 0..g.num_derivations() {
            let dj = tau_inner(&g.partial(j, &x), &y).unwrap() - tau_inner(&x, &g.partial_adjoint(j, &y)).unwrap();
            prop_assert!(dj.norm() <= 1e-10 * x.norm() * y.norm());
        }
    }

    #[test]
    fn ge_form_monotone_in_constants(seed in any::<u64>(), mi in 0usize..6, dk in 0.0f64..2.0, dn in 0.0f64..5.0) {
        let g = cyclic_group_semigroup(4).unwrap();
        let mut r = rng(seed);
        let rho = regularized(&ginibre_state(&mut r, 4), 0.02);
        let mean = OperatorMean::ALL[mi];
        let k = r.random_range(-1.0..1.0);
        let n_dim = r.random_range(1.0..4.0);
        let strong = ge_form(&g, mean, &rho, k + dk, n_dim).unwrap();
        let weak = ge_form(&g, mean, &rho, k, n_dim + dn).unwrap();
        prop_assert!(min_rel_eig(&(weak - strong)) >= -1e-12);
    }

    #[test]
    fn canonical_floats_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        let back: f64 = canonical_json(&float(x)).parse().unwrap();
        prop_assert_eq!(back.to_bits(), x.to_bits());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn cbe_implies_no_be_violation(kind in 0u8..2, frac in 0.0f64..1.0, ni in 0usize..3, seed in any::<u64>()) {
        let g = generator(kind, 0);
        let n_dim = [2.0, 4.0, f64::INFINITY][ni];
        let k_max = frontier(&g, &[n_dim], 1e-8).unwrap()[0].1;
        let k = k_max - frac;
        prop_assert!(cbe_check(&g, k, n_dim, 1e-8).unwrap().verdict);
        let be = be_check(&g, k, n_dim, BeConfig { samples: 20, seed, ..BeConfig::default() }).unwrap();
        prop_assert!(be.verdict, "{:?}", be.min_eig);
        if n_dim.is_infinite() {
            let cfg = GeConfig { samples: 6, seed, ..GeConfig::default() };
            prop_assert!(ge_check(&g, OperatorMean::Left, k, n_dim, cfg).unwrap().verdict);
        }
    }

    #[test]
    fn cbe_tensorizes(a in 0u8..2, b in 0u8..2, k1 in -1.0f64..0.3, k2 in -1.0f64..0.3, n1 in 1.0f64..4.0, n2 in 1.0f64..4.0) {
        let pool = [cyclic_group_semigroup(2).unwrap(), depolarizing(2).unwrap()];
        let (g1, g2) = (&pool[a as usize], &pool[b as usize]);
        if cbe_check(g1, k1, n1, 1e-8).unwrap().verdict && cbe_check(g2, k2, n2, 1e-8).unwrap().verdict {
            let t = tensor(g1, g2).unwrap();
            prop_assert!(cbe_check(&t, k1.min(k2), n1 + n2, 1e-8).unwrap().verdict);
        }
    }

    #[test]
    fn entropy_decreases_and_fisher_nonnegative(kind in 0u8..5, seed in any::<u64>()) {
        let g = generator(kind, seed);
        let rho = regularized(&ginibre_state(&mut rng(seed ^ 3), g.dim()), 0.01);
        let tr = flow(&g, &rho, 2.0, 40, 4.0).unwrap();
        prop_assert!(tr.max_entropy_increase() <= 1e-12);
        prop_assert!(tr.fisher.iter().all(|&f| f >= -1e-10));
        prop_assert!(tr.states.iter().all(|s| (tau(s).re - 1.0).abs() <= 1e-11));
    }

    #[test]
    fn distance_symmetric(seed in any::<u64>()) {
        let g = depolarizing(2).unwrap();
        let mut r = rng(seed);
        let (a, b) = (regularized(&ginibre_state(&mut r, 2), 0.01), regularized(&ginibre_state(&mut r, 2), 0.01));
        let ab = connes_distance(&g, &a, &b, 2, seed).unwrap();
        let ba = connes_distance(&g, &b, &a, 2, seed).unwrap();
        prop_assert!((ab.value - ba.value).abs() <= 1e-6);
        prop_assert!(ab.history.windows(2).all(|w| w[1] >= w[0]));
        let gw = gamma(&g, &ab.witness, &ab.witness).unwrap();
        prop_assert!(herm_eig(&gw).unwrap().max() <= 1.0 + 1e-9);
        let delta = &b - &a;
        prop_assert!((tau(&(&ab.witness * delta)).re - ab.value).abs() <= 1e-9);
    }
}

#[test]
fn trace_state_mean_is_identity() {
    for mean in OperatorMean::ALL {
        let hat = mean_superop(mean, &identity(3)).unwrap();
        let v = vectorize(&identity(3));
        assert!((hat.superop().matrix() * &v - &v).camax() < 1e-14);
        assert!((hat.superop().matrix() - DMatrix::identity(9, 9)).camax() < 1e-14);
    }
}
