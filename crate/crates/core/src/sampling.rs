//! Seeded random matrices and states.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matcore::{abs_sq, c64, identity, tau, AlgElement, C64};

/// Independent stream for sample `index` under a master seed.
pub fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, n: usize) -> AlgElement {
    DMatrix::from_fn(n, n, |_, _| complex_normal(rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> AlgElement {
    let g = ginibre(rng, n);
    (&g + g.adjoint()) * c64(0.5, 0.0)
}

/// Induced-measure state `G G* / tau(G G*)`, so that `tau(rho) = 1`.
pub fn ginibre_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> AlgElement {
    let g = ginibre(rng, n);
    let p = abs_sq(&g.adjoint());
    let t = tau(&p).re;
    p / c64(t, 0.0)
}

/// Rank-one density `n |psi><psi|` (trace `n`, so `tau = 1`).
pub fn pure_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> AlgElement {
    let psi = nalgebra::DVector::from_fn(n, |_, _| complex_normal(rng));
    let psi = &psi / c64(psi.norm(), 0.0);
    (&psi * psi.adjoint()) * c64(n as f64, 0.0)
}

/// `(rho + eps 1) / (1 + eps)`.
pub fn regularized(rho: &AlgElement, eps: f64) -> AlgElement {
    (rho + identity(rho.nrows()) * c64(eps, 0.0)) / c64(1.0 + eps, 0.0)
}

/// Random unit vector in `C^n`.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> nalgebra::DVector<C64> {
    let v = nalgebra::DVector::from_fn(n, |_, _| complex_normal(rng));
    let nv = v.norm();
    v / c64(nv, 0.0)
}
