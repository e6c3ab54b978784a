//! Carré du champ calculus and Bakry–Émery curvature-dimension checks.
//!
//! `Γ(a,b) = ½(a*Lb + (La)*b − L(a*b))` and
//! `Γ₂(a,b) = ½(Γ(a,Lb) + Γ(La,b) − LΓ(a,b))`. The condition BE(K,N) asks for
//! `Γ₂(a) ⪰ KΓ(a) + (1/N)|La|²` for all `a`; CBE(K,N) asks for the same
//! inequality for the block matrices of arbitrary finite tuples, which is
//! equivalent to positivity of one kernel over a basis.
//!
//! `N = f64::INFINITY` drops the dimension term.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matcore::{
    abs_sq, c64, check_same_dim, herm_eig_unchecked, hermitian_part, psd_min_eig, vectorize, AlgElement, TauBasis, C64,
};
use crate::report::{Condition, CurvatureReport, Witness};
use crate::sampling::{ginibre, rng_for};
use crate::semigroups::LindbladGenerator;

/// Largest CBE kernel side `n³`.
pub const MAX_KERNEL_SIDE: usize = 4096;

/// `1/N`, with `1/∞ = 0`.
pub fn inverse_dimension(n: f64) -> Result<f64> {
    if n.is_nan() || n <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "dimension N must be positive, got {n}"
        )));
    }
    Ok(if n.is_infinite() { 0.0 } else { 1.0 / n })
}

fn check_dim(gen: &LindbladGenerator, a: &AlgElement) -> Result<()> {
    if !a.is_square() || a.nrows() != gen.dim() {
        return Err(Error::DimensionMismatch {
            expected: gen.dim(),
            found: a.nrows(),
        });
    }
    Ok(())
}

/// `Γ(a, b)`, conjugate-linear in `a`.
pub fn gamma(gen: &LindbladGenerator, a: &AlgElement, b: &AlgElement) -> Result<AlgElement> {
    check_dim(gen, a)?;
    check_same_dim(a, b)?;
    let a_star = a.adjoint();
    let la = gen.apply_l(a);
    let lb = gen.apply_l(b);
    let lab = gen.apply_l(&(&a_star * b));
    Ok((&a_star * lb + la.adjoint() * b - lab) * c64(0.5, 0.0))
}

/// `Σ_j (∂_j a)* ∂_j b`.
pub fn gamma_partials(gen: &LindbladGenerator, a: &AlgElement, b: &AlgElement) -> Result<AlgElement> {
    check_dim(gen, a)?;
    check_same_dim(a, b)?;
    let n = gen.dim();
    Ok((0..gen.num_derivations())
        .map(|j| gen.partial(j, a).adjoint() * gen.partial(j, b))
        .fold(DMatrix::zeros(n, n), |acc, x| acc + x))
}

/// `Γ₂(a, b)`.
pub fn gamma2(gen: &LindbladGenerator, a: &AlgElement, b: &AlgElement) -> Result<AlgElement> {
    check_dim(gen, a)?;
    check_same_dim(a, b)?;
    let la = gen.apply_l(a);
    let lb = gen.apply_l(b);
    let g = gamma(gen, a, b)?;
    Ok((gamma(gen, a, &lb)? + gamma(gen, &la, b)? - gen.apply_l(&g)) * c64(0.5, 0.0))
}

/// Bochner form `Re Σ_j (∂_j La − L∂_j a)* ∂_j a + Σ_jk |∂_k† ∂_j a|²`,
/// evaluated from commutators with the jump operators only.
pub fn bochner_gamma2(gen: &LindbladGenerator, a: &AlgElement) -> Result<AlgElement> {
    check_dim(gen, a)?;
    let n = gen.dim();
    let vs = gen.jump_ops();
    let comm = |v: &AlgElement, x: &AlgElement| v * x - x * v;
    let ell = |x: &AlgElement| {
        vs.iter().fold(DMatrix::zeros(n, n), |acc: AlgElement, v| {
            acc + comm(&v.adjoint(), &comm(v, x))
        })
    };
    let la = ell(a);
    let partials: Vec<AlgElement> = vs.iter().map(|v| comm(v, a)).collect();
    let mut first = DMatrix::zeros(n, n);
    for (v, da) in vs.iter().zip(&partials) {
        let c = comm(v, &la) - ell(da);
        first += c.adjoint() * da;
    }
    let mut second = DMatrix::zeros(n, n);
    for da in &partials {
        for w in vs {
            second += abs_sq(&comm(&w.adjoint(), da));
        }
    }
    Ok(hermitian_part(&first) + second)
}

/// `Γ₂(a) − KΓ(a) − (1/N)|La|²`.
pub fn be_form(gen: &LindbladGenerator, k: f64, n_dim: f64, a: &AlgElement) -> Result<AlgElement> {
    let inv_n = inverse_dimension(n_dim)?;
    let g2 = gamma2(gen, a, a)?;
    let g = gamma(gen, a, a)?;
    let la = gen.apply_l(a);
    let out = g2 - g * c64(k, 0.0) - abs_sq(&la) * c64(inv_n, 0.0);
    Ok(hermitian_part(&out))
}

/// The three sesquilinear kernels whose combination is the CBE kernel,
/// laid out with block `(α, β)` at rows `α·n..`, columns `β·n..`.
#[derive(Clone, Debug)]
pub struct CbeKernels {
    n: usize,
    gamma2: DMatrix<C64>,
    gamma: DMatrix<C64>,
    ll: DMatrix<C64>,
}

impl CbeKernels {
    pub fn new(gen: &LindbladGenerator) -> Result<Self> {
        let n = gen.dim();
        let side = n * n * n;
        if side > MAX_KERNEL_SIDE {
            return Err(Error::TooLarge {
                what: "CBE kernel side",
                value: side,
                limit: MAX_KERNEL_SIDE,
            });
        }
        let basis = TauBasis::new(n);
        let f = basis.elements();
        let l_mat = gen.generator().matrix();
        let l2_mat = l_mat * l_mat;
        let apply = |m: &DMatrix<C64>, x: &AlgElement| -> AlgElement {
            let v = m * vectorize(x);
            DMatrix::from_fn(n, n, |p, q| v[p * n + q])
        };
        let lf: Vec<AlgElement> = f.iter().map(|x| apply(l_mat, x)).collect();
        let l2f: Vec<AlgElement> = f.iter().map(|x| apply(&l2_mat, x)).collect();
        let m = n * n;
        let half = c64(0.5, 0.0);
        let quarter = c64(0.25, 0.0);

        // Γ₂(a,b) = ¼(a*L²b + 2(La)*Lb + (L²a)*b − 2L(a*Lb + (La)*b) + L²(a*b)).
        let rows: Vec<Vec<[AlgElement; 3]>> = (0..m)
            .into_par_iter()
            .map(|al| {
                let a_star = f[al].adjoint();
                let la_star = lf[al].adjoint();
                let l2a_star = l2f[al].adjoint();
                (0..m)
                    .map(|be| {
                        let ab = &a_star * &f[be];
                        let lalb = &la_star * &lf[be];
                        let g = (&a_star * &lf[be] + &la_star * &f[be] - apply(l_mat, &ab)) * half;
                        let cross = &a_star * &lf[be] + &la_star * &f[be];
                        let g2 = (&a_star * &l2f[be] + &lalb * c64(2.0, 0.0) + &l2a_star * &f[be]
                            - apply(l_mat, &cross) * c64(2.0, 0.0)
                            + apply(&l2_mat, &ab))
                            * quarter;
                        [g2, g, lalb]
                    })
                    .collect()
            })
            .collect();

        let mut gamma2 = DMatrix::zeros(side, side);
        let mut gamma = DMatrix::zeros(side, side);
        let mut ll = DMatrix::zeros(side, side);
        for (al, row) in rows.iter().enumerate() {
            for (be, blocks) in row.iter().enumerate() {
                for (target, block) in [&mut gamma2, &mut gamma, &mut ll].into_iter().zip(blocks) {
                    target.view_mut((al * n, be * n), (n, n)).copy_from(block);
                }
            }
        }
        let sym = |x: DMatrix<C64>| (&x + x.adjoint()) * half;
        Ok(Self {
            n,
            gamma2: sym(gamma2),
            gamma: sym(gamma),
            ll: sym(ll),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `[Γ₂(f_α,f_β) − KΓ(f_α,f_β) − (1/N)(Lf_α)*(Lf_β)]_{αβ}`.
    pub fn combine(&self, k: f64, inv_n: f64) -> DMatrix<C64> {
        &self.gamma2 - &self.gamma * c64(k, 0.0) - &self.ll * c64(inv_n, 0.0)
    }

    /// `Γ₂` part of the kernel.
    pub fn gamma2_kernel(&self) -> &DMatrix<C64> {
        &self.gamma2
    }

    /// `Γ` part of the kernel.
    pub fn gamma_kernel(&self) -> &DMatrix<C64> {
        &self.gamma
    }

    /// `(Lf_α)*(Lf_β)` part of the kernel.
    pub fn ll_kernel(&self) -> &DMatrix<C64> {
        &self.ll
    }
}

/// CBE kernel of side `n³` over the scaled matrix-unit basis.
pub fn cbe_kernel(gen: &LindbladGenerator, k: f64, n_dim: f64) -> Result<DMatrix<C64>> {
    let inv_n = inverse_dimension(n_dim)?;
    Ok(CbeKernels::new(gen)?.combine(k, inv_n))
}

fn kernel_verdict(kernel: &DMatrix<C64>, tol: f64) -> (f64, bool, DVector<C64>) {
    let eig = herm_eig_unchecked(kernel);
    let scale = eig.scale();
    let min = eig.min();
    (min, min >= -tol * scale, eig.vectors.column(0).into_owned())
}

fn cbe_report(kernels: &CbeKernels, k: f64, n_dim: f64, tol: f64) -> Result<CurvatureReport> {
    let inv_n = inverse_dimension(n_dim)?;
    let kernel = kernels.combine(k, inv_n);
    let (min_eig, verdict, w) = kernel_verdict(&kernel, tol);
    let n = kernels.dim();
    Ok(CurvatureReport {
        condition: Condition::Cbe,
        k,
        n: n_dim,
        min_eig,
        tol,
        verdict,
        witness: (!verdict).then_some(Witness::Cbe { w }),
        samples: 1,
        notes: format!(
            "kernel side {}; verdict is a certificate for all finite tuples (relative tolerance)",
            n * n * n
        ),
    })
}

/// Certified CBE(K,N) test: positivity of the kernel up to `tol·max(1, |B|)`.
pub fn cbe_check(gen: &LindbladGenerator, k: f64, n_dim: f64, tol: f64) -> Result<CurvatureReport> {
    cbe_report(&CbeKernels::new(gen)?, k, n_dim, tol)
}

/// `Σ_αβ w_α* B_αβ w_β` with the blocks rebuilt from polarized Bochner
/// forms and `Σ_j (∂_j ·)*(∂_j ·)`.
pub fn cbe_witness_value(gen: &LindbladGenerator, k: f64, n_dim: f64, w: &DVector<C64>) -> Result<f64> {
    let inv_n = inverse_dimension(n_dim)?;
    let n = gen.dim();
    let m = n * n;
    if w.len() != m * n {
        return Err(Error::DimensionMismatch {
            expected: m * n,
            found: w.len(),
        });
    }
    let basis = TauBasis::new(n);
    let f = basis.elements();
    let lf: Vec<AlgElement> = f.iter().map(|x| gen.apply_l(x)).collect();
    let block = |v: usize| w.rows(v * n, n).into_owned();
    let phases = [c64(1.0, 0.0), c64(0.0, 1.0), c64(-1.0, 0.0), c64(0.0, -1.0)];
    let total: Result<C64> = (0..m)
        .into_par_iter()
        .map(|al| {
            let wa = block(al);
            let mut acc = c64(0.0, 0.0);
            for be in 0..m {
                let wb = block(be);
                // Γ₂(a,b) = ¼ Σ_k i^{-k} Γ₂(a + i^k b).
                let mut g2 = DMatrix::zeros(n, n);
                for ph in phases {
                    let x = &f[al] + &f[be] * ph;
                    g2 += bochner_gamma2(gen, &x)? * ph.conj();
                }
                g2 *= c64(0.25, 0.0);
                let g = gamma_partials(gen, &f[al], &f[be])?;
                let blk = g2 - g * c64(k, 0.0) - lf[al].adjoint() * &lf[be] * c64(inv_n, 0.0);
                acc += (wa.adjoint() * blk * &wb)[(0, 0)];
            }
            Ok(acc)
        })
        .try_reduce(|| c64(0.0, 0.0), |x, y| Ok(x + y));
    Ok(total?.re)
}

#[derive(Clone, Copy, Debug)]
pub struct BeConfig {
    /// Random restarts.
    pub samples: usize,
    /// Alternating eigenstep iterations per restart.
    pub refinement_steps: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for BeConfig {
    fn default() -> Self {
        Self {
            samples: 200,
            refinement_steps: 50,
            tol: 1e-8,
            seed: 0,
        }
    }
}

/// `Q_αβ = ξ* B_αβ ξ`.
fn contract_blocks(kernel: &DMatrix<C64>, n: usize, xi: &DVector<C64>) -> DMatrix<C64> {
    let m = n * n;
    let mut q = DMatrix::zeros(m, m);
    for al in 0..m {
        for be in 0..m {
            let blk = kernel.view((al * n, be * n), (n, n));
            q[(al, be)] = (xi.adjoint() * blk * xi)[(0, 0)];
        }
    }
    (&q + q.adjoint()) * c64(0.5, 0.0)
}

/// `B(a) = Σ_αβ conj(c_α) c_β B_αβ` for `a = Σ c_α f_α`.
fn form_at(kernel: &DMatrix<C64>, n: usize, c: &DVector<C64>) -> DMatrix<C64> {
    let m = n * n;
    let mut out = DMatrix::zeros(n, n);
    for al in 0..m {
        if c[al] == c64(0.0, 0.0) {
            continue;
        }
        for be in 0..m {
            let w = c[al].conj() * c[be];
            if w != c64(0.0, 0.0) {
                out += kernel.view((al * n, be * n), (n, n)) * w;
            }
        }
    }
    (&out + out.adjoint()) * c64(0.5, 0.0)
}

struct BeSearch {
    value: f64,
    coords: DVector<C64>,
    xi: DVector<C64>,
}

fn be_descent(kernel: &DMatrix<C64>, n: usize, start: DVector<C64>, steps: usize) -> BeSearch {
    let mut c = start;
    let eig = herm_eig_unchecked(&form_at(kernel, n, &c));
    let mut value = eig.min();
    let mut xi = eig.vectors.column(0).into_owned();
    for _ in 0..steps {
        let q = herm_eig_unchecked(&contract_blocks(kernel, n, &xi));
        let c_new = q.vectors.column(0).into_owned();
        let eig = herm_eig_unchecked(&form_at(kernel, n, &c_new));
        let v_new = eig.min();
        let improvement = value - v_new;
        if v_new < value {
            value = v_new;
            c = c_new;
            xi = eig.vectors.column(0).into_owned();
        }
        if improvement < 1e-12 {
            break;
        }
    }
    BeSearch { value, coords: c, xi }
}

/// Heuristic BE(K,N) search: minimizes `λ_min(be_form(a))` over `|a|_τ = 1`
/// by alternating exact eigensteps from random restarts. A false verdict is a
/// certified refutation; a true verdict means no counterexample was found.
pub fn be_check(gen: &LindbladGenerator, k: f64, n_dim: f64, config: BeConfig) -> Result<CurvatureReport> {
    let inv_n = inverse_dimension(n_dim)?;
    let n = gen.dim();
    let kernel = CbeKernels::new(gen)?.combine(k, inv_n);
    let basis = TauBasis::new(n);
    let restarts = config.samples.max(1);
    let best = (0..restarts)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(config.seed, i as u64);
            let x = ginibre(&mut rng, n);
            let mut c = basis.coords(&x);
            let norm = c.norm();
            c /= c64(norm, 0.0);
            be_descent(&kernel, n, c, config.refinement_steps)
        })
        .reduce_with(|a, b| if b.value < a.value { b } else { a })
        .expect("at least one restart");

    let a = basis.element_from_coords(&best.coords);
    let scale = herm_eig_unchecked(&form_at(&kernel, n, &best.coords)).scale();
    let verdict = best.value >= -config.tol * scale;
    Ok(CurvatureReport {
        condition: Condition::Be,
        k,
        n: n_dim,
        min_eig: best.value,
        tol: config.tol,
        verdict,
        witness: Some(Witness::Be { a, xi: best.xi }),
        samples: restarts,
        notes: if verdict {
            "no counterexample found by alternating eigensteps".into()
        } else {
            "refuted: witness a and vector xi give a negative form value".into()
        },
    })
}

/// `<xi, be_form(a) xi>` using the Bochner and partial-derivative forms.
pub fn be_witness_value(gen: &LindbladGenerator, k: f64, n_dim: f64, a: &AlgElement, xi: &DVector<C64>) -> Result<f64> {
    let inv_n = inverse_dimension(n_dim)?;
    let la = gen.apply_l(a);
    let form = bochner_gamma2(gen, a)? - gamma_partials(gen, a, a)? * c64(k, 0.0) - abs_sq(&la) * c64(inv_n, 0.0);
    Ok((xi.adjoint() * form * xi)[(0, 0)].re)
}

/// Largest `K` with CBE(K,N) for each `N`, by bisection to width `1e-6`.
///
/// The bracket starts at `[−|L|, |L|]`; the lower end is widened by doubling
/// when CBE already fails there (this happens for small `N`).
pub fn frontier(gen: &LindbladGenerator, n_grid: &[f64], tol: f64) -> Result<Vec<(f64, f64)>> {
    for w in n_grid.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::InvalidParameter("N grid must be strictly ascending".into()));
        }
    }
    for &n in n_grid {
        inverse_dimension(n)?;
    }
    let kernels = CbeKernels::new(gen)?;
    let norm = gen.norm();
    let holds = |k: f64, inv_n: f64| kernel_verdict(&kernels.combine(k, inv_n), tol).1;
    let results: Vec<(f64, f64)> = n_grid
        .par_iter()
        .map(|&n_dim| {
            let inv_n = inverse_dimension(n_dim).expect("validated");
            if norm == 0.0 {
                return (n_dim, 0.0);
            }
            let mut lo = -norm;
            let mut hi = norm;
            while !holds(lo, inv_n) {
                hi = lo;
                lo *= 2.0;
            }
            while holds(hi, inv_n) {
                lo = hi;
                hi *= 2.0;
            }
            while hi - lo > 1e-6 {
                let mid = 0.5 * (lo + hi);
                if holds(mid, inv_n) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            (n_dim, lo)
        })
        .collect();
    for w in results.windows(2) {
        if w[1].1 < w[0].1 - 1e-6 {
            return Err(Error::Verification(format!(
                "frontier not monotone: K_max({}) = {} < K_max({}) = {}",
                w[1].0, w[1].1, w[0].0, w[0].1
            )));
        }
    }
    Ok(results)
}

#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct PoincareReport {
    pub lambda1: f64,
    pub bound: f64,
    pub verdict: bool,
}

/// Poincaré bound `λ₁ ≥ KN/(N−1)` implied by BE(K,N).
pub fn poincare_check(gen: &LindbladGenerator, k: f64, n_dim: f64) -> Result<PoincareReport> {
    if !(k > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Poincaré bound requires K > 0, got {k}"
        )));
    }
    if !(n_dim > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "Poincaré bound requires N > 1, got {n_dim}"
        )));
    }
    let lambda1 = gen.spectral_gap()?;
    let bound = if n_dim.is_infinite() {
        k
    } else {
        k * n_dim / (n_dim - 1.0)
    };
    Ok(PoincareReport {
        lambda1,
        bound,
        verdict: lambda1 >= bound - 1e-9,
    })
}

/// PSD test of a block matrix `[X_ij]` built from a tuple, for cross-checks.
pub fn tuple_block_min_eig(blocks: impl Fn(usize, usize) -> AlgElement, len: usize, n: usize) -> Result<f64> {
    let mut m = DMatrix::zeros(len * n, len * n);
    for i in 0..len {
        for j in 0..len {
            m.view_mut((i * n, j * n), (n, n)).copy_from(&blocks(i, j));
        }
    }
    let m = (&m + m.adjoint()) * c64(0.5, 0.0);
    Ok(psd_min_eig(&m, 0.0)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{identity, matrix_unit, tau, tau_inner};
    use crate::sampling::random_hermitian;
    use crate::semigroups::{
        amplify, cyclic_group_semigroup, depolarizing, from_jump_ops, schur_semigroup, symmetric_group_semigroup,
    };
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn generators() -> Vec<LindbladGenerator> {
        let xs = [0.0, 0.5, 1.7];
        let a = DMatrix::from_fn(3, 3, |i, j| (xs[i] - xs[j]) * (xs[i] - xs[j]));
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let v = ginibre(&mut rng, 3);
        vec![
            cyclic_group_semigroup(4).unwrap(),
            depolarizing(2).unwrap(),
            schur_semigroup(&a).unwrap(),
            from_jump_ops(vec![v.clone(), v.adjoint()]).unwrap(),
        ]
    }

    #[test]
    fn gamma_of_identity_vanishes() {
        for g in generators() {
            let one = identity(g.dim());
            assert!(gamma(&g, &one, &one).unwrap().camax() < 1e-12);
            assert!(gamma2(&g, &one, &one).unwrap().camax() < 1e-12);
            assert!(bochner_gamma2(&g, &one).unwrap().camax() < 1e-12);
        }
    }

    #[test]
    fn gamma_depolarizing_matrix_unit() {
        let g = depolarizing(2).unwrap();
        let e = matrix_unit(2, 0, 0);
        let val = gamma(&g, &e, &e).unwrap();
        assert!((val - identity(2) * c64(0.25, 0.0)).camax() < 1e-14);
    }

    #[test]
    fn gamma_matches_partials_and_bochner() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for g in generators() {
            let n = g.dim();
            for _ in 0..10 {
                let a = ginibre(&mut rng, n);
                let b = ginibre(&mut rng, n);
                let d = (gamma(&g, &a, &b).unwrap() - gamma_partials(&g, &a, &b).unwrap()).camax();
                assert!(d < 1e-11, "{}: {d}", g.label());
                let d2 = (gamma2(&g, &a, &a).unwrap() - bochner_gamma2(&g, &a).unwrap()).camax();
                assert!(d2 < 1e-10, "{}: {d2}", g.label());
            }
        }
    }

    #[test]
    fn integrated_gamma2_is_norm_of_la() {
        let g = depolarizing(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = ginibre(&mut rng, 2);
        let la = g.apply_l(&a);
        let lhs = tau(&gamma2(&g, &a, &a).unwrap());
        let rhs = tau_inner(&la, &la).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn gamma_is_conjugate_linear_in_first_argument() {
        let g = depolarizing(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = ginibre(&mut rng, 3);
        let b = ginibre(&mut rng, 3);
        let z = c64(0.3, -1.2);
        let lhs = gamma(&g, &(&a * z), &b).unwrap();
        let rhs = gamma(&g, &a, &b).unwrap() * z.conj();
        assert!((lhs - rhs).camax() < 1e-12);
    }

    #[test]
    fn bochner_first_term_for_intertwining_generator() {
        // Cyclic generators are 0-intertwining, so Γ₂(a) = Σ|∂_k†∂_j a|².
        let g = cyclic_group_semigroup(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = ginibre(&mut rng, 4);
        let mut second = DMatrix::zeros(4, 4);
        for j in 0..g.num_derivations() {
            for k in 0..g.num_derivations() {
                second += abs_sq(&g.partial_adjoint(k, &g.partial(j, &a)));
            }
        }
        assert!((bochner_gamma2(&g, &a).unwrap() - second).camax() < 1e-9);
    }

    #[test]
    fn be_form_examples() {
        let g = depolarizing(2).unwrap();
        assert!(be_form(&g, 0.5, 4.0, &identity(2)).unwrap().camax() < 1e-13);
        assert!(matches!(
            be_form(&g, 0.5, 0.0, &identity(2)),
            Err(Error::InvalidParameter(_))
        ));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let a = ginibre(&mut rng, 2);
            let f = be_form(&g, 0.5, 4.0, &a).unwrap();
            assert!(herm_eig_unchecked(&f).min() >= -1e-9);
        }
        let e12 = matrix_unit(2, 0, 1);
        let big = be_form(&g, 1e6, 4.0, &e12).unwrap();
        assert!(herm_eig_unchecked(&big).min() < -1e5);
    }

    #[test]
    fn kernel_blocks_match_gamma_calls() {
        let g = depolarizing(2).unwrap();
        let kern = CbeKernels::new(&g).unwrap();
        let f = TauBasis::new(2);
        for al in 0..4 {
            for be in 0..4 {
                let blk = kern.gamma2_kernel().view((al * 2, be * 2), (2, 2)).into_owned();
                let direct = gamma2(&g, &f.elements()[al], &f.elements()[be]).unwrap();
                assert!((blk - direct).camax() < 1e-12);
            }
        }
        let b = cbe_kernel(&g, 0.3, 4.0).unwrap();
        assert!((&b - b.adjoint()).camax() < 1e-11);
    }

    #[test]
    fn zero_generator_kernel_and_checks() {
        let z = LindbladGenerator::zero(2).unwrap();
        assert!(cbe_kernel(&z, 0.0, 3.0).unwrap().camax() == 0.0);
        let r = be_check(
            &z,
            0.0,
            2.0,
            BeConfig {
                samples: 4,
                ..BeConfig::default()
            },
        )
        .unwrap();
        assert!(r.verdict);
        assert_eq!(r.min_eig, 0.0);
        assert_eq!(
            frontier(&z, &[1.0, 2.0, f64::INFINITY], 1e-8).unwrap(),
            vec![(1.0, 0.0), (2.0, 0.0), (f64::INFINITY, 0.0)]
        );
    }

    #[test]
    fn cbe_certificates_for_group_generators() {
        let z4 = cyclic_group_semigroup(4).unwrap();
        let r = cbe_check(&z4, 0.0, 2.0, 1e-8).unwrap();
        assert!(r.verdict && r.min_eig >= -1e-8, "{}", r.min_eig);
        let xs = [0.0, 1.0, 3.0];
        let a = DMatrix::from_fn(3, 3, |i, j| (xs[i] - xs[j]) * (xs[i] - xs[j]));
        let s = schur_semigroup(&a).unwrap();
        let kern = cbe_kernel(&s, 0.0, f64::INFINITY).unwrap();
        assert!(psd_min_eig(&kern, 1e-8).unwrap().1);
    }

    #[test]
    fn cbe_refutation_witness_reevaluates() {
        let z4 = cyclic_group_semigroup(4).unwrap();
        let r = cbe_check(&z4, 1.0, 2.0, 1e-8).unwrap();
        assert!(!r.verdict);
        let Some(Witness::Cbe { w }) = &r.witness else {
            panic!("missing witness")
        };
        let v = cbe_witness_value(&z4, 1.0, 2.0, w).unwrap();
        assert!((v - r.min_eig).abs() < 1e-8, "{v} vs {}", r.min_eig);
    }

    #[test]
    fn cbe_implies_tuple_positivity() {
        let g = cyclic_group_semigroup(4).unwrap();
        assert!(cbe_check(&g, 0.0, 2.0, 1e-8).unwrap().verdict);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let xs: Vec<AlgElement> = (0..3).map(|_| ginibre(&mut rng, 4)).collect();
            let blocks = |i: usize, j: usize| {
                gamma2(&g, &xs[i], &xs[j]).unwrap() - g.apply_l(&xs[i]).adjoint() * g.apply_l(&xs[j]) * c64(0.5, 0.0)
            };
            let scale = xs.iter().map(|x| x.norm_squared()).sum::<f64>();
            assert!(tuple_block_min_eig(blocks, 3, 4).unwrap() >= -1e-9 * scale);
        }
    }

    #[test]
    fn symmetric_group_cbe() {
        let g = symmetric_group_semigroup(3).unwrap();
        assert!(cbe_check(&g, 0.0, 5.0, 1e-8).unwrap().verdict);
    }

    #[test]
    fn depolarizing_be_half_four() {
        let g = depolarizing(2).unwrap();
        let r = be_check(
            &g,
            0.5,
            4.0,
            BeConfig {
                samples: 20,
                ..BeConfig::default()
            },
        )
        .unwrap();
        assert!(r.verdict, "{}", r.min_eig);
        let refuted = be_check(
            &g,
            0.6,
            4.0,
            BeConfig {
                samples: 20,
                ..BeConfig::default()
            },
        )
        .unwrap();
        assert!(!refuted.verdict);
        let Some(Witness::Be { a, xi }) = &refuted.witness else {
            panic!("missing witness")
        };
        let v = be_witness_value(&g, 0.6, 4.0, a, xi).unwrap();
        assert!((v - refuted.min_eig).abs() < 1e-8);
    }

    #[test]
    fn frontier_values() {
        let g = depolarizing(2).unwrap();
        let f = frontier(&g, &[1.0, 2.0, 4.0, 8.0, f64::INFINITY], 1e-8).unwrap();
        let expect = [-0.75, 0.0, 0.375, 0.5625, 0.75];
        for ((_, k), e) in f.iter().zip(expect) {
            assert!((k - e).abs() < 2e-6, "{k} vs {e}");
        }
    }

    #[test]
    fn poincare_examples() {
        let g = depolarizing(2).unwrap();
        let p = poincare_check(&g, 0.5, 4.0).unwrap();
        assert!((p.lambda1 - 1.0).abs() < 1e-10 && (p.bound - 2.0 / 3.0).abs() < 1e-15 && p.verdict);
        let z4 = cyclic_group_semigroup(4).unwrap();
        assert!(matches!(poincare_check(&z4, 0.0, 2.0), Err(Error::InvalidParameter(_))));
        let s = schur_semigroup(&DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        assert!(matches!(poincare_check(&s, 0.5, 2.0), Err(Error::NonErgodic { .. })));
    }

    #[test]
    fn hermitian_inputs_give_hermitian_forms() {
        let g = depolarizing(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = random_hermitian(&mut rng, 3);
        let f = gamma2(&g, &a, &a).unwrap();
        assert!((&f - f.adjoint()).camax() < 1e-12);
    }

    #[test]
    fn depolarizing_cbe_frontier_matches_amplified_be() {
        // Above the CBE frontier the BE search on M_2 ⊗ M_2 finds a violation,
        // while BE(1/2, 4) itself holds on M_2.
        let g = depolarizing(2).unwrap();
        let k_max = frontier(&g, &[4.0], 1e-8).unwrap()[0].1;
        assert!((k_max - 0.375).abs() < 1e-5);
        let amp = amplify(&g, 2).unwrap();
        assert!(be_check(&amp, 0.36, 4.0, BeConfig::default()).unwrap().verdict);
        assert!(!be_check(&amp, 0.4, 4.0, BeConfig::default()).unwrap().verdict);
        assert!(be_check(&g, 0.5, 4.0, BeConfig::default()).unwrap().verdict);
    }
}
