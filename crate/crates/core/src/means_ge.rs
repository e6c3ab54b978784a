//! Operator means, the weighted multiplication `ρ̂ = Λ(L(ρ), R(ρ))`, and the
//! gradient estimates GE(K,N) and CGE(K,N).
//!
//! Left and right multiplication by `ρ` commute, so `ρ̂` is obtained from a
//! scalar mean `m` on the spectrum: with `ρ = Σ λ_i P_i`,
//! `ρ̂ x = Σ_ij m(λ_i, λ_j) P_i x P_j`.
//!
//! GE(K,N) at a state `ρ` is positivity of the Hermitian form
//! `H = sym(L K_ρ) − ½ ∂†(dG(ρ)(Lρ))∂ − K K_ρ − (1/N)|Lρ⟩⟨Lρ|`
//! with `K_ρ = ∂†ρ̂∂`. All forms here are matrices `H` acting on `vec(a)`,
//! normalized so that `<a, H a>_tau = vec(a)* H vec(a) / n`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::curvature::inverse_dimension;
use crate::error::{Error, Result};
use crate::matcore::{c64, herm_eig, herm_eig_unchecked, identity, kron, mat_log, vectorize, AlgElement, SuperOp, C64};
use crate::report::{Condition, CurvatureReport, Witness};
use crate::sampling::{ginibre, ginibre_state, pure_state, regularized, rng_for};
use crate::semigroups::{amplify, DensityMatrix, LindbladGenerator, STRICT_POSITIVITY_FLOOR};

/// Largest amplified dimension `n·m` accepted by [`cge_check`].
pub const MAX_CGE_DIM: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OperatorMean {
    Log,
    Left,
    Right,
    Arithmetic,
    Geometric,
    Harmonic,
}

impl OperatorMean {
    pub const ALL: [OperatorMean; 6] = [
        OperatorMean::Log,
        OperatorMean::Left,
        OperatorMean::Right,
        OperatorMean::Arithmetic,
        OperatorMean::Geometric,
        OperatorMean::Harmonic,
    ];

    pub fn id(self) -> &'static str {
        match self {
            OperatorMean::Log => "log",
            OperatorMean::Left => "left",
            OperatorMean::Right => "right",
            OperatorMean::Arithmetic => "arithmetic",
            OperatorMean::Geometric => "geometric",
            OperatorMean::Harmonic => "harmonic",
        }
    }

    pub fn is_symmetric(self) -> bool {
        !matches!(self, OperatorMean::Left | OperatorMean::Right)
    }

    /// Scalar mean `m(s, t)` for `s, t > 0`.
    pub fn eval(self, s: f64, t: f64) -> f64 {
        match self {
            OperatorMean::Log => log_mean_unchecked(s, t),
            OperatorMean::Left => s,
            OperatorMean::Right => t,
            OperatorMean::Arithmetic => 0.5 * (s + t),
            OperatorMean::Geometric => (s * t).sqrt(),
            OperatorMean::Harmonic => 2.0 * s * t / (s + t),
        }
    }
}

impl fmt::Display for OperatorMean {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for OperatorMean {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OperatorMean::ALL
            .into_iter()
            .find(|m| m.id() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown mean {s:?}")))
    }
}

fn log_mean_unchecked(s: f64, t: f64) -> f64 {
    let hi = s.max(t);
    if (s - t).abs() <= 1e-8 * hi {
        // (s−t)/(log s − log t) = m (1 − x²/3 + O(x⁴)), m = (s+t)/2, x = (s−t)/(s+t).
        let m = 0.5 * (s + t);
        let x = (s - t) / (s + t);
        m * (1.0 - x * x / 3.0)
    } else {
        (s - t) / (s.ln() - t.ln())
    }
}

/// Logarithmic mean `(s − t)/(log s − log t)`, with `m(s, s) = s`.
pub fn log_mean(s: f64, t: f64) -> Result<f64> {
    if !(s > 0.0 && t > 0.0) || !s.is_finite() || !t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "log mean needs positive arguments, got ({s}, {t})"
        )));
    }
    Ok(log_mean_unchecked(s, t))
}

/// `ρ̂` as a superoperator; acts blockwise on tuples.
#[derive(Clone, Debug)]
pub struct RhoHat {
    op: SuperOp,
    rho: AlgElement,
    mean: OperatorMean,
}

impl RhoHat {
    pub fn superop(&self) -> &SuperOp {
        &self.op
    }

    pub fn rho(&self) -> &AlgElement {
        &self.rho
    }

    pub fn mean(&self) -> OperatorMean {
        self.mean
    }

    pub fn apply(&self, x: &AlgElement) -> AlgElement {
        self.op.apply(x)
    }

    /// Diagonal extension to `M_n^{⊕d}`.
    pub fn apply_blocks(&self, xs: &[AlgElement]) -> Vec<AlgElement> {
        xs.iter().map(|x| self.op.apply(x)).collect()
    }
}

/// `ρ̂ = W diag(m(λ_i, λ_j)) W*` with `W = U ⊗ conj(U)` and `ρ = U diag(λ) U*`.
pub fn mean_superop(mean: OperatorMean, rho: &AlgElement) -> Result<RhoHat> {
    let eig = herm_eig(rho)?;
    if eig.min() < STRICT_POSITIVITY_FLOOR {
        return Err(Error::SingularState { min_eig: eig.min() });
    }
    let n = rho.nrows();
    let u = &eig.vectors;
    let w = kron(u, &u.map(|z| z.conj()));
    let weights = DVector::from_fn(n * n, |k, _| c64(mean.eval(eig.values[k / n], eig.values[k % n]), 0.0));
    let mut scaled = w.clone();
    for k in 0..n * n {
        let wk = weights[k];
        scaled.column_mut(k).iter_mut().for_each(|z| *z *= wk);
    }
    let mat = scaled * w.adjoint();
    let mat = (&mat + mat.adjoint()) * c64(0.5, 0.0);
    Ok(RhoHat {
        op: SuperOp::from_matrix(n, mat)?,
        rho: rho.clone(),
        mean,
    })
}

/// `max_j |∂_j ρ − ρ̂_log ∂_j log ρ|_F`.
pub fn chain_rule_residual(gen: &LindbladGenerator, rho: &AlgElement) -> Result<f64> {
    chain_rule_residual_with(gen, OperatorMean::Log, rho)
}

/// Chain-rule residual with an arbitrary mean in place of the logarithmic one.
pub fn chain_rule_residual_with(gen: &LindbladGenerator, mean: OperatorMean, rho: &AlgElement) -> Result<f64> {
    let hat = mean_superop(mean, rho)?;
    let log_rho = mat_log(rho)?;
    Ok((0..gen.num_derivations())
        .map(|j| (gen.partial(j, rho) - hat.apply(&gen.partial(j, &log_rho))).norm())
        .fold(0.0, f64::max))
}

/// Finite-difference step for [`rho_hat_dot`]: `1e-4 / |L|`, shrunk for
/// states close to the boundary.
fn fd_step(gen: &LindbladGenerator, min_eig: f64) -> f64 {
    1e-4 * (100.0 * min_eig).min(1.0) / gen.norm()
}

/// `dG(ρ)(Lρ) = −d/dt|₀ (P_t ρ)^`, by central differences at `h` and `h/2`
/// with Richardson extrapolation, returned in Hermitian form.
pub fn rho_hat_dot(gen: &LindbladGenerator, mean: OperatorMean, rho: &AlgElement) -> Result<SuperOp> {
    let n = rho.nrows();
    let eig = herm_eig(rho)?;
    if eig.min() < STRICT_POSITIVITY_FLOOR {
        return Err(Error::SingularState { min_eig: eig.min() });
    }
    if gen.norm() == 0.0 || gen.apply_l(rho).camax() == 0.0 {
        return Ok(SuperOp::zero(n));
    }
    let h = fd_step(gen, eig.min());
    if !(h >= 1e-12) {
        return Err(Error::StepUnderflow { h });
    }
    let at = |t: f64| -> Result<DMatrix<C64>> {
        let state = gen.apply(t, rho);
        let state = (&state + state.adjoint()) * c64(0.5, 0.0);
        Ok(mean_superop(mean, &state)?.op.into_matrix())
    };
    let central = |step: f64| -> Result<DMatrix<C64>> { Ok((at(step)? - at(-step)?) * c64(-0.5 / step, 0.0)) };
    let d1 = central(h)?;
    let d2 = central(0.5 * h)?;
    let d = &d2 + (&d2 - &d1) * c64(1.0 / 3.0, 0.0);
    let d = (&d + d.adjoint()) * c64(0.5, 0.0);
    SuperOp::from_matrix(n, d)
}

/// Riemannian operator `K_ρ = ∂†ρ̂∂ = Σ_j ∂_j† ρ̂ ∂_j`.
pub fn riemannian_operator(gen: &LindbladGenerator, hat: &RhoHat) -> DMatrix<C64> {
    let n = gen.dim();
    let r = hat.superop().matrix();
    let out = gen.derivations().iter().fold(DMatrix::zeros(n * n, n * n), |acc, d| {
        acc + d.matrix().adjoint() * r * d.matrix()
    });
    (&out + out.adjoint()) * c64(0.5, 0.0)
}

/// Matrix of the GE(K,N) form at `ρ`.
pub fn ge_form(
    gen: &LindbladGenerator,
    mean: OperatorMean,
    rho: &AlgElement,
    k: f64,
    n_dim: f64,
) -> Result<DMatrix<C64>> {
    let inv_n = inverse_dimension(n_dim)?;
    let parts = GeParts::new(gen, mean, rho)?;
    Ok(parts.form(k, inv_n))
}

/// The pieces of the GE form, which is affine in `K` and `1/N`.
#[derive(Clone, Debug)]
pub struct GeParts {
    /// `sym(L K_ρ) − ½ ∂† dG ∂`.
    base: DMatrix<C64>,
    /// `K_ρ`.
    k_rho: DMatrix<C64>,
    /// `|Lρ⟩⟨Lρ| / n`.
    rank_one: DMatrix<C64>,
}

impl GeParts {
    pub fn new(gen: &LindbladGenerator, mean: OperatorMean, rho: &AlgElement) -> Result<Self> {
        if rho.nrows() != gen.dim() {
            return Err(Error::DimensionMismatch {
                expected: gen.dim(),
                found: rho.nrows(),
            });
        }
        let n = gen.dim();
        let hat = mean_superop(mean, rho)?;
        let k_rho = riemannian_operator(gen, &hat);
        let dot = rho_hat_dot(gen, mean, rho)?;
        let l = gen.generator().matrix();
        let lk = l * &k_rho;
        let dterm = gen.derivations().iter().fold(DMatrix::zeros(n * n, n * n), |acc, d| {
            acc + d.matrix().adjoint() * dot.matrix() * d.matrix()
        });
        let base = (&lk + lk.adjoint()) * c64(0.5, 0.0) - dterm * c64(0.5, 0.0);
        let v = vectorize(&gen.apply_l(rho));
        let rank_one = &v * v.adjoint() / c64(n as f64, 0.0);
        Ok(Self { base, k_rho, rank_one })
    }

    pub fn form(&self, k: f64, inv_n: f64) -> DMatrix<C64> {
        let h = &self.base - &self.k_rho * c64(k, 0.0) - &self.rank_one * c64(inv_n, 0.0);
        (&h + h.adjoint()) * c64(0.5, 0.0)
    }

    pub fn k_rho(&self) -> &DMatrix<C64> {
        &self.k_rho
    }
}

#[derive(Clone, Copy, Debug)]
pub struct GeConfig {
    /// Number of sampled states.
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for GeConfig {
    fn default() -> Self {
        Self {
            samples: 50,
            tol: 1e-7,
            seed: 0,
        }
    }
}

/// State `i` of the default sampling scheme on `M_n`: the trace state, then a
/// rotation of near-pure states regularized at `1e-2` and `1e-4` and Ginibre
/// states.
pub fn sample_state(n: usize, seed: u64, i: usize) -> AlgElement {
    let mut rng = rng_for(seed, i as u64);
    match (i, i % 3) {
        (0, _) => identity(n),
        (_, 1) => regularized(&pure_state(&mut rng, n), 1e-2),
        (_, 2) => regularized(&pure_state(&mut rng, n), 1e-4),
        _ => ginibre_state(&mut rng, n),
    }
}

struct GeSample {
    min_eig: f64,
    scale: f64,
    rho: AlgElement,
    a: AlgElement,
}

fn ge_sample(gen: &LindbladGenerator, mean: OperatorMean, rho: AlgElement, k: f64, inv_n: f64) -> Result<GeSample> {
    let h = GeParts::new(gen, mean, &rho)?.form(k, inv_n);
    let eig = herm_eig_unchecked(&h);
    let n = gen.dim();
    let v = eig.vectors.column(0).into_owned();
    // Unit tau-norm: vec(a) = sqrt(n) v.
    let a = DMatrix::from_fn(n, n, |p, q| v[p * n + q] * (n as f64).sqrt());
    Ok(GeSample {
        min_eig: eig.min(),
        scale: eig.scale(),
        rho,
        a,
    })
}

/// Sampled GE(K,N) test. A false verdict is a certified refutation at the
/// witness state; a true verdict means no counterexample among the samples.
pub fn ge_check(
    gen: &LindbladGenerator,
    mean: OperatorMean,
    k: f64,
    n_dim: f64,
    config: GeConfig,
) -> Result<CurvatureReport> {
    ge_check_amplified(gen, mean, k, n_dim, config, 1)
}

fn ge_check_amplified(
    gen: &LindbladGenerator,
    mean: OperatorMean,
    k: f64,
    n_dim: f64,
    config: GeConfig,
    amplification: usize,
) -> Result<CurvatureReport> {
    let inv_n = inverse_dimension(n_dim)?;
    let n = gen.dim();
    let samples = config.samples.max(1);
    let results: Vec<GeSample> = (0..samples)
        .into_par_iter()
        .map(|i| ge_sample(gen, mean, sample_state(n, config.seed, i), k, inv_n))
        .collect::<Result<_>>()?;
    let worst = results
        .into_iter()
        .reduce(|a, b| {
            if b.min_eig / b.scale < a.min_eig / a.scale {
                b
            } else {
                a
            }
        })
        .expect("at least one sample");
    let verdict = worst.min_eig >= -config.tol * worst.scale;
    Ok(CurvatureReport {
        condition: if amplification > 1 { Condition::Cge } else { Condition::Ge },
        k,
        n: n_dim,
        min_eig: worst.min_eig,
        tol: config.tol,
        verdict,
        witness: Some(Witness::Ge { rho: worst.rho, a: worst.a, mean: mean.id().into(), amplify: amplification }),
        samples,
        notes: format!(
            "mean {}; sampled states only: a true verdict means no counterexample found, a false verdict is a refutation",
            mean.id()
        ),
    })
}

/// `<a, H(ρ) a>_tau` for a GE witness, rebuilt from scratch.
pub fn ge_witness_value(
    gen: &LindbladGenerator,
    mean: OperatorMean,
    k: f64,
    n_dim: f64,
    rho: &AlgElement,
    a: &AlgElement,
) -> Result<f64> {
    let h = ge_form(gen, mean, rho, k, n_dim)?;
    let v = vectorize(a);
    Ok((v.adjoint() * h * &v)[(0, 0)].re / gen.dim() as f64)
}

/// `|∂x|²_ρ = Σ_j <∂_j x, ρ̂ ∂_j x>_tau`.
pub fn weighted_gradient_norm(gen: &LindbladGenerator, hat: &RhoHat, x: &AlgElement) -> f64 {
    let n = gen.dim() as f64;
    (0..gen.num_derivations())
        .map(|j| {
            let d = gen.partial(j, x);
            let rd = hat.apply(&d);
            d.iter().zip(rd.iter()).map(|(p, q)| (p.conj() * q).re).sum::<f64>() / n
        })
        .sum()
}

/// `E(a, ρ) = <a, Lρ>_tau`.
pub fn energy(gen: &LindbladGenerator, a: &AlgElement, rho: &AlgElement) -> C64 {
    let lr = gen.apply_l(rho);
    a.iter().zip(lr.iter()).map(|(p, q)| p.conj() * q).sum::<C64>() / c64(gen.dim() as f64, 0.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct SemigroupFormReport {
    pub checks: usize,
    /// Smallest `rhs − lhs` over all samples.
    pub min_slack: f64,
    pub worst_t: f64,
    pub verdict: bool,
}

/// `(1 − e^{−2Kt})/(KN)`, with limit `2t/N` at `K = 0`.
pub fn ge_coefficient(k: f64, inv_n: f64, t: f64) -> f64 {
    if k == 0.0 {
        2.0 * t * inv_n
    } else {
        -(-2.0 * k * t).exp_m1() / k * inv_n
    }
}

/// Integrated gradient estimate
/// `|∂P_t a|²_ρ ≤ e^{−2Kt}|∂a|²_{P_tρ} − c(t)|E(a, P_tρ)|²` at sampled
/// `(a, ρ)` and `t ∈ {0, 0.05, 0.2, 1}`.
pub fn ge_semigroup_form_check(
    gen: &LindbladGenerator,
    mean: OperatorMean,
    k: f64,
    n_dim: f64,
    samples: usize,
    seed: u64,
) -> Result<SemigroupFormReport> {
    const TIMES: [f64; 4] = [0.0, 0.05, 0.2, 1.0];
    const TOL: f64 = 1e-7;
    let inv_n = inverse_dimension(n_dim)?;
    let n = gen.dim();
    let per_sample: Vec<(f64, f64, bool)> = (0..samples.max(1))
        .into_par_iter()
        .map(|i| -> Result<Vec<(f64, f64, bool)>> {
            let rho = sample_state(n, seed, i);
            let mut rng = rng_for(seed ^ 0x9e37_79b9_7f4a_7c15, i as u64);
            let a = ginibre(&mut rng, n);
            let hat = mean_superop(mean, &rho)?;
            TIMES
                .iter()
                .map(|&t| {
                    let pa = gen.apply(t, &a);
                    let lhs = weighted_gradient_norm(gen, &hat, &pa);
                    let prho = gen.apply(t, &rho);
                    let prho = (&prho + prho.adjoint()) * c64(0.5, 0.0);
                    let hat_t = mean_superop(mean, &prho)?;
                    let e = energy(gen, &a, &prho).norm_sqr();
                    let rhs = (-2.0 * k * t).exp() * weighted_gradient_norm(gen, &hat_t, &a)
                        - ge_coefficient(k, inv_n, t) * e;
                    let slack = rhs - lhs;
                    Ok((slack, t, slack >= -TOL * lhs.abs().max(rhs.abs()).max(1.0)))
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let (min_slack, worst_t) = per_sample.iter().fold(
        (f64::INFINITY, 0.0),
        |acc, &(s, t, _)| if s < acc.0 { (s, t) } else { acc },
    );
    Ok(SemigroupFormReport {
        checks: per_sample.len(),
        min_slack,
        worst_t,
        verdict: per_sample.iter().all(|x| x.2),
    })
}

/// Sampled CGE(K,N): GE on the amplifications `P_t ⊗ id_{M_m}` for
/// `m ∈ {1, 2, m_amplify}` (values above `m_amplify` skipped).
pub fn cge_check(
    gen: &LindbladGenerator,
    mean: OperatorMean,
    k: f64,
    n_dim: f64,
    m_amplify: usize,
    config: GeConfig,
) -> Result<CurvatureReport> {
    if m_amplify == 0 {
        return Err(Error::InvalidParameter("amplification must be positive".into()));
    }
    let n = gen.dim();
    if n * m_amplify > MAX_CGE_DIM {
        return Err(Error::TooLarge {
            what: "amplified dimension",
            value: n * m_amplify,
            limit: MAX_CGE_DIM,
        });
    }
    let mut ms = vec![1, 2, m_amplify];
    ms.retain(|&m| m <= m_amplify);
    ms.sort_unstable();
    ms.dedup();
    let mut worst: Option<CurvatureReport> = None;
    let mut total = 0;
    for m in ms {
        let amp = amplify(gen, m)?;
        let r = ge_check_amplified(&amp, mean, k, n_dim, config, m)?;
        total += r.samples;
        let replace = worst.as_ref().is_none_or(|w| r.min_eig < w.min_eig);
        if replace {
            worst = Some(r);
        }
    }
    let mut report = worst.expect("m = 1 always runs");
    report.condition = Condition::Cge;
    report.samples = total;
    report.verdict = report.verdict && total > 0;
    report.notes = format!(
        "mean {}; amplifications up to {m_amplify}; sampled states only: a true verdict means no counterexample found",
        mean.id()
    );
    Ok(report)
}

/// `(ρ + ε1)/(1 + ε)`.
pub fn regularize(rho: &DensityMatrix, eps: f64) -> Result<DensityMatrix> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "regularization must lie in (0, 1], got {eps}"
        )));
    }
    DensityMatrix::new(regularized(rho.as_matrix(), eps))
}
