//! Entropy along the heat flow and the functional inequalities and distance
//! bounds that follow from curvature.
//!
//! Entropy is normalized by the trace state: `Ent(ρ) = τ(ρ log ρ)`, so
//! `Ent(1) = 0` and `Ent ≥ 0` on densities. The Fisher information is
//! `I(ρ) = τ((Lρ) log ρ)` and the entropy power is `U_N(ρ)² = exp(−2 Ent(ρ)/N)`.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curvature::{gamma_partials, inverse_dimension};
use crate::error::{Error, Result};
use crate::matcore::{
    c64, herm_eig, herm_eig_unchecked, hermitian_part, identity, tau, tau_norm, vectorize, AlgElement, C64,
};
use crate::means_ge::{mean_superop, riemannian_operator, sample_state, OperatorMean};
use crate::sampling::{random_hermitian, rng_for};
use crate::semigroups::{LindbladGenerator, STRICT_POSITIVITY_FLOOR};

fn hermitian_state(x: AlgElement) -> AlgElement {
    hermitian_part(&x)
}

/// `τ(ρ log ρ)`, with `0 log 0 = 0`.
pub fn entropy(rho: &AlgElement) -> Result<f64> {
    let eig = herm_eig(rho)?;
    if eig.min() < -1e-12 {
        return Err(Error::Domain { eigenvalue: eig.min() });
    }
    let n = rho.nrows() as f64;
    Ok(eig
        .values
        .iter()
        .map(|&l| if l > 0.0 { l * l.ln() } else { 0.0 })
        .sum::<f64>()
        / n)
}

/// `I(ρ) = τ((Lρ) log ρ)`.
pub fn fisher(gen: &LindbladGenerator, rho: &AlgElement) -> Result<f64> {
    let eig = herm_eig(rho)?;
    if eig.min() < STRICT_POSITIVITY_FLOOR {
        return Err(Error::SingularState { min_eig: eig.min() });
    }
    let log_rho = eig.reconstruct_with(f64::ln);
    Ok(tau(&(gen.apply_l(rho) * log_rho)).re)
}

/// `U_N(ρ)² = exp(−2 Ent/N)`.
pub fn entropy_power(ent: f64, inv_n: f64) -> f64 {
    (-2.0 * ent * inv_n).exp()
}

/// Grid derivatives: central in the interior, one-sided second order at the ends.
fn grid_derivatives(f: &[f64], h: f64) -> (Vec<f64>, Vec<f64>) {
    let m = f.len();
    let mut d1 = vec![0.0; m];
    let mut d2 = vec![0.0; m];
    for i in 1..m - 1 {
        d1[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
        d2[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h);
    }
    d1[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    d1[m - 1] = (3.0 * f[m - 1] - 4.0 * f[m - 2] + f[m - 3]) / (2.0 * h);
    d2[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / (h * h);
    d2[m - 1] = (2.0 * f[m - 1] - 5.0 * f[m - 2] + 4.0 * f[m - 3] - f[m - 4]) / (h * h);
    (d1, d2)
}

/// Sampled heat flow `ρ_t = P_t ρ₀` on a uniform grid.
#[derive(Clone, Debug)]
pub struct FlowTrace {
    pub n_dim: f64,
    pub times: Vec<f64>,
    pub states: Vec<AlgElement>,
    pub entropy: Vec<f64>,
    pub fisher: Vec<f64>,
    pub entropy_power: Vec<f64>,
    pub d1_entropy_power: Vec<f64>,
    pub d2_entropy_power: Vec<f64>,
}

impl FlowTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    /// Largest increase of entropy between consecutive grid points.
    pub fn max_entropy_increase(&self) -> f64 {
        self.entropy
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// CSV with header `t,entropy,fisher,entropy_power,d1_entropy_power,d2_entropy_power`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "t",
            "entropy",
            "fisher",
            "entropy_power",
            "d1_entropy_power",
            "d2_entropy_power",
        ])?;
        for i in 0..self.len() {
            w.write_record(
                [
                    self.times[i],
                    self.entropy[i],
                    self.fisher[i],
                    self.entropy_power[i],
                    self.d1_entropy_power[i],
                    self.d2_entropy_power[i],
                ]
                .iter()
                .map(|x| format!("{x:.16e}")),
            )?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `ρ_t` for `t = k·t_max/steps`, `k = 0..=steps`, with entropy functionals.
pub fn flow(gen: &LindbladGenerator, rho0: &AlgElement, t_max: f64, steps: usize, n_dim: f64) -> Result<FlowTrace> {
    if steps < 8 {
        return Err(Error::InvalidParameter(format!(
            "flow needs at least 8 steps, got {steps}"
        )));
    }
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidParameter(format!("t_max must be positive, got {t_max}")));
    }
    let inv_n = inverse_dimension(n_dim)?;
    let min_eig = herm_eig(rho0)?.min();
    if min_eig < STRICT_POSITIVITY_FLOOR {
        return Err(Error::SingularState { min_eig });
    }
    let h = t_max / steps as f64;
    let times: Vec<f64> = (0..=steps).map(|k| k as f64 * h).collect();
    let states: Vec<AlgElement> = times.iter().map(|&t| hermitian_state(gen.apply(t, rho0))).collect();
    let entropy = states.iter().map(entropy).collect::<Result<Vec<_>>>()?;
    let fisher = states.iter().map(|s| fisher(gen, s)).collect::<Result<Vec<_>>>()?;
    let entropy_power: Vec<f64> = entropy.iter().map(|&e| entropy_power(e, inv_n)).collect();
    let (d1, d2) = grid_derivatives(&entropy_power, h);
    Ok(FlowTrace {
        n_dim,
        times,
        states,
        entropy,
        fisher,
        entropy_power,
        d1_entropy_power: d1,
        d2_entropy_power: d2,
    })
}

/// `|(Ent(ρ_{t+h}) − Ent(ρ_{t−h}))/(2h) + I(ρ_t)|`.
pub fn de_bruijn_residual(gen: &LindbladGenerator, rho0: &AlgElement, t: f64, h: f64) -> Result<f64> {
    if !(h > 0.0 && t >= h) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < h <= t, got t = {t}, h = {h}"
        )));
    }
    let at = |s: f64| hermitian_state(gen.apply(s, rho0));
    let derivative = (entropy(&at(t + h))? - entropy(&at(t - h))?) / (2.0 * h);
    Ok((derivative + fisher(gen, &at(t))?).abs())
}

#[derive(Clone, Debug, Serialize)]
pub struct ConcavityReport {
    pub checks: usize,
    pub step: f64,
    /// `max (φ″ + 2Kφ′)` over interior points, `φ = U_N²`.
    pub max_damped: f64,
    /// `max φ″` over interior points.
    pub max_second: f64,
    /// Plain concavity verdict, reported for `K ≥ 0` only.
    pub concave: Option<bool>,
    pub verdict: bool,
}

/// Checks `φ″ ≤ −2Kφ′ + 1e-7` for `φ(t) = U_N(P_tρ₀)²` at interior grid points,
/// using central differences with the grid spacing.
pub fn entropy_power_concavity_check(
    gen: &LindbladGenerator,
    rho0: &AlgElement,
    k: f64,
    n_dim: f64,
    t_max: f64,
    steps: usize,
) -> Result<ConcavityReport> {
    const TOL: f64 = 1e-7;
    let h = t_max / steps as f64;
    let risk = h * h * gen.norm().powi(3);
    if risk > 1e-2 {
        return Err(Error::GridTooCoarse { risk });
    }
    let trace = flow(gen, rho0, t_max, steps, n_dim)?;
    let m = trace.len();
    let interior = 1..m - 1;
    let max_damped = interior
        .clone()
        .map(|i| trace.d2_entropy_power[i] + 2.0 * k * trace.d1_entropy_power[i])
        .fold(f64::NEG_INFINITY, f64::max);
    let max_second = interior
        .clone()
        .map(|i| trace.d2_entropy_power[i])
        .fold(f64::NEG_INFINITY, f64::max);
    let concave = (k >= 0.0).then_some(max_second <= TOL);
    Ok(ConcavityReport {
        checks: m - 2,
        step: h,
        max_damped,
        max_second,
        concave,
        verdict: max_damped <= TOL && concave.unwrap_or(true),
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MlsiReport {
    /// `KN(U_N(ρ)^{-2} − 1)`, or `2K Ent(ρ)` at `N = ∞`.
    pub lhs: f64,
    /// `I(ρ)`.
    pub fisher: f64,
    pub entropy: f64,
    pub verdict: bool,
}

/// Dimensional modified log-Sobolev inequality `KN(U_N(ρ)^{-2} − 1) ≤ I(ρ)`.
pub fn mlsi_check(gen: &LindbladGenerator, rho: &AlgElement, k: f64, n_dim: f64) -> Result<MlsiReport> {
    if !(k > 0.0) {
        return Err(Error::InvalidParameter(format!("MLSI requires K > 0, got {k}")));
    }
    let inv_n = inverse_dimension(n_dim)?;
    let ent = entropy(rho)?;
    let fisher = fisher(gen, rho)?;
    let lhs = if inv_n == 0.0 {
        2.0 * k * ent
    } else {
        k * (2.0 * ent * inv_n).exp_m1() / inv_n
    };
    Ok(MlsiReport {
        lhs,
        fisher,
        entropy: ent,
        verdict: lhs <= fisher + 1e-8,
    })
}

/// Smallest non-zero eigenvalue of `L`.
pub fn spectral_gap(gen: &LindbladGenerator) -> Result<f64> {
    gen.spectral_gap()
}

#[derive(Clone, Debug)]
pub struct DistanceEstimate {
    /// Best `τ(aΔ)` found with `Γ(a) ⪯ 1`: a lower bound on the distance.
    pub value: f64,
    /// Hermitian `a` with `|Γ(a)| = 1` achieving `value`.
    pub witness: AlgElement,
    /// Best value after each start, nondecreasing.
    pub history: Vec<f64>,
}

struct DistanceProblem<'a> {
    gen: &'a LindbladGenerator,
    delta: AlgElement,
    projector: DMatrix<C64>,
}

impl DistanceProblem<'_> {
    fn project(&self, a: &AlgElement) -> AlgElement {
        let n = self.gen.dim();
        let v = &self.projector * vectorize(a);
        hermitian_part(&DMatrix::from_fn(n, n, |p, q| v[p * n + q]))
    }

    fn numerator(&self, a: &AlgElement) -> f64 {
        tau(&(a * &self.delta)).re
    }

    /// Ratio `τ(aΔ)/sqrt|Γ(a)|` and its gradient in the Frobenius geometry.
    fn value_and_gradient(&self, a: &AlgElement) -> Option<(f64, AlgElement)> {
        let n = self.gen.dim();
        let g = gamma_partials(self.gen, a, a).ok()?;
        let eig = herm_eig_unchecked(&g);
        let top = eig.max();
        if !(top > 1e-300) {
            return None;
        }
        let u: DVector<C64> = eig.vectors.column(n - 1).into_owned();
        let num = self.numerator(a);
        let mut x = DMatrix::<C64>::zeros(n, n);
        for v in self.gen.jump_ops() {
            let w = (v * a - a * v) * &u;
            let uw = &u * w.adjoint();
            x += &uw * v - v * &uw;
        }
        let grad_top = hermitian_part(&x) * c64(2.0, 0.0);
        let grad_num = &self.delta / c64(n as f64, 0.0);
        let s = top.sqrt();
        let grad = grad_num / c64(s, 0.0) - grad_top * c64(num / (2.0 * top * s), 0.0);
        Some((num / s, self.project(&grad)))
    }

    fn value(&self, a: &AlgElement) -> Option<f64> {
        let g = gamma_partials(self.gen, a, a).ok()?;
        let top = herm_eig_unchecked(&g).max();
        (top > 1e-300).then(|| self.numerator(a) / top.sqrt())
    }

    fn ascend(&self, start: &AlgElement) -> Option<(f64, AlgElement)> {
        let normalize = |x: AlgElement| {
            let nx = x.norm();
            (nx > 0.0).then(|| x / c64(nx, 0.0))
        };
        let mut a = normalize(self.project(start))?;
        let (mut f, mut grad) = self.value_and_gradient(&a)?;
        let mut step = 1.0;
        for _ in 0..2000 {
            if step < 1e-14 {
                break;
            }
            let Some(cand) = normalize(&a + &grad * c64(step, 0.0)) else {
                break;
            };
            match self.value_and_gradient(&cand) {
                Some((fc, gc)) if fc > f => {
                    let gain = fc - f;
                    a = cand;
                    f = fc;
                    grad = gc;
                    step *= 1.5;
                    if gain <= 1e-15 * f.abs().max(1.0) {
                        break;
                    }
                }
                _ => step *= 0.5,
            }
        }
        Some((f, a))
    }
}

/// Lower estimate of the distance `sup {τ(a(ρ₁ − ρ₀)) : a = a*, Γ(a) ⪯ 1}` by
/// projected gradient ascent on the scale-invariant ratio
/// `τ(aΔ)/sqrt|Γ(a)|`. Starts: `Δ`, `L⁺Δ`, and `restarts` random pairs `±r`.
pub fn connes_distance(
    gen: &LindbladGenerator,
    rho0: &AlgElement,
    rho1: &AlgElement,
    restarts: usize,
    seed: u64,
) -> Result<DistanceEstimate> {
    if rho0.shape() != rho1.shape() || rho0.nrows() != gen.dim() {
        return Err(Error::DimensionMismatch {
            expected: gen.dim(),
            found: rho1.nrows(),
        });
    }
    let n = gen.dim();
    let delta = hermitian_part(&(rho1 - rho0));
    if delta.norm() == 0.0 {
        return Ok(DistanceEstimate {
            value: 0.0,
            witness: DMatrix::zeros(n, n),
            history: vec![0.0],
        });
    }
    let projector = gen.range_projector().into_matrix();
    let problem = DistanceProblem {
        gen,
        delta: delta.clone(),
        projector,
    };
    let off_range = (problem.project(&delta) - &delta).norm();
    if off_range > 1e-10 * delta.norm().max(1.0) {
        return Err(Error::NonErgodic {
            kernel_dim: gen.ambient_kernel_dim(),
        });
    }

    let eig = gen.spectrum();
    let thr = 1e-10 * gen.norm().max(1.0);
    let pinv = eig.reconstruct_with(|l| if l.abs() > thr { 1.0 / l } else { 0.0 });
    let pinv_delta = {
        let v = pinv * vectorize(&delta);
        DMatrix::from_fn(n, n, |p, q| v[p * n + q])
    };
    let mut starts = vec![delta.clone(), pinv_delta];
    let mut rng: ChaCha8Rng = rng_for(seed, 0);
    for _ in 0..restarts {
        let r = random_hermitian(&mut rng, n);
        starts.push(-&r);
        starts.push(r);
    }

    let mut best = f64::NEG_INFINITY;
    let mut best_a = DMatrix::zeros(n, n);
    let mut history = Vec::with_capacity(starts.len());
    for s in &starts {
        if let Some((f, a)) = problem.ascend(s) {
            if f > best {
                best = f;
                best_a = a;
            }
        }
        history.push(best.max(0.0));
    }
    if best <= 0.0 {
        return Ok(DistanceEstimate {
            value: 0.0,
            witness: DMatrix::zeros(n, n),
            history,
        });
    }
    let top = herm_eig_unchecked(&gamma_partials(gen, &best_a, &best_a)?).max();
    let witness = &best_a / c64(top.sqrt(), 0.0);
    let value = problem.value(&witness).unwrap_or(best);
    Ok(DistanceEstimate {
        value,
        witness,
        history,
    })
}

/// `g_ρ(x, x) = <x, K_ρ⁺ x>_tau`, or `+∞` when `x` leaves the range of `K_ρ`.
pub fn w_metric(gen: &LindbladGenerator, mean: OperatorMean, rho: &AlgElement, tangent: &AlgElement) -> Result<f64> {
    let n = gen.dim();
    let t = tau(tangent);
    if t.norm() > 1e-10 * tangent.camax().max(1.0) {
        return Err(Error::InvalidParameter(format!("tangent must be traceless, tau = {t}")));
    }
    let hat = mean_superop(mean, rho)?;
    let k_rho = riemannian_operator(gen, &hat);
    let eig = herm_eig_unchecked(&k_rho);
    let cutoff = 1e-10 * eig.scale();
    let v = vectorize(tangent);
    let coeffs = eig.vectors.adjoint() * &v;
    let mut outside = 0.0;
    let mut value = 0.0;
    for (k, &l) in eig.values.iter().enumerate() {
        let c2 = coeffs[k].norm_sqr();
        if l.abs() > cutoff {
            value += c2 / l;
        } else {
            outside += c2;
        }
    }
    if outside.sqrt() > 1e-8 * v.norm().max(1.0) {
        return Ok(f64::INFINITY);
    }
    Ok(value / n as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BonnetMyersMode {
    /// Spectral distance to the trace state, implied by BE(K,N).
    Be,
    /// Length of the heat-flow path in the transport metric, implied by GE(K,N).
    Ge(OperatorMean),
}

#[derive(Clone, Debug, Serialize)]
pub struct BonnetMyersReport {
    pub mode: String,
    /// Per-state bound `(π/2) sqrt(N/K)`.
    pub bound: f64,
    /// Diameter bound `π sqrt(N/K)`.
    pub diameter_bound: f64,
    pub estimates: Vec<f64>,
    pub max_estimate: f64,
    pub verdict: bool,
}

/// `π sqrt(N/K)`.
pub fn diameter_bound(k: f64, n_dim: f64) -> f64 {
    PI * (n_dim / k).sqrt()
}

/// Trapezoidal length `∫₀^T sqrt(g_{ρ_t}(Lρ_t, Lρ_t)) dt` of the heat flow
/// from `ρ₀`, with `T` doubled until `|ρ_T − 1|_tau ≤ 1e-8`.
pub fn flow_path_length(gen: &LindbladGenerator, mean: OperatorMean, rho0: &AlgElement) -> Result<f64> {
    const STEPS_PER_UNIT: f64 = 200.0;
    let n = gen.dim();
    let one = identity(n);
    if tau_norm(&(rho0 - &one)) <= 1e-8 {
        return Ok(0.0);
    }
    let gap = gen
        .spectrum()
        .values
        .iter()
        .copied()
        .find(|&l| l > 1e-10 * gen.norm().max(1.0))
        .ok_or(Error::NonErgodic {
            kernel_dim: gen.ambient_kernel_dim(),
        })?;
    let mut t_end = ((tau_norm(&(rho0 - &one)) / 1e-8).ln() / gap).max(1.0);
    while tau_norm(&(gen.apply(t_end, rho0) - &one)) > 1e-8 {
        t_end *= 2.0;
    }
    let steps = (t_end * STEPS_PER_UNIT).ceil().max(100.0) as usize;
    let h = t_end / steps as f64;
    let speed = |t: f64| -> Result<f64> {
        let rho = hermitian_state(gen.apply(t, rho0));
        let lr = gen.apply_l(&rho);
        Ok(w_metric(gen, mean, &rho, &lr)?.sqrt())
    };
    let mut total = 0.5 * (speed(0.0)? + speed(t_end)?);
    for k in 1..steps {
        total += speed(k as f64 * h)?;
    }
    Ok(total * h)
}

/// Checks the per-state Bonnet–Myers bound `(π/2) sqrt(N/K)` on sampled states.
pub fn bonnet_myers_check(
    gen: &LindbladGenerator,
    k: f64,
    n_dim: f64,
    mode: BonnetMyersMode,
    samples: usize,
    seed: u64,
) -> Result<BonnetMyersReport> {
    if !(k > 0.0) {
        return Err(Error::InvalidParameter(format!("Bonnet–Myers requires K > 0, got {k}")));
    }
    inverse_dimension(n_dim)?;
    let kd = gen.ambient_kernel_dim();
    if kd != 1 {
        return Err(Error::NonErgodic { kernel_dim: kd });
    }
    let n = gen.dim();
    let bound = 0.5 * diameter_bound(k, n_dim);
    let one = identity(n);
    let estimates: Vec<f64> = (0..samples.max(1))
        .map(|i| {
            let rho = sample_state(n, seed, i);
            match mode {
                BonnetMyersMode::Be => {
                    connes_distance(gen, &rho, &one, 4, seed.wrapping_add(i as u64)).map(|d| d.value)
                }
                BonnetMyersMode::Ge(mean) => flow_path_length(gen, mean, &rho),
            }
        })
        .collect::<Result<_>>()?;
    let max_estimate = estimates.iter().copied().fold(0.0, f64::max);
    let (slack, label) = match mode {
        BonnetMyersMode::Be => (1e-6, "BE".to_string()),
        BonnetMyersMode::Ge(mean) => (1e-4, format!("GE({})", mean.id())),
    };
    Ok(BonnetMyersReport {
        mode: label,
        bound,
        diameter_bound: 2.0 * bound,
        verdict: max_estimate <= bound + slack,
        estimates,
        max_estimate,
    })
}

/// Seeded random density matrix helper for examples and tests.
pub fn seeded_state(n: usize, seed: u64) -> AlgElement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    crate::sampling::ginibre_state(&mut rng, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::matrix_unit;
    use crate::sampling::{ginibre_state, regularized};
    use crate::semigroups::{cyclic_group_semigroup, depolarizing, tensor};

    fn diag(v: &[f64]) -> AlgElement {
        DMatrix::from_fn(
            v.len(),
            v.len(),
            |i, j| if i == j { c64(v[i], 0.0) } else { c64(0.0, 0.0) },
        )
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&identity(3)).unwrap(), 0.0);
        let pure = matrix_unit(3, 0, 0) * c64(3.0, 0.0);
        assert!((entropy(&pure).unwrap() - 3f64.ln()).abs() < 1e-14);
        let near = regularized(&pure, 1e-9);
        assert!((entropy(&near).unwrap() - 3f64.ln()).abs() < 1e-6);
        let g = depolarizing(2).unwrap();
        assert_eq!(fisher(&g, &identity(2)).unwrap(), 0.0);
        assert!(matches!(
            fisher(&g, &matrix_unit(2, 0, 0)),
            Err(Error::SingularState { .. })
        ));
    }

    #[test]
    fn depolarizing_flow_closed_form() {
        let g = depolarizing(2).unwrap();
        let rho0 = diag(&[1.6, 0.4]);
        let tr = flow(&g, &rho0, 3.0, 30, 4.0).unwrap();
        assert_eq!(tr.len(), 31);
        for (t, (s, e)) in tr.times.iter().zip(tr.states.iter().zip(&tr.entropy)) {
            let expect = &rho0 * c64((-t).exp(), 0.0) + identity(2) * c64(1.0 - (-t).exp(), 0.0);
            assert!((s - &expect).camax() < 1e-12);
            let p = 1.0 + 0.6 * (-t).exp();
            let q = 2.0 - p;
            assert!((e - 0.5 * (p * p.ln() + q * q.ln())).abs() < 1e-12);
            assert!((tau(s).re - 1.0).abs() < 1e-11);
        }
        assert!(tr.max_entropy_increase() <= 1e-10);
        let fixed = flow(&g, &identity(2), 1.0, 8, 4.0).unwrap();
        assert!(fixed.entropy.iter().all(|&e| e.abs() < 1e-14));
        assert!(fixed.d2_entropy_power.iter().all(|&d| d.abs() < 1e-12));
    }

    #[test]
    fn de_bruijn_identity() {
        let g = cyclic_group_semigroup(4).unwrap();
        let rho = regularized(&seeded_state(4, 3), 0.1);
        assert!(de_bruijn_residual(&g, &rho, 0.3, 1e-4).unwrap() < 1e-6);
    }

    #[test]
    fn concavity_and_mlsi_for_depolarizing() {
        let g = depolarizing(2).unwrap();
        let rho = regularized(&seeded_state(2, 5), 0.05);
        let r = entropy_power_concavity_check(&g, &rho, 0.5, 4.0, 4.0, 400).unwrap();
        assert!(r.verdict, "{r:?}");
        assert!(matches!(
            entropy_power_concavity_check(&g, &rho, 0.5, 4.0, 10.0, 8),
            Err(Error::GridTooCoarse { .. })
        ));
        let m = mlsi_check(&g, &rho, 0.5, 4.0).unwrap();
        assert!(m.verdict, "{m:?}");
        let big_n = mlsi_check(&g, &rho, 0.5, 1e6).unwrap();
        assert!((big_n.lhs - 2.0 * 0.5 * m.entropy).abs() < 1e-3);
        assert!(mlsi_check(&g, &rho, 0.0, 4.0).is_err());
    }

    #[test]
    fn gaps() {
        assert!((spectral_gap(&depolarizing(3).unwrap()).unwrap() - 1.0).abs() < 1e-12);
        let z4 = cyclic_group_semigroup(4).unwrap();
        assert!((spectral_gap(&z4).unwrap() - 1.0).abs() < 1e-12);
        let z2 = cyclic_group_semigroup(2).unwrap();
        let t = tensor(&z2, &z2).unwrap();
        assert!((spectral_gap(&t).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn connes_distance_two_point_example() {
        let z2 = cyclic_group_semigroup(2).unwrap();
        let sx = DMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(1., 0.), c64(1., 0.), c64(0., 0.)]);
        let rho0 = identity(2) + &sx * c64(0.6, 0.0);
        let d = connes_distance(&z2, &rho0, &identity(2), 3, 1).unwrap();
        assert!((d.value - 0.6).abs() < 1e-9, "{}", d.value);
        assert!(d.history.windows(2).all(|w| w[1] >= w[0]));
        let same = connes_distance(&z2, &rho0, &rho0, 3, 1).unwrap();
        assert_eq!(same.value, 0.0);
        assert!(matches!(
            connes_distance(&z2, &matrix_unit(2, 0, 0), &identity(2), 1, 1),
            Err(Error::NonErgodic { .. })
        ));
    }

    #[test]
    fn connes_distance_symmetric() {
        let g = depolarizing(2).unwrap();
        let a = seeded_state(2, 1);
        let b = seeded_state(2, 2);
        let ab = connes_distance(&g, &a, &b, 4, 7).unwrap().value;
        let ba = connes_distance(&g, &b, &a, 4, 7).unwrap().value;
        assert!((ab - ba).abs() < 1e-6);
        assert!(ab > 0.0);
    }

    #[test]
    fn w_metric_examples() {
        let g = depolarizing(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = ginibre_state(&mut rng, 2);
        let zero = DMatrix::zeros(2, 2);
        assert_eq!(w_metric(&g, OperatorMean::Log, &rho, &zero).unwrap(), 0.0);
        let lr = g.apply_l(&rho);
        let v = w_metric(&g, OperatorMean::Log, &rho, &lr).unwrap();
        assert!(v.is_finite() && v > 0.0);
        let v3 = w_metric(&g, OperatorMean::Log, &rho, &(&lr * c64(3.0, 0.0))).unwrap();
        assert!((v3 - 9.0 * v).abs() < 1e-10 * v3);
        assert!(w_metric(&g, OperatorMean::Log, &rho, &identity(2)).is_err());
    }

    #[test]
    fn bonnet_myers_depolarizing() {
        let g = depolarizing(2).unwrap();
        let be = bonnet_myers_check(&g, 0.5, 4.0, BonnetMyersMode::Be, 4, 1).unwrap();
        assert!(be.verdict, "{be:?}");
        assert!((be.bound - 0.5 * PI * 8f64.sqrt()).abs() < 1e-12);
        let ge = bonnet_myers_check(&g, 0.5, 4.0, BonnetMyersMode::Ge(OperatorMean::Log), 2, 1).unwrap();
        assert!(ge.verdict, "{ge:?}");
        assert_eq!(flow_path_length(&g, OperatorMean::Log, &identity(2)).unwrap(), 0.0);
        let z4 = cyclic_group_semigroup(4).unwrap();
        assert!(matches!(
            bonnet_myers_check(&z4, 0.5, 4.0, BonnetMyersMode::Be, 1, 1),
            Err(Error::NonErgodic { .. })
        ));
    }

    #[test]
    fn csv_header_and_rows() {
        let g = depolarizing(2).unwrap();
        let tr = flow(&g, &diag(&[1.5, 0.5]), 1.0, 10, 4.0).unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,entropy,fisher,entropy_power,d1_entropy_power,d2_entropy_power"
        );
        assert_eq!(lines.count(), 11);
    }
}
