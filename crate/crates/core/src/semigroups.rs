//! Lindblad generators of tracially symmetric quantum Markov semigroups.
//!
//! A generator is given by jump operators `v_j` whose set is closed under
//! adjoints. The partial derivatives are `∂_j = [v_j, ·]` and the generator is
//! `L = Σ_j ∂_j† ∂_j`, with semigroup `P_t = exp(-tL)`.

use std::collections::HashMap;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::{
    c64, herm_eig, herm_eig_unchecked, identity, kron, matrix_unit, psd_min_eig, tau, tau_norm, vectorize, AlgElement,
    HermEig, SuperOp, C64,
};

/// Largest algebra dimension accepted by the generic constructor.
pub const MAX_DIM: usize = 24;
/// Size guard for tensor products and amplifications.
pub const MAX_PRODUCT_DIM: usize = 16;

const PAIRING_TOL: f64 = 1e-10;
const ZERO_MODE_TOL: f64 = 1e-10;

/// `v_{partner} = phase · v_j*`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdjointPair {
    pub partner: usize,
    pub phase: C64,
}

#[derive(Clone, Debug)]
pub struct LindbladGenerator {
    n: usize,
    jump_ops: Vec<AlgElement>,
    derivations: Vec<SuperOp>,
    generator: SuperOp,
    pairing: Vec<AdjointPair>,
    label: String,
    /// Tau-orthonormal basis of an invariant subalgebra the semigroup lives on
    /// (group algebras embedded in `B(l2(G))`); `None` means all of `M_n`.
    reference_basis: Option<Vec<AlgElement>>,
    spectrum: OnceLock<HermEig>,
}

fn adjoint_partner(vs: &[AlgElement], j: usize, taken: &[bool]) -> Option<AdjointPair> {
    let target = vs[j].adjoint();
    let tn = target.norm_squared();
    let tol = PAIRING_TOL * vs[j].norm().max(1.0);
    // Prefer self-pairing, then the first free candidate.
    let order = std::iter::once(j).chain((0..vs.len()).filter(move |&k| k != j));
    for k in order {
        if taken[k] {
            continue;
        }
        let phase = if tn == 0.0 {
            c64(1.0, 0.0)
        } else {
            let overlap: C64 = target.iter().zip(vs[k].iter()).map(|(a, b)| a.conj() * b).sum();
            overlap / tn
        };
        if tn > 0.0 && (phase.norm() - 1.0).abs() > 1e-8 {
            continue;
        }
        if (&vs[k] - &target * phase).norm() <= tol {
            return Some(AdjointPair { partner: k, phase });
        }
    }
    None
}

/// Builds the generator `L = Σ [v_j*, [v_j, ·]]` from jump operators.
///
/// The list must be closed under adjoints up to unit phases.
pub fn from_jump_ops(vs: Vec<AlgElement>) -> Result<LindbladGenerator> {
    let n = match vs.first() {
        Some(v) => v.nrows(),
        None => return Err(Error::InvalidParameter("at least one jump operator is required".into())),
    };
    if n == 0 {
        return Err(Error::InvalidParameter("algebra dimension must be positive".into()));
    }
    if n > MAX_DIM {
        return Err(Error::TooLarge {
            what: "algebra dimension",
            value: n,
            limit: MAX_DIM,
        });
    }
    for v in &vs {
        if !v.is_square() || v.nrows() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: v.nrows(),
            });
        }
    }

    let mut pairing: Vec<Option<AdjointPair>> = vec![None; vs.len()];
    let mut taken = vec![false; vs.len()];
    for j in 0..vs.len() {
        if pairing[j].is_some() {
            continue;
        }
        let pair = adjoint_partner(&vs, j, &taken).ok_or(Error::AdjointClosure { index: j })?;
        let k = pair.partner;
        taken[j] = true;
        taken[k] = true;
        pairing[j] = Some(pair);
        if k != j {
            // v_k = c v_j*  implies  v_j = conj(c) v_k*.
            pairing[k] = Some(AdjointPair {
                partner: j,
                phase: pair.phase.conj(),
            });
        }
    }
    let pairing: Vec<AdjointPair> = pairing.into_iter().map(|p| p.expect("all paired")).collect();

    let derivations: Vec<SuperOp> = vs.iter().map(SuperOp::commutator).collect();
    let mut l = DMatrix::<C64>::zeros(n * n, n * n);
    for d in &derivations {
        l += d.matrix().adjoint() * d.matrix();
    }
    let generator = SuperOp::from_matrix(n, l)?;

    Ok(LindbladGenerator {
        n,
        jump_ops: vs,
        derivations,
        generator,
        pairing,
        label: "custom".into(),
        reference_basis: None,
        spectrum: OnceLock::new(),
    })
}

impl LindbladGenerator {
    /// The zero generator on `M_n` (single null jump operator).
    pub fn zero(n: usize) -> Result<Self> {
        Ok(from_jump_ops(vec![DMatrix::zeros(n, n)])?.with_label("zero"))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    fn with_reference_basis(mut self, basis: Vec<AlgElement>) -> Self {
        self.reference_basis = Some(basis);
        self
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of partial derivatives `d`.
    pub fn num_derivations(&self) -> usize {
        self.jump_ops.len()
    }

    pub fn jump_ops(&self) -> &[AlgElement] {
        &self.jump_ops
    }

    pub fn derivations(&self) -> &[SuperOp] {
        &self.derivations
    }

    pub fn generator(&self) -> &SuperOp {
        &self.generator
    }

    pub fn pairing(&self) -> &[AdjointPair] {
        &self.pairing
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn reference_basis(&self) -> Option<&[AlgElement]> {
        self.reference_basis.as_deref()
    }

    /// `L x`.
    pub fn apply_l(&self, x: &AlgElement) -> AlgElement {
        self.generator.apply(x)
    }

    /// `∂_j x = [v_j, x]`.
    pub fn partial(&self, j: usize, x: &AlgElement) -> AlgElement {
        let v = &self.jump_ops[j];
        v * x - x * v
    }

    /// `∂_j† x = [v_j*, x]`.
    pub fn partial_adjoint(&self, j: usize, x: &AlgElement) -> AlgElement {
        let v = self.jump_ops[j].adjoint();
        &v * x - x * &v
    }

    /// Spectral decomposition of `L` as a self-adjoint superoperator.
    pub fn spectrum(&self) -> &HermEig {
        self.spectrum
            .get_or_init(|| herm_eig_unchecked(self.generator.matrix()))
    }

    /// Operator norm `|L|` (largest eigenvalue, since `L ≥ 0`).
    pub fn norm(&self) -> f64 {
        self.spectrum().values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// `P_t = exp(-tL)`. Negative `t` is permitted for finite differencing only.
    pub fn evolve(&self, t: f64) -> SuperOp {
        let mat = self.spectrum().reconstruct_with(|l| (-t * l).exp());
        SuperOp::from_matrix(self.n, mat).expect("spectral reconstruction has generator size")
    }

    /// `P_t x`.
    pub fn apply(&self, t: f64, x: &AlgElement) -> AlgElement {
        let eig = self.spectrum();
        let coeffs = eig.vectors.adjoint() * vectorize(x);
        let scaled = DMatrix::from_fn(coeffs.len(), 1, |k, _| coeffs[k] * (-t * eig.values[k]).exp());
        let v = &eig.vectors * scaled;
        DMatrix::from_fn(self.n, self.n, |p, q| v[(p * self.n + q, 0)])
    }

    /// Eigenvalues of `L` restricted to the reference algebra, ascending.
    pub fn reference_spectrum(&self) -> Vec<f64> {
        match &self.reference_basis {
            None => self.spectrum().values.clone(),
            Some(basis) => {
                let n = self.n as f64;
                let cols: Vec<_> = basis.iter().map(vectorize).collect();
                let v = DMatrix::from_columns(&cols);
                let restricted = v.adjoint() * self.generator.matrix() * &v / c64(n, 0.0);
                let mut vals: Vec<f64> = herm_eig_unchecked(&restricted).values.into_iter().collect();
                vals.sort_by(f64::total_cmp);
                vals
            }
        }
    }

    fn zero_threshold(&self) -> f64 {
        ZERO_MODE_TOL * self.norm().max(1.0)
    }

    /// Dimension of `ker L` on the reference algebra.
    pub fn kernel_dim(&self) -> usize {
        let thr = self.zero_threshold();
        self.reference_spectrum().iter().filter(|&&l| l.abs() <= thr).count()
    }

    pub fn is_ergodic(&self) -> bool {
        self.kernel_dim() == 1
    }

    /// Dimension of `ker L` on all of `M_n`.
    pub fn ambient_kernel_dim(&self) -> usize {
        let thr = self.zero_threshold();
        self.spectrum().values.iter().filter(|&&l| l.abs() <= thr).count()
    }

    /// Orthogonal projection onto `(ker L)^⊥` in `M_n`, as a superoperator.
    pub fn range_projector(&self) -> SuperOp {
        let thr = self.zero_threshold();
        let mat = self
            .spectrum()
            .reconstruct_with(|l| if l.abs() > thr { 1.0 } else { 0.0 });
        SuperOp::from_matrix(self.n, mat).expect("spectral reconstruction has generator size")
    }

    /// Smallest non-zero eigenvalue of `L` on the reference algebra.
    pub fn spectral_gap(&self) -> Result<f64> {
        let kd = self.kernel_dim();
        if kd != 1 {
            return Err(Error::NonErgodic { kernel_dim: kd });
        }
        let thr = self.zero_threshold();
        self.reference_spectrum()
            .into_iter()
            .find(|&l| l > thr)
            .ok_or(Error::NonErgodic { kernel_dim: kd })
    }

    /// Checks the structural invariants: `L(1) = 0`, `L` self-adjoint and
    /// positive, `∂_j† = [v_j*, ·]`, and adjoint closure of the jump operators.
    pub fn check_invariants(&self) -> Result<()> {
        let one = identity(self.n);
        let l1 = self.apply_l(&one).camax();
        if l1 > 1e-11 {
            return Err(Error::Verification(format!("L(1) = {l1:.3e}")));
        }
        if !self.generator.is_self_adjoint(1e-11) {
            return Err(Error::Verification("L is not self-adjoint".into()));
        }
        let scale = self.norm().max(1.0);
        if self.spectrum().min() < -1e-11 * scale {
            return Err(Error::Verification(format!(
                "L has negative eigenvalue {:.3e}",
                self.spectrum().min()
            )));
        }
        for (j, d) in self.derivations.iter().enumerate() {
            let expected = SuperOp::commutator(&self.jump_ops[j].adjoint());
            if (d.adjoint().matrix() - expected.matrix()).camax() > 1e-11 {
                return Err(Error::Verification(format!("adjoint of derivation {j} mismatch")));
            }
            let p = self.pairing[j];
            let diff = (&self.jump_ops[p.partner] - self.jump_ops[j].adjoint() * p.phase).norm();
            if diff > PAIRING_TOL * self.jump_ops[j].norm().max(1.0) {
                return Err(Error::AdjointClosure { index: j });
            }
        }
        Ok(())
    }
}

/// Schoenberg test: `Σ conj(α_i) α_j a_ij ≤ 0` whenever `Σ α_j = 0`,
/// evaluated as positivity of `-P A P` with `P = I - 11ᵀ/n`.
pub fn cnd_check(a: &DMatrix<f64>) -> bool {
    cnd_max_value(a) <= 1e-10
}

fn cnd_max_value(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    if n == 0 {
        return 0.0;
    }
    let p = DMatrix::<f64>::identity(n, n) - DMatrix::from_element(n, n, 1.0 / n as f64);
    let pap = &p * a * &p;
    let sym = (&pap + pap.transpose()) * 0.5;
    sym.symmetric_eigenvalues()
        .iter()
        .fold(f64::NEG_INFINITY, |m, &v| m.max(v))
}

fn validate_schur_symbol(a: &DMatrix<f64>) -> Result<()> {
    let n = a.nrows();
    if !a.is_square() || n == 0 {
        return Err(Error::InvalidSymbol("symbol must be a non-empty square matrix".into()));
    }
    for i in 0..n {
        if a[(i, i)] != 0.0 {
            return Err(Error::InvalidSymbol(format!("diagonal entry a_{i}{i} is non-zero")));
        }
        for j in 0..n {
            if !a[(i, j)].is_finite() || a[(i, j)] < 0.0 {
                return Err(Error::InvalidSymbol(format!(
                    "entry a_{i}{j} is negative or not finite"
                )));
            }
            if (a[(i, j)] - a[(j, i)]).abs() > 1e-12 * a[(i, j)].abs().max(1.0) {
                return Err(Error::InvalidSymbol(format!("entries a_{i}{j} and a_{j}{i} differ")));
            }
        }
    }
    Ok(())
}

/// Diagonal jump operators `v_k = Σ_j a(j)_k e_jj` for points `a(j) ∈ R^d`.
fn diagonal_jump_ops(points: &[Vec<f64>], d: usize) -> Vec<AlgElement> {
    let n = points.len();
    (0..d)
        .map(|k| DMatrix::from_fn(n, n, |i, j| if i == j { c64(points[i][k], 0.0) } else { c64(0.0, 0.0) }))
        .collect()
}

/// Semigroup of the Schur multiplier `e_ij ↦ e^{-t a_ij} e_ij`.
pub fn schur_semigroup(a: &DMatrix<f64>) -> Result<LindbladGenerator> {
    validate_schur_symbol(a)?;
    let max_value = cnd_max_value(a);
    if max_value > 1e-10 {
        return Err(Error::NotConditionallyNegative { max_value });
    }
    let n = a.nrows();
    let j = DMatrix::<f64>::identity(n, n) - DMatrix::from_element(n, n, 1.0 / n as f64);
    let g = &j * a * &j * -0.5;
    let g = (&g + g.transpose()) * 0.5;
    let eig = g.symmetric_eigen();
    let lam_max = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if let Some(&neg) = eig.eigenvalues.iter().find(|&&l| l < -1e-8 * lam_max.max(1.0)) {
        return Err(Error::NegativeGram { eigenvalue: neg });
    }
    let keep: Vec<usize> = (0..n).filter(|&k| eig.eigenvalues[k] > 1e-10).collect();
    let d = keep.len();
    let points: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            keep.iter()
                .map(|&k| eig.eigenvalues[k].sqrt() * eig.eigenvectors[(i, k)])
                .collect()
        })
        .collect();

    let gen = if d == 0 {
        // Rank-zero symbol: the zero generator, with no partial derivatives.
        LindbladGenerator {
            n,
            jump_ops: Vec::new(),
            derivations: Vec::new(),
            generator: SuperOp::zero(n),
            pairing: Vec::new(),
            label: String::new(),
            reference_basis: None,
            spectrum: OnceLock::new(),
        }
    } else {
        from_jump_ops(diagonal_jump_ops(&points, d))?
    };

    for p in 0..n {
        for q in 0..n {
            let e = matrix_unit(n, p, q);
            let err = (gen.apply_l(&e) - &e * c64(a[(p, q)], 0.0)).camax();
            if err > 1e-9 * lam_max.max(1.0) {
                return Err(Error::Verification(format!("L e_{p}{q} deviates by {err:.3e}")));
            }
        }
    }
    Ok(gen.with_label(format!("schur(n={n}, d={d})")))
}

/// Permutation matrix of `g` acting on the basis of `l2(G)`, i.e. the left
/// regular representation `λ_g 1_h = 1_{gh}`.
fn regular_rep(mult: impl Fn(usize) -> usize, order: usize) -> AlgElement {
    let mut m = DMatrix::zeros(order, order);
    for h in 0..order {
        m[(mult(h), h)] = c64(1.0, 0.0);
    }
    m
}

fn verify_group_eigen(gen: &LindbladGenerator, basis: &[AlgElement], lengths: &[f64]) -> Result<()> {
    for (g, (lam, &len)) in basis.iter().zip(lengths).enumerate() {
        let err = (gen.apply_l(lam) - lam * c64(len, 0.0)).camax();
        if err > 1e-9 {
            return Err(Error::Verification(format!(
                "L λ_{g} deviates from ℓ(g) λ_g by {err:.3e}"
            )));
        }
    }
    Ok(())
}

/// Word-length semigroup on the cyclic group `Z_n` (n even), acting on
/// `B(l2(Z_n)) = M_n`.
pub fn cyclic_group_semigroup(n: usize) -> Result<LindbladGenerator> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "cyclic group order must be at least 2, got {n}"
        )));
    }
    if n % 2 == 1 {
        return Err(Error::OddOrder(n));
    }
    let h = n / 2;
    let cocycle = |k: usize| -> Vec<f64> {
        (0..h)
            .map(|j| {
                let on = if k == 0 {
                    false
                } else if k <= h {
                    j < k
                } else {
                    j >= k - h
                };
                if on {
                    1.0
                } else {
                    0.0
                }
            })
            .collect()
    };
    let points: Vec<Vec<f64>> = (0..n).map(cocycle).collect();
    let gen = from_jump_ops(diagonal_jump_ops(&points, h))?;
    let basis: Vec<AlgElement> = (0..n).map(|g| regular_rep(|x| (g + x) % n, n)).collect();
    let lengths: Vec<f64> = (0..n).map(|k| k.min(n - k) as f64).collect();
    verify_group_eigen(&gen, &basis, &lengths)?;
    Ok(gen.with_label(format!("cyclic(n={n})")).with_reference_basis(basis))
}

/// All permutations of `0..n` in lexicographic order (identity first).
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

/// Hamming length `#{j : σ(j) ≠ j}`.
pub fn hamming_length(sigma: &[usize]) -> usize {
    sigma.iter().enumerate().filter(|&(j, &s)| s != j).count()
}

/// Hamming-length semigroup on the symmetric group `S_n` (n ≤ 4), acting on
/// `B(l2(S_n)) = M_{n!}`.
pub fn symmetric_group_semigroup(n: usize) -> Result<LindbladGenerator> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "symmetric group degree must be at least 2, got {n}"
        )));
    }
    if n > 4 {
        return Err(Error::TooLarge {
            what: "symmetric group degree",
            value: n,
            limit: 4,
        });
    }
    let perms = permutations(n);
    let order = perms.len();
    let index: HashMap<Vec<usize>, usize> = perms.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();

    // b(σ) = A_σ - 1 in L2(M_n(R), tr/2); orthonormal basis sqrt(2) E_pq, so the
    // coordinates are (A_σ - 1)_pq / sqrt(2). A_σ δ_j = δ_σ(j).
    let points: Vec<Vec<f64>> = perms
        .iter()
        .map(|sigma| {
            (0..n * n)
                .map(|k| {
                    let (p, q) = (k / n, k % n);
                    let a = if sigma[q] == p { 1.0 } else { 0.0 };
                    let id = if p == q { 1.0 } else { 0.0 };
                    (a - id) / std::f64::consts::SQRT_2
                })
                .collect()
        })
        .collect();
    let gen = from_jump_ops(diagonal_jump_ops(&points, n * n))?;

    let basis: Vec<AlgElement> = perms
        .iter()
        .map(|sigma| {
            regular_rep(
                |h| {
                    let composed: Vec<usize> = perms[h].iter().map(|&x| sigma[x]).collect();
                    index[&composed]
                },
                order,
            )
        })
        .collect();
    let lengths: Vec<f64> = perms.iter().map(|s| hamming_length(s) as f64).collect();
    verify_group_eigen(&gen, &basis, &lengths)?;
    Ok(gen
        .with_label(format!("symmetric_group(n={n})"))
        .with_reference_basis(basis))
}

/// Depolarizing semigroup `L a = a - tau(a) 1` on `M_d`, in Lindblad form with
/// the `d²` scaled Weyl unitaries `U^p V^q / sqrt(2 d²)`.
pub fn depolarizing(d: usize) -> Result<LindbladGenerator> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!(
            "depolarizing dimension must be at least 2, got {d}"
        )));
    }
    let shift = regular_rep(|x| (x + 1) % d, d);
    let omega = 2.0 * std::f64::consts::PI / d as f64;
    let clock = DMatrix::from_fn(d, d, |i, j| {
        if i == j {
            C64::from_polar(1.0, omega * i as f64)
        } else {
            c64(0.0, 0.0)
        }
    });
    let scale = c64(1.0 / (2.0 * (d * d) as f64).sqrt(), 0.0);
    let mut vs = Vec::with_capacity(d * d);
    let mut up = identity(d);
    for _p in 0..d {
        let mut w = up.clone();
        for _q in 0..d {
            vs.push(&w * scale);
            w = &w * &clock;
        }
        up = &up * &shift;
    }
    let gen = from_jump_ops(vs)?;
    let expected = SuperOp::from_fn(d, |a| a - identity(d) * tau(a));
    let err = (gen.generator().matrix() - expected.matrix()).camax();
    if err > 1e-10 {
        return Err(Error::Verification(format!("Weyl Lindblad form deviates by {err:.3e}")));
    }
    Ok(gen.with_label(format!("depolarizing(d={d})")))
}

fn tensor_basis(a: Option<&[AlgElement]>, b: Option<&[AlgElement]>, n1: usize, n2: usize) -> Option<Vec<AlgElement>> {
    if a.is_none() && b.is_none() {
        return None;
    }
    let full = |n: usize| -> Vec<AlgElement> {
        let s = c64((n as f64).sqrt(), 0.0);
        (0..n * n).map(|k| matrix_unit(n, k / n, k % n) * s).collect()
    };
    let a = a.map(<[_]>::to_vec).unwrap_or_else(|| full(n1));
    let b = b.map(<[_]>::to_vec).unwrap_or_else(|| full(n2));
    Some(a.iter().flat_map(|x| b.iter().map(move |y| kron(x, y))).collect())
}

/// Generator of `P_t ⊗ Q_t` with jump operators `{v_j ⊗ 1} ∪ {1 ⊗ w_k}`.
pub fn tensor(g1: &LindbladGenerator, g2: &LindbladGenerator) -> Result<LindbladGenerator> {
    let (n1, n2) = (g1.dim(), g2.dim());
    if n1 * n2 > MAX_PRODUCT_DIM {
        return Err(Error::TooLarge {
            what: "tensor dimension",
            value: n1 * n2,
            limit: MAX_PRODUCT_DIM,
        });
    }
    let (i1, i2) = (identity(n1), identity(n2));
    let mut vs: Vec<AlgElement> = g1.jump_ops().iter().map(|v| kron(v, &i2)).collect();
    vs.extend(g2.jump_ops().iter().map(|w| kron(&i1, w)));
    if vs.is_empty() {
        vs.push(DMatrix::zeros(n1 * n2, n1 * n2));
    }
    let mut gen = from_jump_ops(vs)?.with_label(format!("{} ⊗ {}", g1.label(), g2.label()));
    gen.reference_basis = tensor_basis(g1.reference_basis(), g2.reference_basis(), n1, n2);
    Ok(gen)
}

/// Generator of `P_t ⊗ id_{M_m}`, jump operators `v_j ⊗ 1`.
pub fn amplify(g: &LindbladGenerator, m: usize) -> Result<LindbladGenerator> {
    if m == 0 {
        return Err(Error::InvalidParameter("amplification size must be positive".into()));
    }
    let n = g.dim();
    if n * m > MAX_PRODUCT_DIM {
        return Err(Error::TooLarge {
            what: "amplified dimension",
            value: n * m,
            limit: MAX_PRODUCT_DIM,
        });
    }
    if m == 1 {
        return Ok(g.clone());
    }
    let im = identity(m);
    let mut vs: Vec<AlgElement> = g.jump_ops().iter().map(|v| kron(v, &im)).collect();
    if vs.is_empty() {
        vs.push(DMatrix::zeros(n * m, n * m));
    }
    let mut gen = from_jump_ops(vs)?.with_label(format!("{} ⊗ id_{m}", g.label()));
    gen.reference_basis = g.reference_basis().and_then(|b| tensor_basis(Some(b), None, n, m));
    Ok(gen)
}

#[derive(Clone, Debug, Serialize)]
pub struct MarkovCheck {
    pub t: f64,
    pub unital_err: f64,
    pub trace_err: f64,
    pub self_adjoint_err: f64,
    pub choi_min_eig: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MarkovReport {
    pub label: String,
    pub checks: Vec<MarkovCheck>,
    pub passed: bool,
}

/// Choi matrix `Σ_ij e_ij ⊗ T(e_ij)`.
pub fn choi_matrix(t: &SuperOp) -> DMatrix<C64> {
    let n = t.dim();
    let mut c = DMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            let img = t.apply(&matrix_unit(n, i, j));
            for k in 0..n {
                for l in 0..n {
                    c[(i * n + k, j * n + l)] = img[(k, l)];
                }
            }
        }
    }
    c
}

/// Checks unitality, trace preservation, tau-symmetry and complete positivity
/// of `P_t` on each grid time.
pub fn markov_validate(gen: &LindbladGenerator, t_grid: &[f64]) -> MarkovReport {
    const TOL: f64 = 1e-9;
    let n = gen.dim();
    let one = identity(n);
    let checks: Vec<MarkovCheck> = t_grid
        .iter()
        .map(|&t| {
            let p = gen.evolve(t);
            let unital_err = (p.apply(&one) - &one).camax();
            let trace_err = (0..n * n)
                .map(|k| {
                    let e = matrix_unit(n, k / n, k % n);
                    (tau(&p.apply(&e)) - tau(&e)).norm()
                })
                .fold(0.0, f64::max);
            let self_adjoint_err = (p.matrix() - p.matrix().adjoint()).camax();
            let choi = choi_matrix(&p);
            let (choi_min_eig, choi_ok) = psd_min_eig(&choi, TOL).unwrap_or((f64::NEG_INFINITY, false));
            let passed = unital_err <= TOL && trace_err <= TOL && self_adjoint_err <= TOL && choi_ok;
            MarkovCheck {
                t,
                unital_err,
                trace_err,
                self_adjoint_err,
                choi_min_eig,
                passed,
            }
        })
        .collect();
    let passed = checks.iter().all(|c| c.passed);
    MarkovReport {
        label: gen.label().to_string(),
        checks,
        passed,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Intertwining {
    /// `Some(K)` when `∂_j L = L ∂_j + K ∂_j` holds to relative residual 1e-9.
    pub k: Option<f64>,
    /// Least-squares fit of `K`.
    pub fitted_k: f64,
    pub relative_residual: f64,
    pub note: Option<String>,
}

/// Least-squares fit of the intertwining constant
/// `min_K Σ_j |∂_j L - L ∂_j - K ∂_j|_F²`.
pub fn intertwining_k(gen: &LindbladGenerator) -> Intertwining {
    let l = gen.generator().matrix();
    let mut num = 0.0;
    let mut den = 0.0;
    let comms: Vec<DMatrix<C64>> = gen
        .derivations()
        .iter()
        .map(|d| {
            let dm = d.matrix();
            let c = dm * l - l * dm;
            num += dm.iter().zip(c.iter()).map(|(a, b)| (a.conj() * b).re).sum::<f64>();
            den += dm.norm_squared();
            c
        })
        .collect();
    if den == 0.0 {
        return Intertwining {
            k: Some(0.0),
            fitted_k: 0.0,
            relative_residual: 0.0,
            note: Some("all partial derivatives vanish; K = 0 by convention".into()),
        };
    }
    let k = num / den;
    let res2: f64 = gen
        .derivations()
        .iter()
        .zip(&comms)
        .map(|(d, c)| (c - d.matrix() * c64(k, 0.0)).norm_squared())
        .sum();
    let relative_residual = res2.sqrt() / (den.sqrt() * gen.norm().max(1.0));
    Intertwining {
        k: (relative_residual <= 1e-9).then_some(k),
        fitted_k: k,
        relative_residual,
        note: None,
    }
}

/// Validates that `rho` is a density matrix (`tau(rho) = 1`, positive).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(AlgElement);

/// Eigenvalue floor for calling a state strictly positive.
pub const STRICT_POSITIVITY_FLOOR: f64 = 1e-10;

impl DensityMatrix {
    pub fn new(rho: AlgElement) -> Result<Self> {
        let eig = herm_eig(&rho)?;
        if eig.min() < -1e-12 {
            return Err(Error::InvalidParameter(format!(
                "state has negative eigenvalue {:.3e}",
                eig.min()
            )));
        }
        let t = tau(&rho);
        if (t - c64(1.0, 0.0)).norm() > 1e-12 * rho.nrows() as f64 {
            return Err(Error::InvalidParameter(format!("tau(rho) = {t} differs from 1")));
        }
        Ok(Self(rho))
    }

    /// The trace state `1`.
    pub fn trace_state(n: usize) -> Self {
        Self(identity(n))
    }

    pub fn min_eig(&self) -> f64 {
        herm_eig_unchecked(&self.0).min()
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.min_eig() >= STRICT_POSITIVITY_FLOOR
    }

    pub fn as_matrix(&self) -> &AlgElement {
        &self.0
    }

    pub fn into_matrix(self) -> AlgElement {
        self.0
    }

    pub fn distance_to_trace_state(&self) -> f64 {
        tau_norm(&(&self.0 - identity(self.0.nrows())))
    }
}

impl std::ops::Deref for DensityMatrix {
    type Target = AlgElement;
    fn deref(&self) -> &AlgElement {
        &self.0
    }
}
