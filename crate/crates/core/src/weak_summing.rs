//! Operator norms `ℓ^u_n → ℓ^s_m`, weak p-summing norms `μ_{p,n}` and
//! numerical (q,p)-summing constants.
//!
//! `μ_{p,n}(x)` is evaluated as the norm of the matrix with columns `x_i`
//! from `ℓ^{p′}_n` into the ambient space, which exposes closed forms.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::optkernel::{
    maximize_on_sphere, maximize_on_torus, random_vector, restart_rng, sphere_ascent, torus_ascent,
    Certification, NormEstimate, OptimizerConfig, SphereObjective, TorusObjective, Witness,
};
use crate::spaces::{
    argmax_abs, dual_vector, inner, lorentz_value, norm_gradient, p_norm, rearrangement_order, Exponent, ScalarField,
    VectorTuple, C64,
};

/// Norm used on the target of an operator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum TargetNorm {
    Lp(Exponent),
    /// Lorentz `ℓ^{p,q}` with finite indices.
    Lorentz { p: f64, q: f64 },
}

impl TargetNorm {
    pub fn value(&self, w: &[C64]) -> f64 {
        match *self {
            TargetNorm::Lp(s) => p_norm(w, s),
            TargetNorm::Lorentz { p, q } => lorentz_value(w, p, q),
        }
    }

    /// `‖w + h‖ ≈ ‖w‖ + Re⟨h, grad⟩` away from ties in the rearrangement.
    pub fn gradient(&self, w: &[C64]) -> Vec<C64> {
        match *self {
            TargetNorm::Lp(s) => norm_gradient(w, s),
            TargetNorm::Lorentz { p, q } => {
                let total = lorentz_value(w, p, q);
                let mut g = vec![C64::new(0.0, 0.0); w.len()];
                if total == 0.0 {
                    return g;
                }
                for (rank, &j) in rearrangement_order(w).iter().enumerate() {
                    let a = w[j].norm();
                    if a > 0.0 {
                        let weight = ((rank + 1) as f64).powf(q / p - 1.0);
                        g[j] = w[j] / a * (total.powf(1.0 - q) * weight * a.powf(q - 1.0));
                    }
                }
                g
            }
        }
    }
}

/// An `m × n` matrix viewed as a map `ℓ^u_n → ℓ^s_m`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OperatorMatrix {
    /// Row-major entries, `m` rows of length `n`.
    pub entries: Vec<Vec<C64>>,
    pub from_exp: Exponent,
    pub to_exp: Exponent,
    pub field: ScalarField,
}

impl OperatorMatrix {
    pub fn new(entries: Vec<Vec<C64>>, from_exp: Exponent, to_exp: Exponent, field: ScalarField) -> Result<Self> {
        let n = entries.first().map_or(0, Vec::len);
        if entries.is_empty() || n == 0 {
            return Err(Error::InvalidArgument("operator matrix must be non-empty".into()));
        }
        if entries.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("ragged operator matrix".into()));
        }
        if field == ScalarField::Real && entries.iter().flatten().any(|z| z.im != 0.0) {
            return Err(Error::InvalidArgument("real operator with complex entries".into()));
        }
        Ok(OperatorMatrix { entries, from_exp, to_exp, field })
    }

    pub fn identity(n: usize, from_exp: Exponent, to_exp: Exponent, field: ScalarField) -> Result<Self> {
        let entries = (0..n)
            .map(|i| (0..n).map(|j| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
            .collect();
        OperatorMatrix::new(entries, from_exp, to_exp, field)
    }

    /// The map `v ↦ Σ v_i x_i` from `ℓ^{p′}_n` into the tuple's space.
    pub fn from_tuple(x: &VectorTuple, p: Exponent) -> Self {
        OperatorMatrix {
            entries: columns_to_rows(x.vectors(), x.m()),
            from_exp: p.conjugate(),
            to_exp: x.space.r,
            field: x.space.field,
        }
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.entries[0].len()
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.entries.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// `A^* w`.
    pub fn adjoint_apply(&self, w: &[C64]) -> Vec<C64> {
        (0..self.cols()).map(|j| self.entries.iter().zip(w).map(|(row, wi)| row[j].conj() * wi).sum()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        self.entries.iter().map(|r| r[j]).collect()
    }

    pub fn frobenius(&self) -> f64 {
        self.entries.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Column weights of a monomial matrix (at most one entry per row and
    /// column above `1e-14·‖A‖_F`); `A = PD` and `‖Av‖ = ‖Dv‖`.
    pub fn monomial(&self) -> Option<Vec<C64>> {
        let tol = 1e-14 * self.frobenius();
        let mut alpha = vec![C64::new(0.0, 0.0); self.cols()];
        let mut col_used = vec![false; self.cols()];
        for row in &self.entries {
            let mut seen = false;
            for (j, z) in row.iter().enumerate() {
                if z.norm() > tol {
                    if seen || col_used[j] {
                        return None;
                    }
                    seen = true;
                    col_used[j] = true;
                    alpha[j] = *z;
                }
            }
        }
        Some(alpha)
    }

    /// `‖Av‖_s`.
    pub fn objective(&self, v: &[C64]) -> f64 {
        p_norm(&self.apply(v), self.to_exp)
    }
}

/// Row-major `d × k` matrix whose column `i` is `z_i`.
fn columns_to_rows(z: &[Vec<C64>], d: usize) -> Vec<Vec<C64>> {
    (0..d).map(|j| z.iter().map(|x| x[j]).collect()).collect()
}

fn unit(n: usize, j: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); n];
    v[j] = C64::new(1.0, 0.0);
    v
}

struct SphereOp<'a>(&'a OperatorMatrix);

impl SphereObjective for SphereOp<'_> {
    fn value(&self, v: &[C64]) -> f64 {
        self.0.objective(v)
    }
    fn gradient(&self, v: &[C64]) -> Vec<C64> {
        self.0.adjoint_apply(&norm_gradient(&self.0.apply(v), self.0.to_exp))
    }
}

/// `ξ ↦ ‖Σ_j ξ_j a_j‖` over the columns `a_j` of an operator.
pub struct ColumnCombination<'a> {
    pub op: &'a OperatorMatrix,
}

impl TorusObjective for ColumnCombination<'_> {
    fn value(&self, xi: &[C64]) -> f64 {
        self.op.objective(xi)
    }
    fn angle_gradient(&self, xi: &[C64]) -> Vec<f64> {
        let g = norm_gradient(&self.op.apply(xi), self.op.to_exp);
        let back = self.op.adjoint_apply(&g);
        xi.iter().zip(&back).map(|(z, b)| -(z * b.conj()).im).collect()
    }
}

/// Closed-form routes; `None` when no route applies.
fn closed_form(a: &OperatorMatrix, cfg: &OptimizerConfig) -> Result<Option<NormEstimate>> {
    let (u, s) = (a.from_exp, a.to_exp);
    let n = a.cols();
    if a.frobenius() == 0.0 {
        return Ok(Some(NormEstimate::exact(0.0, Witness::Vector(unit(n, 0)))));
    }
    if let Some(alpha) = a.monomial() {
        let mags: Vec<C64> = alpha.iter().map(|z| C64::new(z.norm(), 0.0)).collect();
        if u > s {
            let t = Exponent::from_recip(s.recip() - u.recip())?;
            let value = p_norm(&mags, t);
            let mut v: Vec<C64> = (0..n)
                .map(|j| {
                    let m = mags.get(j).map_or(0.0, |z| z.re);
                    let w = if u.is_infinite() { if m > 0.0 { 1.0 } else { 0.0 } } else { m.powf(t.value() / u.value()) };
                    C64::new(w, 0.0)
                })
                .collect();
            let norm = p_norm(&v, u);
            v.iter_mut().for_each(|z| *z /= norm);
            return Ok(Some(NormEstimate::exact(value, Witness::Vector(v))));
        }
        let j = argmax_abs(&alpha);
        return Ok(Some(NormEstimate::exact(alpha[j].norm(), Witness::Vector(unit(n, j)))));
    }
    if u == Exponent::TWO && s == Exponent::TWO {
        let (sigma, v) = top_singular(a);
        return Ok(Some(NormEstimate::exact(sigma, Witness::Vector(v))));
    }
    if u == Exponent::ONE {
        let norms: Vec<f64> = (0..n).map(|j| p_norm(&a.column(j), s)).collect();
        let j = (0..n).fold(0, |b, j| if norms[j] > norms[b] { j } else { b });
        return Ok(Some(NormEstimate::exact(norms[j], Witness::Vector(unit(n, j)))));
    }
    if s.is_infinite() {
        let up = u.conjugate();
        let norms: Vec<f64> = a.entries.iter().map(|row| p_norm(row, up)).collect();
        let i = (0..norms.len()).fold(0, |b, i| if norms[i] > norms[b] { i } else { b });
        let target: Vec<C64> = a.entries[i].iter().map(|z| z.conj()).collect();
        return Ok(Some(NormEstimate::exact(norms[i], Witness::Vector(dual_vector(&target, u)))));
    }
    if u.is_infinite() && a.field == ScalarField::Real && n <= 20 && (1u64 << (n - 1)) <= cfg.brute_budget {
        let res = maximize_on_torus(&ColumnCombination { op: a }, n, ScalarField::Real, cfg)?;
        let Witness::Phases(xi) = res.estimate.witness.clone() else { unreachable!() };
        return Ok(Some(NormEstimate { witness: Witness::Vector(xi), ..res.estimate }));
    }
    Ok(None)
}

/// Largest singular value and a right singular vector.
fn top_singular(a: &OperatorMatrix) -> (f64, Vec<C64>) {
    let (m, n) = (a.rows(), a.cols());
    match a.field {
        ScalarField::Real => {
            let mat = DMatrix::<f64>::from_fn(m, n, |i, j| a.entries[i][j].re);
            let svd = mat.svd(false, true);
            let k = argmax_f(svd.singular_values.as_slice());
            let vt = svd.v_t.expect("requested V^T");
            (svd.singular_values[k], (0..n).map(|j| C64::new(vt[(k, j)], 0.0)).collect())
        }
        ScalarField::Complex => {
            let mat = DMatrix::<C64>::from_fn(m, n, |i, j| a.entries[i][j]);
            let svd = mat.svd(false, true);
            let k = argmax_f(svd.singular_values.as_slice());
            let vt = svd.v_t.expect("requested V^*");
            (svd.singular_values[k], (0..n).map(|j| vt[(k, j)].conj()).collect())
        }
    }
}

fn argmax_f(v: &[f64]) -> usize {
    (0..v.len()).fold(0, |b, i| if v[i] > v[b] { i } else { b })
}

/// `sup{‖Av‖_s : ‖v‖_u ≤ 1}`.
///
/// Closed forms, tried in order: monomial `A` (`‖α‖_t` for `u > s`, else
/// `‖α‖_∞`); `u = s = 2` (top singular value); `u = 1` (largest column);
/// `s = ∞` (largest row in `ℓ^{u′}`); `u = ∞` over ℝ with `n ≤ 20` (sign
/// enumeration). Otherwise `u = ∞` uses the torus kernel and the remaining
/// cases the sphere kernel.
pub fn op_norm(a: &OperatorMatrix, cfg: &OptimizerConfig) -> Result<NormEstimate> {
    if let Some(est) = closed_form(a, cfg)? {
        return Ok(est);
    }
    let n = a.cols();
    if a.from_exp.is_infinite() {
        let res = maximize_on_torus(&ColumnCombination { op: a }, n, a.field, cfg)?;
        let Witness::Phases(xi) = res.estimate.witness.clone() else { unreachable!() };
        return Ok(NormEstimate { witness: Witness::Vector(xi), ..res.estimate });
    }
    maximize_on_sphere(&SphereOp(a), a.from_exp, n, a.field, cfg)
}

/// `μ_{p,n}(x)`.
pub fn mu(x: &VectorTuple, p: Exponent, cfg: &OptimizerConfig) -> Result<NormEstimate> {
    if p.is_infinite() {
        return Err(Error::InvalidArgument("p must be finite".into()));
    }
    op_norm(&OperatorMatrix::from_tuple(x, p), cfg)
}

/// `μ_{p,n}` of an orthogonal tuple in a Hilbert space with the given norms.
pub fn mu_orthogonal_closed_form(norms: &[f64], p: Exponent) -> Result<f64> {
    if p.is_infinite() {
        return Err(Error::InvalidExponent(f64::INFINITY));
    }
    let v: Vec<C64> = norms.iter().map(|&x| C64::new(x, 0.0)).collect();
    let p = p.value();
    Ok(if p >= 2.0 {
        p_norm(&v, Exponent::INFINITY)
    } else if p == 1.0 {
        p_norm(&v, Exponent::TWO)
    } else {
        p_norm(&v, Exponent::from_recip(1.0 / p - 0.5)?)
    })
}

/// Value and maximizer of an operator norm, reusing a previous maximizer.
/// Closed-form routes are exact; otherwise local ascent from `warm` plus
/// `extra` random starts drawn from `stream`.
pub(crate) fn op_norm_warm(
    a: &OperatorMatrix,
    warm: Option<&[C64]>,
    extra: usize,
    stream: u64,
    cfg: &OptimizerConfig,
) -> Result<(f64, Vec<C64>)> {
    if let Some(est) = closed_form(a, cfg)? {
        let Witness::Vector(v) = est.witness else { unreachable!() };
        return Ok((est.value, v));
    }
    let n = a.cols();
    let mut starts: Vec<Vec<C64>> = warm.map(|w| vec![w.to_vec()]).unwrap_or_default();
    let mut rng = restart_rng(cfg.seed ^ 0x5eed, stream);
    for _ in 0..extra.max(if starts.is_empty() { 1 } else { 0 }) {
        starts.push(random_vector(&mut rng, n, a.field));
    }
    let mut best: Option<(f64, Vec<C64>)> = None;
    for s in starts {
        let cand = if a.from_exp.is_infinite() {
            if a.field == ScalarField::Real {
                let signs: Vec<C64> = s.iter().map(|z| C64::new(if z.re < 0.0 { -1.0 } else { 1.0 }, 0.0)).collect();
                sign_flip_ascent(a, signs)
            } else {
                let last = s[n - 1];
                let theta: Vec<f64> = s[..n - 1].iter().map(|z| (z / last).arg()).collect();
                let (f, t) = torus_ascent(&ColumnCombination { op: a }, &theta, cfg)?;
                (f, crate::optkernel::phases_from_angles(&t))
            }
        } else {
            sphere_ascent(&SphereOp(a), &s, a.from_exp, cfg)?
        };
        if best.as_ref().is_none_or(|b| cand.0 > b.0) {
            best = Some(cand);
        }
    }
    Ok(best.expect("at least one start"))
}

fn sign_flip_ascent(a: &OperatorMatrix, mut xi: Vec<C64>) -> (f64, Vec<C64>) {
    let mut f = a.objective(&xi);
    loop {
        let mut improved = false;
        for j in 0..xi.len() {
            xi[j] = -xi[j];
            let g = a.objective(&xi);
            if g > f {
                f = g;
                improved = true;
            } else {
                xi[j] = -xi[j];
            }
        }
        if !improved {
            return (f, xi);
        }
    }
}

// ---------------------------------------------------------------------------
// Ratio ascent over tuples
// ---------------------------------------------------------------------------

/// Numerator callback: value and gradient with respect to each vector.
pub(crate) type Numerator<'a> = dyn Fn(&[Vec<C64>]) -> (f64, Vec<Vec<C64>>) + Sync + 'a;

/// Maximization of `N(z)/μ_{p,k}(z)` over k-tuples `z` in `ℓ^w_d`.
pub(crate) struct RatioProblem<'a> {
    pub k: usize,
    pub d: usize,
    pub field: ScalarField,
    pub space_exp: Exponent,
    pub p: Exponent,
    pub numerator: &'a Numerator<'a>,
    pub seeds: Vec<Vec<Vec<C64>>>,
}

pub(crate) struct RatioOutcome {
    pub value: f64,
    pub tuple: Vec<Vec<C64>>,
    pub mu: NormEstimate,
}

impl RatioProblem<'_> {
    fn operator(&self, z: &[Vec<C64>]) -> OperatorMatrix {
        OperatorMatrix {
            entries: columns_to_rows(z, self.d),
            from_exp: self.p.conjugate(),
            to_exp: self.space_exp,
            field: self.field,
        }
    }
}

fn frob(z: &[Vec<C64>]) -> f64 {
    z.iter().flatten().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn scale_tuple(z: &[Vec<C64>], s: f64) -> Vec<Vec<C64>> {
    z.iter().map(|v| v.iter().map(|c| c * s).collect()).collect()
}

/// Rounds of the outer ascent in [`ratio_ascent`].
const RATIO_ROUNDS: usize = 200;

fn ratio_local(prob: &RatioProblem, start: &[Vec<C64>], stream: u64, cfg: &OptimizerConfig) -> Result<(f64, Vec<Vec<C64>>)> {
    let inner_cfg = cfg.light();
    let f0 = frob(start);
    if f0 == 0.0 {
        return Err(Error::Numerical("zero starting tuple".into()));
    }
    let mut z = scale_tuple(start, 1.0 / f0);
    let eval = |z: &[Vec<C64>], warm: Option<&[C64]>, extra: usize, tag: u64| -> Result<(f64, f64, Vec<C64>)> {
        let (m, v) = op_norm_warm(&prob.operator(z), warm, extra, tag, &inner_cfg)?;
        let (nv, _) = (prob.numerator)(z);
        Ok((if m > 0.0 { nv / m } else { 0.0 }, m, v))
    };
    let (mut r, mut m, mut v) = eval(&z, None, inner_cfg.restarts, stream << 16)?;
    for round in 0..RATIO_ROUNDS.min(cfg.max_iter) {
        if m == 0.0 {
            break;
        }
        let (nv, ng) = (prob.numerator)(&z);
        let y: Vec<C64> = (0..prob.d).map(|j| z.iter().zip(&v).map(|(zi, vi)| zi[j] * vi).sum()).collect();
        let gy = norm_gradient(&y, prob.space_exp);
        let grad: Vec<Vec<C64>> = ng
            .iter()
            .zip(&v)
            .map(|(gi, vi)| gi.iter().zip(&gy).map(|(a, b)| (a * m - b * vi.conj() * nv) / (m * m)).collect())
            .collect();
        let gn = frob(&grad);
        if gn == 0.0 || !gn.is_finite() {
            break;
        }
        let mut eta = 1.0;
        let mut accepted = None;
        while eta > 1e-12 {
            let trial: Vec<Vec<C64>> =
                z.iter().zip(&grad).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y * (eta / gn)).collect()).collect();
            let tn = frob(&trial);
            if tn > 0.0 {
                let trial = scale_tuple(&trial, 1.0 / tn);
                let (rt, mt, vt) = eval(&trial, Some(&v), 0, 0)?;
                if rt > r {
                    accepted = Some((trial, rt, mt, vt));
                    break;
                }
            }
            eta *= 0.5;
        }
        let Some((t, rt, _, vt)) = accepted else { break };
        // Re-check the inner maximum with fresh starts before committing.
        let (rc, mc, vc) = eval(&t, Some(&vt), inner_cfg.restarts.min(2), (stream << 16) + round as u64 + 1)?;
        let gain = (rc - r) / r.abs().max(f64::MIN_POSITIVE);
        let _ = rt;
        z = t;
        r = rc;
        m = mc;
        v = vc;
        if gain.abs() < cfg.value_tol {
            break;
        }
    }
    Ok((r, z))
}

/// Multi-start ratio ascent followed by a full evaluation of `μ` on the
/// best candidates. The result is a certified lower bound exactly when that
/// final `μ` is Exact.
pub(crate) fn ratio_ascent(prob: &RatioProblem, cfg: &OptimizerConfig) -> Result<RatioOutcome> {
    let total = prob.seeds.len() + cfg.restarts.max(1);
    let runs: Vec<Result<(f64, Vec<Vec<C64>>)>> = (0..total)
        .into_par_iter()
        .map(|i| {
            let start = if i < prob.seeds.len() {
                prob.seeds[i].clone()
            } else {
                let mut rng = restart_rng(cfg.seed, (i - prob.seeds.len()) as u64);
                (0..prob.k).map(|_| random_vector(&mut rng, prob.d, prob.field)).collect()
            };
            ratio_local(prob, &start, i as u64, cfg)
        })
        .collect();
    let mut cands: Vec<(f64, usize, Vec<Vec<C64>>)> = Vec::new();
    let mut warnings = Vec::new();
    for (i, r) in runs.into_iter().enumerate() {
        match r {
            Ok((f, z)) if f.is_finite() => cands.push((f, i, z)),
            Ok(_) => warnings.push(format!("restart {i} produced a non-finite ratio")),
            Err(e) => warnings.push(format!("restart {i} aborted: {e}")),
        }
    }
    if cands.is_empty() {
        return Err(Error::Numerical(format!("every ratio restart failed: {}", warnings.join("; "))));
    }
    cands.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal).then(a.1.cmp(&b.1)));
    cands.truncate(3);
    // Seeds are often exact extremals; score them as given.
    for (i, z) in prob.seeds.iter().enumerate() {
        if frob(z) > 0.0 {
            cands.push((0.0, usize::MAX - i, z.clone()));
        }
    }
    let finals: Vec<Result<(f64, f64, NormEstimate, Vec<Vec<C64>>)>> = cands
        .into_par_iter()
        .map(|(_, _, z)| {
            let mu_est = op_norm(&prob.operator(&z), cfg)?;
            let (nv, _) = (prob.numerator)(&z);
            let ratio = if mu_est.value > 0.0 { nv / mu_est.value } else { 0.0 };
            Ok((ratio, nv, mu_est, z))
        })
        .collect();
    let mut best: Option<(f64, f64, NormEstimate, Vec<Vec<C64>>)> = None;
    for f in finals {
        let f = f?;
        if best.as_ref().is_none_or(|b| f.0 > b.0) {
            best = Some(f);
        }
    }
    let (value, _, mut mu_est, z) = best.expect("non-empty");
    mu_est.warnings.extend(warnings);
    Ok(RatioOutcome { value, tuple: z, mu: mu_est })
}

/// Certification of a ratio value from the certification of its `μ`.
pub(crate) fn ratio_certification(mu: &NormEstimate) -> Certification {
    if mu.certification == Certification::Exact {
        Certification::CertifiedLowerBound
    } else {
        Certification::Heuristic
    }
}

/// Lower-bound estimate of `π^{(k)}_{q,p}(T)` for `T : ℓ^u_n → ℓ^s_m`.
pub fn summing_constant_estimate(
    a: &OperatorMatrix,
    q: Exponent,
    p: Exponent,
    k: usize,
    cfg: &OptimizerConfig,
) -> Result<NormEstimate> {
    summing_constant_with_target(a, TargetNorm::Lp(a.to_exp), q, p, k, cfg)
}

/// As [`summing_constant_estimate`] with an arbitrary target norm.
pub fn summing_constant_with_target(
    a: &OperatorMatrix,
    target: TargetNorm,
    q: Exponent,
    p: Exponent,
    k: usize,
    cfg: &OptimizerConfig,
) -> Result<NormEstimate> {
    if !(p <= q) || q.is_infinite() {
        return Err(Error::InvalidArgument("need 1 ≤ p ≤ q < ∞".into()));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let n = a.cols();
    if a.frobenius() == 0.0 {
        let z: Vec<Vec<C64>> = (0..k).map(|i| unit(n, i % n)).collect();
        return Ok(NormEstimate::exact(0.0, Witness::Tuple(z)));
    }
    let qv = q.value();
    let numerator = move |z: &[Vec<C64>]| -> (f64, Vec<Vec<C64>>) {
        let images: Vec<Vec<C64>> = z.iter().map(|x| a.apply(x)).collect();
        let norms: Vec<f64> = images.iter().map(|w| target.value(w)).collect();
        let total = norms.iter().map(|x| x.powf(qv)).sum::<f64>().powf(1.0 / qv);
        let grads = images
            .iter()
            .zip(&norms)
            .map(|(w, &nw)| {
                if total == 0.0 || nw == 0.0 {
                    return vec![C64::new(0.0, 0.0); n];
                }
                let c = total.powf(1.0 - qv) * nw.powf(qv - 1.0);
                a.adjoint_apply(&target.gradient(w)).into_iter().map(|g| g * c).collect()
            })
            .collect();
        (total, grads)
    };
    let mut seeds = vec![(0..k).map(|i| unit(n, i % n)).collect::<Vec<_>>()];
    if k <= n {
        seeds.push((0..k).map(|i| unit(n, i)).collect());
    }
    let prob = RatioProblem { k, d: n, field: a.field, space_exp: a.from_exp, p, numerator: &numerator, seeds };
    let out = ratio_ascent(&prob, cfg)?;
    let level = ratio_certification(&out.mu);
    let z = scale_tuple(&out.tuple, 1.0 / out.mu.value);
    let mut est = NormEstimate::lower_bound(out.value, Witness::Tuple(z)).downgrade(level);
    est.warnings = out.mu.warnings;
    Ok(est)
}

/// Inner products `⟨x_i, x_j⟩` as a matrix.
pub fn gram(vectors: &[Vec<C64>]) -> Vec<Vec<C64>> {
    vectors.iter().map(|a| vectors.iter().map(|b| inner(a, b)).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::SequenceSpace;

    fn e(x: f64) -> Exponent {
        Exponent::new(x).unwrap()
    }

    fn real(rows: &[&[f64]]) -> Vec<Vec<C64>> {
        rows.iter().map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect()).collect()
    }

    #[test]
    fn identity_and_diagonal_routes() {
        let cfg = OptimizerConfig::default();
        let id = OperatorMatrix::identity(3, e(2.0), e(2.0), ScalarField::Complex).unwrap();
        let est = op_norm(&id, &cfg).unwrap();
        assert_eq!(est.value, 1.0);
        assert_eq!(est.certification, Certification::Exact);
        let d = OperatorMatrix::identity(2, e(4.0), e(2.0), ScalarField::Complex).unwrap();
        let est = op_norm(&d, &cfg).unwrap();
        assert!((est.value - 2f64.powf(0.25)).abs() < 1e-15);
        let Witness::Vector(v) = &est.witness else { panic!() };
        assert!((d.objective(v) - est.value).abs() < 1e-12);
    }

    #[test]
    fn column_and_row_routes() {
        let cfg = OptimizerConfig::default();
        let a = OperatorMatrix::new(real(&[&[1.0, -2.0], &[3.0, 0.5]]), e(1.0), e(3.0), ScalarField::Real).unwrap();
        let est = op_norm(&a, &cfg).unwrap();
        assert!((est.value - (1.0f64 + 27.0).powf(1.0 / 3.0)).abs() < 1e-12);
        let b = OperatorMatrix::new(real(&[&[1.0, -2.0], &[3.0, 0.5]]), e(3.0), Exponent::INFINITY, ScalarField::Real).unwrap();
        let est = op_norm(&b, &cfg).unwrap();
        let want = (3f64.powf(1.5) + 0.5f64.powf(1.5)).powf(2.0 / 3.0);
        assert!((est.value - want).abs() < 1e-12);
        let Witness::Vector(v) = &est.witness else { panic!() };
        assert!((b.objective(v) - want).abs() < 1e-12);
    }

    #[test]
    fn mu_examples() {
        let cfg = OptimizerConfig::default();
        let s = SequenceSpace::new(2, e(2.0), ScalarField::Complex).unwrap();
        let x = VectorTuple::from_real(s, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!((mu(&x, e(1.0), &cfg).unwrap().value - 2f64.sqrt()).abs() < 1e-10);
        assert!((mu(&x, e(2.0), &cfg).unwrap().value - 1.0).abs() < 1e-12);
        let single = VectorTuple::from_real(s, &[vec![3.0, 4.0]]).unwrap();
        assert!((mu(&single, e(1.5), &cfg).unwrap().value - 5.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_closed_form_examples() {
        assert!((mu_orthogonal_closed_form(&[1.0, 1.0, 1.0], e(1.0)).unwrap() - 3f64.sqrt()).abs() < 1e-15);
        assert!((mu_orthogonal_closed_form(&[1.0; 4], e(4.0 / 3.0)).unwrap() - 4f64.powf(0.25)).abs() < 1e-12);
        assert_eq!(mu_orthogonal_closed_form(&[5.0, 1.0], e(3.0)).unwrap(), 5.0);
        assert!(mu_orthogonal_closed_form(&[1.0], Exponent::INFINITY).is_err());
    }

    #[test]
    fn summing_constant_identity_and_zero() {
        let cfg = OptimizerConfig { restarts: 8, ..Default::default() };
        let id = OperatorMatrix::identity(3, e(2.0), e(2.0), ScalarField::Complex).unwrap();
        let est = summing_constant_estimate(&id, e(2.0), e(2.0), 3, &cfg).unwrap();
        assert!(est.value <= 3f64.sqrt() * (1.0 + 1e-6));
        assert!(est.value >= 3f64.sqrt() * (1.0 - 1e-3));
        let zero = OperatorMatrix::new(real(&[&[0.0, 0.0]]), e(2.0), e(2.0), ScalarField::Real).unwrap();
        assert_eq!(summing_constant_estimate(&zero, e(2.0), e(1.0), 2, &cfg).unwrap().value, 0.0);
    }

    #[test]
    fn lorentz_gradient_matches_difference_quotient() {
        let t = TargetNorm::Lorentz { p: 2.0, q: 1.0 };
        let w = vec![C64::new(0.3, 0.1), C64::new(-1.0, 0.2), C64::new(0.5, 0.0)];
        let h = vec![C64::new(1e-7, -2e-7), C64::new(3e-7, 0.0), C64::new(0.0, 1e-7)];
        let wh: Vec<C64> = w.iter().zip(&h).map(|(a, b)| a + b).collect();
        let lin = inner(&h, &t.gradient(&w)).re;
        assert!((t.value(&wh) - t.value(&w) - lin).abs() < 1e-12);
    }
}
