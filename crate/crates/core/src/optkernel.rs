//! Shared maximizers over ℓ^u spheres, the torus 𝕋ⁿ, orthonormal frames,
//! and brute-force enumeration of ordered partitions.
//!
//! Restart `i` draws from a ChaCha stream selected by `(seed, i)`, so the
//! parallel and serial schedules produce identical results.

use std::cmp::Ordering;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::{dual_vector, inner, lex_cmp, p_norm, Exponent, ScalarField, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iter: usize,
    pub step_tol: f64,
    pub value_tol: f64,
    pub seed: u64,
    pub grid_density: usize,
    pub brute_budget: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 32,
            max_iter: 2000,
            step_tol: 1e-10,
            value_tol: 1e-9,
            seed: 0,
            grid_density: 64,
            brute_budget: 2_000_000,
        }
    }
}

impl OptimizerConfig {
    /// Same settings with a different seed.
    pub fn with_seed(&self, seed: u64) -> Self {
        OptimizerConfig { seed, ..self.clone() }
    }

    /// A cheaper configuration for nested evaluations.
    pub fn light(&self) -> Self {
        OptimizerConfig {
            restarts: self.restarts.clamp(1, 4),
            max_iter: self.max_iter.min(300),
            ..self.clone()
        }
    }
}

/// The generator for restart `i` under `seed`.
pub fn restart_rng(seed: u64, i: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    rng
}

/// A standard Gaussian vector over the field.
pub fn random_vector<R: Rng>(rng: &mut R, n: usize, field: ScalarField) -> Vec<C64> {
    (0..n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = match field {
                ScalarField::Real => 0.0,
                ScalarField::Complex => rng.sample(StandardNormal),
            };
            C64::new(re, im)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certification {
    Exact,
    CertifiedLowerBound,
    Heuristic,
}

impl Certification {
    /// The weaker of two levels.
    pub fn weakest(self, other: Certification) -> Certification {
        use Certification::*;
        match (self, other) {
            (Heuristic, _) | (_, Heuristic) => Heuristic,
            (CertifiedLowerBound, _) | (_, CertifiedLowerBound) => CertifiedLowerBound,
            _ => Exact,
        }
    }
}

/// The feasible point at which a value was attained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
pub enum Witness {
    None,
    Vector(Vec<C64>),
    Phases(Vec<C64>),
    Frame(Vec<Vec<C64>>),
    Assignment(Vec<usize>),
    Tuple(Vec<Vec<C64>>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormEstimate {
    pub value: f64,
    pub certification: Certification,
    pub witness: Witness,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper_bound: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl NormEstimate {
    pub fn exact(value: f64, witness: Witness) -> Self {
        NormEstimate {
            value,
            certification: Certification::Exact,
            witness,
            upper_bound: Some(value),
            warnings: Vec::new(),
        }
    }

    pub fn lower_bound(value: f64, witness: Witness) -> Self {
        NormEstimate {
            value,
            certification: Certification::CertifiedLowerBound,
            witness,
            upper_bound: None,
            warnings: Vec::new(),
        }
    }

    /// Lowers the certification to `level` if it is weaker.
    pub fn downgrade(mut self, level: Certification) -> Self {
        self.certification = self.certification.weakest(level);
        if self.certification != Certification::Exact && self.upper_bound == Some(self.value) {
            self.upper_bound = None;
        }
        self
    }

    /// Attaches an analytic upper bound when it is consistent with the value.
    pub fn with_upper_bound(mut self, ub: f64) -> Self {
        if self.value <= ub * (1.0 + 1e-9) {
            self.upper_bound = Some(ub);
        } else {
            self.warnings.push(format!("computed value exceeds the analytic bound {ub}"));
            self.certification = self.certification.weakest(Certification::Heuristic);
        }
        self
    }
}

/// `v / ‖v‖_u`, or `None` for the zero vector.
pub fn normalize(v: &[C64], u: Exponent) -> Option<Vec<C64>> {
    let n = p_norm(v, u);
    if n == 0.0 || !n.is_finite() {
        return None;
    }
    Some(v.iter().map(|z| z / n).collect())
}

fn l2(v: &[C64]) -> f64 {
    p_norm(v, Exponent::TWO)
}

/// Picks the best `(value, point)` pair: largest value, then the
/// lexicographically largest point.
fn reduce_best<T, F: Fn(&T) -> &[C64]>(items: Vec<(f64, T)>, key: F) -> Option<(f64, T)> {
    items.into_iter().fold(None, |best, cand| match best {
        None => Some(cand),
        Some(b) => {
            let ord = cand.0.partial_cmp(&b.0).unwrap_or(Ordering::Less);
            let take = ord == Ordering::Greater || (ord == Ordering::Equal && lex_cmp(key(&cand.1), key(&b.1)) == Ordering::Greater);
            Some(if take { cand } else { b })
        }
    })
}

// ---------------------------------------------------------------------------
// Sphere kernel
// ---------------------------------------------------------------------------

/// A degree-1 homogeneous objective with a hand-derived gradient:
/// `f(v + h) ≈ f(v) + Re⟨h, ∇f(v)⟩`.
pub trait SphereObjective: Sync {
    fn value(&self, v: &[C64]) -> f64;
    fn gradient(&self, v: &[C64]) -> Vec<C64>;
}

/// Local ascent from `start` on the ℓ^u unit sphere.
///
/// Each iteration first tries the norming step `v ← dual(∇f)`, which is an
/// ascent step for convex objectives, then falls back to backtracking along
/// the gradient with renormalization.
pub fn sphere_ascent(
    obj: &dyn SphereObjective,
    start: &[C64],
    u: Exponent,
    cfg: &OptimizerConfig,
) -> Result<(f64, Vec<C64>)> {
    let mut v = normalize(start, u).ok_or_else(|| Error::Numerical("zero start vector".into()))?;
    let mut f = obj.value(&v);
    if !f.is_finite() {
        return Err(Error::Numerical("non-finite objective at start".into()));
    }
    for _ in 0..cfg.max_iter {
        let g = obj.gradient(&v);
        let gn = l2(&g);
        if gn == 0.0 || !gn.is_finite() {
            break;
        }
        let mut accepted: Option<(Vec<C64>, f64)> = None;
        let power = dual_vector(&g, u);
        let fp = obj.value(&power);
        if fp > f {
            accepted = Some((power, fp));
        } else {
            let scale = l2(&v) / gn;
            let mut eta = 1.0;
            while eta > 1e-18 {
                let trial: Vec<C64> = v.iter().zip(&g).map(|(a, b)| a + b * (eta * scale)).collect();
                if let Some(c) = normalize(&trial, u) {
                    let fc = obj.value(&c);
                    if fc > f {
                        accepted = Some((c, fc));
                        break;
                    }
                }
                eta *= 0.5;
            }
        }
        let Some((c, fc)) = accepted else { break };
        if !fc.is_finite() {
            return Err(Error::Numerical("non-finite objective during ascent".into()));
        }
        let diff: Vec<C64> = c.iter().zip(&v).map(|(a, b)| a - b).collect();
        let step = l2(&diff) / l2(&v).max(f64::MIN_POSITIVE);
        let gain = (fc - f) / f.abs().max(f64::MIN_POSITIVE);
        v = c;
        f = fc;
        if gain < cfg.value_tol || step < cfg.step_tol {
            break;
        }
    }
    Ok((f, v))
}

/// Multi-start maximization of a homogeneous objective on the ℓ^u_n sphere.
pub fn maximize_on_sphere(
    obj: &dyn SphereObjective,
    u: Exponent,
    n: usize,
    field: ScalarField,
    cfg: &OptimizerConfig,
) -> Result<NormEstimate> {
    maximize_on_sphere_seeded(obj, u, n, field, cfg, &[])
}

/// As [`maximize_on_sphere`], with extra deterministic starting points.
pub fn maximize_on_sphere_seeded(
    obj: &dyn SphereObjective,
    u: Exponent,
    n: usize,
    field: ScalarField,
    cfg: &OptimizerConfig,
    seeds: &[Vec<C64>],
) -> Result<NormEstimate> {
    if n == 0 {
        return Err(Error::InvalidArgument("sphere dimension must be positive".into()));
    }
    let total = seeds.len() + cfg.restarts.max(1);
    let runs: Vec<Result<(f64, Vec<C64>)>> = (0..total)
        .into_par_iter()
        .map(|i| {
            let start = if i < seeds.len() {
                seeds[i].clone()
            } else {
                let mut rng = restart_rng(cfg.seed, (i - seeds.len()) as u64);
                random_vector(&mut rng, n, field)
            };
            sphere_ascent(obj, &start, u, cfg)
        })
        .collect();
    let mut warnings = Vec::new();
    let mut ok = Vec::new();
    for (i, r) in runs.into_iter().enumerate() {
        match r {
            Ok(x) => ok.push(x),
            Err(e) => warnings.push(format!("restart {i} aborted: {e}")),
        }
    }
    let (value, v) = reduce_best(ok, |v| v.as_slice())
        .ok_or_else(|| Error::Numerical(format!("every restart failed: {}", warnings.join("; "))))?;
    let mut est = NormEstimate::lower_bound(value, Witness::Vector(v));
    est.warnings = warnings;
    Ok(est)
}

// ---------------------------------------------------------------------------
// Torus kernel
// ---------------------------------------------------------------------------

/// An objective on 𝕋ⁿ, invariant under a global phase.
pub trait TorusObjective: Sync {
    fn value(&self, xi: &[C64]) -> f64;
    /// Derivatives with respect to the angles `θ_j`, `ξ_j = e^{iθ_j}`.
    fn angle_gradient(&self, xi: &[C64]) -> Vec<f64>;
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TorusResult {
    pub estimate: NormEstimate,
    /// Distinct maximizers, gauged so the last phase is 1.
    pub classes: Vec<Vec<C64>>,
}

/// Phases `(e^{iθ_1}, …, e^{iθ_{n−1}}, 1)`.
pub fn phases_from_angles(theta: &[f64]) -> Vec<C64> {
    theta.iter().map(|&t| C64::from_polar(1.0, t)).chain(std::iter::once(C64::new(1.0, 0.0))).collect()
}

/// Divides by the last phase so that `ξ_n = 1`.
pub fn gauge(xi: &[C64]) -> Vec<C64> {
    let last = *xi.last().expect("non-empty phase tuple");
    let unit = if last.norm() > 0.0 { last / last.norm() } else { C64::new(1.0, 0.0) };
    xi.iter().map(|z| z / unit).collect()
}

fn wrap_angle(t: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut x = t % two_pi;
    if x <= -std::f64::consts::PI {
        x += two_pi;
    } else if x > std::f64::consts::PI {
        x -= two_pi;
    }
    x
}

/// Largest angular distance between two gauged phase tuples.
pub fn phase_distance(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| wrap_angle(x.arg() - y.arg()).abs()).fold(0.0, f64::max)
}

/// Gradient ascent in the free angles, last phase fixed.
pub fn torus_ascent(obj: &dyn TorusObjective, theta0: &[f64], cfg: &OptimizerConfig) -> Result<(f64, Vec<f64>)> {
    let mut theta = theta0.to_vec();
    let mut f = obj.value(&phases_from_angles(&theta));
    if !f.is_finite() {
        return Err(Error::Numerical("non-finite objective at start".into()));
    }
    let free = theta.len();
    for _ in 0..cfg.max_iter {
        let g_full = obj.angle_gradient(&phases_from_angles(&theta));
        let g = &g_full[..free];
        let gn = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if gn <= 1e-15 * f.abs().max(1e-300) {
            break;
        }
        let mut eta = 1.0;
        let mut accepted = None;
        while eta * gn > 1e-18 {
            let trial: Vec<f64> = theta.iter().zip(g).map(|(t, d)| t + eta * d).collect();
            let ft = obj.value(&phases_from_angles(&trial));
            if ft > f {
                accepted = Some((trial, ft));
                break;
            }
            eta *= 0.5;
        }
        let Some((t, ft)) = accepted else { break };
        if !ft.is_finite() {
            return Err(Error::Numerical("non-finite objective during ascent".into()));
        }
        let step = eta * gn;
        theta = t;
        f = ft;
        if step < cfg.step_tol * 1e-3 {
            break;
        }
    }
    Ok((f, theta.iter().map(|&t| wrap_angle(t)).collect()))
}

fn dedupe_classes(mut points: Vec<Vec<C64>>) -> Vec<Vec<C64>> {
    points.sort_by(|a, b| {
        let ka: Vec<f64> = a.iter().map(|z| z.arg()).collect();
        let kb: Vec<f64> = b.iter().map(|z| z.arg()).collect();
        ka.partial_cmp(&kb).unwrap_or(Ordering::Equal)
    });
    let mut out: Vec<Vec<C64>> = Vec::new();
    for p in points {
        if !out.iter().any(|q| phase_distance(q, &p) < 1e-6) {
            out.push(p);
        }
    }
    out
}

/// Maximizes a phase-invariant objective over 𝕋ⁿ.
///
/// Real field with `n ≤ 20`: exhaustive sign enumeration (Exact). Complex
/// field: a grid of `grid_density` points per free angle seeds local ascent
/// (CertifiedLowerBound); when the grid exceeds the budget, random starts
/// are used and the result is Heuristic.
pub fn maximize_on_torus(
    obj: &dyn TorusObjective,
    n: usize,
    field: ScalarField,
    cfg: &OptimizerConfig,
) -> Result<TorusResult> {
    if n == 0 {
        return Err(Error::InvalidArgument("torus dimension must be positive".into()));
    }
    let one = vec![C64::new(1.0, 0.0); n];
    if n == 1 {
        let v = obj.value(&one);
        return Ok(TorusResult { estimate: NormEstimate::exact(v, Witness::Phases(one.clone())), classes: vec![one] });
    }
    match field {
        ScalarField::Real => maximize_signs(obj, n, cfg),
        ScalarField::Complex => maximize_phases(obj, n, cfg, &[]),
    }
}

fn sign_tuple(mask: u64, n: usize) -> Vec<C64> {
    (0..n)
        .map(|j| {
            let neg = j + 1 < n && (mask >> j) & 1 == 1;
            C64::new(if neg { -1.0 } else { 1.0 }, 0.0)
        })
        .collect()
}

fn maximize_signs(obj: &dyn TorusObjective, n: usize, cfg: &OptimizerConfig) -> Result<TorusResult> {
    let count = 1u64 << (n - 1);
    if n <= 20 && count <= cfg.brute_budget {
        let values: Vec<f64> = (0..count).into_par_iter().map(|mask| obj.value(&sign_tuple(mask, n))).collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("non-finite objective during sign enumeration".into()));
        }
        let best = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let tol = 1e-12 * best.abs().max(f64::MIN_POSITIVE);
        let classes: Vec<Vec<C64>> = values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v >= best - tol)
            .map(|(mask, _)| sign_tuple(mask as u64, n))
            .collect();
        let witness = classes[0].clone();
        return Ok(TorusResult { estimate: NormEstimate::exact(best, Witness::Phases(witness)), classes });
    }
    // Single-flip local search from random sign patterns.
    let runs: Vec<(f64, Vec<C64>)> = (0..cfg.restarts.max(1))
        .into_par_iter()
        .map(|i| {
            let mut rng = restart_rng(cfg.seed, i as u64);
            let mut xi: Vec<C64> =
                (0..n).map(|j| C64::new(if j + 1 < n && rng.random::<bool>() { -1.0 } else { 1.0 }, 0.0)).collect();
            let mut f = obj.value(&xi);
            loop {
                let mut improved = false;
                for j in 0..n - 1 {
                    xi[j] = -xi[j];
                    let g = obj.value(&xi);
                    if g > f {
                        f = g;
                        improved = true;
                    } else {
                        xi[j] = -xi[j];
                    }
                }
                if !improved {
                    break;
                }
            }
            (f, xi)
        })
        .collect();
    let (best, xi) = reduce_best(runs, |v| v.as_slice()).expect("at least one restart");
    let mut est = NormEstimate::lower_bound(best, Witness::Phases(xi.clone())).downgrade(Certification::Heuristic);
    est.warnings.push(format!("sign enumeration over 2^{} patterns exceeds the budget; local search used", n - 1));
    Ok(TorusResult { estimate: est, classes: vec![xi] })
}

/// Complex torus maximization with optional extra starting angle vectors.
pub fn maximize_phases(
    obj: &dyn TorusObjective,
    n: usize,
    cfg: &OptimizerConfig,
    extra_starts: &[Vec<f64>],
) -> Result<TorusResult> {
    let free = n - 1;
    let g = cfg.grid_density.max(1);
    let grid_points = (g as u64).checked_pow(free as u32);
    let mut warnings = Vec::new();
    let mut starts: Vec<Vec<f64>> = extra_starts.to_vec();
    let within_budget = matches!(grid_points, Some(c) if c <= cfg.brute_budget);
    let step = 2.0 * std::f64::consts::PI / g as f64;
    if within_budget {
        let count = grid_points.unwrap_or(0);
        let angles = |idx: u64| -> Vec<f64> {
            let mut k = idx;
            (0..free)
                .map(|_| {
                    let a = (k % g as u64) as f64 * step;
                    k /= g as u64;
                    a
                })
                .collect()
        };
        let values: Vec<f64> = (0..count).into_par_iter().map(|idx| obj.value(&phases_from_angles(&angles(idx)))).collect();
        let mut order: Vec<u64> = (0..count).collect();
        order.sort_by(|&a, &b| values[b as usize].partial_cmp(&values[a as usize]).unwrap_or(Ordering::Equal).then(a.cmp(&b)));
        starts.extend(order.iter().take(cfg.restarts.max(1)).map(|&i| angles(i)));
    } else {
        warnings.push(format!("torus grid of {g}^{free} points exceeds the budget; random starts used"));
    }
    for i in 0..cfg.restarts.max(1) {
        let mut rng = restart_rng(cfg.seed, i as u64);
        starts.push((0..free).map(|_| rng.random::<f64>() * 2.0 * std::f64::consts::PI).collect());
    }
    let runs: Vec<Result<(f64, Vec<f64>)>> = starts.par_iter().map(|t| torus_ascent(obj, t, cfg)).collect();
    let mut finished = Vec::new();
    for (i, r) in runs.into_iter().enumerate() {
        match r {
            Ok((f, t)) => finished.push((f, phases_from_angles(&t))),
            Err(e) => warnings.push(format!("start {i} aborted: {e}")),
        }
    }
    if finished.is_empty() {
        return Err(Error::Numerical(format!("every torus start failed: {}", warnings.join("; "))));
    }
    let best = finished.iter().map(|x| x.0).fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-9 * best.abs().max(f64::MIN_POSITIVE);
    let classes = dedupe_classes(finished.iter().filter(|x| x.0 >= best - tol).map(|x| x.1.clone()).collect());
    let (value, xi) = reduce_best(finished, |v| v.as_slice()).expect("non-empty");
    let mut est = NormEstimate::lower_bound(value, Witness::Phases(xi));
    if !within_budget {
        est = est.downgrade(Certification::Heuristic);
    }
    est.warnings = warnings;
    Ok(TorusResult { estimate: est, classes })
}

// ---------------------------------------------------------------------------
// Frame kernel
// ---------------------------------------------------------------------------

/// An objective on k-tuples of orthonormal vectors in 𝕂^d, with gradient
/// `f(E + H) ≈ f(E) + Σ_i Re⟨h_i, g_i⟩`.
pub trait FrameObjective: Sync {
    fn value(&self, frame: &[Vec<C64>]) -> f64;
    fn gradient(&self, frame: &[Vec<C64>]) -> Vec<Vec<C64>>;
}

/// Modified Gram–Schmidt, applied twice; `None` if the vectors are dependent.
pub fn orthonormalize(vectors: &[Vec<C64>]) -> Option<Vec<Vec<C64>>> {
    let mut out: Vec<Vec<C64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for e in &out {
                let c = inner(&w, e);
                for (wj, ej) in w.iter_mut().zip(e) {
                    *wj -= c * ej;
                }
            }
        }
        let n = l2(&w);
        if n < 1e-12 * l2(v).max(1e-300) || n == 0.0 {
            return None;
        }
        out.push(w.iter().map(|z| z / n).collect());
    }
    Some(out)
}

/// The orthonormal frame closest to `g` (polar factor `UV^*` of `g = UΣV^*`).
pub fn polar_frame(g: &[Vec<C64>], field: ScalarField) -> Option<Vec<Vec<C64>>> {
    let k = g.len();
    let d = g.first()?.len();
    let mat = DMatrix::<C64>::from_fn(d, k, |i, j| g[j][i]);
    let svd = mat.svd(true, true);
    let u = svd.u?;
    let vt = svd.v_t?;
    if svd.singular_values.iter().any(|s| *s <= 1e-14 * svd.singular_values[0].max(1e-300)) {
        return None;
    }
    let p = u * vt;
    let frame: Vec<Vec<C64>> = (0..k)
        .map(|j| {
            (0..d)
                .map(|i| match field {
                    ScalarField::Real => C64::new(p[(i, j)].re, 0.0),
                    ScalarField::Complex => p[(i, j)],
                })
                .collect()
        })
        .collect();
    orthonormalize(&frame)
}

/// Local ascent over orthonormal frames from `start`.
pub fn frame_ascent(
    obj: &dyn FrameObjective,
    start: &[Vec<C64>],
    field: ScalarField,
    cfg: &OptimizerConfig,
) -> Result<(f64, Vec<Vec<C64>>)> {
    let mut e = orthonormalize(start).ok_or_else(|| Error::Numerical("degenerate starting frame".into()))?;
    let mut f = obj.value(&e);
    if !f.is_finite() {
        return Err(Error::Numerical("non-finite objective at start".into()));
    }
    for _ in 0..cfg.max_iter {
        let g = obj.gradient(&e);
        let mut accepted = None;
        if let Some(p) = polar_frame(&g, field) {
            let fp = obj.value(&p);
            if fp > f {
                accepted = Some((p, fp));
            }
        }
        if accepted.is_none() {
            let gn: f64 = g.iter().map(|v| l2(v).powi(2)).sum::<f64>().sqrt();
            if gn == 0.0 {
                break;
            }
            let scale = (e.len() as f64).sqrt() / gn;
            let mut eta = 1.0;
            while eta > 1e-18 {
                let trial: Vec<Vec<C64>> =
                    e.iter().zip(&g).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y * (eta * scale)).collect()).collect();
                if let Some(t) = orthonormalize(&trial) {
                    let ft = obj.value(&t);
                    if ft > f {
                        accepted = Some((t, ft));
                        break;
                    }
                }
                eta *= 0.5;
            }
        }
        let Some((t, ft)) = accepted else { break };
        let gain = (ft - f) / f.abs().max(f64::MIN_POSITIVE);
        e = t;
        f = ft;
        if gain < cfg.value_tol * 1e-3 {
            break;
        }
    }
    Ok((f, e))
}

/// Multi-start maximization over orthonormal k-frames in 𝕂^d.
pub fn maximize_on_frames(
    obj: &dyn FrameObjective,
    d: usize,
    k: usize,
    field: ScalarField,
    cfg: &OptimizerConfig,
) -> Result<NormEstimate> {
    maximize_on_frames_seeded(obj, d, k, field, cfg, &[])
}

pub fn maximize_on_frames_seeded(
    obj: &dyn FrameObjective,
    d: usize,
    k: usize,
    field: ScalarField,
    cfg: &OptimizerConfig,
    seeds: &[Vec<Vec<C64>>],
) -> Result<NormEstimate> {
    if k > d {
        return Err(Error::InvalidArgument(format!("cannot fit {k} orthonormal vectors in dimension {d}")));
    }
    if k == 0 {
        return Ok(NormEstimate::lower_bound(obj.value(&[]), Witness::Frame(Vec::new())));
    }
    let total = seeds.len() + cfg.restarts.max(1);
    let runs: Vec<Result<(f64, Vec<Vec<C64>>)>> = (0..total)
        .into_par_iter()
        .map(|i| {
            let start = if i < seeds.len() {
                seeds[i].clone()
            } else {
                let mut rng = restart_rng(cfg.seed, (i - seeds.len()) as u64);
                (0..k).map(|_| random_vector(&mut rng, d, field)).collect()
            };
            frame_ascent(obj, &start, field, cfg)
        })
        .collect();
    let mut warnings = Vec::new();
    let mut ok = Vec::new();
    for (i, r) in runs.into_iter().enumerate() {
        match r {
            Ok((f, e)) => ok.push((f, e)),
            Err(err) => warnings.push(format!("restart {i} aborted: {err}")),
        }
    }
    let flat = |e: &Vec<Vec<C64>>| e.concat();
    let keyed: Vec<(f64, (Vec<C64>, Vec<Vec<C64>>))> = ok.into_iter().map(|(f, e)| (f, (flat(&e), e))).collect();
    let (value, (_, frame)) = reduce_best(keyed, |x| x.0.as_slice())
        .ok_or_else(|| Error::Numerical(format!("every restart failed: {}", warnings.join("; "))))?;
    let mut est = NormEstimate::lower_bound(value, Witness::Frame(frame));
    est.warnings = warnings;
    Ok(est)
}

// ---------------------------------------------------------------------------
// Partition enumeration
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartitionResult {
    /// `assignment[j]` is the block of coordinate `j`.
    pub assignment: Vec<usize>,
    pub value: f64,
    pub evaluated: u64,
}

/// Exhaustive maximization over all maps `{0..m} → {0..n}`; the first
/// maximizer in lexicographic order wins ties.
pub fn enumerate_partitions(
    m: usize,
    n: usize,
    score: &(dyn Fn(&[usize]) -> f64 + Sync),
    cfg: &OptimizerConfig,
) -> Result<PartitionResult> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one block".into()));
    }
    let count = (n as u64).checked_pow(m as u32).filter(|&c| c <= cfg.brute_budget).ok_or_else(|| {
        Error::BudgetExceeded(format!("{n}^{m} assignments exceed the budget {}; use local search", cfg.brute_budget))
    })?;
    let mut a = vec![0usize; m];
    let mut best = (f64::NEG_INFINITY, a.clone());
    for _ in 0..count {
        let v = score(&a);
        if v > best.0 {
            best = (v, a.clone());
        }
        for slot in a.iter_mut() {
            *slot += 1;
            if *slot < n {
                break;
            }
            *slot = 0;
        }
    }
    Ok(PartitionResult { assignment: best.1, value: best.0, evaluated: count })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct MatNorm {
        a: Vec<Vec<C64>>,
        s: Exponent,
    }

    impl SphereObjective for MatNorm {
        fn value(&self, v: &[C64]) -> f64 {
            let w: Vec<C64> = self.a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect();
            p_norm(&w, self.s)
        }
        fn gradient(&self, v: &[C64]) -> Vec<C64> {
            let w: Vec<C64> = self.a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect();
            let g = crate::spaces::norm_gradient(&w, self.s);
            (0..v.len()).map(|j| self.a.iter().zip(&g).map(|(row, gi)| row[j].conj() * gi).sum()).collect()
        }
    }

    fn real(rows: &[&[f64]]) -> Vec<Vec<C64>> {
        rows.iter().map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect()).collect()
    }

    #[test]
    fn sphere_identity_and_diagonal() {
        let cfg = OptimizerConfig::default();
        let obj = MatNorm { a: real(&[&[1.0, 0.0], &[0.0, 1.0]]), s: Exponent::TWO };
        let est = maximize_on_sphere(&obj, Exponent::TWO, 2, ScalarField::Complex, &cfg).unwrap();
        assert!((est.value - 1.0).abs() < 1e-9);
        let est = maximize_on_sphere(&obj, Exponent::new(4.0).unwrap(), 2, ScalarField::Complex, &cfg).unwrap();
        assert!((est.value - 2f64.powf(0.25)).abs() < 1e-8);
        let Witness::Vector(w) = &est.witness else { panic!() };
        assert!((p_norm(w, Exponent::new(4.0).unwrap()) - 1.0).abs() < 1e-10);
        assert!((obj.value(w) - est.value).abs() < 1e-9);
    }

    #[test]
    fn sphere_matches_singular_value() {
        let mut rng = restart_rng(7, 0);
        let a: Vec<Vec<C64>> = (0..3).map(|_| random_vector(&mut rng, 3, ScalarField::Real)).collect();
        let m = DMatrix::<f64>::from_fn(3, 3, |i, j| a[i][j].re);
        let sigma = m.singular_values()[0];
        let obj = MatNorm { a, s: Exponent::TWO };
        let est = maximize_on_sphere(&obj, Exponent::TWO, 3, ScalarField::Real, &OptimizerConfig::default()).unwrap();
        assert!((est.value - sigma).abs() < 1e-8 * sigma);
    }

    #[test]
    fn sphere_is_deterministic() {
        let mut rng = restart_rng(3, 1);
        let a: Vec<Vec<C64>> = (0..3).map(|_| random_vector(&mut rng, 4, ScalarField::Complex)).collect();
        let obj = MatNorm { a, s: Exponent::new(3.0).unwrap() };
        let u = Exponent::new(1.5).unwrap();
        let cfg = OptimizerConfig::default();
        let first = maximize_on_sphere(&obj, u, 4, ScalarField::Complex, &cfg).unwrap();
        for _ in 0..5 {
            assert_eq!(first, maximize_on_sphere(&obj, u, 4, ScalarField::Complex, &cfg).unwrap());
        }
    }

    struct SumNorm(Vec<Vec<C64>>);

    impl TorusObjective for SumNorm {
        fn value(&self, xi: &[C64]) -> f64 {
            let w: Vec<C64> = (0..self.0[0].len()).map(|k| self.0.iter().zip(xi).map(|(y, z)| y[k] * z).sum()).collect();
            l2(&w)
        }
        fn angle_gradient(&self, xi: &[C64]) -> Vec<f64> {
            let w: Vec<C64> = (0..self.0[0].len()).map(|k| self.0.iter().zip(xi).map(|(y, z)| y[k] * z).sum()).collect();
            let g = crate::spaces::norm_gradient(&w, Exponent::TWO);
            self.0.iter().zip(xi).map(|(y, z)| -(z * inner(y, &g)).im).collect()
        }
    }

    #[test]
    fn torus_aligned_real_vectors() {
        let obj = SumNorm(real(&[&[1.0, 0.0], &[1.0, 0.0]]));
        let res = maximize_on_torus(&obj, 2, ScalarField::Real, &OptimizerConfig::default()).unwrap();
        assert_eq!(res.estimate.value, 2.0);
        assert_eq!(res.estimate.certification, Certification::Exact);
        assert_eq!(res.classes, vec![vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]]);
    }

    #[test]
    fn torus_complex_pair_closed_form() {
        let y = vec![vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)], vec![C64::new(0.5, -0.2), C64::new(1.0, 0.3)]];
        let g = inner(&y[0], &y[1]).norm();
        let want = (l2(&y[0]).powi(2) + l2(&y[1]).powi(2) + 2.0 * g).sqrt();
        let res = maximize_on_torus(&SumNorm(y), 2, ScalarField::Complex, &OptimizerConfig::default()).unwrap();
        assert!((res.estimate.value - want).abs() < 1e-12);
        assert_eq!(res.classes.len(), 1);
    }

    struct Bessel(Vec<Vec<C64>>);

    impl FrameObjective for Bessel {
        fn value(&self, e: &[Vec<C64>]) -> f64 {
            self.0.iter().zip(e).map(|(x, v)| inner(x, v).norm_sqr()).sum::<f64>().sqrt()
        }
        fn gradient(&self, e: &[Vec<C64>]) -> Vec<Vec<C64>> {
            self.0.iter().zip(e).map(|(x, v)| {
                let c = inner(x, v);
                x.iter().map(|z| z * c.conj()).collect()
            }).collect()
        }
    }

    #[test]
    fn frames_small_cases() {
        let cfg = OptimizerConfig::default();
        let est = maximize_on_frames(&Bessel(real(&[&[2.0]])), 1, 1, ScalarField::Complex, &cfg).unwrap();
        assert!((est.value - 2.0).abs() < 1e-12);
        let est = maximize_on_frames(&Bessel(real(&[&[1.0, 0.0], &[0.0, 1.0]])), 2, 2, ScalarField::Complex, &cfg).unwrap();
        assert!((est.value - 2f64.sqrt()).abs() < 1e-10);
        let Witness::Frame(f) = &est.witness else { panic!() };
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((inner(&f[i], &f[j]) - C64::new(want, 0.0)).norm() < 1e-10);
            }
        }
        assert!(maximize_on_frames(&Bessel(real(&[&[1.0]])), 1, 2, ScalarField::Real, &cfg).is_err());
    }

    #[test]
    fn partition_counts() {
        let cfg = OptimizerConfig::default();
        assert_eq!(enumerate_partitions(1, 2, &|_| 0.0, &cfg).unwrap().evaluated, 2);
        assert_eq!(enumerate_partitions(3, 2, &|_| 0.0, &cfg).unwrap().evaluated, 8);
        let small = OptimizerConfig { brute_budget: 7, ..cfg };
        assert!(matches!(enumerate_partitions(3, 2, &|_| 0.0, &small), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn restart_streams_are_prefix_stable() {
        let a: Vec<u64> = (0..4).map(|i| restart_rng(9, i).random()).collect();
        let b: Vec<u64> = (0..4).map(|i| restart_rng(9, i).random()).collect();
        assert_eq!(a, b);
        assert_ne!(a[0], a[1]);
    }
}
