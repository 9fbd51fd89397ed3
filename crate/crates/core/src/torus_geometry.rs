//! Geometry of `μ_{1,n}` on Hilbert spaces: maximizers of
//! `ξ ↦ ‖Σ ξ_i y_i‖` over the torus, extreme points of the `μ_{1,n}` unit
//! ball, and lower bounds for the constant `c_n` relating the maximum and
//! Hilbert multi-norms.
//!
//! For a triple, `‖Σ ξ_i y_i‖² = Σ‖y_i‖² + 2F` where
//! `F = a cos r + b cos s + c cos t`, `a = |⟨y₁,y₂⟩|`, `b = |⟨y₂,y₃⟩|`,
//! `c = |⟨y₃,y₁⟩|`, and the angles satisfy `r + s + t ≡ M`, the sum of the
//! three inner-product arguments.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::multinorms::{hilbert_norm, max_norm};
use crate::optkernel::{
    frame_ascent, gauge, maximize_on_torus, orthonormalize, random_vector, restart_rng, Certification, NormEstimate,
    OptimizerConfig, Witness,
};
use crate::spaces::{dft_tuple, inner, Exponent, ScalarField, SequenceSpace, VectorTuple, C64};
use crate::weak_summing::{gram, ColumnCombination, OperatorMatrix};

const ANGLE_TOL: f64 = 1e-9;

fn wrap(t: f64) -> f64 {
    let mut x = t % (2.0 * PI);
    if x <= -PI {
        x += 2.0 * PI;
    } else if x > PI {
        x -= 2.0 * PI;
    }
    x
}

/// `(a, b, c, M)` for a triple of vectors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TriangleData {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Phase sum in `[0, 2π)`.
    pub m: f64,
}

impl TriangleData {
    pub fn new(a: f64, b: f64, c: f64, m: f64) -> Result<Self> {
        if !(a >= 0.0 && b >= 0.0 && c >= 0.0 && m.is_finite()) {
            return Err(Error::InvalidArgument("a, b, c must be nonnegative and M finite".into()));
        }
        Ok(TriangleData { a, b, c, m: m.rem_euclid(2.0 * PI) })
    }

    pub fn from_triple(y1: &[C64], y2: &[C64], y3: &[C64]) -> Self {
        let (g12, g23, g31) = (inner(y1, y2), inner(y2, y3), inner(y3, y1));
        let m = (g12.arg() + g23.arg() + g31.arg()).rem_euclid(2.0 * PI);
        TriangleData { a: g12.norm(), b: g23.norm(), c: g31.norm(), m }
    }

    fn m_is_zero(&self) -> bool {
        wrap(self.m).abs() <= ANGLE_TOL
    }

    fn m_is_pi(&self) -> bool {
        (wrap(self.m - PI)).abs() <= ANGLE_TOL
    }

    /// Whether `1/a, 1/b, 1/c` are the sides of a nondegenerate triangle.
    pub fn reciprocal_triangle(&self) -> bool {
        if self.a == 0.0 || self.b == 0.0 || self.c == 0.0 {
            return false;
        }
        let (x, y, z) = (1.0 / self.a, 1.0 / self.b, 1.0 / self.c);
        x < y + z && y < x + z && z < x + y
    }

    pub fn f(&self, t: [f64; 3]) -> f64 {
        self.a * t[0].cos() + self.b * t[1].cos() + self.c * t[2].cos()
    }
}

/// Maximum of `F` on the constraint surface.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FMaximum {
    pub value: f64,
    /// Every maximizing `(r, s, t)`, angles in `(−π, π]`.
    pub triples: Vec<[f64; 3]>,
    /// All of `a, b, c` vanish; every point is a maximizer.
    pub degenerate: bool,
}

/// Maximizes `a cos r + b cos s + c cos t` subject to `r + s + t ≡ M`.
pub fn maximize_f(data: &TriangleData) -> Result<FMaximum> {
    let coef = [data.a, data.b, data.c];
    let m = wrap(data.m);
    let zeros = coef.iter().filter(|&&x| x == 0.0).count();
    let fm = |triples: Vec<[f64; 3]>, degenerate| {
        let triples: Vec<[f64; 3]> = triples.into_iter().map(|t| [wrap(t[0]), wrap(t[1]), wrap(t[2])]).collect();
        let value = data.f(triples[0]);
        FMaximum { value, triples, degenerate }
    };
    match zeros {
        3 => return Ok(fm(vec![[m, 0.0, 0.0]], true)),
        2 => {
            // One active term: its angle is 0, a zero-weight angle absorbs M.
            let k = (0..3).find(|&k| coef[k] > 0.0).expect("one positive");
            let mut t = [0.0; 3];
            t[(k + 1) % 3] = m;
            return Ok(fm(vec![t], false));
        }
        1 => {
            let k = (0..3).find(|&k| coef[k] == 0.0).expect("one zero");
            let mut t = [0.0; 3];
            t[k] = m;
            return Ok(fm(vec![t], false));
        }
        _ => {}
    }
    if data.m_is_zero() {
        return Ok(fm(vec![[0.0, 0.0, 0.0]], false));
    }
    if data.m_is_pi() {
        if data.reciprocal_triangle() {
            let (x, y, z) = (1.0 / data.a, 1.0 / data.b, 1.0 / data.c);
            let angle = |opp: f64, s1: f64, s2: f64| ((s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2)).clamp(-1.0, 1.0).acos();
            let (aa, bb, cc) = (angle(x, y, z), angle(y, x, z), angle(z, x, y));
            return Ok(fm(vec![[aa, bb, cc], [-aa, -bb, -cc]], false));
        }
        let k = (0..3).fold(0, |b, k| if coef[k] < coef[b] { k } else { b });
        let mut t = [0.0; 3];
        t[k] = PI;
        return Ok(fm(vec![t], false));
    }
    generic_maximum(data, m)
}

/// Stationary points `a sin r = b sin s = c sin t = h` on all eight
/// principal/obtuse branch combinations, located by a scan in `h` followed
/// by bisection.
fn generic_maximum(data: &TriangleData, m: f64) -> Result<FMaximum> {
    let coef = [data.a, data.b, data.c];
    let hmax = coef.iter().cloned().fold(f64::INFINITY, f64::min);
    let angles = |h: f64, branch: u8| -> [f64; 3] {
        let mut t = [0.0; 3];
        for k in 0..3 {
            let base = (h / coef[k]).clamp(-1.0, 1.0).asin();
            t[k] = if (branch >> k) & 1 == 1 { PI - base } else { base };
        }
        t
    };
    let residual = |h: f64, branch: u8| -> f64 {
        let t = angles(h, branch);
        wrap(t[0] + t[1] + t[2] - m)
    };
    const SCAN: usize = 4096;
    let mut roots: Vec<[f64; 3]> = Vec::new();
    for branch in 0u8..8 {
        let hs: Vec<f64> = (0..=SCAN).map(|i| -hmax + 2.0 * hmax * i as f64 / SCAN as f64).collect();
        let rs: Vec<f64> = hs.iter().map(|&h| residual(h, branch)).collect();
        for i in 0..SCAN {
            let (r0, r1) = (rs[i], rs[i + 1]);
            if r0 == 0.0 {
                roots.push(angles(hs[i], branch));
                continue;
            }
            // A sign change across a wrap jump is not a root.
            if r0.signum() == r1.signum() || (r0 - r1).abs() > PI {
                continue;
            }
            let (mut lo, mut hi) = (hs[i], hs[i + 1]);
            let mut steps = 0;
            while hi - lo > 1e-15 * hmax.max(1.0) {
                let mid = 0.5 * (lo + hi);
                if residual(mid, branch).signum() == r0.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
                steps += 1;
                if steps > 200 {
                    return Err(Error::Numerical("bisection for the stationary point did not converge".into()));
                }
            }
            let h = 0.5 * (lo + hi);
            if residual(h, branch).abs() <= 1e-10 {
                roots.push(angles(h, branch));
            }
        }
        if rs[SCAN] == 0.0 {
            roots.push(angles(hs[SCAN], branch));
        }
    }
    let floor = coef.iter().cloned().fold(0.0, f64::max);
    let best = roots.iter().map(|t| data.f(*t)).fold(f64::NEG_INFINITY, f64::max);
    if !(best > floor) {
        return Err(Error::Numerical(format!("no stationary point beats max(a,b,c) = {floor} (best {best})")));
    }
    let mut triples: Vec<[f64; 3]> = Vec::new();
    for t in roots {
        if data.f(t) >= best - 1e-12 * best.abs() {
            let t = [wrap(t[0]), wrap(t[1]), wrap(t[2])];
            if !triples.iter().any(|u| (0..3).all(|k| wrap(u[k] - t[k]).abs() < 1e-7)) {
                triples.push(t);
            }
        }
    }
    Ok(FMaximum { value: best, triples, degenerate: false })
}

/// Torus maximizer classes of a triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TorusClass {
    I,
    II,
    III,
    IV,
    V,
    Degenerate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TorusClassification {
    pub class: TorusClass,
    pub data: TriangleData,
    /// Maximizing phases with `ξ₃ = 1`.
    pub maximizer_classes: Vec<Vec<C64>>,
    /// Sign of the common imaginary part `Im(ξ_i ξ̄_j ⟨y_i, y_j⟩)` at each
    /// maximizer.
    pub k_signs: Vec<i8>,
    /// `max ‖Σ ξ_i y_i‖`.
    pub value: f64,
}

fn sign(x: f64, scale: f64) -> i8 {
    if x.abs() <= 1e-12 * scale.max(1e-300) {
        0
    } else if x > 0.0 {
        1
    } else {
        -1
    }
}

/// Closed-form classification of `ξ ↦ ‖ξ₁y₁ + ξ₂y₂ + ξ₃y₃‖` on `𝕋³`.
pub fn classify_triple(y1: &[C64], y2: &[C64], y3: &[C64]) -> Result<TorusClassification> {
    let data = TriangleData::from_triple(y1, y2, y3);
    let norms2: f64 = [y1, y2, y3].iter().map(|v| inner(v, v).re).sum();
    let scale = norms2.max(f64::MIN_POSITIVE);
    if [data.a, data.b, data.c].iter().any(|&x| x <= 1e-14 * scale) {
        return Ok(TorusClassification {
            class: TorusClass::Degenerate,
            data,
            maximizer_classes: Vec::new(),
            k_signs: Vec::new(),
            value: f64::NAN,
        });
    }
    let class = if data.m_is_zero() {
        TorusClass::I
    } else if data.m_is_pi() {
        if data.reciprocal_triangle() {
            TorusClass::II
        } else {
            TorusClass::III
        }
    } else if data.m < PI {
        TorusClass::IV
    } else {
        TorusClass::V
    };
    let fm = maximize_f(&data)?;
    let (a12, a23) = (inner(y1, y2).arg(), inner(y2, y3).arg());
    let maximizer_classes: Vec<Vec<C64>> = fm
        .triples
        .iter()
        .map(|t| {
            let th2 = t[1] - a23;
            let th1 = t[0] - a12 + th2;
            vec![C64::from_polar(1.0, th1), C64::from_polar(1.0, th2), C64::new(1.0, 0.0)]
        })
        .collect();
    let k_signs = fm.triples.iter().map(|t| sign(data.a * t[0].sin(), data.a)).collect();
    let value = (norms2 + 2.0 * fm.value).max(0.0).sqrt();
    Ok(TorusClassification { class, data, maximizer_classes, k_signs, value })
}

/// `μ_{1,n}` on a Hilbert space together with its maximizing phases.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Mu1Result {
    pub estimate: NormEstimate,
    /// Maximizing phase tuples with `ξ_n = 1`.
    pub classes: Vec<Vec<C64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub triple_class: Option<TorusClass>,
}

/// `μ_{1,n}(y) = max_ξ ‖Σ ξ_i y_i‖`: closed form for complex triples, sign
/// enumeration over ℝ, the torus kernel otherwise.
pub fn mu1_maximize(y: &VectorTuple, cfg: &OptimizerConfig) -> Result<Mu1Result> {
    if y.space.r != Exponent::TWO {
        return Err(Error::InvalidArgument("μ_{1,n} geometry needs a Hilbert space (r = 2)".into()));
    }
    let v = y.vectors();
    if y.space.field == ScalarField::Complex && y.n() == 3 {
        let tc = classify_triple(&v[0], &v[1], &v[2])?;
        if tc.class != TorusClass::Degenerate {
            let est = NormEstimate::exact(tc.value, Witness::Phases(tc.maximizer_classes[0].clone()));
            return Ok(Mu1Result { estimate: est, classes: tc.maximizer_classes, triple_class: Some(tc.class) });
        }
    }
    let op = OperatorMatrix::from_tuple(y, Exponent::ONE);
    let res = maximize_on_torus(&ColumnCombination { op: &op }, y.n(), y.space.field, cfg)?;
    let mut estimate = res.estimate;
    let mut classes: Vec<Vec<C64>> = res.classes.iter().map(|c| gauge(c)).collect();
    if y.space.field == ScalarField::Complex {
        let g = gram(v);
        classes = classes.iter().map(|xi| newton_polish(&g, xi)).collect();
        let best = classes.iter().map(|xi| combination_norm(v, xi)).fold(f64::NEG_INFINITY, f64::max);
        if best >= estimate.value {
            estimate.value = best;
            estimate.witness = Witness::Phases(classes[0].clone());
        }
    }
    Ok(Mu1Result { estimate, classes, triple_class: None })
}

fn combination_norm(v: &[Vec<C64>], xi: &[C64]) -> f64 {
    let d = v[0].len();
    (0..d).map(|k| v.iter().zip(xi).map(|(y, z)| y[k] * z).sum::<C64>().norm_sqr()).sum::<f64>().sqrt()
}

/// Newton iterations on the free angles of `‖Σ ξ_i y_i‖²`, with the last
/// phase fixed at 1. The pseudo-inverse keeps the step well defined when
/// the maximizers form a continuum.
fn newton_polish(g: &[Vec<C64>], xi: &[C64]) -> Vec<C64> {
    let n = xi.len();
    if n < 2 {
        return xi.to_vec();
    }
    // a[m][j] = ⟨y_j, y_m⟩, so S_m = Σ_j ξ_j a[m][j].
    let a = |m: usize, j: usize| g[j][m];
    let mut theta: Vec<f64> = xi.iter().map(|z| z.arg()).collect();
    let f = n - 1;
    for _ in 0..20 {
        let z: Vec<C64> = theta.iter().map(|&t| C64::from_polar(1.0, t)).collect();
        let s: Vec<C64> = (0..n).map(|m| (0..n).map(|j| z[j] * a(m, j)).sum()).collect();
        let grad = nalgebra::DVector::from_fn(f, |m, _| 2.0 * (z[m].conj() * s[m]).im);
        if grad.norm() <= 1e-15 {
            break;
        }
        let hess = DMatrix::from_fn(f, f, |m, k| {
            if m == k {
                2.0 * (a(m, m).re - (z[m].conj() * s[m]).re)
            } else {
                2.0 * (z[m].conj() * z[k] * a(m, k)).re
            }
        });
        let svd = hess.svd(true, true);
        let tol = 1e-10 * svd.singular_values.max().max(1e-300);
        let Ok(step) = svd.solve(&grad, tol) else { break };
        for m in 0..f {
            theta[m] -= step[m];
        }
    }
    let before = combination_norm_sq_gram(g, xi);
    let out = gauge(&theta.iter().map(|&t| C64::from_polar(1.0, t)).collect::<Vec<_>>());
    if combination_norm_sq_gram(g, &out) >= before - 1e-14 * before.abs() {
        out
    } else {
        xi.to_vec()
    }
}

fn combination_norm_sq_gram(g: &[Vec<C64>], xi: &[C64]) -> f64 {
    let n = xi.len();
    (0..n).flat_map(|j| (0..n).map(move |k| (j, k))).map(|(j, k)| (xi[j] * xi[k].conj() * g[j][k]).re).sum()
}

/// The real triple `(1,0,0)/√11, (1,1,0)/√11, (−1,2,1)/√11`.
pub fn real_witness_3() -> VectorTuple {
    let s = 11f64.sqrt();
    let rows = [vec![1.0, 0.0, 0.0], vec![1.0, 1.0, 0.0], vec![-1.0, 2.0, 1.0]];
    let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|x| x / s).collect()).collect();
    let space = SequenceSpace::new(3, Exponent::TWO, ScalarField::Real).expect("valid space");
    VectorTuple::from_real(space, &rows).expect("valid tuple")
}

/// The complex 4-tuple `(1,0,0), (−1,2,0), (−1,−1,3), (−1,−1,−1)` in `ℂ³`;
/// all pairwise inner products are `−1`.
pub fn complex_witness_4() -> VectorTuple {
    let rows = [vec![1.0, 0.0, 0.0], vec![-1.0, 2.0, 0.0], vec![-1.0, -1.0, 3.0], vec![-1.0, -1.0, -1.0]];
    let space = SequenceSpace::new(3, Exponent::TWO, ScalarField::Complex).expect("valid space");
    VectorTuple::from_real(space, &rows).expect("valid tuple")
}

/// [`complex_witness_4`] scaled to `μ_{1,4} = 1`; since
/// `‖Σ ξ_i x_i‖² = 24 − |Σ ξ_i|²`, the factor is `1/√24`.
pub fn complex_witness_4_scaled() -> VectorTuple {
    complex_witness_4().scaled(1.0 / 24f64.sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "direction")]
pub enum ExtremeVerdict {
    Extreme,
    NotExtremeWitness(Vec<Vec<C64>>),
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtremeTestReport {
    pub mu_value: NormEstimate,
    pub maximizers: Vec<Vec<C64>>,
    pub nullspace_dim: usize,
    /// Nullspace dimension of the conditions `Σ ξ_i u_i = 0` alone.
    pub first_stage_dim: usize,
    /// Whether every first-stage solution has `u₁ = ⋯ = u_n`.
    pub first_stage_blocks_equal: bool,
    pub verdict: ExtremeVerdict,
}

/// Unknown layout: `u_i[k]` occupies column `(i·d + k)·w`, plus one for
/// the imaginary part over ℂ (`w = 2`).
struct LinearSystem {
    rows: Vec<Vec<f64>>,
    cols: usize,
}

impl LinearSystem {
    /// Rank (threshold `1e-9·σ_max`) and a nullspace basis.
    fn nullspace(&self) -> Vec<Vec<f64>> {
        let n = self.cols;
        let m = self.rows.len().max(n);
        let mat = DMatrix::<f64>::from_fn(m, n, |i, j| self.rows.get(i).map_or(0.0, |r| r[j]));
        let svd = mat.svd(false, true);
        let vt = svd.v_t.expect("requested V^T");
        let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let thresh = 1e-9 * smax.max(f64::MIN_POSITIVE);
        (0..svd.singular_values.len())
            .filter(|&k| svd.singular_values[k] <= thresh)
            .map(|k| (0..n).map(|j| vt[(k, j)]).collect())
            .collect()
    }
}

fn first_stage_rows(xi: &[C64], n: usize, d: usize, field: ScalarField) -> Vec<Vec<f64>> {
    let w = if field == ScalarField::Complex { 2 } else { 1 };
    let cols = n * d * w;
    let mut rows = Vec::new();
    for k in 0..d {
        let mut re = vec![0.0; cols];
        let mut im = vec![0.0; cols];
        for (i, z) in xi.iter().enumerate() {
            let c = (i * d + k) * w;
            // ξ(x + iy) = (ξ_re x − ξ_im y) + i(ξ_im x + ξ_re y).
            re[c] = z.re;
            im[c] = z.im;
            if w == 2 {
                re[c + 1] = -z.im;
                im[c + 1] = z.re;
            }
        }
        rows.push(re);
        if w == 2 {
            rows.push(im);
        }
    }
    rows
}

/// `Im(ξ_i ⟨u_i, v⟩) = 0`: first-order stationarity of the phase maximizer
/// along the perturbation.
fn phase_rows(xi: &[C64], y: &[Vec<C64>], d: usize) -> Vec<Vec<f64>> {
    let n = y.len();
    let v: Vec<C64> = (0..d).map(|k| xi.iter().zip(y).map(|(z, yi)| z * yi[k]).sum()).collect();
    let cols = 2 * n * d;
    (0..n)
        .map(|i| {
            let mut row = vec![0.0; cols];
            for k in 0..d {
                // Im(ξ_i (x + iy) conj(v_k)) with w = ξ_i conj(v_k).
                let w = xi[i] * v[k].conj();
                let c = (i * d + k) * 2;
                row[c] = w.im;
                row[c + 1] = w.re;
            }
            row
        })
        .collect()
}

fn unpack(u: &[f64], n: usize, d: usize, field: ScalarField) -> Vec<Vec<C64>> {
    let w = if field == ScalarField::Complex { 2 } else { 1 };
    (0..n)
        .map(|i| {
            (0..d)
                .map(|k| {
                    let c = (i * d + k) * w;
                    C64::new(u[c], if w == 2 { u[c + 1] } else { 0.0 })
                })
                .collect()
        })
        .collect()
}

/// First-order extremality test for `y` on the unit sphere of `μ_{1,n}`.
///
/// A trivial nullspace proves extremality. Otherwise the nullspace
/// directions are tried as perturbations; a verified `y ± u` inside the ball
/// (with `‖u‖ ≥ 1e-2·‖y‖`) disproves it, and anything else is inconclusive.
pub fn extreme_point_test(y: &VectorTuple, cfg: &OptimizerConfig) -> Result<ExtremeTestReport> {
    let mu = mu1_maximize(y, cfg)?;
    let value = mu.estimate.value;
    if (value - 1.0).abs() > 1e-8 {
        return Err(Error::Precondition(format!("extreme_point_test needs μ_1,n(y) = 1, measured {value}")));
    }
    let (n, d, field) = (y.n(), y.m(), y.space.field);
    let w = if field == ScalarField::Complex { 2 } else { 1 };
    let cols = n * d * w;
    let mut first = LinearSystem { rows: Vec::new(), cols };
    for xi in &mu.classes {
        first.rows.extend(first_stage_rows(xi, n, d, field));
    }
    let first_null = first.nullspace();
    let blocks_equal = first_null.iter().all(|u| {
        let blocks = unpack(u, n, d, field);
        blocks.iter().all(|b| b.iter().zip(&blocks[0]).all(|(x, y)| (x - y).norm() <= 1e-8))
    });
    let mut full = LinearSystem { rows: first.rows.clone(), cols };
    if field == ScalarField::Complex {
        for xi in &mu.classes {
            full.rows.extend(phase_rows(xi, y.vectors(), d));
        }
    }
    let null = full.nullspace();
    let verdict = if null.is_empty() { ExtremeVerdict::Extreme } else { perturbation_search(y, &null, cfg)? };
    Ok(ExtremeTestReport {
        mu_value: mu.estimate,
        maximizers: mu.classes,
        nullspace_dim: null.len(),
        first_stage_dim: first_null.len(),
        first_stage_blocks_equal: blocks_equal,
        verdict,
    })
}

fn perturbation_search(y: &VectorTuple, null: &[Vec<f64>], cfg: &OptimizerConfig) -> Result<ExtremeVerdict> {
    let (n, d, field) = (y.n(), y.m(), y.space.field);
    let ynorm = y.vectors().iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let light = cfg.light();
    for dir in null.iter().take(4) {
        let u = unpack(dir, n, d, field);
        let unorm = u.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let mut t = ynorm / unorm;
        while t * unorm >= 1e-2 * ynorm {
            let inside = [1.0, -1.0].iter().all(|&sgn| {
                let rows: Vec<Vec<C64>> =
                    y.vectors().iter().zip(&u).map(|(a, b)| a.iter().zip(b).map(|(x, z)| x + z * (sgn * t)).collect()).collect();
                VectorTuple::new(y.space, rows)
                    .and_then(|p| mu1_maximize(&p, &light))
                    .is_ok_and(|m| m.estimate.value <= 1.0 + 1e-8)
            });
            if inside {
                let scaled = u.iter().map(|v| v.iter().map(|z| z * t).collect()).collect();
                return Ok(ExtremeVerdict::NotExtremeWitness(scaled));
            }
            t *= 0.5;
        }
    }
    Ok(ExtremeVerdict::Inconclusive)
}

/// Lower-bound search for `c_n = sup ‖x‖^max_n / ‖x‖^H_n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CnReport {
    pub n: usize,
    pub d: usize,
    pub field: ScalarField,
    /// `max(x)/H(x)` at the best tuple found.
    pub ratio: f64,
    /// `H(x)/max(x)`, at most 1 in exact arithmetic.
    pub inverse_ratio: f64,
    /// `max(x)/(Σ‖x_i‖²)^{1/2}`; a lower bound for the ratio since `H(x)`
    /// never exceeds that quantity.
    pub conservative_ratio: f64,
    pub max_norm: NormEstimate,
    pub hilbert_norm: NormEstimate,
    pub witness: Vec<Vec<C64>>,
    pub origin: String,
    pub candidates_evaluated: usize,
}

/// Ratio `max/H` of one tuple.
pub fn max_hilbert_ratio(x: &VectorTuple, cfg: &OptimizerConfig) -> Result<(f64, NormEstimate, NormEstimate)> {
    let mx = max_norm(x, cfg)?;
    let h = hilbert_norm(x, cfg)?;
    let ratio = if h.value > 0.0 { mx.value / h.value } else { 0.0 };
    Ok((ratio, mx, h))
}

fn pad(rows: &[Vec<C64>], n: usize, d: usize) -> Vec<Vec<C64>> {
    (0..n)
        .map(|i| (0..d).map(|k| rows.get(i).and_then(|r| r.get(k)).copied().unwrap_or(C64::new(0.0, 0.0))).collect())
        .collect()
}

/// Rows of `P = (1-ε)Q + εI`, with `Q` the Gram matrix of `n` unit vectors
/// in `ℂ²`. Its Gram matrix is `P²`, so `P` is optimal over the unit-diagonal
/// positive cone and `H = √n`, while a generic rank-two `Q` lies outside the
/// torus hull and pushes the maximum multi-norm above `√n`.
pub fn elliptope_gap_tuple(n: usize, eps: f64) -> Vec<Vec<C64>> {
    let mut rng = restart_rng(102, n as u64);
    let v: Vec<Vec<C64>> = (0..n)
        .map(|_| {
            let w = random_vector(&mut rng, 2, ScalarField::Complex);
            let s = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            w.iter().map(|z| z / s).collect()
        })
        .collect();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| inner(&v[i], &v[j]) * (1.0 - eps) + if i == j { C64::new(eps, 0.0) } else { C64::new(0.0, 0.0) })
                .collect()
        })
        .collect()
}

/// Structured starting tuples: DFT tuples, the two witnesses and the
/// elliptope-gap tuple.
pub fn structured_tuples(n: usize, d: usize, field: ScalarField) -> Vec<(String, Vec<Vec<C64>>)> {
    let mut out = Vec::new();
    if field == ScalarField::Complex && n >= 4 && d >= n {
        out.push(("elliptope-gap".to_string(), pad(&elliptope_gap_tuple(n, 0.02), n, d)));
    }
    if field == ScalarField::Complex {
        if let Ok(f) = dft_tuple(n.min(d).max(1), Exponent::TWO, field) {
            out.push(("dft".to_string(), pad(f.vectors(), n, d)));
        }
        if n >= 4 && d >= 3 {
            out.push(("complex-witness-4".to_string(), pad(complex_witness_4().vectors(), n, d)));
        }
    }
    if n >= 3 && d >= 3 {
        out.push(("real-witness-3".to_string(), pad(real_witness_3().vectors(), n, d)));
    }
    out
}

fn frob(z: &[Vec<C64>]) -> f64 {
    z.iter().flatten().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Hilbert value with a warm frame on a fixed active subset.
fn hilbert_local(x: &[Vec<C64>], active: &[usize], warm: &[Vec<C64>], field: ScalarField, cfg: &OptimizerConfig) -> (f64, Vec<Vec<C64>>) {
    struct Obj<'a>(Vec<&'a Vec<C64>>);
    impl crate::optkernel::FrameObjective for Obj<'_> {
        fn value(&self, e: &[Vec<C64>]) -> f64 {
            self.0.iter().zip(e).map(|(x, v)| inner(x, v).norm_sqr()).sum::<f64>().sqrt()
        }
        fn gradient(&self, e: &[Vec<C64>]) -> Vec<Vec<C64>> {
            self.0
                .iter()
                .zip(e)
                .map(|(x, v)| {
                    let c = inner(x, v).conj();
                    x.iter().map(|z| z * c).collect()
                })
                .collect()
        }
    }
    let obj = Obj(active.iter().map(|&i| &x[i]).collect());
    match frame_ascent(&obj, warm, field, cfg) {
        Ok(r) => r,
        Err(_) => (0.0, warm.to_vec()),
    }
}

/// Maximizes `Re⟨x, y⟩ / H(x)` by Danskin ascent; when `μ_{1,n}(y) ≤ 1`
/// every value is a lower bound for `max(x)/H(x)`.
fn separating_tuple(y: &[Vec<C64>], field: ScalarField, rounds: usize, cfg: &OptimizerConfig) -> Result<Vec<Vec<C64>>> {
    let n = y.len();
    let d = y[0].len();
    let space = SequenceSpace::new(d, Exponent::TWO, field)?;
    let light = cfg.light();
    let mut x: Vec<Vec<C64>> = y.to_vec();
    let scale = frob(&x);
    if scale == 0.0 {
        return Ok(x);
    }
    x.iter_mut().flatten().for_each(|z| *z /= scale);
    let pairing = |x: &[Vec<C64>]| -> f64 { x.iter().zip(y).map(|(a, b)| inner(a, b).re).sum() };
    let locate = |x: &[Vec<C64>]| -> Result<(f64, Vec<usize>, Vec<Vec<C64>>)> {
        let est = hilbert_norm(&VectorTuple::new(space, x.to_vec())?, &light)?;
        let Witness::Frame(f) = est.witness else { unreachable!() };
        let active: Vec<usize> = (0..n).filter(|&i| f[i].iter().any(|z| z.norm() > 0.0)).collect();
        let frame = active.iter().map(|&i| f[i].clone()).collect();
        Ok((est.value, active, frame))
    };
    let (mut h, mut active, mut frame) = locate(&x)?;
    let mut g = pairing(&x) / h;
    for round in 0..rounds {
        let coeffs: Vec<C64> = active.iter().zip(&frame).map(|(&i, e)| inner(&x[i], e)).collect();
        let p = pairing(&x);
        let mut grad: Vec<Vec<C64>> = y.iter().map(|v| v.iter().map(|z| z / h).collect()).collect();
        for ((&i, e), c) in active.iter().zip(&frame).zip(&coeffs) {
            for (gk, ek) in grad[i].iter_mut().zip(e) {
                *gk -= ek * c * (p / (h * h * h));
            }
        }
        let gn = frob(&grad);
        if gn == 0.0 || !gn.is_finite() {
            break;
        }
        let mut eta = 1.0;
        let mut accepted = None;
        while eta > 1e-10 {
            let mut trial: Vec<Vec<C64>> =
                x.iter().zip(&grad).map(|(a, b)| a.iter().zip(b).map(|(u, v)| u + v * (eta / gn)).collect()).collect();
            let tn = frob(&trial);
            trial.iter_mut().flatten().for_each(|z| *z /= tn);
            let (ht, ft) = hilbert_local(&trial, &active, &frame, field, &light);
            if ht > 0.0 && pairing(&trial) / ht > g {
                accepted = Some((trial, ht, ft));
                break;
            }
            eta *= 0.5;
        }
        let Some((t, _, _)) = accepted else { break };
        x = t;
        // Periodically re-select the active subset with a global search.
        let (hn, an, fnew) = if round % 10 == 9 {
            locate(&x)?
        } else {
            let (hv, fv) = hilbert_local(&x, &active, &frame, field, &light);
            (hv, active.clone(), fv)
        };
        let gn_new = pairing(&x) / hn;
        let gain = (gn_new - g) / g.abs().max(1e-300);
        h = hn;
        active = an;
        frame = fnew;
        g = gn_new;
        if gain.abs() < 1e-10 {
            break;
        }
    }
    Ok(x)
}

/// Lower bound for `c_n` on `𝕂^d` from random, structured and separating
/// tuples, refined by alternating between the dual maximizer of the
/// maximum multi-norm and the separating tuple for that maximizer.
pub fn cn_lower_bound(n: usize, d: usize, field: ScalarField, cfg: &OptimizerConfig) -> Result<CnReport> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument("n and d must be positive".into()));
    }
    let space = SequenceSpace::new(d, Exponent::TWO, field)?;
    let light = cfg.light();
    let mut cands = structured_tuples(n, d, field);
    if n >= 4 && d >= 3 && field == ScalarField::Complex {
        let y = pad(complex_witness_4_scaled().vectors(), n, d);
        cands.push(("separating-complex-witness-4".into(), separating_tuple(&y, field, 60, cfg)?));
    }
    if n >= 3 && d >= 3 && field == ScalarField::Real {
        let y = pad(real_witness_3().vectors(), n, d);
        cands.push(("separating-real-witness-3".into(), separating_tuple(&y, field, 60, cfg)?));
    }
    for i in 0..cfg.restarts.max(1) {
        let mut rng = restart_rng(cfg.seed ^ 0xc0ffee, i as u64);
        cands.push((format!("random-{i}"), (0..n).map(|_| random_vector(&mut rng, d, field)).collect()));
    }
    let scored: Vec<Result<(f64, String, Vec<Vec<C64>>)>> = cands
        .into_par_iter()
        .map(|(label, x)| {
            let t = VectorTuple::new(space, x.clone())?;
            let (ratio, _, _) = max_hilbert_ratio(&t, &light)?;
            Ok((ratio, label, x))
        })
        .collect();
    let mut scored: Vec<(f64, String, Vec<Vec<C64>>)> = scored.into_iter().collect::<Result<_>>()?;
    let evaluated = scored.len();
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal).then(a.1.cmp(&b.1)));
    scored.truncate(2);
    // Alternate: dual maximizer of max(x), then the tuple separating it.
    let mut refined = Vec::new();
    for (_, label, x) in scored {
        refined.push((label.clone(), x.clone()));
        let mut cur = x;
        for step in 0..2 {
            let mx = max_norm(&VectorTuple::new(space, cur.clone())?, &light)?;
            let Witness::Tuple(lambda) = mx.witness else { break };
            if lambda.iter().flatten().all(|z| z.norm() == 0.0) {
                break;
            }
            cur = separating_tuple(&lambda, field, 40, cfg)?;
            refined.push((format!("{label}+alt{}", step + 1), cur.clone()));
        }
    }
    let finals: Vec<Result<(f64, NormEstimate, NormEstimate, String, Vec<Vec<C64>>)>> = refined
        .into_par_iter()
        .map(|(label, x)| {
            let (ratio, mx, h) = max_hilbert_ratio(&VectorTuple::new(space, x.clone())?, cfg)?;
            Ok((ratio, mx, h, label, x))
        })
        .collect();
    let mut best: Option<(f64, NormEstimate, NormEstimate, String, Vec<Vec<C64>>)> = None;
    for f in finals {
        let f = f?;
        if best.as_ref().is_none_or(|b| f.0 > b.0) {
            best = Some(f);
        }
    }
    let (ratio, mx, h, origin, witness) = best.expect("non-empty");
    let total = frob(&witness);
    let mut h = h;
    if h.certification == Certification::Exact {
        h = h.downgrade(Certification::CertifiedLowerBound);
    }
    Ok(CnReport {
        n,
        d,
        field,
        ratio,
        inverse_ratio: if mx.value > 0.0 { h.value / mx.value } else { 0.0 },
        conservative_ratio: if total > 0.0 { mx.value / total } else { 0.0 },
        max_norm: mx,
        hilbert_norm: h,
        witness,
        origin,
        candidates_evaluated: evaluated,
    })
}

/// Gram matrix of a tuple.
pub fn gram_matrix(y: &VectorTuple) -> Vec<Vec<C64>> {
    gram(y.vectors())
}

/// Whether the vectors are pairwise orthogonal to `tol` (relative).
pub fn is_orthogonal(y: &VectorTuple, tol: f64) -> bool {
    let g = gram_matrix(y);
    let scale = y.row_norms().iter().cloned().fold(0.0, f64::max).powi(2).max(f64::MIN_POSITIVE);
    (0..g.len()).all(|i| (0..g.len()).all(|j| i == j || g[i][j].norm() <= tol * scale))
}

/// A random tuple of `n` orthogonal vectors in `𝕂^d` (`n ≤ d`) with
/// `Σ‖y_i‖² = 1`.
pub fn random_orthogonal_tuple(n: usize, d: usize, field: ScalarField, seed: u64) -> Result<VectorTuple> {
    if n > d {
        return Err(Error::InvalidArgument(format!("cannot fit {n} orthogonal vectors in dimension {d}")));
    }
    use rand::Rng;
    let mut rng = restart_rng(seed, 0);
    let basis = loop {
        let raw: Vec<Vec<C64>> = (0..n).map(|_| random_vector(&mut rng, d, field)).collect();
        if let Some(b) = orthonormalize(&raw) {
            break b;
        }
    };
    let weights: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 0.05).collect();
    let total = weights.iter().map(|w| w * w).sum::<f64>().sqrt();
    let rows = basis.iter().zip(&weights).map(|(b, w)| b.iter().map(|z| z * (w / total)).collect()).collect();
    VectorTuple::new(SequenceSpace::new(d, Exponent::TWO, field)?, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> OptimizerConfig {
        OptimizerConfig { restarts: 8, ..Default::default() }
    }

    /// Dense grid over the constraint surface.
    fn grid_f_max(data: &TriangleData, k: usize) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for i in 0..k {
            for j in 0..k {
                let r = 2.0 * PI * i as f64 / k as f64;
                let s = 2.0 * PI * j as f64 / k as f64;
                best = best.max(data.f([r, s, data.m - r - s]));
            }
        }
        best
    }

    #[test]
    fn equilateral_cases() {
        let d = TriangleData::new(1.0, 1.0, 1.0, PI).unwrap();
        let fm = maximize_f(&d).unwrap();
        assert_eq!(fm.triples.len(), 2);
        for t in &fm.triples {
            assert!(t.iter().all(|x| (x.abs() - PI / 3.0).abs() < 1e-12));
        }
        let d = TriangleData::new(1.0, 1.0, 1.0, 0.0).unwrap();
        let fm = maximize_f(&d).unwrap();
        assert_eq!(fm.value, 3.0);
        assert_eq!(fm.triples, vec![[0.0, 0.0, 0.0]]);
    }

    #[test]
    fn generic_case_matches_grid_and_stationarity() {
        for &(a, b, c, m) in &[(1.0, 2.0, 3.0, PI / 2.0), (0.3, 0.7, 0.5, 4.0), (2.0, 2.0, 0.5, 1.0), (1.0, 1.0, 1.0, 3.0)] {
            let d = TriangleData::new(a, b, c, m).unwrap();
            let fm = maximize_f(&d).unwrap();
            assert!((fm.value - grid_f_max(&d, 720)).abs() < 1e-3);
            assert!(fm.value > a.max(b).max(c));
            for t in &fm.triples {
                assert!((a * t[0].sin() - b * t[1].sin()).abs() < 1e-9);
                assert!((b * t[1].sin() - c * t[2].sin()).abs() < 1e-9);
                assert!(wrap(t[0] + t[1] + t[2] - m).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_reductions() {
        let fm = maximize_f(&TriangleData::new(1.0, 2.0, 0.0, 1.0).unwrap()).unwrap();
        assert!((fm.value - 3.0).abs() < 1e-15);
        let fm = maximize_f(&TriangleData::new(0.0, 2.0, 0.0, 1.0).unwrap()).unwrap();
        assert!((fm.value - 2.0).abs() < 1e-15);
        assert!(maximize_f(&TriangleData::new(0.0, 0.0, 0.0, 1.0).unwrap()).unwrap().degenerate);
    }

    #[test]
    fn witness_facts() {
        let y = real_witness_3();
        let g = gram_matrix(&y);
        assert!((g[0][1].re - 1.0 / 11.0).abs() < 1e-15);
        assert!((g[1][2].re - 1.0 / 11.0).abs() < 1e-15);
        assert!((g[0][2].re + 1.0 / 11.0).abs() < 1e-15);
        let mu = mu1_maximize(&y, &quick()).unwrap();
        assert!((mu.estimate.value - 1.0).abs() < 1e-12);
        assert_eq!(mu.classes.len(), 3);
        let x = complex_witness_4();
        let g = gram_matrix(&x);
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert_eq!(g[i][j], C64::new(-1.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn real_witness_classifies_as_class_two_over_c() {
        let y = real_witness_3();
        let v = y.vectors();
        let tc = classify_triple(&v[0], &v[1], &v[2]).unwrap();
        assert_eq!(tc.class, TorusClass::II);
        assert_eq!(tc.maximizer_classes.len(), 2);
        assert_eq!(tc.k_signs[0], -tc.k_signs[1]);
    }

    #[test]
    fn positive_triple_is_class_one() {
        let r = |v: &[f64]| v.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>();
        let tc = classify_triple(&r(&[1.0, 0.5, 0.0]), &r(&[0.5, 1.0, 0.2]), &r(&[0.3, 0.2, 1.0])).unwrap();
        assert_eq!(tc.class, TorusClass::I);
        assert_eq!(tc.maximizer_classes.len(), 1);
        assert!(tc.maximizer_classes[0].iter().all(|z| (z - C64::new(1.0, 0.0)).norm() < 1e-12));
    }

    #[test]
    fn real_witness_is_extreme() {
        let rep = extreme_point_test(&real_witness_3(), &quick()).unwrap();
        assert_eq!(rep.verdict, ExtremeVerdict::Extreme);
        assert!(!is_orthogonal(&real_witness_3(), 1e-12));
    }

    #[test]
    fn orthogonal_tuples_are_extreme() {
        for seed in 0..3 {
            let y = random_orthogonal_tuple(3, 3, ScalarField::Complex, seed).unwrap();
            let rep = extreme_point_test(&y, &quick()).unwrap();
            assert_eq!(rep.verdict, ExtremeVerdict::Extreme, "seed {seed}");
        }
    }
}
