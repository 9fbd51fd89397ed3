//! The multi-norm families on tuples in `ℓ^r_m`: minimum, maximum, (p,q),
//! standard t and Hilbert, plus rate-of-growth estimates `φ_n`.
//!
//! Optimizer-backed norms first reduce the tuple to a canonical form: zero
//! vectors and repeated vectors are dropped and the rest sorted
//! lexicographically. These steps leave every multi-norm unchanged, so the
//! computed value is exactly invariant under permutation, zero padding and
//! duplication.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::classify::phi_exponent;
use crate::error::{Error, Result};
use crate::hilbert_dual;
use crate::optkernel::{
    enumerate_partitions, maximize_on_frames_seeded, orthonormalize, restart_rng, Certification, FrameObjective,
    NormEstimate, OptimizerConfig, Witness,
};
use crate::spaces::{
    dft_tuple, dual_vector, inner, lex_cmp, norm_gradient, p_norm, parse_real, Exponent, ScalarField, SequenceSpace,
    VectorTuple, C64,
};
use crate::weak_summing::{ratio_ascent, ratio_certification, RatioProblem};

/// Selector for a multi-norm family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum MultiNormKind {
    Min,
    Max,
    PQ { p: Exponent, q: Exponent },
    StandardT { t: Exponent },
    Hilbert,
}

impl MultiNormKind {
    pub fn validate(&self, space: &SequenceSpace) -> Result<()> {
        match *self {
            MultiNormKind::PQ { p, q } => validate_pq(p, q),
            MultiNormKind::StandardT { t } => {
                if t.is_infinite() || t.value() < space.r.value() {
                    Err(Error::InvalidArgument(format!("standard t-multi-norm needs r ≤ t < ∞ (t = {t}, r = {})", space.r)))
                } else {
                    Ok(())
                }
            }
            MultiNormKind::Hilbert if space.r != Exponent::TWO => {
                Err(Error::InvalidArgument("the Hilbert multi-norm needs r = 2".into()))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for MultiNormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MultiNormKind::Min => write!(f, "min"),
            MultiNormKind::Max => write!(f, "max"),
            MultiNormKind::PQ { p, q } => write!(f, "pq:{p},{q}"),
            MultiNormKind::StandardT { t } => write!(f, "std:{t}"),
            MultiNormKind::Hilbert => write!(f, "hilbert"),
        }
    }
}

impl FromStr for MultiNormKind {
    type Err = Error;

    /// `min`, `max`, `pq:P,Q`, `std:T` or `hilbert`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "min" => return Ok(MultiNormKind::Min),
            "max" => return Ok(MultiNormKind::Max),
            "hilbert" => return Ok(MultiNormKind::Hilbert),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("pq:") {
            let (p, q) = rest.split_once(',').ok_or_else(|| Error::Parse(format!("expected pq:P,Q, got '{s}'")))?;
            let (p, q) = (Exponent::new(parse_real(p)?)?, Exponent::new(parse_real(q)?)?);
            validate_pq(p, q)?;
            return Ok(MultiNormKind::PQ { p, q });
        }
        if let Some(rest) = s.strip_prefix("std:") {
            return Ok(MultiNormKind::StandardT { t: Exponent::new(parse_real(rest)?)? });
        }
        Err(Error::Parse(format!("unknown multi-norm kind '{s}'")))
    }
}

fn validate_pq(p: Exponent, q: Exponent) -> Result<()> {
    if q.is_infinite() || p.value() > q.value() {
        return Err(Error::InvalidArgument(format!("(p,q) must satisfy 1 ≤ p ≤ q < ∞, got ({p},{q})")));
    }
    Ok(())
}

/// Nonzero rows in lexicographic order; `order[k]` is the original index.
struct Canonical {
    order: Vec<usize>,
    tuple: VectorTuple,
}

fn canonicalize(x: &VectorTuple) -> Option<Canonical> {
    let mut order: Vec<usize> = (0..x.n()).filter(|&i| x.vectors()[i].iter().any(|z| z.norm() > 0.0)).collect();
    if order.is_empty() {
        return None;
    }
    order.sort_by(|&a, &b| lex_cmp(&x.vectors()[a], &x.vectors()[b]).then(a.cmp(&b)));
    order.dedup_by(|b, a| x.vectors()[*a] == x.vectors()[*b]);
    let rows = order.iter().map(|&i| x.vectors()[i].clone()).collect();
    let tuple = VectorTuple::new(x.space, rows).expect("rows of a valid tuple");
    Some(Canonical { order, tuple })
}

impl Canonical {
    /// Places reduced per-vector data back at the original positions.
    fn expand(&self, reduced: Vec<Vec<C64>>, n: usize, len: usize) -> Vec<Vec<C64>> {
        let mut out = vec![vec![C64::new(0.0, 0.0); len]; n];
        for (k, v) in reduced.into_iter().enumerate() {
            out[self.order[k]] = v;
        }
        out
    }
}

fn zero_tuple(n: usize, m: usize) -> Vec<Vec<C64>> {
    vec![vec![C64::new(0.0, 0.0); m]; n]
}

/// `max_i ‖x_i‖_r`.
pub fn min_norm(x: &VectorTuple) -> NormEstimate {
    let norms = x.row_norms();
    let i = (0..norms.len()).fold(0, |b, i| if norms[i] > norms[b] { i } else { b });
    NormEstimate::exact(norms[i], Witness::Assignment(vec![i]))
}

/// `n^α` when the tuple consists of unimodular multiples of distinct unit
/// vectors, else `None`.
fn delta_like_value(x: &VectorTuple, p: Exponent, q: Exponent) -> Option<f64> {
    let mut used = vec![false; x.m()];
    for v in x.vectors() {
        let nz: Vec<usize> = (0..v.len()).filter(|&j| v[j].norm() > 0.0).collect();
        if nz.len() != 1 || (v[nz[0]].norm() - 1.0).abs() > 1e-15 || used[nz[0]] {
            return None;
        }
        used[nz[0]] = true;
    }
    let alpha = crate::classify::delta_exponent(p.value(), q.value(), x.space.r.value());
    Some((x.n() as f64).powf(alpha))
}

/// The (p,q)-multi-norm
/// `sup{(Σ|⟨x_i, λ_i⟩|^q)^{1/q} : μ_{p,n}(λ) ≤ 1}`, by ratio ascent over dual
/// tuples.
pub fn pq_norm(x: &VectorTuple, p: Exponent, q: Exponent, cfg: &OptimizerConfig) -> Result<NormEstimate> {
    validate_pq(p, q)?;
    let s = x.space.r.conjugate();
    let (n, m) = (x.n(), x.m());
    let Some(canon) = canonicalize(x) else {
        return Ok(NormEstimate::exact(0.0, Witness::Tuple(zero_tuple(n, m))));
    };
    let y = &canon.tuple;
    if y.n() == 1 {
        let v = &y.vectors()[0];
        let lambda = dual_vector(v, s);
        return Ok(NormEstimate::exact(p_norm(v, x.space.r), Witness::Tuple(canon.expand(vec![lambda], n, m))));
    }
    if x.space.r == Exponent::ONE && p == Exponent::ONE && q == Exponent::ONE {
        // ℓ^1_n ⊗̂ ℓ^1_m = ℓ^1_{nm}: the maximum multi-norm is the sum of the
        // row norms, attained at sign-type dual vectors.
        let value = y.row_norms().iter().sum();
        let lambda = y.vectors().iter().map(|v| dual_vector(v, s)).collect();
        return Ok(NormEstimate::exact(value, Witness::Tuple(canon.expand(lambda, n, m))));
    }
    if x.space.r == Exponent::TWO {
        let dual = if p == Exponent::TWO {
            Some(hilbert_dual::pq2_l2(y.vectors(), q, cfg))
        } else if p == Exponent::ONE && q == Exponent::ONE {
            hilbert_dual::max_norm_l2(y.vectors(), x.space.field, cfg)?
        } else {
            None
        };
        if let Some(mut est) = dual {
            if let Witness::Tuple(lam) = est.witness {
                est.witness = Witness::Tuple(canon.expand(lam, n, m));
            }
            return Ok(est);
        }
    }
    let qv = q.value();
    let xs = y.vectors();
    let numerator = |lam: &[Vec<C64>]| -> (f64, Vec<Vec<C64>>) {
        let c: Vec<C64> = xs.iter().zip(lam).map(|(xi, li)| inner(xi, li)).collect();
        let total = c.iter().map(|z| z.norm().powf(qv)).sum::<f64>().powf(1.0 / qv);
        let grads = c
            .iter()
            .zip(xs)
            .map(|(ci, xi)| {
                let a = ci.norm();
                if a == 0.0 || total == 0.0 {
                    return vec![C64::new(0.0, 0.0); m];
                }
                let w = ci.conj() / a * (total.powf(1.0 - qv) * a.powf(qv - 1.0));
                xi.iter().map(|z| z * w).collect()
            })
            .collect();
        (total, grads)
    };
    let norming: Vec<Vec<C64>> = xs.iter().map(|v| dual_vector(v, s)).collect();
    let mut seeds = vec![norming.clone()];
    for i in 0..y.n() {
        let mut single = zero_tuple(y.n(), m);
        single[i] = norming[i].clone();
        seeds.push(single);
    }
    let prob = RatioProblem { k: y.n(), d: m, field: x.space.field, space_exp: s, p, numerator: &numerator, seeds };
    let out = ratio_ascent(&prob, cfg)?;
    let lambda: Vec<Vec<C64>> = out.tuple.iter().map(|v| v.iter().map(|z| z / out.mu.value).collect()).collect();
    let mut est = NormEstimate::lower_bound(out.value, Witness::Tuple(canon.expand(lambda, n, m)))
        .downgrade(ratio_certification(&out.mu));
    est.warnings = out.mu.warnings;
    if let Some(ub) = delta_like_value(y, p, q) {
        est = est.with_upper_bound(ub);
    }
    Ok(est)
}

/// The maximum multi-norm, computed as the (1,1)-multi-norm.
pub fn max_norm(x: &VectorTuple, cfg: &OptimizerConfig) -> Result<NormEstimate> {
    pq_norm(x, Exponent::ONE, Exponent::ONE, cfg)
}

/// The maximum multi-norm from its defining supremum
/// `sup{|Σ⟨x_i, λ_i⟩| : μ_{1,n}(λ) ≤ 1}`; an independent route to
/// [`max_norm`].
pub fn max_norm_dual_route(x: &VectorTuple, cfg: &OptimizerConfig) -> Result<NormEstimate> {
    let s = x.space.r.conjugate();
    let (n, m) = (x.n(), x.m());
    let Some(canon) = canonicalize(x) else {
        return Ok(NormEstimate::exact(0.0, Witness::Tuple(zero_tuple(n, m))));
    };
    let xs = canon.tuple.vectors();
    let numerator = |lam: &[Vec<C64>]| -> (f64, Vec<Vec<C64>>) {
        let c: C64 = xs.iter().zip(lam).map(|(xi, li)| inner(xi, li)).sum();
        let a = c.norm();
        let grads = xs
            .iter()
            .map(|xi| if a == 0.0 { vec![C64::new(0.0, 0.0); m] } else { xi.iter().map(|z| z * (c.conj() / a)).collect() })
            .collect();
        (a, grads)
    };
    let seeds = vec![xs.iter().map(|v| dual_vector(v, s)).collect()];
    let prob = RatioProblem {
        k: canon.tuple.n(),
        d: m,
        field: x.space.field,
        space_exp: s,
        p: Exponent::ONE,
        numerator: &numerator,
        seeds,
    };
    let out = ratio_ascent(&prob, cfg)?;
    let lambda: Vec<Vec<C64>> = out.tuple.iter().map(|v| v.iter().map(|z| z / out.mu.value).collect()).collect();
    let mut est = NormEstimate::lower_bound(out.value, Witness::Tuple(canon.expand(lambda, n, m)))
        .downgrade(ratio_certification(&out.mu));
    est.warnings = out.mu.warnings;
    Ok(est)
}

/// `(Σ_i ‖x_i|_{X_i}‖_r^t)^{1/t}` for the partition `X_i = {j : a_j = i}`.
pub fn partition_score(x: &VectorTuple, t: Exponent, assignment: &[usize]) -> f64 {
    let r = x.space.r.value();
    let n = x.n();
    let mut blocks = vec![0.0f64; n];
    for (j, &i) in assignment.iter().enumerate() {
        blocks[i] += x.vectors()[i][j].norm().powf(r);
    }
    let tv = t.value();
    // Summing in sorted order makes the value independent of block labels.
    let mut terms: Vec<f64> = blocks.iter().map(|b| b.powf(tv / r)).collect();
    terms.sort_by(f64::total_cmp);
    terms.iter().sum::<f64>().powf(1.0 / tv)
}

/// The standard t-multi-norm: supremum over ordered partitions of the
/// coordinates.
pub fn standard_t_norm(x: &VectorTuple, t: Exponent, cfg: &OptimizerConfig) -> Result<NormEstimate> {
    MultiNormKind::StandardT { t }.validate(&x.space)?;
    let (n, m) = (x.n(), x.m());
    let greedy: Vec<usize> = (0..m)
        .map(|j| (0..n).fold(0, |b, i| if x.vectors()[i][j].norm() > x.vectors()[b][j].norm() { i } else { b }))
        .collect();
    if (t.value() - x.space.r.value()).abs() <= 1e-12 * t.value() {
        let v = partition_score(x, t, &greedy);
        return Ok(NormEstimate::exact(v, Witness::Assignment(greedy)));
    }
    let score = |a: &[usize]| partition_score(x, t, a);
    if (n as u64).checked_pow(m as u32).is_some_and(|c| c <= cfg.brute_budget) {
        let res = enumerate_partitions(m, n, &score, cfg)?;
        return Ok(NormEstimate::exact(res.value, Witness::Assignment(res.assignment)));
    }
    let (value, assignment) = partition_local_search(x, t, &greedy, cfg);
    Ok(NormEstimate::lower_bound(value, Witness::Assignment(assignment)))
}

/// Multi-start single-coordinate reassignment search.
pub fn partition_local_search(x: &VectorTuple, t: Exponent, greedy: &[usize], cfg: &OptimizerConfig) -> (f64, Vec<usize>) {
    use rand::Rng;
    let (n, m) = (x.n(), x.m());
    let runs: Vec<(f64, Vec<usize>)> = (0..=cfg.restarts)
        .into_par_iter()
        .map(|i| {
            let mut a: Vec<usize> = if i == 0 {
                greedy.to_vec()
            } else {
                let mut rng = restart_rng(cfg.seed, i as u64);
                (0..m).map(|_| rng.random_range(0..n)).collect()
            };
            let mut f = partition_score(x, t, &a);
            loop {
                let mut best = (f, usize::MAX, 0);
                for j in 0..m {
                    let keep = a[j];
                    for b in 0..n {
                        if b == keep {
                            continue;
                        }
                        a[j] = b;
                        let g = partition_score(x, t, &a);
                        if g > best.0 {
                            best = (g, j, b);
                        }
                    }
                    a[j] = keep;
                }
                if best.1 == usize::MAX {
                    break;
                }
                a[best.1] = best.2;
                f = best.0;
            }
            (f, a)
        })
        .collect();
    runs.into_iter().fold((f64::NEG_INFINITY, Vec::new()), |b, c| if c.0 > b.0 { c } else { b })
}

struct BesselObjective<'a> {
    x: &'a [Vec<C64>],
}

impl FrameObjective for BesselObjective<'_> {
    fn value(&self, e: &[Vec<C64>]) -> f64 {
        self.x.iter().zip(e).map(|(x, v)| inner(x, v).norm_sqr()).sum::<f64>().sqrt()
    }
    fn gradient(&self, e: &[Vec<C64>]) -> Vec<Vec<C64>> {
        self.x
            .iter()
            .zip(e)
            .map(|(x, v)| {
                let c = inner(x, v).conj();
                x.iter().map(|z| z * c).collect()
            })
            .collect()
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn binomial(n: usize, k: usize) -> u64 {
    (0..k as u64).fold(1u64, |acc, i| acc.saturating_mul(n as u64 - i) / (i + 1))
}

/// The Hilbert multi-norm: the largest `(Σ|⟨x_i, e_i⟩|²)^{1/2}` over
/// orthonormal systems, with at most `min(n, d)` active vectors.
pub fn hilbert_norm(x: &VectorTuple, cfg: &OptimizerConfig) -> Result<NormEstimate> {
    MultiNormKind::Hilbert.validate(&x.space)?;
    let (n, d) = (x.n(), x.m());
    let Some(canon) = canonicalize(x) else {
        return Ok(NormEstimate::exact(0.0, Witness::Frame(zero_tuple(n, d))));
    };
    let y = canon.tuple.vectors();
    let k = y.len().min(d);
    if y.len() == 1 {
        let e = y[0].iter().map(|z| z / p_norm(&y[0], Exponent::TWO)).collect();
        let v = p_norm(&y[0], Exponent::TWO);
        return Ok(NormEstimate::exact(v, Witness::Frame(canon.expand(vec![e], n, d))));
    }
    if y.len() == 2 {
        let (value, frame) = hilbert_pair(&y[0], &y[1]);
        return Ok(NormEstimate::exact(value, Witness::Frame(canon.expand(frame, n, d))));
    }
    let basis = span_basis(y);
    let from_span = if basis.len() < d {
        let coords: Vec<Vec<C64>> = y.iter().map(|v| basis.iter().map(|b| inner(v, b)).collect()).collect();
        let space = SequenceSpace::new(basis.len(), x.space.r, x.space.field)?;
        let est = hilbert_norm(&VectorTuple::new(space, coords)?, cfg)?;
        let Witness::Frame(f) = est.witness else { unreachable!() };
        Some((est.value, f.iter().map(|c| lift(c, &basis, d)).collect::<Vec<_>>()))
    } else {
        None
    };
    let subsets: Vec<Vec<usize>> = if y.len() <= d {
        vec![(0..y.len()).collect()]
    } else if binomial(y.len(), k) <= 1000 {
        combinations(y.len(), k)
    } else {
        let norms: Vec<f64> = y.iter().map(|v| p_norm(v, Exponent::TWO)).collect();
        let mut idx: Vec<usize> = (0..y.len()).collect();
        idx.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
        idx.truncate(k);
        idx.sort();
        vec![idx]
    };
    let sub_cfg = if subsets.len() > 1 { cfg.light() } else { cfg.clone() };
    let results: Vec<Result<(f64, Vec<usize>, Vec<Vec<C64>>)>> = subsets
        .par_iter()
        .map(|sub| {
            let xs: Vec<Vec<C64>> = sub.iter().map(|&i| y[i].clone()).collect();
            let mut seeds = Vec::new();
            if let Some(f) = orthonormalize(&xs) {
                seeds.push(f);
            }
            if let (Some((_, f)), true) = (&from_span, sub.len() == y.len()) {
                seeds.push(complete_frame(f, d));
            }
            let est = maximize_on_frames_seeded(&BesselObjective { x: &xs }, d, k, x.space.field, &sub_cfg, &seeds)?;
            let Witness::Frame(f) = est.witness else { unreachable!() };
            Ok((est.value, sub.clone(), f))
        })
        .collect();
    let mut best: Option<(f64, Vec<usize>, Vec<Vec<C64>>)> = None;
    for r in results {
        let r = r?;
        if best.as_ref().is_none_or(|b| r.0 > b.0) {
            best = Some(r);
        }
    }
    let (value, sub, frame) = best.expect("at least one subset");
    let mut reduced = zero_tuple(y.len(), d);
    for (slot, e) in sub.iter().zip(frame) {
        reduced[*slot] = e;
    }
    if let Some((v, f)) = from_span {
        if v > value {
            return Ok(NormEstimate::lower_bound(v, Witness::Frame(canon.expand(f, n, d))));
        }
    }
    Ok(NormEstimate::lower_bound(value, Witness::Frame(canon.expand(reduced, n, d))))
}

/// Orthonormal basis of `span{y_i}` by Gram–Schmidt over the input vectors.
fn span_basis(y: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let mut out: Vec<Vec<C64>> = Vec::new();
    for v in y {
        let mut w = v.clone();
        for _ in 0..2 {
            for e in &out {
                let c = inner(&w, e);
                w.iter_mut().zip(e).for_each(|(wj, ej)| *wj -= c * ej);
            }
        }
        let nw = p_norm(&w, Exponent::TWO);
        if nw > 1e-10 * p_norm(v, Exponent::TWO) {
            out.push(w.iter().map(|z| z / nw).collect());
        }
    }
    out
}

fn lift(coords: &[C64], basis: &[Vec<C64>], d: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); d];
    for (c, b) in coords.iter().zip(basis) {
        v.iter_mut().zip(b).for_each(|(vj, bj)| *vj += c * bj);
    }
    v
}

/// Replaces the zero slots of a partial orthonormal frame by unit
/// coordinate directions orthogonal to everything placed so far.
fn complete_frame(frame: &[Vec<C64>], d: usize) -> Vec<Vec<C64>> {
    let mut placed: Vec<Vec<C64>> = frame.iter().filter(|v| v.iter().any(|z| z.norm() > 0.0)).cloned().collect();
    let mut next = 0;
    frame
        .iter()
        .map(|v| {
            if v.iter().any(|z| z.norm() > 0.0) {
                return v.clone();
            }
            while next < d {
                let mut w = vec![C64::new(0.0, 0.0); d];
                w[next] = C64::new(1.0, 0.0);
                next += 1;
                for _ in 0..2 {
                    for e in &placed {
                        let c = inner(&w, e);
                        w.iter_mut().zip(e).for_each(|(wj, ej)| *wj -= c * ej);
                    }
                }
                let nw = p_norm(&w, Exponent::TWO);
                if nw > 0.5 {
                    let w: Vec<C64> = w.iter().map(|z| z / nw).collect();
                    placed.push(w.clone());
                    return w;
                }
            }
            v.clone()
        })
        .collect()
}

/// Hilbert multi-norm of a pair:
/// `H² = ‖x₂‖² + λ₊(x₁x₁^* − x₂x₂^*)`, which simplifies to
/// `σ + (σ² − |⟨x₁,x₂⟩|²)^{1/2}` with `σ = (‖x₁‖² + ‖x₂‖²)/2`.
fn hilbert_pair(x1: &[C64], x2: &[C64]) -> (f64, Vec<Vec<C64>>) {
    let (g11, g22, g21) = (inner(x1, x1).re, inner(x2, x2).re, inner(x1, x2));
    let sigma = 0.5 * (g11 + g22);
    let root = (sigma * sigma - g21.norm_sqr()).max(0.0).sqrt();
    let lam = 0.5 * (g11 - g22) + root;
    // Eigenvector v of D·G with G_ij = ⟨x_j, x_i⟩, D = diag(1, −1); the
    // top eigenvector of x₁x₁^* − x₂x₂^* is v₁x₁ + v₂x₂.
    let (v1, v2) = if g21.norm() > 0.0 { (g21.conj(), C64::new(lam - g11, 0.0)) } else if g11 >= g22 {
        (C64::new(1.0, 0.0), C64::new(0.0, 0.0))
    } else {
        (C64::new(0.0, 0.0), C64::new(1.0, 0.0))
    };
    let e: Vec<C64> = x1.iter().zip(x2).map(|(a, b)| v1 * a + v2 * b).collect();
    let en = p_norm(&e, Exponent::TWO);
    let e1: Vec<C64> = e.iter().map(|z| z / en).collect();
    let c = inner(x2, &e1);
    let mut e2: Vec<C64> = x2.iter().zip(&e1).map(|(a, b)| a - c * b).collect();
    let n2 = p_norm(&e2, Exponent::TWO);
    if n2 > 0.0 {
        e2.iter_mut().for_each(|z| *z /= n2);
    } else {
        e2.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
    }
    ((sigma + root).sqrt(), vec![e1, e2])
}

/// Dispatches on the kind.
pub fn norm(kind: MultiNormKind, x: &VectorTuple, cfg: &OptimizerConfig) -> Result<NormEstimate> {
    kind.validate(&x.space)?;
    match kind {
        MultiNormKind::Min => Ok(min_norm(x)),
        MultiNormKind::Max => max_norm(x, cfg),
        MultiNormKind::PQ { p, q } => pq_norm(x, p, q, cfg),
        MultiNormKind::StandardT { t } => standard_t_norm(x, t, cfg),
        MultiNormKind::Hilbert => hilbert_norm(x, cfg),
    }
}

/// Re-evaluates the objective of `kind` at a returned witness.
pub fn evaluate_at_witness(kind: MultiNormKind, x: &VectorTuple, witness: &Witness) -> Option<f64> {
    match (kind, witness) {
        (MultiNormKind::Min, Witness::Assignment(i)) => Some(p_norm(&x.vectors()[*i.first()?], x.space.r)),
        (MultiNormKind::Max, Witness::Tuple(l)) => pq_objective(x, l, 1.0),
        (MultiNormKind::PQ { q, .. }, Witness::Tuple(l)) => pq_objective(x, l, q.value()),
        (MultiNormKind::StandardT { t }, Witness::Assignment(a)) => Some(partition_score(x, t, a)),
        (MultiNormKind::Hilbert, Witness::Frame(f)) => {
            Some(x.vectors().iter().zip(f).map(|(v, e)| inner(v, e).norm_sqr()).sum::<f64>().sqrt())
        }
        _ => None,
    }
}

fn pq_objective(x: &VectorTuple, lambda: &[Vec<C64>], q: f64) -> Option<f64> {
    if lambda.len() != x.n() {
        return None;
    }
    Some(x.vectors().iter().zip(lambda).map(|(a, b)| inner(a, b).norm().powf(q)).sum::<f64>().powf(1.0 / q))
}

/// Estimate of `φ_n` with the exponent predicted by the growth theorem.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhiEstimate {
    pub n: usize,
    pub kind: MultiNormKind,
    pub space: SequenceSpace,
    pub value: NormEstimate,
    pub predicted_exponent: f64,
}

/// Lower-bound estimate of `φ_n = sup{‖x‖_n : ‖x_i‖ = 1}`.
///
/// For (p,q)-type kinds the inner supremum over unit `x_i` is explicit
/// (`x_i` norms `λ_i`), so `φ_n = sup_λ (Σ‖λ_i‖^q)^{1/q} / μ_{p,n}(λ)` and a
/// single ratio ascent over dual tuples replaces the alternation.
pub fn phi_estimate(kind: MultiNormKind, space: SequenceSpace, n: usize, cfg: &OptimizerConfig) -> Result<PhiEstimate> {
    kind.validate(&space)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let m = space.dim;
    let unit = |j: usize| {
        let mut v = vec![C64::new(0.0, 0.0); m];
        v[j % m] = C64::new(1.0, 0.0);
        v
    };
    let (p, q) = match kind {
        MultiNormKind::Min => {
            let est = NormEstimate::exact(1.0, Witness::Tuple((0..n).map(|_| unit(0)).collect()));
            return Ok(PhiEstimate { n, kind, space, value: est, predicted_exponent: 0.0 });
        }
        MultiNormKind::StandardT { t } => {
            let x = VectorTuple::new(space, (0..n).map(unit).collect())?;
            let est = standard_t_norm(&x, t, cfg)?.with_upper_bound((n as f64).powf(t.recip()));
            return Ok(PhiEstimate { n, kind, space, value: est, predicted_exponent: t.recip() });
        }
        MultiNormKind::Max => (Exponent::ONE, Exponent::ONE),
        MultiNormKind::Hilbert => (Exponent::TWO, Exponent::TWO),
        MultiNormKind::PQ { p, q } => (p, q),
    };
    let r = space.r;
    let s = r.conjugate();
    let qv = q.value();
    let numerator = |lam: &[Vec<C64>]| -> (f64, Vec<Vec<C64>>) {
        let norms: Vec<f64> = lam.iter().map(|l| p_norm(l, s)).collect();
        let total = norms.iter().map(|a| a.powf(qv)).sum::<f64>().powf(1.0 / qv);
        let grads = lam
            .iter()
            .zip(&norms)
            .map(|(l, &a)| {
                if a == 0.0 || total == 0.0 {
                    return vec![C64::new(0.0, 0.0); m];
                }
                let c = total.powf(1.0 - qv) * a.powf(qv - 1.0);
                norm_gradient(l, s).into_iter().map(|g| g * c).collect()
            })
            .collect();
        (total, grads)
    };
    let mut seeds: Vec<Vec<Vec<C64>>> = vec![(0..n).map(unit).collect()];
    let mut single: Vec<Vec<C64>> = vec![vec![C64::new(0.0, 0.0); m]; n];
    single[0] = unit(0);
    seeds.push(single);
    if space.field == ScalarField::Complex && m >= n {
        let f = dft_tuple(n, s.max_finite(), ScalarField::Complex)?;
        seeds.push(f.vectors().iter().map(|v| v.iter().cloned().chain(std::iter::repeat(C64::new(0.0, 0.0))).take(m).collect()).collect());
    }
    let prob = RatioProblem { k: n, d: m, field: space.field, space_exp: s, p, numerator: &numerator, seeds };
    let out = ratio_ascent(&prob, cfg)?;
    let witness: Vec<Vec<C64>> = out.tuple.iter().map(|l| dual_vector(l, r)).collect();
    let predicted = phi_exponent(p, q, r);
    let mut est = NormEstimate::lower_bound(out.value, Witness::Tuple(witness)).downgrade(ratio_certification(&out.mu));
    est.warnings = out.mu.warnings;
    let mut ub = (n as f64).powf(q.recip());
    if r == Exponent::TWO {
        ub = ub.min((n as f64).powf(predicted));
    }
    est = est.with_upper_bound(ub);
    Ok(PhiEstimate { n, kind, space, value: est, predicted_exponent: predicted })
}

trait MaxFinite {
    fn max_finite(self) -> Exponent;
}

impl MaxFinite for Exponent {
    /// The DFT seed needs a finite exponent; `∞` is replaced by a large one.
    fn max_finite(self) -> Exponent {
        if self.is_infinite() {
            Exponent::new(1e6).expect("valid")
        } else {
            self
        }
    }
}

/// Certification level shared by every optimizer-backed family.
pub fn is_certified(est: &NormEstimate) -> bool {
    est.certification != Certification::Heuristic
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(x: f64) -> Exponent {
        Exponent::new(x).unwrap()
    }

    fn tuple(r: f64, rows: &[Vec<f64>]) -> VectorTuple {
        VectorTuple::from_real(SequenceSpace::new(rows[0].len(), e(r), ScalarField::Complex).unwrap(), rows).unwrap()
    }

    fn quick() -> OptimizerConfig {
        OptimizerConfig { restarts: 8, ..Default::default() }
    }

    #[test]
    fn min_examples() {
        assert_eq!(min_norm(&tuple(2.0, &[vec![3.0, 0.0], vec![0.0, 4.0]])).value, 4.0);
        assert_eq!(min_norm(&tuple(2.0, &[vec![3.0, 4.0]])).value, 5.0);
        assert_eq!(min_norm(&VectorTuple::delta_basis(3, e(1.5), ScalarField::Complex).unwrap()).value, 1.0);
    }

    #[test]
    fn pq_delta_basis_r2() {
        let x = VectorTuple::delta_basis(4, e(2.0), ScalarField::Complex).unwrap();
        let est = pq_norm(&x, e(1.0), e(1.0), &quick()).unwrap();
        assert!((est.value - 2.0).abs() < 2e-3, "{}", est.value);
        let est = pq_norm(&x, e(1.0), e(2.0), &quick()).unwrap();
        assert!((est.value - 1.0).abs() < 1e-3, "{}", est.value);
    }

    #[test]
    fn pq_single_vector_is_its_norm() {
        let x = tuple(3.0, &[vec![1.0, -2.0, 0.5]]);
        let est = pq_norm(&x, e(1.5), e(2.0), &quick()).unwrap();
        assert_eq!(est.certification, Certification::Exact);
        assert!((est.value - p_norm(&x.vectors()[0], e(3.0))).abs() < 1e-15);
        assert!(pq_norm(&x, e(3.0), e(2.0), &quick()).is_err());
    }

    #[test]
    fn max_norm_examples() {
        let x = VectorTuple::delta_basis(3, e(1.0), ScalarField::Complex).unwrap();
        assert!((max_norm(&x, &quick()).unwrap().value - 3.0).abs() < 1e-9);
        let x = tuple(2.0, &[vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!((max_norm(&x, &quick()).unwrap().value - 2f64.sqrt()).abs() < 1e-6);
        assert!((max_norm_dual_route(&x, &quick()).unwrap().value - 2f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn standard_t_examples() {
        let cfg = quick();
        let x = VectorTuple::delta_basis(3, e(2.0), ScalarField::Complex).unwrap();
        let est = standard_t_norm(&x, e(3.0), &cfg).unwrap();
        assert!((est.value - 3f64.powf(1.0 / 3.0)).abs() < 1e-15);
        let single = tuple(2.0, &[vec![3.0, 4.0]]);
        assert!((standard_t_norm(&single, e(5.0), &cfg).unwrap().value - 5.0).abs() < 1e-12);
        assert!(standard_t_norm(&single, e(1.5), &cfg).is_err());
    }

    #[test]
    fn hilbert_examples() {
        let cfg = quick();
        let x = tuple(2.0, &[vec![3.0, 0.0, 0.0], vec![0.0, 4.0, 0.0]]);
        assert!((hilbert_norm(&x, &cfg).unwrap().value - 5.0).abs() < 1e-10);
        let x = tuple(2.0, &[vec![0.6, 0.8], vec![0.6, 0.8]]);
        assert!((hilbert_norm(&x, &cfg).unwrap().value - 1.0).abs() < 1e-10);
        assert!(hilbert_norm(&tuple(3.0, &[vec![1.0]]), &cfg).is_err());
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("min".parse::<MultiNormKind>().unwrap(), MultiNormKind::Min);
        assert_eq!("pq:1,4/3".parse::<MultiNormKind>().unwrap(), MultiNormKind::PQ { p: e(1.0), q: e(4.0 / 3.0) });
        assert_eq!("std:3".parse::<MultiNormKind>().unwrap(), MultiNormKind::StandardT { t: e(3.0) });
        assert!("pq:3,2".parse::<MultiNormKind>().is_err());
        assert!("foo".parse::<MultiNormKind>().is_err());
    }

    #[test]
    fn phi_min_and_pq22() {
        let space = SequenceSpace::new(3, e(2.0), ScalarField::Complex).unwrap();
        assert_eq!(phi_estimate(MultiNormKind::Min, space, 3, &quick()).unwrap().value.value, 1.0);
        let phi = phi_estimate(MultiNormKind::PQ { p: e(2.0), q: e(2.0) }, space, 3, &quick()).unwrap();
        assert!((phi.value.value - 3f64.sqrt()).abs() < 1e-3 * 3f64.sqrt());
        assert_eq!(phi.predicted_exponent, 0.5);
    }
}
