//! Dual routes for (p,q)-multi-norms on `ℓ²`.
//!
//! With `X` the `n × d` matrix of the tuple and `G = XX^*`:
//! - the maximum multi-norm satisfies `‖x‖² = min tr(P⁻¹G)` over the convex
//!   hull `K_n` of the matrices `ηη^*`, `η` unimodular (signs over ℝ);
//! - the `(2,q)`-multi-norm is `sup ‖diag(β)X‖_{S₁}` over `β ≥ 0` in the unit
//!   ball of `ℓ^{q′}`.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::optkernel::{
    gauge, maximize_on_torus, phase_distance, phases_from_angles, restart_rng, torus_ascent, Certification, NormEstimate, OptimizerConfig, TorusObjective,
    Witness,
};
use crate::spaces::{inner, Exponent, ScalarField, C64};

fn matrix(rows: &[Vec<C64>]) -> DMatrix<C64> {
    DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
}

fn rows_of(m: &DMatrix<C64>) -> Vec<Vec<C64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

/// `η ↦ (η^* W η)^{1/2}` for Hermitian positive semidefinite `W`.
struct QuadraticForm<'a>(&'a DMatrix<C64>);

impl QuadraticForm<'_> {
    fn apply(&self, xi: &[C64]) -> Vec<C64> {
        let n = xi.len();
        (0..n).map(|i| (0..n).map(|j| self.0[(i, j)] * xi[j]).sum()).collect()
    }
    fn form(&self, xi: &[C64]) -> f64 {
        let w = self.apply(xi);
        xi.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum::<f64>().max(0.0)
    }
}

impl TorusObjective for QuadraticForm<'_> {
    fn value(&self, xi: &[C64]) -> f64 {
        self.form(xi).sqrt()
    }
    fn angle_gradient(&self, xi: &[C64]) -> Vec<f64> {
        let w = self.apply(xi);
        let f = xi.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum::<f64>().max(0.0).sqrt();
        if f == 0.0 {
            return vec![0.0; xi.len()];
        }
        xi.iter().zip(&w).map(|(a, b)| (a.conj() * b).im / f).collect()
    }
}

/// `(tr(P⁻¹G), P⁻¹)`, or `None` when `P` is not positive definite.
fn objective(atoms: &[Vec<C64>], theta: &[f64], g: &DMatrix<C64>) -> Option<(f64, DMatrix<C64>)> {
    let n = g.nrows();
    let mut p = DMatrix::<C64>::zeros(n, n);
    for (eta, &t) in atoms.iter().zip(theta) {
        if t > 0.0 {
            for i in 0..n {
                for j in 0..n {
                    p[(i, j)] += eta[i] * eta[j].conj() * t;
                }
            }
        }
    }
    let chol = p.cholesky()?;
    let pinv = chol.inverse();
    let f = (&pinv * g).trace().re;
    f.is_finite().then_some((f, pinv))
}

fn initial_atoms(n: usize, field: ScalarField) -> Vec<Vec<C64>> {
    match field {
        ScalarField::Complex => (0..n)
            .map(|k| (0..n).map(|j| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64)).collect())
            .collect(),
        ScalarField::Real => (0..1u64 << (n - 1))
            .map(|mask| (0..n).map(|j| C64::new(if j + 1 < n && (mask >> j) & 1 == 1 { -1.0 } else { 1.0 }, 0.0)).collect())
            .collect(),
    }
}

/// Largest index set on which the real route starts from all sign vectors.
const REAL_ATOM_LIMIT: usize = 12;

/// Relative duality gap `(s − f)/f` at which Frank–Wolfe stops.
const GAP_TOL: f64 = 1e-8;

/// Cap on Frank–Wolfe oracle rounds.
const FW_ROUNDS: usize = 40;

/// Line search along `θ + γ·dir` for `γ ∈ [0, cap]`; applies the best step.
fn line_step(atoms: &[Vec<C64>], theta: &mut [f64], dir: &[f64], cap: f64, g: &DMatrix<C64>, f0: f64) -> f64 {
    let at = |gamma: f64| theta.iter().zip(dir).map(|(t, d)| (t + gamma * d).max(0.0)).collect::<Vec<f64>>();
    let eval = |gamma: f64| objective(atoms, &at(gamma), g).map_or(f64::INFINITY, |(f, _)| f);
    let (mut lo, mut hi) = (0.0, cap);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (hi - phi * (hi - lo), lo + phi * (hi - lo));
    let (mut fa, mut fb) = (eval(a), eval(b));
    for _ in 0..60 {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - phi * (hi - lo);
            fa = eval(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + phi * (hi - lo);
            fb = eval(b);
        }
    }
    let cands = [(0.0, f0), (cap, eval(cap)), (a, fa), (b, fb)];
    let (gamma, f) = cands.iter().cloned().fold((0.0, f0), |best, c| if c.1 < best.1 { c } else { best });
    let next = at(gamma);
    theta.copy_from_slice(&next);
    f
}

/// Maximum multi-norm on `ℓ²` by fully corrective Frank–Wolfe over `K_n`.
///
/// The value is `Σ|⟨x_i, λ_i⟩|` at the dual tuple `λ ∝ P⁻¹X`; every
/// iterate also gives the upper bound `tr(P⁻¹G)^{1/2}`.
pub(crate) fn max_norm_l2(rows: &[Vec<C64>], field: ScalarField, cfg: &OptimizerConfig) -> Result<Option<NormEstimate>> {
    let n = rows.len();
    if field == ScalarField::Real && n > REAL_ATOM_LIMIT {
        return Ok(None);
    }
    let x = matrix(rows);
    let g = &x * x.adjoint();
    let mut atoms = initial_atoms(n, field);
    let mut theta = vec![1.0 / atoms.len() as f64; atoms.len()];
    let Some((mut f, mut pinv)) = objective(&atoms, &theta, &g) else {
        return Err(Error::Numerical("initial Frank–Wolfe point is singular".into()));
    };
    let oracle_cfg = cfg.light();
    let score = |w: &DMatrix<C64>, eta: &[C64]| QuadraticForm(w).form(eta);
    for _ in 0..cfg.max_iter.min(FW_ROUNDS) {
        // Fully corrective phase on the current atoms.
        for _ in 0..100 {
            let w = &pinv * &g * &pinv;
            let s: Vec<f64> = atoms.iter().map(|a| score(&w, a)).collect();
            let to = (0..s.len()).fold(0, |b, k| if s[k] > s[b] { k } else { b });
            let from = (0..s.len()).filter(|&k| theta[k] > 0.0).fold(None, |b: Option<usize>, k| match b {
                Some(j) if s[j] <= s[k] => Some(j),
                _ => Some(k),
            });
            let Some(from) = from else { break };
            if s[to] - s[from] <= 1e-13 * f || from == to {
                break;
            }
            let mut dir = vec![0.0; atoms.len()];
            dir[from] = -1.0;
            dir[to] = 1.0;
            let cap = theta[from];
            let mut fnew = line_step(&atoms, &mut theta, &dir, cap, &g, f);
            if fnew >= f * (1.0 - 1e-12) && s[to] > f {
                // Pairwise move too small: plain step toward the best atom.
                let dir: Vec<f64> = (0..atoms.len()).map(|k| f64::from(k == to) - theta[k]).collect();
                fnew = fnew.min(line_step(&atoms, &mut theta, &dir, 1.0, &g, fnew));
            }
            if fnew >= f {
                break;
            }
            f = fnew;
            pinv = objective(&atoms, &theta, &g).expect("accepted step is feasible").1;
        }
        theta.iter_mut().for_each(|t| {
            if *t < 1e-16 {
                *t = 0.0
            }
        });
        // Oracle: local ascent from the active atoms, then a global search
        // confirmed at full effort before stopping.
        let w = &pinv * &g * &pinv;
        let qf = QuadraticForm(&w);
        let violates = |eta: &[C64], known: &[Vec<C64>]| {
            score(&w, eta) > f * (1.0 + GAP_TOL) && known.iter().all(|a| phase_distance(&gauge(a), &gauge(eta)) > 1e-6)
        };
        let mut found: Vec<Vec<C64>> = Vec::new();
        if field == ScalarField::Complex {
            let mut local: Vec<(f64, Vec<C64>)> = (0..atoms.len())
                .into_par_iter()
                .filter(|&k| theta[k] > 0.0)
                .filter_map(|k| {
                    let a = gauge(&atoms[k]);
                    let start: Vec<f64> = a[..n - 1].iter().map(|z| z.arg()).collect();
                    let (v, t) = torus_ascent(&qf, &start, &oracle_cfg).ok()?;
                    Some((v, phases_from_angles(&t)))
                })
                .collect();
            local.sort_by(|a, b| b.0.total_cmp(&a.0));
            for (_, eta) in local {
                if found.len() < 4 && violates(&eta, &atoms) && violates(&eta, &found) {
                    found.push(eta);
                }
            }
        }
        if found.is_empty() {
            for ocfg in [&oracle_cfg, cfg] {
                let res = maximize_on_torus(&qf, n, field, ocfg)?;
                let Witness::Phases(eta) = res.estimate.witness else { unreachable!() };
                if violates(&eta, &atoms) {
                    found.push(eta);
                    break;
                }
            }
        }
        if found.is_empty() {
            break;
        }
        // Drop unused atoms to keep the corrective phase cheap.
        let keep: Vec<usize> = (0..atoms.len()).filter(|&k| theta[k] > 0.0).collect();
        atoms = keep.iter().map(|&k| atoms[k].clone()).collect();
        theta = keep.iter().map(|&k| theta[k]).collect();
        theta.extend(found.iter().map(|_| 0.0));
        atoms.extend(found);
    }
    // Dual tuple λ = P⁻¹X scaled to μ_{1,n}(λ) = 1.
    let lam = &pinv * &x;
    let w = &lam * lam.adjoint();
    let mu = maximize_on_torus(&QuadraticForm(&w), n, field, cfg)?;
    let lam_rows: Vec<Vec<C64>> = rows_of(&lam).into_iter().map(|r| r.into_iter().map(|z| z / mu.estimate.value).collect()).collect();
    let value: f64 = rows.iter().zip(&lam_rows).map(|(a, b)| inner(a, b).norm()).sum();
    let upper = f.sqrt();
    let cert = if mu.estimate.certification == Certification::Exact {
        Certification::CertifiedLowerBound
    } else {
        Certification::Heuristic
    };
    let mut est = NormEstimate::lower_bound(value, Witness::Tuple(lam_rows)).downgrade(cert).with_upper_bound(upper);
    if value > upper * (1.0 + 1e-9) {
        est.warnings.push(format!("dual value {value} exceeds the primal bound {upper}; μ is likely underestimated"));
    }
    Ok(Some(est))
}

fn nuclear(m: &DMatrix<C64>) -> (f64, DMatrix<C64>) {
    let svd = m.clone().svd(true, true);
    let (u, vt) = (svd.u.expect("requested U"), svd.v_t.expect("requested V^*"));
    (svd.singular_values.sum(), u * vt)
}

/// The `(2,q)`-multi-norm on `ℓ²` by monotone power iteration in `β`:
/// `β_i ∝ (Re⟨x_i, w_i⟩)^{1/(q′−1)}` with `W` the polar factor of
/// `diag(β)X`. The witness is `W` itself, so `μ_{2,n}(λ) ≤ 1`.
pub(crate) fn pq2_l2(rows: &[Vec<C64>], q: Exponent, cfg: &OptimizerConfig) -> NormEstimate {
    let n = rows.len();
    let x = matrix(rows);
    let qc = q.conjugate();
    let eval = |beta: &[f64]| {
        let m = DMatrix::from_fn(n, x.ncols(), |i, j| x[(i, j)] * beta[i]);
        nuclear(&m)
    };
    let normalize = |b: &mut Vec<f64>| {
        let s = b.iter().map(|v| v.powf(qc.value())).sum::<f64>().powf(1.0 / qc.value());
        if s > 0.0 {
            b.iter_mut().for_each(|v| *v /= s);
        }
    };
    let mut starts: Vec<Vec<f64>> = vec![vec![1.0; n], rows.iter().map(|r| inner(r, r).re.sqrt()).collect()];
    for i in 0..cfg.restarts.min(16) {
        let mut rng = restart_rng(cfg.seed ^ 0xb37a, i as u64);
        starts.push((0..n).map(|_| rand::Rng::random::<f64>(&mut rng) + 1e-3).collect());
    }
    let mut best: Option<(f64, DMatrix<C64>)> = None;
    for mut beta in starts {
        normalize(&mut beta);
        let (mut f, mut w) = eval(&beta);
        for _ in 0..cfg.max_iter {
            let grad: Vec<f64> = (0..n)
                .map(|i| (0..x.ncols()).map(|j| (x[(i, j)] * w[(i, j)].conj()).re).sum::<f64>().max(0.0))
                .collect();
            let mut next: Vec<f64> = grad.iter().map(|g| g.powf(1.0 / (qc.value() - 1.0))).collect();
            normalize(&mut next);
            if next.iter().all(|v| *v == 0.0) {
                break;
            }
            let (fn_, wn) = eval(&next);
            let converged = fn_ <= f * (1.0 + 1e-15);
            if fn_ > f {
                (f, w) = (fn_, wn);
            }
            if converged {
                break;
            }
        }
        // The witness value is at least f by Hölder.
        let value = (0..n)
            .map(|i| inner(&rows[i], &(0..x.ncols()).map(|j| w[(i, j)]).collect::<Vec<_>>()).norm().powf(q.value()))
            .sum::<f64>()
            .powf(1.0 / q.value());
        if best.as_ref().is_none_or(|b| value > b.0) {
            best = Some((value, w));
        }
    }
    let (value, w) = best.expect("at least one start");
    NormEstimate::lower_bound(value, Witness::Tuple(rows_of(&w)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn orthonormal_pair_max_is_sqrt_two() {
        let rows = vec![vec![c(1.0), c(0.0)], vec![c(0.0), c(1.0)]];
        for field in [ScalarField::Real, ScalarField::Complex] {
            let est = max_norm_l2(&rows, field, &OptimizerConfig::default()).unwrap().unwrap();
            assert!((est.value - 2f64.sqrt()).abs() < 1e-9, "{}", est.value);
            assert!(est.upper_bound.unwrap() >= est.value - 1e-12);
        }
    }

    #[test]
    fn parallel_vectors_give_largest_norm() {
        let rows = vec![vec![c(1.0), c(0.0)], vec![c(2.0), c(0.0)]];
        let est = max_norm_l2(&rows, ScalarField::Complex, &OptimizerConfig::default()).unwrap().unwrap();
        assert!((est.value - 2.0).abs() < 1e-6, "{}", est.value);
        assert!(est.upper_bound.unwrap() <= 2.0 + 1e-6, "{:?}", est.upper_bound);
    }

    #[test]
    fn pq2_on_orthonormal_basis_is_root_n() {
        let rows = vec![vec![c(1.0), c(0.0), c(0.0)], vec![c(0.0), c(1.0), c(0.0)], vec![c(0.0), c(0.0), c(1.0)]];
        let est = pq2_l2(&rows, Exponent::TWO, &OptimizerConfig::default());
        assert!((est.value - 3f64.sqrt()).abs() < 1e-12);
        let est = pq2_l2(&rows, Exponent::new(3.0).unwrap(), &OptimizerConfig::default());
        assert!((est.value - 3f64.powf(1.0 / 3.0)).abs() < 1e-12);
    }
}
