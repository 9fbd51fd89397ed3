//! Acceptance criteria 1–13, one PASS/FAIL line each.
//!
//! Run a subset with `cargo test --test acceptance -- 2 8`. Criterion 13 is a
//! diagnostic and never fails the run.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use multinorm::classify::{
    classify_pq_pair, classify_standard_t, classify_vs_max, classify_vs_min, EquivalenceVerdict, TrianglePoint, Verdict,
};
use multinorm::multinorms::{
    hilbert_norm, max_norm, norm, partition_local_search, partition_score, phi_estimate, pq_norm,
    standard_t_norm, MultiNormKind,
};
use multinorm::optkernel::{random_vector, restart_rng, Certification, OptimizerConfig};
use multinorm::spaces::{inner, khintchine_pair, p_norm, Exponent, ScalarField, SequenceSpace, VectorTuple};
use multinorm::torus_geometry::{
    cn_lower_bound, complex_witness_4, complex_witness_4_scaled, extreme_point_test, gram_matrix, is_orthogonal,
    max_hilbert_ratio, mu1_maximize, random_orthogonal_tuple, real_witness_3, structured_tuples, ExtremeVerdict,
};
use multinorm::weak_summing::{mu, summing_constant_with_target, OperatorMatrix, TargetNorm};
use multinorm::C64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

fn e(x: f64) -> Exponent {
    Exponent::new(x).unwrap()
}

fn space(m: usize, r: f64, field: ScalarField) -> SequenceSpace {
    SequenceSpace::new(m, e(r), field).unwrap()
}

fn field_of(rng: &mut ChaCha8Rng) -> ScalarField {
    if rng.random::<bool>() {
        ScalarField::Real
    } else {
        ScalarField::Complex
    }
}

fn random_tuple(rng: &mut ChaCha8Rng, n: usize, sp: SequenceSpace) -> VectorTuple {
    let rows = (0..n).map(|_| random_vector(rng, sp.dim, sp.field)).collect();
    VectorTuple::new(sp, rows).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn within_time(start: Instant, limit: Duration) -> (bool, String) {
    let t = start.elapsed();
    (t < limit, format!("{:.1}s of {}s", t.as_secs_f64(), limit.as_secs()))
}

// ---------------------------------------------------------------------------
// 1. Axioms on exact routes.

/// Kinds whose route is exact on the generated tuples, with a generator.
fn axiom_case(rng: &mut ChaCha8Rng, case: usize) -> (MultiNormKind, VectorTuple) {
    let n = rng.random_range(1..=3);
    let m = rng.random_range(1..=3);
    let field = field_of(rng);
    match case % 5 {
        0 => {
            let r = [1.0, 1.5, 2.0, 3.0][rng.random_range(0..4)];
            (MultiNormKind::Min, random_tuple(rng, n, space(m, r, field)))
        }
        1 => {
            let r = [1.0, 1.5, 2.0][rng.random_range(0..3)];
            let t = r * [1.0, 1.5, 2.0][rng.random_range(0..3)];
            (MultiNormKind::StandardT { t: e(t) }, random_tuple(rng, n, space(m, r, field)))
        }
        2 => (MultiNormKind::Max, random_tuple(rng, n, space(m, 1.0, field))),
        3 => {
            let n = rng.random_range(1..=2);
            (MultiNormKind::Hilbert, random_tuple(rng, n, space(m, 2.0, field)))
        }
        _ => {
            // One distinct nonzero vector, repeated and padded with zeros.
            let r = [1.5, 2.0, 3.0][rng.random_range(0..3)];
            let sp = space(m, r, field);
            let v = random_vector(rng, m, field);
            let rows = (0..n).map(|i| if i == 1 { vec![C64::new(0.0, 0.0); m] } else { v.clone() }).collect();
            let (p, q) = [(1.0, 1.0), (1.0, 2.0), (1.5, 2.0), (2.0, 3.0)][rng.random_range(0..4)];
            (MultiNormKind::PQ { p: e(p), q: e(q) }, VectorTuple::new(sp, rows).unwrap())
        }
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let cfg = OptimizerConfig::default();
    let mut rng = restart_rng(1, 0);
    let val = |k: MultiNormKind, x: &VectorTuple| {
        let est = norm(k, x, &cfg).unwrap();
        assert_eq!(est.certification, Certification::Exact, "{k} is not on an exact route for {:?}", x.vectors());
        est.value
    };
    let mut failures = Vec::new();
    for case in 0..200 {
        let (kind, x) = axiom_case(&mut rng, case);
        let rows = x.vectors().to_vec();
        let base = val(kind, &x);
        let n = rows.len();
        // (A1) permutation: every rotation and the reversal.
        let mut perms: Vec<Vec<Vec<C64>>> = (1..n).map(|s| rows[s..].iter().chain(&rows[..s]).cloned().collect()).collect();
        perms.push(rows.iter().rev().cloned().collect());
        for p in perms {
            let v = val(kind, &VectorTuple::new(x.space, p).unwrap());
            if v != base {
                failures.push(format!("A1 {kind} case {case}: {v} vs {base}"));
            }
        }
        // (A2) multipliers in the closed unit disc. The (p,q) family only
        // has an exact route for one distinct vector, so it shares one.
        let mut alpha: Vec<C64> = (0..n)
            .map(|_| {
                let z = random_vector(&mut rng, 1, x.space.field)[0];
                z / (z.norm() + rng.random::<f64>())
            })
            .collect();
        if matches!(kind, MultiNormKind::PQ { .. }) {
            alpha = vec![alpha[0]; n];
        }
        let amax = alpha.iter().map(|a| a.norm()).fold(0.0, f64::max);
        let scaled = rows.iter().zip(&alpha).map(|(v, a)| v.iter().map(|z| z * a).collect()).collect();
        let v = val(kind, &VectorTuple::new(x.space, scaled).unwrap());
        if v > amax * base + 1e-9 * base.max(1.0) {
            failures.push(format!("A2 {kind} case {case}: {v} > {amax}·{base}"));
        }
        // (A3) zero padding.
        let mut padded = rows.clone();
        padded.push(vec![C64::new(0.0, 0.0); x.m()]);
        let v = val(kind, &VectorTuple::new(x.space, padded).unwrap());
        if v != base {
            failures.push(format!("A3 {kind} case {case}: {v} vs {base}"));
        }
        // (A4) duplicating the last vector.
        let mut dup = rows.clone();
        dup.push(rows[n - 1].clone());
        let v = val(kind, &VectorTuple::new(x.space, dup).unwrap());
        if (v - base).abs() > 1e-9 * base.max(1.0) {
            failures.push(format!("A4 {kind} case {case}: {v} vs {base}"));
        }
    }
    let (fast, t) = within_time(start, Duration::from_secs(120));
    let head = failures.first().cloned().unwrap_or_default();
    Outcome::new(failures.is_empty() && fast, format!("200 tuples, {} violations {head}; {t}", failures.len()))
}

// ---------------------------------------------------------------------------
// 2. Delta-basis closed form.

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let cfg = OptimizerConfig { restarts: 32, ..Default::default() };
    let mut worst = (0.0f64, String::new());
    let mut bad = 0;
    let mut count = 0;
    for &r in &[1.0, 1.5, 2.0, 3.0] {
        for &(p, q) in &[(1.0, 1.0), (1.0, 2.0), (1.5, 2.0), (2.0, 2.0), (2.0, 3.0), (3.0, 3.0)] {
            for n in 2..=4usize {
                let x = VectorTuple::delta_basis(n, e(r), ScalarField::Real).unwrap();
                let got = pq_norm(&x, e(p), e(q), &cfg).unwrap().value;
                let alpha = (1.0 / q - (1.0 / p - 1.0 / r).max(0.0)).max(0.0);
                let want = (n as f64).powf(alpha);
                let err = rel(got, want);
                count += 1;
                if err > 1e-3 {
                    bad += 1;
                }
                if err > worst.0 {
                    worst = (err, format!("r={r} (p,q)=({p},{q}) n={n}: {got} vs {want}"));
                }
            }
        }
    }
    let (fast, t) = within_time(start, Duration::from_secs(600));
    Outcome::new(bad == 0 && fast, format!("{count} cells, {bad} outside 1e-3, worst {:.2e} at {}; {t}", worst.0, worst.1))
}

// ---------------------------------------------------------------------------
// 3. Weak summing norm of orthogonal tuples.

/// `μ_{p,n}` of an orthogonal tuple with norms `a`: the norm of the diagonal
/// map `ℓ^{p′}_n → ℓ²_n`.
fn orthogonal_oracle(a: &[f64], p: f64) -> f64 {
    if p >= 2.0 {
        return a.iter().cloned().fold(0.0, f64::max);
    }
    if p == 1.0 {
        return a.iter().map(|x| x * x).sum::<f64>().sqrt();
    }
    let pc = p / (p - 1.0);
    let s = 2.0 * pc / (pc - 2.0);
    a.iter().map(|x| x.powf(s)).sum::<f64>().powf(1.0 / s)
}

fn criterion_3() -> Outcome {
    let cfg = OptimizerConfig::default();
    let mut rng = restart_rng(3, 0);
    let ps = [1.0, 4.0 / 3.0, 2.0, 3.0];
    let (mut bad, mut worst_exact, mut worst_ascent) = (0, 0.0f64, 0.0f64);
    for i in 0..100 {
        let d = rng.random_range(2..=4);
        let n = rng.random_range(2..=d);
        let field = field_of(&mut rng);
        let x = random_orthogonal_tuple(n, d, field, 300 + i as u64).unwrap();
        let p = ps[i % 4];
        let est = mu(&x, e(p), &cfg).unwrap();
        let want = orthogonal_oracle(&x.row_norms(), p);
        if est.certification == Certification::Exact {
            let err = (est.value - want).abs();
            worst_exact = worst_exact.max(err);
            bad += (err > 1e-6) as usize;
        } else {
            let err = rel(est.value, want);
            worst_ascent = worst_ascent.max(err);
            bad += (err > 1e-4) as usize;
        }
    }
    Outcome::new(bad == 0, format!("100 tuples, {bad} failures; worst exact abs {worst_exact:.1e}, worst ascent rel {worst_ascent:.1e}"))
}

// ---------------------------------------------------------------------------
// 4, 5. Hilbert multi-norm against (2,2) and max.

fn criterion_4() -> Outcome {
    let cfg = OptimizerConfig::default();
    let mut rng = restart_rng(4, 0);
    let (mut bad, mut worst) = (0, 0.0f64);
    for _ in 0..50 {
        let d = rng.random_range(1..=3);
        let n = rng.random_range(1..=3);
        let x = random_tuple(&mut rng, n, space(d, 2.0, ScalarField::Complex));
        let h = hilbert_norm(&x, &cfg).unwrap().value;
        let pq = pq_norm(&x, Exponent::TWO, Exponent::TWO, &cfg).unwrap().value;
        let gap = rel(pq, h);
        worst = worst.max(gap);
        bad += (gap > 1e-3) as usize;
    }
    Outcome::new(bad == 0, format!("50 tuples, {bad} above 1e-3, worst gap {worst:.2e}"))
}

fn criterion_5() -> Outcome {
    let cfg = OptimizerConfig::default();
    let mut rng = restart_rng(5, 0);
    let (mut bad, mut worst) = (0, 0.0f64);
    for _ in 0..50 {
        let d = rng.random_range(1..=4);
        let x = random_tuple(&mut rng, 2, space(d, 2.0, ScalarField::Complex));
        let h = hilbert_norm(&x, &cfg).unwrap().value;
        let mx = max_norm(&x, &cfg).unwrap().value;
        let gap = rel(mx, h);
        worst = worst.max(gap);
        bad += (gap > 1e-3) as usize;
    }
    Outcome::new(bad == 0, format!("50 pairs, {bad} above 1e-3, worst gap {worst:.2e}"))
}

// ---------------------------------------------------------------------------
// 6, 7. The level-3 real witness and the complex 4-tuple.

fn criterion_6() -> Outcome {
    let cfg = OptimizerConfig::default();
    let y = real_witness_3();
    let v = y.vectors();
    // Independent sign enumeration.
    let mut enum_mu = 0.0f64;
    for s in 0..8u32 {
        let w: Vec<C64> = (0..3)
            .map(|k| (0..3).map(|i| v[i][k] * if (s >> i) & 1 == 1 { -1.0 } else { 1.0 }).sum())
            .collect();
        enum_mu = enum_mu.max(p_norm(&w, Exponent::TWO));
    }
    let lib_mu = mu1_maximize(&y, &cfg).unwrap().estimate.value;
    let mu_ok = (enum_mu - 1.0).abs() <= 1e-12 && (lib_mu - 1.0).abs() <= 1e-12;
    let g = gram_matrix(&y);
    let gram_ok = [(0, 1, 1.0), (1, 2, 1.0), (0, 2, -1.0)]
        .iter()
        .all(|&(i, j, s)| (g[i][j] - C64::new(s / 11.0, 0.0)).norm() <= 1e-15);
    let rep = extreme_point_test(&y, &cfg).unwrap();
    let extreme = rep.verdict == ExtremeVerdict::Extreme;
    let non_orth = !is_orthogonal(&y, 1e-12);
    let cn = cn_lower_bound(3, 3, ScalarField::Real, &cfg).unwrap();
    let delta = cn.ratio - 1.0;
    let pass = mu_ok && gram_ok && extreme && non_orth && delta > 1e-3;
    Outcome::new(
        pass,
        format!(
            "mu={enum_mu:.15} (lib {lib_mu:.15}), gram ±1/11 {gram_ok}, extreme {extreme}, non-orthogonal {non_orth}, \
             max3/H3 = 1 + {delta:.4e} from {}",
            cn.origin
        ),
    )
}

fn criterion_7() -> Outcome {
    let cfg = OptimizerConfig::default();
    let g = gram_matrix(&complex_witness_4());
    let gram_ok = (0..4).all(|i| (0..4).all(|j| i == j || g[i][j] == C64::new(-1.0, 0.0)));
    let y = complex_witness_4_scaled();
    let mu1 = mu1_maximize(&y, &cfg).unwrap();
    let rep = extreme_point_test(&y, &cfg).unwrap();
    let sums: Vec<f64> = mu1.classes.iter().chain(&rep.maximizers).map(|xi| xi.iter().sum::<C64>().norm()).collect();
    let worst = sums.iter().cloned().fold(0.0, f64::max);
    let max_ok = !sums.is_empty() && worst <= 1e-6 && (mu1.estimate.value - 1.0).abs() <= 1e-9;
    let null_ok = rep.nullspace_dim == 0 && rep.first_stage_blocks_equal;
    Outcome::new(
        gram_ok && max_ok && null_ok,
        format!(
            "gram −1 {gram_ok}, {} maximizers with max |Σξ| {worst:.1e}, mu {:.12}, nullspace {}, first stage dim {} equal blocks {}",
            sums.len(),
            mu1.estimate.value,
            rep.nullspace_dim,
            rep.first_stage_dim,
            rep.first_stage_blocks_equal
        ),
    )
}

// ---------------------------------------------------------------------------
// 8. The 2/√π ceiling.

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let cfg = OptimizerConfig::default();
    let ceiling = 2.0 / std::f64::consts::PI.sqrt() + 1e-3;
    let mut ratios: Vec<(usize, f64, String)> = Vec::new();
    let mut push = |n: usize, r: f64, origin: String| ratios.push((n, r, origin));
    for n in 2..=6 {
        for d in 2..=6 {
            for (name, rows) in structured_tuples(n, d, ScalarField::Complex) {
                let x = VectorTuple::new(space(d, 2.0, ScalarField::Complex), rows).unwrap();
                push(n, max_hilbert_ratio(&x, &cfg).unwrap().0, format!("{name} n={n} d={d}"));
            }
        }
    }
    for &(n, d) in &[(4, 4), (5, 3)] {
        let rep = cn_lower_bound(n, d, ScalarField::Complex, &cfg).unwrap();
        push(n, rep.ratio, format!("search n={n} d={d} ({})", rep.origin));
    }
    let mut rng = restart_rng(8, 0);
    let light = cfg.light();
    while ratios.len() < 500 {
        let n = rng.random_range(2..=6);
        let d = rng.random_range(1..=6);
        let x = random_tuple(&mut rng, n, space(d, 2.0, ScalarField::Complex));
        // The Hilbert side always gets the full configuration, so an
        // underestimate there cannot inflate the ratio.
        let mx = max_norm(&x, &light).unwrap().value;
        let h = hilbert_norm(&x, &cfg).unwrap().value;
        ratios.push((n, mx / h, format!("random n={n} d={d}")));
    }
    let top = ratios.iter().cloned().fold((0, 0.0, String::new()), |a, b| if b.1 > a.1 { b } else { a });
    let above = ratios.iter().filter(|r| r.1 > ceiling).count();
    let best4 = ratios.iter().filter(|r| r.0 >= 4).map(|r| r.1).fold(0.0, f64::max);
    let (fast, t) = within_time(start, Duration::from_secs(900));
    Outcome::new(
        above == 0 && best4 > 1.001 && fast,
        format!(
            "{} tuples, {above} above {ceiling:.4}; largest {:.6} ({}); best n≥4 ratio {best4:.6}; {t}",
            ratios.len(),
            top.1,
            top.2
        ),
    )
}

// ---------------------------------------------------------------------------
// 9. Khintchine pair duality.

fn criterion_9() -> Outcome {
    let mut rng = restart_rng(9, 0);
    let mut worst = 0.0f64;
    for n in 1..=8 {
        for k in 0..100 {
            let r = [1.0, 1.5, 2.0, 3.0, 7.0][k % 5];
            let pair = khintchine_pair(n, e(r)).unwrap();
            let field = field_of(&mut rng);
            let x = random_vector(&mut rng, n, field);
            let y = random_vector(&mut rng, n, field);
            let lhs = inner(&pair.apply_r(&x), &pair.apply_s(&y));
            let rhs = inner(&x, &y);
            worst = worst.max((lhs - rhs).norm() / (1.0 + rhs.norm()));
        }
    }
    Outcome::new(worst <= 1e-12, format!("800 pairs, worst error {worst:.1e}"))
}

// ---------------------------------------------------------------------------
// 10. Standard t-multi-norm against enumeration.

fn enumerate_oracle(x: &VectorTuple, t: f64) -> f64 {
    let (n, m) = (x.n(), x.m());
    let r = x.space.r.value();
    let mut best = 0.0f64;
    for code in 0..n.pow(m as u32) {
        let mut c = code;
        let mut blocks = vec![0.0f64; n];
        for j in 0..m {
            let i = c % n;
            c /= n;
            blocks[i] += x.vectors()[i][j].norm().powf(r);
        }
        best = best.max(blocks.iter().map(|b| b.powf(t / r)).sum::<f64>().powf(1.0 / t));
    }
    best
}

fn enumerate_exact(x: &VectorTuple, t: Exponent) -> f64 {
    let (n, m) = (x.n(), x.m());
    let mut best = 0.0f64;
    let mut a = vec![0usize; m];
    for code in 0..n.pow(m as u32) {
        let mut c = code;
        for slot in a.iter_mut() {
            *slot = c % n;
            c /= n;
        }
        best = best.max(partition_score(x, t, &a));
    }
    best
}

fn criterion_10() -> Outcome {
    let cfg = OptimizerConfig { restarts: 8, ..Default::default() };
    let mut rng = restart_rng(10, 0);
    let (mut greedy_bad, mut ls_total, mut ls_match, mut ls_exceed, mut oracle_bad) = (0, 0, 0, 0, 0);
    for k in 0..100 {
        let n = rng.random_range(1..=3);
        let m = rng.random_range(1..=6);
        let r = [1.0, 1.5, 2.0, 3.0][rng.random_range(0..4)];
        let factor = [1.0, 1.5, 2.0][k % 3];
        let t = e(r * factor);
        let field = field_of(&mut rng);
        let x = random_tuple(&mut rng, n, space(m, r, field));
        let exact = enumerate_exact(&x, t);
        if rel(exact, enumerate_oracle(&x, t.value())) > 1e-12 {
            oracle_bad += 1;
        }
        if factor == 1.0 {
            let v = standard_t_norm(&x, t, &cfg).unwrap().value;
            greedy_bad += (v != exact) as usize;
        } else {
            let greedy: Vec<usize> = (0..m)
                .map(|j| (0..n).fold(0, |b, i| if x.vectors()[i][j].norm() > x.vectors()[b][j].norm() { i } else { b }))
                .collect();
            let (v, _) = partition_local_search(&x, t, &greedy, &cfg);
            ls_total += 1;
            ls_match += (v == exact) as usize;
            ls_exceed += (v > exact) as usize;
        }
    }
    let mut delta_bad = Vec::new();
    for n in 1..=3 {
        for &r in &[1.0, 1.5, 2.0, 3.0] {
            for &f in &[1.0, 1.5, 2.0] {
                let t = r * f;
                let x = VectorTuple::delta_basis(n, e(r), ScalarField::Real).unwrap();
                let v = standard_t_norm(&x, e(t), &cfg).unwrap().value;
                if v != (n as f64).powf(1.0 / t) {
                    delta_bad.push(format!("n={n} r={r} t={t}: {v}"));
                }
            }
        }
    }
    let ls_ok = ls_exceed == 0 && ls_match as f64 >= 0.95 * ls_total as f64;
    Outcome::new(
        greedy_bad == 0 && ls_ok && delta_bad.is_empty() && oracle_bad == 0,
        format!(
            "greedy mismatches {greedy_bad}; local search {ls_match}/{ls_total} equal, {ls_exceed} above; \
             oracle disagreements {oracle_bad}; delta-basis mismatches {delta_bad:?}"
        ),
    )
}

// ---------------------------------------------------------------------------
// 11. Classifier table.

enum Query {
    Pair((f64, f64), (f64, f64)),
    Min(f64, f64),
    Max(f64, f64),
    StdT(f64, f64, f64),
}

struct Case {
    r: f64,
    query: Query,
    want: Verdict,
    /// Substring the citation must contain.
    cite: &'static str,
}

fn classifier_cases() -> Vec<Case> {
    use Query::*;
    use Verdict::*;
    let c = |r, query, want, cite| Case { r, query, want, cite };
    // Horizontal q = u_c for r = 1.5, c = 0.55: x_c = 1/(1/2 + 1/r − c) ≈ 1.6216.
    let u = 1.0 / (1.0 / 1.5 - 0.55);
    // A point of C_{0.1} with p ≤ 2 and one past the corner for r = 3.
    let (qa, qb) = (1.0 / (1.0 / 1.5 - 0.1), 1.0 / (1.0 / 2.5 - 0.1));
    vec![
        c(1.0, Pair((1.0, 2.0), (1.5, 2.0)), Equivalent, "L^1 classification"),
        c(1.0, Pair((2.0, 2.0), (1.0, 2.0)), NotEquivalent, "L^1 classification"),
        c(1.0, Pair((1.0, 2.0), (1.0, 3.0)), NotEquivalent, "n^(1/q)"),
        c(1.0, Min(1.0, 3.0), NotEquivalent, "L^1 corollary"),
        c(1.0, StdT(1.0, 3.0, 3.0), Equivalent, "(1,t)"),
        c(1.0, StdT(1.5, 3.0, 3.0), Equivalent, "(1,t)"),
        c(1.0, StdT(1.0, 2.0, 3.0), NotEquivalent, "(1,t)"),
        c(1.5, Pair((3.0, 3.0), (4.0, 4.0)), NotEquivalent, "diagonal theorem (i)"),
        c(3.0, Pair((2.0, 2.0), (3.0, 3.0)), NotEquivalent, "diagonal theorem (i)"),
        c(3.0, Max(3.0, 3.0), NotEquivalent, "diagonal theorem (ii)"),
        c(3.0, Max(1.2, 1.2), EquivalentToMax, "diagonal theorem (iii)"),
        c(2.5, Max(1.0, 1.0), EquivalentToMax, "(1,1)"),
        c(1.5, Max(1.5, 1.5), NotEquivalent, "diagonal theorem (v)"),
        c(2.0, Max(2.0, 2.0), EquivalentToMax, "diagonal theorem (vi)"),
        c(4.0, Max(2.0, 2.0), EquivalentToMax, "diagonal theorem (vi)"),
        c(1.5, Pair((1.0, 3.0), (1.0, 6.0)), Equivalent, "min-equivalence"),
        c(1.5, Pair((1.1, 1.1), (1.3, 1.3)), Equivalent, "diagonal segment p < r"),
        c(1.5, Pair((1.0, 4.0 / 3.0), (1.2, 12.0 / 7.0)), Open, "same C_c"),
        c(1.5, Pair((1.55, u), (1.6, u)), Open, "p <= x_c"),
        c(1.5, Pair((1.55, u), (1.7, u)), NotEquivalent, "outside every admissible case"),
        c(1.5, Pair((1.0, 1.5), (1.0, 2.0)), NotEquivalent, "different curves"),
        c(1.5, Pair((1.0, 4.0), (1.0, 2.0)), NotEquivalent, "minimum region"),
        c(3.0, Pair((1.0, 2.0), (1.0, 4.0)), Equivalent, "min-equivalence"),
        c(3.0, Pair((1.5, 1.5), (2.0, 2.0)), Equivalent, "diagonal segment p <= 2"),
        c(3.0, Pair((1.0, 4.0 / 3.0), (4.0 / 3.0, 2.0)), Open, "same C_c with p <= 2"),
        c(3.0, Pair((1.5, qa), (2.5, qb)), NotEquivalent, "some p > 2"),
        c(2.0, Min(1.0, 2.0), EquivalentToMin, "min-equivalence"),
        c(2.0, Min(2.0, 3.0), NotEquivalent, "min-equivalence"),
        c(2.0, Max(1.0, 3.0), NotEquivalent, "q > 2"),
        c(3.0, StdT(2.0, 3.0, 3.0), NotEquivalent, "standard-r corollary"),
        c(2.5, StdT(1.0, 5.0, 5.0), NotEquivalent, "r >= 2"),
        c(1.5, StdT(1.0, 4.0, 4.0), NotEquivalent, "t < 2r/(2-r)"),
        c(1.5, StdT(2.0, 3.0, 6.0), NotEquivalent, "1/p - 1/q < 1/2"),
        c(1.5, StdT(1.0, 6.0, 6.0), NotEquivalent, "different curves"),
        c(1.5, StdT(1.5, 6.0, 6.0), Open, "open only when"),
        c(1.5, StdT(1.55, 8.0, 8.0), Open, "open only when"),
    ]
}

fn run_case(case: &Case) -> EquivalenceVerdict {
    let pt = |(p, q): (f64, f64)| TrianglePoint::from_f64(p, q).unwrap();
    let r = e(case.r);
    match case.query {
        Query::Pair(a, b) => classify_pq_pair(pt(a), pt(b), r),
        Query::Min(p, q) => classify_vs_min(pt((p, q)), r),
        Query::Max(p, q) => classify_vs_max(pt((p, q)), r),
        Query::StdT(p, q, t) => classify_standard_t(pt((p, q)), e(t), r).unwrap(),
    }
}

fn criterion_11() -> Outcome {
    let cases = classifier_cases();
    let mut misses = Vec::new();
    for (i, case) in cases.iter().enumerate() {
        let got = run_case(case);
        if got.verdict != case.want || !got.citation.contains(case.cite) {
            misses.push(format!("#{i}: {:?} ({}) expected {:?} ({})", got.verdict, got.citation, case.want, case.cite));
        }
    }
    Outcome::new(
        cases.len() >= 25 && misses.is_empty(),
        format!("{}/{} cases match {}", cases.len() - misses.len(), cases.len(), misses.join("; ")),
    )
}

// ---------------------------------------------------------------------------
// 12. Growth of φ on ℓ².

/// Exponent `e` with `φ_n^{(p,q)}(ℓ²) = n^e`.
fn phi_oracle(p: f64, q: f64) -> f64 {
    let c = 1.0 / p - 1.0 / q;
    if c >= 0.5 {
        0.0
    } else if p >= 2.0 {
        1.0 / q
    } else {
        0.5 - c
    }
}

fn criterion_12() -> Outcome {
    let cfg = OptimizerConfig::default();
    let phi = |p: f64, q: f64, n: usize| {
        let kind = MultiNormKind::PQ { p: e(p), q: e(q) };
        phi_estimate(kind, space(n, 2.0, ScalarField::Complex), n, &cfg).unwrap().value.value
    };
    let mut bad = Vec::new();
    let mut worst_low = f64::INFINITY;
    for n in 2..=4usize {
        for &(p, q) in &[(2.0, 2.0), (1.0, 2.0), (2.0, 3.0), (1.0, 3.0)] {
            let want = (n as f64).powf(phi_oracle(p, q));
            let got = phi(p, q, n);
            worst_low = worst_low.min(got / want);
            if got < 0.95 * want || got > want * (1.0 + 1e-6) {
                bad.push(format!("n={n} ({p},{q}): {got} vs {want}"));
            }
        }
    }
    // Interpolation in q at fixed p: 1/2.5 = 0.4/2 + 0.6/3.
    let (q1, q, q2) = (2.0, 2.5, 3.0);
    let theta = (1.0 / q1 - 1.0 / q) / (1.0 / q1 - 1.0 / q2);
    let mut interp_bad = Vec::new();
    for n in 2..=4usize {
        for &p in &[1.0, 2.0] {
            let (a, b, c) = (phi(p, q1, n), phi(p, q, n), phi(p, q2, n));
            let bound = a.powf(1.0 - theta) * c.powf(theta);
            if b > bound * (1.0 + 1e-3) {
                interp_bad.push(format!("n={n} p={p}: {b} > {bound}"));
            }
        }
    }
    Outcome::new(
        bad.is_empty() && interp_bad.is_empty(),
        format!("12 cells, min estimate/n^e {worst_low:.6}; bound failures {bad:?}; interpolation failures {interp_bad:?}"),
    )
}

// ---------------------------------------------------------------------------
// 13. Diagnostic: summing-constant trend.

fn criterion_13() -> Outcome {
    let cfg = OptimizerConfig { restarts: 8, ..Default::default() };
    let mut ratios = Vec::new();
    for &n in &[2usize, 4, 8] {
        let id = OperatorMatrix::identity(n, Exponent::INFINITY, Exponent::TWO, ScalarField::Real).unwrap();
        let target = TargetNorm::Lorentz { p: 2.0, q: 1.0 };
        let p22 = summing_constant_with_target(&id, target, Exponent::TWO, Exponent::TWO, n, &cfg).unwrap().value;
        let p21 = summing_constant_with_target(&id, target, Exponent::TWO, Exponent::ONE, n, &cfg).unwrap().value;
        ratios.push((n, p22 / p21));
    }
    let monotone = ratios.windows(2).all(|w| w[1].1 >= w[0].1 - 1e-9);
    let shown: Vec<String> = ratios.iter().map(|(n, r)| format!("n={n}: {r:.6}")).collect();
    Outcome::new(monotone, format!("{}; nondecreasing {monotone}", shown.join(", ")))
}

fn main() -> ExitCode {
    let criteria: Vec<(u32, &str, bool, fn() -> Outcome)> = vec![
        (1, "axioms on exact routes", true, criterion_1),
        (2, "delta-basis closed form", true, criterion_2),
        (3, "orthogonal-tuple weak summing norm", true, criterion_3),
        (4, "Hilbert equals (2,2)", true, criterion_4),
        (5, "level-2 max equals Hilbert", true, criterion_5),
        (6, "real level-3 witness", true, criterion_6),
        (7, "complex 4-tuple witness", true, criterion_7),
        (8, "2/sqrt(pi) ceiling", true, criterion_8),
        (9, "Khintchine duality", true, criterion_9),
        (10, "standard t against enumeration", true, criterion_10),
        (11, "classifier table", true, criterion_11),
        (12, "phi growth on l2", true, criterion_12),
        (13, "summing-constant trend (diagnostic)", false, criterion_13),
    ];
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = false;
    for (id, name, gating, run) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let out = run();
        let status = match (out.pass, gating) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "WARN",
        };
        failed |= gating && !out.pass;
        println!("criterion {id:>2} {status} [{:.1}s] {name}: {}", start.elapsed().as_secs_f64(), out.detail);
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

