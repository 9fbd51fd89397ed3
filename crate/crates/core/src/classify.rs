//! Symbolic equivalence verdicts for multi-norms on `L^r` spaces.
//!
//! Points of the triangle `𝒯 = {(p,q) : 1 ≤ p ≤ q < ∞}` are grouped into
//! the curves `C_c = {1/p − 1/q = c}` and their `r`-dependent
//! modifications `D_c`. Boundary comparisons use an absolute tolerance of
//! `1e-12` on reciprocals.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spaces::Exponent;

const TOL: f64 = 1e-12;

fn ge(a: f64, b: f64) -> bool {
    a >= b - TOL
}

fn eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOL
}

/// A point `(p,q)` with `1 ≤ p ≤ q < ∞`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrianglePoint {
    pub p: Exponent,
    pub q: Exponent,
}

impl TrianglePoint {
    pub fn new(p: Exponent, q: Exponent) -> Result<Self> {
        if q.is_infinite() || p.value() > q.value() {
            return Err(Error::InvalidArgument(format!("({p},{q}) is not in the triangle 1 ≤ p ≤ q < ∞")));
        }
        Ok(TrianglePoint { p, q })
    }

    pub fn from_f64(p: f64, q: f64) -> Result<Self> {
        Self::new(Exponent::new(p)?, Exponent::new(q)?)
    }

    /// `1/p − 1/q`.
    pub fn c(&self) -> f64 {
        (self.p.recip() - self.q.recip()).max(0.0)
    }

    fn is_diagonal(&self) -> bool {
        eq(self.p.recip(), self.q.recip())
    }
}

/// Parameters of the curve family through a point for a fixed `r`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveParams {
    pub r: Exponent,
    /// Index of the curve `C_c` through the point.
    pub c: f64,
    pub r_bar: f64,
    pub u_c: Option<f64>,
    pub v_c: Option<f64>,
    pub w_c: Option<f64>,
    pub x_c: Option<f64>,
    /// Index of the curve `D_{c'}` containing the point.
    pub d_index: f64,
}

fn r_bar(r: Exponent) -> f64 {
    r.value().min(2.0)
}

/// `D_c` curve parameters for index `c` on `ℓ^r`.
fn params_for(c: f64, r: Exponent) -> (Option<f64>, Option<f64>, Option<f64>, Option<f64>) {
    let ir = r.recip();
    let u = (c < ir - TOL).then(|| 1.0 / (ir - c));
    let (v, w) = if r.value() > 2.0 && ge(c, ir) && c < 0.5 - TOL {
        let v = 2.0 / (1.0 - 2.0 * c);
        // Abscissa where q = v_c meets C_{1/r}.
        (Some(v), Some(1.0 / (ir + 1.0 / v)))
    } else {
        (None, None)
    };
    // Abscissa where q = u_c meets C_{1/2}; c = 1/2 gives p = r.
    let x = (r.value() < 2.0 && ge(c, 0.5) && c < ir - TOL).then(|| 1.0 / (0.5 + ir - c));
    (u, v, w, x)
}

/// Index `c'` of the curve `D_{c'}` that contains the point.
fn d_curve_index(pt: TrianglePoint, r: Exponent) -> f64 {
    let c = pt.c();
    let (p, iq, ir) = (pt.p.value(), pt.q.recip(), r.recip());
    if ge(c, 1.0 / r_bar(r)) {
        return c;
    }
    if r.value() <= 2.0 {
        return if p <= r.value() + TOL { c } else { ir - iq };
    }
    if p <= 2.0 + TOL || (p <= r.value() + TOL && c < ir - TOL) {
        c
    } else if p <= r.value() + TOL {
        0.5 - iq
    } else {
        ir - iq
    }
}

pub fn curve_params(point: TrianglePoint, r: Exponent) -> CurveParams {
    let c = point.c();
    let (u_c, v_c, w_c, x_c) = params_for(c, r);
    CurveParams { r, c, r_bar: r_bar(r), u_c, v_c, w_c, x_c, d_index: d_curve_index(point, r) }
}

/// Growth exponent `e` with `φ_n^{(p,q)}(L^r) ~ n^e`.
pub fn phi_exponent(p: Exponent, q: Exponent, r: Exponent) -> f64 {
    if r == Exponent::ONE {
        return q.recip();
    }
    let rb = r_bar(r);
    let c = p.recip() - q.recip();
    if ge(c, 1.0 / rb) {
        0.0
    } else if p.value() >= rb - TOL {
        q.recip()
    } else {
        1.0 / rb - p.recip() + q.recip()
    }
}

/// Exponent `α = (1/q − (1/p − 1/r)⁺)⁺` of the `(p,q)`-norm of the
/// `δ`-basis tuple in `ℓ^r`.
pub fn delta_exponent(p: f64, q: f64, r: f64) -> f64 {
    (1.0 / q - (1.0 / p - 1.0 / r).max(0.0)).max(0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Equivalent,
    NotEquivalent,
    EquivalentToMin,
    EquivalentToMax,
    Open,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceVerdict {
    pub verdict: Verdict,
    pub citation: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn verdict(v: Verdict, citation: &str) -> EquivalenceVerdict {
    EquivalenceVerdict { verdict: v, citation: citation.into(), note: None }
}

fn with_note(v: Verdict, citation: &str, note: &str) -> EquivalenceVerdict {
    EquivalenceVerdict { verdict: v, citation: citation.into(), note: Some(note.into()) }
}

const CITE_EQUAL_POINTS: &str = "identical points define the same multi-norm";
const CITE_L1_SAME_Q: &str = "L^1 classification: (p1,q) and (p2,q) are equivalent when p1, p2 < q";
const CITE_L1_DIAG: &str = "L^1 classification: (q,q) is not equivalent to (p,q) for p < q";
const CITE_L1_DIFF_Q: &str = "L^1 classification: the delta-basis growth n^(1/q) separates different q";
const CITE_MIN_REGION: &str = "min-equivalence theorem: (p,q) is equivalent to the minimum multi-norm when 1/p - 1/q >= 1/rbar";
const CITE_CROSS_REGION: &str = "exactly one point lies in the minimum region 1/p - 1/q >= 1/rbar";
const CITE_DIFF_CURVE: &str = "points on different curves D_c have different growth sequences";
const CITE_R_LT2_DIAG: &str = "r < 2 classification: the diagonal segment p < r is equivalent to the maximum multi-norm";
const CITE_R_LT2_CC: &str = "r < 2 classification: both points on the same C_c with p <= r";
const CITE_R_LT2_HORIZ: &str = "r < 2 classification: same D_c with 1/p - 1/q >= 1/2 and p <= x_c";
const CITE_R_LT2_NOT: &str = "r < 2 classification: same D_c but outside every admissible case";
const CITE_R_GE2_DIAG: &str = "r >= 2 classification: the diagonal segment p <= 2 is equivalent to the maximum multi-norm";
const CITE_R_GE2_CC: &str = "r >= 2 classification: both points on the same C_c with p <= 2";
const CITE_R_GE2_NOT: &str = "r >= 2 classification: same D_c but some p > 2";
const NOTE_FORWARD: &str = "equivalence is announced in follow-up work; not established here";
const NOTE_UNRESOLVED: &str = "explicitly unresolved: the Hilbert-space ideals agree, which is only necessary";

/// Whether the `(p1,q1)`- and `(p2,q2)`-multi-norms are equivalent on an
/// infinite-dimensional `L^r`.
pub fn classify_pq_pair(a: TrianglePoint, b: TrianglePoint, r: Exponent) -> EquivalenceVerdict {
    if eq(a.p.recip(), b.p.recip()) && eq(a.q.recip(), b.q.recip()) {
        return verdict(Verdict::Equivalent, CITE_EQUAL_POINTS);
    }
    if r == Exponent::ONE {
        if !eq(a.q.recip(), b.q.recip()) {
            return verdict(Verdict::NotEquivalent, CITE_L1_DIFF_Q);
        }
        if a.is_diagonal() || b.is_diagonal() {
            return verdict(Verdict::NotEquivalent, CITE_L1_DIAG);
        }
        return verdict(Verdict::Equivalent, CITE_L1_SAME_Q);
    }
    let rb = r_bar(r);
    if a.is_diagonal() && b.is_diagonal() && ge(a.p.value(), rb) && ge(b.p.value(), rb) {
        return verdict(Verdict::NotEquivalent, "diagonal theorem (i): distinct (p,p) and (q,q) with p, q >= rbar are not equivalent");
    }
    let (ina, inb) = (ge(a.c(), 1.0 / rb), ge(b.c(), 1.0 / rb));
    match (ina, inb) {
        (true, true) if r == Exponent::TWO => {
            return with_note(Verdict::Equivalent, CITE_MIN_REGION, "on L^2 both are equal to the minimum multi-norm")
        }
        (true, true) => return verdict(Verdict::Equivalent, CITE_MIN_REGION),
        (true, false) | (false, true) => return verdict(Verdict::NotEquivalent, CITE_CROSS_REGION),
        _ => {}
    }
    let (da, db) = (d_curve_index(a, r), d_curve_index(b, r));
    if !eq(da, db) {
        return verdict(Verdict::NotEquivalent, CITE_DIFF_CURVE);
    }
    let c = da;
    let (pa, pb, rv) = (a.p.value(), b.p.value(), r.value());
    if rv < 2.0 {
        if eq(c, 0.0) {
            return if pa < rv - TOL && pb < rv - TOL {
                verdict(Verdict::Equivalent, CITE_R_LT2_DIAG)
            } else {
                verdict(Verdict::NotEquivalent, CITE_R_LT2_NOT)
            };
        }
        if pa <= rv + TOL && pb <= rv + TOL {
            return with_note(Verdict::Open, CITE_R_LT2_CC, NOTE_FORWARD);
        }
        if let (true, Some(x)) = (ge(c, 0.5), params_for(c, r).3) {
            if pa <= x + TOL && pb <= x + TOL {
                return with_note(Verdict::Open, CITE_R_LT2_HORIZ, NOTE_UNRESOLVED);
            }
        }
        return verdict(Verdict::NotEquivalent, CITE_R_LT2_NOT);
    }
    if pa <= 2.0 + TOL && pb <= 2.0 + TOL {
        if eq(c, 0.0) {
            return verdict(Verdict::Equivalent, CITE_R_GE2_DIAG);
        }
        return with_note(Verdict::Open, CITE_R_GE2_CC, NOTE_FORWARD);
    }
    verdict(Verdict::NotEquivalent, CITE_R_GE2_NOT)
}

/// Comparison with the minimum multi-norm.
pub fn classify_vs_min(pt: TrianglePoint, r: Exponent) -> EquivalenceVerdict {
    if r == Exponent::ONE {
        return verdict(Verdict::NotEquivalent, "L^1 corollary: no (p,q)-multi-norm is equivalent to the minimum multi-norm");
    }
    if ge(pt.c(), 1.0 / r_bar(r)) {
        if r == Exponent::TWO {
            return with_note(Verdict::EquivalentToMin, CITE_MIN_REGION, "on L^2 the two multi-norms are equal");
        }
        return verdict(Verdict::EquivalentToMin, CITE_MIN_REGION);
    }
    verdict(Verdict::NotEquivalent, "min-equivalence theorem: the growth exponent is positive when 1/p - 1/q < 1/rbar")
}

/// Comparison with the maximum multi-norm.
pub fn classify_vs_max(pt: TrianglePoint, r: Exponent) -> EquivalenceVerdict {
    let (p, q) = (pt.p.value(), pt.q.value());
    if eq(pt.p.recip(), 1.0) && eq(pt.q.recip(), 1.0) {
        return with_note(Verdict::EquivalentToMax, "maximum theorem: the (1,1)-multi-norm is the maximum multi-norm", "equal");
    }
    if r == Exponent::ONE {
        return verdict(Verdict::NotEquivalent, "L^1 classification: growth n^(1/q) is slower than n for q > 1");
    }
    let rb = r_bar(r);
    if pt.is_diagonal() {
        if p < rb - TOL {
            return verdict(Verdict::EquivalentToMax, "diagonal theorem (iii): (p,p) is equivalent to max for p < rbar");
        }
        if p > rb + TOL {
            return verdict(Verdict::NotEquivalent, "diagonal theorem (ii): (p,p) is not equivalent to max for p > rbar");
        }
        if r.value() < 2.0 {
            return verdict(Verdict::NotEquivalent, "diagonal theorem (v): (r,r) is not equivalent to max when 1 < r < 2");
        }
        return verdict(Verdict::EquivalentToMax, "diagonal theorem (vi): (2,2) is equivalent to max when r >= 2");
    }
    if q > 2.0 + TOL {
        return verdict(Verdict::NotEquivalent, "max corollary: not equivalent to the maximum multi-norm whenever q > 2");
    }
    verdict(Verdict::NotEquivalent, "growth theorem: the growth exponent for p < q is below that of the maximum multi-norm")
}

/// Comparison of `(p,q)` with the standard t-multi-norm.
pub fn classify_standard_t(pt: TrianglePoint, t: Exponent, r: Exponent) -> Result<EquivalenceVerdict> {
    if t.is_infinite() || t.value() < r.value() - TOL {
        return Err(Error::InvalidArgument(format!("standard t-multi-norm needs r <= t < inf (t = {t}, r = {r})")));
    }
    if r == Exponent::ONE {
        let target = TrianglePoint::new(Exponent::ONE, t)?;
        if eq(pt.p.recip(), 1.0) && eq(pt.q.recip(), t.recip()) {
            return Ok(with_note(Verdict::Equivalent, "L^1 theorem: the standard t- and (1,t)-multi-norms are equal", "equal"));
        }
        let cmp = classify_pq_pair(pt, target, r);
        let cite = format!("L^1 theorem: standard t equals (1,t); {}", cmp.citation);
        return Ok(EquivalenceVerdict { verdict: cmp.verdict, citation: cite, note: cmp.note });
    }
    let rv = r.value();
    if eq(t.recip(), r.recip()) {
        return Ok(verdict(
            Verdict::NotEquivalent,
            "standard-r corollary: the standard r-multi-norm is not equivalent to any (p,q)-multi-norm for r > 1",
        ));
    }
    if rv >= 2.0 - TOL {
        return Ok(verdict(Verdict::NotEquivalent, "standard-t theorem clause: r >= 2"));
    }
    if t.value() < 2.0 * rv / (2.0 - rv) - TOL {
        return Ok(verdict(Verdict::NotEquivalent, "standard-t theorem clause: 1 < r < 2 and t < 2r/(2-r)"));
    }
    if pt.c() < 0.5 - TOL {
        return Ok(verdict(Verdict::NotEquivalent, "standard-t theorem clause: 1/p - 1/q < 1/2"));
    }
    let anchor = TrianglePoint::new(r, t)?;
    if !eq(d_curve_index(pt, r), d_curve_index(anchor, r)) {
        return Ok(verdict(Verdict::NotEquivalent, "standard-t theorem clause: (p,q) and (r,t) lie on different curves D_c"));
    }
    let tv = t.value();
    if pt.p.value() > 2.0 * tv / (2.0 + tv) + TOL {
        return Ok(verdict(Verdict::NotEquivalent, "standard-t theorem: equivalence forces p <= 2t/(2+t)"));
    }
    Ok(with_note(
        Verdict::Open,
        "standard-t theorem: open only when 1 < r < 2 and t >= 2r/(2-r)",
        "would follow from deciding standard t against (r,t)",
    ))
}

/// Operator ideal `Π_{q,p}(H)` on a Hilbert space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum HilbertIdeal {
    HilbertSchmidt,
    Schatten(f64),
    LorentzSchatten { u: f64, q: f64 },
    AllBounded,
}

impl HilbertIdeal {
    /// Equality up to the boundary tolerance.
    pub fn same_as(&self, other: &HilbertIdeal) -> bool {
        let close = |a: f64, b: f64| (1.0 / a - 1.0 / b).abs() <= TOL;
        match (*self, *other) {
            (HilbertIdeal::HilbertSchmidt, HilbertIdeal::HilbertSchmidt) => true,
            (HilbertIdeal::AllBounded, HilbertIdeal::AllBounded) => true,
            (HilbertIdeal::Schatten(a), HilbertIdeal::Schatten(b)) => close(a, b),
            (HilbertIdeal::HilbertSchmidt, HilbertIdeal::Schatten(a)) | (HilbertIdeal::Schatten(a), HilbertIdeal::HilbertSchmidt) => {
                close(a, 2.0)
            }
            (HilbertIdeal::LorentzSchatten { u: a, q: b }, HilbertIdeal::LorentzSchatten { u: c, q: d }) => {
                close(a, c) && close(b, d)
            }
            _ => false,
        }
    }
}

pub fn hilbert_ideal(pt: TrianglePoint) -> HilbertIdeal {
    let (p, q) = (pt.p.value(), pt.q.value());
    if pt.is_diagonal() {
        return HilbertIdeal::HilbertSchmidt;
    }
    let c = pt.c();
    if ge(c, 0.5) {
        HilbertIdeal::AllBounded
    } else if p <= 2.0 + TOL {
        HilbertIdeal::Schatten(1.0 / (0.5 - c))
    } else {
        HilbertIdeal::LorentzSchatten { u: 2.0 * q / p, q }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(x: f64) -> Exponent {
        Exponent::new(x).unwrap()
    }

    fn pt(p: f64, q: f64) -> TrianglePoint {
        TrianglePoint::from_f64(p, q).unwrap()
    }

    #[test]
    fn exponent_examples() {
        assert_eq!(phi_exponent(e(1.0), e(2.0), e(2.0)), 0.0);
        assert!((phi_exponent(e(2.0), e(3.0), e(2.0)) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(phi_exponent(e(1.0), e(3.0), e(2.0)), 0.0);
        assert_eq!(delta_exponent(1.0, 1.0, 1.0), 1.0);
        assert_eq!(delta_exponent(1.0, 2.0, 2.0), 0.0);
        assert!((delta_exponent(2.0, 2.0, 4.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn curve_examples() {
        assert_eq!(curve_params(pt(2.0, 2.0), e(5.0)).c, 0.0);
        let cp = curve_params(pt(1.0, 1.0 / (1.0 - 0.3)), e(3.0));
        assert!((cp.u_c.unwrap() - 3.0 / (1.0 - 0.3 * 3.0)).abs() < 1e-9);
        let cp = curve_params(pt(1.0, 1.0 / 0.6), e(3.0));
        assert!((cp.v_c.unwrap() - 10.0).abs() < 1e-9);
        let w = cp.w_c.unwrap();
        assert!((1.0 / w - 1.0 / 10.0 - 1.0 / 3.0).abs() < 1e-12 && w >= 2.0);
        assert!(TrianglePoint::from_f64(3.0, 2.0).is_err());
    }

    #[test]
    fn pair_examples() {
        assert_eq!(classify_pq_pair(pt(1.0, 2.0), pt(1.5, 2.0), e(1.0)).verdict, Verdict::Equivalent);
        assert_eq!(classify_pq_pair(pt(2.0, 2.0), pt(1.0, 2.0), e(1.0)).verdict, Verdict::NotEquivalent);
        let v = classify_pq_pair(pt(1.0, 4.0 / 3.0), pt(4.0 / 3.0, 2.0), e(3.0));
        assert_eq!(v.verdict, Verdict::Open);
        assert!(v.note.is_some());
    }

    #[test]
    fn min_max_examples() {
        assert_eq!(classify_vs_min(pt(1.0, 2.0), e(2.0)).verdict, Verdict::EquivalentToMin);
        assert_eq!(classify_vs_min(pt(2.0, 3.0), e(2.0)).verdict, Verdict::NotEquivalent);
        assert_eq!(classify_vs_min(pt(1.0, 9.0), e(1.0)).verdict, Verdict::NotEquivalent);
        assert_eq!(classify_vs_max(pt(1.5, 1.5), e(3.0)).verdict, Verdict::EquivalentToMax);
        assert_eq!(classify_vs_max(pt(2.0, 2.0), e(1.5)).verdict, Verdict::NotEquivalent);
        assert_eq!(classify_vs_max(pt(2.0, 2.0), e(4.0)).verdict, Verdict::EquivalentToMax);
    }

    #[test]
    fn standard_t_examples() {
        assert_eq!(classify_standard_t(pt(1.0, 3.0), e(3.0), e(1.0)).unwrap().verdict, Verdict::Equivalent);
        assert_eq!(classify_standard_t(pt(2.0, 3.0), e(3.0), e(3.0)).unwrap().verdict, Verdict::NotEquivalent);
        assert_eq!(classify_standard_t(pt(1.5, 6.0), e(6.0), e(1.5)).unwrap().verdict, Verdict::Open);
    }

    #[test]
    fn ideal_examples() {
        assert_eq!(hilbert_ideal(pt(2.0, 2.0)), HilbertIdeal::HilbertSchmidt);
        assert_eq!(hilbert_ideal(pt(1.0, 2.0)), HilbertIdeal::AllBounded);
        match hilbert_ideal(pt(3.0, 4.0)) {
            HilbertIdeal::LorentzSchatten { u, q } => assert!((u - 8.0 / 3.0).abs() < 1e-12 && q == 4.0),
            other => panic!("{other:?}"),
        }
    }

    fn arb_point() -> impl Strategy<Value = TrianglePoint> {
        // Mix grid values (to hit boundaries) with continuous ones.
        let grid = prop::sample::select(vec![1.0f64, 1.2, 4.0 / 3.0, 1.5, 2.0, 2.4, 3.0, 4.0, 6.0]);
        prop_oneof![
            (grid.clone(), grid).prop_map(|(a, b)| pt(a.min(b), a.max(b))),
            (1.0f64..8.0, 1.0f64..8.0).prop_map(|(a, b)| pt(a.min(b), a.max(b))),
        ]
    }

    fn arb_r() -> impl Strategy<Value = Exponent> {
        prop::sample::select(vec![1.0, 1.25, 1.5, 2.0, 2.5, 3.0, 4.0]).prop_map(e)
    }

    proptest! {
        #[test]
        fn pair_verdict_is_symmetric(a in arb_point(), b in arb_point(), r in arb_r()) {
            let (x, y) = (classify_pq_pair(a, b, r), classify_pq_pair(b, a, r));
            prop_assert_eq!(x.verdict, y.verdict);
        }

        #[test]
        fn equivalence_respects_growth_exponents(a in arb_point(), b in arb_point(), r in arb_r()) {
            if classify_pq_pair(a, b, r).verdict == Verdict::Equivalent {
                let (ra, rb) = (r.value(), r.value());
                prop_assert!((delta_exponent(a.p.value(), a.q.value(), ra) - delta_exponent(b.p.value(), b.q.value(), rb)).abs() < 1e-9);
                prop_assert!((phi_exponent(a.p, a.q, r) - phi_exponent(b.p, b.q, r)).abs() < 1e-9);
            }
        }

        #[test]
        fn equivalence_on_l2_respects_ideals(a in arb_point(), b in arb_point()) {
            if classify_pq_pair(a, b, Exponent::TWO).verdict == Verdict::Equivalent {
                prop_assert!(hilbert_ideal(a).same_as(&hilbert_ideal(b)));
            }
        }

        #[test]
        fn d_curves_cover_the_triangle(a in arb_point(), r in arb_r()) {
            let cp = curve_params(a, r);
            prop_assert!(cp.d_index >= -1e-12 && cp.d_index < 1.0);
            prop_assert!(cp.d_index >= cp.c - 1e-12);
        }
    }
}
