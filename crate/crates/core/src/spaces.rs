//! Finite-dimensional sequence spaces `ℓ^r_m` over ℝ or ℂ.
//!
//! Scalars are always stored as double-precision complex numbers; spaces
//! over ℝ keep every imaginary part at zero and validate it on entry.

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Maximum Khintchine dimension accepted by [`khintchine_pair`].
pub const KHINTCHINE_CAP: usize = 12;

/// An exponent in `[1, ∞]`; `∞` is represented exactly.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Exponent(f64);

impl Exponent {
    pub const ONE: Exponent = Exponent(1.0);
    pub const TWO: Exponent = Exponent(2.0);
    pub const INFINITY: Exponent = Exponent(f64::INFINITY);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value < 1.0 {
            return Err(Error::InvalidExponent(value));
        }
        Ok(Exponent(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// `1/e`, with `1/∞ = 0`.
    pub fn recip(self) -> f64 {
        if self.is_infinite() {
            0.0
        } else {
            1.0 / self.0
        }
    }

    /// Builds the exponent whose reciprocal is `inv` (`inv = 0` gives `∞`).
    pub fn from_recip(inv: f64) -> Result<Self> {
        if !(0.0..=1.0 + 1e-15).contains(&inv) {
            return Err(Error::InvalidExponent(1.0 / inv));
        }
        if inv == 0.0 {
            Ok(Exponent::INFINITY)
        } else {
            Ok(Exponent((1.0 / inv).max(1.0)))
        }
    }

    /// The conjugate exponent `p′` with `1/p + 1/p′ = 1`.
    pub fn conjugate(self) -> Exponent {
        if self.0 == 1.0 {
            Exponent::INFINITY
        } else if self.is_infinite() {
            Exponent::ONE
        } else {
            Exponent(1.0 / (1.0 - 1.0 / self.0))
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl std::str::FromStr for Exponent {
    type Err = Error;

    /// Accepts decimals, `a/b` fractions and `inf`.
    fn from_str(s: &str) -> Result<Self> {
        Exponent::new(parse_real(s)?)
    }
}

/// Parses a real number written as a decimal, a fraction `a/b`, or `inf`.
pub fn parse_real(s: &str) -> Result<f64> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") || t == "∞" {
        return Ok(f64::INFINITY);
    }
    if let Some((a, b)) = t.split_once('/') {
        let num: f64 = a.trim().parse().map_err(|_| Error::Parse(format!("bad number '{s}'")))?;
        let den: f64 = b.trim().parse().map_err(|_| Error::Parse(format!("bad number '{s}'")))?;
        if den == 0.0 {
            return Err(Error::Parse(format!("zero denominator in '{s}'")));
        }
        return Ok(num / den);
    }
    t.parse().map_err(|_| Error::Parse(format!("bad number '{s}'")))
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        let x = match &v {
            Value::Number(n) => n.as_f64().ok_or_else(|| serde::de::Error::custom("bad exponent"))?,
            Value::String(s) => parse_real(s).map_err(serde::de::Error::custom)?,
            _ => return Err(serde::de::Error::custom("exponent must be a number or string")),
        };
        Exponent::new(x).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarField {
    Real,
    Complex,
}

impl std::str::FromStr for ScalarField {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "real" | "r" => Ok(ScalarField::Real),
            "complex" | "c" => Ok(ScalarField::Complex),
            other => Err(Error::Parse(format!("unknown field '{other}'"))),
        }
    }
}

/// `ℓ^r_m` over a scalar field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceSpace {
    pub dim: usize,
    pub r: Exponent,
    pub field: ScalarField,
}

impl SequenceSpace {
    /// A primal space; requires `m ≥ 1` and `r < ∞`.
    pub fn new(dim: usize, r: Exponent, field: ScalarField) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("space dimension must be positive".into()));
        }
        if r.is_infinite() {
            return Err(Error::InvalidArgument("space exponent must be finite".into()));
        }
        Ok(SequenceSpace { dim, r, field })
    }

    /// `ℓ^{r′}_m`; the exponent may be `∞` here.
    pub fn dual(&self) -> SequenceSpace {
        SequenceSpace { dim: self.dim, r: self.r.conjugate(), field: self.field }
    }
}

/// An ordered n-tuple `(x_1, …, x_n)` in a sequence space; row `i` is `x_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorTuple {
    pub space: SequenceSpace,
    vectors: Vec<Vec<C64>>,
}

impl VectorTuple {
    pub fn new(space: SequenceSpace, vectors: Vec<Vec<C64>>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::InvalidArgument("a tuple needs at least one vector".into()));
        }
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != space.dim {
                return Err(Error::InvalidArgument(format!(
                    "vector {i} has length {}, expected {}",
                    v.len(),
                    space.dim
                )));
            }
            if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::InvalidArgument(format!("vector {i} has non-finite entries")));
            }
            if space.field == ScalarField::Real && v.iter().any(|z| z.im != 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "vector {i} has nonzero imaginary part in a real space"
                )));
            }
        }
        Ok(VectorTuple { space, vectors })
    }

    pub fn from_real(space: SequenceSpace, rows: &[Vec<f64>]) -> Result<Self> {
        VectorTuple::new(space, rows.iter().map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect()).collect())
    }

    /// The tuple `(δ_1, …, δ_n)` of standard unit vectors in `ℓ^r_n`.
    pub fn delta_basis(n: usize, r: Exponent, field: ScalarField) -> Result<Self> {
        let space = SequenceSpace::new(n, r, field)?;
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }).collect())
            .collect();
        VectorTuple::new(space, rows)
    }

    pub fn n(&self) -> usize {
        self.vectors.len()
    }

    pub fn m(&self) -> usize {
        self.space.dim
    }

    pub fn vectors(&self) -> &[Vec<C64>] {
        &self.vectors
    }

    pub fn into_vectors(self) -> Vec<Vec<C64>> {
        self.vectors
    }

    /// Norms `‖x_i‖_r` of the rows.
    pub fn row_norms(&self) -> Vec<f64> {
        self.vectors.iter().map(|v| p_norm(v, self.space.r)).collect()
    }

    /// Applies a scalar to every row.
    pub fn scaled(&self, s: f64) -> VectorTuple {
        VectorTuple {
            space: self.space,
            vectors: self.vectors.iter().map(|v| v.iter().map(|z| z * s).collect()).collect(),
        }
    }

    pub fn to_json(&self) -> Value {
        let vectors: Vec<Value> = self
            .vectors
            .iter()
            .map(|v| {
                Value::Array(
                    v.iter()
                        .map(|z| match self.space.field {
                            ScalarField::Real => serde_json::json!(z.re),
                            ScalarField::Complex => serde_json::json!([z.re, z.im]),
                        })
                        .collect(),
                )
            })
            .collect();
        serde_json::json!({
            "field": self.space.field,
            "r": self.space.r,
            "m": self.m(),
            "n": self.n(),
            "vectors": vectors,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let field: ScalarField = match v.get("field") {
            Some(f) => serde_json::from_value(f.clone()).map_err(|e| Error::Parse(e.to_string()))?,
            None => ScalarField::Complex,
        };
        let r: Exponent = serde_json::from_value(v.get("r").cloned().ok_or_else(|| Error::Parse("missing 'r'".into()))?)
            .map_err(|e| Error::Parse(e.to_string()))?;
        let rows = v
            .get("vectors")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing 'vectors' array".into()))?;
        let mut vectors = Vec::with_capacity(rows.len());
        for row in rows {
            let entries = row.as_array().ok_or_else(|| Error::Parse("each vector must be an array".into()))?;
            vectors.push(entries.iter().map(parse_scalar).collect::<Result<Vec<_>>>()?);
        }
        let m = match v.get("m").and_then(Value::as_u64) {
            Some(m) => m as usize,
            None => vectors.first().map_or(0, Vec::len),
        };
        if let Some(n) = v.get("n").and_then(Value::as_u64) {
            if n as usize != vectors.len() {
                return Err(Error::Parse(format!("'n' is {n} but {} vectors were given", vectors.len())));
            }
        }
        VectorTuple::new(SequenceSpace::new(m, r, field)?, vectors)
    }
}

/// Parses a JSON scalar: a bare number or a `[re, im]` pair.
pub fn parse_scalar(v: &Value) -> Result<C64> {
    match v {
        Value::Number(n) => Ok(C64::new(n.as_f64().ok_or_else(|| Error::Parse("bad number".into()))?, 0.0)),
        Value::Array(a) if a.len() == 2 => {
            let re = a[0].as_f64().ok_or_else(|| Error::Parse("bad real part".into()))?;
            let im = a[1].as_f64().ok_or_else(|| Error::Parse("bad imaginary part".into()))?;
            Ok(C64::new(re, im))
        }
        _ => Err(Error::Parse(format!("cannot read scalar from {v}"))),
    }
}

/// `⟨x, y⟩ = Σ x_j ȳ_j`.
pub fn inner(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

/// `(Σ|v_j|^r)^{1/r}`, or `max_j |v_j|` for `r = ∞`.
pub fn p_norm(v: &[C64], r: Exponent) -> f64 {
    let big = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if big == 0.0 || r.is_infinite() {
        return big;
    }
    let r = r.value();
    if r == 1.0 {
        return v.iter().map(|z| z.norm()).sum();
    }
    if r == 2.0 {
        return v.iter().map(|z| (z.norm() / big).powi(2)).sum::<f64>().sqrt() * big;
    }
    big * v.iter().map(|z| (z.norm() / big).powf(r)).sum::<f64>().powf(1.0 / r)
}

/// The norming vector of `g` in the `ℓ^u` ball: maximizes `Re⟨v, g⟩` over
/// `‖v‖_u ≤ 1`, attaining `‖g‖_{u′}`. Zero entries of `g` map to zero.
pub fn dual_vector(g: &[C64], u: Exponent) -> Vec<C64> {
    let n = g.len();
    let big = g.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if big == 0.0 {
        return vec![C64::new(0.0, 0.0); n];
    }
    let phase = |z: &C64| if z.norm() == 0.0 { C64::new(0.0, 0.0) } else { z / z.norm() };
    if u.is_infinite() {
        return g.iter().map(phase).collect();
    }
    if u.value() == 1.0 {
        let j = argmax_abs(g);
        let mut v = vec![C64::new(0.0, 0.0); n];
        v[j] = phase(&g[j]);
        return v;
    }
    let up = u.conjugate().value();
    let scaled: Vec<f64> = g.iter().map(|z| (z.norm() / big).powf(up - 1.0)).collect();
    let norm = p_norm(&scaled.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>(), u);
    g.iter().zip(&scaled).map(|(z, &w)| phase(z) * (w / norm)).collect()
}

/// Gradient of `w ↦ ‖w‖_s`: `‖w + h‖_s ≈ ‖w‖_s + Re⟨h, grad⟩`.
pub fn norm_gradient(w: &[C64], s: Exponent) -> Vec<C64> {
    dual_vector(w, s.conjugate())
}

/// First index of the entry with largest modulus.
pub fn argmax_abs(v: &[C64]) -> usize {
    let mut best = 0;
    for (j, z) in v.iter().enumerate() {
        if z.norm() > v[best].norm() {
            best = j;
        }
    }
    best
}

/// Decreasing rearrangement order of `|v|`; ties keep original order.
pub fn rearrangement_order(v: &[C64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[b].norm().partial_cmp(&v[a].norm()).unwrap_or(Ordering::Equal));
    idx
}

/// Lorentz norm `(Σ_k k^{q/p − 1} (v*_k)^q)^{1/q}`.
///
/// Both orderings of `p` and `q` are accepted: `q ≤ p` is the normable
/// range and covers targets such as `ℓ^{2,1}`.
pub fn lorentz_norm(v: &[C64], p: Exponent, q: Exponent) -> Result<f64> {
    if p.is_infinite() || q.is_infinite() {
        return Err(Error::InvalidArgument("Lorentz exponents must be finite".into()));
    }
    Ok(lorentz_value(v, p.value(), q.value()))
}

pub(crate) fn lorentz_value(v: &[C64], p: f64, q: f64) -> f64 {
    let order = rearrangement_order(v);
    let sum: f64 = order
        .iter()
        .enumerate()
        .map(|(k, &j)| ((k + 1) as f64).powf(q / p - 1.0) * v[j].norm().powf(q))
        .sum();
    sum.powf(1.0 / q)
}

/// The normalized DFT tuple `f_i = n^{−1/r}(ζ^{−ij})_j`, `ζ = e^{2πi/n}`.
pub fn dft_tuple(n: usize, r: Exponent, field: ScalarField) -> Result<VectorTuple> {
    if field == ScalarField::Real {
        return Err(Error::InvalidArgument("the DFT tuple exists only over the complex field".into()));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let scale = (n as f64).powf(-r.recip());
    let rows = (1..=n)
        .map(|i| {
            (1..=n)
                .map(|j| {
                    let k = (i * j) % n;
                    C64::from_polar(scale, -2.0 * std::f64::consts::PI * k as f64 / n as f64)
                })
                .collect()
        })
        .collect();
    VectorTuple::new(SequenceSpace::new(n, r, field)?, rows)
}

/// Sign-pattern embedding pair `R = 2^{−n/r} ε`, `S = 2^{−n/s} ε`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KhintchinePair {
    pub n: usize,
    pub r: Exponent,
    pub r_mat: Vec<Vec<f64>>,
    pub s_mat: Vec<Vec<f64>>,
}

impl KhintchinePair {
    pub fn apply_r(&self, x: &[C64]) -> Vec<C64> {
        apply_real(&self.r_mat, x)
    }

    pub fn apply_s(&self, y: &[C64]) -> Vec<C64> {
        apply_real(&self.s_mat, y)
    }
}

fn apply_real(mat: &[Vec<f64>], x: &[C64]) -> Vec<C64> {
    mat.iter().map(|row| row.iter().zip(x).map(|(a, z)| z * *a).sum()).collect()
}

pub fn khintchine_pair(n: usize, r: Exponent) -> Result<KhintchinePair> {
    khintchine_pair_capped(n, r, KHINTCHINE_CAP)
}

pub fn khintchine_pair_capped(n: usize, r: Exponent, cap: usize) -> Result<KhintchinePair> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    if n > cap {
        return Err(Error::InvalidArgument(format!(
            "Khintchine dimension {n} exceeds the cap {cap} (the matrices have 2^n rows)"
        )));
    }
    let rows = 1usize << n;
    let cr = 2f64.powf(-(n as f64) * r.recip());
    let cs = 2f64.powf(-(n as f64) * r.conjugate().recip());
    let sign = |k: usize, j: usize| if (k >> j) & 1 == 1 { -1.0 } else { 1.0 };
    let r_mat = (0..rows).map(|k| (0..n).map(|j| cr * sign(k, j)).collect()).collect();
    let s_mat = (0..rows).map(|k| (0..n).map(|j| cs * sign(k, j)).collect()).collect();
    Ok(KhintchinePair { n, r, r_mat, s_mat })
}

/// Lexicographic comparison of complex vectors by (re, im).
pub fn lex_cmp(a: &[C64], b: &[C64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.re.partial_cmp(&y.re).unwrap_or(Ordering::Equal) {
            Ordering::Equal => {}
            o => return o,
        }
        match x.im.partial_cmp(&y.im).unwrap_or(Ordering::Equal) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}
