//! The odd unimodular lattice Z^{1,k} with basis e0, e1, ..., ek.

use crate::error::{Error, Result};
use crate::rational::{fmt_q, parse_q, q, serde_q, Q};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Neg, Sub};

pub const MAX_RANK: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DivisorClass {
    coeffs: Vec<Q>,
}

impl DivisorClass {
    pub fn new(coeffs: Vec<Q>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() > MAX_RANK + 1 {
            return Err(Error::RankOutOfRange(coeffs.len().saturating_sub(1)));
        }
        Ok(DivisorClass { coeffs })
    }

    pub fn from_ints(c: &[i64]) -> Self {
        assert!(!c.is_empty() && c.len() <= MAX_RANK + 1, "bad rank");
        DivisorClass {
            coeffs: c.iter().map(|&x| q(x)).collect(),
        }
    }

    pub fn zero(k: usize) -> Self {
        DivisorClass {
            coeffs: vec![Q::zero(); k + 1],
        }
    }

    /// The basis vector e_i (e_0 is the pullback of a line).
    pub fn e(k: usize, i: usize) -> Self {
        let mut d = Self::zero(k);
        d.coeffs[i] = Q::one();
        d
    }

    pub fn k(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    pub fn scale(&self, t: &Q) -> Self {
        DivisorClass {
            coeffs: self.coeffs.iter().map(|c| c * t).collect(),
        }
    }

    pub fn scale_int(&self, t: i64) -> Self {
        self.scale(&q(t))
    }

    /// Intersection number; panics on a rank mismatch (use [`pair`] for a checked version).
    pub fn dot(&self, other: &DivisorClass) -> Q {
        pair(self, other).expect("rank mismatch")
    }

    pub fn self_int(&self) -> Q {
        self.dot(self)
    }

    /// Adds `t * other` in place.
    pub fn add_scaled(&mut self, t: &Q, other: &DivisorClass) {
        assert_eq!(self.k(), other.k(), "rank mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += t * b;
        }
    }

    /// Parses either a JSON-style coefficient list `[1,-1,0]` or an
    /// e-basis expression such as `e0-e1-e2` or `2e0 - 1/2 e3`.
    pub fn parse(s: &str, k: usize) -> Result<Self> {
        let t = s.trim();
        if t.starts_with('[') {
            let v: serde_json::Value =
                serde_json::from_str(t).map_err(|e| Error::Parse(e.to_string()))?;
            let arr = v.as_array().ok_or_else(|| Error::Parse(t.into()))?;
            let coeffs = arr
                .iter()
                .map(|x| serde_q::value_to_q(x).ok_or_else(|| Error::Parse(x.to_string())))
                .collect::<Result<Vec<_>>>()?;
            if coeffs.len() != k + 1 {
                return Err(Error::RankMismatch(coeffs.len().saturating_sub(1), k));
            }
            return DivisorClass::new(coeffs);
        }
        parse_ebasis(t, k)
    }
}

fn parse_ebasis(s: &str, k: usize) -> Result<DivisorClass> {
    let mut out = DivisorClass::zero(k);
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() || compact == "0" {
        return Ok(out);
    }
    let mut terms = Vec::new();
    let mut cur = String::new();
    for ch in compact.chars() {
        if (ch == '+' || ch == '-') && !cur.is_empty() && !cur.ends_with('(') {
            terms.push(std::mem::take(&mut cur));
        }
        cur.push(ch);
    }
    terms.push(cur);
    for term in terms {
        let (sign, body) = match term.strip_prefix('-') {
            Some(b) => (-1, b),
            None => (1, term.strip_prefix('+').unwrap_or(&term)),
        };
        let pos = body
            .find('e')
            .ok_or_else(|| Error::Parse(format!("term '{term}' has no basis vector")))?;
        let coeff_txt = body[..pos].trim_matches(|c| c == '(' || c == ')' || c == '*');
        let idx: usize = body[pos + 1..]
            .parse()
            .map_err(|_| Error::Parse(format!("bad index in '{term}'")))?;
        if idx > k {
            return Err(Error::Parse(format!("e{idx} exceeds rank {k}")));
        }
        let c = if coeff_txt.is_empty() {
            Q::one()
        } else {
            parse_q(coeff_txt)
                .ok_or_else(|| Error::Parse(format!("bad coefficient in '{term}'")))?
        };
        out.coeffs[idx] += c * q(sign);
    }
    Ok(out)
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { "-" } else { "+" })?;
            }
            if !mag.is_one() {
                if mag.is_integer() {
                    write!(f, "{}", fmt_q(&mag))?;
                } else {
                    write!(f, "({})", fmt_q(&mag))?;
                }
            }
            write!(f, "e{i}")?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Add for &DivisorClass {
    type Output = DivisorClass;
    fn add(self, rhs: &DivisorClass) -> DivisorClass {
        assert_eq!(self.k(), rhs.k(), "rank mismatch");
        DivisorClass {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &DivisorClass {
    type Output = DivisorClass;
    fn sub(self, rhs: &DivisorClass) -> DivisorClass {
        assert_eq!(self.k(), rhs.k(), "rank mismatch");
        DivisorClass {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &DivisorClass {
    type Output = DivisorClass;
    fn neg(self) -> DivisorClass {
        DivisorClass {
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RawClass {
    k: usize,
    #[serde(with = "serde_q::vec")]
    coeffs: Vec<Q>,
}

impl Serialize for DivisorClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawClass {
            k: self.k(),
            coeffs: self.coeffs.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DivisorClass {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RawClass::deserialize(d)?;
        if raw.coeffs.len() != raw.k + 1 {
            return Err(D::Error::custom(format!(
                "k = {} but {} coefficients",
                raw.k,
                raw.coeffs.len()
            )));
        }
        DivisorClass::new(raw.coeffs).map_err(D::Error::custom)
    }
}

/// a0 b0 - sum ai bi.
pub fn pair(a: &DivisorClass, b: &DivisorClass) -> Result<Q> {
    if a.k() != b.k() {
        return Err(Error::RankMismatch(a.k(), b.k()));
    }
    let mut acc = &a.coeffs[0] * &b.coeffs[0];
    for (x, y) in a.coeffs[1..].iter().zip(&b.coeffs[1..]) {
        acc -= x * y;
    }
    Ok(acc)
}

/// K = -3 e0 + e1 + ... + ek.
pub fn canonical_class(k: usize) -> Result<DivisorClass> {
    if k > MAX_RANK {
        return Err(Error::RankOutOfRange(k));
    }
    let mut c = vec![1i64; k + 1];
    c[0] = -3;
    Ok(DivisorClass::from_ints(&c))
}

/// Smallest s >= 0 with s*s >= n.
fn ceil_sqrt(n: i64) -> i64 {
    if n <= 0 {
        return 0;
    }
    let mut s = (n as f64).sqrt() as i64;
    while s * s < n {
        s += 1;
    }
    while s > 0 && (s - 1) * (s - 1) >= n {
        s -= 1;
    }
    s
}

/// Integer interval containing every x with (x - c)^2 <= r, where c = cn/cd and r = rn/rd.
fn box_range(cn: i64, cd: i64, rn: i64, rd: i64) -> (i64, i64) {
    let rad = ceil_sqrt((rn + rd - 1).div_euclid(rd));
    (cn.div_euclid(cd) - rad, (cn + cd - 1).div_euclid(cd) + rad)
}

/// All integral classes with D^2 = self_int and D.K = k_pairing, in lexicographic order.
pub fn enumerate_classes(k: usize, self_int: i64, k_pairing: i64) -> Result<Vec<DivisorClass>> {
    if k > MAX_RANK {
        return Err(Error::RankOutOfRange(k));
    }
    if !matches!((self_int, k_pairing), (-1, -1) | (-2, 0) | (0, -2)) {
        return Err(Error::UnsupportedInvariants(self_int, k_pairing));
    }
    Ok(enumerate_raw(k, self_int, k_pairing)
        .into_iter()
        .map(|v| DivisorClass::from_ints(&v))
        .collect())
}

/// Integer search behind [`enumerate_classes`].
///
/// With d = 9 - k and c = D.K/d, D - cK lies in the negative definite
/// orthogonal complement of K, so Cauchy-Schwarz bounds every coordinate:
/// (D_i - c)^2 <= |B|(1 + 1/d) for i >= 1 and (D_0 + 3c)^2 <= |B|(9/d - 1),
/// where B = self_int - kp^2/d.
pub(crate) fn enumerate_raw(k: usize, self_int: i64, kp: i64) -> Vec<Vec<i64>> {
    let d = 9 - k as i64;
    // |B| = kp^2/d - self_int, kept as a fraction bn/d.
    let bn = kp * kp - self_int * d;
    assert!(bn >= 0, "positive part of D is not K-proportional");
    let (lo0, hi0) = box_range(-3 * kp, d, bn * (9 - d), d * d);
    let (lo, hi) = box_range(kp, d, bn * (d + 1), d * d);
    let mut out = Vec::new();
    if k == 0 {
        for d0 in lo0..=hi0 {
            if d0 * d0 == self_int && -3 * d0 == kp {
                out.push(vec![d0]);
            }
        }
        return out;
    }
    let mut cur = vec![0i64; k + 1];
    for d0 in lo0..=hi0 {
        // D.K = -3 d0 - sum di, D^2 = d0^2 - sum di^2.
        let sum = -3 * d0 - kp;
        let sumsq = d0 * d0 - self_int;
        if sumsq < 0 {
            continue;
        }
        cur[0] = d0;
        fill(&mut cur, 1, sum, sumsq, lo, hi, &mut out);
    }
    out.sort();
    out
}

fn fill(
    cur: &mut Vec<i64>,
    pos: usize,
    sum: i64,
    sumsq: i64,
    lo: i64,
    hi: i64,
    out: &mut Vec<Vec<i64>>,
) {
    let left = (cur.len() - pos) as i64;
    if left == 0 {
        if sum == 0 && sumsq == 0 {
            out.push(cur.clone());
        }
        return;
    }
    // remaining coordinates need sum^2 <= left * sumsq
    if sumsq < 0 || sum * sum > left * sumsq {
        return;
    }
    for x in lo..=hi {
        if x * x > sumsq {
            continue;
        }
        cur[pos] = x;
        fill(cur, pos + 1, sum - x, sumsq - x * x, lo, hi, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;

    #[test]
    fn basic_pairings() {
        let e0 = DivisorClass::e(6, 0);
        let e1 = DivisorClass::e(6, 1);
        assert_eq!(e0.dot(&e0), q(1));
        assert_eq!(e1.dot(&e1), q(-1));
        let a = DivisorClass::from_ints(&[1, -1, 0, 0, 0, 0, -1]);
        let b = DivisorClass::e(6, 6);
        assert_eq!(a.dot(&b), q(1));
        assert!(pair(&DivisorClass::e(2, 0), &DivisorClass::e(3, 0)).is_err());
    }

    #[test]
    fn canonical_self_intersection() {
        for k in 0..=8 {
            let kk = canonical_class(k).unwrap();
            assert_eq!(kk.self_int(), q(9 - k as i64));
        }
        assert!(canonical_class(9).is_err());
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(
            enumerate_classes(1, -1, -1).unwrap(),
            vec![DivisorClass::e(1, 1)]
        );
        assert_eq!(enumerate_classes(6, -1, -1).unwrap().len(), 27);
        assert_eq!(enumerate_classes(6, -2, 0).unwrap().len(), 72);
        assert_eq!(enumerate_classes(7, -1, -1).unwrap().len(), 56);
        assert_eq!(enumerate_classes(8, -1, -1).unwrap().len(), 240);
        assert_eq!(enumerate_classes(8, -2, 0).unwrap().len(), 240);
        assert!(enumerate_classes(3, -3, 1).is_err());
    }

    #[test]
    fn parse_and_display() {
        let c = DivisorClass::parse("e0 - e1 - e2", 3).unwrap();
        assert_eq!(c, DivisorClass::from_ints(&[1, -1, -1, 0]));
        assert_eq!(c.to_string(), "e0-e1-e2");
        let h = DivisorClass::parse("[3, \"-1/2\", 0]", 2).unwrap();
        assert_eq!(h.coeffs()[1], qf(-1, 2));
        assert_eq!(DivisorClass::parse(&h.to_string(), 2).unwrap(), h);
        assert!(DivisorClass::parse("e5", 3).is_err());
        assert!(DivisorClass::parse("[1,2]", 3).is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = DivisorClass::new(vec![qf(1, 2), q(-1), qf(3, 4)]).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, r#"{"k":2,"coeffs":["1/2","-1","3/4"]}"#);
        let back: DivisorClass = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<DivisorClass>(r#"{"k":3,"coeffs":["1"]}"#).is_err());
    }
}
