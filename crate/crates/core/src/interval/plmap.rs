use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n: BigInt = n.trim().parse().map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    let d: BigInt = d.trim().parse().map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Q::new(n, d))
}

/// `p/q`, or `p` for integers.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn ser_q<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_q(x))
}

/// A closed interval `[lo, hi] ⊆ [0, 1]` with rational endpoints.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatInterval {
    lo: Q,
    hi: Q,
}

impl RatInterval {
    pub fn new(lo: Q, hi: Q) -> Result<Self> {
        if lo > hi {
            return Err(Error::Domain(format!("reversed interval [{}, {}]", fmt_q(&lo), fmt_q(&hi))));
        }
        if lo.is_negative() || hi > Q::one() {
            return Err(Error::Domain(format!("[{}, {}] leaves [0, 1]", fmt_q(&lo), fmt_q(&hi))));
        }
        Ok(Self { lo, hi })
    }

    pub fn point(x: Q) -> Result<Self> {
        Self::new(x.clone(), x)
    }

    pub fn unit() -> Self {
        Self { lo: Q::zero(), hi: Q::one() }
    }

    /// `[a/d, b/d]`.
    pub fn frac(a: i64, b: i64, d: i64) -> Result<Self> {
        Self::new(q(a, d), q(b, d))
    }

    pub fn lo(&self) -> &Q {
        &self.lo
    }

    pub fn hi(&self) -> &Q {
        &self.hi
    }

    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Q {
        (&self.lo + &self.hi) / Q::from_integer(2.into())
    }

    pub fn contains_point(&self, x: &Q) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// `other ⊆ self`.
    pub fn contains(&self, other: &RatInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersect(&self, other: &RatInterval) -> Option<RatInterval> {
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        (lo <= hi).then_some(RatInterval { lo, hi })
    }

    pub fn dist(&self, other: &RatInterval) -> Q {
        if self.hi < other.lo {
            &other.lo - &self.hi
        } else if other.hi < self.lo {
            &self.lo - &other.hi
        } else {
            Q::zero()
        }
    }

    pub fn dist_point(&self, x: &Q) -> Q {
        if x < &self.lo {
            &self.lo - x
        } else if x > &self.hi {
            x - &self.hi
        } else {
            Q::zero()
        }
    }

    /// Inside `[0, bound)` (half-open on the right).
    pub fn below(&self, bound: &Q) -> bool {
        &self.hi < bound
    }
}

impl fmt::Display for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", fmt_q(&self.lo), fmt_q(&self.hi))
    }
}

impl fmt::Debug for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for RatInterval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [fmt_q(&self.lo), fmt_q(&self.hi)].serialize(s)
    }
}

/// Solution set of `f(x) = x` on one linear piece.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FixedPointSet {
    Point(Q),
    Segment(RatInterval),
}

impl fmt::Display for FixedPointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixedPointSet::Point(x) => write!(f, "{}", fmt_q(x)),
            FixedPointSet::Segment(i) => write!(f, "{i}"),
        }
    }
}

impl Serialize for FixedPointSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Continuous piecewise-linear self-map of `[0, 1]` given by its values at
/// breakpoints `0 = t_0 < … < t_r = 1`.
#[derive(Clone, PartialEq, Eq)]
pub struct PLMap {
    breakpoints: Vec<Q>,
    values: Vec<Q>,
}

/// One linear piece: `[a, b] → [f(a), f(b)]`.
#[derive(Debug, Clone)]
pub(crate) struct Piece<'a> {
    pub index: usize,
    pub a: &'a Q,
    pub b: &'a Q,
    pub fa: &'a Q,
    pub fb: &'a Q,
}

impl Piece<'_> {
    pub fn slope(&self) -> Q {
        (self.fb - self.fa) / (self.b - self.a)
    }

    pub fn eval(&self, x: &Q) -> Q {
        self.fa + self.slope() * (x - self.a)
    }
}

impl PLMap {
    pub fn new(breakpoints: Vec<Q>, values: Vec<Q>) -> Result<Self> {
        if breakpoints.len() < 2 || breakpoints.len() != values.len() {
            return Err(Error::Domain("need at least two breakpoints, one value each".into()));
        }
        if !breakpoints[0].is_zero() || !breakpoints.last().unwrap().is_one() {
            return Err(Error::Domain("breakpoints must run from 0 to 1".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("breakpoints must be strictly increasing".into()));
        }
        if values.iter().any(|v| v.is_negative() || v > &Q::one()) {
            return Err(Error::Domain("values must lie in [0, 1]".into()));
        }
        Ok(Self { breakpoints, values })
    }

    /// `x ↦ 1 - |2x - 1|`.
    pub fn tent() -> Self {
        Self::new(vec![q(0, 1), q(1, 2), q(1, 1)], vec![q(0, 1), q(1, 1), q(0, 1)]).unwrap()
    }

    /// A map with fixed points `2^{-k}` for `k = 0..levels`, one extra fixed
    /// point inside each level `[2^{-k-1}, 2^{-k}]`, and `f^{-1}(0) = {0}`.
    /// Each level dips to a quarter of its left end and peaks at `min(8h, 1)`.
    pub fn staircase(levels: u32) -> Result<Self> {
        if levels == 0 || levels > 60 {
            return Err(Error::Domain("staircase needs 1..=60 levels".into()));
        }
        let pow = |k: u32| Q::new(BigInt::one(), BigInt::from(2).pow(k));
        let bottom = pow(levels);
        let mut t = vec![Q::zero(), &bottom / q(2, 1), bottom.clone()];
        let mut v = vec![Q::zero(), &bottom / q(4, 1), bottom.clone()];
        for k in (0..levels).rev() {
            let h = pow(k + 1);
            t.push(&h * q(5, 4));
            v.push(&h / q(4, 1));
            t.push(&h * q(7, 4));
            v.push((&h * q(8, 1)).min(Q::one()));
            t.push(&h * q(2, 1));
            v.push(&h * q(2, 1));
        }
        Self::new(t, v)
    }

    pub fn breakpoints(&self) -> &[Q] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    pub(crate) fn pieces(&self) -> impl Iterator<Item = Piece<'_>> {
        (0..self.breakpoints.len() - 1).map(move |i| Piece {
            index: i,
            a: &self.breakpoints[i],
            b: &self.breakpoints[i + 1],
            fa: &self.values[i],
            fb: &self.values[i + 1],
        })
    }

    fn piece_of(&self, x: &Q) -> Piece<'_> {
        let i = self.breakpoints.partition_point(|t| t <= x).saturating_sub(1).min(self.breakpoints.len() - 2);
        self.pieces().nth(i).unwrap()
    }

    pub fn eval(&self, x: &Q) -> Result<Q> {
        if x.is_negative() || x > &Q::one() {
            return Err(Error::Domain(format!("{} outside [0, 1]", fmt_q(x))));
        }
        Ok(self.piece_of(x).eval(x))
    }

    /// `f(K)`: the extreme values over the endpoints and interior breakpoints.
    pub fn image(&self, k: &RatInterval) -> RatInterval {
        let mut lo = self.piece_of(&k.lo).eval(&k.lo);
        let mut hi = lo.clone();
        let end = self.piece_of(&k.hi).eval(&k.hi);
        let inner = self
            .breakpoints
            .iter()
            .zip(&self.values)
            .filter(|(t, _)| &k.lo < *t && *t < &k.hi)
            .map(|(_, v)| v.clone());
        for v in std::iter::once(end).chain(inner) {
            if v < lo {
                lo = v;
            } else if v > hi {
                hi = v;
            }
        }
        RatInterval { lo, hi }
    }

    /// `K ⟹ L`: `L ⊆ f(K)`.
    pub fn covers(&self, k: &RatInterval, l: &RatInterval) -> bool {
        self.image(k).contains(l)
    }

    /// `f^n(K)`.
    pub fn image_power(&self, k: &RatInterval, n: usize) -> RatInterval {
        (0..n).fold(k.clone(), |acc, _| self.image(&acc))
    }

    /// All solutions of `f(x) = x`, in increasing order.
    pub fn fixed_points(&self) -> Vec<FixedPointSet> {
        let mut out: Vec<FixedPointSet> = Vec::new();
        for p in self.pieces() {
            let ga = p.fa - p.a;
            let gb = p.fb - p.b;
            let found = if ga.is_zero() && gb.is_zero() {
                Some(FixedPointSet::Segment(RatInterval { lo: p.a.clone(), hi: p.b.clone() }))
            } else if ga.is_zero() {
                Some(FixedPointSet::Point(p.a.clone()))
            } else if gb.is_zero() {
                Some(FixedPointSet::Point(p.b.clone()))
            } else if ga.is_positive() != gb.is_positive() {
                Some(FixedPointSet::Point(p.a + &ga * (p.b - p.a) / (&ga - &gb)))
            } else {
                None
            };
            let Some(found) = found else { continue };
            let duplicate = match (out.last_mut(), &found) {
                (Some(FixedPointSet::Point(x)), FixedPointSet::Point(y)) => x == y,
                (Some(FixedPointSet::Segment(s)), FixedPointSet::Point(y)) => s.contains_point(y),
                (Some(FixedPointSet::Segment(s)), FixedPointSet::Segment(t)) if s.hi == t.lo => {
                    s.hi = t.hi.clone();
                    true
                }
                _ => false,
            };
            if !duplicate {
                if let (Some(FixedPointSet::Point(x)), FixedPointSet::Segment(s)) = (out.last(), &found) {
                    if s.contains_point(x) {
                        out.pop();
                    }
                }
                out.push(found);
            }
        }
        out
    }

    /// For each piece meeting `j`, the part of `j` on that piece mapped into `k`.
    pub(crate) fn preimage_pieces(&self, j: &RatInterval, k: &RatInterval) -> Vec<(RatInterval, usize, i8)> {
        let mut out = Vec::new();
        for p in self.pieces() {
            let Some(sub) = j.intersect(&RatInterval { lo: p.a.clone(), hi: p.b.clone() }) else { continue };
            let slope = p.slope();
            if slope.is_zero() {
                if k.contains_point(p.fa) {
                    out.push((sub, p.index, 0));
                }
                continue;
            }
            let inv = |y: &Q| p.a + (y - p.fa) / &slope;
            let (x0, x1) = if slope.is_positive() { (inv(&k.lo), inv(&k.hi)) } else { (inv(&k.hi), inv(&k.lo)) };
            let lo = (&sub.lo).max(&x0).clone();
            let hi = (&sub.hi).min(&x1).clone();
            if lo <= hi {
                out.push((RatInterval { lo, hi }, p.index, if slope.is_positive() { 1 } else { -1 }));
            }
        }
        out
    }

    /// Connected components of `j ∩ f^{-1}(k)`.
    pub fn preimage_components(&self, j: &RatInterval, k: &RatInterval) -> Vec<RatInterval> {
        let mut out: Vec<RatInterval> = Vec::new();
        for (piece, _, _) in self.preimage_pieces(j, k) {
            match out.last_mut() {
                Some(last) if last.hi >= piece.lo => last.hi = (&last.hi).max(&piece.hi).clone(),
                _ => out.push(piece),
            }
        }
        out
    }

    /// `f^{-1}(y) ∩ [0, 1]` as points (pieces constant at `y` contribute their left end).
    pub fn preimages_of(&self, y: &Q) -> Vec<Q> {
        let point = RatInterval { lo: y.clone(), hi: y.clone() };
        let mut out: Vec<Q> = self
            .preimage_components(&RatInterval::unit(), &point)
            .into_iter()
            .map(|c| c.lo)
            .collect();
        out.dedup();
        out
    }

    pub fn min_abs_slope(&self) -> Q {
        self.pieces().map(|p| p.slope().abs()).min().unwrap()
    }
}

impl fmt::Display for PLMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .breakpoints
            .iter()
            .zip(&self.values)
            .map(|(t, v)| format!("{}:{}", fmt_q(t), fmt_q(v)))
            .collect();
        write!(f, "{}", parts.join(", "))
    }
}

impl fmt::Debug for PLMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PLMap({self})")
    }
}

impl FromStr for PLMap {
    type Err = Error;
    /// Parses `t:v` pairs separated by commas or whitespace, e.g. `0:0, 1/2:1, 1:0`.
    fn from_str(s: &str) -> Result<Self> {
        let mut t = Vec::new();
        let mut v = Vec::new();
        for pair in s.split(|c: char| c == ',' || c.is_whitespace()).filter(|p| !p.is_empty()) {
            let (a, b) = pair.split_once(':').ok_or_else(|| Error::Parse(format!("expected t:v, got {pair:?}")))?;
            t.push(parse_q(a)?);
            v.push(parse_q(b)?);
        }
        Self::new(t, v)
    }
}

impl Serialize for PLMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tent_evaluation_and_images() {
        let f = PLMap::tent();
        assert_eq!(f.eval(&q(1, 3)).unwrap(), q(2, 3));
        assert_eq!(f.image(&RatInterval::frac(0, 1, 2).unwrap()), RatInterval::unit());
        assert_eq!(f.image(&RatInterval::frac(2, 3, 8).unwrap()), RatInterval::frac(2, 3, 4).unwrap());
        assert!(f.eval(&q(3, 2)).is_err());
    }

    #[test]
    fn covering_examples() {
        let f = PLMap::tent();
        assert!(f.covers(&RatInterval::frac(0, 1, 2).unwrap(), &RatInterval::unit()));
        assert!(!f.covers(&RatInterval::frac(0, 1, 4).unwrap(), &RatInterval::frac(3, 4, 4).unwrap()));
        let k = RatInterval::frac(0, 1, 4).unwrap();
        assert!(f.covers(&k, &k));
    }

    #[test]
    fn fixed_point_examples() {
        let f = PLMap::tent();
        assert_eq!(f.fixed_points(), vec![FixedPointSet::Point(q(0, 1)), FixedPointSet::Point(q(2, 3))]);
        let id: PLMap = "0:0, 1/2:1/2, 1:0".parse().unwrap();
        assert_eq!(id.fixed_points(), vec![FixedPointSet::Segment(RatInterval::frac(0, 1, 2).unwrap())]);
        let s = PLMap::staircase(3).unwrap();
        let fps = s.fixed_points();
        for k in 0..=3 {
            assert!(fps.contains(&FixedPointSet::Point(q(1, 1 << k))), "2^-{k}");
        }
        assert!(fps.contains(&FixedPointSet::Point(q(0, 1))));
        assert_eq!(s.preimages_of(&q(0, 1)), vec![q(0, 1)]);
    }

    #[test]
    fn preimage_components_of_tent() {
        let f = PLMap::tent();
        let c = f.preimage_components(&RatInterval::unit(), &RatInterval::frac(1, 2, 2).unwrap());
        assert_eq!(c, vec![RatInterval::frac(1, 3, 4).unwrap()]);
        let c = f.preimage_components(&RatInterval::unit(), &RatInterval::frac(1, 1, 2).unwrap());
        assert_eq!(c, vec![RatInterval::frac(1, 1, 4).unwrap(), RatInterval::frac(3, 3, 4).unwrap()]);
        assert_eq!(f.preimages_of(&q(1, 1)), vec![q(1, 2)]);
        assert_eq!(f.preimages_of(&q(0, 1)), vec![q(0, 1), q(1, 1)]);
    }

    #[test]
    fn text_round_trip() {
        let f = PLMap::tent();
        assert_eq!(f.to_string(), "0:0, 1/2:1, 1:0");
        assert_eq!(f.to_string().parse::<PLMap>().unwrap(), f);
        assert!("0:0, 1/2:3/2, 1:0".parse::<PLMap>().is_err());
        assert!("0:0, 1:1, 1/2:0".parse::<PLMap>().is_err());
        assert!(RatInterval::new(q(1, 2), q(1, 3)).is_err());
    }
}
