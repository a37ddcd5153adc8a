//! A circle-times-heights homeomorphism whose orbit from `(1, 1)` is proximal to the
//! bottom circle without ever being syndetically proximal to it.
//!
//! Angles are kept as exact rational multiples `c·α` of a single irrational `α`.

use std::fmt::Write as _;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::plmap::{fmt_q, q, q_to_f64, ser_q, Q};
use crate::natsets::{gap_profile, GapProfile, WindowSet};

pub fn default_alpha() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

/// `m(n) = 1 + 2 + … + n`.
pub fn milestone(n: u64) -> u64 {
    n * (n + 1) / 2
}

/// `z_j = (e(c·α), y)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitTerm {
    pub j: i64,
    #[serde(serialize_with = "ser_q")]
    pub c: Q,
    #[serde(serialize_with = "ser_q")]
    pub y: Q,
}

/// Forward orbit `z_0, z_1, …` by the exact recurrence.
#[derive(Debug, Clone)]
pub struct Orbit {
    j: u64,
    c: Q,
    y: Q,
    block: u64,
}

impl Orbit {
    pub fn new() -> Self {
        Self { j: 0, c: Q::zero(), y: Q::one(), block: 1 }
    }
}

impl Default for Orbit {
    fn default() -> Self {
        Self::new()
    }
}

impl Iterator for Orbit {
    type Item = OrbitTerm;

    fn next(&mut self) -> Option<OrbitTerm> {
        let out = OrbitTerm { j: self.j as i64, c: self.c.clone(), y: self.y.clone() };
        while self.j >= milestone(self.block) {
            self.block += 1;
        }
        let n = self.block as i64;
        let turn = if n % 2 == 1 { q(1, n) } else { -q(1, n) };
        self.c = &self.c + Q::one() + turn;
        self.y = q(1, n);
        self.j += 1;
        Some(out)
    }
}

pub fn orbit_term(j: i64) -> OrbitTerm {
    if j < 0 {
        return OrbitTerm { j, c: q(j, 1), y: q(2, 1) - q(1, 1 - j) };
    }
    Orbit::new().nth(j as usize).unwrap()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Milestone {
    pub n: u64,
    pub index: u64,
    #[serde(serialize_with = "ser_q")]
    pub c: Q,
    #[serde(serialize_with = "ser_q")]
    pub expected: Q,
    pub holds: bool,
}

/// `c_{m(n)} = m(n) + 1` for odd `n` and `c_{m(n)} = m(n)` for even `n`.
pub fn milestone_check(n_max: u64) -> Result<Vec<Milestone>> {
    if n_max == 0 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    let mut out = Vec::new();
    let mut n = 1;
    for term in Orbit::new().take(milestone(n_max) as usize + 1) {
        if term.j as u64 == milestone(n) {
            let m = milestone(n) as i64;
            let expected = q(if n % 2 == 1 { m + 1 } else { m }, 1);
            out.push(Milestone { n, index: m as u64, holds: term.c == expected, c: term.c, expected });
            n += 1;
        }
    }
    Ok(out)
}

/// Starting point on the bottom circle `𝕊 × {0}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BottomStart {
    /// `(1, 0)`.
    Origin,
    /// `F(1, 0) = (e(α), 0)`.
    Rotated,
}

impl BottomStart {
    fn offset(self) -> i64 {
        match self {
            BottomStart::Origin => 0,
            BottomStart::Rotated => 1,
        }
    }

    /// Milestone parity at which the angles coincide.
    fn parity(self) -> u64 {
        match self {
            BottomStart::Origin => 0,
            BottomStart::Rotated => 1,
        }
    }
}

impl std::str::FromStr for BottomStart {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "origin" | "0" => Ok(BottomStart::Origin),
            "rotated" | "alpha" => Ok(BottomStart::Rotated),
            other => Err(Error::Parse(format!("unknown bottom start {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DistanceRow {
    pub n: u64,
    pub distance: f64,
    #[serde(serialize_with = "ser_q")]
    pub height: Q,
    #[serde(serialize_with = "ser_q")]
    pub coeff: Q,
}

#[derive(Debug, Clone, Serialize)]
pub struct MilestoneDistance {
    pub n: u64,
    pub index: u64,
    pub angles_equal: bool,
    pub distance: f64,
    #[serde(serialize_with = "ser_q")]
    pub height: Q,
}

/// Length of the first hole of the close set starting at or after `m(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HoleAfter {
    pub n: u64,
    pub start: u64,
    pub len: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DistanceProfile {
    pub alpha: f64,
    pub horizon: u64,
    pub start: BottomStart,
    pub epsilon: f64,
    pub milestones: Vec<MilestoneDistance>,
    pub close_profile: GapProfile,
    pub holes_after_milestones: Vec<HoleAfter>,
    /// Holes after milestones never shrink and the last exceeds the first.
    pub holes_growing: bool,
    #[serde(skip)]
    pub series: Vec<DistanceRow>,
}

impl DistanceProfile {
    pub fn series_csv(&self) -> String {
        let mut out = String::from("n,distance,height,coeff\n");
        for r in &self.series {
            writeln!(out, "{},{:.17e},{},{}", r.n, r.distance, fmt_q(&r.height), fmt_q(&r.coeff)).unwrap();
        }
        out
    }
}

/// Euclidean distance in `ℂ × ℝ` between `(e(a·α), y)` and `(e(b·α), 0)` with `t = a - b`.
fn distance(t: &Q, y: &Q, alpha: f64) -> f64 {
    let chord = if t.is_zero() {
        0.0
    } else {
        let turns = (q_to_f64(t) * alpha).rem_euclid(1.0);
        2.0 * (std::f64::consts::PI * turns).sin().abs()
    };
    let h = q_to_f64(y);
    (chord * chord + h * h).sqrt()
}

/// Distances `d(F^n z_0, F^n w)` for `n ≤ horizon` with `w` on the bottom circle.
pub fn pair_distance_profile(alpha: f64, horizon: u64, start: BottomStart, epsilon: f64) -> Result<DistanceProfile> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha {alpha} outside (0, 1)")));
    }
    if horizon < milestone(10) {
        return Err(Error::Domain(format!("horizon must be at least {}", milestone(10))));
    }
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::Domain("epsilon must be positive".into()));
    }
    let off = start.offset();
    let series: Vec<DistanceRow> = Orbit::new()
        .take(horizon as usize + 1)
        .map(|t| {
            let rel = &t.c - q(t.j + off, 1);
            DistanceRow { n: t.j as u64, distance: distance(&rel, &t.y, alpha), height: t.y, coeff: t.c }
        })
        .collect();
    let mut milestones = Vec::new();
    let mut n = 1;
    while milestone(n) <= horizon {
        if n % 2 == start.parity() {
            let idx = milestone(n);
            let row = &series[idx as usize];
            let angles_equal = row.coeff == q(idx as i64 + off, 1);
            milestones.push(MilestoneDistance { n, index: idx, angles_equal, distance: row.distance, height: row.height.clone() });
        }
        n += 1;
    }
    let close = WindowSet::new(
        series.iter().filter(|r| r.distance < epsilon).map(|r| r.n).collect(),
        horizon,
    )?;
    let holes = close.holes();
    let holes_after_milestones: Vec<HoleAfter> = milestones
        .iter()
        .filter(|m| q_to_f64(&m.height) < epsilon)
        .filter_map(|m| {
            holes
                .iter()
                .find(|h| h.start >= m.index && h.end() < horizon)
                .map(|h| HoleAfter { n: m.n, start: h.start, len: h.len })
        })
        .collect();
    let holes_growing = holes_after_milestones.windows(2).all(|w| w[0].len <= w[1].len)
        && holes_after_milestones.len() >= 2
        && holes_after_milestones.first().unwrap().len < holes_after_milestones.last().unwrap().len;
    Ok(DistanceProfile {
        alpha,
        horizon,
        start,
        epsilon,
        milestones,
        close_profile: gap_profile(&close),
        holes_after_milestones,
        holes_growing,
        series,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn closed_form(j: u64) -> Q {
        // c at the start of the block plus `1 ± 1/n` per step inside it
        let mut n = 1;
        while milestone(n) < j {
            n += 1;
        }
        if j == 0 {
            return Q::zero();
        }
        let start = milestone(n - 1);
        let base = q(start as i64 + if (n - 1) % 2 == 1 { 1 } else { 0 }, 1);
        let turn = if n % 2 == 1 { q(1, n as i64) } else { -q(1, n as i64) };
        base + q((j - start) as i64, 1) * (Q::one() + turn)
    }

    #[test]
    fn listed_terms() {
        let expect = [
            (0, q(0, 1), q(1, 1)),
            (1, q(2, 1), q(1, 1)),
            (2, q(5, 2), q(1, 2)),
            (3, q(3, 1), q(1, 2)),
            (4, q(13, 3), q(1, 3)),
            (5, q(17, 3), q(1, 3)),
            (6, q(7, 1), q(1, 3)),
            (7, q(31, 4), q(1, 4)),
            (8, q(17, 2), q(1, 4)),
            (9, q(37, 4), q(1, 4)),
            (10, q(10, 1), q(1, 4)),
            (11, q(56, 5), q(1, 5)),
        ];
        for (j, c, y) in expect {
            let t = orbit_term(j);
            assert_eq!((t.c, t.y), (c, y), "j = {j}");
        }
    }

    #[test]
    fn negative_terms() {
        let t = orbit_term(-3);
        assert_eq!(t.c, q(-3, 1));
        assert_eq!(t.y, q(7, 4));
    }

    #[test]
    fn milestones_hold_to_fifty() {
        let ms = milestone_check(50).unwrap();
        assert_eq!(ms.len(), 50);
        assert!(ms.iter().all(|m| m.holds));
        assert_eq!(ms[0].index, 1);
        assert_eq!(ms[1].c, q(3, 1));
        assert!(milestone_check(0).is_err());
    }

    #[test]
    fn even_milestone_distance_is_the_height() {
        let p = pair_distance_profile(default_alpha(), milestone(40), BottomStart::Origin, 0.1).unwrap();
        for m in &p.milestones {
            assert!(m.angles_equal);
            assert_eq!(m.height, q(1, m.n as i64));
            assert!((m.distance - 1.0 / m.n as f64).abs() < 1e-12);
        }
        assert!(p.holes_growing, "{:?}", p.holes_after_milestones);
        assert!(p.series_csv().starts_with("n,distance,height,coeff\n0,"));
        let r = pair_distance_profile(default_alpha(), milestone(12), BottomStart::Rotated, 0.1).unwrap();
        assert!(r.milestones.iter().all(|m| m.angles_equal && m.n % 2 == 1));
    }

    #[test]
    fn bad_inputs() {
        assert!(pair_distance_profile(1.5, 1000, BottomStart::Origin, 0.1).is_err());
        assert!(pair_distance_profile(0.5, 10, BottomStart::Origin, 0.1).is_err());
    }

    proptest! {
        #[test]
        fn recurrence_matches_block_formula(j in 0u64..600) {
            prop_assert_eq!(orbit_term(j as i64).c, closed_form(j));
        }

        #[test]
        fn height_is_constant_on_blocks(n in 1u64..30) {
            let terms: Vec<OrbitTerm> = Orbit::new().take(milestone(n) as usize + 1).collect();
            for j in milestone(n - 1) + 1..=milestone(n) {
                prop_assert_eq!(&terms[j as usize].y, &q(1, n as i64));
            }
        }
    }
}
