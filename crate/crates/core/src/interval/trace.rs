use std::fmt::Write as _;

use serde::Serialize;

use super::ladder::Schedule;
use super::plmap::{fmt_q, q, q_to_f64, ser_q, PLMap, RatInterval, Q};
use crate::error::{Error, Result};
use crate::natsets::{gap_profile, GapProfile, WindowSet};

/// Backward refinement `K_0 ⊆ J_0` with `f(K_i) ⊇ K_{i+1}` and `K_M = J_M`.
#[derive(Debug, Clone, Serialize)]
pub struct Refinement {
    pub ks: Vec<RatInterval>,
}

impl Refinement {
    pub fn k0(&self) -> &RatInterval {
        &self.ks[0]
    }
}

/// Pulls `k` back into `j`, preferring the leftmost monotone stretch mapped onto `k`.
fn pull_back(f: &PLMap, j: &RatInterval, k: &RatInterval) -> Option<RatInterval> {
    let pieces = f.preimage_pieces(j, k);
    let mut runs: Vec<(RatInterval, i8)> = Vec::new();
    for (iv, _, sign) in &pieces {
        match runs.last_mut() {
            Some((last, s)) if *s == *sign && *sign != 0 && last.hi() == iv.lo() => {
                *last = RatInterval::new(last.lo().clone(), iv.hi().clone()).ok()?;
            }
            _ => runs.push((iv.clone(), *sign)),
        }
    }
    let onto = |c: &RatInterval| f.image(c).contains(k);
    runs.into_iter()
        .map(|(c, _)| c)
        .find(|c| onto(c))
        .or_else(|| f.preimage_components(j, k).into_iter().find(|c| onto(c)))
}

pub fn trace_point(f: &PLMap, schedule: &Schedule) -> Result<Refinement> {
    let js = &schedule.intervals;
    let Some(last) = js.last() else {
        return Err(Error::Domain("empty schedule".into()));
    };
    let mut ks = vec![last.clone()];
    for (i, j) in js.iter().enumerate().rev().skip(1) {
        let next = ks.last().unwrap();
        let k = pull_back(f, j, next)
            .ok_or_else(|| Error::InternalInvariant(format!("empty pullback at step {i}: {j} does not cover {next}")))?;
        ks.push(k);
    }
    ks.reverse();
    Ok(Refinement { ks })
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceLevel {
    pub n: usize,
    pub profile: GapProfile,
    pub excursion: u64,
    pub hole_within_excursion: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceReport {
    #[serde(serialize_with = "ser_q")]
    pub b: Q,
    pub coding: String,
    pub scheduled: usize,
    pub extra_horizon: usize,
    pub levels: Vec<TraceLevel>,
    #[serde(skip)]
    pub orbit: Vec<Q>,
}

impl TraceReport {
    /// `j,value,decimal` rows for the whole orbit.
    pub fn orbit_csv(&self) -> String {
        let mut out = String::from("j,value,decimal\n");
        for (j, x) in self.orbit.iter().enumerate() {
            writeln!(out, "{j},{},{:.17}", fmt_q(x), q_to_f64(x)).unwrap();
        }
        out
    }
}

/// Orbit of `b` for `len` steps (`len + 1` points).
pub fn orbit(f: &PLMap, b: &Q, len: usize) -> Result<Vec<Q>> {
    let mut out = Vec::with_capacity(len + 1);
    out.push(b.clone());
    for _ in 0..len {
        let next = f.eval(out.last().unwrap())?;
        out.push(next);
    }
    Ok(out)
}

/// Checks `f^j(b) ∈ J_j` for every scheduled `j` and profiles `{j : f^j(b) < 1/n}` for `2 ≤ n ≤ depth`.
pub fn verify_trace(f: &PLMap, b: &Q, schedule: &Schedule, extra_horizon: usize, depth: usize) -> Result<TraceReport> {
    let m = schedule.len();
    if m == 0 {
        return Err(Error::Domain("empty schedule".into()));
    }
    let orbit = orbit(f, b, m - 1 + extra_horizon)?;
    for (j, (x, iv)) in orbit.iter().zip(&schedule.intervals).enumerate() {
        if !iv.contains_point(x) {
            return Err(Error::TraceInvalid { step: j, detail: format!("f^{j}(b) = {} not in {iv}", fmt_q(x)) });
        }
    }
    let levels = (2..=depth.max(2))
        .map(|n| {
            let bound = q(1, n as i64);
            let members: Vec<u64> = (0..m).filter(|&j| orbit[j] < bound).map(|j| j as u64).collect();
            let set = WindowSet::new(members, m as u64 - 1).expect("sorted members");
            let profile = gap_profile(&set);
            let excursion = schedule.excursion(&bound);
            TraceLevel { n, profile, excursion, hole_within_excursion: profile.longest_hole <= excursion }
        })
        .collect();
    Ok(TraceReport { b: b.clone(), coding: schedule.coding.clone(), scheduled: m, extra_horizon, levels, orbit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::ladder::{build_ladder, coding_schedule, LadderVariant, ScheduleTag};
    use crate::words::Alphabet;

    fn sched(js: Vec<RatInterval>) -> Schedule {
        let tags = vec![ScheduleTag::Transit; js.len()];
        Schedule { intervals: js, tags, coding: String::new() }
    }

    #[test]
    fn one_step_pullbacks() {
        let f = PLMap::tent();
        let r = trace_point(&f, &sched(vec![RatInterval::frac(0, 1, 2).unwrap(), RatInterval::unit()])).unwrap();
        assert_eq!(r.k0(), &RatInterval::frac(0, 1, 2).unwrap());
        let r = trace_point(&f, &sched(vec![RatInterval::frac(0, 1, 2).unwrap(), RatInterval::frac(1, 2, 2).unwrap()]))
            .unwrap();
        assert_eq!(r.k0(), &RatInterval::frac(1, 2, 4).unwrap());
    }

    #[test]
    fn refinement_is_sound_and_contracts() {
        let f = PLMap::tent();
        let l = build_ladder(&f, 5, LadderVariant::PositiveZero).unwrap();
        let s = coding_schedule(&l, &Alphabet::binary().word("01").unwrap()).unwrap();
        let r = trace_point(&f, &s).unwrap();
        for i in 0..s.len() {
            assert!(s.intervals[i].contains(&r.ks[i]));
            if i + 1 < s.len() {
                assert!(f.covers(&r.ks[i], &r.ks[i + 1]));
            }
        }
        let steps = s.len() as u32 - 1;
        let bound = s.intervals.last().unwrap().width() / Q::from_integer(num_bigint::BigInt::from(2).pow(steps));
        assert!(r.k0().width() <= bound);
        let rep = verify_trace(&f, &r.k0().midpoint(), &s, 10, 5).unwrap();
        assert!(rep.levels.iter().all(|lv| lv.hole_within_excursion));
        assert!(rep.orbit_csv().starts_with("j,value,decimal\n0,"));
        assert_eq!(rep.orbit.len(), s.len() + 10);
    }

    #[test]
    fn mismatched_point_is_rejected() {
        let f = PLMap::tent();
        let s = sched(vec![RatInterval::frac(0, 1, 2).unwrap(), RatInterval::frac(1, 2, 2).unwrap()]);
        let err = verify_trace(&f, &q(1, 8), &s, 0, 3).unwrap_err();
        assert!(matches!(err, Error::TraceInvalid { step: 1, .. }));
    }
}
