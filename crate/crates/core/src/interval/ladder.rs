use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::plmap::{fmt_q, q, ser_q, PLMap, RatInterval, Q};
use crate::error::{Error, Result};
use crate::words::Word;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum LadderVariant {
    /// Levels between consecutive supplied fixed points; `fixed_points[i]` plays `p_{i+2}`.
    FixedPoints {
        #[serde(serialize_with = "ser_qs")]
        fixed_points: Vec<Q>,
    },
    /// Levels `[0, b_n]` below a map with a positive zero.
    PositiveZero,
}

fn ser_qs<S: serde::Serializer>(xs: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(fmt_q))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LadderOptions {
    pub max_chain: usize,
    pub max_k1: usize,
}

impl Default for LadderOptions {
    fn default() -> Self {
        Self { max_chain: 64, max_k1: 24 }
    }
}

/// A certified chain `J_0 ⟹ J_1 ⟹ … ⟹ J_k`, endpoints included.
pub type Chain = Vec<RatInterval>;

#[derive(Debug, Clone, Serialize)]
pub struct Ladder {
    pub map: PLMap,
    pub variant: LadderVariant,
    pub n_max: usize,
    /// `levels[i] = L_{i+2}`.
    pub levels: Vec<RatInterval>,
    /// `up[i]`: `L_{i+2} ⇢ L_{i+3}`; `down[i]`: the reverse. Both have `k[i] + 1` entries.
    pub up: Vec<Chain>,
    pub down: Vec<Chain>,
    pub k: Vec<usize>,
    pub h: [RatInterval; 2],
    pub k1: usize,
    /// `L_2, f(L_2), …, H_i`.
    pub to_h: [Chain; 2],
    /// `H_i, f(H_i), …, L_2`.
    pub from_h: [Chain; 2],
    #[serde(serialize_with = "ser_q")]
    pub epsilon: Q,
}

impl Ladder {
    pub fn level(&self, n: usize) -> Option<&RatInterval> {
        n.checked_sub(2).and_then(|i| self.levels.get(i))
    }

    /// Replays every covering relation the ladder claims.
    pub fn verify(&self) -> Result<()> {
        let f = &self.map;
        for (i, l) in self.levels.iter().enumerate() {
            let n = i + 2;
            if !f.covers(l, l) {
                return Err(Error::LadderFailure(format!("L_{n} does not cover itself")));
            }
            if l.hi() > &q(1, n as i64) {
                return Err(Error::LadderFailure(format!("L_{n} = {l} leaves [0, 1/{n}]")));
            }
        }
        let bound_check = |c: &Chain, n: usize, what: &str| -> Result<()> {
            let box_n = q(1, n as i64);
            check_chain(f, c, what)?;
            match c.iter().find(|j| j.hi() > &box_n) {
                Some(j) => Err(Error::LadderFailure(format!("{what}: {j} leaves [0, 1/{n}]"))),
                None => Ok(()),
            }
        };
        for (i, (u, d)) in self.up.iter().zip(&self.down).enumerate() {
            let n = i + 2;
            bound_check(u, n, &format!("L_{n} ⇢ L_{}", n + 1))?;
            bound_check(d, n, &format!("L_{} ⇢ L_{n}", n + 1))?;
        }
        for i in 0..2 {
            check_chain(f, &self.to_h[i], &format!("L_2 ⟹ H_{i}"))?;
            check_chain(f, &self.from_h[i], &format!("H_{i} ⟹ L_2"))?;
        }
        if self.h[0].dist(&self.h[1]).is_zero() {
            return Err(Error::LadderFailure("H_0 and H_1 intersect".into()));
        }
        Ok(())
    }
}

pub(crate) fn check_chain(f: &PLMap, c: &[RatInterval], what: &str) -> Result<()> {
    for (i, w) in c.windows(2).enumerate() {
        if !f.covers(&w[0], &w[1]) {
            return Err(Error::LadderFailure(format!("{what}: step {i} {} ⟹ {} fails", w[0], w[1])));
        }
    }
    Ok(())
}

/// Iterates images of `from`, clipped to `[0, bound]`, until `to` is covered.
fn chain_within(f: &PLMap, from: &RatInterval, to: &RatInterval, bound: &Q, max: usize) -> Option<Chain> {
    let clip = RatInterval::new(Q::zero(), bound.clone()).ok()?;
    let mut chain = vec![from.clone()];
    for _ in 0..max {
        let cur = chain.last().unwrap();
        let img = f.image(cur);
        if img.contains(to) {
            chain.push(to.clone());
            return Some(chain);
        }
        let next = img.intersect(&clip)?;
        if &next == cur {
            return None;
        }
        chain.push(next);
    }
    None
}

/// Unclipped image chain `from, f(from), …, to` of exactly `k` steps.
fn power_chain(f: &PLMap, from: &RatInterval, to: &RatInterval, k: usize) -> Option<Chain> {
    let mut chain = vec![from.clone()];
    for _ in 1..k {
        chain.push(f.image(chain.last().unwrap()));
    }
    f.covers(chain.last().unwrap(), to).then(|| {
        chain.push(to.clone());
        chain
    })
}

/// Pads the shorter chain by repeating its first interval (needs `J ⟹ J`).
fn pad(f: &PLMap, mut c: Chain, k: usize, what: &str) -> Result<Chain> {
    let steps = c.len() - 1;
    if steps < k {
        if !f.covers(&c[0], &c[0]) {
            return Err(Error::LadderFailure(format!("{what}: cannot pad, {} does not cover itself", c[0])));
        }
        let first = c[0].clone();
        c.splice(0..0, std::iter::repeat_n(first, k - steps));
    }
    Ok(c)
}

fn zero_preimages(f: &PLMap) -> Vec<Q> {
    f.preimages_of(&Q::zero())
}

fn levels_fixed_points(f: &PLMap, fixed: &[Q], n_max: usize) -> Result<Vec<RatInterval>> {
    if !f.eval(&Q::zero())?.is_zero() {
        return Err(Error::Precondition("f(0) must be 0".into()));
    }
    if zero_preimages(f) != vec![Q::zero()] {
        return Err(Error::Precondition("f^{-1}(0) must be {0}".into()));
    }
    if fixed.len() < n_max {
        return Err(Error::Depth { needed: n_max, available: fixed.len() });
    }
    for (i, p) in fixed.iter().enumerate() {
        let n = i as i64 + 2;
        if p <= &Q::zero() || p >= &q(1, n) {
            return Err(Error::Precondition(format!("fixed point {} must lie in (0, 1/{n})", fmt_q(p))));
        }
        if &f.eval(p)? != p {
            return Err(Error::Precondition(format!("{} is not fixed", fmt_q(p))));
        }
        if i > 0 && p >= &fixed[i - 1] {
            return Err(Error::Precondition("fixed points must decrease".into()));
        }
    }
    (2..=n_max)
        .map(|n| RatInterval::new(fixed[n - 1].clone(), fixed[n - 2].clone()))
        .collect()
}

fn levels_positive_zero(f: &PLMap, n_max: usize) -> Result<Vec<RatInterval>> {
    if !f.eval(&Q::zero())?.is_zero() {
        return Err(Error::Precondition("f(0) must be 0".into()));
    }
    if !zero_preimages(f).iter().any(|x| !x.is_zero()) {
        return Err(Error::Precondition("f needs a positive zero".into()));
    }
    let mut out: Vec<RatInterval> = Vec::new();
    for n in 2..=n_max {
        let mut b = q(1, 2 * n as i64);
        if let Some(prev) = out.last() {
            if &b >= prev.hi() {
                b = prev.hi() / q(2, 1);
            }
        }
        if f.eval(&b)? <= b {
            return Err(Error::LadderFailure(format!("f(b_{n}) > b_{n} fails at {}", fmt_q(&b))));
        }
        out.push(RatInterval::new(Q::zero(), b)?);
    }
    Ok(out)
}

/// Candidate `H` pairs in search order.
fn h_candidates(f: &PLMap, variant: &LadderVariant) -> Vec<[RatInterval; 2]> {
    let mut out = Vec::new();
    if let LadderVariant::PositiveZero = variant {
        // y1 ↦ 0, y2 ↦ y1, y3 ↦ y2, all in (0, 1)
        let inner = |xs: Vec<Q>| xs.into_iter().find(|x| x > &Q::zero() && x < &Q::one());
        let y1 = zero_preimages(f).into_iter().find(|x| !x.is_zero());
        let y2 = y1.and_then(|y| inner(f.preimages_of(&y)));
        let y3 = y2.as_ref().and_then(|y| inner(f.preimages_of(y)));
        if let (Some(y2), Some(y3)) = (y2, y3) {
            let r = [(&y2 - &y3).abs(), y3.clone(), Q::one() - &y3, y2.clone(), Q::one() - &y2]
                .into_iter()
                .min()
                .unwrap()
                / q(4, 1);
            let around = |c: &Q| RatInterval::new(c - &r, c + &r);
            if let (Ok(a), Ok(b)) = (around(&y3), around(&y2)) {
                out.push(if y3 < y2 { [a, b] } else { [b, a] });
            }
        }
    }
    for g in [8i64, 16, 32] {
        let cell = |i: i64| RatInterval::new(q(4 * i + 1, 4 * g), q(4 * i + 3, 4 * g)).unwrap();
        for i in 0..g {
            for j in i + 1..g {
                out.push([cell(i), cell(j)]);
            }
        }
    }
    out
}

/// Builds the ladder `L_2, …, L_{n_max}` with certified chains, and the pair `H_0, H_1`.
pub fn build_ladder(f: &PLMap, n_max: usize, variant: LadderVariant) -> Result<Ladder> {
    build_ladder_with(f, n_max, variant, LadderOptions::default())
}

pub fn build_ladder_with(f: &PLMap, n_max: usize, variant: LadderVariant, opts: LadderOptions) -> Result<Ladder> {
    if n_max < 2 {
        return Err(Error::Domain("n_max must be at least 2".into()));
    }
    let levels = match &variant {
        LadderVariant::FixedPoints { fixed_points } => levels_fixed_points(f, fixed_points, n_max)?,
        LadderVariant::PositiveZero => levels_positive_zero(f, n_max)?,
    };
    for (i, l) in levels.iter().enumerate() {
        if !f.covers(l, l) {
            return Err(Error::LadderFailure(format!("L_{} = {l} does not cover itself", i + 2)));
        }
    }
    let (mut up, mut down, mut k) = (Vec::new(), Vec::new(), Vec::new());
    for (i, w) in levels.windows(2).enumerate() {
        let n = i + 2;
        let bound = q(1, n as i64);
        let u = chain_within(f, &w[0], &w[1], &bound, opts.max_chain)
            .ok_or_else(|| Error::LadderFailure(format!("L_{n} ⇢ L_{}", n + 1)))?;
        let d = chain_within(f, &w[1], &w[0], &bound, opts.max_chain)
            .ok_or_else(|| Error::LadderFailure(format!("L_{} ⇢ L_{n}", n + 1)))?;
        let kn = (u.len() - 1).max(d.len() - 1);
        up.push(pad(f, u, kn, &format!("L_{n} ⇢ L_{}", n + 1))?);
        down.push(pad(f, d, kn, &format!("L_{} ⇢ L_{n}", n + 1))?);
        k.push(kn);
    }
    let l2 = &levels[0];
    let mut found = None;
    'search: for k1 in 1..=opts.max_k1 {
        for h in h_candidates(f, &variant) {
            let chains = (
                power_chain(f, l2, &h[0], k1),
                power_chain(f, l2, &h[1], k1),
                power_chain(f, &h[0], l2, k1),
                power_chain(f, &h[1], l2, k1),
            );
            if let (Some(a), Some(b), Some(c), Some(d)) = chains {
                found = Some((h, k1, [a, b], [c, d]));
                break 'search;
            }
        }
    }
    let (h, k1, to_h, from_h) = found.ok_or_else(|| {
        Error::LadderFailure(format!("no H pair with L_2 ⟺ H_i within {} iterates", opts.max_k1))
    })?;
    let epsilon = [h[0].dist_point(&Q::zero()), h[1].dist_point(&Q::one()), h[0].dist(&h[1])]
        .into_iter()
        .min()
        .unwrap()
        / q(2, 1);
    let ladder = Ladder { map: f.clone(), variant, n_max, levels, up, down, k, h, k1, to_h, from_h, epsilon };
    ladder.verify()?;
    Ok(ladder)
}

/// One interval of a coding schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScheduleTag {
    H { symbol: u8 },
    Level { n: usize },
    Transit,
}

#[derive(Debug, Clone, Serialize)]
pub struct Schedule {
    pub intervals: Vec<RatInterval>,
    pub tags: Vec<ScheduleTag>,
    pub coding: String,
}

impl Schedule {
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Indices of the `H` entries.
    pub fn h_positions(&self) -> Vec<usize> {
        self.tags.iter().enumerate().filter(|(_, t)| matches!(t, ScheduleTag::H { .. })).map(|(i, _)| i).collect()
    }

    /// Longest run of consecutive entries not contained in `[0, bound)`.
    pub fn excursion(&self, bound: &Q) -> u64 {
        let mut best = 0;
        let mut cur = 0;
        for j in &self.intervals {
            cur = if j.below(bound) { 0 } else { cur + 1 };
            best = best.max(cur);
        }
        best
    }
}

/// Expands the chain `H_{α_0} ⟹ L_2 ⇢ … ⇢ L_{n+2} ⇢ … ⇢ L_2 ⟹ H_{α_{n+1}} …`, stage `n`
/// climbing to `L_{n+2}`.
pub fn coding_schedule(ladder: &Ladder, alpha: &Word) -> Result<Schedule> {
    let bits: Vec<u8> = alpha
        .to_string()
        .chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(Error::UnknownSymbol(other)),
        })
        .collect::<Result<_>>()?;
    if bits.is_empty() {
        return Err(Error::Domain("empty coding word".into()));
    }
    let needed = bits.len() + 1;
    if ladder.n_max < needed {
        return Err(Error::Depth { needed, available: ladder.n_max });
    }
    let mut intervals = vec![ladder.h[bits[0] as usize].clone()];
    let mut tags = vec![ScheduleTag::H { symbol: bits[0] }];
    let mut extend = |c: &Chain, last: ScheduleTag| {
        for (i, j) in c.iter().enumerate().skip(1) {
            intervals.push(j.clone());
            tags.push(if i + 1 == c.len() { last } else { ScheduleTag::Transit });
        }
    };
    for (s, &a) in bits.iter().enumerate() {
        extend(&ladder.from_h[a as usize], ScheduleTag::Level { n: 2 });
        for n in 2..s + 2 {
            extend(&ladder.up[n - 2], ScheduleTag::Level { n: n + 1 });
        }
        for n in (2..s + 2).rev() {
            extend(&ladder.down[n - 2], ScheduleTag::Level { n });
        }
        if let Some(&next) = bits.get(s + 1) {
            extend(&ladder.to_h[next as usize], ScheduleTag::H { symbol: next });
        }
    }
    check_chain(&ladder.map, &intervals, "schedule").map_err(|e| Error::InternalInvariant(e.to_string()))?;
    Ok(Schedule { intervals, tags, coding: alpha.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Alphabet;

    fn tent_ladder(n: usize) -> Ladder {
        build_ladder(&PLMap::tent(), n, LadderVariant::PositiveZero).unwrap()
    }

    #[test]
    fn tent_ladder_levels() {
        let l = tent_ladder(5);
        let f = PLMap::tent();
        for (i, lev) in l.levels.iter().enumerate() {
            let n = i as i64 + 2;
            assert!(lev.lo().is_zero());
            assert!(lev.hi() <= &q(1, 2 * n));
            assert!(&f.eval(lev.hi()).unwrap() > lev.hi());
            if i > 0 {
                assert!(lev.hi() < l.levels[i - 1].hi());
            }
        }
        assert_eq!(l.levels[0], RatInterval::frac(0, 1, 4).unwrap());
        l.verify().unwrap();
    }

    #[test]
    fn tent_h_pair_comes_from_the_preimage_chain() {
        let l = tent_ladder(3);
        assert!(l.h[0].contains_point(&q(1, 4)));
        assert!(l.h[1].contains_point(&q(1, 2)));
        assert_eq!(l.epsilon, q(1, 16));
    }

    #[test]
    fn staircase_ladder_sits_between_fixed_points() {
        let f = PLMap::staircase(8).unwrap();
        let fixed: Vec<Q> = (2..=7).map(|k| q(1, 1 << k)).collect();
        let l = build_ladder(&f, 6, LadderVariant::FixedPoints { fixed_points: fixed.clone() }).unwrap();
        for (i, lev) in l.levels.iter().enumerate() {
            assert_eq!(lev.lo(), &fixed[i + 1]);
            assert_eq!(lev.hi(), &fixed[i]);
        }
        l.verify().unwrap();
    }

    #[test]
    fn preconditions_are_checked() {
        let f = PLMap::staircase(4).unwrap();
        let bad = vec![q(1, 3), q(1, 8)];
        assert!(build_ladder(&f, 3, LadderVariant::FixedPoints { fixed_points: bad }).is_err());
        assert!(matches!(build_ladder(&f, 3, LadderVariant::PositiveZero), Err(Error::Precondition(_))));
        assert!(build_ladder(&PLMap::tent(), 3, LadderVariant::FixedPoints { fixed_points: vec![q(1, 4), q(1, 8)] }).is_err());
    }

    #[test]
    fn schedule_shape() {
        let l = tent_ladder(5);
        let a = Alphabet::binary();
        let s = coding_schedule(&l, &a.word("0").unwrap()).unwrap();
        assert_eq!(s.intervals[0], l.h[0]);
        assert_eq!(s.intervals[l.k1], l.levels[0]);
        assert_eq!(s.len(), l.k1 + 1);
        let s2 = coding_schedule(&l, &a.word("01").unwrap()).unwrap();
        assert_eq!(s2.len() - 1, 3 * l.k1 + 2 * l.k[0]);
        assert_eq!(s2.h_positions(), vec![0, 2 * l.k1]);
        check_chain(&l.map, &s2.intervals, "replay").unwrap();
        assert!(matches!(
            coding_schedule(&l, &a.word("01010").unwrap()),
            Err(Error::Depth { needed: 6, available: 5 })
        ));
    }
}
