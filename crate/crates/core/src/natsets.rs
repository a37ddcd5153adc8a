//! Finite windows `[0, horizon]` of subsets of ℕ and horizon-relative
//! classifiers for syndetic, thick, thickly syndetic and piecewise syndetic
//! behaviour.
//!
//! The classifiers compare the head `[0, h/2)` of the window with its tail
//! `[h/2, h]`: bounded gaps show up as a tail hole no longer than the head
//! hole, thickness as a tail run longer than any head run.

use std::fmt;
use std::str::FromStr;

use num_integer::Roots;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;

/// Sorted distinct members of a subset of ℕ, inspected up to `horizon`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "RleWindow", try_from = "RleWindow")]
pub struct WindowSet {
    members: Vec<u64>,
    horizon: u64,
}

/// Run-length form: inclusive `[start, end]` intervals.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct RleWindow {
    horizon: u64,
    runs: Vec<(u64, u64)>,
}

impl From<WindowSet> for RleWindow {
    fn from(s: WindowSet) -> Self {
        RleWindow { horizon: s.horizon, runs: s.runs().into_iter().map(|r| (r.start, r.end())).collect() }
    }
}

impl TryFrom<RleWindow> for WindowSet {
    type Error = Error;
    fn try_from(r: RleWindow) -> Result<Self> {
        let mut members = Vec::new();
        for (a, b) in r.runs {
            if a > b {
                return Err(Error::Parse(format!("run [{a}, {b}] is reversed")));
            }
            members.extend(a..=b);
        }
        WindowSet::new(members, r.horizon)
    }
}

/// A maximal block of consecutive members.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Run {
    pub start: u64,
    pub len: u64,
}

impl Run {
    pub fn end(&self) -> u64 {
        self.start + self.len - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GapProfile {
    pub max_gap: u64,
    pub longest_run: u64,
    pub longest_hole: u64,
}

impl WindowSet {
    /// `members` must be strictly increasing and bounded by `horizon`.
    pub fn new(members: Vec<u64>, horizon: u64) -> Result<Self> {
        if members.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("members must be strictly increasing".into()));
        }
        if members.last().is_some_and(|&m| m > horizon) {
            return Err(Error::Domain(format!("member beyond horizon {horizon}")));
        }
        Ok(Self { members, horizon })
    }

    pub fn from_unsorted(mut members: Vec<u64>, horizon: u64) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        Self::new(members, horizon)
    }

    pub fn empty(horizon: u64) -> Self {
        Self { members: Vec::new(), horizon }
    }

    pub fn full(horizon: u64) -> Self {
        Self { members: (0..=horizon).collect(), horizon }
    }

    /// `flags[i]` marks membership of `i`; the horizon is `flags.len() - 1`.
    pub fn from_flags(flags: &[bool]) -> Result<Self> {
        if flags.is_empty() {
            return Err(Error::Domain("empty flag vector".into()));
        }
        let members = flags.iter().enumerate().filter(|(_, &f)| f).map(|(i, _)| i as u64).collect();
        Ok(Self { members, horizon: flags.len() as u64 - 1 })
    }

    pub fn from_predicate(horizon: u64, exec: Exec, pred: impl Fn(u64) -> bool + Sync + Send) -> Self {
        let flags = exec.map(horizon as usize + 1, |i| pred(i as u64));
        Self::from_flags(&flags).expect("nonempty")
    }

    pub fn from_rule(rule: &NatRule, horizon: u64) -> Self {
        Self::from_predicate(horizon, Exec::default(), |n| rule.contains(n))
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.members.binary_search(&n).is_ok()
    }

    /// `[0, horizon] \ self`.
    pub fn complement(&self) -> WindowSet {
        let mut out = Vec::with_capacity((self.horizon + 1) as usize - self.members.len());
        let mut next = 0u64;
        for &m in &self.members {
            out.extend(next..m);
            next = m + 1;
        }
        out.extend(next..=self.horizon);
        WindowSet { members: out, horizon: self.horizon }
    }

    /// Members in `[a, b]` translated to start at 0; the horizon becomes `b - a`.
    pub fn restrict(&self, a: u64, b: u64) -> WindowSet {
        let b = b.min(self.horizon);
        let lo = self.members.partition_point(|&m| m < a);
        let hi = self.members.partition_point(|&m| m <= b);
        WindowSet {
            members: self.members[lo..hi].iter().map(|m| m - a).collect(),
            horizon: b.saturating_sub(a),
        }
    }

    /// The window past index `start`, re-based at 0.
    pub fn shifted(&self, start: u64) -> WindowSet {
        self.restrict(start, self.horizon)
    }

    pub fn runs(&self) -> Vec<Run> {
        let mut runs: Vec<Run> = Vec::new();
        for &m in &self.members {
            match runs.last_mut() {
                Some(r) if r.end() + 1 == m => r.len += 1,
                _ => runs.push(Run { start: m, len: 1 }),
            }
        }
        runs
    }

    /// Maximal holes, including the ones touching 0 and the horizon.
    pub fn holes(&self) -> Vec<Run> {
        self.complement().runs()
    }

    pub fn longest_run(&self) -> Option<Run> {
        longest(self.runs())
    }

    pub fn longest_hole(&self) -> Option<Run> {
        longest(self.holes())
    }
}

fn longest(runs: Vec<Run>) -> Option<Run> {
    runs.into_iter().fold(None, |best, r| match best {
        Some(b) if b.len >= r.len => Some(b),
        _ => Some(r),
    })
}

/// Gap statistics; boundary gaps count from the sentinels `-1` and `horizon + 1`.
pub fn gap_profile(s: &WindowSet) -> GapProfile {
    let h = s.horizon;
    let Some((&first, &last)) = s.members.first().zip(s.members.last()) else {
        return GapProfile { max_gap: h + 1, longest_run: 0, longest_hole: h + 1 };
    };
    let interior = s.members.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(1);
    let max_gap = interior.max(first + 1).max(h + 1 - last);
    let mut longest_run = 0;
    let mut run = 0;
    let mut prev: Option<u64> = None;
    for &m in &s.members {
        run = if prev == Some(m.wrapping_sub(1)) { run + 1 } else { 1 };
        longest_run = longest_run.max(run);
        prev = Some(m);
    }
    GapProfile { max_gap, longest_run, longest_hole: max_gap - 1 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum SyndeticVerdict {
    /// Tail holes do not outgrow head holes; `gap` is the window's max gap.
    Syndetic { gap: u64 },
    /// Holes grow: the tail holds a hole longer than any in the head.
    NotSyndetic { head_hole: u64, tail_hole: u64, hole_start: u64 },
}

impl SyndeticVerdict {
    pub fn is_syndetic(&self) -> bool {
        matches!(self, SyndeticVerdict::Syndetic { .. })
    }

    pub fn gap(&self) -> Option<u64> {
        match *self {
            SyndeticVerdict::Syndetic { gap } => Some(gap),
            SyndeticVerdict::NotSyndetic { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ThickVerdict {
    /// Longest run in the window.
    pub run: u64,
    pub run_start: u64,
    /// Runs grow from head to tail, or the tail is entirely inside the set.
    pub growing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PiecewiseCertificate {
    /// Gap bound inside the stretch.
    pub gap: u64,
    pub start: u64,
    pub len: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub horizon: u64,
    pub profile: GapProfile,
    pub syndetic: SyndeticVerdict,
    pub thick: ThickVerdict,
    /// Smallest `t` with `[t, horizon]` inside the set.
    pub cofinite_tail: Option<u64>,
    /// Largest `n ≤ max_depth` such that every run-start set `R_m`, `m ≤ n`, is syndetic.
    pub thickly_syndetic_depth: u64,
    pub piecewise_syndetic: Option<PiecewiseCertificate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassifyOptions {
    pub max_depth: u64,
    pub max_piecewise_gap: u64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self { max_depth: 8, max_piecewise_gap: 64 }
    }
}

fn halves(h: u64) -> ((u64, u64), (u64, u64)) {
    let mid = h.div_ceil(2);
    ((0, mid - 1), (mid, h))
}

/// Growth test for bounded gaps. `h` must be at least 1.
fn syndetic_verdict(s: &WindowSet) -> SyndeticVerdict {
    let ((a0, b0), (a1, b1)) = halves(s.horizon);
    let head = s.restrict(a0, b0);
    let tail = s.restrict(a1, b1);
    let head_hole = head.longest_hole().map_or(0, |r| r.len);
    let tail_hole = tail.longest_hole();
    match tail_hole {
        Some(t) if tail.is_empty() || t.len > head_hole => SyndeticVerdict::NotSyndetic {
            head_hole,
            tail_hole: t.len,
            hole_start: t.start + a1,
        },
        _ => SyndeticVerdict::Syndetic { gap: gap_profile(s).max_gap },
    }
}

fn thick_verdict(s: &WindowSet) -> ThickVerdict {
    let ((a0, b0), (a1, b1)) = halves(s.horizon);
    let head_run = s.restrict(a0, b0).longest_run().map_or(0, |r| r.len);
    let tail = s.restrict(a1, b1);
    let tail_run = tail.longest_run().map_or(0, |r| r.len);
    let (run, run_start) = s.longest_run().map_or((0, 0), |r| (r.len, r.start));
    ThickVerdict { run, run_start, growing: tail_run > head_run || tail_run == b1 - a1 + 1 }
}

fn cofinite_tail(s: &WindowSet) -> Option<u64> {
    s.runs().last().filter(|r| r.end() == s.horizon).map(|r| r.start)
}

/// `R_m = {i : [i, i+m) ⊆ s}` over `[0, horizon - m + 1]`.
pub fn run_starts(s: &WindowSet, m: u64) -> Option<WindowSet> {
    if m == 0 || m > s.horizon + 1 {
        return None;
    }
    let mut members = Vec::new();
    for r in s.runs().into_iter().filter(|r| r.len >= m) {
        members.extend(r.start..=r.end() + 1 - m);
    }
    Some(WindowSet { members, horizon: s.horizon + 1 - m })
}

/// Longest stretch of members whose consecutive differences are at most `g`.
fn longest_stretch(members: &[u64], g: u64) -> Option<(u64, u64)> {
    let mut best: Option<(u64, u64)> = None;
    let mut start = *members.first()?;
    let mut prev = start;
    let consider = |a: u64, b: u64, best: &mut Option<(u64, u64)>| {
        if best.is_none_or(|(_, l)| b - a + 1 > l) {
            *best = Some((a, b - a + 1));
        }
    };
    for &m in &members[1..] {
        if m - prev > g {
            consider(start, prev, &mut best);
            start = m;
        }
        prev = m;
    }
    consider(start, prev, &mut best);
    best
}

fn piecewise_certificate(s: &WindowSet, max_gap: u64) -> Option<PiecewiseCertificate> {
    let ((a0, b0), (a1, b1)) = halves(s.horizon);
    let head = s.restrict(a0, b0);
    let tail = s.restrict(a1, b1);
    if tail.is_empty() {
        return None;
    }
    let tail_max_diff = tail.members.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0);
    (1..=max_gap).find_map(|g| {
        let head_len = longest_stretch(&head.members, g).map_or(0, |(_, l)| l);
        let (start, len) = longest_stretch(&tail.members, g)?;
        (len > head_len || tail_max_diff <= g).then_some(PiecewiseCertificate { gap: g, start: start + a1, len })
    })
}

pub fn classify_window(s: &WindowSet) -> Result<Classification> {
    classify_window_with(s, ClassifyOptions::default())
}

pub fn classify_window_with(s: &WindowSet, opts: ClassifyOptions) -> Result<Classification> {
    if s.horizon < 1 {
        return Err(Error::Domain("classification needs horizon ≥ 1".into()));
    }
    let mut depth = 0;
    for m in 1..=opts.max_depth {
        match run_starts(s, m) {
            Some(r) if r.horizon >= 1 && !r.is_empty() && syndetic_verdict(&r).is_syndetic() => depth = m,
            _ => break,
        }
    }
    Ok(Classification {
        horizon: s.horizon,
        profile: gap_profile(s),
        syndetic: syndetic_verdict(s),
        thick: thick_verdict(s),
        cofinite_tail: cofinite_tail(s),
        thickly_syndetic_depth: depth,
        piecewise_syndetic: piecewise_certificate(s, opts.max_piecewise_gap),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThickSplit {
    pub q: WindowSet,
    pub q_run: Run,
    pub complement_run: Run,
}

/// Splits `p` into a part `q` and its complement that both keep runs of
/// length `run_length`: the maximal runs of `p` are cut at powers of two and
/// every second piece goes to `q`.
pub fn split_thick(p: &WindowSet, run_length: u64) -> Result<ThickSplit> {
    let p_run = p.longest_run().map_or(0, |r| r.len);
    if p_run < run_length {
        return Err(Error::Infeasible(format!(
            "longest run of p is {p_run}, below the requested {run_length}"
        )));
    }
    let mut pieces = Vec::new();
    for r in p.runs() {
        let mut a = r.start;
        while a <= r.end() {
            let next_pow = if a == 0 { 1 } else { (a + 1).next_power_of_two() };
            let b = r.end().min(next_pow - 1);
            pieces.push((a, b));
            a = b + 1;
        }
    }
    let members = pieces.iter().skip(1).step_by(2).flat_map(|&(a, b)| a..=b).collect();
    let q = WindowSet { members, horizon: p.horizon };
    let q_run = q.longest_run().unwrap_or(Run { start: 0, len: 0 });
    let complement_run = q.complement().longest_run().unwrap_or(Run { start: 0, len: 0 });
    if q_run.len < run_length || complement_run.len < run_length {
        return Err(Error::Infeasible(format!(
            "split keeps runs {} / {} below the requested {run_length}",
            q_run.len, complement_run.len
        )));
    }
    Ok(ThickSplit { q, q_run, complement_run })
}

/// Membership rules for subsets of ℕ beyond any finite window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NatRule {
    All,
    Multiples { k: u64 },
    /// `⋃_k [k², k²+k]`.
    SquareBlocks,
    /// `⋃_k [2·3^k, 3^{k+1})`.
    TriadicBlocks,
    PowersOfTwo,
    /// `{n : no power of two in [n, n+m]}`.
    AvoidPowersWithin { m: u64 },
    /// The listed members and nothing else.
    Finite { members: Vec<u64> },
}

impl NatRule {
    pub fn contains(&self, n: u64) -> bool {
        match self {
            NatRule::All => true,
            NatRule::Multiples { k } => *k != 0 && n.is_multiple_of(*k) || *k == 0 && n == 0,
            NatRule::SquareBlocks => {
                let k = n.sqrt();
                n <= k * k + k
            }
            NatRule::TriadicBlocks => {
                let mut p = 1u64;
                while p.saturating_mul(3) <= n {
                    p *= 3;
                }
                n >= 2 * p
            }
            NatRule::PowersOfTwo => n.is_power_of_two(),
            NatRule::AvoidPowersWithin { m } => {
                let p = if n == 0 { 1 } else { n.next_power_of_two() };
                p > n.saturating_add(*m)
            }
            NatRule::Finite { members } => members.contains(&n),
        }
    }
}

impl FromStr for NatRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        let num = |a: Option<&str>| -> Result<u64> {
            a.ok_or_else(|| Error::Parse(format!("{name} needs a numeric argument")))?
                .parse()
                .map_err(|e| Error::Parse(format!("{name}: {e}")))
        };
        Ok(match name {
            "all" | "naturals" => NatRule::All,
            "evens" => NatRule::Multiples { k: 2 },
            "multiples" => NatRule::Multiples { k: num(arg)? },
            "square-blocks" => NatRule::SquareBlocks,
            "triadic-blocks" => NatRule::TriadicBlocks,
            "powers-of-two" => NatRule::PowersOfTwo,
            "avoid-powers" => NatRule::AvoidPowersWithin { m: num(arg)? },
            "explicit" => {
                let members = arg
                    .unwrap_or("")
                    .split(',')
                    .filter(|t| !t.trim().is_empty())
                    .map(|t| t.trim().parse().map_err(|e| Error::Parse(format!("explicit: {e}"))))
                    .collect::<Result<Vec<u64>>>()?;
                NatRule::Finite { members }
            }
            other => return Err(Error::Parse(format!("unknown set rule {other:?}"))),
        })
    }
}

impl fmt::Display for NatRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NatRule::All => write!(f, "all"),
            NatRule::Multiples { k } => write!(f, "multiples:{k}"),
            NatRule::SquareBlocks => write!(f, "square-blocks"),
            NatRule::TriadicBlocks => write!(f, "triadic-blocks"),
            NatRule::PowersOfTwo => write!(f, "powers-of-two"),
            NatRule::AvoidPowersWithin { m } => write!(f, "avoid-powers:{m}"),
            NatRule::Finite { members } => {
                let parts: Vec<String> = members.iter().map(u64::to_string).collect();
                write!(f, "explicit:{}", parts.join(","))
            }
        }
    }
}
