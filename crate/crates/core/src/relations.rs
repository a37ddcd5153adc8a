//! Finite-horizon evidence for proximal, asymptotic and syndetically
//! proximal pairs, DC1 density profiles, return times and translation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::natsets::{classify_window, gap_profile, GapProfile, SyndeticVerdict, ThickVerdict, WindowSet};
use crate::recipe::StreamRecipe;
use crate::words::{SymbolStream, Word};

/// `2^{-exponent}`; when `exact` is false the value is only an upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DyadicBound {
    pub exponent: u64,
    pub exact: bool,
}

impl DyadicBound {
    pub fn as_f64(&self) -> f64 {
        (-(self.exponent as f64)).exp2()
    }
}

/// Agreement lengths `a_n = max{k ≤ cap : x_{[n,n+k)} = y_{[n,n+k)}}` for `n ≤ horizon`.
pub fn agreement_lengths(exec: Exec, x: &SymbolStream, y: &SymbolStream, horizon: u64, cap: u64) -> Vec<u64> {
    let len = (horizon + cap) as usize;
    let diff = exec.map(len, |i| x.at(i as u64) != y.at(i as u64));
    let mut out = vec![0u64; horizon as usize + 1];
    let mut next = len as u64;
    for i in (0..len).rev() {
        if diff[i] {
            next = i as u64;
        }
        if i <= horizon as usize {
            out[i] = (next - i as u64).min(cap);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelEvidence {
    /// Agreement length: `n` is close when the streams agree on `[n, n+m)`.
    pub m: u64,
    pub close_count: u64,
    pub close: GapProfile,
    pub far: GapProfile,
    pub close_syndetic: SyndeticVerdict,
    pub far_thick: ThickVerdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairVerdict {
    pub horizon: u64,
    pub levels: Vec<LevelEvidence>,
    pub first_difference_index: Option<u64>,
    pub last_difference_index: Option<u64>,
    /// Inclusive tail window used for the lim inf / lim sup estimates.
    pub tail_window: (u64, u64),
    /// `min` of `d(σⁿx, σⁿy)` over the tail.
    pub liminf_estimate: DyadicBound,
    /// `max` of `d(σⁿx, σⁿy)` over the tail.
    pub limsup_estimate: DyadicBound,
    pub proximal_evidence: bool,
    pub sprox_evidence: bool,
    /// A difference occurs inside the tail window.
    pub non_asymptotic_evidence: bool,
}

impl PairVerdict {
    pub fn level(&self, m: u64) -> Option<&LevelEvidence> {
        self.levels.iter().find(|l| l.m == m)
    }
}

pub fn close_set(x: &SymbolStream, y: &SymbolStream, horizon: u64, m: u64) -> WindowSet {
    let a = agreement_lengths(Exec::default(), x, y, horizon, m);
    WindowSet::from_flags(&a.iter().map(|&k| k >= m).collect::<Vec<_>>()).expect("nonempty")
}

pub fn pair_profile(x: &SymbolStream, y: &SymbolStream, horizon: u64, ladder: &[u64]) -> Result<PairVerdict> {
    pair_profile_with(Exec::default(), x, y, horizon, ladder)
}

/// `ladder` lists agreement lengths `m` (thresholds `2^{-m}`), strictly increasing.
pub fn pair_profile_with(
    exec: Exec,
    x: &SymbolStream,
    y: &SymbolStream,
    horizon: u64,
    ladder: &[u64],
) -> Result<PairVerdict> {
    if horizon < 1 {
        return Err(Error::Domain("horizon must be at least 1".into()));
    }
    if ladder.is_empty() || ladder.windows(2).any(|w| w[0] >= w[1]) || ladder[0] == 0 {
        return Err(Error::Domain("epsilon ladder must be nonempty with strictly increasing m ≥ 1".into()));
    }
    x.alphabet().ensure_same(y.alphabet())?;
    let cap = *ladder.last().unwrap();
    let agree = agreement_lengths(exec, x, y, horizon, cap);
    let levels = exec.map_items(ladder, |&m| {
        let close = WindowSet::from_flags(&agree.iter().map(|&k| k >= m).collect::<Vec<_>>()).expect("nonempty");
        let far = close.complement();
        let close_class = classify_window(&close).expect("horizon ≥ 1");
        let far_class = classify_window(&far).expect("horizon ≥ 1");
        LevelEvidence {
            m,
            close_count: close.len() as u64,
            close: gap_profile(&close),
            far: gap_profile(&far),
            close_syndetic: close_class.syndetic,
            far_thick: far_class.thick,
        }
    });
    let diffs: Vec<u64> = (0..=horizon).filter(|&n| agree[n as usize] == 0).collect();
    let tail = (horizon.div_ceil(2), horizon);
    let tail_agree = &agree[tail.0 as usize..=tail.1 as usize];
    let max_agree = *tail_agree.iter().max().unwrap();
    let min_agree = *tail_agree.iter().min().unwrap();
    let liminf_estimate = DyadicBound { exponent: max_agree, exact: max_agree < cap };
    let limsup_estimate = DyadicBound { exponent: min_agree, exact: min_agree < cap };
    Ok(PairVerdict {
        horizon,
        first_difference_index: diffs.first().copied(),
        last_difference_index: diffs.last().copied(),
        tail_window: tail,
        liminf_estimate,
        limsup_estimate,
        proximal_evidence: max_agree >= cap,
        sprox_evidence: levels.iter().all(|l| l.close_syndetic.is_syndetic()),
        non_asymptotic_evidence: min_agree == 0,
        levels,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityProfile {
    pub threshold: f64,
    /// `d < threshold` exactly when the streams agree on this many symbols.
    pub agreement_length: u64,
    pub horizon: u64,
    /// Inclusive range of `n` over which `r_n` is inspected.
    pub tail_window: (u64, u64),
    pub phi_est: f64,
    pub phi_star_est: f64,
    /// `(count, n)` realizing `phi_est`.
    pub phi_witness: (u64, u64),
    /// `(count, n)` realizing `phi_star_est`.
    pub phi_star_witness: (u64, u64),
}

/// Smallest `j` with `2^{-j} < t`.
pub fn agreement_length_for(t: f64) -> Result<u64> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::Domain(format!("threshold {t} outside (0, 1]")));
    }
    let mut j = 0;
    while (-(j as f64)).exp2() >= t {
        j += 1;
    }
    Ok(j)
}

/// Running ratios `r_n = #{0 ≤ i < n : d(σⁱx, σⁱy) < t} / n`, `1 ≤ n ≤ horizon`.
pub fn running_ratios(exec: Exec, x: &SymbolStream, y: &SymbolStream, horizon: u64, t: f64) -> Result<Vec<(u64, u64)>> {
    let j = agreement_length_for(t)?;
    let agree = agreement_lengths(exec, x, y, horizon, j.max(1));
    let mut count = 0;
    Ok((1..=horizon)
        .map(|n| {
            if agree[n as usize - 1] >= j {
                count += 1;
            }
            (count, n)
        })
        .collect())
}

pub fn dc1_profile(x: &SymbolStream, y: &SymbolStream, horizon: u64, t: f64, tail_fraction: f64) -> Result<DensityProfile> {
    dc1_profile_with(Exec::default(), x, y, horizon, t, tail_fraction)
}

pub fn dc1_profile_with(
    exec: Exec,
    x: &SymbolStream,
    y: &SymbolStream,
    horizon: u64,
    t: f64,
    tail_fraction: f64,
) -> Result<DensityProfile> {
    if horizon < 1 {
        return Err(Error::Domain("horizon must be at least 1".into()));
    }
    if !(0.0..1.0).contains(&tail_fraction) {
        return Err(Error::Domain(format!("tail fraction {tail_fraction} outside [0, 1)")));
    }
    let ratios = running_ratios(exec, x, y, horizon, t)?;
    let start = ((tail_fraction * horizon as f64).ceil() as u64).clamp(1, horizon);
    let tail = &ratios[start as usize - 1..];
    let value = |&(c, n): &(u64, u64)| c as f64 / n as f64;
    // exact rational comparison c1/n1 < c2/n2 ⇔ c1·n2 < c2·n1
    let lt = |a: &(u64, u64), b: &(u64, u64)| (a.0 as u128 * b.1 as u128) < (b.0 as u128 * a.1 as u128);
    let mut lo = tail[0];
    let mut hi = tail[0];
    for r in tail {
        if lt(r, &lo) {
            lo = *r;
        }
        if lt(&hi, r) {
            hi = *r;
        }
    }
    Ok(DensityProfile {
        threshold: t,
        agreement_length: agreement_length_for(t)?,
        horizon,
        tail_window: (start, horizon),
        phi_est: value(&lo),
        phi_star_est: value(&hi),
        phi_witness: lo,
        phi_star_witness: hi,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum DensityCheck {
    Checked { max_gap: u64, bound: f64, slack: f64, phi_est: f64, holds: bool },
    Skipped { reason: String },
}

/// `Φ ≥ 1/(2M) − 2M/horizon` when the close set at the profile's threshold
/// has max gap `M`.
pub fn sprox_density_bound_check(verdict: &PairVerdict, profile: &DensityProfile) -> Result<DensityCheck> {
    if verdict.horizon != profile.horizon {
        return Err(Error::Domain(format!(
            "verdict horizon {} differs from profile horizon {}",
            verdict.horizon, profile.horizon
        )));
    }
    let level = verdict.level(profile.agreement_length).ok_or_else(|| {
        Error::Domain(format!("verdict has no level for agreement length {}", profile.agreement_length))
    })?;
    if !level.close_syndetic.is_syndetic() {
        return Ok(DensityCheck::Skipped {
            reason: format!("close set at agreement length {} shows growing gaps", level.m),
        });
    }
    let m = level.close.max_gap;
    let bound = 1.0 / (2.0 * m as f64);
    let slack = 2.0 * m as f64 / verdict.horizon as f64;
    Ok(DensityCheck::Checked { max_gap: m, bound, slack, phi_est: profile.phi_est, holds: profile.phi_est >= bound - slack })
}

/// `{n ≤ horizon : x_{[n, n+|w|)} = w}`.
pub fn hitting_times(x: &SymbolStream, w: &Word, horizon: u64) -> Result<WindowSet> {
    hitting_times_with(Exec::default(), x, w, horizon)
}

pub fn hitting_times_with(exec: Exec, x: &SymbolStream, w: &Word, horizon: u64) -> Result<WindowSet> {
    x.alphabet().ensure_same(w.alphabet())?;
    let w = w.symbols();
    Ok(WindowSet::from_predicate(horizon, exec, |n| {
        w.iter().enumerate().all(|(k, &c)| x.at(n + k as u64) == c)
    }))
}

/// `(x ⊕ z)_n = (x_n + z_n) mod m` on symbol indices.
pub fn translate_mod(x: &SymbolStream, z: &SymbolStream) -> Result<SymbolStream> {
    let m = x.alphabet().len();
    if z.alphabet().len() != m {
        return Err(Error::Domain(format!("alphabet sizes {m} and {} differ", z.alphabet().len())));
    }
    let (xa, za) = (x.clone(), z.clone());
    Ok(SymbolStream::new(
        x.alphabet().clone(),
        StreamRecipe::Translate { x: Box::new(x.recipe().clone()), z: Box::new(z.recipe().clone()) },
        move |n| ((xa.at(n) as usize + za.at(n) as usize) % m) as u8,
    ))
}
