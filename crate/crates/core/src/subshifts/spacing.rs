use serde::Serialize;

use crate::error::{Error, Result};
use crate::natsets::{NatRule, WindowSet};
use crate::words::Word;

/// The distance set `P` of a spacing shift.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpacingSet {
    pub rule: NatRule,
}

impl SpacingSet {
    pub fn new(rule: NatRule) -> Self {
        Self { rule }
    }

    pub fn contains(&self, d: u64) -> bool {
        self.rule.contains(d)
    }

    pub fn window(&self, horizon: u64) -> WindowSet {
        WindowSet::from_rule(&self.rule, horizon)
    }
}

/// Every pair of `1`s in `w` sits at a distance in `P`.
pub fn spacing_check(p: &SpacingSet, w: &Word) -> Result<bool> {
    let one = match w.alphabet().symbols() {
        ['0', '1'] => 1,
        _ => return Err(Error::Domain(format!("spacing words are binary, got {:?}", w.alphabet()))),
    };
    let ones: Vec<u64> = (0..w.len()).filter(|&i| w.symbols()[i] == one).map(|i| i as u64).collect();
    Ok(ones
        .iter()
        .enumerate()
        .all(|(a, &i)| ones[a + 1..].iter().all(|&j| p.contains(j - i))))
}
