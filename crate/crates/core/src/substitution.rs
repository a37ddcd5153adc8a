//! Constant-length substitutions: iteration, primitivity, coincidences,
//! column number, mutual exclusivity/attraction and one-sided fixed points.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::recipe::StreamRecipe;
use crate::words::{Alphabet, Sym, SymbolStream, Word};

/// Default cap on the length of materialized iterates.
pub const DEFAULT_SIZE_BUDGET: usize = 1 << 26;

/// A letter-to-word map `τ: A → A⁺`.
#[derive(Clone, PartialEq, Eq)]
pub struct Substitution {
    alphabet: Alphabet,
    images: Vec<Vec<Sym>>,
}

impl Substitution {
    pub fn new(alphabet: Alphabet, images: Vec<Word>) -> Result<Self> {
        if images.len() != alphabet.len() {
            return Err(Error::Domain(format!("{} images for {} letters", images.len(), alphabet.len())));
        }
        for w in &images {
            alphabet.ensure_same(w.alphabet())?;
            if w.is_empty() {
                return Err(Error::Domain("substitution images must be nonempty".into()));
            }
        }
        Ok(Self { alphabet, images: images.into_iter().map(Word::into_symbols).collect() })
    }

    /// Parses `a->aab; b->bad; …`. Letters are ordered by first appearance
    /// on a left-hand side.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rules: Vec<(char, String)> = Vec::new();
        for part in text.split([';', '\n']).map(str::trim).filter(|p| !p.is_empty()) {
            let (lhs, rhs) = part
                .split_once("->")
                .ok_or_else(|| Error::Parse(format!("rule {part:?} lacks `->`")))?;
            let mut chars = lhs.trim().chars();
            let (Some(a), None) = (chars.next(), chars.next()) else {
                return Err(Error::Parse(format!("left side of {part:?} must be one letter")));
            };
            if rules.iter().any(|(b, _)| *b == a) {
                return Err(Error::Parse(format!("letter {a:?} has two rules")));
            }
            rules.push((a, rhs.trim().to_string()));
        }
        let alphabet = Alphabet::new(rules.iter().map(|(a, _)| *a))?;
        let images = rules.iter().map(|(_, w)| alphabet.word(w)).collect::<Result<Vec<_>>>()?;
        Self::new(alphabet, images)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn image(&self, a: char) -> Result<Word> {
        let s = self.alphabet.index_of_checked(a)?;
        Ok(Word::from_raw(&self.alphabet, self.images[s as usize].clone()))
    }

    fn letters(&self) -> std::ops::Range<Sym> {
        0..self.alphabet.len() as Sym
    }

    /// `τⁿ(w)`, refusing to materialize more than `budget` symbols.
    pub fn apply_power_budget(&self, w: &Word, n: u32, budget: usize) -> Result<Word> {
        self.alphabet.ensure_same(w.alphabet())?;
        let mut cur = w.symbols().to_vec();
        for _ in 0..n {
            let next_len: u128 = cur.iter().map(|&s| self.images[s as usize].len() as u128).sum();
            if next_len > budget as u128 {
                return Err(Error::BudgetExceeded { requested: next_len, budget });
            }
            cur = cur.iter().flat_map(|&s| self.images[s as usize].iter().copied()).collect();
        }
        Ok(Word::from_raw(&self.alphabet, cur))
    }

    pub fn apply_power(&self, w: &Word, n: u32) -> Result<Word> {
        self.apply_power_budget(w, n, DEFAULT_SIZE_BUDGET)
    }

    pub fn constant_length(&self) -> ConstantLength {
        let p = self.images[0].len();
        match self.images.iter().position(|w| w.len() != p) {
            None => ConstantLength::Constant { p },
            Some(i) => ConstantLength::Varying {
                witnesses: (self.alphabet.symbol(0), self.alphabet.symbol(i as Sym)),
            },
        }
    }

    fn require_constant(&self) -> Result<usize> {
        match self.constant_length() {
            ConstantLength::Constant { p } => Ok(p),
            ConstantLength::Varying { witnesses } => Err(Error::Precondition(format!(
                "substitution is not of constant length ({:?} vs {:?})",
                witnesses.0, witnesses.1
            ))),
        }
    }

    /// Smallest `n ≤ bound` such that every letter occurs in every `τⁿ(b)`.
    pub fn is_primitive(&self, bound: u32) -> Primitivity {
        let k = self.alphabet.len();
        let base: Vec<Vec<bool>> = self
            .letters()
            .map(|b| {
                let mut row = vec![false; k];
                self.images[b as usize].iter().for_each(|&a| row[a as usize] = true);
                row
            })
            .collect();
        let mut m = base.clone();
        for n in 1..=bound {
            if m.iter().all(|row| row.iter().all(|&x| x)) {
                return Primitivity { primitive: true, depth: Some(n), bound };
            }
            // m ← m·base: a reaches c in n+1 steps if it reaches some b in n steps and b → c
            m = m
                .iter()
                .map(|row| {
                    (0..k).map(|c| (0..k).any(|b| row[b] && base[b][c])).collect()
                })
                .collect();
        }
        Primitivity { primitive: false, depth: None, bound }
    }

    /// `τ^t(a)_i` for constant length `p`, reading `i` in base `p`.
    pub(crate) fn letter_at(&self, a: Sym, t: u32, i: u64, p: u64) -> Sym {
        let mut digits = Vec::with_capacity(t as usize);
        let mut i = i;
        for _ in 0..t {
            digits.push((i % p) as usize);
            i /= p;
        }
        digits.iter().rev().fold(a, |cur, &d| self.images[cur as usize][d])
    }

    /// First `(t, i)` in scan order with `τ^t(a)_i` independent of `a`.
    pub fn coincidence_certificate(&self, t_max: u32) -> Result<Option<CoincidenceCertificate>> {
        let p = self.require_constant()? as u64;
        for t in 1..=t_max {
            let columns = p.checked_pow(t).ok_or(Error::BudgetExceeded { requested: u128::MAX, budget: 0 })?;
            for i in 0..columns {
                let e = self.letter_at(0, t, i, p);
                if self.letters().all(|a| self.letter_at(a, t, i, p) == e) {
                    return Ok(Some(CoincidenceCertificate::new(self, t, i, self.alphabet.symbol(e))?));
                }
            }
        }
        Ok(None)
    }

    /// `min_{k ≤ k_max} min_j #{τ^k(a)_j : a}` with an exactness certificate
    /// when one is available.
    pub fn column_number_estimate(&self, k_max: u32) -> Result<ColumnNumber> {
        let p = self.require_constant()? as u64;
        let mut best: Option<(usize, u32, u64)> = None;
        for k in 1..=k_max {
            let columns = p.checked_pow(k).ok_or(Error::BudgetExceeded { requested: u128::MAX, budget: 0 })?;
            for j in 0..columns {
                let col: BTreeSet<Sym> = self.letters().map(|a| self.letter_at(a, k, j, p)).collect();
                if best.is_none_or(|(b, _, _)| col.len() < b) {
                    best = Some((col.len(), k, j));
                }
            }
        }
        let (estimate, depth, column) = best.unwrap_or((self.alphabet.len(), 0, 0));
        let exact_value = self.column_number_exact();
        let certificate = if estimate == 1 {
            Some(ColumnCertificate::Coincidence)
        } else if estimate == 2 {
            self.pair_reachability()?
                .entries
                .iter()
                .find(|e| e.class == PairClass::Exclusive)
                .map(|e| ColumnCertificate::ExclusivePair { u: e.u, v: e.v })
                .or_else(|| (exact_value == estimate).then_some(ColumnCertificate::ColumnSetClosure))
        } else {
            (exact_value == estimate).then_some(ColumnCertificate::ColumnSetClosure)
        };
        Ok(ColumnNumber { estimate, depth, column, k_max, exact: certificate.is_some(), certificate })
    }

    /// `C(τ)` as the smallest column set reachable from the full alphabet.
    fn column_number_exact(&self) -> usize {
        let p = self.images[0].len();
        let full: BTreeSet<Sym> = self.letters().collect();
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([full]);
        let mut best = self.alphabet.len();
        while let Some(set) = queue.pop_front() {
            for i in 0..p {
                let next: BTreeSet<Sym> = set.iter().map(|&a| self.images[a as usize][i]).collect();
                best = best.min(next.len());
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        best
    }

    /// Classifies every unordered pair of distinct letters through the pair graph
    /// `{u, v} → {τ(u)_i, τ(v)_i}`.
    pub fn pair_reachability(&self) -> Result<PairReport> {
        let p = self.require_constant()?;
        let k = self.alphabet.len();
        let node = |a: Sym, b: Sym| (a.min(b), a.max(b));
        let mut reach: BTreeMap<(Sym, Sym), BTreeSet<(Sym, Sym)>> = BTreeMap::new();
        for u in 0..k as Sym {
            for v in u..k as Sym {
                let mut seen = BTreeSet::from([(u, v)]);
                let mut queue = VecDeque::from([(u, v)]);
                while let Some((a, b)) = queue.pop_front() {
                    for i in 0..p {
                        let n = node(self.images[a as usize][i], self.images[b as usize][i]);
                        if seen.insert(n) {
                            queue.push_back(n);
                        }
                    }
                }
                reach.insert((u, v), seen);
            }
        }
        let exclusive = |n: &(Sym, Sym)| reach[n].iter().all(|&(a, b)| a != b);
        let show = |(a, b): (Sym, Sym)| PairNode { u: self.alphabet.symbol(a), v: self.alphabet.symbol(b) };
        let mut entries = Vec::new();
        for u in 0..k as Sym {
            for v in u + 1..k as Sym {
                let r = &reach[&(u, v)];
                let equal_witness = r.iter().find(|(a, b)| a == b).copied();
                let exclusive_witness = r.iter().find(|n| n.0 != n.1 && exclusive(n)).copied();
                let class = match (equal_witness, exclusive_witness) {
                    (None, _) => PairClass::Exclusive,
                    (Some(_), None) => PairClass::Attractive,
                    (Some(_), Some(_)) => PairClass::Neither,
                };
                entries.push(PairEntry {
                    u: self.alphabet.symbol(u),
                    v: self.alphabet.symbol(v),
                    class,
                    reachable: r.iter().filter(|n| n.0 != n.1).map(|&n| show(n)).collect(),
                    reaches_equal: equal_witness.map(|(a, _)| self.alphabet.symbol(a)),
                    reaches_exclusive: exclusive_witness.map(show),
                });
            }
        }
        Ok(PairReport { entries })
    }

    /// Prefix of the one-sided fixed point `lim τⁿ(a)`.
    pub fn fixed_point_prefix(&self, a: char, length: usize) -> Result<Word> {
        let s = self.fixed_point_letter(a)?;
        let mut cur = vec![s];
        while cur.len() < length {
            let next: Vec<Sym> = cur.iter().flat_map(|&c| self.images[c as usize].iter().copied()).collect();
            cur = next;
        }
        cur.truncate(length.max(1));
        Ok(Word::from_raw(&self.alphabet, cur))
    }

    fn fixed_point_letter(&self, a: char) -> Result<Sym> {
        let s = self.alphabet.index_of_checked(a)?;
        let img = &self.images[s as usize];
        if img[0] != s || img.len() < 2 {
            return Err(Error::NoFixedPoint(a));
        }
        Ok(s)
    }

    /// The fixed point as an index-evaluable stream (constant length only):
    /// `x_n = τ^t(a)_n` for any `t` with `p^t > n`.
    pub fn fixed_point_stream(&self, a: char) -> Result<SymbolStream> {
        let p = self.require_constant()? as u64;
        let s = self.fixed_point_letter(a)?;
        let tau = Arc::new(self.clone());
        Ok(SymbolStream::new(
            self.alphabet.clone(),
            StreamRecipe::FixedPoint { rules: self.to_string(), letter: a },
            move |n| {
                let mut t = 0u32;
                let mut span = 1u64;
                while span <= n {
                    span = span.saturating_mul(p);
                    t += 1;
                }
                tau.letter_at(s, t, n, p)
            },
        ))
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rules: Vec<String> = self
            .letters()
            .map(|a| {
                let img: String = self.images[a as usize].iter().map(|&c| self.alphabet.symbol(c)).collect();
                format!("{}->{img}", self.alphabet.symbol(a))
            })
            .collect();
        write!(f, "{}", rules.join("; "))
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Substitution({self})")
    }
}

impl FromStr for Substitution {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl Serialize for Substitution {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ConstantLength {
    Constant { p: usize },
    Varying { witnesses: (char, char) },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Primitivity {
    pub primitive: bool,
    /// Smallest positive power, when found.
    pub depth: Option<u32>,
    pub bound: u32,
}

/// A column where all `τ^t`-images agree; rechecked on construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CoincidenceCertificate {
    t: u32,
    i: u64,
    e: char,
}

impl CoincidenceCertificate {
    pub fn new(tau: &Substitution, t: u32, i: u64, e: char) -> Result<Self> {
        let p = tau.require_constant()? as u64;
        let es = tau.alphabet.index_of_checked(e)?;
        let in_range = p.checked_pow(t).is_some_and(|cols| i < cols);
        if !in_range || tau.letters().any(|a| tau.letter_at(a, t, i, p) != es) {
            return Err(Error::ConstructionInvariant(format!("column {i} at depth {t} is not constant {e:?}")));
        }
        Ok(Self { t, i, e })
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn i(&self) -> u64 {
        self.i
    }

    pub fn e(&self) -> char {
        self.e
    }
}

impl fmt::Display for CoincidenceCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(t={}, i={}, e={})", self.t, self.i, self.e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ColumnCertificate {
    /// The estimate is 1, which is the least possible value.
    Coincidence,
    /// An exclusive pair keeps two letters in every column.
    ExclusivePair { u: char, v: char },
    /// Exhaustive search over reachable column sets attains no smaller size.
    ColumnSetClosure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ColumnNumber {
    pub estimate: usize,
    pub depth: u32,
    pub column: u64,
    pub k_max: u32,
    pub exact: bool,
    pub certificate: Option<ColumnCertificate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct PairNode {
    pub u: char,
    pub v: char,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairClass {
    Exclusive,
    Attractive,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairEntry {
    pub u: char,
    pub v: char,
    pub class: PairClass,
    /// Distinct-letter pairs reachable from `{u, v}`, itself included.
    pub reachable: Vec<PairNode>,
    /// A letter `e` with `{e, e}` reachable, if any.
    pub reaches_equal: Option<char>,
    /// A reachable exclusive pair, if any.
    pub reaches_exclusive: Option<PairNode>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairReport {
    pub entries: Vec<PairEntry>,
}

impl PairReport {
    pub fn get(&self, a: char, b: char) -> Option<&PairEntry> {
        self.entries.iter().find(|e| (e.u, e.v) == (a, b) || (e.u, e.v) == (b, a))
    }
}

/// `a→aab, b→bad, c→ccd, d→dcb`.
pub fn four_letter_example() -> Substitution {
    Substitution::parse("a->aab; b->bad; c->ccd; d->dcb").unwrap()
}

/// `0→001, 1→100`.
pub fn binary_coincidence_example() -> Substitution {
    Substitution::parse("0->001; 1->100").unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn iteration_examples() {
        let t = binary_coincidence_example();
        let zero = t.alphabet().word("0").unwrap();
        assert_eq!(t.apply_power(&zero, 2).unwrap().to_string(), "001001100");
        assert_eq!(t.apply_power(&zero, 0).unwrap(), zero);
        let e = four_letter_example();
        let a = e.alphabet().word("a").unwrap();
        assert_eq!(e.apply_power(&a, 1).unwrap().to_string(), "aab");
        assert!(matches!(e.apply_power_budget(&a, 10, 1000), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn parse_errors() {
        assert!(Substitution::parse("a->ab").is_err());
        assert!(Substitution::parse("a->a; a->b").is_err());
        assert!(Substitution::parse("ab->a").is_err());
        assert!(Substitution::parse("a->").is_err());
        let t = four_letter_example();
        assert_eq!(Substitution::parse(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn constant_length_examples() {
        assert_eq!(four_letter_example().constant_length(), ConstantLength::Constant { p: 3 });
        assert_eq!(binary_coincidence_example().constant_length(), ConstantLength::Constant { p: 3 });
        let v = Substitution::parse("0->01; 1->0").unwrap();
        assert_eq!(v.constant_length(), ConstantLength::Varying { witnesses: ('0', '1') });
        assert!(v.coincidence_certificate(2).is_err());
    }

    #[test]
    fn primitivity_examples() {
        assert_eq!(binary_coincidence_example().is_primitive(5).depth, Some(1));
        let p = four_letter_example().is_primitive(5);
        assert!(p.primitive);
        assert_eq!(p.depth, Some(3));
        let split = Substitution::parse("0->00; 1->11").unwrap();
        assert!(!split.is_primitive(50).primitive);
    }

    #[test]
    fn coincidence_examples() {
        let c = binary_coincidence_example().coincidence_certificate(2).unwrap().unwrap();
        assert_eq!((c.t(), c.i(), c.e()), (1, 1, '0'));
        assert_eq!(c.to_string(), "(t=1, i=1, e=0)");
        assert_eq!(four_letter_example().coincidence_certificate(5).unwrap(), None);
        let single = Substitution::parse("a->aa").unwrap();
        let c = single.coincidence_certificate(1).unwrap().unwrap();
        assert_eq!((c.t(), c.i()), (1, 0));
        assert!(CoincidenceCertificate::new(&four_letter_example(), 1, 0, 'a').is_err());
    }

    #[test]
    fn column_number_examples() {
        let c = binary_coincidence_example().column_number_estimate(2).unwrap();
        assert_eq!((c.estimate, c.depth, c.column), (1, 1, 1));
        assert!(c.exact);
        let c = four_letter_example().column_number_estimate(3).unwrap();
        assert_eq!((c.estimate, c.depth, c.column), (2, 1, 1));
        assert!(c.exact);
        assert!(matches!(c.certificate, Some(ColumnCertificate::ExclusivePair { .. })));
        let id = Substitution::parse("a->aa; b->bb").unwrap();
        assert_eq!(id.column_number_estimate(3).unwrap().estimate, 2);
    }

    #[test]
    fn pair_examples() {
        let r = four_letter_example().pair_reachability().unwrap();
        let bd = r.get('b', 'd').unwrap();
        assert_eq!(bd.class, PairClass::Exclusive);
        let ac = PairNode { u: 'a', v: 'c' };
        let bdn = PairNode { u: 'b', v: 'd' };
        assert_eq!(bd.reachable, vec![ac, bdn]);
        assert_eq!(r.get('a', 'c').unwrap().class, PairClass::Exclusive);
        let ab = r.get('a', 'b').unwrap();
        assert_eq!(ab.class, PairClass::Neither);
        assert_eq!(ab.reaches_equal, Some('a'));
        let same = Substitution::parse("0->01; 1->01").unwrap();
        assert_eq!(same.pair_reachability().unwrap().get('0', '1').unwrap().class, PairClass::Attractive);
    }

    #[test]
    fn fixed_point_examples() {
        let t = four_letter_example();
        assert_eq!(t.fixed_point_prefix('a', 9).unwrap().to_string(), "aabaabbad");
        assert_eq!(t.fixed_point_prefix('b', 3).unwrap().to_string(), "bad");
        assert_eq!(t.fixed_point_prefix('a', 1).unwrap().to_string(), "a");
        assert_eq!(binary_coincidence_example().fixed_point_prefix('1', 4).unwrap().to_string(), "1000");
        let no_fix = Substitution::parse("0->01; 1->01").unwrap();
        assert!(matches!(no_fix.fixed_point_prefix('1', 4), Err(Error::NoFixedPoint('1'))));
        let x = t.fixed_point_stream('a').unwrap();
        assert_eq!(x.factor(3, 5).to_string(), "aab");
        assert_eq!(x.prefix(243), t.fixed_point_prefix('a', 243).unwrap());
    }

    fn small_substitution() -> impl Strategy<Value = Substitution> {
        (1usize..=3, 1usize..=3).prop_flat_map(|(k, p)| {
            proptest::collection::vec(proptest::collection::vec(0..k as Sym, p), k).prop_map(move |imgs| {
                let alphabet = Alphabet::new("abc".chars().take(k)).unwrap();
                let images = imgs.into_iter().map(|w| Word::from_symbols(&alphabet, w).unwrap()).collect();
                Substitution::new(alphabet, images).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn powers_compose(t in small_substitution(), n in 0u32..3, m in 0u32..3, seed in "[abc]{1,3}") {
            let seed: String = seed.chars().filter(|c| t.alphabet().index_of(*c).is_some()).collect();
            prop_assume!(!seed.is_empty());
            let w = t.alphabet().word(&seed).unwrap();
            let lhs = t.apply_power(&w, n + m).unwrap();
            let rhs = t.apply_power(&t.apply_power(&w, m).unwrap(), n).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn coincidence_and_column_number_agree(t in small_substitution()) {
            let c = t.column_number_estimate(3).unwrap();
            if let Some(cert) = t.coincidence_certificate(3).unwrap() {
                prop_assert_eq!(c.estimate, 1);
                prop_assert_eq!(c.depth, cert.t());
            } else {
                prop_assert!(c.estimate >= 2);
            }
            let pairs = t.pair_reachability().unwrap();
            if pairs.entries.iter().any(|e| e.class == PairClass::Exclusive) {
                prop_assert!(c.estimate >= 2);
            }
        }
    }
}
