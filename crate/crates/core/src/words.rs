//! Alphabets, finite words, lazily evaluated one-sided streams and the
//! cylinder metric.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::recipe::StreamRecipe;

/// Index of a symbol inside its alphabet.
pub type Sym = u8;

/// An ordered finite set of distinct symbols.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Arc<[char]>,
}

impl Alphabet {
    pub fn new(symbols: impl IntoIterator<Item = char>) -> Result<Self> {
        let symbols: Vec<char> = symbols.into_iter().collect();
        if symbols.is_empty() {
            return Err(Error::InvalidAlphabet("alphabet is empty".into()));
        }
        if symbols.len() > Sym::MAX as usize + 1 {
            return Err(Error::InvalidAlphabet("more than 256 symbols".into()));
        }
        let distinct: BTreeSet<char> = symbols.iter().copied().collect();
        if distinct.len() != symbols.len() {
            return Err(Error::InvalidAlphabet(format!(
                "duplicate symbols in {:?}",
                symbols.iter().collect::<String>()
            )));
        }
        Ok(Self { symbols: symbols.into() })
    }

    /// `{0, 1}`.
    pub fn binary() -> Self {
        Self { symbols: Arc::from(['0', '1']) }
    }

    /// `{0, …, m-1}` written with decimal digits; `m` must be in `1..=10`.
    pub fn digits(m: usize) -> Result<Self> {
        if !(1..=10).contains(&m) {
            return Err(Error::InvalidAlphabet(format!("digit alphabet of size {m}")));
        }
        Self::new((0..m as u32).map(|d| char::from_digit(d, 10).unwrap()))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn symbol(&self, s: Sym) -> char {
        self.symbols[s as usize]
    }

    pub fn index_of(&self, c: char) -> Option<Sym> {
        self.symbols.iter().position(|&d| d == c).map(|i| i as Sym)
    }

    pub fn index_of_checked(&self, c: char) -> Result<Sym> {
        self.index_of(c).ok_or(Error::UnknownSymbol(c))
    }

    pub fn word(&self, text: &str) -> Result<Word> {
        let symbols = text
            .chars()
            .map(|c| self.index_of_checked(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(Word { alphabet: self.clone(), symbols })
    }

    pub fn as_string(&self) -> String {
        self.symbols.iter().collect()
    }

    pub(crate) fn ensure_same(&self, other: &Alphabet) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch { left: self.as_string(), right: other.as_string() })
        }
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Alphabet({:?})", self.as_string())
    }
}

impl std::str::FromStr for Alphabet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::new(s.chars())
    }
}

impl Serialize for Alphabet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.as_string())
    }
}

impl<'de> Deserialize<'de> for Alphabet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A finite word over an alphabet.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Word {
    alphabet: Alphabet,
    symbols: Vec<Sym>,
}

impl Word {
    pub fn empty(alphabet: &Alphabet) -> Self {
        Self { alphabet: alphabet.clone(), symbols: Vec::new() }
    }

    /// Builds a word from symbol indices, validating them against the alphabet.
    pub fn from_symbols(alphabet: &Alphabet, symbols: Vec<Sym>) -> Result<Self> {
        if let Some(&bad) = symbols.iter().find(|&&s| s as usize >= alphabet.len()) {
            return Err(Error::Domain(format!("symbol index {bad} outside alphabet of size {}", alphabet.len())));
        }
        Ok(Self { alphabet: alphabet.clone(), symbols })
    }

    pub(crate) fn from_raw(alphabet: &Alphabet, symbols: Vec<Sym>) -> Self {
        debug_assert!(symbols.iter().all(|&s| (s as usize) < alphabet.len()));
        Self { alphabet: alphabet.clone(), symbols }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn symbols(&self) -> &[Sym] {
        &self.symbols
    }

    pub fn into_symbols(self) -> Vec<Sym> {
        self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn char_at(&self, i: usize) -> char {
        self.alphabet.symbol(self.symbols[i])
    }

    /// `w^k`.
    pub fn power(&self, k: usize) -> Word {
        Word::from_raw(&self.alphabet, self.symbols.repeat(k))
    }

    /// `w_{[i, j)}`, clamped to the word.
    pub fn slice(&self, i: usize, j: usize) -> Word {
        let j = j.min(self.len());
        let i = i.min(j);
        Word::from_raw(&self.alphabet, self.symbols[i..j].to_vec())
    }

    /// Cyclic rotation by `k` to the left.
    pub fn rotate(&self, k: usize) -> Word {
        let mut s = self.symbols.clone();
        if !s.is_empty() {
            let k = k % s.len();
            s.rotate_left(k);
        }
        Word::from_raw(&self.alphabet, s)
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        self.alphabet == other.alphabet && other.symbols.starts_with(&self.symbols)
    }

    pub fn concat(parts: &[Word]) -> Result<Word> {
        concat(parts)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.symbols {
            write!(f, "{}", self.alphabet.symbol(s))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({:?})", self.to_string())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Concatenates words over a common alphabet.
pub fn concat(parts: &[Word]) -> Result<Word> {
    let first = parts
        .first()
        .ok_or_else(|| Error::Domain("concat needs at least one part to fix the alphabet".into()))?;
    let mut symbols = Vec::with_capacity(parts.iter().map(Word::len).sum());
    for p in parts {
        first.alphabet.ensure_same(&p.alphabet)?;
        symbols.extend_from_slice(&p.symbols);
    }
    Ok(Word::from_raw(&first.alphabet, symbols))
}

/// `|w|_a`.
pub fn count_occurrences(w: &Word, a: char) -> Result<usize> {
    let a = w
        .alphabet
        .index_of(a)
        .ok_or_else(|| Error::Domain(format!("{a:?} is not in {:?}", w.alphabet.as_string())))?;
    Ok(w.symbols.iter().filter(|&&s| s == a).count())
}

/// `alp(w)`.
pub fn letters_of(w: &Word) -> BTreeSet<char> {
    w.symbols.iter().map(|&s| w.alphabet.symbol(s)).collect()
}

type Rule = Arc<dyn Fn(u64) -> Sym + Send + Sync>;

/// A one-sided infinite sequence given by a total, deterministic rule.
#[derive(Clone)]
pub struct SymbolStream {
    alphabet: Alphabet,
    rule: Rule,
    recipe: Arc<StreamRecipe>,
}

impl SymbolStream {
    /// `rule` must return indices valid for `alphabet` at every position.
    pub fn new(
        alphabet: Alphabet,
        recipe: StreamRecipe,
        rule: impl Fn(u64) -> Sym + Send + Sync + 'static,
    ) -> Self {
        Self { alphabet, rule: Arc::new(rule), recipe: Arc::new(recipe) }
    }

    /// A stream from an ad-hoc closure. Its recipe records only `name` and
    /// cannot be replayed.
    pub fn from_fn(
        alphabet: Alphabet,
        name: &str,
        rule: impl Fn(u64) -> Sym + Send + Sync + 'static,
    ) -> Self {
        Self::new(alphabet, StreamRecipe::Custom { name: name.to_string() }, rule)
    }

    pub fn constant(alphabet: &Alphabet, symbol: char) -> Result<Self> {
        let s = alphabet.index_of_checked(symbol)?;
        Ok(Self::new(
            alphabet.clone(),
            StreamRecipe::Constant { alphabet: alphabet.clone(), symbol },
            move |_| s,
        ))
    }

    /// `w^∞`.
    pub fn periodic(w: &Word) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::Domain("periodic stream of the empty word".into()));
        }
        let syms: Arc<[Sym]> = w.symbols.clone().into();
        let p = syms.len() as u64;
        Ok(Self::new(
            w.alphabet.clone(),
            StreamRecipe::Periodic { alphabet: w.alphabet.clone(), word: w.to_string() },
            move |n| syms[(n % p) as usize],
        ))
    }

    /// `w` followed by `tail^∞`.
    pub fn eventually_constant(w: &Word, tail: char) -> Result<Self> {
        let t = w.alphabet.index_of_checked(tail)?;
        let syms: Arc<[Sym]> = w.symbols.clone().into();
        Ok(Self::new(
            w.alphabet.clone(),
            StreamRecipe::EventuallyConstant {
                alphabet: w.alphabet.clone(),
                prefix: w.to_string(),
                tail,
            },
            move |n| syms.get(n as usize).copied().unwrap_or(t),
        ))
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn recipe(&self) -> &StreamRecipe {
        &self.recipe
    }

    /// `x_n`.
    pub fn at(&self, n: u64) -> Sym {
        (self.rule)(n)
    }

    pub fn char_at(&self, n: u64) -> char {
        self.alphabet.symbol(self.at(n))
    }

    /// `x_{[0, n)}`.
    pub fn prefix(&self, n: usize) -> Word {
        self.prefix_with(Exec::default(), n)
    }

    pub fn prefix_with(&self, exec: Exec, n: usize) -> Word {
        Word::from_raw(&self.alphabet, exec.map(n, |i| self.at(i as u64)))
    }

    /// `x_{[i, j]}`; the empty word when `i > j`.
    pub fn factor(&self, i: u64, j: u64) -> Word {
        if i > j {
            return Word::empty(&self.alphabet);
        }
        Word::from_raw(&self.alphabet, (i..=j).map(|n| self.at(n)).collect())
    }

    /// `σ^k x`.
    pub fn shift(&self, k: u64) -> SymbolStream {
        let inner = self.clone();
        SymbolStream::new(
            self.alphabet.clone(),
            StreamRecipe::Shift { inner: Box::new(self.recipe().clone()), offset: k },
            move |n| inner.at(n + k),
        )
    }

    /// First index in `[0, limit)` where the streams differ.
    pub fn first_difference(&self, other: &SymbolStream, limit: u64) -> Option<u64> {
        (0..limit).find(|&n| self.at(n) != other.at(n))
    }
}

impl fmt::Debug for SymbolStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymbolStream")
            .field("alphabet", &self.alphabet)
            .field("recipe", &self.recipe)
            .finish()
    }
}

impl Serialize for SymbolStream {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.recipe.serialize(s)
    }
}

/// Value of the cylinder metric `d(x, y) = 2^{-k}` as seen within a bounded
/// number of compared symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StreamDistance {
    /// `d = 2^{-k}`, `k` the first difference index.
    Exact { k: u64 },
    /// No difference in `[0, precision)`: `d ≤ 2^{-precision}`.
    Indistinguishable { precision: u64 },
}

impl StreamDistance {
    /// The exponent `k` of `2^{-k}` (an upper bound for the indistinguishable case).
    pub fn exponent(&self) -> u64 {
        match *self {
            StreamDistance::Exact { k } => k,
            StreamDistance::Indistinguishable { precision } => precision,
        }
    }

    pub fn as_f64(&self) -> f64 {
        (-(self.exponent() as f64)).exp2()
    }
}

pub fn stream_distance(x: &SymbolStream, y: &SymbolStream, precision: u64) -> Result<StreamDistance> {
    if precision == 0 {
        return Err(Error::Domain("precision must be at least 1".into()));
    }
    Ok(match x.first_difference(y, precision) {
        Some(k) => StreamDistance::Exact { k },
        None => StreamDistance::Indistinguishable { precision },
    })
}
