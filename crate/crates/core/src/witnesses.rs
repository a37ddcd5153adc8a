//! Generators for the explicit witness points: scrambled base family,
//! spread and block embeddings, block pairs for SFTs and the coded family.

use std::collections::{BTreeSet, HashSet};

use num_integer::Roots;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::recipe::StreamRecipe;
use crate::subshifts::{verify_synchronizing, CodedGenerator, VSet, VertexShift};
use crate::words::{Alphabet, Sym, SymbolStream, Word};

/// A binary stream used as the parameter of a Cantor family.
#[derive(Debug, Clone)]
pub struct ParameterStream(SymbolStream);

impl ParameterStream {
    pub fn new(eta: SymbolStream) -> Result<Self> {
        require_binary(&eta)?;
        Ok(Self(eta))
    }

    pub fn stream(&self) -> &SymbolStream {
        &self.0
    }
}

fn require_binary(x: &SymbolStream) -> Result<()> {
    if x.alphabet() != &Alphabet::binary() {
        return Err(Error::Domain(format!("expected a binary stream, got {:?}", x.alphabet())));
    }
    Ok(())
}

/// `T(j) = j(j+1)/2`.
fn triangular(j: u64) -> u64 {
    j * (j + 1) / 2
}

/// Largest `j` with `T(j) ≤ n`.
fn triangular_root(n: u64) -> u64 {
    let mut j = (2 * n).sqrt();
    while triangular(j) > n {
        j -= 1;
    }
    while triangular(j + 1) <= n {
        j += 1;
    }
    j
}

/// Start of block `k ≥ 1` in the base construction: `(k-1)(k+2)/2`.
pub fn block_start(k: u64) -> u64 {
    (k - 1) * (k + 2) / 2
}

/// Diagonal enumeration `0; 0,1; 0,1,2; …` indexed from `k = 1`.
pub fn diagonal_index(k: u64) -> u64 {
    let j = triangular_root(k - 1);
    k - 1 - triangular(j)
}

/// Block `k` of `c(η)` is `0^k η_{r(k)}`.
pub fn base_scrambled(eta: &ParameterStream) -> SymbolStream {
    let inner = eta.0.clone();
    SymbolStream::new(
        Alphabet::binary(),
        StreamRecipe::BaseScrambled { eta: Box::new(inner.recipe().clone()) },
        move |n| {
            // s_{k+1} = T(k+1) - 1, so k is the largest with T(k) ≤ n + 1
            let k = triangular_root(n + 1);
            if n == block_start(k) + k {
                inner.at(diagonal_index(k))
            } else {
                0
            }
        },
    )
}

pub fn base_scrambled_prefix(eta: &ParameterStream, length: usize) -> Result<Word> {
    if length == 0 {
        return Err(Error::Domain("length must be at least 1".into()));
    }
    Ok(base_scrambled(eta).prefix(length))
}

/// `y_n = x_k` if `n = 2^k`, else 0.
pub fn spread_embed(x: &SymbolStream) -> Result<SymbolStream> {
    require_binary(x)?;
    let inner = x.clone();
    Ok(SymbolStream::new(
        Alphabet::binary(),
        StreamRecipe::SpreadEmbed { inner: Box::new(x.recipe().clone()) },
        move |n| if n.is_power_of_two() { inner.at(n.trailing_zeros() as u64) } else { 0 },
    ))
}

/// `w(0) w(1) …` with `w(n) = (x_n)^{n+1}`.
pub fn geometric_blocks(x: &SymbolStream) -> Result<SymbolStream> {
    require_binary(x)?;
    let inner = x.clone();
    Ok(SymbolStream::new(
        Alphabet::binary(),
        StreamRecipe::GeometricBlocks { inner: Box::new(x.recipe().clone()) },
        move |i| inner.at(triangular_root(i)),
    ))
}

/// `z_0 = 0` and `z_i = x_n` on `[4^n, 4^{n+1})`.
pub fn quartic_spread(x: &SymbolStream) -> Result<SymbolStream> {
    require_binary(x)?;
    let inner = x.clone();
    Ok(SymbolStream::new(
        Alphabet::binary(),
        StreamRecipe::QuarticSpread { inner: Box::new(x.recipe().clone()) },
        move |i| if i == 0 { 0 } else { inner.at(((63 - i.leading_zeros()) / 2) as u64) },
    ))
}

/// Two distinct words of equal length, optionally tied to the shift they live in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockPair {
    pub b: Word,
    pub c: Word,
    pub context: Option<VertexShift>,
}

impl BlockPair {
    /// Checks lengths and that `BB, BC, CB, CC` lie in the language of `context`.
    pub fn new(b: Word, c: Word, context: VertexShift) -> Result<Self> {
        let mut bp = Self::unchecked(b, c)?;
        for (p, q) in [(&bp.b, &bp.b), (&bp.b, &bp.c), (&bp.c, &bp.b), (&bp.c, &bp.c)] {
            let pq = Word::concat(&[p.clone(), q.clone()])?;
            if !context.language_contains(&pq) {
                return Err(Error::ConstructionInvariant(format!("{pq} is not admissible")));
            }
        }
        bp.context = Some(context);
        Ok(bp)
    }

    /// Checks only `|B| = |C|` and `B ≠ C`.
    pub fn unchecked(b: Word, c: Word) -> Result<Self> {
        b.alphabet().ensure_same(c.alphabet())?;
        if b.len() != c.len() || b.is_empty() {
            return Err(Error::ConstructionInvariant(format!("blocks {b} and {c} differ in length")));
        }
        if b == c {
            return Err(Error::ConstructionInvariant(format!("blocks coincide: {b}")));
        }
        Ok(Self { b, c, context: None })
    }

    pub fn block_len(&self) -> usize {
        self.b.len()
    }
}

/// Replaces `0` by `B` and `1` by `C` along `ξ`.
pub fn block_concat(bp: &BlockPair, xi: &SymbolStream) -> Result<SymbolStream> {
    require_binary(xi)?;
    let (b, c) = (bp.b.symbols().to_vec(), bp.c.symbols().to_vec());
    let len = b.len() as u64;
    let inner = xi.clone();
    Ok(SymbolStream::new(
        bp.b.alphabet().clone(),
        StreamRecipe::BlockConcat {
            alphabet: bp.b.alphabet().clone(),
            b: bp.b.to_string(),
            c: bp.c.to_string(),
            xi: Box::new(xi.recipe().clone()),
        },
        move |n| {
            let (k, r) = (n / len, (n % len) as usize);
            if inner.at(k) == 0 { b[r] } else { c[r] }
        },
    ))
}

/// Prefix of the block concatenation, checked against the context shift.
pub fn block_concat_witness(bp: &BlockPair, xi: &SymbolStream, length: usize) -> Result<Word> {
    let w = block_concat(bp, xi)?.prefix(length);
    if let Some(g) = &bp.context {
        if !g.language_contains(&w) {
            return Err(Error::ConstructionInvariant(format!("prefix of length {length} leaves the shift")));
        }
    }
    Ok(w)
}

/// A vertex cycle whose labels read `w`, rooted at its first vertex.
fn cycle_labelled(g: &VertexShift, w: &[Sym]) -> Option<Vec<usize>> {
    let n = w.len();
    for start in (0..g.vertex_count()).filter(|&v| g.label(v) == w[0]) {
        let mut stack = vec![vec![start]];
        while let Some(path) = stack.pop() {
            let last = *path.last().unwrap();
            if path.len() == n {
                if g.successors(last).contains(&start) {
                    return Some(path);
                }
                continue;
            }
            for &v in g.successors(last).iter().rev() {
                if g.label(v) == w[path.len()] {
                    let mut p = path.clone();
                    p.push(v);
                    stack.push(p);
                }
            }
        }
    }
    None
}

/// The cycle `u` paired with the (possibly rotated) cycle `w`: `u` runs
/// through `w_0` and a vertex off the `w`-cycle when there is one, and is a
/// shortest cycle otherwise.
pub fn connecting_cycles(g: &VertexShift, w: &Word) -> Result<(Word, Word)> {
    if !g.is_transitive().transitive {
        return Err(Error::Precondition("the shift must be transitive".into()));
    }
    if g.is_single_cycle() {
        return Err(Error::FiniteShift);
    }
    let syms = g
        .symbols_of(w)
        .filter(|s| !s.is_empty())
        .ok_or_else(|| Error::Precondition(format!("{w} is not a nonempty word over the shift alphabet")))?;
    let wc = cycle_labelled(g, &syms).ok_or_else(|| Error::Precondition(format!("{w} labels no cycle")))?;
    let on_cycle: BTreeSet<usize> = wc.iter().copied().collect();
    let w0 = wc[0];
    let outside: Vec<usize> = (0..g.vertex_count()).filter(|v| !on_cycle.contains(v)).collect();
    let (wc, u) = if outside.is_empty() {
        let u = (0..g.vertex_count())
            .filter_map(|v| g.shortest_cycle_through(v))
            .min_by_key(|c| (c.len(), c[0]))
            .ok_or_else(|| Error::InternalInvariant("strongly connected graph without cycles".into()))?;
        let shift = wc.iter().position(|&v| v == u[0]).expect("all vertices lie on the w-cycle");
        let mut wc = wc;
        wc.rotate_left(shift);
        (wc, u)
    } else {
        let best = outside
            .iter()
            .filter_map(|&b| {
                let there = g.shortest_path(w0, |v| v == b)?;
                let back = g.shortest_path(b, |v| g.successors(v).contains(&w0))?;
                Some((there.len() + back.len() - 1, there, back))
            })
            .min_by_key(|(len, there, _)| (*len, *there.last().unwrap()))
            .ok_or_else(|| Error::InternalInvariant("vertex unreachable in a transitive graph".into()))?;
        let (_, mut there, back) = best;
        there.extend_from_slice(&back[1..]);
        (wc, there)
    };
    let alphabet = g.alphabet();
    Ok((
        Word::from_raw(alphabet, g.labels_of(&wc)),
        Word::from_raw(alphabet, g.labels_of(&u)),
    ))
}

/// `B = w^{|u|}`, `C = u^{|w|}` for the cycles of [`connecting_cycles`].
pub fn derive_sft_blocks(g: &VertexShift, w: &Word) -> Result<BlockPair> {
    let (w, u) = connecting_cycles(g, w)?;
    BlockPair::new(w.power(u.len()), u.power(w.len()), g.clone())
}

/// Parameter presets for [`synchronizing_blocks`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SyncPreset {
    /// `B = s u v s u' v'`, `C = s u' v' s u v`.
    Plain,
    /// `B = s p u q u' r`, `C = s p' u' q' u r'` around the given targets.
    Targeted { u: Word, u2: Word },
}

/// Lexicographically first word of exact length `len` readable after `from`
/// whose end set satisfies `accept`.
fn first_word(g: &VertexShift, from: &VSet, len: usize, accept: &dyn Fn(&VSet) -> bool) -> Option<Vec<Sym>> {
    fn go(
        g: &VertexShift,
        set: &VSet,
        left: usize,
        accept: &dyn Fn(&VSet) -> bool,
        failed: &mut HashSet<(VSet, usize)>,
        out: &mut Vec<Sym>,
    ) -> bool {
        if left == 0 {
            return accept(set);
        }
        if failed.contains(&(set.clone(), left)) {
            return false;
        }
        for c in 0..g.alphabet().len() as Sym {
            let next = g.step(set, c);
            if next.is_empty() {
                continue;
            }
            out.push(c);
            if go(g, &next, left - 1, accept, failed, out) {
                return true;
            }
            out.pop();
        }
        failed.insert((set.clone(), left));
        false
    }
    let mut out = Vec::new();
    go(g, from, len, accept, &mut HashSet::new(), &mut out).then_some(out)
}

/// The first two continuations of `from` of length `len`, in lexicographic order.
fn two_words(g: &VertexShift, from: &VSet, len: usize) -> Option<(Vec<Sym>, Vec<Sym>)> {
    let u = first_word(g, from, len, &|s| !s.is_empty())?;
    // next word strictly above u: keep a prefix, raise one symbol, complete minimally
    for keep in (0..len).rev() {
        let base = g.read_from(from, &u[..keep]);
        for c in u[keep] + 1..g.alphabet().len() as Sym {
            let after = g.step(&base, c);
            if after.is_empty() {
                continue;
            }
            if let Some(rest) = first_word(g, &after, len - keep - 1, &|s| !s.is_empty()) {
                let mut u2 = u[..keep].to_vec();
                u2.push(c);
                u2.extend(rest);
                return Some((u, u2));
            }
        }
    }
    None
}

fn join(parts: &[&[Sym]]) -> Vec<Sym> {
    parts.concat()
}

pub fn synchronizing_blocks(g: &VertexShift, s: &Word, depth: usize, preset: &SyncPreset) -> Result<BlockPair> {
    let verdict = verify_synchronizing(g, s, depth.max(g.vertex_count()))?;
    if !verdict.synchronizing {
        return Err(Error::Precondition(format!("{s} is not synchronizing")));
    }
    let s_syms = g.symbols_of(s).expect("checked by verify_synchronizing");
    let after_s = g.read(&s_syms);
    let ends_with = |tail: Vec<Sym>| move |set: &VSet| !g.read_from(set, &tail).is_empty();
    let alphabet = g.alphabet();
    let (b, c) = match preset {
        SyncPreset::Plain => {
            let (u, u2) = (1..=depth)
                .find_map(|len| two_words(g, &after_s, len))
                .ok_or_else(|| Error::SearchExhausted(format!("no two continuations of {s} up to length {depth}")))?;
            let closer = |u: &[Sym]| {
                let from = g.read_from(&after_s, u);
                (0..=depth).find_map(|len| first_word(g, &from, len, &ends_with(s_syms.clone())))
            };
            let v = closer(&u).ok_or_else(|| Error::SearchExhausted("no return word v".into()))?;
            let v2 = closer(&u2).ok_or_else(|| Error::SearchExhausted("no return word v'".into()))?;
            (join(&[&s_syms, &u, &v, &s_syms, &u2, &v2]), join(&[&s_syms, &u2, &v2, &s_syms, &u, &v]))
        }
        SyncPreset::Targeted { u, u2 } => {
            let u = g.symbols_of(u).ok_or_else(|| Error::Domain(format!("{u} is not over the shift alphabet")))?;
            let u2 = g.symbols_of(u2).ok_or_else(|| Error::Domain(format!("{u2} is not over the shift alphabet")))?;
            if u.len() != u2.len() || u == u2 {
                return Err(Error::Domain("targets must be distinct words of equal length".into()));
            }
            // s p a q b r with s p a q b r s ∈ L
            let pad = |a: &[Sym], b: &[Sym], lp: usize, lq: usize, lr: usize| -> Option<Vec<Sym>> {
                let p = first_word(g, &after_s, lp, &ends_with(a.to_vec()))?;
                let set = g.read_from(&g.read_from(&after_s, &p), a);
                let q = first_word(g, &set, lq, &ends_with(b.to_vec()))?;
                let set = g.read_from(&g.read_from(&set, &q), b);
                let r = first_word(g, &set, lr, &ends_with(s_syms.clone()))?;
                Some(join(&[&s_syms, &p, a, &q, b, &r]))
            };
            let mut found = None;
            'search: for total in 0..=3 * depth {
                for lp in 0..=total.min(depth) {
                    for lq in 0..=(total - lp).min(depth) {
                        let lr = total - lp - lq;
                        if lr > depth {
                            continue;
                        }
                        if let (Some(b), Some(c)) = (pad(&u, &u2, lp, lq, lr), pad(&u2, &u, lp, lq, lr)) {
                            found = Some((b, c));
                            break 'search;
                        }
                    }
                }
            }
            found.ok_or_else(|| Error::SearchExhausted(format!("no padding words up to length {depth}")))?
        }
    };
    BlockPair::new(Word::from_raw(alphabet, b), Word::from_raw(alphabet, c), g.clone())
}

/// `k`-th nonempty even-length binary word in length-lexicographic order (`k ≥ 1`).
pub fn even_word(k: u64) -> Word {
    let mut k = k - 1;
    let mut len = 2;
    while k >= 1 << len {
        k -= 1 << len;
        len += 2;
    }
    let s: String = (0..len).rev().map(|b| if k >> b & 1 == 1 { '1' } else { '0' }).collect();
    Alphabet::binary().word(&s).expect("binary")
}

/// `w(k) = 1 u(k) 1 0^{4k}`.
pub fn coded_word(k: u64) -> Word {
    let u = even_word(k);
    assert!(u.len() as u64 <= 2 * k, "|u(k)| ≤ 2k");
    let s = format!("1{u}1{}", "0".repeat(4 * k as usize));
    Alphabet::binary().word(&s).expect("binary")
}

/// `{w(1), …, w(n)}`.
pub fn coded_family(n: u64) -> Result<CodedGenerator> {
    if n == 0 {
        return Err(Error::Domain("the family starts at n = 1".into()));
    }
    CodedGenerator::new((1..=n).map(coded_word).collect())
}
