use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use super::VertexShift;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::words::{Alphabet, Sym, Word};

/// A finite set of nonempty generator words over one alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CodedGenerator {
    words: Vec<Word>,
}

impl CodedGenerator {
    pub fn new(words: Vec<Word>) -> Result<Self> {
        let first = words.first().ok_or_else(|| Error::Domain("generator set is empty".into()))?;
        for w in &words {
            first.alphabet().ensure_same(w.alphabet())?;
            if w.is_empty() {
                return Err(Error::Domain("generator words must be nonempty".into()));
            }
        }
        let mut seen = HashSet::new();
        let words = words.into_iter().filter(|w| seen.insert(w.clone())).collect();
        Ok(Self { words })
    }

    pub fn from_strs(alphabet: &Alphabet, words: &[&str]) -> Result<Self> {
        Self::new(words.iter().map(|w| alphabet.word(w)).collect::<Result<_>>()?)
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.words[0].alphabet()
    }

    pub fn max_len(&self) -> usize {
        self.words.iter().map(Word::len).max().unwrap_or(0)
    }
}

/// Two circular factorizations of the same cyclic word: `x_1 = s·p` and
/// `p x_2 … x_m s = y_1 … y_n`, with a different cut set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CircularCounterexample {
    pub p: String,
    pub s: String,
    pub xs: Vec<String>,
    pub ys: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CircularVerdict {
    pub circular: bool,
    pub test_length: usize,
    pub counterexample: Option<CircularCounterexample>,
}

#[derive(Debug, Clone, Copy)]
enum Move {
    Start,
    X(usize),
    Close,
    Y(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct State {
    overhang: Vec<Sym>,
    x_ahead: bool,
    xlen: usize,
    closed: bool,
    differ: bool,
}

struct Node {
    state: State,
    parent: usize,
    mv: Move,
}

/// Matches `z` against the pending overhang of the side that is ahead.
/// Returns the new overhang and whether the side that was ahead stays ahead.
fn align(overhang: &[Sym], z: &[Sym]) -> Option<(Vec<Sym>, bool)> {
    if overhang.starts_with(z) {
        Some((overhang[z.len()..].to_vec(), true))
    } else if z.starts_with(overhang) {
        Some((z[overhang.len()..].to_vec(), false))
    } else {
        None
    }
}

/// Shortest violation with `x_1 = words[first]` cut at `split`, if any.
fn search(words: &[Vec<Sym>], first: usize, split: usize, limit: usize) -> Option<(usize, Vec<Move>)> {
    let x1 = &words[first];
    let s = &x1[..split];
    let start = State {
        overhang: x1[split..].to_vec(),
        x_ahead: true,
        xlen: x1.len(),
        closed: false,
        differ: split > 0,
    };
    let mut arena = vec![Node { state: start.clone(), parent: usize::MAX, mv: Move::Start }];
    let mut seen: HashSet<State> = HashSet::from([start]);
    let mut buckets: Vec<VecDeque<usize>> = vec![VecDeque::new(); limit + 1];
    buckets[x1.len()].push_back(0);
    for len in 0..=limit {
        while let Some(id) = buckets[len].pop_front() {
            let st = arena[id].state.clone();
            if st.closed && st.overhang.is_empty() {
                if st.differ {
                    let mut moves = Vec::new();
                    let mut cur = id;
                    while cur != usize::MAX {
                        moves.push(arena[cur].mv);
                        cur = arena[cur].parent;
                    }
                    moves.reverse();
                    return Some((len, moves));
                }
                continue;
            }
            let mut push = |next: State, mv: Move, arena: &mut Vec<Node>| {
                if next.xlen <= limit && seen.insert(next.clone()) {
                    buckets[next.xlen].push_back(arena.len());
                    arena.push(Node { state: next, parent: id, mv });
                }
            };
            if st.x_ahead && !st.overhang.is_empty() {
                for (k, y) in words.iter().enumerate() {
                    if let Some((ov, stays)) = align(&st.overhang, y) {
                        let x_ahead = stays;
                        let differ = st.differ || !ov.is_empty();
                        let next = State { overhang: ov, x_ahead, differ, ..st.clone() };
                        push(next, Move::Y(k), &mut arena);
                    }
                }
            } else if !st.closed {
                // y is ahead (or level): the x side extends
                let mut options: Vec<(Move, &[Sym])> = words.iter().enumerate().map(|(k, w)| (Move::X(k), w.as_slice())).collect();
                options.push((Move::Close, s));
                for (mv, z) in options {
                    let (ov, y_stays) = if st.overhang.is_empty() {
                        (z.to_vec(), false)
                    } else {
                        match align(&st.overhang, z) {
                            Some(a) => a,
                            None => continue,
                        }
                    };
                    let x_ahead = !y_stays && !ov.is_empty();
                    let added = if matches!(mv, Move::X(_)) { z.len() } else { 0 };
                    let next = State {
                        overhang: ov,
                        x_ahead,
                        xlen: st.xlen + added,
                        closed: matches!(mv, Move::Close),
                        differ: st.differ,
                    };
                    push(next, mv, &mut arena);
                }
            }
        }
    }
    None
}

/// Bounded exhaustive search for two distinct circular factorizations of a
/// cyclic word of length at most `test_length`.
pub fn circular_code_check(gen: &CodedGenerator, test_length: usize) -> Result<CircularVerdict> {
    circular_code_check_with(Exec::default(), gen, test_length)
}

pub fn circular_code_check_with(exec: Exec, gen: &CodedGenerator, test_length: usize) -> Result<CircularVerdict> {
    if test_length < 2 * gen.max_len() {
        return Err(Error::Precondition(format!(
            "test length {test_length} is below twice the longest word ({})",
            gen.max_len()
        )));
    }
    let words: Vec<Vec<Sym>> = gen.words.iter().map(|w| w.symbols().to_vec()).collect();
    let starts: Vec<(usize, usize)> =
        (0..words.len()).flat_map(|i| (0..words[i].len()).map(move |t| (i, t))).collect();
    let found = exec.map_items(&starts, |&(i, t)| search(&words, i, t, test_length).map(|(len, m)| (len, i, t, m)));
    let best = found.into_iter().flatten().min_by_key(|(len, i, t, _)| (*len, *i, *t));
    let counterexample = best.map(|(_, i, t, moves)| {
        let alpha = gen.alphabet();
        let show = |w: &[Sym]| w.iter().map(|&c| alpha.symbol(c)).collect::<String>();
        let mut xs = vec![show(&words[i])];
        let mut ys = Vec::new();
        for mv in moves {
            match mv {
                Move::X(k) => xs.push(show(&words[k])),
                Move::Y(k) => ys.push(show(&words[k])),
                Move::Start | Move::Close => {}
            }
        }
        CircularCounterexample { p: show(&words[i][t..]), s: show(&words[i][..t]), xs, ys }
    });
    Ok(CircularVerdict { circular: counterexample.is_none(), test_length, counterexample })
}

/// Labelled presentation of the coded system: one vertex per letter
/// occurrence, each word a path, and every word end linked to every word
/// start. The cycles through the word starts have the word lengths.
pub fn flower_graph(gen: &CodedGenerator) -> Result<VertexShift> {
    let mut names = Vec::new();
    let mut labels = Vec::new();
    let mut firsts = Vec::new();
    let mut lasts = Vec::new();
    let mut edges = Vec::new();
    for (j, w) in gen.words.iter().enumerate() {
        firsts.push(names.len());
        for (i, &c) in w.symbols().iter().enumerate() {
            if i > 0 {
                edges.push((names.len() - 1, names.len()));
            }
            names.push(format!("w{j}.{i}"));
            labels.push(c);
        }
        lasts.push(names.len() - 1);
    }
    for &l in &lasts {
        for &f in &firsts {
            edges.push((l, f));
        }
    }
    VertexShift::new(gen.alphabet().clone(), names, labels, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(words: &[&str]) -> CodedGenerator {
        CodedGenerator::from_strs(&Alphabet::binary(), words).unwrap()
    }

    #[test]
    fn letters_form_a_circular_code() {
        let v = circular_code_check(&gen(&["0", "1"]), 6).unwrap();
        assert!(v.circular);
        assert_eq!(v.test_length, 6);
    }

    #[test]
    fn misaligned_factorization_found() {
        let v = circular_code_check(&gen(&["01", "10"]), 8).unwrap();
        assert!(!v.circular);
        let c = v.counterexample.unwrap();
        assert!(!c.p.is_empty() && !c.s.is_empty());
        assert_eq!(c.xs.concat().len(), c.ys.concat().len());
        let lhs = format!("{}{}{}", c.p, c.xs[1..].concat(), c.s);
        assert_eq!(lhs, c.ys.concat());
        assert_eq!(format!("{}{}", c.s, c.p), c.xs[0]);
    }

    #[test]
    fn non_codes_are_caught_aligned() {
        let v = circular_code_check(&gen(&["0", "00"]), 4).unwrap();
        let c = v.counterexample.unwrap();
        assert!(c.s.is_empty());
        assert_ne!(c.xs, c.ys);
    }

    #[test]
    fn periodic_words_are_not_circular() {
        // "0101" is a rotation of itself by two.
        let v = circular_code_check(&gen(&["0101"]), 8).unwrap();
        assert!(!v.circular);
    }

    #[test]
    fn precondition_on_length() {
        assert!(circular_code_check(&gen(&["0110"]), 7).is_err());
    }

    #[test]
    fn flower_examples() {
        let ab: Alphabet = "ab".parse().unwrap();
        let g = flower_graph(&CodedGenerator::from_strs(&ab, &["ab"]).unwrap()).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert!(g.is_single_cycle());
        assert_eq!(g.graph_period().unwrap().period, 2);
        let g = flower_graph(&gen(&["0", "11"])).unwrap();
        assert_eq!(g.graph_period().unwrap().period, 1);
        assert!(g.language_contains(&Alphabet::binary().word("0110").unwrap()));
        assert!(!g.language_contains(&Alphabet::binary().word("0101").unwrap()));
    }

    #[test]
    fn counterexample_persists_at_longer_lengths() {
        let g = gen(&["01", "10"]);
        let short = circular_code_check(&g, 4).unwrap();
        for len in 5..12 {
            let v = circular_code_check(&g, len).unwrap();
            assert!(!v.circular);
            assert_eq!(v.counterexample, short.counterexample);
        }
        assert_eq!(
            circular_code_check_with(Exec::Sequential, &g, 10).unwrap(),
            circular_code_check_with(Exec::Parallel, &g, 10).unwrap()
        );
    }
}
