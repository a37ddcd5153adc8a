//! Exact subshift backends: vertex shifts presenting SFTs, spacing shifts
//! and coded systems.

mod circular;
mod spacing;
mod vset;

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::words::{Alphabet, Sym, Word};

pub use circular::{circular_code_check, circular_code_check_with, flower_graph, CircularCounterexample, CircularVerdict, CodedGenerator};
pub use spacing::{spacing_check, SpacingSet};
pub(crate) use vset::VSet;

/// A directed graph whose bi-infinite vertex paths, read through the vertex
/// labels, form the shift.
#[derive(Clone, PartialEq, Eq)]
pub struct VertexShift {
    alphabet: Alphabet,
    names: Vec<String>,
    labels: Vec<Sym>,
    succ: Vec<Vec<usize>>,
}

impl VertexShift {
    /// Builds the graph and prunes vertices that lie on no bi-infinite path.
    pub fn new(alphabet: Alphabet, names: Vec<String>, labels: Vec<Sym>, edges: &[(usize, usize)]) -> Result<Self> {
        let n = names.len();
        if labels.len() != n {
            return Err(Error::Domain("one label per vertex required".into()));
        }
        if labels.iter().any(|&l| l as usize >= alphabet.len()) {
            return Err(Error::Domain("vertex label outside the alphabet".into()));
        }
        if names.iter().collect::<HashSet<_>>().len() != n {
            return Err(Error::Domain("duplicate vertex names".into()));
        }
        let mut succ = vec![BTreeSet::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Domain(format!("edge ({u}, {v}) outside {n} vertices")));
            }
            succ[u].insert(v);
        }
        let succ: Vec<Vec<usize>> = succ.into_iter().map(|s| s.into_iter().collect()).collect();
        prune(alphabet, names, labels, succ)
    }

    /// Vertices are the letters themselves.
    pub fn letter_graph(alphabet: &Alphabet, edges: &[(char, char)]) -> Result<Self> {
        let names = alphabet.symbols().iter().map(char::to_string).collect();
        let labels = (0..alphabet.len() as Sym).collect();
        let edges = edges
            .iter()
            .map(|&(a, b)| Ok((alphabet.index_of_checked(a)? as usize, alphabet.index_of_checked(b)? as usize)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(alphabet.clone(), names, labels, &edges)
    }

    /// Parses `v: w1 w2 …` lines. A vertex is labelled by the first
    /// character of its name; blank lines and `#` comments are ignored.
    pub fn from_adjacency(text: &str) -> Result<Self> {
        let mut order: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut intern = |name: &str, order: &mut Vec<String>| -> usize {
            *index.entry(name.to_string()).or_insert_with(|| {
                order.push(name.to_string());
                order.len() - 1
            })
        };
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (v, rest) = line
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("line {}: expected `vertex: successors`", lineno + 1)))?;
            let v = v.trim();
            if v.is_empty() {
                return Err(Error::Parse(format!("line {}: empty vertex name", lineno + 1)));
            }
            let u = intern(v, &mut order);
            for w in rest.split_whitespace() {
                let w = intern(w, &mut order);
                edges.push((u, w));
            }
        }
        if order.is_empty() {
            return Err(Error::EmptyShift);
        }
        let letters: BTreeSet<char> = order.iter().map(|n| n.chars().next().unwrap()).collect();
        let alphabet = Alphabet::new(letters)?;
        let labels = order.iter().map(|n| alphabet.index_of(n.chars().next().unwrap()).unwrap()).collect();
        Self::new(alphabet, order, labels, &edges)
    }

    pub fn to_adjacency(&self) -> String {
        let mut out = String::new();
        for (u, name) in self.names.iter().enumerate() {
            let succ: Vec<&str> = self.succ[u].iter().map(|&v| self.names[v].as_str()).collect();
            out.push_str(&format!("{name}: {}\n", succ.join(" ")));
        }
        out
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn label(&self, v: usize) -> Sym {
        self.labels[v]
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.succ.iter().enumerate().flat_map(|(u, s)| s.iter().map(move |&v| (u, v))).collect()
    }

    pub fn transpose(&self) -> VertexShift {
        let edges: Vec<_> = self.edges().into_iter().map(|(u, v)| (v, u)).collect();
        VertexShift::new(self.alphabet.clone(), self.names.clone(), self.labels.clone(), &edges)
            .expect("transpose of a pruned graph is pruned")
    }

    pub(crate) fn label_set(&self, sym: Sym) -> VSet {
        let mut s = VSet::new(self.vertex_count());
        for v in (0..self.vertex_count()).filter(|&v| self.labels[v] == sym) {
            s.insert(v);
        }
        s
    }

    /// Vertices labelled `sym` that follow some vertex of `from`.
    pub(crate) fn step(&self, from: &VSet, sym: Sym) -> VSet {
        let mut out = VSet::new(self.vertex_count());
        for u in from.iter() {
            for &v in &self.succ[u] {
                if self.labels[v] == sym {
                    out.insert(v);
                }
            }
        }
        out
    }

    /// End vertices of the paths labelled `w` starting after a vertex of `from`.
    pub(crate) fn read_from(&self, from: &VSet, w: &[Sym]) -> VSet {
        let mut cur = from.clone();
        for &c in w {
            if cur.is_empty() {
                break;
            }
            cur = self.step(&cur, c);
        }
        cur
    }

    /// End vertices of all paths labelled `w` (every vertex when `w = λ`).
    pub(crate) fn read(&self, w: &[Sym]) -> VSet {
        match w.split_first() {
            None => {
                let mut all = VSet::new(self.vertex_count());
                (0..self.vertex_count()).for_each(|v| all.insert(v));
                all
            }
            Some((&c, rest)) => self.read_from(&self.label_set(c), rest),
        }
    }

    pub(crate) fn symbols_of(&self, w: &Word) -> Option<Vec<Sym>> {
        if w.alphabet() == &self.alphabet {
            return Some(w.symbols().to_vec());
        }
        (0..w.len()).map(|i| self.alphabet.index_of(w.char_at(i))).collect()
    }

    pub fn contains_symbols(&self, w: &[Sym]) -> bool {
        !self.read(w).is_empty()
    }

    /// `w ∈ L(X)`.
    pub fn language_contains(&self, w: &Word) -> bool {
        self.symbols_of(w).is_some_and(|s| self.contains_symbols(&s))
    }

    fn reachable(&self, from: usize, reverse: bool) -> Vec<bool> {
        let pred;
        let adj = if reverse {
            pred = self.transpose_adjacency();
            &pred
        } else {
            &self.succ
        };
        let mut seen = vec![false; self.vertex_count()];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    fn transpose_adjacency(&self) -> Vec<Vec<usize>> {
        let mut pred = vec![Vec::new(); self.vertex_count()];
        for (u, v) in self.edges() {
            pred[v].push(u);
        }
        pred
    }

    /// Strongly connected components, numbered in discovery order.
    pub fn components(&self) -> Vec<usize> {
        let n = self.vertex_count();
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        for v in 0..n {
            if comp[v] != usize::MAX {
                continue;
            }
            let fwd = self.reachable(v, false);
            let bwd = self.reachable(v, true);
            for u in 0..n {
                if fwd[u] && bwd[u] {
                    comp[u] = next;
                }
            }
            next += 1;
        }
        comp
    }

    pub fn is_transitive(&self) -> Transitivity {
        let comp = self.components();
        let components = comp.iter().max().map_or(0, |m| m + 1);
        let fwd = self.reachable(0, false);
        let bwd = self.reachable(0, true);
        let witness = (0..self.vertex_count())
            .find(|&v| !fwd[v])
            .map(|v| (self.names[0].clone(), self.names[v].clone()))
            .or_else(|| {
                (0..self.vertex_count()).find(|&v| !bwd[v]).map(|v| (self.names[v].clone(), self.names[0].clone()))
            });
        Transitivity { transitive: witness.is_none(), components, witness }
    }

    /// gcd of the cycle lengths, via BFS levels from vertex 0.
    pub fn graph_period(&self) -> Result<Period> {
        if !self.is_transitive().transitive {
            return Err(Error::Precondition("graph_period needs a strongly connected graph".into()));
        }
        let mut level = vec![None; self.vertex_count()];
        level[0] = Some(0i64);
        let mut queue = VecDeque::from([0]);
        let mut g = 0i64;
        while let Some(u) = queue.pop_front() {
            let lu = level[u].unwrap();
            for &v in &self.succ[u] {
                match level[v] {
                    None => {
                        level[v] = Some(lu + 1);
                        queue.push_back(v);
                    }
                    Some(lv) => g = g.gcd(&(lu + 1 - lv)),
                }
            }
        }
        let period = g.unsigned_abs();
        Ok(Period { period, mixing: period == 1 })
    }

    /// A shortest vertex cycle through `v`, returned without the closing repeat.
    pub(crate) fn shortest_cycle_through(&self, v: usize) -> Option<Vec<usize>> {
        let path = self.shortest_path(v, |u| self.succ[u].contains(&v))?;
        Some(path)
    }

    /// Shortest vertex path from `from` to a vertex satisfying `goal`.
    pub(crate) fn shortest_path(&self, from: usize, goal: impl Fn(usize) -> bool) -> Option<Vec<usize>> {
        let mut parent = vec![usize::MAX; self.vertex_count()];
        let mut seen = vec![false; self.vertex_count()];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(u) = queue.pop_front() {
            if goal(u) {
                let mut path = vec![u];
                let mut cur = u;
                while cur != from {
                    cur = parent[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for &w in &self.succ[u] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = u;
                    queue.push_back(w);
                }
            }
        }
        None
    }

    pub(crate) fn labels_of(&self, path: &[usize]) -> Vec<Sym> {
        path.iter().map(|&v| self.labels[v]).collect()
    }

    /// `true` when the graph is one cycle, so the shift is finite.
    pub fn is_single_cycle(&self) -> bool {
        self.is_transitive().transitive && self.succ.iter().all(|s| s.len() == 1)
    }
}

fn prune(alphabet: Alphabet, names: Vec<String>, labels: Vec<Sym>, succ: Vec<Vec<usize>>) -> Result<VertexShift> {
    let n = names.len();
    let mut alive = vec![true; n];
    let mut outdeg: Vec<usize> = succ.iter().map(Vec::len).collect();
    let mut indeg = vec![0usize; n];
    let mut pred = vec![Vec::new(); n];
    for (u, s) in succ.iter().enumerate() {
        for &v in s {
            indeg[v] += 1;
            pred[v].push(u);
        }
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| outdeg[v] == 0 || indeg[v] == 0).collect();
    while let Some(v) = queue.pop_front() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        for &w in &succ[v] {
            indeg[w] -= 1;
            if alive[w] && indeg[w] == 0 {
                queue.push_back(w);
            }
        }
        for &u in &pred[v] {
            outdeg[u] -= 1;
            if alive[u] && outdeg[u] == 0 {
                queue.push_back(u);
            }
        }
    }
    let new_index: Vec<Option<usize>> = alive
        .iter()
        .scan(0, |next, &a| {
            Some(a.then(|| {
                *next += 1;
                *next - 1
            }))
        })
        .collect();
    let keep: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
    if keep.is_empty() {
        return Err(Error::EmptyShift);
    }
    Ok(VertexShift {
        alphabet,
        names: keep.iter().map(|&v| names[v].clone()).collect(),
        labels: keep.iter().map(|&v| labels[v]).collect(),
        succ: keep
            .iter()
            .map(|&v| succ[v].iter().filter_map(|&w| new_index[w]).collect())
            .collect(),
    })
}

impl fmt::Debug for VertexShift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VertexShift({:?}; {})", self.alphabet.as_string(), self.to_adjacency().trim_end().replace('\n', "; "))
    }
}

#[derive(Serialize)]
struct VertexRecord<'a> {
    name: &'a str,
    label: char,
    successors: Vec<&'a str>,
}

impl Serialize for VertexShift {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let vertices: Vec<VertexRecord> = (0..self.vertex_count())
            .map(|u| VertexRecord {
                name: &self.names[u],
                label: self.alphabet.symbol(self.labels[u]),
                successors: self.succ[u].iter().map(|&v| self.names[v].as_str()).collect(),
            })
            .collect();
        vertices.serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Transitivity {
    pub transitive: bool,
    pub components: usize,
    /// `(u, v)` with no path from `u` to `v`.
    pub witness: Option<(String, String)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Period {
    pub period: u64,
    pub mixing: bool,
}

/// An SFT given by an alphabet and forbidden words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SftSpec {
    alphabet: Alphabet,
    forbidden: Vec<Word>,
}

impl SftSpec {
    pub fn new(alphabet: Alphabet, forbidden: Vec<Word>) -> Result<Self> {
        for w in &forbidden {
            alphabet.ensure_same(w.alphabet())?;
            if w.is_empty() {
                return Err(Error::Domain("forbidden words must be nonempty".into()));
            }
        }
        Ok(Self { alphabet, forbidden })
    }

    pub fn from_strs(alphabet: &str, forbidden: &[&str]) -> Result<Self> {
        let alphabet: Alphabet = alphabet.parse()?;
        let forbidden = forbidden.iter().map(|w| alphabet.word(w)).collect::<Result<_>>()?;
        Self::new(alphabet, forbidden)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn forbidden(&self) -> &[Word] {
        &self.forbidden
    }

    /// Direct scan: `w` contains no forbidden factor.
    pub fn admits(&self, w: &[Sym]) -> bool {
        self.forbidden
            .iter()
            .all(|f| f.len() > w.len() || !w.windows(f.len()).any(|win| win == f.symbols()))
    }
}

impl FromStr for SftSpec {
    type Err = Error;
    /// Parses `alphabet: 01` and `forbidden: 11 101` lines.
    fn from_str(s: &str) -> Result<Self> {
        let mut alphabet = None;
        let mut forbidden: Vec<String> = Vec::new();
        for line in s.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (key, value) = line
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("expected `key: value`, got {line:?}")))?;
            match key.trim() {
                "alphabet" => alphabet = Some(value.trim().parse::<Alphabet>()?),
                "forbidden" => forbidden.extend(value.split_whitespace().map(str::to_string)),
                other => return Err(Error::Parse(format!("unknown SFT key {other:?}"))),
            }
        }
        let alphabet = alphabet.ok_or_else(|| Error::Parse("missing `alphabet:` line".into()))?;
        let forbidden = forbidden.iter().map(|w| alphabet.word(w)).collect::<Result<_>>()?;
        Self::new(alphabet, forbidden)
    }
}

impl fmt::Display for SftSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "alphabet: {}", self.alphabet.as_string())?;
        let words: Vec<String> = self.forbidden.iter().map(Word::to_string).collect();
        writeln!(f, "forbidden: {}", words.join(" "))
    }
}

/// Higher-block presentation on allowed `(m-1)`-blocks, `m` the longest
/// forbidden length; each vertex is labelled by the first symbol of its block.
pub fn forbidden_to_vertex(spec: &SftSpec) -> Result<VertexShift> {
    let banned: BTreeSet<Sym> = spec
        .forbidden
        .iter()
        .filter(|w| w.len() == 1)
        .map(|w| w.symbols()[0])
        .collect();
    let letters: Vec<Sym> = (0..spec.alphabet.len() as Sym).filter(|s| !banned.contains(s)).collect();
    let m = spec.forbidden.iter().map(Word::len).max().unwrap_or(2).max(2);
    let k = m - 1;
    let mut blocks: Vec<Vec<Sym>> = vec![Vec::new()];
    for _ in 0..k {
        blocks = blocks
            .into_iter()
            .flat_map(|b| {
                letters.iter().map(move |&c| {
                    let mut b = b.clone();
                    b.push(c);
                    b
                })
            })
            .filter(|b| spec.admits(b))
            .collect();
    }
    let index: HashMap<&[Sym], usize> = blocks.iter().enumerate().map(|(i, b)| (b.as_slice(), i)).collect();
    let mut edges = Vec::new();
    for (u, b) in blocks.iter().enumerate() {
        for &c in &letters {
            let mut ext = b.clone();
            ext.push(c);
            if spec.admits(&ext) {
                if let Some(&v) = index.get(&ext[1..]) {
                    edges.push((u, v));
                }
            }
        }
    }
    let names = blocks.iter().map(|b| b.iter().map(|&s| spec.alphabet.symbol(s)).collect()).collect();
    let labels = blocks.iter().map(|b| b[0]).collect();
    VertexShift::new(spec.alphabet.clone(), names, labels, &edges)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SyncVerdict {
    pub synchronizing: bool,
    pub depth: usize,
    /// `(u, v)` with `us, sv ∈ L` but `usv ∉ L`.
    pub counterexample: Option<(String, String)>,
}

/// Checks `us, sv ∈ L ⇒ usv ∈ L` for all `|u|, |v| ≤ depth`.
///
/// Words are explored through the vertex sets they reach, so the check is
/// exhaustive without enumerating every word.
pub fn verify_synchronizing(g: &VertexShift, s: &Word, depth: usize) -> Result<SyncVerdict> {
    verify_synchronizing_with(Exec::default(), g, s, depth)
}

pub fn verify_synchronizing_with(exec: Exec, g: &VertexShift, s: &Word, depth: usize) -> Result<SyncVerdict> {
    let s_syms = g
        .symbols_of(s)
        .filter(|w| g.contains_symbols(w))
        .ok_or_else(|| Error::Precondition(format!("{s} is not in the language")))?;
    let alpha = g.alphabet.len() as Sym;

    // Sets reached by reading some u (|u| ≤ depth), with a shortest representative.
    let mut u_sets: Vec<(VSet, Vec<Sym>)> = Vec::new();
    let mut seen: HashSet<VSet> = HashSet::new();
    let mut frontier: Vec<(VSet, Vec<Sym>)> = Vec::new();
    for c in 0..alpha {
        let set = g.label_set(c);
        if !set.is_empty() && seen.insert(set.clone()) {
            frontier.push((set, vec![c]));
        }
    }
    for _ in 1..depth {
        let mut next = Vec::new();
        for (set, w) in &frontier {
            for c in 0..alpha {
                let t = g.step(set, c);
                if !t.is_empty() && seen.insert(t.clone()) {
                    let mut w = w.clone();
                    w.push(c);
                    next.push((t, w));
                }
            }
        }
        u_sets.append(&mut frontier);
        frontier = next;
    }
    u_sets.append(&mut frontier);

    let a0 = g.read(&s_syms);
    let mut starts: Vec<(VSet, Vec<Sym>)> = vec![(a0.clone(), Vec::new())];
    let mut distinct: HashSet<VSet> = HashSet::from([a0.clone()]);
    for (set, u) in &u_sets {
        let e = match s_syms.split_first() {
            None => set.clone(),
            Some((&c, rest)) => g.read_from(&g.step(set, c), rest),
        };
        if !e.is_empty() && distinct.insert(e.clone()) {
            starts.push((e, u.clone()));
        }
    }

    let found = exec.map_items(&starts, |(b0, u)| {
        let mut seen: HashSet<(VSet, VSet)> = HashSet::from([(a0.clone(), b0.clone())]);
        let mut frontier = vec![(a0.clone(), b0.clone(), Vec::<Sym>::new())];
        for _ in 0..depth {
            let mut next = Vec::new();
            for (a, b, v) in &frontier {
                for c in 0..alpha {
                    let a2 = g.step(a, c);
                    if a2.is_empty() {
                        continue;
                    }
                    let b2 = g.step(b, c);
                    let mut v2 = v.clone();
                    v2.push(c);
                    if b2.is_empty() {
                        return Some((u.clone(), v2));
                    }
                    if seen.insert((a2.clone(), b2.clone())) {
                        next.push((a2, b2, v2));
                    }
                }
            }
            frontier = next;
        }
        None
    });
    let render = |w: &[Sym]| w.iter().map(|&c| g.alphabet.symbol(c)).collect::<String>();
    let counterexample = found.into_iter().flatten().next().map(|(u, v)| (render(&u), render(&v)));
    Ok(SyncVerdict { synchronizing: counterexample.is_none(), depth, counterexample })
}

/// Golden mean shift: binary sequences without `11`.
pub fn golden_mean() -> VertexShift {
    forbidden_to_vertex(&SftSpec::from_strs("01", &["11"]).unwrap()).unwrap()
}

/// Full shift on `alphabet`.
pub fn full_shift(alphabet: &Alphabet) -> VertexShift {
    forbidden_to_vertex(&SftSpec::new(alphabet.clone(), Vec::new()).unwrap()).unwrap()
}
