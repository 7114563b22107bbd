//! Stallings automata: folded labelled graphs representing finitely generated
//! subgroups of a free group (based graphs) or their conjugacy classes
//! (basepoint-free graphs).
//!
//! Every edge additionally carries an *X-label*: a word over the graph's
//! [`CoreGraph::sources`]. Along any path from `u` to `v` the product of
//! X-labels, evaluated through the sources, equals `g_u · label · g_v⁻¹` for a
//! fixed gauge `g` with `g_base = ε`. A closed path at the base therefore has
//! an X-label expressing its label in terms of the sources, which is how
//! membership witnesses and preimages under an endomorphism are produced.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::endo::Endomorphism;
use crate::words::{cyclic_reduce, letter_name, Word};

const NONE: u32 = u32::MAX;

#[inline]
fn slot(l: i32) -> usize {
    2 * (l.unsigned_abs() as usize - 1) + usize::from(l < 0)
}

#[inline]
fn slot_letter(s: usize) -> i32 {
    let g = (s / 2 + 1) as i32;
    if s % 2 == 1 {
        -g
    } else {
        g
    }
}

/// A folded graph over the letters `1..=rank`. Vertex 0 is the base (or the
/// reference vertex of a basepoint-free graph).
#[derive(Debug, Clone)]
pub struct CoreGraph {
    rank: usize,
    based: bool,
    n: usize,
    trans: Vec<u32>,
    labels: Vec<Word>,
    sources: Vec<Word>,
}

/// Expression of a subgroup element as a word in the graph's sources.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub expression: Word,
}

impl Witness {
    pub fn evaluate(&self, sources: &[Word]) -> Word {
        self.expression.substitute(sources)
    }
}

impl CoreGraph {
    /// The trivial subgroup: one vertex, no edges.
    pub fn trivial(rank: usize, based: bool) -> Self {
        CoreGraph {
            rank,
            based,
            n: 1,
            trans: vec![NONE; 2 * rank],
            labels: vec![Word::identity(); 2 * rank],
            sources: Vec::new(),
        }
    }

    /// Builds a graph from a dense transition table, trimming hanging trees
    /// (keeping `base` when `based`) and renumbering vertices in BFS order.
    fn from_dense(
        rank: usize,
        n: usize,
        mut trans: Vec<u32>,
        mut labels: Vec<Word>,
        base: usize,
        based: bool,
        sources: Vec<Word>,
    ) -> CoreGraph {
        let w = 2 * rank;
        let mut deg = vec![0usize; n];
        for v in 0..n {
            deg[v] = trans[v * w..(v + 1) * w].iter().filter(|&&t| t != NONE).count();
        }
        let mut removed = vec![false; n];
        let mut queue: Vec<usize> = (0..n)
            .filter(|&v| deg[v] == 1 && !(based && v == base))
            .collect();
        let mut alive = n;
        while let Some(v) = queue.pop() {
            if removed[v] || deg[v] != 1 || alive == 1 {
                continue;
            }
            let s = (0..w).find(|&s| trans[v * w + s] != NONE).unwrap();
            let y = trans[v * w + s] as usize;
            trans[v * w + s] = NONE;
            trans[y * w + (s ^ 1)] = NONE;
            deg[v] = 0;
            deg[y] -= 1;
            removed[v] = true;
            alive -= 1;
            if deg[y] == 1 && !(based && y == base) {
                queue.push(y);
            }
        }
        let start = if !removed[base] {
            base
        } else {
            (0..n).find(|&v| !removed[v]).unwrap_or(base)
        };
        let mut order = Vec::with_capacity(alive);
        let mut index = vec![NONE; n];
        index[start] = 0;
        order.push(start);
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for s in 0..w {
                let t = trans[v * w + s];
                if t != NONE && index[t as usize] == NONE {
                    index[t as usize] = order.len() as u32;
                    order.push(t as usize);
                }
            }
        }
        let m = order.len();
        let mut new_trans = vec![NONE; m * w];
        let mut new_labels = vec![Word::identity(); m * w];
        for (nv, &v) in order.iter().enumerate() {
            for s in 0..w {
                let t = trans[v * w + s];
                if t != NONE {
                    new_trans[nv * w + s] = index[t as usize];
                    new_labels[nv * w + s] = std::mem::take(&mut labels[v * w + s]);
                }
            }
        }
        CoreGraph {
            rank,
            based,
            n: m,
            trans: new_trans,
            labels: new_labels,
            sources,
        }
    }

    pub fn alphabet_rank(&self) -> usize {
        self.rank
    }

    pub fn is_based(&self) -> bool {
        self.based
    }

    /// Base vertex (reference vertex when basepoint-free).
    pub fn base(&self) -> usize {
        0
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.trans.iter().filter(|&&t| t != NONE).count() / 2
    }

    /// First Betti number, i.e. the rank of the subgroup.
    pub fn rank(&self) -> usize {
        self.num_edges() + 1 - self.n
    }

    pub fn target(&self, v: usize, l: i32) -> Option<usize> {
        let t = self.trans[v * 2 * self.rank + slot(l)];
        (t != NONE).then_some(t as usize)
    }

    pub fn x_label(&self, v: usize, l: i32) -> Option<&Word> {
        self.target(v, l)
            .map(|_| &self.labels[v * 2 * self.rank + slot(l)])
    }

    /// Words that X-labels evaluate through.
    pub fn sources(&self) -> &[Word] {
        &self.sources
    }

    /// Positive edges `(source, letter, target)`.
    pub fn edges(&self) -> Vec<(usize, i32, usize)> {
        let mut out = Vec::new();
        for v in 0..self.n {
            for g in 1..=self.rank as i32 {
                if let Some(t) = self.target(v, g) {
                    out.push((v, g, t));
                }
            }
        }
        out
    }

    pub fn is_full_rose(&self) -> bool {
        self.n == 1 && self.trans.iter().all(|&t| t != NONE)
    }

    /// Follows `w` from `start`; returns the end vertex and the X-label product.
    pub fn read(&self, start: usize, w: &Word) -> Option<(usize, Word)> {
        let mut v = start;
        let mut x = Word::identity();
        for &l in w.letters() {
            let idx = v * 2 * self.rank + slot(l);
            let t = self.trans[idx];
            if t == NONE {
                return None;
            }
            x.mul_assign(&self.labels[idx]);
            v = t as usize;
        }
        Some((v, x))
    }

    fn reads_loop(&self, start: usize, w: &Word) -> bool {
        let mut v = start;
        for &l in w.letters() {
            let t = self.trans[v * 2 * self.rank + slot(l)];
            if t == NONE {
                return false;
            }
            v = t as usize;
        }
        v == start
    }

    /// Witness that `w` lies in the subgroup, if it does.
    pub fn membership(&self, w: &Word) -> Option<Witness> {
        if w.max_generator() > self.rank {
            return None;
        }
        match self.read(0, w) {
            Some((0, x)) => Some(Witness { expression: x }),
            _ => None,
        }
    }

    pub fn contains(&self, w: &Word) -> bool {
        w.max_generator() <= self.rank && self.reads_loop(0, w)
    }

    /// BFS spanning tree from vertex 0: per vertex, the tree path label and
    /// its X-label product; plus whether each slot is a tree edge.
    fn spanning_tree(&self) -> (Vec<Word>, Vec<Word>, Vec<bool>) {
        let w = 2 * self.rank;
        let mut path = vec![Word::identity(); self.n];
        let mut xpath = vec![Word::identity(); self.n];
        let mut seen = vec![false; self.n];
        let mut tree = vec![false; self.n * w];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for s in 0..w {
                let t = self.trans[v * w + s];
                if t != NONE && !seen[t as usize] {
                    let t = t as usize;
                    seen[t] = true;
                    tree[v * w + s] = true;
                    tree[t * w + (s ^ 1)] = true;
                    let mut p = path[v].clone();
                    p.push(slot_letter(s));
                    path[t] = p;
                    xpath[t] = xpath[v].mul(&self.labels[v * w + s]);
                    queue.push_back(t);
                }
            }
        }
        (path, xpath, tree)
    }

    /// Labels of paths from vertex 0 along the BFS spanning tree.
    pub fn tree_paths(&self) -> Vec<Word> {
        self.spanning_tree().0
    }

    /// Schreier free basis of the subgroup: one word per non-tree edge.
    pub fn basis(&self) -> Vec<Word> {
        self.schreier_data().0
    }

    /// Schreier basis together with the X-label of each basis loop.
    fn schreier_data(&self) -> (Vec<Word>, Vec<Word>) {
        let w = 2 * self.rank;
        let (path, xpath, tree) = self.spanning_tree();
        let mut gens = Vec::new();
        let mut xgens = Vec::new();
        for v in 0..self.n {
            for s in (0..w).step_by(2) {
                let t = self.trans[v * w + s];
                if t == NONE || tree[v * w + s] {
                    continue;
                }
                let t = t as usize;
                let mut g = path[v].clone();
                g.push(slot_letter(s));
                gens.push(g.mul(&path[t].inverse()));
                xgens.push(xpath[v].mul(&self.labels[v * w + s]).mul(&xpath[t].inverse()));
            }
        }
        (gens, xgens)
    }

    /// X-labels of the Schreier basis loops: words over the sources.
    pub fn basis_x_labels(&self) -> Vec<Word> {
        self.schreier_data().1
    }

    /// Replaces X-labels with the Schreier labelling of the BFS spanning tree.
    pub fn with_schreier_labels(mut self) -> CoreGraph {
        let w = 2 * self.rank;
        let (path, _, tree) = self.spanning_tree();
        let mut sources = Vec::new();
        for v in 0..self.n {
            for s in 0..w {
                self.labels[v * w + s] = Word::identity();
            }
        }
        for v in 0..self.n {
            for s in (0..w).step_by(2) {
                let t = self.trans[v * w + s];
                if t == NONE || tree[v * w + s] {
                    continue;
                }
                let t = t as usize;
                let mut g = path[v].clone();
                g.push(slot_letter(s));
                sources.push(g.mul(&path[t].inverse()));
                let k = sources.len() as i32;
                self.labels[v * w + s] = Word::letter(k);
                self.labels[t * w + (s ^ 1)] = Word::letter(-k);
            }
        }
        self.sources = sources;
        self
    }

    /// The basepoint-free core (hanging trees removed, base forgotten).
    pub fn cyclic_core(&self) -> CoreGraph {
        CoreGraph::from_dense(
            self.rank,
            self.n,
            self.trans.clone(),
            self.labels.clone(),
            0,
            false,
            self.sources.clone(),
        )
    }

    /// Canonical code: equal iff the graphs are isomorphic as labelled graphs
    /// (preserving the base when based).
    pub fn canonical_code(&self) -> Vec<u32> {
        let w = 2 * self.rank;
        let starts: Vec<usize> = if self.based { vec![0] } else { (0..self.n).collect() };
        let mut best: Option<Vec<u32>> = None;
        let mut index = vec![NONE; self.n];
        for start in starts {
            index.iter_mut().for_each(|i| *i = NONE);
            let mut order = vec![start];
            index[start] = 0;
            let mut code = Vec::with_capacity(3 + self.n * w);
            code.extend([self.rank as u32, u32::from(self.based), self.n as u32]);
            let mut head = 0;
            let mut worse = false;
            while head < order.len() {
                let v = order[head];
                head += 1;
                for s in 0..w {
                    let t = self.trans[v * w + s];
                    let c = if t == NONE {
                        NONE
                    } else {
                        if index[t as usize] == NONE {
                            index[t as usize] = order.len() as u32;
                            order.push(t as usize);
                        }
                        index[t as usize]
                    };
                    code.push(c);
                    if let Some(b) = &best {
                        let k = code.len() - 1;
                        if code[..k] == b[..k] && c > b[k] {
                            worse = true;
                            break;
                        }
                    }
                }
                if worse {
                    break;
                }
            }
            if worse {
                continue;
            }
            if best.as_ref().is_none_or(|b| code < *b) {
                best = Some(code);
            }
        }
        best.unwrap()
    }

    /// DOT rendering; the base vertex is double-circled when based.
    pub fn to_dot(&self, name: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph {name} {{");
        let _ = writeln!(s, "  rankdir=LR;");
        for v in 0..self.n {
            let shape = if self.based && v == 0 { "doublecircle" } else { "circle" };
            let _ = writeln!(s, "  {v} [shape={shape}];");
        }
        for (u, g, t) in self.edges() {
            let _ = writeln!(s, "  {u} -> {t} [label=\"{}\"];", letter_name(g));
        }
        s.push_str("}\n");
        s
    }
}

struct Edge {
    letter: i32,
    to: usize,
    label: Word,
}

/// Incremental Stallings folding with optional X-label tracking. The first
/// vertex added is treated as the base: it is never merged into another.
pub struct Folder {
    rank: usize,
    track: bool,
    adj: Vec<Vec<Edge>>,
    alive: Vec<bool>,
    relations: Vec<Word>,
}

impl Folder {
    pub fn new(rank: usize, track: bool) -> Self {
        Folder {
            rank,
            track,
            adj: Vec::new(),
            alive: Vec::new(),
            relations: Vec::new(),
        }
    }

    pub fn add_vertex(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.alive.push(true);
        self.adj.len() - 1
    }

    pub fn add_edge(&mut self, u: usize, l: i32, v: usize, label: Word) {
        let inv = if self.track { label.inverse() } else { Word::identity() };
        self.adj[u].push(Edge { letter: l, to: v, label });
        self.adj[v].push(Edge {
            letter: -l,
            to: u,
            label: inv,
        });
    }

    /// Adds a closed path at `at` spelling `w`; its first edge carries `label`.
    pub fn add_loop(&mut self, at: usize, w: &Word, label: Word) {
        let ls = w.letters();
        if ls.is_empty() {
            return;
        }
        let mut cur = at;
        let mut label = Some(label);
        for (k, &l) in ls.iter().enumerate() {
            let next = if k + 1 == ls.len() { at } else { self.add_vertex() };
            let lab = label.take().unwrap_or_default();
            self.add_edge(cur, l, next, lab);
            cur = next;
        }
    }

    /// Adds a path from `from` to `to` spelling `w`; its first edge carries `label`.
    pub fn add_path(&mut self, from: usize, w: &Word, to: usize, label: Word) {
        let ls = w.letters();
        let mut cur = from;
        let mut label = Some(label);
        for (k, &l) in ls.iter().enumerate() {
            let next = if k + 1 == ls.len() { to } else { self.add_vertex() };
            let lab = label.take().unwrap_or_default();
            self.add_edge(cur, l, next, lab);
            cur = next;
        }
    }

    fn remove_entry(&mut self, v: usize, l: i32, to: usize, label: &Word) {
        let track = self.track;
        let pos = self.adj[v]
            .iter()
            .position(|e| e.letter == l && e.to == to && (!track || &e.label == label))
            .expect("reverse edge entry present");
        self.adj[v].swap_remove(pos);
    }

    fn conflict(&self, v: usize, seen: &mut [usize]) -> Option<(usize, usize)> {
        seen.iter_mut().for_each(|s| *s = usize::MAX);
        for (i, e) in self.adj[v].iter().enumerate() {
            let s = slot(e.letter);
            if seen[s] != usize::MAX {
                return Some((seen[s], i));
            }
            seen[s] = i;
        }
        None
    }

    pub fn fold(&mut self) {
        let mut stack: Vec<usize> = (0..self.adj.len()).filter(|&v| self.alive[v]).collect();
        let mut seen = vec![usize::MAX; 2 * self.rank];
        while let Some(v) = stack.pop() {
            if !self.alive[v] {
                continue;
            }
            while let Some((i, j)) = self.conflict(v, &mut seen) {
                let e2 = self.adj[v].swap_remove(j);
                let (l, w1, a1) = {
                    let e1 = &self.adj[v][i];
                    (e1.letter, e1.to, e1.label.clone())
                };
                let (w2, a2) = (e2.to, e2.label);
                let a2_inv = if self.track { a2.inverse() } else { Word::identity() };
                self.remove_entry(w2, -l, v, &a2_inv);
                if w1 == w2 {
                    if self.track {
                        let rel = a1.mul(&a2_inv);
                        if !rel.is_identity() {
                            self.relations.push(rel);
                        }
                    }
                    continue;
                }
                // vertex 0 is the base and is never merged away
                if w2 == 0 {
                    let delta = if self.track { a1.inverse().mul(&a2) } else { Word::identity() };
                    self.merge(w2, w1, &delta, &mut stack);
                } else {
                    let delta = if self.track { a2_inv.mul(&a1) } else { Word::identity() };
                    self.merge(w1, w2, &delta, &mut stack);
                }
                if !self.alive[v] {
                    break;
                }
            }
        }
    }

    fn merge(&mut self, keep: usize, gone: usize, delta: &Word, stack: &mut Vec<usize>) {
        let entries = std::mem::take(&mut self.adj[gone]);
        self.alive[gone] = false;
        let dinv = delta.inverse();
        for e in entries {
            if e.to == gone {
                let label = if self.track {
                    dinv.mul(&e.label).mul(delta)
                } else {
                    Word::identity()
                };
                self.adj[keep].push(Edge {
                    letter: e.letter,
                    to: keep,
                    label,
                });
            } else {
                let y = e.to;
                let (label, back) = if self.track {
                    (dinv.mul(&e.label), e.label.inverse())
                } else {
                    (Word::identity(), Word::identity())
                };
                let track = self.track;
                let entry = self.adj[y]
                    .iter_mut()
                    .find(|r| r.letter == -e.letter && r.to == gone && (!track || r.label == back))
                    .expect("reverse edge entry present");
                entry.to = keep;
                if track {
                    entry.label = back.mul(delta);
                }
                self.adj[keep].push(Edge {
                    letter: e.letter,
                    to: y,
                    label,
                });
                stack.push(y);
            }
        }
        stack.push(keep);
    }

    /// Kernel relations found while folding (tracked mode only).
    pub fn relations(&self) -> &[Word] {
        &self.relations
    }

    /// Finishes into a core graph rooted at `base`. Vertex 0 always survives
    /// folding, so it is the natural choice.
    pub fn finish(self, base: usize, based: bool, sources: Vec<Word>) -> CoreGraph {
        let mut index = vec![NONE; self.adj.len()];
        let mut count = 0u32;
        for v in 0..self.adj.len() {
            if self.alive[v] {
                index[v] = count;
                count += 1;
            }
        }
        let n = count as usize;
        let w = 2 * self.rank;
        let mut trans = vec![NONE; n * w];
        let mut labels = vec![Word::identity(); n * w];
        for (v, edges) in self.adj.into_iter().enumerate() {
            if index[v] == NONE {
                continue;
            }
            let nv = index[v] as usize;
            for e in edges {
                let k = nv * w + slot(e.letter);
                debug_assert_eq!(trans[k], NONE, "graph not folded");
                trans[k] = index[e.to];
                labels[k] = e.label;
            }
        }
        let base = index[base] as usize;
        let g = CoreGraph::from_dense(self.rank, n, trans, labels, base, based, sources);
        if self.track {
            g
        } else {
            g.with_schreier_labels()
        }
    }

    /// Whether `v` has been merged away.
    pub fn is_alive(&self, v: usize) -> bool {
        self.alive[v]
    }
}

fn folder_for(gens: &[Word], rank: usize, track: bool) -> (Folder, usize) {
    let mut f = Folder::new(rank, track);
    let base = f.add_vertex();
    for (i, g) in gens.iter().enumerate() {
        let label = if track { Word::generator(i + 1) } else { Word::identity() };
        f.add_loop(base, g, label);
    }
    (f, base)
}

fn infer_rank(gens: &[Word], rank: usize) -> usize {
    gens.iter().map(Word::max_generator).max().unwrap_or(0).max(rank)
}

/// Folds the wedge of the given words. X-labels form a Schreier labelling.
pub fn fold(gens: &[Word], rank: usize, based: bool) -> CoreGraph {
    let rank = infer_rank(gens, rank);
    let (mut f, base) = folder_for(gens, rank, false);
    f.fold();
    f.finish(base, based, Vec::new())
}

/// Folds the wedge of the given words, tracking the `i`-th word as source `i`.
/// Also returns relations among the sources found while folding; the sources
/// are free (with this labelling) iff the subgroup rank equals their number.
pub fn fold_tracked(gens: &[Word], rank: usize, based: bool) -> (CoreGraph, Vec<Word>) {
    let rank = infer_rank(gens, rank);
    let (mut f, base) = folder_for(gens, rank, true);
    f.fold();
    let relations = f.relations().to_vec();
    (f.finish(base, based, gens.to_vec()), relations)
}

/// Single-cycle graph of a conjugacy class.
pub fn cycle_graph(w: &Word, rank: usize) -> CoreGraph {
    fold(&[cyclic_reduce(w).0], rank, false)
}

fn product(
    g: &CoreGraph,
    h: &CoreGraph,
    based: bool,
    keep_left: bool,
) -> Vec<(CoreGraph, (usize, usize))> {
    assert_eq!(g.rank, h.rank, "alphabet ranks differ");
    let r = g.rank;
    let w = 2 * r;
    let hn = h.n;
    let mut local = vec![NONE; g.n * hn];
    let starts: Vec<(usize, usize)> = if based {
        vec![(0, 0)]
    } else {
        (0..g.n).flat_map(|a| (0..hn).map(move |b| (a, b))).collect()
    };
    let mut out = Vec::new();
    for (a0, b0) in starts {
        if local[a0 * hn + b0] != NONE {
            continue;
        }
        let mut pairs = vec![(a0, b0)];
        local[a0 * hn + b0] = 0;
        let mut trans: Vec<u32> = Vec::new();
        let mut labels: Vec<Word> = Vec::new();
        let mut head = 0;
        while head < pairs.len() {
            let (a, b) = pairs[head];
            head += 1;
            for s in 0..w {
                let ta = g.trans[a * w + s];
                let tb = h.trans[b * w + s];
                if ta == NONE || tb == NONE {
                    trans.push(NONE);
                    labels.push(Word::identity());
                    continue;
                }
                let key = ta as usize * hn + tb as usize;
                if local[key] == NONE {
                    local[key] = pairs.len() as u32;
                    pairs.push((ta as usize, tb as usize));
                }
                trans.push(local[key]);
                labels.push(if keep_left {
                    g.labels[a * w + s].clone()
                } else {
                    Word::identity()
                });
            }
        }
        let edges = trans.iter().filter(|&&t| t != NONE).count() / 2;
        if edges < pairs.len() {
            // a tree: contractible
            continue;
        }
        let sources = if keep_left { g.sources.clone() } else { Vec::new() };
        let comp = CoreGraph::from_dense(r, pairs.len(), trans, labels, 0, based, sources);
        let comp = if keep_left { comp } else { comp.with_schreier_labels() };
        out.push((comp, (a0, b0)));
    }
    out
}

/// Core of the fiber product. Based mode: the component at the pair of base
/// vertices, if non-contractible. Basepoint-free mode: every non-contractible
/// component.
pub fn pullback(g: &CoreGraph, h: &CoreGraph, based: bool) -> Vec<CoreGraph> {
    product(g, h, based, false).into_iter().map(|(c, _)| c).collect()
}

/// Basepoint-free pullback; each component comes with a vertex pair `(a, b)`
/// lying in its (untrimmed) component of the product.
pub fn pullback_with_pairs(g: &CoreGraph, h: &CoreGraph) -> Vec<(CoreGraph, (usize, usize))> {
    product(g, h, false, false)
}

/// As [`pullback`], but edges keep the X-labels of the left factor.
pub(crate) fn pullback_left(g: &CoreGraph, h: &CoreGraph, based: bool) -> Vec<CoreGraph> {
    product(g, h, based, true).into_iter().map(|(c, _)| c).collect()
}

/// Subgroup intersection `G ∩ H` as a based graph (trivial graph when trivial).
pub fn intersection(g: &CoreGraph, h: &CoreGraph) -> CoreGraph {
    pullback(g, h, true)
        .pop()
        .unwrap_or_else(|| CoreGraph::trivial(g.rank, true))
}

/// `x` with `x⁻¹ w x` in the subgroup at vertex 0 of `g`, if one exists.
pub fn conjugate_into(w: &Word, g: &CoreGraph) -> Option<Word> {
    let (core, c) = cyclic_reduce(w);
    if core.is_identity() {
        return Some(Word::identity());
    }
    if core.max_generator() > g.rank {
        return None;
    }
    let paths = g.tree_paths();
    (0..g.n)
        .find(|&v| g.reads_loop(v, &core))
        .map(|v| c.inverse().mul(&paths[v].inverse()))
}

/// Label-preserving map from `b` into `a` sending `b`'s vertex 0 to `at`.
fn morphism_from(b: &CoreGraph, a: &CoreGraph, at: usize) -> bool {
    let w = 2 * b.rank;
    let mut image = vec![NONE; b.n];
    image[0] = at as u32;
    let mut queue = vec![0usize];
    while let Some(v) = queue.pop() {
        let iv = image[v] as usize;
        for s in 0..w {
            let t = b.trans[v * w + s];
            if t == NONE {
                continue;
            }
            let ta = a.trans[iv * w + s];
            if ta == NONE {
                return false;
            }
            let t = t as usize;
            if image[t] == NONE {
                image[t] = ta;
                queue.push(t);
            } else if image[t] != ta {
                return false;
            }
        }
    }
    true
}

/// Based containment `B ≤ A`.
pub fn is_subgroup(b: &CoreGraph, a: &CoreGraph) -> bool {
    morphism_from(b, a, 0)
}

/// Whether some conjugate of `B` lies in `A`.
pub fn carries_component(a: &CoreGraph, b: &CoreGraph) -> bool {
    let bc = b.cyclic_core();
    if bc.rank() == 0 {
        return true;
    }
    let ac = a.cyclic_core();
    (0..ac.n).any(|x| morphism_from(&bc, &ac, x))
}

/// Whether the system `A` carries `B`; on success, a component of `A`
/// carrying each component of `B`.
pub fn carries(a: &[CoreGraph], b: &[CoreGraph]) -> Option<Vec<usize>> {
    b.iter()
        .map(|bc| a.iter().position(|ac| carries_component(ac, bc)))
        .collect()
}

/// Based core graph of `{x : φ(x) ∈ H}` for injective `φ`.
pub fn preimage_subgroup(phi: &Endomorphism, h: &CoreGraph) -> CoreGraph {
    assert!(phi.is_injective(), "preimage_subgroup needs an injective map");
    let image = phi.image_graph();
    let gens = match pullback_left(image, h, true).pop() {
        Some(p) => p.basis_x_labels(),
        None => Vec::new(),
    };
    fold(&gens, phi.domain_rank(), true)
}
