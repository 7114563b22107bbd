//! Twisted conjugacy `u = x⁻¹ · v · φ(x)`: the fixed-subgroup encoding, a
//! bounded default search, witnesses along orbits and the reduction of
//! `φⁿ`-twisted pair search to finitely many subproblems.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::decision::{BoundKind, Certificate, Decision, Trace};
use crate::endo::Endomorphism;
use crate::engine::Engine;
use crate::stallings::{fold, CoreGraph};
use crate::words::Word;

/// `u = x⁻¹ · v · φ(x)`.
pub fn verify_twisted(phi: &Endomorphism, u: &Word, v: &Word, x: &Word) -> bool {
    x.inverse().mul(v).mul(&phi.apply(x)) == *u
}

/// `φ′` on `F ∗ ⟨B, E⟩` with `φ′(B) = B·v` and `φ′(E) = u⁻¹·E`. `B` and `E`
/// are generators `r+1` and `r+2`.
pub fn encode_fixed(phi: &Endomorphism, u: &Word, v: &Word) -> Endomorphism {
    let r = phi.rank();
    let b = Word::generator(r + 1);
    let e = Word::generator(r + 2);
    phi.extend(&[b.mul(v), u.inverse().mul(&e)])
        .expect("extension by two generators is well formed")
}

/// `z` when `w = B·z·E` with `z` over the original alphabet.
pub fn decode_fixed(w: &Word, rank: usize) -> Option<Word> {
    let ls = w.letters();
    let (b, e) = ((rank + 1) as i32, (rank + 2) as i32);
    if ls.len() < 2 || ls[0] != b || ls[ls.len() - 1] != e {
        return None;
    }
    let z = &ls[1..ls.len() - 1];
    z.iter()
        .all(|l| l.unsigned_abs() as usize <= rank)
        .then(|| Word::reduce(z.iter().copied()))
}

/// Graph of a subgroup of `Fix(φ)`; `exact` when it is all of `Fix(φ)`.
#[derive(Debug, Clone)]
pub struct FixedSubgroup {
    pub graph: CoreGraph,
    pub exact: bool,
}

/// Source of fixed subgroups. Implementations plugged into an [`Engine`] must
/// accept the two-letter extensions produced by [`encode_fixed`].
pub trait FixedSubgroupOracle: Send + Sync {
    fn name(&self) -> &str;
    fn fixed_subgroup(&self, phi: &Endomorphism) -> Option<FixedSubgroup>;
}

/// Folds every fixed word up to a length. Only ever a subgroup of `Fix(φ)`.
#[derive(Debug, Clone)]
pub struct BoundedFixedSubgroup {
    pub max_len: usize,
}

impl FixedSubgroupOracle for BoundedFixedSubgroup {
    fn name(&self) -> &str {
        "bounded-fixed-words"
    }

    fn fixed_subgroup(&self, phi: &Endomorphism) -> Option<FixedSubgroup> {
        let r = phi.rank() as i32;
        let mut fixed = Vec::new();
        let mut frontier = vec![Word::identity()];
        for _ in 0..self.max_len {
            let mut next = Vec::new();
            for w in &frontier {
                let last = w.letters().last().copied();
                for g in 1..=r {
                    for l in [g, -g] {
                        if last == Some(-l) {
                            continue;
                        }
                        let mut x = w.clone();
                        x.push(l);
                        if phi.apply(&x) == x {
                            fixed.push(x.clone());
                        }
                        next.push(x);
                    }
                }
            }
            frontier = next;
        }
        Some(FixedSubgroup {
            graph: fold(&fixed, phi.rank(), true),
            exact: false,
        })
    }
}

/// `B·z·E` read in a fixed-subgroup graph: a `B`-edge out of the base, a path
/// over the original letters, then an `E`-edge back.
fn search_fixed_graph(g: &CoreGraph, rank: usize) -> Option<Word> {
    let b = (rank + 1) as i32;
    let e = (rank + 2) as i32;
    if g.alphabet_rank() < rank + 2 {
        return None;
    }
    let p = g.target(0, b)?;
    let q = g.target(0, -e)?;
    let mut prev: Vec<Option<(usize, i32)>> = vec![None; g.num_vertices()];
    let mut seen = vec![false; g.num_vertices()];
    seen[p] = true;
    let mut queue = VecDeque::from([p]);
    while let Some(x) = queue.pop_front() {
        if x == q {
            let mut path = Vec::new();
            let mut cur = q;
            while let Some((from, l)) = prev[cur] {
                path.push(l);
                cur = from;
            }
            path.reverse();
            return Some(Word::reduce(path));
        }
        for gi in 1..=rank as i32 {
            for l in [gi, -gi] {
                if let Some(y) = g.target(x, l) {
                    if !seen[y] {
                        seen[y] = true;
                        prev[y] = Some((x, l));
                        queue.push_back(y);
                    }
                }
            }
        }
    }
    None
}

/// Whether `target` lies in the integer column span of `cols`.
fn in_integer_span(mut cols: Vec<Vec<i128>>, mut target: Vec<i128>) -> Option<bool> {
    let rows = target.len();
    let mut piv = 0;
    for row in 0..rows {
        loop {
            let mut best: Option<usize> = None;
            for c in piv..cols.len() {
                if cols[c][row] != 0
                    && best.is_none_or(|b| cols[c][row].abs() < cols[b][row].abs())
                {
                    best = Some(c);
                }
            }
            let Some(b) = best else { break };
            cols.swap(piv, b);
            let mut done = true;
            for c in piv + 1..cols.len() {
                let f = cols[c][row] / cols[piv][row];
                if f != 0 {
                    for k in 0..rows {
                        let s = f.checked_mul(cols[piv][k])?;
                        cols[c][k] = cols[c][k].checked_sub(s)?;
                    }
                }
                if cols[c][row] != 0 {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if piv < cols.len() && cols[piv][row] != 0 {
            let p = cols[piv][row];
            if target[row] % p != 0 {
                return Some(false);
            }
            let f = target[row] / p;
            for k in 0..rows {
                target[k] = target[k].checked_sub(f.checked_mul(cols[piv][k])?)?;
            }
            piv += 1;
        } else if target[row] != 0 {
            return Some(false);
        }
    }
    Some(target.iter().all(|&t| t == 0))
}

fn abelianize(w: &Word, rank: usize) -> Vec<i128> {
    let mut v = vec![0i128; rank];
    for &l in w.letters() {
        v[l.unsigned_abs() as usize - 1] += i128::from(l.signum());
    }
    v
}

/// True when the abelianisation rules out `u = x⁻¹ v φ(x)`: the difference of
/// exponent sums must lie in the image of `M − I`.
pub fn abelian_obstruction(phi: &Endomorphism, u: &Word, v: &Word) -> bool {
    let r = phi.rank();
    let cols: Vec<Vec<i128>> = (1..=r)
        .map(|g| {
            let mut c = abelianize(phi.image(g), r);
            c[g - 1] -= 1;
            c
        })
        .collect();
    let au = abelianize(u, r);
    let av = abelianize(v, r);
    let target: Vec<i128> = au.iter().zip(&av).map(|(a, b)| a - b).collect();
    in_integer_span(cols, target) == Some(false)
}

/// Exponent `k` when `φ` is `a ↦ a^k` on a rank-one group.
pub(crate) fn rank_one_multiplier(phi: &Endomorphism) -> Option<i64> {
    (phi.rank() == 1).then(|| exponent_of(phi.image(1)))
}

/// Signed length of a word in a rank-one group.
pub(crate) fn exponent_of(w: &Word) -> i64 {
    w.letters().iter().map(|&l| i64::from(l.signum())).sum()
}

/// Bounded meet-in-the-middle search: `x = y·z⁻¹` with `|y|, |z| ≤ ⌈bound/2⌉`.
fn mitm_search(phi: &Endomorphism, u: &Word, v: &Word, bound: usize, cap: usize) -> Option<Word> {
    let half = bound.div_ceil(2);
    let ball = |start: &Word| -> HashMap<Word, Word> {
        let mut out: HashMap<Word, Word> = HashMap::from([(start.clone(), Word::identity())]);
        let mut frontier = vec![(Word::identity(), start.clone())];
        let r = phi.rank() as i32;
        for _ in 0..half {
            let mut next = Vec::new();
            for (y, val) in &frontier {
                let last = y.letters().last().copied();
                for g in 1..=r {
                    for l in [g, -g] {
                        if last == Some(-l) {
                            continue;
                        }
                        let mut y2 = y.clone();
                        y2.push(l);
                        let val2 = Word::letter(-l).mul(val).mul(&phi.image_of_letter(l));
                        if val2.len() > cap {
                            continue;
                        }
                        out.entry(val2.clone()).or_insert_with(|| y2.clone());
                        next.push((y2, val2));
                    }
                }
            }
            frontier = next;
        }
        out
    };
    let forward = ball(v);
    let backward = ball(u);
    let mut best: Option<Word> = None;
    for (val, z) in &backward {
        if let Some(y) = forward.get(val) {
            let x = y.mul(&z.inverse());
            if best.as_ref().is_none_or(|b| x < *b) {
                best = Some(x);
            }
        }
    }
    best
}

impl Engine {
    /// Decides `u = x⁻¹ v φ(x)`. Exact through the abelian obstruction, the
    /// rank-one arithmetic or an exact fixed-subgroup oracle; otherwise a
    /// bounded search that can only answer yes.
    pub fn twisted_conjugate(
        &self,
        phi: &Endomorphism,
        u: &Word,
        v: &Word,
        trace: &mut Trace,
    ) -> Decision<Word> {
        trace.push("twisted-conjugacy");
        if u == v {
            return Decision::Yes(Word::identity());
        }
        if abelian_obstruction(phi, u, v) {
            return Decision::No(Certificate::ExponentSum);
        }
        if let Some(k) = rank_one_multiplier(phi) {
            // abelian: u = v + x(k − 1)
            let diff = exponent_of(u) - exponent_of(v);
            let x = if k == 1 { 0 } else { diff / (k - 1) };
            let x = Word::letter(1).pow(x);
            debug_assert!(verify_twisted(phi, u, v, &x));
            return Decision::Yes(x);
        }
        if let Some(oracle) = self.fixed_oracle() {
            trace.push("fixed-subgroup-oracle");
            let encoded = encode_fixed(phi, u, v);
            if let Some(fs) = oracle.fixed_subgroup(&encoded) {
                match search_fixed_graph(&fs.graph, phi.rank()) {
                    Some(z) if verify_twisted(phi, u, v, &z) => return Decision::Yes(z),
                    None if fs.exact => return Decision::No(Certificate::FixedSubgroupOracle),
                    _ => {}
                }
            }
        }
        trace.push("bounded-twisted-search");
        let bound = self.bounds().conjugator;
        match mitm_search(phi, u, v, bound, self.bounds().max_word_len) {
            Some(x) => {
                debug_assert!(verify_twisted(phi, u, v, &x));
                Decision::Yes(x)
            }
            None => Decision::inconclusive(BoundKind::Conjugator, bound),
        }
    }

    /// Pairs `(p, q)` with `p, q < n` and `φ^p(u)` `φⁿ`-twisted conjugate to
    /// `φ^q(v)`; every other pair reduces to one of these.
    pub fn phi_n_twisted_pairs(
        &self,
        phi: &Endomorphism,
        n: usize,
        u: &Word,
        v: &Word,
        trace: &mut Trace,
    ) -> Decision<TwistedPair> {
        assert!(n >= 1, "n must be positive");
        trace.push("phi-n-twisted-pairs");
        let psi = phi.power(n as i64).expect("nonnegative power");
        let cap = self.bounds().max_word_len;
        let us = orbit(phi, u, n, cap);
        let vs = orbit(phi, v, n, cap);
        if us.len() < n || vs.len() < n {
            return Decision::inconclusive(BoundKind::WordLength, cap);
        }
        let mut open = None;
        for s in 0..2 * n - 1 {
            for p in 0..n {
                let Some(q) = s.checked_sub(p).filter(|&q| q < n) else {
                    continue;
                };
                match self.twisted_conjugate(&psi, &us[p], &vs[q], trace) {
                    Decision::Yes(x) => {
                        return Decision::Yes(TwistedPair { p, q, n, conjugator: x });
                    }
                    Decision::No(_) => {}
                    Decision::Inconclusive(e) => open = Some(e),
                }
            }
        }
        match open {
            Some(e) => Decision::Inconclusive(e),
            None => Decision::No(Certificate::AllBranchesNo),
        }
    }
}

/// `φ^p(u) = x⁻¹ · φ^q(v) · φⁿ(x)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistedPair {
    pub p: usize,
    pub q: usize,
    pub n: usize,
    pub conjugator: Word,
}

impl TwistedPair {
    pub fn verify(&self, phi: &Endomorphism, u: &Word, v: &Word) -> bool {
        let lhs = phi.apply_power(u, self.p);
        let x = &self.conjugator;
        lhs == x
            .inverse()
            .mul(&phi.apply_power(v, self.q))
            .mul(&phi.apply_power(x, self.n))
    }
}

/// `u, φ(u), …, φ^{n-1}(u)`, stopping early past the length cap.
fn orbit(phi: &Endomorphism, u: &Word, n: usize, cap: usize) -> Vec<Word> {
    let mut out = vec![u.clone()];
    while out.len() < n {
        let next = phi.apply(out.last().unwrap());
        if next.len() > cap {
            break;
        }
        out.push(next);
    }
    out
}

/// `x` with `φ^i(u) = x⁻¹ · φ^j(u) · φ(x)`, composed from the one-step
/// identities `φ^{m+1}(u) = φ^m(u)⁻¹ · φ^m(u) · φ(φ^m(u))`.
pub fn twisted_iterate_witness(phi: &Endomorphism, u: &Word, i: usize, j: usize) -> Word {
    let (lo, hi) = (i.min(j), i.max(j));
    let mut x = Word::identity();
    let mut cur = phi.apply_power(u, lo);
    for _ in lo..hi {
        x.mul_assign(&cur);
        cur = phi.apply(&cur);
    }
    if i > j {
        x
    } else {
        x.inverse()
    }
}
