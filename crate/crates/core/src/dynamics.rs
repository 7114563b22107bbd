//! Iterated pullbacks of image subgroups of an injective, non-surjective
//! endomorphism, certification of a stable iterate, and the test whether some
//! iterate of an element is carried by it.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decision::{BoundKind, Certificate, Decision};
use crate::endo::Endomorphism;
use crate::stallings::{
    carries, cycle_graph, fold, pullback_left, pullback_with_pairs, CoreGraph, Folder,
};
use crate::words::{free_conjugacy, is_primitive, root, CyclicWord, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error("the endomorphism is not injective")]
    NotInjective,
    #[error("the endomorphism is surjective")]
    Surjective,
    #[error("stage indices start at 1")]
    ZeroStage,
    #[error("a graph with {vertices} vertices exceeds the size limit")]
    GraphTooLarge { vertices: usize },
    #[error("stage {stage} has a component of rank at least two")]
    NonCyclicComponent { stage: usize },
    #[error("stage {stage} is not carried by stage {previous}")]
    CarryingViolated { previous: usize, stage: usize },
}

/// `k₀ = 2(r − 1)²`.
pub fn k0(rank: usize) -> usize {
    let r = rank.saturating_sub(1);
    2 * r * r
}

/// Largest period tried when certifying a component: `max(1, 6r − 6)`.
pub fn period_bound(rank: usize) -> usize {
    (6 * rank).saturating_sub(6).max(1)
}

/// Image of a based graph under `φ`: every edge is replaced by the path
/// spelling the image of its letter, then folded.
pub fn push_forward(
    phi: &Endomorphism,
    g: &CoreGraph,
    max_vertices: usize,
) -> Result<CoreGraph, DynamicsError> {
    let edges = g.edges();
    let raw: usize = g.num_vertices()
        + edges
            .iter()
            .map(|&(_, l, _)| phi.image(l as usize).len().saturating_sub(1))
            .sum::<usize>();
    if raw > 16 * max_vertices {
        return Err(DynamicsError::GraphTooLarge { vertices: raw });
    }
    let mut f = Folder::new(phi.rank(), false);
    for _ in 0..g.num_vertices() {
        f.add_vertex();
    }
    for (u, l, v) in edges {
        f.add_path(u, phi.image(l as usize), v, Word::identity());
    }
    f.fold();
    let out = f.finish(0, true, Vec::new());
    if out.num_vertices() > max_vertices {
        return Err(DynamicsError::GraphTooLarge {
            vertices: out.num_vertices(),
        });
    }
    Ok(out)
}

/// The graphs of `φ(F), φ²(F), …`, built on demand.
pub struct ImageTower<'a> {
    phi: &'a Endomorphism,
    graphs: Vec<CoreGraph>,
    max_vertices: usize,
}

impl<'a> ImageTower<'a> {
    pub fn new(phi: &'a Endomorphism, max_vertices: usize) -> Self {
        ImageTower {
            phi,
            graphs: vec![fold(phi.images(), phi.rank(), true)],
            max_vertices,
        }
    }

    /// Graph of `φ^i(F)` for `i ≥ 1`.
    pub fn graph(&mut self, i: usize) -> Result<&CoreGraph, DynamicsError> {
        if i == 0 {
            return Err(DynamicsError::ZeroStage);
        }
        while self.graphs.len() < i {
            let next = push_forward(self.phi, self.graphs.last().unwrap(), self.max_vertices)?;
            self.graphs.push(next);
        }
        Ok(&self.graphs[i - 1])
    }
}

/// One stage of the pullback dynamics.
#[derive(Debug, Clone)]
pub struct PullbackStage {
    pub index: usize,
    /// Non-contractible components of the pullback of `φ^i(F)` with itself.
    pub lambda: Vec<CoreGraph>,
    /// Components whose conjugator lies outside `im φ`, up to isomorphism.
    pub hat_lambda: Vec<CoreGraph>,
    /// The cyclic word of each rank-one component of `hat_lambda`.
    pub representatives: Vec<Option<CyclicWord>>,
}

impl PullbackStage {
    pub fn all_cyclic(&self) -> bool {
        self.representatives.iter().all(Option::is_some)
    }
}

pub fn pullback_stage(
    phi: &Endomorphism,
    i: usize,
    tower: &mut ImageTower<'_>,
) -> Result<PullbackStage, DynamicsError> {
    if !phi.is_injective() {
        return Err(DynamicsError::NotInjective);
    }
    if phi.is_surjective() {
        return Err(DynamicsError::Surjective);
    }
    let max_vertices = tower.max_vertices;
    let g = tower.graph(i)?;
    if g.num_vertices() > max_vertices {
        return Err(DynamicsError::GraphTooLarge {
            vertices: g.num_vertices(),
        });
    }
    let paths = g.tree_paths();
    let image = phi.image_graph();
    let mut lambda = Vec::new();
    let mut hat_lambda: Vec<CoreGraph> = Vec::new();
    let mut codes = Vec::new();
    for (comp, (a, b)) in pullback_with_pairs(g, g) {
        let x = paths[a].mul(&paths[b].inverse());
        if !image.contains(&x) {
            let code = comp.canonical_code();
            if !codes.contains(&code) {
                codes.push(code);
                hat_lambda.push(comp.clone());
            }
        }
        lambda.push(comp);
    }
    let representatives = hat_lambda
        .iter()
        .map(|c| (c.rank() == 1).then(|| CyclicWord::new(&c.basis()[0])))
        .collect();
    Ok(PullbackStage {
        index: i,
        lambda,
        hat_lambda,
        representatives,
    })
}

/// A component `⟨c⟩` with `φ^t(c) ∼ c^d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifiedComponent {
    pub representative: CyclicWord,
    pub t: usize,
    pub d: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StableIterate {
    pub k: usize,
    /// Empty when the stage itself is empty.
    pub components: Vec<CertifiedComponent>,
}

impl StableIterate {
    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

/// Finds `t ≤ max(1, 6r−6)` and `2 ≤ d ≤ |φ|^t` with `φ^t(c) ∼ c^d`.
pub fn certify_component(
    phi: &Endomorphism,
    c: &CyclicWord,
    max_word_len: usize,
) -> Option<CertifiedComponent> {
    let n = c.len();
    if n == 0 {
        return None;
    }
    let norm = phi.norm();
    let mut img = c.word().clone();
    for t in 1..=period_bound(phi.rank()) {
        img = phi.apply(&img);
        if img.len() > max_word_len {
            return None;
        }
        let cyc = CyclicWord::new(&img);
        if !cyc.len().is_multiple_of(n) {
            continue;
        }
        let d = cyc.len() / n;
        let within = u32::try_from(t)
            .ok()
            .and_then(|t| norm.checked_pow(t))
            .is_none_or(|cap| d <= cap);
        if d >= 2 && within && cyc == CyclicWord::new(&c.word().pow(d as i64)) {
            return Some(CertifiedComponent {
                representative: c.clone(),
                t,
                d,
            });
        }
    }
    None
}

/// Result of [`stable_iterate_search`] with the stages it computed.
#[derive(Debug, Clone)]
pub struct StableSearch {
    pub decision: Decision<StableIterate>,
    pub stages: Vec<PullbackStage>,
}

/// Computes stages `1, 2, …` until one at `k ≥ max(k₀, 1)` is empty or has
/// every component certified. Each stage is checked to be carried by the
/// previous one.
pub fn stable_iterate_search(
    phi: &Endomorphism,
    max_k: usize,
    max_vertices: usize,
    max_word_len: usize,
) -> Result<StableSearch, DynamicsError> {
    if !phi.is_injective() {
        return Err(DynamicsError::NotInjective);
    }
    if phi.is_surjective() {
        return Err(DynamicsError::Surjective);
    }
    let k0 = k0(phi.rank());
    let start = k0.max(1);
    let mut tower = ImageTower::new(phi, max_vertices);
    let mut stages: Vec<PullbackStage> = Vec::new();
    for k in 1..=max_k {
        let stage = match pullback_stage(phi, k, &mut tower) {
            Ok(s) => s,
            Err(DynamicsError::GraphTooLarge { .. }) => {
                return Ok(StableSearch {
                    decision: Decision::inconclusive(BoundKind::GraphSize, max_vertices),
                    stages,
                });
            }
            Err(e) => return Err(e),
        };
        if let Some(prev) = stages.last() {
            if carries(&prev.hat_lambda, &stage.hat_lambda).is_none() {
                return Err(DynamicsError::CarryingViolated {
                    previous: prev.index,
                    stage: k,
                });
            }
        }
        let certified = if k < start {
            None
        } else if stage.hat_lambda.is_empty() {
            Some(Vec::new())
        } else if !stage.all_cyclic() {
            return Err(DynamicsError::NonCyclicComponent { stage: k });
        } else {
            stage
                .representatives
                .iter()
                .map(|c| certify_component(phi, c.as_ref().unwrap(), max_word_len))
                .collect::<Option<Vec<_>>>()
        };
        stages.push(stage);
        if let Some(components) = certified {
            return Ok(StableSearch {
                decision: Decision::Yes(StableIterate { k, components }),
                stages,
            });
        }
    }
    Ok(StableSearch {
        decision: Decision::inconclusive(BoundKind::MaxK, max_k),
        stages,
    })
}

/// Class of `w` up to inversion.
fn unsigned_class(w: &Word) -> CyclicWord {
    let c = CyclicWord::new(w);
    let ci = c.inverse();
    c.min(ci)
}

/// Root classes `[y]` (up to inversion) such that some `φ^n(y)` is conjugate
/// to a power of `c₀`, each with the least such `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassClosure {
    pub root: Word,
    pub classes: Vec<(CyclicWord, usize)>,
}

impl ClassClosure {
    pub fn level_of(&self, w: &Word) -> Option<usize> {
        let key = unsigned_class(w);
        self.classes.iter().find(|(c, _)| *c == key).map(|&(_, n)| n)
    }
}

/// Root classes of elements `y` with `φ(y)` conjugate to a power of `z`.
pub fn preimage_root_classes(phi: &Endomorphism, z: &Word) -> Vec<Word> {
    let cyc = cycle_graph(z, phi.rank());
    let mut out: Vec<Word> = Vec::new();
    for comp in pullback_left(phi.image_graph(), &cyc, false) {
        let Some(x) = comp.basis_x_labels().into_iter().next() else {
            continue;
        };
        if let Ok((r, _)) = root(&x) {
            let key = unsigned_class(&r);
            if !out.iter().any(|w| unsigned_class(w) == key) {
                out.push(key.word().clone());
            }
        }
    }
    out
}

/// Breadth-first closure of `{c₀}` under taking preimage root classes.
pub fn class_closure(
    phi: &Endomorphism,
    c0: &Word,
    max_classes: usize,
) -> Decision<ClassClosure> {
    let start = unsigned_class(c0);
    let mut classes = vec![(start.clone(), 0usize)];
    let mut seen: HashMap<CyclicWord, usize> = HashMap::from([(start.clone(), 0)]);
    let mut queue = VecDeque::from([(start.word().clone(), 0usize)]);
    while let Some((z, level)) = queue.pop_front() {
        for y in preimage_root_classes(phi, &z) {
            let key = unsigned_class(&y);
            if seen.contains_key(&key) {
                continue;
            }
            if classes.len() >= max_classes {
                return Decision::inconclusive(BoundKind::Closure, max_classes);
            }
            seen.insert(key.clone(), level + 1);
            classes.push((key, level + 1));
            queue.push_back((y, level + 1));
        }
    }
    Decision::Yes(ClassClosure {
        root: start.word().clone(),
        classes,
    })
}

/// `c₀^exponent = conjugator⁻¹ · φ^level(w) · conjugator`, with `⟨c₀⟩`
/// containing the representative of stable component `component`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Carried {
    pub level: usize,
    pub component: usize,
    pub root: Word,
    pub exponent: i64,
    pub conjugator: Word,
}

impl Carried {
    pub fn verify(&self, phi: &Endomorphism, w: &Word) -> bool {
        phi.apply_power(w, self.level).conjugate_by(&self.conjugator) == self.root.pow(self.exponent)
    }
}

/// Closure data for one stable component: the primitive root of its
/// representative and its class closure.
pub fn component_closure(
    phi: &Endomorphism,
    component: &CertifiedComponent,
    max_classes: usize,
) -> Option<Decision<ClassClosure>> {
    let (c0, _) = root(component.representative.word()).ok()?;
    is_primitive(&c0, phi.rank()).then(|| class_closure(phi, &c0, max_classes))
}

/// Carrying test given precomputed closures (`None` where the root of a
/// component is not primitive, which falls back to a bounded search).
pub fn carried_by_closures(
    phi: &Endomorphism,
    w: &Word,
    s: &StableIterate,
    closures: &[Option<Decision<ClassClosure>>],
    bound: usize,
    max_word_len: usize,
) -> Decision<Carried> {
    if s.is_empty() {
        return Decision::No(Certificate::EmptyStableIterate);
    }
    if w.is_identity() {
        return Decision::Yes(Carried {
            level: 0,
            component: 0,
            root: root(s.components[0].representative.word()).unwrap().0,
            exponent: 0,
            conjugator: Word::identity(),
        });
    }
    let (wr, _) = root(w).unwrap();
    let mut best: Option<(usize, usize, Word)> = None;
    let mut open: Option<Decision<Carried>> = None;
    for (idx, (comp, closure)) in s.components.iter().zip(closures).enumerate() {
        match closure {
            Some(Decision::Yes(cl)) => {
                if let Some(level) = cl.level_of(&wr) {
                    if best.as_ref().is_none_or(|b| level < b.0) {
                        best = Some((level, idx, cl.root.clone()));
                    }
                }
            }
            Some(Decision::Inconclusive(e)) => open = Some(Decision::Inconclusive(*e)),
            Some(Decision::No(_)) => {}
            None => {
                let c = comp.representative.word();
                let target = cycle_graph(c, phi.rank());
                let mut x = w.clone();
                for level in 0..=bound {
                    if level > 0 {
                        x = phi.apply(&x);
                    }
                    if x.len() > max_word_len {
                        break;
                    }
                    if crate::stallings::conjugate_into(&x, &target).is_some() {
                        if best.as_ref().is_none_or(|b| level < b.0) {
                            best = Some((level, idx, root(c).unwrap().0));
                        }
                        break;
                    }
                }
                if best.is_none() {
                    open = Some(Decision::inconclusive(BoundKind::Orbit, bound));
                }
            }
        }
    }
    if let Some((level, component, c0)) = best {
        let Some(img) = phi.apply_power_capped(w, level, max_word_len) else {
            return Decision::inconclusive(BoundKind::WordLength, max_word_len);
        };
        let (ir, e) = root(&img).unwrap();
        let (exponent, conjugator) = if let Some(x) = free_conjugacy(&c0, &ir) {
            (e as i64, x)
        } else {
            let x = free_conjugacy(&c0.inverse(), &ir).expect("carried class must match");
            (-(e as i64), x)
        };
        let out = Carried {
            level,
            component,
            root: c0,
            exponent,
            conjugator,
        };
        debug_assert!(out.verify(phi, w));
        return Decision::Yes(out);
    }
    open.unwrap_or(Decision::No(Certificate::NotCarried { d: s.k }))
}

/// Whether some `φ^i(w)` is conjugate into a component of the stable iterate.
pub fn carried_by_stable(
    phi: &Endomorphism,
    w: &Word,
    s: &StableIterate,
    bound: usize,
    max_word_len: usize,
) -> Decision<Carried> {
    let closures: Vec<_> = s
        .components
        .iter()
        .map(|c| component_closure(phi, c, 4 * bound.max(16)))
        .collect();
    carried_by_closures(phi, w, s, &closures, bound, max_word_len)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s, 25).unwrap()
    }

    fn ds() -> Endomorphism {
        Endomorphism::from_strs(&["b", "aa"]).unwrap()
    }

    #[test]
    fn constants() {
        assert_eq!(k0(1), 0);
        assert_eq!(k0(2), 2);
        assert_eq!(k0(3), 8);
        assert_eq!(period_bound(1), 1);
        assert_eq!(period_bound(2), 6);
    }

    #[test]
    fn push_forward_matches_folding_images() {
        let phi = ds();
        let mut tower = ImageTower::new(&phi, 500);
        let g2 = tower.graph(2).unwrap().clone();
        let direct = fold(&[w("aa"), w("bb")], 2, true);
        assert_eq!(g2.canonical_code(), direct.canonical_code());
    }

    #[test]
    fn ds_stable_iterate() {
        let phi = ds();
        let search = stable_iterate_search(&phi, 18, 500, 1 << 14).unwrap();
        let s = search.decision.yes().unwrap();
        assert_eq!(s.k, 2);
        assert_eq!(s.components.len(), 1);
        let c = &s.components[0];
        assert_eq!(c.representative, CyclicWord::new(&w("aa")));
        assert_eq!((c.t, c.d), (2, 2));
    }

    #[test]
    fn stage_rejects_surjective() {
        let phi = Endomorphism::from_strs(&["ab", "b"]).unwrap();
        let mut tower = ImageTower::new(&phi, 500);
        assert!(matches!(
            pullback_stage(&phi, 1, &mut tower),
            Err(DynamicsError::Surjective)
        ));
    }

    #[test]
    fn ds_carrying() {
        let phi = ds();
        let s = stable_iterate_search(&phi, 18, 500, 1 << 14)
            .unwrap()
            .decision
            .yes()
            .unwrap();
        let cl = component_closure(&phi, &s.components[0], 64).unwrap().yes().unwrap();
        assert_eq!(cl.classes.len(), 2);
        let yes = carried_by_stable(&phi, &w("a"), &s, 8, 1 << 14).yes().unwrap();
        assert!(yes.verify(&phi, &w("a")));
        assert_eq!(
            carried_by_stable(&phi, &w("ab"), &s, 8, 1 << 14),
            Decision::No(Certificate::NotCarried { d: 2 })
        );
        let empty = StableIterate { k: 3, components: vec![] };
        assert_eq!(
            carried_by_stable(&phi, &w("a"), &empty, 8, 1 << 14),
            Decision::No(Certificate::EmptyStableIterate)
        );
    }
}
