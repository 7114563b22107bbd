//! Endomorphisms of free groups, homomorphisms between free groups of
//! different ranks, the Nielsen retraction onto an injective free factor and
//! the bounded stable-image probe.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::stallings::{fold, fold_tracked, CoreGraph};
use crate::words::{generator_index, letter_key, letter_name, Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EndoError {
    #[error("expected {expected} images, got {got}")]
    ImageCount { expected: usize, got: usize },
    #[error("image of generator {index} uses a letter outside rank {rank}")]
    ImageOutOfRange { index: usize, rank: usize },
    #[error("negative exponent {0} for a power of an endomorphism")]
    NegativePower(i64),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("generator `{0}` is defined twice")]
    DuplicateGenerator(String),
    #[error("generator `{0}` has no image")]
    MissingGenerator(String),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("Nielsen reduction left {nontrivial} nontrivial images for an image of rank {rank}")]
    NielsenIncomplete { nontrivial: usize, rank: usize },
}

/// Homomorphism `F(domain_rank) → F(codomain_rank)` given by basis images.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Homomorphism {
    domain_rank: usize,
    codomain_rank: usize,
    images: Vec<Word>,
}

impl Homomorphism {
    pub fn new(domain_rank: usize, codomain_rank: usize, images: Vec<Word>) -> Result<Self, EndoError> {
        if images.len() != domain_rank {
            return Err(EndoError::ImageCount {
                expected: domain_rank,
                got: images.len(),
            });
        }
        if let Some(i) = images.iter().position(|w| w.max_generator() > codomain_rank) {
            return Err(EndoError::ImageOutOfRange {
                index: i + 1,
                rank: codomain_rank,
            });
        }
        Ok(Homomorphism {
            domain_rank,
            codomain_rank,
            images,
        })
    }

    /// The inclusion of `F(domain)` into `F(codomain)` for `domain ≤ codomain`.
    pub fn inclusion(domain_rank: usize, codomain_rank: usize) -> Self {
        Homomorphism {
            domain_rank,
            codomain_rank,
            images: (1..=domain_rank).map(Word::generator).collect(),
        }
    }

    pub fn domain_rank(&self) -> usize {
        self.domain_rank
    }

    pub fn codomain_rank(&self) -> usize {
        self.codomain_rank
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn apply(&self, w: &Word) -> Word {
        w.substitute(&self.images)
    }

    /// Image of a single letter (the inverse image word for negative letters).
    pub fn image_of_letter(&self, l: i32) -> Word {
        let img = &self.images[l.unsigned_abs() as usize - 1];
        if l > 0 {
            img.clone()
        } else {
            img.inverse()
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Homomorphism) -> Homomorphism {
        assert_eq!(other.codomain_rank, self.domain_rank, "ranks do not compose");
        Homomorphism {
            domain_rank: other.domain_rank,
            codomain_rank: self.codomain_rank,
            images: other.images.iter().map(|w| self.apply(w)).collect(),
        }
    }
}

/// Endomorphism of a free group of fixed rank, with lazily cached facts.
#[derive(Clone)]
pub struct Endomorphism {
    rank: usize,
    images: Vec<Word>,
    injective: OnceLock<bool>,
    image_graph: OnceLock<CoreGraph>,
}

impl fmt::Debug for Endomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Endomorphism")
            .field("rank", &self.rank)
            .field("images", &self.images)
            .finish()
    }
}

impl PartialEq for Endomorphism {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.images == other.images
    }
}

impl Eq for Endomorphism {}

impl Hash for Endomorphism {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rank.hash(state);
        self.images.hash(state);
    }
}

impl Serialize for Endomorphism {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.images.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Endomorphism {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let images = Vec::<Word>::deserialize(d)?;
        let rank = images.len();
        Endomorphism::new(rank, images).map_err(serde::de::Error::custom)
    }
}

impl Endomorphism {
    pub fn new(rank: usize, images: Vec<Word>) -> Result<Self, EndoError> {
        let h = Homomorphism::new(rank, rank, images)?;
        Ok(Self::from_images_unchecked(rank, h.images))
    }

    fn from_images_unchecked(rank: usize, images: Vec<Word>) -> Self {
        Endomorphism {
            rank,
            images,
            injective: OnceLock::new(),
            image_graph: OnceLock::new(),
        }
    }

    pub fn from_homomorphism(h: Homomorphism) -> Result<Self, EndoError> {
        if h.domain_rank != h.codomain_rank {
            return Err(EndoError::ImageCount {
                expected: h.codomain_rank,
                got: h.domain_rank,
            });
        }
        Ok(Self::from_images_unchecked(h.domain_rank, h.images))
    }

    /// Parses images given as words in the textual syntax, one per generator.
    pub fn from_strs(images: &[&str]) -> Result<Self, EndoError> {
        let rank = images.len();
        let ws = images
            .iter()
            .map(|s| Word::parse(s, rank))
            .collect::<Result<Vec<_>, _>>()?;
        Endomorphism::new(rank, ws)
    }

    pub fn identity(rank: usize) -> Self {
        Self::from_images_unchecked(rank, (1..=rank).map(Word::generator).collect())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn domain_rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image(&self, generator: usize) -> &Word {
        &self.images[generator - 1]
    }

    /// `φ(l)` for a signed letter.
    pub fn image_of_letter(&self, l: i32) -> Word {
        let img = &self.images[l.unsigned_abs() as usize - 1];
        if l > 0 {
            img.clone()
        } else {
            img.inverse()
        }
    }

    pub fn as_homomorphism(&self) -> Homomorphism {
        Homomorphism {
            domain_rank: self.rank,
            codomain_rank: self.rank,
            images: self.images.clone(),
        }
    }

    /// `|φ|`: the longest basis image.
    pub fn norm(&self) -> usize {
        self.images.iter().map(Word::len).max().unwrap_or(0)
    }

    pub fn apply(&self, w: &Word) -> Word {
        w.substitute(&self.images)
    }

    /// `φ^n(w)` without building the power map.
    pub fn apply_power(&self, w: &Word, n: usize) -> Word {
        let mut x = w.clone();
        for _ in 0..n {
            x = self.apply(&x);
        }
        x
    }

    /// Like [`Endomorphism::apply_power`] but gives up once a length exceeds `cap`.
    pub fn apply_power_capped(&self, w: &Word, n: usize, cap: usize) -> Option<Word> {
        let mut x = w.clone();
        for _ in 0..n {
            x = self.apply(&x);
            if x.len() > cap {
                return None;
            }
        }
        Some(x)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Endomorphism) -> Endomorphism {
        assert_eq!(self.rank, other.rank);
        Self::from_images_unchecked(
            self.rank,
            other.images.iter().map(|w| self.apply(w)).collect(),
        )
    }

    pub fn power(&self, n: i64) -> Result<Endomorphism, EndoError> {
        if n < 0 {
            return Err(EndoError::NegativePower(n));
        }
        let mut out = Endomorphism::identity(self.rank);
        for _ in 0..n {
            out = self.compose(&out);
        }
        Ok(out)
    }

    /// Appends generators `rank+1, …` with the given images.
    pub fn extend(&self, extra: &[Word]) -> Result<Endomorphism, EndoError> {
        let mut images = self.images.clone();
        images.extend_from_slice(extra);
        Endomorphism::new(images.len(), images)
    }

    /// Folded image subgroup `φ(F)`, with X-labels tracking the generators.
    pub fn image_graph(&self) -> &CoreGraph {
        self.image_graph
            .get_or_init(|| fold_tracked(&self.images, self.rank, true).0)
    }

    /// Injective iff the image subgroup has full rank (free groups are Hopfian).
    pub fn is_injective(&self) -> bool {
        *self
            .injective
            .get_or_init(|| self.image_graph().rank() == self.rank)
    }

    pub fn is_surjective(&self) -> bool {
        self.rank == 0 || self.image_graph().is_full_rose()
    }

    pub fn is_automorphism(&self) -> bool {
        self.is_surjective()
    }

    /// A preimage of `w` when `w ∈ φ(F)`; unique when `φ` is injective.
    pub fn pullback_element(&self, w: &Word) -> Option<Word> {
        self.image_graph().membership(w).map(|wit| wit.expression)
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, w)| w.letters() == [i as i32 + 1])
    }

    /// Parses `a -> word` lines. Every generator of `rank` must appear once.
    pub fn parse(text: &str, rank: usize) -> Result<Endomorphism, EndoError> {
        let mut images: Vec<Option<Word>> = vec![None; rank];
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (lhs, rhs) = parse_map_line(line).ok_or_else(|| EndoError::Parse {
                line: lineno + 1,
                message: format!("expected `GEN -> WORD`, found `{line}`"),
            })?;
            let g = generator_of(lhs, rank).map_err(|message| EndoError::Parse {
                line: lineno + 1,
                message,
            })?;
            if images[g - 1].is_some() {
                return Err(EndoError::DuplicateGenerator(lhs.to_string()));
            }
            images[g - 1] = Some(Word::parse(rhs, rank)?);
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(i, w)| w.ok_or_else(|| EndoError::MissingGenerator(letter_name(i as i32 + 1))))
            .collect::<Result<Vec<_>, _>>()?;
        Endomorphism::new(rank, images)
    }
}

/// Splits `lhs -> rhs`.
pub(crate) fn parse_map_line(line: &str) -> Option<(&str, &str)> {
    let (l, r) = line.split_once("->")?;
    Some((l.trim(), r.trim()))
}

/// Resolves a generator name (lowercase, within rank).
pub(crate) fn generator_of(name: &str, rank: usize) -> Result<usize, String> {
    let mut cs = name.chars();
    let (Some(c), None) = (cs.next(), cs.next()) else {
        return Err(format!("`{name}` is not a single generator letter"));
    };
    if c == 't' || c == 'T' {
        return Err("`t` is reserved for the stable letter".to_string());
    }
    if !c.is_ascii_lowercase() {
        return Err(format!("`{name}` is not a lowercase generator"));
    }
    match generator_index(c) {
        Some(g) if g <= rank => Ok(g),
        _ => Err(format!("generator `{name}` outside rank {rank}")),
    }
}

impl fmt::Display for Endomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, w) in self.images.iter().enumerate() {
            writeln!(f, "{} -> {}", letter_name(i as i32 + 1), w)?;
        }
        Ok(())
    }
}

/// Retraction of `F` onto a free factor `F′` on which the induced map is injective.
///
/// With `coords: F → F′` and `embed: F′ → F`, the projection is
/// `π = embed ∘ coords` and the restricted map is `φ̄ = coords ∘ φ ∘ embed`.
#[derive(Debug, Clone)]
pub struct Retraction {
    /// Basis of `F′` as words of `F`.
    pub factor_basis: Vec<Word>,
    pub projection: Endomorphism,
    /// `φ̄` in the basis of `F′` (generator `i` is `factor_basis[i-1]`).
    pub restricted: Endomorphism,
    /// Automorphism with `α(x_i) = factor_basis[i-1]` for `i ≤ rank(F′)`.
    pub alpha: Endomorphism,
    pub alpha_inverse: Endomorphism,
    pub coords: Homomorphism,
    pub embed: Homomorphism,
    /// Ranks `rk F = r₀ > r₁ > … > rk F′` visited by the recursion.
    pub rank_chain: Vec<usize>,
}

impl Retraction {
    pub fn factor_rank(&self) -> usize {
        self.factor_basis.len()
    }

    fn identity(phi: &Endomorphism) -> Retraction {
        let r = phi.rank();
        Retraction {
            factor_basis: (1..=r).map(Word::generator).collect(),
            projection: Endomorphism::identity(r),
            restricted: phi.clone(),
            alpha: Endomorphism::identity(r),
            alpha_inverse: Endomorphism::identity(r),
            coords: Homomorphism::inclusion(r, r),
            embed: Homomorphism::inclusion(r, r),
            rank_chain: vec![r],
        }
    }
}

/// Order used by Nielsen reduction: length, then the lesser and greater of the
/// left halves of `w` and `w⁻¹`.
fn nielsen_key(w: &Word) -> (usize, Vec<u32>, Vec<u32>) {
    let half = w.len().div_ceil(2);
    let left = |x: &Word| -> Vec<u32> { x.letters()[..half].iter().map(|&l| letter_key(l)).collect() };
    let a = left(w);
    let b = left(&w.inverse());
    if a <= b {
        (w.len(), a, b)
    } else {
        (w.len(), b, a)
    }
}

/// Substitutes `x_i ↦ image` into every word of `images`.
fn substitute_generator(images: &mut [Word], i: usize, image: &Word) {
    let rank = images.len();
    let mut sub: Vec<Word> = (1..=rank).map(Word::generator).collect();
    sub[i] = image.clone();
    for w in images.iter_mut() {
        *w = w.substitute(&sub);
    }
}

struct NielsenState {
    tuple: Vec<Word>,
    alpha: Vec<Word>,
    alpha_inv: Vec<Word>,
}

impl NielsenState {
    /// `u_i ← u_j^e u_i` (left) or `u_i ← u_i u_j^e`.
    fn apply_move(&mut self, i: usize, j: usize, e: i64, left: bool, new_value: Word) {
        let yj = self.alpha[j].pow(e);
        let xj_inv = Word::generator(j + 1).pow(-e);
        let xi = Word::generator(i + 1);
        if left {
            self.alpha[i] = yj.mul(&self.alpha[i]);
            substitute_generator(&mut self.alpha_inv, i, &xj_inv.mul(&xi));
        } else {
            self.alpha[i] = self.alpha[i].mul(&yj);
            substitute_generator(&mut self.alpha_inv, i, &xi.mul(&xj_inv));
        }
        self.tuple[i] = new_value;
    }

    fn reduce(&mut self) {
        let n = self.tuple.len();
        loop {
            let mut moved = false;
            'search: for i in 0..n {
                if self.tuple[i].is_identity() {
                    continue;
                }
                let key_i = nielsen_key(&self.tuple[i]);
                for j in 0..n {
                    if j == i || self.tuple[j].is_identity() {
                        continue;
                    }
                    for e in [1i64, -1] {
                        let uj = self.tuple[j].pow(e);
                        for left in [true, false] {
                            let cand = if left {
                                uj.mul(&self.tuple[i])
                            } else {
                                self.tuple[i].mul(&uj)
                            };
                            if nielsen_key(&cand) < key_i {
                                self.apply_move(i, j, e, left, cand);
                                moved = true;
                                break 'search;
                            }
                        }
                    }
                }
            }
            if !moved {
                return;
            }
        }
    }
}

/// Retraction onto a free factor on which `φ` induces an injective map.
pub fn nielsen_retract(phi: &Endomorphism) -> Result<Retraction, EndoError> {
    if phi.is_injective() {
        return Ok(Retraction::identity(phi));
    }
    let r = phi.rank();
    let mut st = NielsenState {
        tuple: phi.images().to_vec(),
        alpha: (1..=r).map(Word::generator).collect(),
        alpha_inv: (1..=r).map(Word::generator).collect(),
    };
    st.reduce();
    // nontrivial images first, keeping their order
    let order: Vec<usize> = (0..r)
        .filter(|&i| !st.tuple[i].is_identity())
        .chain((0..r).filter(|&i| st.tuple[i].is_identity()))
        .collect();
    let k = order.iter().filter(|&&i| !st.tuple[i].is_identity()).count();
    let image_rank = fold(&st.tuple, r, true).rank();
    if k != image_rank {
        return Err(EndoError::NielsenIncomplete {
            nontrivial: k,
            rank: image_rank,
        });
    }
    let alpha: Vec<Word> = order.iter().map(|&i| st.alpha[i].clone()).collect();
    // P⁻¹ sends x_{order[a]} to x_a
    let mut perm_inv = vec![Word::identity(); r];
    for (a, &i) in order.iter().enumerate() {
        perm_inv[i] = Word::generator(a + 1);
    }
    let alpha_inv: Vec<Word> = st.alpha_inv.iter().map(|w| w.substitute(&perm_inv)).collect();

    // coords1: F → F(k), x ↦ P_k α⁻¹(x)
    let kill: Vec<Word> = (1..=r)
        .map(|i| if i <= k { Word::generator(i) } else { Word::identity() })
        .collect();
    let coords1 = Homomorphism {
        domain_rank: r,
        codomain_rank: k,
        images: alpha_inv.iter().map(|w| w.substitute(&kill)).collect(),
    };
    let embed1 = Homomorphism {
        domain_rank: k,
        codomain_rank: r,
        images: alpha[..k].to_vec(),
    };
    let psi = Endomorphism::from_images_unchecked(
        k,
        embed1.images.iter().map(|y| coords1.apply(&phi.apply(y))).collect(),
    );
    let inner = nielsen_retract(&psi)?;

    let embed = embed1.compose(&inner.embed);
    let coords = inner.coords.compose(&coords1);
    let projection = Endomorphism::from_images_unchecked(r, embed.compose(&coords).images);
    // α = α₁ ∘ ext(α′), α⁻¹ = ext(α′⁻¹) ∘ α₁⁻¹
    let ext = |m: &Endomorphism| -> Endomorphism {
        let mut images = m.images().to_vec();
        images.extend((k + 1..=r).map(Word::generator));
        Endomorphism::from_images_unchecked(r, images)
    };
    let alpha1 = Endomorphism::from_images_unchecked(r, alpha);
    let alpha1_inv = Endomorphism::from_images_unchecked(r, alpha_inv);
    let alpha_total = alpha1.compose(&ext(&inner.alpha));
    let alpha_total_inv = ext(&inner.alpha_inverse).compose(&alpha1_inv);
    let mut rank_chain = vec![r];
    rank_chain.extend(inner.rank_chain);
    Ok(Retraction {
        factor_basis: embed.images.clone(),
        projection,
        restricted: inner.restricted,
        alpha: alpha_total,
        alpha_inverse: alpha_total_inv,
        coords,
        embed,
        rank_chain,
    })
}

/// Outcome of following `w, φ⁻¹(w), φ⁻²(w), …`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum StableImageProbe {
    /// `w ∉ φ^m(F)` and `w ∈ φ^{m-1}(F)`; `preimage` is `φ^{-(m-1)}(w)`.
    NotInImagePower { m: usize, preimage: Word },
    /// The preimage chain repeated, so `w ∈ φ^i(F)` for every `i`.
    InStableImage,
    /// `w ∈ φ^bound(F)` but membership in every power was not certified.
    InAllUpToBound,
}

/// Bounded probe for membership of `w` in the stable image of injective `φ`.
pub fn stable_image_probe(phi: &Endomorphism, w: &Word, bound: usize) -> StableImageProbe {
    let mut seen = vec![w.clone()];
    let mut cur = w.clone();
    for m in 1..=bound.max(1) {
        match phi.pullback_element(&cur) {
            None => {
                return StableImageProbe::NotInImagePower { m, preimage: cur };
            }
            Some(prev) => {
                if seen.contains(&prev) {
                    return StableImageProbe::InStableImage;
                }
                seen.push(prev.clone());
                cur = prev;
            }
        }
    }
    StableImageProbe::InAllUpToBound
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
    fn apply_and_power() {
        let phi = ds();
        assert_eq!(phi.apply(&w("ab")), w("baa"));
        assert_eq!(phi.power(2).unwrap().apply(&w("a")), w("aa"));
        assert_eq!(phi.power(0).unwrap(), Endomorphism::identity(2));
        assert!(matches!(phi.power(-1), Err(EndoError::NegativePower(-1))));
        assert_eq!(Endomorphism::identity(2).apply(&w("abAB")), w("abAB"));
        assert_eq!(phi.norm(), 2);
    }

    #[test]
    fn injectivity_examples() {
        assert!(ds().is_injective());
        assert!(!Endomorphism::from_strs(&["a", "a"]).unwrap().is_injective());
        assert!(Endomorphism::from_strs(&["ab", "b"]).unwrap().is_injective());
        assert!(Endomorphism::from_strs(&["ab", "b"]).unwrap().is_surjective());
        assert!(!ds().is_surjective());
    }

    #[test]
    fn parse_round_trip() {
        let phi = Endomorphism::parse("a -> b\nb -> aa\n", 2).unwrap();
        assert_eq!(phi, ds());
        assert_eq!(Endomorphism::parse(&phi.to_string(), 2).unwrap(), phi);
        assert!(matches!(
            Endomorphism::parse("a -> b\na -> a\nb -> a", 2),
            Err(EndoError::DuplicateGenerator(_))
        ));
        assert!(matches!(
            Endomorphism::parse("a -> b", 2),
            Err(EndoError::MissingGenerator(_))
        ));
        assert!(matches!(
            Endomorphism::parse("a b", 2),
            Err(EndoError::Parse { .. })
        ));
    }

    #[test]
    fn pullback_element_examples() {
        let phi = ds();
        assert_eq!(phi.pullback_element(&w("b")), Some(w("a")));
        assert_eq!(phi.pullback_element(&w("a")), None);
        let x = w("abAAbab");
        assert_eq!(phi.pullback_element(&phi.apply(&x)), Some(x));
    }

    #[test]
    fn probe_examples() {
        let rank1 = Endomorphism::from_strs(&["aa"]).unwrap();
        assert!(matches!(
            stable_image_probe(&rank1, &w("a"), 8),
            StableImageProbe::NotInImagePower { m: 1, .. }
        ));
        let aut = Endomorphism::from_strs(&["ab", "b"]).unwrap();
        assert_eq!(stable_image_probe(&aut, &w("abA"), 8), StableImageProbe::InStableImage);
        assert!(matches!(
            stable_image_probe(&ds(), &w("ab"), 8),
            StableImageProbe::NotInImagePower { m: 1, .. }
        ));
        match stable_image_probe(&ds(), &w("aa"), 8) {
            StableImageProbe::NotInImagePower { m, preimage } => {
                assert_eq!(m, 3);
                assert_eq!(preimage, w("a"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    fn check_retraction(phi: &Endomorphism, ret: &Retraction) {
        let r = phi.rank();
        let pi = &ret.projection;
        for i in 1..=r {
            let x = Word::generator(i);
            assert_eq!(pi.apply(&pi.apply(&x)), pi.apply(&x));
            assert_eq!(ret.alpha.compose(&ret.alpha_inverse).apply(&x), x);
            assert_eq!(ret.alpha_inverse.compose(&ret.alpha).apply(&x), x);
        }
        assert!(ret.restricted.is_injective());
        for pair in ret.rank_chain.windows(2) {
            assert!(pair[1] < pair[0]);
        }
        for n in 0..=5usize {
            for i in 1..=r {
                let x = Word::generator(i);
                let left = ret
                    .embed
                    .apply(&ret.restricted.apply_power(&ret.coords.apply(&x), n));
                let right = pi.apply(&phi.apply_power(&x, n));
                assert_eq!(left, right, "n = {n}, generator {i}");
            }
        }
    }

    #[test]
    fn retraction_examples() {
        let phi = ds();
        let ret = nielsen_retract(&phi).unwrap();
        assert_eq!(ret.factor_rank(), 2);
        assert_eq!(ret.projection, Endomorphism::identity(2));

        let phi = Endomorphism::from_strs(&["ab", "ab"]).unwrap();
        let ret = nielsen_retract(&phi).unwrap();
        assert_eq!(ret.factor_rank(), 1);
        assert_eq!(ret.restricted.images().len(), 1);
        check_retraction(&phi, &ret);

        let phi = Endomorphism::from_strs(&["1", "1"]).unwrap();
        let ret = nielsen_retract(&phi).unwrap();
        assert_eq!(ret.factor_rank(), 0);
        check_retraction(&phi, &ret);

        let phi = Endomorphism::from_strs(&["abA", "aBBA", "bb"]).unwrap();
        let ret = nielsen_retract(&phi).unwrap();
        check_retraction(&phi, &ret);
    }
}
