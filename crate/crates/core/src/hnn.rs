//! Ascending HNN-extensions `⟨F, t | t⁻¹xt = φ(x)⟩`: presentations, words in
//! the base letters and `t`, the `t^i·x·t^{-j}` form and conjugacy.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decision::{Certificate, Decision, Trace};
use crate::endo::{generator_of, parse_map_line, Endomorphism};
use crate::engine::Engine;
use crate::words::{generator_index, letter_name, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("missing `rank N` line")]
    MissingRank,
    #[error("line {line}: invalid rank `{text}`")]
    BadRank { line: usize, text: String },
    #[error("line {line}: expected `GEN -> WORD`, found `{text}`")]
    Malformed { line: usize, text: String },
    #[error("line {line}: generator `{name}` is defined twice")]
    DuplicateGenerator { line: usize, name: String },
    #[error("line {line}: {message}")]
    UnknownLetter { line: usize, message: String },
    #[error("generator `{0}` has no image")]
    MissingGenerator(String),
    #[error("the endomorphism is not injective")]
    NotInjective,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HnnWordError {
    #[error("unrecognised character `{0}`")]
    BadChar(char),
    #[error("letter `{letter}` outside rank {rank}")]
    OutOfRange { letter: char, rank: usize },
}

/// Parses a presentation file into its endomorphism without checking injectivity.
pub fn parse_endomorphism_file(text: &str) -> Result<Endomorphism, PresentationError> {
    let mut rank: Option<usize> = None;
    let mut images: Vec<Option<Word>> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let n = lineno + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some(r) = rank else {
            let value = line
                .strip_prefix("rank")
                .filter(|rest| rest.starts_with(char::is_whitespace))
                .ok_or(PresentationError::MissingRank)?
                .trim();
            let r: usize = value.parse().map_err(|_| PresentationError::BadRank {
                line: n,
                text: value.to_string(),
            })?;
            if r == 0 || r > crate::words::MAX_NAMED_RANK {
                return Err(PresentationError::BadRank {
                    line: n,
                    text: value.to_string(),
                });
            }
            rank = Some(r);
            images = vec![None; r];
            continue;
        };
        let (lhs, rhs) = parse_map_line(line).ok_or_else(|| PresentationError::Malformed {
            line: n,
            text: line.to_string(),
        })?;
        let g = generator_of(lhs, r).map_err(|message| PresentationError::UnknownLetter { line: n, message })?;
        if images[g - 1].is_some() {
            return Err(PresentationError::DuplicateGenerator {
                line: n,
                name: lhs.to_string(),
            });
        }
        let w = Word::parse(rhs, r).map_err(|e| PresentationError::UnknownLetter {
            line: n,
            message: e.to_string(),
        })?;
        images[g - 1] = Some(w);
    }
    let rank = rank.ok_or(PresentationError::MissingRank)?;
    let images = images
        .into_iter()
        .enumerate()
        .map(|(i, w)| w.ok_or_else(|| PresentationError::MissingGenerator(letter_name(i as i32 + 1))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Endomorphism::new(rank, images).expect("images were parsed within rank"))
}

/// `F ∗_φ` for an injective endomorphism `φ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HnnPresentation {
    phi: Endomorphism,
}

impl HnnPresentation {
    pub fn new(phi: Endomorphism) -> Result<Self, PresentationError> {
        if !phi.is_injective() {
            return Err(PresentationError::NotInjective);
        }
        Ok(HnnPresentation { phi })
    }

    pub fn parse(text: &str) -> Result<Self, PresentationError> {
        HnnPresentation::new(parse_endomorphism_file(text)?)
    }

    pub fn phi(&self) -> &Endomorphism {
        &self.phi
    }

    pub fn rank(&self) -> usize {
        self.phi.rank()
    }

    /// Parses a word in the base letters and `t`/`T`.
    pub fn parse_word(&self, s: &str) -> Result<HnnWord, HnnWordError> {
        HnnWord::parse(s, self.rank())
    }

    /// The `t^i·x·t^{-j}` form of a word.
    pub fn rewrite(&self, w: &HnnWord) -> HnnElement {
        let mut e = HnnElement::identity();
        for &l in &w.0 {
            e = e.push(&self.phi, l);
        }
        e
    }

    pub fn mul(&self, a: &HnnElement, b: &HnnElement) -> HnnElement {
        a.mul(&self.phi, b)
    }

    /// Equality in the group, compared after moving both to a common frame.
    pub fn equal(&self, a: &HnnElement, b: &HnnElement) -> bool {
        if a.retraction_exponent() != b.retraction_exponent() {
            return false;
        }
        let top = a.i.max(b.i);
        self.phi.apply_power(&a.x, top - a.i) == self.phi.apply_power(&b.x, top - b.i)
    }

    /// `c⁻¹·h·c`.
    pub fn conjugate(&self, h: &HnnElement, c: &HnnElement) -> HnnElement {
        self.mul(&self.mul(&c.inverse(), h), c)
    }
}

/// One letter of an HNN word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HnnLetter {
    Base(i32),
    /// `t` when true, `t⁻¹` when false.
    Stable(bool),
}

impl HnnLetter {
    fn inverse(self) -> HnnLetter {
        match self {
            HnnLetter::Base(l) => HnnLetter::Base(-l),
            HnnLetter::Stable(s) => HnnLetter::Stable(!s),
        }
    }
}

/// Word in the base letters and the stable letter, freely reduced.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct HnnWord(pub Vec<HnnLetter>);

impl HnnWord {
    pub fn parse(s: &str, rank: usize) -> Result<Self, HnnWordError> {
        let trimmed = s.trim();
        let mut out = HnnWord::default();
        if trimmed == "1" || trimmed == "ε" {
            return Ok(out);
        }
        for c in trimmed.chars() {
            if c.is_whitespace() {
                continue;
            }
            let l = match c {
                't' => HnnLetter::Stable(true),
                'T' => HnnLetter::Stable(false),
                _ => {
                    let idx = generator_index(c).ok_or(HnnWordError::BadChar(c))?;
                    if idx > rank {
                        return Err(HnnWordError::OutOfRange { letter: c, rank });
                    }
                    HnnLetter::Base(if c.is_ascii_uppercase() { -(idx as i32) } else { idx as i32 })
                }
            };
            out.push(l);
        }
        Ok(out)
    }

    pub fn from_base(w: &Word) -> Self {
        HnnWord(w.letters().iter().map(|&l| HnnLetter::Base(l)).collect())
    }

    pub fn stable_power(n: i64) -> Self {
        let l = HnnLetter::Stable(n >= 0);
        HnnWord(vec![l; n.unsigned_abs() as usize])
    }

    pub fn push(&mut self, l: HnnLetter) {
        if self.0.last() == Some(&l.inverse()) {
            self.0.pop();
        } else {
            self.0.push(l);
        }
    }

    pub fn mul(&self, other: &HnnWord) -> HnnWord {
        let mut out = self.clone();
        for &l in &other.0 {
            out.push(l);
        }
        out
    }

    pub fn inverse(&self) -> HnnWord {
        HnnWord(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Exponent sum of `t`.
    pub fn t_exponent(&self) -> i64 {
        self.0
            .iter()
            .map(|l| match l {
                HnnLetter::Stable(true) => 1,
                HnnLetter::Stable(false) => -1,
                HnnLetter::Base(_) => 0,
            })
            .sum()
    }
}

impl fmt::Display for HnnWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for l in &self.0 {
            match l {
                HnnLetter::Base(x) => write!(f, "{}", letter_name(*x))?,
                HnnLetter::Stable(true) => write!(f, "t")?,
                HnnLetter::Stable(false) => write!(f, "T")?,
            }
        }
        Ok(())
    }
}

/// `t^i · x · t^{-j}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HnnElement {
    pub i: usize,
    pub x: Word,
    pub j: usize,
}

impl HnnElement {
    pub fn identity() -> Self {
        HnnElement {
            i: 0,
            x: Word::identity(),
            j: 0,
        }
    }

    pub fn base(x: Word) -> Self {
        HnnElement { i: 0, x, j: 0 }
    }

    /// `tⁿ` for any sign of `n`.
    pub fn stable(n: i64) -> Self {
        HnnElement {
            i: n.max(0) as usize,
            x: Word::identity(),
            j: (-n).max(0) as usize,
        }
    }

    pub fn retraction_exponent(&self) -> i64 {
        self.i as i64 - self.j as i64
    }

    pub fn inverse(&self) -> Self {
        HnnElement {
            i: self.j,
            x: self.x.inverse(),
            j: self.i,
        }
    }

    /// Right multiplication by one letter.
    fn push(self, phi: &Endomorphism, l: HnnLetter) -> Self {
        let HnnElement { i, mut x, j } = self;
        match l {
            HnnLetter::Base(y) => {
                x.mul_assign(&phi.apply_power(&Word::letter(y), j));
                HnnElement { i, x, j }
            }
            HnnLetter::Stable(true) if j > 0 => HnnElement { i, x, j: j - 1 },
            HnnLetter::Stable(true) => HnnElement {
                i: i + 1,
                x: phi.apply(&x),
                j: 0,
            },
            HnnLetter::Stable(false) => HnnElement { i, x, j: j + 1 },
        }
    }

    pub fn mul(&self, phi: &Endomorphism, other: &HnnElement) -> HnnElement {
        if self.j >= other.i {
            let s = self.j - other.i;
            HnnElement {
                i: self.i,
                x: self.x.mul(&phi.apply_power(&other.x, s)),
                j: other.j + s,
            }
        } else {
            let k = other.i - self.j;
            HnnElement {
                i: self.i + k,
                x: phi.apply_power(&self.x, k).mul(&other.x),
                j: other.j,
            }
        }
    }

    /// The word `t^i · x · T^j`; rewriting it gives back `self` exactly.
    pub fn to_word(&self) -> HnnWord {
        HnnWord::stable_power(self.i as i64)
            .mul(&HnnWord::from_base(&self.x))
            .mul(&HnnWord::stable_power(-(self.j as i64)))
    }
}

impl fmt::Display for HnnElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_word())
    }
}

/// Witness that `g = Z⁻¹·h·Z`, together with the twisted data it came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjugacyWitness {
    /// Exponents with `φ^p(u) = x⁻¹·φ^q(v)·φⁿ(x)` for the shifted forms.
    pub p: usize,
    pub q: usize,
    pub n: usize,
    pub x: Word,
    /// `t^q·x·t^{-p}`, conjugating the shifted forms.
    pub inner: HnnElement,
    /// Set when the shifted forms had negative exponent and were inverted.
    pub inverted: bool,
    /// Conjugates `h` to `g`.
    pub conjugator: HnnElement,
}

/// Whether `g = Z⁻¹·h·Z` in `F ∗_φ`.
pub fn verify_witness(pres: &HnnPresentation, g: &HnnElement, h: &HnnElement, z: &HnnElement) -> bool {
    pres.equal(g, &pres.conjugate(h, z))
}

/// `g = t^i·g′·t^{-i}` with `g′ = u·t^{-n}`.
struct Shifted {
    i: usize,
    u: Word,
    n: i64,
}

fn shift(e: &HnnElement) -> Shifted {
    Shifted {
        i: e.i,
        u: e.x.clone(),
        n: e.j as i64 - e.i as i64,
    }
}

/// `u·t^{-n}` as an element, for either sign of `n`.
fn shifted_element(pres: &HnnPresentation, u: &Word, n: i64) -> HnnElement {
    pres.mul(&HnnElement::base(u.clone()), &HnnElement::stable(-n))
}

impl Engine {
    /// Decides whether `g` and `h` are conjugate in `F ∗_φ`; a `Yes` carries a
    /// conjugator `Z` with `g = Z⁻¹·h·Z`.
    pub fn hnn_conjugate(
        &self,
        pres: &HnnPresentation,
        g: &HnnWord,
        h: &HnnWord,
        trace: &mut Trace,
    ) -> Decision<ConjugacyWitness> {
        let phi = pres.phi();
        let ge = pres.rewrite(g);
        let he = pres.rewrite(h);
        trace.push("retraction");
        let (eg, eh) = (ge.retraction_exponent(), he.retraction_exponent());
        if eg != eh {
            return Decision::No(Certificate::RetractionExponent { g: eg, h: eh });
        }
        let (sg, sh) = (shift(&ge), shift(&he));
        let n = sg.n;
        let inverted = n < 0;
        let (u, v) = if inverted {
            trace.push("invert-negative-exponent");
            (sg.u.inverse(), sh.u.inverse())
        } else {
            (sg.u.clone(), sh.u.clone())
        };
        let m = n.unsigned_abs() as usize;
        let pair = self.twisted_pair_general(phi, m, &u, &v, trace);
        let pair = match pair {
            Decision::Yes(p) => p,
            Decision::No(c) => return Decision::No(c),
            Decision::Inconclusive(e) => return Decision::Inconclusive(e),
        };
        trace.push("assemble-witness");
        let inner = HnnElement {
            i: pair.q,
            x: pair.conjugator.clone(),
            j: pair.p,
        };
        // conjugator between g′ and h′
        let w = if inverted {
            let vu = HnnElement::base(sh.u.clone());
            let ui = HnnElement::base(sg.u.inverse());
            pres.mul(&pres.mul(&vu, &inner), &ui)
        } else {
            inner.clone()
        };
        let conjugator = pres.mul(
            &pres.mul(&HnnElement::stable(sh.i as i64), &w),
            &HnnElement::stable(-(sg.i as i64)),
        );
        debug_assert!(pres.equal(
            &shifted_element(pres, &sg.u, n),
            &pres.conjugate(&shifted_element(pres, &sh.u, n), &w)
        ));
        let witness = ConjugacyWitness {
            p: pair.p,
            q: pair.q,
            n: m,
            x: pair.conjugator,
            inner,
            inverted,
            conjugator,
        };
        if verify_witness(pres, &ge, &he, &witness.conjugator) {
            Decision::Yes(witness)
        } else {
            // a twisted pair always assembles into a conjugator
            Decision::inconclusive(crate::decision::BoundKind::Conjugator, 0)
        }
    }
}
