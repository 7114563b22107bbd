//! Freely reduced words, cyclic words, roots and Whitehead primitivity.
//!
//! A letter is a nonzero `i32`: `k > 0` is the `k`-th generator and `-k` its
//! inverse. Words are kept freely reduced at all times.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Generator names in index order. `t` is reserved for the stable letter.
pub const GENERATOR_NAMES: &[u8] = b"abcdefghijklmnopqrsuvwxyz";

/// Maximum rank expressible in the textual word syntax.
pub const MAX_NAMED_RANK: usize = 25;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("letter index {index} outside alphabet of rank {rank}")]
    OutOfRange { index: usize, rank: usize },
    #[error("the stable letter `{0}` cannot appear in a base-group word")]
    StableLetter(char),
    #[error("unrecognised character `{0}` in word")]
    BadChar(char),
    #[error("zero is not a letter")]
    ZeroLetter,
    #[error("the identity has no root")]
    Identity,
}

/// Maps a generator name to its 1-based index, if it is one.
pub fn generator_index(c: char) -> Option<usize> {
    let lower = c.to_ascii_lowercase();
    GENERATOR_NAMES
        .iter()
        .position(|&g| g as char == lower)
        .map(|i| i + 1)
}

/// Name of a signed letter: lowercase for generators, uppercase for inverses.
pub fn letter_name(l: i32) -> String {
    let idx = l.unsigned_abs() as usize;
    if (1..=MAX_NAMED_RANK).contains(&idx) {
        let c = GENERATOR_NAMES[idx - 1] as char;
        if l > 0 {
            c.to_string()
        } else {
            c.to_ascii_uppercase().to_string()
        }
    } else {
        format!("[{l}]")
    }
}

/// Sort key of a letter: a < A < b < B < ...
#[inline]
pub fn letter_key(l: i32) -> u32 {
    2 * (l.unsigned_abs() - 1) + u32::from(l < 0)
}

/// Finite ranked alphabet of free generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    rank: usize,
}

impl Alphabet {
    pub fn new(rank: usize) -> Self {
        Alphabet { rank }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn contains(&self, l: i32) -> bool {
        l != 0 && (l.unsigned_abs() as usize) <= self.rank
    }

    /// All `2 * rank` letters in key order.
    pub fn letters(&self) -> impl Iterator<Item = i32> + '_ {
        (1..=self.rank as i32).flat_map(|g| [g, -g])
    }
}

/// A freely reduced word. The empty word is the identity.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Word {
    letters: Vec<i32>,
}

impl From<Word> for String {
    fn from(w: Word) -> String {
        w.to_string()
    }
}

impl TryFrom<String> for Word {
    type Error = WordError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        Word::parse(&s, MAX_NAMED_RANK)
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortlex order with a < A < b < B < ...
impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            self.letters
                .iter()
                .map(|&l| letter_key(l))
                .cmp(other.letters.iter().map(|&l| letter_key(l)))
        })
    }
}

impl Word {
    pub fn identity() -> Self {
        Word { letters: Vec::new() }
    }

    pub fn letter(l: i32) -> Self {
        assert!(l != 0, "zero is not a letter");
        Word { letters: vec![l] }
    }

    /// Generator `index` (1-based) as a word.
    pub fn generator(index: usize) -> Self {
        Word::letter(index as i32)
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn reduce<I: IntoIterator<Item = i32>>(raw: I) -> Self {
        let mut out: Vec<i32> = Vec::new();
        for l in raw {
            debug_assert!(l != 0);
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word { letters: out }
    }

    /// Like [`Word::reduce`] but checks every letter against `alphabet`.
    pub fn reduce_checked(raw: &[i32], alphabet: Alphabet) -> Result<Self, WordError> {
        for &l in raw {
            if l == 0 {
                return Err(WordError::ZeroLetter);
            }
            if !alphabet.contains(l) {
                return Err(WordError::OutOfRange {
                    index: l.unsigned_abs() as usize,
                    rank: alphabet.rank(),
                });
            }
        }
        Ok(Word::reduce(raw.iter().copied()))
    }

    /// Parses the textual syntax: lowercase generators, uppercase inverses,
    /// `1` or the empty string for the identity. Whitespace is ignored.
    pub fn parse(s: &str, rank: usize) -> Result<Self, WordError> {
        let trimmed = s.trim();
        if trimmed == "1" || trimmed == "ε" {
            return Ok(Word::identity());
        }
        let mut raw = Vec::with_capacity(trimmed.len());
        for c in trimmed.chars() {
            if c.is_whitespace() {
                continue;
            }
            if c == 't' || c == 'T' {
                return Err(WordError::StableLetter(c));
            }
            let idx = generator_index(c).ok_or(WordError::BadChar(c))?;
            if idx > rank {
                return Err(WordError::OutOfRange { index: idx, rank });
            }
            raw.push(if c.is_ascii_uppercase() { -(idx as i32) } else { idx as i32 });
        }
        Ok(Word::reduce(raw))
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn into_letters(self) -> Vec<i32> {
        self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    /// Largest generator index used, 0 for the identity.
    pub fn max_generator(&self) -> usize {
        self.letters
            .iter()
            .map(|l| l.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn inverse(&self) -> Self {
        Word {
            letters: self.letters.iter().rev().map(|&l| -l).collect(),
        }
    }

    pub fn mul(&self, other: &Word) -> Self {
        let mut out = self.clone();
        out.mul_assign(other);
        out
    }

    pub fn mul_assign(&mut self, other: &Word) {
        for &l in &other.letters {
            self.push(l);
        }
    }

    /// Appends one letter with cancellation.
    pub fn push(&mut self, l: i32) {
        if self.letters.last() == Some(&-l) {
            self.letters.pop();
        } else {
            self.letters.push(l);
        }
    }

    /// `self^n` for any integer `n`.
    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..n.unsigned_abs() {
            out.mul_assign(&base);
        }
        out
    }

    /// `x⁻¹ · self · x`
    pub fn conjugate_by(&self, x: &Word) -> Self {
        x.inverse().mul(self).mul(x)
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(&f), Some(&l)) => self.letters.len() == 1 || f != -l,
            _ => true,
        }
    }

    /// Substitutes a word for each generator and reduces.
    pub fn substitute(&self, images: &[Word]) -> Word {
        let mut out = Word::identity();
        for &l in &self.letters {
            let img = &images[l.unsigned_abs() as usize - 1];
            if l > 0 {
                for &x in &img.letters {
                    out.push(x);
                }
            } else {
                for &x in img.letters.iter().rev() {
                    out.push(-x);
                }
            }
        }
        out
    }

    /// Removes every letter whose generator index is above `rank`.
    pub fn truncate_alphabet(&self, rank: usize) -> Word {
        Word::reduce(
            self.letters
                .iter()
                .copied()
                .filter(|l| l.unsigned_abs() as usize <= rank),
        )
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for &l in &self.letters {
            write!(f, "{}", letter_name(l))?;
        }
        Ok(())
    }
}

/// Splits `w` as `conjugator⁻¹ · core · conjugator` with `core` cyclically reduced.
pub fn cyclic_reduce(w: &Word) -> (Word, Word) {
    let ls = w.letters();
    let n = ls.len();
    let mut i = 0;
    while i < n / 2 && ls[i] == -ls[n - 1 - i] {
        i += 1;
    }
    let core = Word {
        letters: ls[i..n - i].to_vec(),
    };
    // w = P core P⁻¹ with P = ls[..i]; conjugator = P⁻¹.
    let conj = Word {
        letters: ls[..i].to_vec(),
    }
    .inverse();
    (core, conj)
}

/// Index of the lexicographically least rotation (two-pointer minimum
/// expression).
fn least_rotation(s: &[u32]) -> usize {
    let n = s.len();
    let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
    while i < n && j < n && k < n {
        let (a, b) = (s[(i + k) % n], s[(j + k) % n]);
        if a == b {
            k += 1;
            continue;
        }
        if a > b {
            i += k + 1;
        } else {
            j += k + 1;
        }
        if i == j {
            j += 1;
        }
        k = 0;
    }
    i.min(j) % n.max(1)
}

/// Conjugacy class of a word: cyclically reduced, stored as its least rotation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CyclicWord {
    canonical: Word,
}

impl CyclicWord {
    pub fn new(w: &Word) -> Self {
        let (core, _) = cyclic_reduce(w);
        let (canonical, _) = canonical_rotation(&core);
        CyclicWord { canonical }
    }

    pub fn word(&self) -> &Word {
        &self.canonical
    }

    pub fn len(&self) -> usize {
        self.canonical.len()
    }

    pub fn is_empty(&self) -> bool {
        self.canonical.is_empty()
    }

    pub fn inverse(&self) -> CyclicWord {
        CyclicWord::new(&self.canonical.inverse())
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.canonical)
    }
}

/// Least rotation of a cyclically reduced word and the offset it starts at.
fn canonical_rotation(core: &Word) -> (Word, usize) {
    let keys: Vec<u32> = core.letters().iter().map(|&l| letter_key(l)).collect();
    let k = least_rotation(&keys);
    let ls = core.letters();
    let mut rotated = Vec::with_capacity(ls.len());
    rotated.extend_from_slice(&ls[k..]);
    rotated.extend_from_slice(&ls[..k]);
    (Word { letters: rotated }, k)
}

/// Returns `x` with `u = x⁻¹ · v · x` when `u` and `v` are conjugate in F.
pub fn free_conjugacy(u: &Word, v: &Word) -> Option<Word> {
    let (cu, pu) = cyclic_reduce(u);
    let (cv, pv) = cyclic_reduce(v);
    if cu.len() != cv.len() {
        return None;
    }
    let (canon_u, ku) = canonical_rotation(&cu);
    let (canon_v, kv) = canonical_rotation(&cv);
    if canon_u != canon_v {
        return None;
    }
    let n = cv.len();
    // cu = rot_ku⁻¹(canon), cv = rot_kv⁻¹(canon) so cu = rot_s(cv) with s = kv - ku.
    let s = if n == 0 { 0 } else { (kv + n - ku) % n };
    let prefix = Word {
        letters: cv.letters()[..s].to_vec(),
    };
    // cu = prefix⁻¹ cv prefix, u = pu⁻¹ cu pu, cv = pv v pv⁻¹.
    let x = pv.inverse().mul(&prefix).mul(&pu);
    debug_assert_eq!(&v.conjugate_by(&x), u);
    Some(x)
}

/// Maximal root: `w = root^exponent` with `exponent ≥ 1` maximal.
pub fn root(w: &Word) -> Result<(Word, usize), WordError> {
    if w.is_identity() {
        return Err(WordError::Identity);
    }
    let (core, conj) = cyclic_reduce(w);
    let ls = core.letters();
    let n = ls.len();
    let period = smallest_period(ls);
    let (r, e) = if n % period == 0 {
        (
            Word {
                letters: ls[..period].to_vec(),
            },
            n / period,
        )
    } else {
        (core.clone(), 1)
    };
    Ok((r.conjugate_by(&conj), e))
}

fn smallest_period(s: &[i32]) -> usize {
    let n = s.len();
    let mut pi = vec![0usize; n];
    for i in 1..n {
        let mut k = pi[i - 1];
        while k > 0 && s[i] != s[k] {
            k = pi[k - 1];
        }
        if s[i] == s[k] {
            k += 1;
        }
        pi[i] = k;
    }
    n - pi[n - 1]
}

/// Image of `w` under the Whitehead automorphism given by `multiplier` and
/// `choices[g]` (bit 0: right-multiply, bit 1: left-multiply by the inverse).
fn whitehead_image(w: &Word, multiplier: i32, choices: &[u8]) -> Word {
    let m = multiplier;
    let mut out = Word::identity();
    for &l in w.letters() {
        let g = l.unsigned_abs() as usize;
        if g == m.unsigned_abs() as usize {
            out.push(l);
            continue;
        }
        let c = choices[g - 1];
        let gen = g as i32;
        // image of the generator: (m⁻¹)^{bit1} g m^{bit0}
        let mut img: Vec<i32> = Vec::with_capacity(3);
        if c & 2 != 0 {
            img.push(-m);
        }
        img.push(gen);
        if c & 1 != 0 {
            img.push(m);
        }
        if l > 0 {
            for x in img {
                out.push(x);
            }
        } else {
            for x in img.into_iter().rev() {
                out.push(-x);
            }
        }
    }
    out
}

/// Whitehead length minimisation to a local minimum of the cyclic length.
pub fn whitehead_minimize(w: &Word, rank: usize) -> Word {
    let (mut current, _) = cyclic_reduce(w);
    let rank = rank.max(current.max_generator());
    if rank == 0 {
        return current;
    }
    let others = rank - 1;
    let combos = 4usize.pow(others as u32);
    'outer: loop {
        for mg in 1..=rank as i32 {
            for m in [mg, -mg] {
                for code in 0..combos {
                    let mut choices = vec![0u8; rank];
                    let mut c = code;
                    for (g, slot) in choices.iter_mut().enumerate() {
                        if g + 1 == mg as usize {
                            continue;
                        }
                        *slot = (c % 4) as u8;
                        c /= 4;
                    }
                    let img = whitehead_image(&current, m, &choices);
                    let (img_core, _) = cyclic_reduce(&img);
                    if img_core.len() < current.len() {
                        current = img_core;
                        continue 'outer;
                    }
                }
            }
        }
        return current;
    }
}

/// True iff `w` belongs to some free basis of F of the given rank.
pub fn is_primitive(w: &Word, rank: usize) -> bool {
    if w.is_identity() {
        return false;
    }
    whitehead_minimize(w, rank).len() == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s, 25).unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(w("aA"), Word::identity());
        assert_eq!(w("abBa"), w("aa"));
        assert_eq!(w("1"), Word::identity());
        assert_eq!(w(""), Word::identity());
    }

    #[test]
    fn parse_rejects_stable_letter_and_range() {
        assert_eq!(Word::parse("atb", 2), Err(WordError::StableLetter('t')));
        assert_eq!(
            Word::parse("abc", 2),
            Err(WordError::OutOfRange { index: 3, rank: 2 })
        );
        assert!(matches!(Word::parse("a1", 2), Err(WordError::BadChar('1'))));
        assert!(Word::reduce_checked(&[1, 0], Alphabet::new(2)).is_err());
        assert!(Word::reduce_checked(&[1, -3], Alphabet::new(2)).is_err());
    }

    #[test]
    fn letters_skip_t() {
        assert_eq!(generator_index('s'), Some(19));
        assert_eq!(generator_index('u'), Some(20));
        assert_eq!(generator_index('t'), None);
        assert_eq!(letter_name(20), "u");
        assert_eq!(letter_name(-1), "A");
    }

    #[test]
    fn cyclic_reduce_examples() {
        let (core, c) = cyclic_reduce(&w("baB"));
        assert_eq!(core, w("a"));
        assert_eq!(c, w("B"));
        let (core, c) = cyclic_reduce(&w("ab"));
        assert_eq!(core, w("ab"));
        assert_eq!(c, Word::identity());
    }

    #[test]
    fn conjugacy_examples() {
        let x = free_conjugacy(&w("ab"), &w("ba")).unwrap();
        assert_eq!(w("ba").conjugate_by(&x), w("ab"));
        assert!(x == w("b") || x == w("A"));
        assert!(free_conjugacy(&w("a"), &w("b")).is_none());
        assert_eq!(free_conjugacy(&w("1"), &w("1")), Some(Word::identity()));
    }

    #[test]
    fn root_examples() {
        assert_eq!(root(&w("abab")).unwrap(), (w("ab"), 2));
        assert_eq!(root(&w("ab")).unwrap(), (w("ab"), 1));
        assert_eq!(root(&w("baaaB")).unwrap(), (w("baB"), 3));
        assert_eq!(root(&Word::identity()), Err(WordError::Identity));
    }

    #[test]
    fn canonical_rotation_is_least() {
        let c = CyclicWord::new(&w("bab"));
        assert_eq!(c.word(), &w("abb"));
        assert_eq!(CyclicWord::new(&w("Abba")), CyclicWord::new(&w("bb")));
    }

    #[test]
    fn primitivity_examples() {
        assert!(is_primitive(&w("a"), 2));
        assert!(is_primitive(&w("ab"), 2));
        assert!(!is_primitive(&w("aa"), 2));
        assert!(!is_primitive(&w("abAB"), 2));
        assert!(is_primitive(&w("aab"), 2));
        assert!(!is_primitive(&Word::identity(), 2));
    }

    #[test]
    fn display_identity() {
        assert_eq!(Word::identity().to_string(), "1");
        assert_eq!(w("aBc").to_string(), "aBc");
    }
}
