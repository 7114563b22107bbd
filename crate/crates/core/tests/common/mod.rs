//! Reference implementations and generators shared by the integration tests.
//! Everything here works on raw letter vectors so it stays independent of the
//! library's own word code.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet, VecDeque};

use hnnconj::endo::Endomorphism;
use hnnconj::words::Word;
use rand::rngs::StdRng;
use rand::Rng;

pub type Raw = Vec<i32>;

pub fn reduce(letters: &[i32]) -> Raw {
    let mut out: Raw = Vec::with_capacity(letters.len());
    for &l in letters {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

pub fn inverse(w: &[i32]) -> Raw {
    w.iter().rev().map(|&l| -l).collect()
}

pub fn concat(a: &[i32], b: &[i32]) -> Raw {
    let mut v = a.to_vec();
    v.extend_from_slice(b);
    reduce(&v)
}

pub fn raw(w: &Word) -> Raw {
    w.letters().to_vec()
}

pub fn word(r: &[i32]) -> Word {
    Word::reduce(r.iter().copied())
}

/// Image of `w` under the map given by generator images.
pub fn substitute(w: &[i32], images: &[Raw]) -> Raw {
    let mut out = Vec::new();
    for &l in w {
        let img = &images[l.unsigned_abs() as usize - 1];
        if l > 0 {
            out.extend_from_slice(img);
        } else {
            out.extend(inverse(img));
        }
    }
    reduce(&out)
}

pub fn images(phi: &Endomorphism) -> Vec<Raw> {
    phi.images().iter().map(raw).collect()
}

pub fn apply_power(w: &[i32], imgs: &[Raw], n: usize) -> Raw {
    let mut cur = reduce(w);
    for _ in 0..n {
        cur = substitute(&cur, imgs);
    }
    cur
}

/// Cyclically reduced core, by trimming inverse end letters.
pub fn cyclic_core(w: &[i32]) -> Raw {
    let w = reduce(w);
    let (mut lo, mut hi) = (0, w.len());
    while hi - lo >= 2 && w[lo] == -w[hi - 1] {
        lo += 1;
        hi -= 1;
    }
    w[lo..hi].to_vec()
}

/// Conjugacy by comparing every rotation of the cyclic cores.
pub fn conjugate(u: &[i32], v: &[i32]) -> bool {
    let (cu, cv) = (cyclic_core(u), cyclic_core(v));
    if cu.len() != cv.len() {
        return false;
    }
    if cu.is_empty() {
        return true;
    }
    (0..cu.len()).any(|k| cu[k..].iter().chain(&cu[..k]).eq(cv.iter()))
}

/// All reduced words of length at most `n` over `rank` generators.
pub fn all_words(rank: usize, n: usize) -> Vec<Raw> {
    let letters: Vec<i32> = (1..=rank as i32).flat_map(|g| [g, -g]).collect();
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &frontier {
            for &l in &letters {
                if w.last() == Some(&-l) {
                    continue;
                }
                let mut x: Raw = w.clone();
                x.push(l);
                next.push(x);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Subgroup elements reachable by multiplying generators one at a time while
/// every partial product stays within `cap` letters.
pub fn subgroup_ball(gens: &[Raw], cap: usize) -> HashSet<Raw> {
    let mut steps: Vec<Raw> = Vec::new();
    for g in gens {
        steps.push(g.clone());
        steps.push(inverse(g));
    }
    let mut seen: HashSet<Raw> = HashSet::new();
    seen.insert(Vec::new());
    let mut queue = VecDeque::from([Vec::new()]);
    while let Some(w) = queue.pop_front() {
        for s in &steps {
            let x = concat(&w, s);
            if x.len() <= cap && seen.insert(x.clone()) {
                queue.push_back(x);
            }
        }
    }
    seen
}

pub fn random_word(rng: &mut StdRng, rank: usize, min: usize, max: usize) -> Raw {
    loop {
        let len = rng.gen_range(min..=max);
        let mut w = Vec::with_capacity(len);
        while w.len() < len {
            let g = rng.gen_range(1..=rank as i32);
            let l = if rng.gen_bool(0.5) { g } else { -g };
            if w.last() != Some(&-l) {
                w.push(l);
            }
        }
        if w.len() >= min {
            return w;
        }
    }
}

/// Random automorphism as a product of elementary Nielsen moves.
pub fn random_automorphism(rng: &mut StdRng, rank: usize, moves: usize) -> Vec<Raw> {
    let mut imgs: Vec<Raw> = (1..=rank as i32).map(|g| vec![g]).collect();
    for _ in 0..moves {
        let i = rng.gen_range(0..rank);
        match rng.gen_range(0..3) {
            0 if rank > 1 => {
                let mut j = rng.gen_range(0..rank - 1);
                if j >= i {
                    j += 1;
                }
                let y = if rng.gen_bool(0.5) { imgs[j].clone() } else { inverse(&imgs[j]) };
                imgs[i] = if rng.gen_bool(0.5) { concat(&imgs[i], &y) } else { concat(&y, &imgs[i]) };
            }
            1 => imgs[i] = inverse(&imgs[i]),
            _ if rank > 1 => {
                let j = (i + 1) % rank;
                imgs.swap(i, j);
            }
            _ => imgs[i] = inverse(&imgs[i]),
        }
    }
    imgs
}

pub fn endo(imgs: &[Raw]) -> Endomorphism {
    Endomorphism::new(imgs.len(), imgs.iter().map(|r| word(r)).collect()).unwrap()
}

/// `f ∘ g` on image lists.
pub fn compose(f: &[Raw], g: &[Raw]) -> Vec<Raw> {
    g.iter().map(|w| substitute(w, f)).collect()
}

/// Injective, non-surjective maps of F₂ that are injective for a reason
/// visible by hand: their images form Nielsen-reduced pairs.
pub fn base_injective_f2() -> Vec<Vec<Raw>> {
    vec![
        vec![vec![1, 1], vec![2]],
        vec![vec![2], vec![1, 1]],
        vec![vec![1, 2], vec![2, 1]],
        vec![vec![1], vec![2, 1, 2]],
        vec![vec![1, 2], vec![2, 2]],
        vec![vec![2, 1], vec![1, 1, 2]],
    ]
}

/// `α ∘ σ ∘ β` with short automorphisms around a fixed injective map.
pub fn random_injective_f2(rng: &mut StdRng) -> Vec<Raw> {
    let base = base_injective_f2();
    let s = &base[rng.gen_range(0..base.len())];
    let a = { let n = rng.gen_range(0..=2); random_automorphism(rng, 2, n) };
    let b = { let n = rng.gen_range(0..=1); random_automorphism(rng, 2, n) };
    compose(&a, &compose(s, &b))
}

/// `t^i·x·t^{-j}` computed by a stack rewrite, separate from the library.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub i: usize,
    pub x: Raw,
    pub j: usize,
}

/// HNN letters: `0` stands for `t`, `i32::MIN` for `t⁻¹`, others are base letters.
pub const T: i32 = 0;
pub const T_INV: i32 = i32::MIN;

pub fn hnn_rewrite(w: &[i32], imgs: &[Raw]) -> Frame {
    let mut f = Frame { i: 0, x: Vec::new(), j: 0 };
    for &l in w {
        match l {
            T if f.j > 0 => f.j -= 1,
            T => {
                f.i += 1;
                f.x = substitute(&f.x, imgs);
            }
            T_INV => f.j += 1,
            y => f.x = concat(&f.x, &apply_power(&[y], imgs, f.j)),
        }
    }
    f
}

pub fn hnn_equal(a: &Frame, b: &Frame, imgs: &[Raw]) -> bool {
    if a.i as i64 - a.j as i64 != b.i as i64 - b.j as i64 {
        return false;
    }
    let top = a.i.max(b.i);
    apply_power(&a.x, imgs, top - a.i) == apply_power(&b.x, imgs, top - b.i)
}

pub fn hnn_inverse(w: &[i32]) -> Raw {
    w.iter()
        .rev()
        .map(|&l| match l {
            T => T_INV,
            T_INV => T,
            y => -y,
        })
        .collect()
}

pub fn hnn_from_str(s: &str) -> Raw {
    s.chars()
        .filter(|&c| c != '1')
        .map(|c| match c {
            't' => T,
            'T' => T_INV,
            _ => {
                let g = hnnconj::words::generator_index(c).unwrap() as i32;
                if c.is_ascii_uppercase() {
                    -g
                } else {
                    g
                }
            }
        })
        .collect()
}

pub fn random_hnn_word(rng: &mut StdRng, rank: usize, len: usize) -> Raw {
    (0..len)
        .map(|_| {
            if rng.gen_bool(0.25) {
                if rng.gen_bool(0.5) {
                    T
                } else {
                    T_INV
                }
            } else {
                let g = rng.gen_range(1..=rank as i32);
                if rng.gen_bool(0.5) {
                    g
                } else {
                    -g
                }
            }
        })
        .collect()
}

pub fn hnn_to_string(w: &[i32]) -> String {
    if w.is_empty() {
        return "1".to_string();
    }
    w.iter()
        .map(|&l| match l {
            T => "t".to_string(),
            T_INV => "T".to_string(),
            y => hnnconj::words::letter_name(y),
        })
        .collect()
}

/// Orbit of cyclic classes with counts, used to report rates.
pub fn tally<K: std::hash::Hash + Eq>(items: impl IntoIterator<Item = K>) -> HashMap<K, usize> {
    let mut m = HashMap::new();
    for k in items {
        *m.entry(k).or_insert(0) += 1;
    }
    m
}
