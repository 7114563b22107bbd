//! Exponent problems for endomorphisms of free groups: `φ^p(u) ∼ v`,
//! `φ^p(u) ∼ φ^q(v)`, their lifts through a retraction onto an injective
//! free factor, and the equality variants.

pub mod integer;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::decision::{BoundKind, Certificate, Decision, Exhausted, Trace};
use crate::endo::{nielsen_retract, stable_image_probe, Endomorphism, StableImageProbe};
use crate::engine::Engine;
use crate::twisted::{exponent_of, rank_one_multiplier, TwistedPair};
use crate::words::{free_conjugacy, root, CyclicWord, Word};

use integer::{integer_exp_solve, IntegerExpInstance};

/// Pluggable decision for `φ^p(u) ∼ v`. Yes answers are re-verified; an
/// oracle used on the equality variants must accept one extra fixed letter.
pub trait BrinkmannOracle: Send + Sync {
    fn name(&self) -> &str;
    fn single_exponent(&self, phi: &Endomorphism, u: &Word, v: &Word) -> Decision<usize>;
}

/// `φ^p(u) = x⁻¹ · v · x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingleExponent {
    pub p: usize,
    pub conjugator: Word,
}

impl SingleExponent {
    pub fn verify(&self, phi: &Endomorphism, u: &Word, v: &Word) -> bool {
        phi.apply_power(u, self.p) == v.conjugate_by(&self.conjugator)
    }
}

/// `φ^p(u) = x⁻¹ · φ^q(v) · x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentPair {
    pub p: usize,
    pub q: usize,
    pub conjugator: Word,
    /// Set when the pair was found with the roles of `u` and `v` exchanged.
    pub swapped: bool,
}

impl ExponentPair {
    pub fn verify(&self, phi: &Endomorphism, u: &Word, v: &Word) -> bool {
        phi.apply_power(u, self.p) == phi.apply_power(v, self.q).conjugate_by(&self.conjugator)
    }

    /// The same relation read as a pair for `(v, u)`.
    pub fn transpose(self) -> ExponentPair {
        ExponentPair {
            p: self.q,
            q: self.p,
            conjugator: self.conjugator.inverse(),
            swapped: !self.swapped,
        }
    }
}

/// `φ^p(u) = x⁻¹ · (v·k) · x` with `φ(k) = ε`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelLift {
    pub p: usize,
    pub kernel: Word,
    pub conjugator: Word,
}

impl KernelLift {
    pub fn verify(&self, phi: &Endomorphism, u: &Word, v: &Word) -> bool {
        phi.apply(&self.kernel).is_identity()
            && phi.apply_power(u, self.p) == v.mul(&self.kernel).conjugate_by(&self.conjugator)
    }
}

/// `φ^p(u) = v·k` with `φ(k) = ε`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelEquality {
    pub p: usize,
    pub kernel: Word,
}

impl KernelEquality {
    pub fn verify(&self, phi: &Endomorphism, u: &Word, v: &Word) -> bool {
        phi.apply(&self.kernel).is_identity() && phi.apply_power(u, self.p) == v.mul(&self.kernel)
    }
}

/// `φ^p(u) = φ^q(v)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EqualPair {
    pub p: usize,
    pub q: usize,
}

impl EqualPair {
    pub fn verify(&self, phi: &Endomorphism, u: &Word, v: &Word) -> bool {
        phi.apply_power(u, self.p) == phi.apply_power(v, self.q)
    }
}

/// Output of the large-exponent step: no pair with `p ≥ q ≥ d` exists when
/// the decision is `No`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutsideImage {
    pub d: usize,
    pub decision: Decision<ExponentPair>,
}

fn word_cap(cap: usize) -> Exhausted {
    Exhausted {
        bound: BoundKind::WordLength,
        value: cap,
    }
}

/// Builds the verified pair `(p, q)` if `φ^p(u) ∼ φ^q(v)`.
fn pair_at(
    phi: &Endomorphism,
    u: &Word,
    v: &Word,
    p: usize,
    q: usize,
    cap: usize,
) -> Result<Option<ExponentPair>, Exhausted> {
    let up = phi.apply_power_capped(u, p, cap).ok_or(word_cap(cap))?;
    let vq = phi.apply_power_capped(v, q, cap).ok_or(word_cap(cap))?;
    Ok(free_conjugacy(&up, &vq).map(|x| ExponentPair {
        p,
        q,
        conjugator: x,
        swapped: false,
    }))
}

/// `u, φ(u), …, φ^n(u)`, stopping past the length cap.
fn orbit(phi: &Endomorphism, u: &Word, n: usize, cap: usize) -> Vec<Word> {
    let mut out = vec![u.clone()];
    while out.len() <= n {
        let next = phi.apply(out.last().unwrap());
        if next.len() > cap {
            break;
        }
        out.push(next);
    }
    out
}

/// Least `(p, q)` by `p + q` among the computed orbit prefixes.
fn grid_pair(phi: &Endomorphism, u: &Word, v: &Word, n: usize, cap: usize) -> Option<ExponentPair> {
    let us = orbit(phi, u, n, cap);
    let vs = orbit(phi, v, n, cap);
    let mut index: HashMap<CyclicWord, usize> = HashMap::new();
    for (q, w) in vs.iter().enumerate() {
        index.entry(CyclicWord::new(w)).or_insert(q);
    }
    let mut best: Option<(usize, usize)> = None;
    for (p, w) in us.iter().enumerate() {
        if let Some(&q) = index.get(&CyclicWord::new(w)) {
            if best.is_none_or(|(bp, bq)| p + q < bp + bq) {
                best = Some((p, q));
            }
        }
    }
    let (p, q) = best?;
    let x = free_conjugacy(&us[p], &vs[q])?;
    Some(ExponentPair {
        p,
        q,
        conjugator: x,
        swapped: false,
    })
}

fn is_rank_one_injective(phi: &Endomorphism) -> Option<i64> {
    rank_one_multiplier(phi).filter(|&k| k != 0)
}

impl Engine {
    /// Some `p` with `φ^p(u) ∼ v`: a direct orbit walk, a periodicity
    /// certificate, an exact layer through the stable iterate, then the
    /// plugged oracle.
    pub fn single_exponent_conj(
        &self,
        phi: &Endomorphism,
        u: &Word,
        v: &Word,
        trace: &mut Trace,
    ) -> Decision<SingleExponent> {
        trace.push("single-exponent");
        let cap = self.bounds().max_word_len;
        let injective = phi.is_injective();
        if injective && (u.is_identity() || v.is_identity()) {
            return if u.is_identity() && v.is_identity() {
                Decision::Yes(SingleExponent {
                    p: 0,
                    conjugator: Word::identity(),
                })
            } else {
                Decision::No(Certificate::IdentityMismatch)
            };
        }
        if let Some(k) = is_rank_one_injective(phi) {
            trace.push("rank-one-integer");
            let inst = IntegerExpInstance::unconstrained(exponent_of(u), k, exponent_of(v), 1);
            return match integer_exp_solve(&inst).expect("nonzero inputs") {
                Decision::Yes((a, _)) => Decision::Yes(SingleExponent {
                    p: a as usize,
                    conjugator: Word::identity(),
                }),
                Decision::No(c) => Decision::No(c),
                Decision::Inconclusive(e) => Decision::Inconclusive(e),
            };
        }

        // direct orbit walk with a periodicity certificate
        let target = CyclicWord::new(v);
        let mut seen: HashMap<CyclicWord, usize> = HashMap::new();
        let mut x = u.clone();
        let mut checked: Option<usize> = None;
        let mut too_long = false;
        for p in 0..=self.bounds().orbit {
            if p > 0 {
                x = phi.apply(&x);
                if x.len() > cap {
                    too_long = true;
                    break;
                }
            }
            let c = CyclicWord::new(&x);
            if c == target {
                let conj = free_conjugacy(&x, v).expect("equal classes are conjugate");
                return Decision::Yes(SingleExponent { p, conjugator: conj });
            }
            if let Some(&p0) = seen.get(&c) {
                trace.push("orbit-periodic");
                return Decision::No(Certificate::OrbitPeriodic {
                    preperiod: p0,
                    period: p - p0,
                });
            }
            seen.insert(c, p);
            checked = Some(p);
        }

        if injective && !phi.is_surjective() && !v.is_identity() {
            if let Some(d) = self.single_exponent_carried(phi, u, v, checked, trace) {
                return d;
            }
        }

        if let Some(oracle) = self.brinkmann_oracle() {
            trace.push("brinkmann-oracle");
            match oracle.single_exponent(phi, u, v) {
                Decision::Yes(p) => {
                    if let Some(up) = phi.apply_power_capped(u, p, cap) {
                        if let Some(conj) = free_conjugacy(&up, v) {
                            return Decision::Yes(SingleExponent { p, conjugator: conj });
                        }
                    }
                }
                Decision::No(_) => {
                    return Decision::No(Certificate::ExternalOracle(oracle.name().to_string()))
                }
                Decision::Inconclusive(_) => {}
            }
        }
        if too_long {
            Decision::Inconclusive(word_cap(cap))
        } else {
            Decision::inconclusive(BoundKind::Orbit, self.bounds().orbit)
        }
    }

    /// Exact answer once some iterate `φ^i(u)` is carried and every `p < i`
    /// has been checked directly.
    fn single_exponent_carried(
        &self,
        phi: &Endomorphism,
        u: &Word,
        v: &Word,
        checked: Option<usize>,
        trace: &mut Trace,
    ) -> Option<Decision<SingleExponent>> {
        let data = self.stable_data(phi);
        let Decision::Yes(s) = &data.decision else {
            return None;
        };
        let carried = match self.carried(phi, u, trace) {
            Decision::Yes(c) => c,
            _ => return None,
        };
        if checked.is_none_or(|c| carried.level > c + 1) {
            return None;
        }
        trace.push("carried-orbit");
        let comp = &s.components[carried.component];
        let cap = self.bounds().max_word_len;
        let (y, delta) = root(v).ok()?;
        let mut x = match phi.apply_power_capped(u, carried.level, cap) {
            Some(x) => x,
            None => return Some(Decision::Inconclusive(word_cap(cap))),
        };
        let mut any_root = false;
        let mut best: Option<usize> = None;
        for r in 0..comp.t {
            if r > 0 {
                x = phi.apply(&x);
                if x.len() > cap {
                    return Some(Decision::Inconclusive(word_cap(cap)));
                }
            }
            let (xr, gamma) = root(&x).ok()?;
            if free_conjugacy(&xr, &y).is_none() {
                continue;
            }
            any_root = true;
            let inst = IntegerExpInstance::unconstrained(gamma as i64, comp.d as i64, delta as i64, 1);
            if let Decision::Yes((a, _)) = integer_exp_solve(&inst).expect("nonzero inputs") {
                let p = carried.level + r + comp.t * a as usize;
                if best.is_none_or(|b| p < b) {
                    best = Some(p);
                }
            }
        }
        Some(match best {
            Some(p) => match phi.apply_power_capped(u, p, cap) {
                Some(up) => Decision::Yes(SingleExponent {
                    p,
                    conjugator: free_conjugacy(&up, v)?,
                }),
                None => Decision::Inconclusive(word_cap(cap)),
            },
            None if any_root => Decision::No(Certificate::PrimeSupport),
            None => Decision::No(Certificate::RootMismatch),
        })
    }

    /// Pairs with `p ≥ q ≥ d` through the stable iterate: returns `d` and
    /// either such a pair or a proof that none exists.
    pub fn two_exp_outside_image(
        &self,
        phi: &Endomorphism,
        u: &Word,
        v: &Word,
        trace: &mut Trace,
    ) -> OutsideImage {
        trace.push("large-exponents");
        let data = self.stable_data(phi);
        let s = match &data.decision {
            Decision::Yes(s) => s.clone(),
            Decision::No(c) => {
                return OutsideImage {
                    d: 0,
                    decision: Decision::No(c.clone()),
                }
            }
            Decision::Inconclusive(e) => {
                return OutsideImage {
                    d: 0,
                    decision: Decision::Inconclusive(*e),
                }
            }
        };
        let k = s.k;
        if s.is_empty() {
            return OutsideImage {
                d: k,
                decision: Decision::No(Certificate::EmptyStableIterate),
            };
        }
        let mut carried = Vec::new();
        for w in [u, v] {
            match self.carried(phi, w, trace) {
                Decision::Yes(c) => carried.push(c),
                Decision::No(_) => {
                    return OutsideImage {
                        d: k,
                        decision: Decision::No(Certificate::NotCarried { d: k }),
                    }
                }
                Decision::Inconclusive(e) => {
                    return OutsideImage {
                        d: k,
                        decision: Decision::Inconclusive(e),
                    }
                }
            }
        }
        let cap = self.bounds().max_word_len;
        let (cu, cv) = (&carried[0], &carried[1]);
        let d = cu.level.max(cv.level);
        let (tu, du) = (s.components[cu.component].t, s.components[cu.component].d);
        let (tv, dv) = (s.components[cv.component].t, s.components[cv.component].d);
        let period = tu * tv;
        let (Some(alpha), Some(beta)) = (
            (du as i64).checked_pow(tv as u32),
            (dv as i64).checked_pow(tu as u32),
        ) else {
            return OutsideImage {
                d,
                decision: Decision::Inconclusive(word_cap(cap)),
            };
        };
        let roots = |w: &Word| -> Option<Vec<(Word, usize)>> {
            let start = phi.apply_power_capped(w, d, cap)?;
            let list = orbit(phi, &start, period - 1, cap);
            (list.len() == period).then(|| list.iter().map(|x| root(x).unwrap()).collect())
        };
        let (Some(xs), Some(ys)) = (roots(u), roots(v)) else {
            return OutsideImage {
                d,
                decision: Decision::Inconclusive(word_cap(cap)),
            };
        };
        let mut best: Option<(usize, usize)> = None;
        let mut any_root = false;
        for (l, (x, gamma)) in xs.iter().enumerate() {
            for (m, (y, delta)) in ys.iter().enumerate() {
                if free_conjugacy(x, y).is_none() {
                    continue;
                }
                any_root = true;
                let inst = IntegerExpInstance {
                    gamma: *gamma as i64,
                    alpha,
                    delta: *delta as i64,
                    beta,
                    d: period as u64,
                    l: l as i64,
                    m: m as i64,
                };
                if let Decision::Yes((a, b)) = integer_exp_solve(&inst).expect("nonzero inputs") {
                    let p = d + l + period * a as usize;
                    let q = d + m + period * b as usize;
                    if best.is_none_or(|(bp, bq)| (p + q, p) < (bp + bq, bp)) {
                        best = Some((p, q));
                    }
                }
            }
        }
        let decision = match best {
            Some((p, q)) => match pair_at(phi, u, v, p, q, cap) {
                Ok(Some(pair)) => Decision::Yes(pair),
                Ok(None) => Decision::inconclusive(BoundKind::Conjugator, 0),
                Err(e) => Decision::Inconclusive(e),
            },
            None if any_root => Decision::No(Certificate::PrimeSupport),
            None => Decision::No(Certificate::RootMismatch),
        };
        OutsideImage { d, decision }
    }

    /// Pairs `p ≥ q ≥ 0`: the large-exponent step, then `φ^i(u)` against
    /// `φ^i(v)` for every `i < d`.
    pub fn two_exp_technical(
        &self,
        phi: &Endomorphism,
        u: &Word,
        v: &Word,
        trace: &mut Trace,
    ) -> Decision<ExponentPair> {
        let out = self.two_exp_outside_image(phi, u, v, trace);
        match out.decision {
            Decision::Yes(pair) => return Decision::Yes(pair),
            Decision::Inconclusive(e) => return Decision::Inconclusive(e),
            Decision::No(_) => {}
        }
        trace.push("small-exponents");
        let cap = self.bounds().max_word_len;
        let mut open = None;
        let (mut ui, mut vi) = (u.clone(), v.clone());
        for i in 0..out.d {
            if i > 0 {
                ui = phi.apply(&ui);
                vi = phi.apply(&vi);
                if ui.len() > cap || vi.len() > cap {
                    return Decision::Inconclusive(word_cap(cap));
                }
            }
            match self.single_exponent_conj(phi, &ui, &vi, trace) {
                Decision::Yes(se) => {
                    return Decision::Yes(ExponentPair {
                        p: se.p + i,
                        q: i,
                        conjugator: se.conjugator,
                        swapped: false,
                    })
                }
                Decision::No(_) => {}
                Decision::Inconclusive(e) => open = Some(e),
            }
        }
        match open {
            Some(e) => Decision::Inconclusive(e),
            None => Decision::No(Certificate::AllBranchesNo),
        }
    }

    /// Some `(p, q)` with `φ^p(u) ∼ φ^q(v)` for injective `φ`.
    pub fn two_exp_injective(
        &self,
        phi: &Endomorphism,
        u: &Word,
        v: &Word,
        trace: &mut Trace,
    ) -> Decision<ExponentPair> {
        assert!(phi.is_injective(), "two_exp_injective needs an injective map");
        trace.push("two-exponents");
        let cap = self.bounds().max_word_len;
        if u.is_identity() || v.is_identity() {
            return if u.is_identity() && v.is_identity() {
                Decision::Yes(ExponentPair {
                    p: 0,
                    q: 0,
                    conjugator: Word::identity(),
                    swapped: false,
                })
            } else {
                Decision::No(Certificate::IdentityMismatch)
            };
        }
        if let Some(k) = is_rank_one_injective(phi) {
            trace.push("rank-one-integer");
            let inst = IntegerExpInstance::unconstrained(exponent_of(u), k, exponent_of(v), k);
            return match integer_exp_solve(&inst).expect("nonzero inputs") {
                Decision::Yes((p, q)) => Decision::Yes(ExponentPair {
                    p: p as usize,
                    q: q as usize,
                    conjugator: Word::identity(),
                    swapped: false,
                }),
                Decision::No(c) => Decision::No(c),
                Decision::Inconclusive(e) => Decision::Inconclusive(e),
            };
        }
        if let Some(pair) = grid_pair(phi, u, v, self.bounds().orbit.min(8), cap) {
            return Decision::Yes(pair);
        }

        if phi.is_surjective() {
            return self.both_single(phi, u, v, true, trace);
        }
        let bound = self.bounds().image;
        let pu = stable_image_probe(phi, u, bound);
        let pv = stable_image_probe(phi, v, bound);
        let (
            StableImageProbe::NotInImagePower { m, preimage: u1 },
            StableImageProbe::NotInImagePower { m: n, preimage: v1 },
        ) = (pu, pv)
        else {
            trace.push("stable-image");
            return self.both_single(phi, u, v, false, trace);
        };
        trace.push("image-preimages");
        let top = m.max(n);
        let (su, sv) = (top - m, top - n);
        if free_conjugacy(&u1, &v1).is_some() {
            return match pair_at(phi, u, v, su, sv, cap) {
                Ok(Some(pair)) => Decision::Yes(pair),
                Ok(None) => Decision::inconclusive(BoundKind::Conjugator, 0),
                Err(e) => Decision::Inconclusive(e),
            };
        }
        let forward = self.two_exp_technical(phi, &u1, &v1, trace);
        if let Decision::Yes(pair) = forward {
            return self.lift_pair(phi, u, v, pair.p + su, pair.q + sv);
        }
        let backward = self.two_exp_technical(phi, &v1, &u1, trace);
        if let Decision::Yes(pair) = backward {
            return self.lift_pair(phi, u, v, pair.q + su, pair.p + sv);
        }
        match (forward, backward) {
            (Decision::Inconclusive(e), _) | (_, Decision::Inconclusive(e)) => Decision::Inconclusive(e),
            _ => Decision::No(Certificate::AllBranchesNo),
        }
    }

    fn lift_pair(&self, phi: &Endomorphism, u: &Word, v: &Word, p: usize, q: usize) -> Decision<ExponentPair> {
        match pair_at(phi, u, v, p, q, self.bounds().max_word_len) {
            Ok(Some(pair)) => Decision::Yes(pair),
            Ok(None) => Decision::inconclusive(BoundKind::Conjugator, 0),
            Err(e) => Decision::Inconclusive(e),
        }
    }

    /// `φ^p(u) ∼ v` and `u ∼ φ^q(v)`; exact only when `exact` is set.
    fn both_single(
        &self,
        phi: &Endomorphism,
        u: &Word,
        v: &Word,
        exact: bool,
        trace: &mut Trace,
    ) -> Decision<ExponentPair> {
        let forward = self.single_exponent_conj(phi, u, v, trace);
        if let Decision::Yes(se) = forward {
            return Decision::Yes(ExponentPair {
                p: se.p,
                q: 0,
                conjugator: se.conjugator,
                swapped: false,
            });
        }
        let backward = self.single_exponent_conj(phi, v, u, trace);
        if let Decision::Yes(se) = backward {
            return Decision::Yes(
                ExponentPair {
                    p: se.p,
                    q: 0,
                    conjugator: se.conjugator,
                    swapped: false,
                }
                .transpose(),
            );
        }
        if !exact {
            return Decision::inconclusive(BoundKind::Image, self.bounds().image);
        }
        match (forward, backward) {
            (Decision::Inconclusive(e), _) | (_, Decision::Inconclusive(e)) => Decision::Inconclusive(e),
            _ => Decision::No(Certificate::AllBranchesNo),
        }
    }

    /// Some `(p, q)` with `φ^p(u) ∼ φ^q(v)` for any endomorphism, through the
    /// retraction onto a free factor where the induced map is injective.
    pub fn two_exp_general(
        &self,
        phi: &Endomorphism,
        u: &Word,
        v: &Word,
        trace: &mut Trace,
    ) -> Decision<ExponentPair> {
        if phi.is_injective() {
            return self.two_exp_injective(phi, u, v, trace);
        }
        trace.push("nielsen-retraction");
        let cap = self.bounds().max_word_len;
        if let Some(pair) = grid_pair(phi, u, v, self.bounds().orbit.min(8), cap) {
            return Decision::Yes(pair);
        }
        let retraction = match nielsen_retract(phi) {
            Ok(r) => r,
            Err(_) => return Decision::inconclusive(BoundKind::RetractionDepth, 0),
        };
        let u1 = retraction.coords.apply(u);
        let v1 = retraction.coords.apply(v);
        let inner = self.two_exp_injective(&retraction.restricted, &u1, &v1, trace);
        let depth = retraction.rank_chain.len() - 1;
        match inner {
            Decision::Yes(pair) => {
                for j in 0..=depth {
                    match pair_at(phi, u, v, pair.p + j, pair.q + j, cap) {
                        Ok(Some(found)) => return Decision::Yes(found),
                        Ok(None) => {}
                        Err(e) => return Decision::Inconclusive(e),
                    }
                }
                Decision::inconclusive(BoundKind::RetractionDepth, depth)
            }
            other => other,
        }
    }

    /// Some `(p, k)` with `φ^p(u) ∼ v·k` and `k ∈ ker φ`.
    pub fn retract_lift_conj(
        &self,
        phi: &Endomorphism,
        u: &Word,
        v: &Word,
        trace: &mut Trace,
    ) -> Decision<KernelLift> {
        if phi.is_injective() {
            return self.single_exponent_conj(phi, u, v, trace).map(|se| KernelLift {
                p: se.p,
                kernel: Word::identity(),
                conjugator: se.conjugator,
            });
        }
        trace.push("nielsen-retraction");
        let cap = self.bounds().max_word_len;
        let retraction = match nielsen_retract(phi) {
            Ok(r) => r,
            Err(_) => return Decision::inconclusive(BoundKind::RetractionDepth, 0),
        };
        let u1 = retraction.coords.apply(u);
        let v1 = retraction.coords.apply(v);
        let inner = self.single_exponent_conj(&retraction.restricted, &u1, &v1, trace);
        let se = match inner {
            Decision::Yes(se) => se,
            Decision::No(c) => return Decision::No(c),
            Decision::Inconclusive(e) => return Decision::Inconclusive(e),
        };
        let x = retraction.embed.apply(&se.conjugator);
        let Some(up) = phi.apply_power_capped(u, se.p, cap) else {
            return Decision::Inconclusive(word_cap(cap));
        };
        // v·k = X·φ^p(u)·X⁻¹
        let kernel = v.inverse().mul(&x).mul(&up).mul(&x.inverse());
        let lift = KernelLift {
            p: se.p,
            kernel,
            conjugator: x,
        };
        if lift.verify(phi, u, v) {
            Decision::Yes(lift)
        } else {
            Decision::inconclusive(BoundKind::RetractionDepth, retraction.rank_chain.len() - 1)
        }
    }

    /// Pairs with `φ^p(u)` `φⁿ`-twisted conjugate to `φ^q(v)`.
    pub fn twisted_pair_general(
        &self,
        phi: &Endomorphism,
        n: usize,
        u: &Word,
        v: &Word,
        trace: &mut Trace,
    ) -> Decision<TwistedPair> {
        if n == 0 {
            return self.two_exp_general(phi, u, v, trace).map(|pair| TwistedPair {
                p: pair.p,
                q: pair.q,
                n: 0,
                conjugator: pair.conjugator,
            });
        }
        self.phi_n_twisted_pairs(phi, n, u, v, trace)
    }

    /// Some `(p, k)` with `φ^p(u) = v·k` and `k ∈ ker φ`.
    pub fn equality_kernel(
        &self,
        phi: &Endomorphism,
        u: &Word,
        v: &Word,
        trace: &mut Trace,
    ) -> Decision<KernelEquality> {
        trace.push("equality");
        let (ext, s) = extend_fixed_letter(phi);
        let inner = self.retract_lift_conj(&ext, &u.mul(&s), &v.mul(&s), trace);
        match inner {
            Decision::Yes(lift) => {
                let Some(up) = phi.apply_power_capped(u, lift.p, self.bounds().max_word_len) else {
                    return Decision::Inconclusive(word_cap(self.bounds().max_word_len));
                };
                let out = KernelEquality {
                    p: lift.p,
                    kernel: v.inverse().mul(&up),
                };
                if out.verify(phi, u, v) {
                    Decision::Yes(out)
                } else {
                    Decision::inconclusive(BoundKind::RetractionDepth, 0)
                }
            }
            Decision::No(c) => Decision::No(c),
            Decision::Inconclusive(e) => Decision::Inconclusive(e),
        }
    }

    /// Some `(p, q)` with `φ^p(u) = φ^q(v)`.
    pub fn equality_pair(
        &self,
        phi: &Endomorphism,
        u: &Word,
        v: &Word,
        trace: &mut Trace,
    ) -> Decision<EqualPair> {
        trace.push("equality");
        let (ext, s) = extend_fixed_letter(phi);
        let inner = self.two_exp_general(&ext, &u.mul(&s), &v.mul(&s), trace);
        match inner {
            Decision::Yes(pair) => {
                let out = EqualPair { p: pair.p, q: pair.q };
                debug_assert!(out.verify(phi, u, v));
                if out.verify(phi, u, v) {
                    Decision::Yes(out)
                } else {
                    Decision::inconclusive(BoundKind::RetractionDepth, 0)
                }
            }
            Decision::No(c) => Decision::No(c),
            Decision::Inconclusive(e) => Decision::Inconclusive(e),
        }
    }
}

/// `φ` extended by a fresh generator `s ↦ s`, and `s`.
fn extend_fixed_letter(phi: &Endomorphism) -> (Endomorphism, Word) {
    let s = Word::generator(phi.rank() + 1);
    let ext = phi
        .extend(std::slice::from_ref(&s))
        .expect("extension by one generator is well formed");
    (ext, s)
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
    fn single_exponent_examples() {
        let e = Engine::default();
        let mut t = Trace::new();
        let phi = ds();
        assert_eq!(e.single_exponent_conj(&phi, &w("ab"), &w("ab"), &mut t).yes().unwrap().p, 0);
        let bs = Endomorphism::from_strs(&["aa"]).unwrap();
        assert_eq!(e.single_exponent_conj(&bs, &w("a"), &w("aaaa"), &mut t).yes().unwrap().p, 2);
        let se = e.single_exponent_conj(&phi, &w("a"), &w("aaaa"), &mut t).yes().unwrap();
        assert!(se.verify(&phi, &w("a"), &w("aaaa")));
        // a and ab: the carried layer proves there is no exponent
        assert!(e.single_exponent_conj(&phi, &w("a"), &w("ab"), &mut t).is_no());
    }

    #[test]
    fn outside_image_examples() {
        let e = Engine::default();
        let mut t = Trace::new();
        let phi = ds();
        let out = e.two_exp_outside_image(&phi, &w("a"), &w("a"), &mut t);
        let pair = out.decision.yes().unwrap();
        assert!(pair.verify(&phi, &w("a"), &w("a")));
        let out = e.two_exp_outside_image(&phi, &w("a"), &w("aaa"), &mut t);
        assert_eq!(out.decision, Decision::No(Certificate::PrimeSupport));
        let out = e.two_exp_outside_image(&phi, &w("ab"), &w("a"), &mut t);
        assert_eq!(out.decision, Decision::No(Certificate::NotCarried { d: 2 }));
        assert_eq!(out.d, 2);
    }

    #[test]
    fn injective_pairs() {
        let e = Engine::default();
        let mut t = Trace::new();
        let phi = ds();
        let pair = e.two_exp_injective(&phi, &w("a"), &w("b"), &mut t).yes().unwrap();
        assert_eq!((pair.p, pair.q), (1, 0));
        assert_eq!(pair.conjugator, Word::identity());
        let pair = e.two_exp_injective(&phi, &w("a"), &w("a"), &mut t).yes().unwrap();
        assert_eq!((pair.p, pair.q), (0, 0));
        assert!(e.two_exp_injective(&phi, &w("a"), &w("aaa"), &mut t).is_no());
    }

    #[test]
    fn general_pairs() {
        let e = Engine::default();
        let mut t = Trace::new();
        let phi = Endomorphism::from_strs(&["ab", "ab"]).unwrap();
        let pair = e.two_exp_general(&phi, &w("a"), &w("b"), &mut t).yes().unwrap();
        assert!(pair.verify(&phi, &w("a"), &w("b")));
        let nil = Endomorphism::from_strs(&["b", "1"]).unwrap();
        let pair = e.two_exp_general(&nil, &w("a"), &w("ab"), &mut t).yes().unwrap();
        assert!(pair.verify(&nil, &w("a"), &w("ab")));
    }

    #[test]
    fn kernel_lifts() {
        let e = Engine::default();
        let mut t = Trace::new();
        let phi = Endomorphism::from_strs(&["ab", "ab"]).unwrap();
        let lift = e.retract_lift_conj(&phi, &w("b"), &w("a"), &mut t).yes().unwrap();
        assert!(lift.verify(&phi, &w("b"), &w("a")));
        let same = e.retract_lift_conj(&phi, &w("ba"), &w("ba"), &mut t).yes().unwrap();
        assert_eq!(same.p, 0);
    }

    #[test]
    fn equality_examples() {
        let e = Engine::default();
        let mut t = Trace::new();
        let bs = Endomorphism::from_strs(&["aa"]).unwrap();
        let eq = e.equality_pair(&bs, &w("a"), &w("aaaa"), &mut t).yes().unwrap();
        assert_eq!((eq.p, eq.q), (2, 0));
        let id = Endomorphism::identity(2);
        assert!(e.equality_pair(&id, &w("a"), &w("b"), &mut t).is_no());
        let k = e.equality_kernel(&bs, &w("a"), &w("aaaa"), &mut t).yes().unwrap();
        assert_eq!(k.p, 2);
    }
}
