//! Three-valued decisions, certificates, search bounds and decision traces.

use serde::{Deserialize, Serialize};

/// Result of a decision procedure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision<T> {
    /// Positive answer with a witness that an exact verifier accepts.
    Yes(T),
    /// Negative answer with the reason it is certain.
    No(Certificate),
    /// A bounded search ran out before an answer was certified.
    Inconclusive(Exhausted),
}

impl<T> Decision<T> {
    pub fn is_yes(&self) -> bool {
        matches!(self, Decision::Yes(_))
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Decision::No(_))
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self, Decision::Inconclusive(_))
    }

    pub fn yes(self) -> Option<T> {
        match self {
            Decision::Yes(t) => Some(t),
            _ => None,
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Decision<U> {
        match self {
            Decision::Yes(t) => Decision::Yes(f(t)),
            Decision::No(c) => Decision::No(c),
            Decision::Inconclusive(e) => Decision::Inconclusive(e),
        }
    }

    pub fn inconclusive(bound: BoundKind, value: usize) -> Self {
        Decision::Inconclusive(Exhausted { bound, value })
    }
}

/// Why a negative answer holds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    /// The images in `⟨t⟩` differ.
    RetractionExponent { g: i64, h: i64 },
    /// An integer equation `γα^a = δβ^b` has no admissible solution.
    PrimeSupport,
    /// Maximal roots of the candidate powers are not conjugate.
    RootMismatch,
    /// The orbit of conjugacy classes is eventually periodic and misses the target.
    OrbitPeriodic { preperiod: usize, period: usize },
    /// No iterate is carried by the stable iterate; no pair with both exponents `≥ d`.
    NotCarried { d: usize },
    /// The stable iterate is empty.
    EmptyStableIterate,
    /// An exact fixed-subgroup oracle found no solution.
    FixedSubgroupOracle,
    /// Every branch of a finite case split answered no.
    AllBranchesNo,
    /// The exponent sums of the two sides can never agree.
    ExponentSum,
    /// Exactly one side is trivial and the map is injective.
    IdentityMismatch,
    /// A plugged external oracle answered no.
    ExternalOracle(String),
}

/// Which bound was exhausted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Orbit,
    Conjugator,
    Image,
    MaxK,
    WordLength,
    GraphSize,
    Closure,
    Oracle,
    /// A witness lifted through a retraction kept a kernel defect.
    RetractionDepth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exhausted {
    pub bound: BoundKind,
    pub value: usize,
}

/// All search bounds of one run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    /// Largest exponent tried when iterating an orbit directly.
    pub orbit: usize,
    /// Longest conjugator tried by bounded twisted-conjugacy search.
    pub conjugator: usize,
    /// Deepest preimage chain followed by the stable-image probe.
    pub image: usize,
    /// Largest pullback stage; `None` means `k₀ + 16`.
    pub max_k: Option<usize>,
    /// Words longer than this are not built.
    pub max_word_len: usize,
    /// Graphs with more vertices than this are not built.
    pub max_vertices: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            orbit: 64,
            conjugator: 10,
            image: 32,
            max_k: None,
            max_word_len: 1 << 14,
            max_vertices: 500,
        }
    }
}

pub const ENV_ORBIT: &str = "HNNCONJ_ORBIT_BOUND";
pub const ENV_CONJUGATOR: &str = "HNNCONJ_CONJUGATOR_BOUND";
pub const ENV_IMAGE: &str = "HNNCONJ_IMAGE_BOUND";
pub const ENV_MAX_K: &str = "HNNCONJ_MAX_K";

impl Bounds {
    /// Defaults overridden by the `HNNCONJ_*` environment variables.
    pub fn from_env() -> Result<Bounds, String> {
        let mut b = Bounds::default();
        let read = |name: &str| -> Result<Option<usize>, String> {
            match std::env::var(name) {
                Ok(v) => v
                    .trim()
                    .parse::<usize>()
                    .map(Some)
                    .map_err(|e| format!("{name}: {e}")),
                Err(_) => Ok(None),
            }
        };
        if let Some(v) = read(ENV_ORBIT)? {
            b.orbit = v;
        }
        if let Some(v) = read(ENV_CONJUGATOR)? {
            b.conjugator = v;
        }
        if let Some(v) = read(ENV_IMAGE)? {
            b.image = v;
        }
        if let Some(v) = read(ENV_MAX_K)? {
            b.max_k = Some(v);
        }
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.orbit == 0 || self.conjugator == 0 || self.image == 0 || self.max_k == Some(0) {
            return Err("all bounds must be at least 1".to_string());
        }
        Ok(())
    }

    /// `max_k` resolved against `k₀`.
    pub fn max_k_for(&self, k0: usize) -> usize {
        self.max_k.unwrap_or(k0 + 16)
    }
}

/// Names of the procedure steps that fired, in order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Trace(pub Vec<String>);

impl Trace {
    pub fn new() -> Self {
        Trace(Vec::new())
    }

    pub fn push(&mut self, step: &str) {
        if self.0.last().map(String::as_str) != Some(step) {
            self.0.push(step.to_string());
        }
    }

    pub fn steps(&self) -> &[String] {
        &self.0
    }

    pub fn contains(&self, step: &str) -> bool {
        self.0.iter().any(|s| s == step)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decision_json_round_trip() {
        let ds: Vec<Decision<(usize, usize)>> = vec![
            Decision::Yes((1, 0)),
            Decision::No(Certificate::RetractionExponent { g: 1, h: 0 }),
            Decision::inconclusive(BoundKind::Orbit, 64),
        ];
        for d in ds {
            let s = serde_json::to_string(&d).unwrap();
            let back: Decision<(usize, usize)> = serde_json::from_str(&s).unwrap();
            assert_eq!(back, d);
        }
    }

    #[test]
    fn bounds_defaults() {
        let b = Bounds::default();
        assert_eq!((b.orbit, b.conjugator, b.image), (64, 10, 32));
        assert_eq!(b.max_k_for(2), 18);
        assert!(b.validate().is_ok());
    }

    #[test]
    fn trace_collapses_repeats() {
        let mut t = Trace::new();
        t.push("a");
        t.push("a");
        t.push("b");
        assert_eq!(t.steps(), ["a", "b"]);
    }
}
