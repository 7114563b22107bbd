//! Shared state for the decision procedures: bounds, pluggable oracles and a
//! per-endomorphism cache of stable-iterate data.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::brinkmann::BrinkmannOracle;
use crate::decision::{BoundKind, Bounds, Decision, Trace};
use crate::dynamics::{
    carried_by_closures, component_closure, k0, stable_iterate_search, Carried, ClassClosure,
    DynamicsError, StableIterate,
};
use crate::endo::Endomorphism;
use crate::twisted::FixedSubgroupOracle;
use crate::words::Word;

/// Stable iterate of one endomorphism and the class closure of each component.
#[derive(Debug, Clone)]
pub struct StableData {
    pub decision: Decision<StableIterate>,
    pub closures: Vec<Option<Decision<ClassClosure>>>,
    /// Set when the search stopped on a violated structural assertion.
    pub error: Option<DynamicsError>,
}

pub struct Engine {
    bounds: Bounds,
    fixed: Option<Box<dyn FixedSubgroupOracle>>,
    brinkmann: Option<Box<dyn BrinkmannOracle>>,
    stable: Mutex<HashMap<Endomorphism, Arc<StableData>>>,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new(Bounds::default())
    }
}

impl Engine {
    pub fn new(bounds: Bounds) -> Self {
        Engine {
            bounds,
            fixed: None,
            brinkmann: None,
            stable: Mutex::new(HashMap::new()),
        }
    }

    pub fn with_fixed_oracle(mut self, oracle: Box<dyn FixedSubgroupOracle>) -> Self {
        self.fixed = Some(oracle);
        self
    }

    pub fn with_brinkmann_oracle(mut self, oracle: Box<dyn BrinkmannOracle>) -> Self {
        self.brinkmann = Some(oracle);
        self
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn fixed_oracle(&self) -> Option<&dyn FixedSubgroupOracle> {
        self.fixed.as_deref()
    }

    pub fn brinkmann_oracle(&self) -> Option<&dyn BrinkmannOracle> {
        self.brinkmann.as_deref()
    }

    fn max_classes(&self, rank: usize) -> usize {
        64 * rank.max(1)
    }

    /// Stable iterate data for an injective, non-surjective `φ` (cached).
    pub fn stable_data(&self, phi: &Endomorphism) -> Arc<StableData> {
        if let Some(d) = self.stable.lock().unwrap().get(phi) {
            return Arc::clone(d);
        }
        let b = &self.bounds;
        let max_k = b.max_k_for(k0(phi.rank()));
        let data = match stable_iterate_search(phi, max_k, b.max_vertices, b.max_word_len) {
            Ok(search) => {
                let closures = match &search.decision {
                    Decision::Yes(s) => s
                        .components
                        .iter()
                        .map(|c| component_closure(phi, c, self.max_classes(phi.rank())))
                        .collect(),
                    _ => Vec::new(),
                };
                StableData {
                    decision: search.decision,
                    closures,
                    error: None,
                }
            }
            Err(e) => StableData {
                decision: Decision::inconclusive(BoundKind::MaxK, max_k),
                closures: Vec::new(),
                error: Some(e),
            },
        };
        let data = Arc::new(data);
        self.stable
            .lock()
            .unwrap()
            .insert(phi.clone(), Arc::clone(&data));
        data
    }

    /// Whether some iterate of `w` is carried by the stable iterate of `φ`.
    pub fn carried(&self, phi: &Endomorphism, w: &Word, trace: &mut Trace) -> Decision<Carried> {
        trace.push("carried-by-stable-iterate");
        let data = self.stable_data(phi);
        match &data.decision {
            Decision::Yes(s) => carried_by_closures(
                phi,
                w,
                s,
                &data.closures,
                self.bounds.orbit,
                self.bounds.max_word_len,
            ),
            Decision::No(c) => Decision::No(c.clone()),
            Decision::Inconclusive(e) => Decision::Inconclusive(*e),
        }
    }
}
