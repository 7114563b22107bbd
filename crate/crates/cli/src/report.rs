use std::collections::BTreeMap;

use hnnconj::{Bounds, Certificate, Decision, Exhausted, Trace};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Yes,
    No,
    Inconclusive,
}

impl Verdict {
    pub fn exit_code(self) -> u8 {
        match self {
            Verdict::Yes => 0,
            Verdict::No => 1,
            Verdict::Inconclusive => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairOut {
    pub p: usize,
    pub q: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

/// One answered query in the JSON output schema.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub query: BTreeMap<String, String>,
    pub decision: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exhausted: Option<Exhausted>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<PairOut>,
    pub trace: Vec<String>,
    pub bounds: Bounds,
}

impl Report {
    pub fn new<T>(
        query: BTreeMap<String, String>,
        decision: &Decision<T>,
        trace: Trace,
        bounds: &Bounds,
    ) -> Report {
        let (verdict, certificate, exhausted) = match decision {
            Decision::Yes(_) => (Verdict::Yes, None, None),
            Decision::No(c) => (Verdict::No, Some(c.clone()), None),
            Decision::Inconclusive(e) => (Verdict::Inconclusive, None, Some(*e)),
        };
        Report {
            query,
            decision: verdict,
            certificate,
            exhausted,
            witness: None,
            pair: None,
            trace: trace.0,
            bounds: bounds.clone(),
        }
    }

    pub fn with_witness<const N: usize>(mut self, entries: [(&str, String); N]) -> Self {
        self.witness = Some(entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect());
        self
    }

    pub fn with_pair(mut self, p: usize, q: usize, n: Option<usize>) -> Self {
        self.pair = Some(PairOut { p, q, n });
        self
    }

    pub fn to_text(&self) -> String {
        let mut line = format!("{:?}", self.decision).to_lowercase();
        if let Some(c) = &self.certificate {
            line.push_str(&format!(" certificate={}", serde_json::to_string(c).unwrap_or_default()));
        }
        if let Some(e) = &self.exhausted {
            line.push_str(&format!(" bound={:?}:{}", e.bound, e.value));
        }
        if let Some(p) = &self.pair {
            line.push_str(&format!(" p={} q={}", p.p, p.q));
        }
        if let Some(w) = &self.witness {
            for (k, v) in w {
                line.push_str(&format!(" {k}={v}"));
            }
        }
        line.push_str(&format!(" trace={}", self.trace.join(",")));
        line
    }
}

pub fn query<const N: usize>(command: &str, args: [(&str, String); N]) -> BTreeMap<String, String> {
    let mut q: BTreeMap<String, String> = args.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    q.insert("command".to_string(), command.to_string());
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use hnnconj::BoundKind;

    #[test]
    fn reports_round_trip() {
        let b = Bounds::default();
        let yes: Decision<()> = Decision::Yes(());
        let r = Report::new(query("conj", [("g", "a".into())]), &yes, Trace::new(), &b)
            .with_witness([("conjugator", "tbT".into())])
            .with_pair(1, 0, None);
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<Report>(&s).unwrap(), r);

        let no: Decision<()> = Decision::No(Certificate::RetractionExponent { g: 0, h: 1 });
        let r = Report::new(query("conj", []), &no, Trace(vec!["retraction".into()]), &b);
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<Report>(&s).unwrap(), r);

        let inc: Decision<()> = Decision::inconclusive(BoundKind::Orbit, 3);
        let r = Report::new(query("brinkmann", []), &inc, Trace::new(), &b);
        let s = serde_json::to_string_pretty(&r).unwrap();
        assert_eq!(serde_json::from_str::<Report>(&s).unwrap(), r);
    }
}
