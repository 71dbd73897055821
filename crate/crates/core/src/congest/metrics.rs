use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseCost {
    pub rounds: u64,
    pub messages: u64,
}

/// Round and CONGEST-message counters with a per-phase breakdown.
///
/// Totals always equal the sum over `phases`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metrics {
    pub rounds: u64,
    pub messages: u64,
    pub phases: BTreeMap<String, PhaseCost>,
}

impl Metrics {
    pub fn record(&mut self, phase: &str, rounds: u64, messages: u64) {
        self.rounds += rounds;
        self.messages += messages;
        let slot = self.phases.entry(phase.to_string()).or_default();
        slot.rounds += rounds;
        slot.messages += messages;
    }

    /// Folds another run's counters in, prefixing its phase labels.
    pub fn absorb(&mut self, prefix: &str, other: &Metrics) {
        for (label, cost) in &other.phases {
            let label = if prefix.is_empty() {
                label.clone()
            } else {
                format!("{prefix}/{label}")
            };
            self.record(&label, cost.rounds, cost.messages);
        }
    }

    pub fn phase(&self, label: &str) -> PhaseCost {
        self.phases.get(label).copied().unwrap_or_default()
    }

    /// Sum over all phases whose label starts with `prefix`.
    pub fn phase_prefix(&self, prefix: &str) -> PhaseCost {
        self.phases
            .iter()
            .filter(|(l, _)| l.starts_with(prefix))
            .fold(PhaseCost::default(), |acc, (_, c)| PhaseCost {
                rounds: acc.rounds + c.rounds,
                messages: acc.messages + c.messages,
            })
    }

    /// Counters accumulated after `before` was taken from the same run.
    pub fn since(&self, before: &Metrics) -> Metrics {
        let mut out = Metrics::default();
        for (label, cost) in &self.phases {
            let prev = before.phase(label);
            if cost.rounds > prev.rounds || cost.messages > prev.messages {
                out.record(label, cost.rounds - prev.rounds, cost.messages - prev.messages);
            }
        }
        out
    }

    pub fn is_consistent(&self) -> bool {
        let sum = self.phase_prefix("");
        sum.rounds == self.rounds && sum.messages == self.messages
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn totals_match_phases_and_json_is_ordered() {
        let mut m = Metrics::default();
        m.record("b", 3, 10);
        m.record("a", 1, 0);
        m.record("b", 2, 1);
        assert_eq!((m.rounds, m.messages), (6, 11));
        assert!(m.is_consistent());
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(
            json,
            r#"{"rounds":6,"messages":11,"phases":{"a":{"rounds":1,"messages":0},"b":{"rounds":5,"messages":11}}}"#
        );
    }

    #[test]
    fn absorb_prefixes_labels() {
        let mut inner = Metrics::default();
        inner.record("x", 4, 4);
        let mut outer = Metrics::default();
        outer.absorb("danner", &inner);
        assert_eq!(outer.phase("danner/x"), PhaseCost { rounds: 4, messages: 4 });
        assert_eq!(outer.phase_prefix("danner").messages, 4);
    }
}
