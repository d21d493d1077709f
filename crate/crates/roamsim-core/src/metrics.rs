//! Cache-hit and signaling-cost metrics.
//!
//! Two numbers summarize a run: the cache hit probability (hits over counted
//! lookups) and the context propagation cost (summed per-pair transfer cost
//! of every proactive push). Both are kept as live counters during the run
//! and are exactly recomputable from the raw logs.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::iapp::{CostModel, MessageKind, SentMessage};
use crate::ids::ApId;

/// Live counters for one run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricsLedger {
    /// Counted lookups that hit. Only the decisive lookup per
    /// re-association counts; bookkeeping reads do not.
    pub c_hit: u64,
    /// Counted lookups total.
    pub c_try: u64,
    pub cost_by_kind: BTreeMap<MessageKind, f64>,
    pub per_slot: Vec<SlotMetrics>,
}

/// Counter deltas inside one sampling window.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SlotMetrics {
    /// 1-based slot index.
    pub slot: u32,
    pub c_hit: u64,
    pub c_try: u64,
    pub proactive_cost: f64,
    pub reactive_cost: f64,
    pub invalidate_cost: f64,
    pub total_cost: f64,
}

impl MetricsLedger {
    pub fn new() -> Self {
        MetricsLedger::default()
    }

    pub fn record_lookup(&mut self, hit: bool) {
        self.c_try += 1;
        if hit {
            self.c_hit += 1;
        }
    }

    /// Cache hit probability: hits / tries, 0 when nothing was tried.
    pub fn chp(&self) -> f64 {
        if self.c_try == 0 {
            0.0
        } else {
            self.c_hit as f64 / self.c_try as f64
        }
    }

    pub fn cost_of_kind(&self, kind: MessageKind) -> f64 {
        self.cost_by_kind.get(&kind).copied().unwrap_or(0.0)
    }

    pub fn proactive_cost(&self) -> f64 {
        self.cost_of_kind(MessageKind::CacheNotify)
    }

    pub fn reactive_cost(&self) -> f64 {
        self.cost_of_kind(MessageKind::ObtainRequest)
            + self.cost_of_kind(MessageKind::ObtainResponse)
    }

    pub fn invalidate_cost(&self) -> f64 {
        self.cost_of_kind(MessageKind::CacheInvalidate)
    }

    pub fn total_cost(&self) -> f64 {
        MessageKind::ALL.iter().map(|k| self.cost_of_kind(*k)).sum()
    }

    pub fn summary(&self) -> MetricsSummary {
        MetricsSummary {
            chp: self.chp(),
            total_cost: self.total_cost(),
            proactive_cost: self.proactive_cost(),
            reactive_cost: self.reactive_cost(),
            invalidate_cost: self.invalidate_cost(),
            cost_ratio_vs_pnc: None,
        }
    }
}

/// End-of-run roll-up.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsSummary {
    pub chp: f64,
    pub total_cost: f64,
    pub proactive_cost: f64,
    pub reactive_cost: f64,
    pub invalidate_cost: f64,
    /// Filled by same-trace comparisons when a pnc baseline exists.
    pub cost_ratio_vs_pnc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MetricsError {
    /// Ratio against a zero-cost pnc baseline.
    UndefinedRatio,
}

impl fmt::Display for MetricsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricsError::UndefinedRatio => {
                f.write_str("cost ratio undefined: pnc baseline has zero proactive cost")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for MetricsError {}

/// Context propagation cost re-derived from a message log: the sum of the
/// charged cost of every proactive push. Folding the log is the second
/// route to the ledger's live accumulator and must agree with it.
pub fn propagation_cost(log: &[SentMessage], cost_model: &CostModel) -> f64 {
    log.iter()
        .filter(|s| s.msg.kind == MessageKind::CacheNotify)
        .map(|s| cost_model.message_cost(s.msg.kind, &s.msg.from_ap, &s.msg.to_ap))
        .sum()
}

/// Observed per-pair proactive delivery counts: how often context moved
/// from AP i to AP j in advance. `propagation_cost` equals the dot product
/// of this matrix with the pair costs.
pub fn cp_matrix(log: &[SentMessage]) -> BTreeMap<(ApId, ApId), u64> {
    let mut m = BTreeMap::new();
    for s in log {
        if s.msg.kind == MessageKind::CacheNotify {
            *m.entry((s.msg.from_ap.clone(), s.msg.to_ap.clone()))
                .or_insert(0) += 1;
        }
    }
    m
}

/// Proactive cost of a scheme relative to the pnc baseline on the same
/// trace. pnc against itself is 1; reactive against anything is 0.
pub fn cost_ratio(scheme: &MetricsSummary, pnc: &MetricsSummary) -> Result<f64, MetricsError> {
    if pnc.proactive_cost <= 0.0 {
        return Err(MetricsError::UndefinedRatio);
    }
    Ok(scheme.proactive_cost / pnc.proactive_cost)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iapp::IappMessage;
    use crate::ids::MnId;
    use alloc::vec;

    #[test]
    fn chp_is_the_hit_ratio() {
        let mut l = MetricsLedger::new();
        for i in 0..10 {
            l.record_lookup(i < 8);
        }
        assert_eq!(l.chp(), 0.8);
    }

    #[test]
    fn chp_of_zero_tries_is_zero() {
        assert_eq!(MetricsLedger::new().chp(), 0.0);
    }

    fn sent(kind: MessageKind, from: &str, to: &str, cost: f64) -> SentMessage {
        SentMessage {
            msg: IappMessage {
                kind,
                from_ap: ApId::new(from),
                to_ap: ApId::new(to),
                mn_id: MnId(0),
                payload_size: if kind.carries_payload() { 8 } else { 0 },
                sent_at: 0,
            },
            cost,
        }
    }

    #[test]
    fn propagation_cost_of_empty_log_is_zero() {
        assert_eq!(propagation_cost(&[], &CostModel::default()), 0.0);
    }

    #[test]
    fn propagation_cost_counts_only_notifies() {
        let log = vec![
            sent(MessageKind::CacheNotify, "A", "B", 1.0),
            sent(MessageKind::CacheNotify, "A", "C", 1.0),
            sent(MessageKind::ObtainRequest, "B", "A", 1.0),
            sent(MessageKind::ObtainResponse, "A", "B", 1.0),
            sent(MessageKind::CacheInvalidate, "A", "B", 1.0),
        ];
        assert_eq!(propagation_cost(&log, &CostModel::default()), 2.0);
    }

    #[test]
    fn propagation_cost_is_linear_in_the_cost_model() {
        let mut cm = CostModel::default();
        cm.set_pair_cost(ApId::new("A"), ApId::new("B"), 2.5);
        let log = vec![
            sent(MessageKind::CacheNotify, "A", "B", 2.5),
            sent(MessageKind::CacheNotify, "B", "C", 1.0),
        ];
        let base = propagation_cost(&log, &cm);
        let scaled = propagation_cost(&log, &cm.scaled(4.0));
        assert!((scaled - 4.0 * base).abs() < 1e-12);
    }

    #[test]
    fn cp_matrix_dot_pair_costs_equals_propagation_cost() {
        let mut cm = CostModel::default();
        cm.set_pair_cost(ApId::new("A"), ApId::new("B"), 3.0);
        let log = vec![
            sent(MessageKind::CacheNotify, "A", "B", 3.0),
            sent(MessageKind::CacheNotify, "A", "B", 3.0),
            sent(MessageKind::CacheNotify, "B", "C", 1.0),
            sent(MessageKind::ObtainRequest, "C", "A", 1.0),
        ];
        let m = cp_matrix(&log);
        assert_eq!(m.get(&(ApId::new("A"), ApId::new("B"))), Some(&2));
        let dot: f64 = m
            .iter()
            .map(|((from, to), n)| *n as f64 * cm.message_cost(MessageKind::CacheNotify, from, to))
            .sum();
        assert_eq!(dot, propagation_cost(&log, &cm));
    }

    #[test]
    fn ratio_of_pnc_to_itself_is_one_and_reactive_is_zero() {
        let pnc = MetricsSummary {
            chp: 0.9,
            total_cost: 12.0,
            proactive_cost: 10.0,
            reactive_cost: 2.0,
            invalidate_cost: 0.0,
            cost_ratio_vs_pnc: None,
        };
        let reactive = MetricsSummary {
            proactive_cost: 0.0,
            ..pnc.clone()
        };
        assert_eq!(cost_ratio(&pnc, &pnc), Ok(1.0));
        assert_eq!(cost_ratio(&reactive, &pnc), Ok(0.0));
        assert_eq!(
            cost_ratio(&pnc, &reactive),
            Err(MetricsError::UndefinedRatio)
        );
    }
}
