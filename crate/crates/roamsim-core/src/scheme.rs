//! The four context-propagation strategies behind one interface.
//!
//! Each strategy answers the same question: given the AP a client just
//! (re)associated to, which APs should receive (or drop) its context. The
//! engine turns the answers into costed IAPP messages.
//!
//! * reactive: nobody, ever.
//! * pnc: every neighbor-graph neighbor of the current AP.
//! * snc: neighbors whose estimated handoff probability clears a threshold.
//! * nacs: the current AP's non-overlap neighbor graph adjacency.

use alloc::collections::BTreeMap;
use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use crate::cache::ApCache;
use crate::iapp::MessageKind;
use crate::ids::{ApId, MnId, Tick};
use crate::topology::ApGraph;

/// Which non-overlap graph NACS runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NongMode {
    /// Exact complement of the overlap graph; available from geometry alone.
    Complement,
    /// Neighbor graph restricted to non-overlapping pairs; grows as
    /// re-associations are observed.
    Intersection,
}

impl fmt::Display for NongMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NongMode::Complement => f.write_str("complement"),
            NongMode::Intersection => f.write_str("intersection"),
        }
    }
}

/// Strategy selector with per-strategy parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum SchemeKind {
    Reactive,
    Pnc,
    Snc { threshold: f64 },
    Nacs { mode: NongMode },
}

impl SchemeKind {
    pub fn validate(&self) -> Result<(), &'static str> {
        if let SchemeKind::Snc { threshold } = self {
            if !threshold.is_finite() || *threshold < 0.0 {
                return Err("snc threshold must be finite and >= 0");
            }
        }
        Ok(())
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeKind::Reactive => f.write_str("reactive"),
            SchemeKind::Pnc => f.write_str("pnc"),
            SchemeKind::Snc { threshold } => write!(f, "snc:{threshold}"),
            SchemeKind::Nacs { mode } => write!(f, "nacs:{mode}"),
        }
    }
}

/// The three graphs a strategy may consult. `non_overlap` is maintained in
/// the mode the active scheme asked for.
#[derive(Debug, Clone)]
pub struct GraphSet {
    pub neighbor: ApGraph,
    pub overlap: ApGraph,
    pub non_overlap: ApGraph,
}

/// Maximum-likelihood handoff probability estimate from observed
/// re-association counts: P(i -> j) = count(i, j) / sum_k count(i, k).
#[derive(Debug, Clone, Default)]
pub struct HandoffProbabilityTable {
    counts: BTreeMap<ApId, BTreeMap<ApId, u64>>,
}

impl HandoffProbabilityTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records one observed handoff from `from` to `to`.
    pub fn record(&mut self, from: &ApId, to: &ApId) {
        *self
            .counts
            .entry(from.clone())
            .or_default()
            .entry(to.clone())
            .or_insert(0) += 1;
    }

    /// P(from -> to); 0 when `from` has no outgoing observations.
    pub fn probability(&self, from: &ApId, to: &ApId) -> f64 {
        let Some(row) = self.counts.get(from) else {
            return 0.0;
        };
        let total: u64 = row.values().sum();
        if total == 0 {
            return 0.0;
        }
        let n = row.get(to).copied().unwrap_or(0);
        n as f64 / total as f64
    }

    /// Sum of P(from -> j) over all observed j (1.0 for any row with data).
    pub fn row_sum(&self, from: &ApId) -> f64 {
        let Some(row) = self.counts.get(from) else {
            return 0.0;
        };
        row.keys().map(|to| self.probability(from, to)).sum()
    }

    pub fn rows(&self) -> impl Iterator<Item = &ApId> {
        self.counts.keys()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemeError {
    UnknownAp(ApId),
}

impl fmt::Display for SchemeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeError::UnknownAp(id) => write!(f, "AP {id} is not in the graph vertex set"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SchemeError {}

/// Inputs a strategy decision depends on besides the event itself.
#[derive(Debug, Clone, Copy)]
pub struct SchemeDeps<'a> {
    pub graphs: &'a GraphSet,
    pub prob: &'a HandoffProbabilityTable,
    /// While true, snc has no trained table yet and falls back to pnc
    /// behavior (unless its threshold is above 1, which disables
    /// propagation outright).
    pub in_warmup: bool,
}

/// A message a strategy wants sent; the engine prices and enqueues it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutboundMessage {
    pub kind: MessageKind,
    pub from: ApId,
    pub to: ApId,
    pub mn: MnId,
}

/// Result of the re-association hook.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReassocOutcome {
    /// Whether the new AP already held the context (the counted lookup).
    pub cache_hit: bool,
    /// Obtain request (on a miss) followed by the propagation notifies.
    pub messages: Vec<OutboundMessage>,
}

/// The APs `scheme` would push context to from `current`. Never contains
/// `current` itself.
pub fn propagation_targets(
    scheme: &SchemeKind,
    current: &ApId,
    deps: &SchemeDeps<'_>,
) -> Result<BTreeSet<ApId>, SchemeError> {
    if !deps.graphs.neighbor.contains_vertex(current) {
        return Err(SchemeError::UnknownAp(current.clone()));
    }
    let targets = match scheme {
        SchemeKind::Reactive => BTreeSet::new(),
        SchemeKind::Pnc => deps.graphs.neighbor.adjacent(current),
        SchemeKind::Snc { threshold } => {
            if *threshold > 1.0 {
                // unreachable threshold: no probability can qualify
                BTreeSet::new()
            } else if deps.in_warmup {
                deps.graphs.neighbor.adjacent(current)
            } else {
                deps.graphs
                    .neighbor
                    .adjacent(current)
                    .into_iter()
                    .filter(|j| deps.prob.probability(current, j) >= *threshold)
                    .collect()
            }
        }
        SchemeKind::Nacs { .. } => deps.graphs.non_overlap.adjacent(current),
    };
    Ok(targets)
}

/// Client associated to `ap` from the unassociated state: push its context
/// to every propagation target.
pub fn on_associate(
    scheme: &SchemeKind,
    ap: &ApId,
    mn: MnId,
    deps: &SchemeDeps<'_>,
) -> Result<Vec<OutboundMessage>, SchemeError> {
    let targets = propagation_targets(scheme, ap, deps)?;
    Ok(notifies(ap, mn, targets))
}

/// Client re-associated to `new_ap` from `old_ap`: the counted cache lookup
/// at the new AP decides whether an obtain round-trip is needed, then the
/// context is pushed to the new AP's targets.
pub fn on_reassociate(
    scheme: &SchemeKind,
    new_ap: &ApId,
    old_ap: &ApId,
    mn: MnId,
    new_cache: &mut ApCache,
    now: Tick,
    deps: &SchemeDeps<'_>,
) -> Result<ReassocOutcome, SchemeError> {
    let targets = propagation_targets(scheme, new_ap, deps)?;
    let cache_hit = new_cache.lookup(mn, now).is_some();
    let mut messages = Vec::new();
    if !cache_hit {
        messages.push(OutboundMessage {
            kind: MessageKind::ObtainRequest,
            from: new_ap.clone(),
            to: old_ap.clone(),
            mn,
        });
    }
    messages.extend(notifies(new_ap, mn, targets));
    Ok(ReassocOutcome {
        cache_hit,
        messages,
    })
}

/// Client left `old_ap` (re-associated elsewhere or dropped off): tell the
/// targets `old_ap` used to drop the context.
pub fn on_leave(
    scheme: &SchemeKind,
    old_ap: &ApId,
    mn: MnId,
    deps: &SchemeDeps<'_>,
) -> Result<Vec<OutboundMessage>, SchemeError> {
    let targets = propagation_targets(scheme, old_ap, deps)?;
    Ok(targets
        .into_iter()
        .map(|to| OutboundMessage {
            kind: MessageKind::CacheInvalidate,
            from: old_ap.clone(),
            to,
            mn,
        })
        .collect())
}

fn notifies(from: &ApId, mn: MnId, targets: BTreeSet<ApId>) -> Vec<OutboundMessage> {
    targets
        .into_iter()
        .map(|to| OutboundMessage {
            kind: MessageKind::CacheNotify,
            from: from.clone(),
            to,
            mn,
        })
        .collect()
}
