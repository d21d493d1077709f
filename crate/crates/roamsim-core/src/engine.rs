//! Tick-driven simulation loop wiring mobility, schemes, the message plane,
//! and the caches together.
//!
//! A run has two halves. `generate_trace` moves the nodes and records the
//! association events; it depends only on the topology, the mobility config,
//! and the seed. `process_trace` pushes a recorded trace through a scheme
//! and produces the message log and metrics. Keeping the halves separate
//! makes same-trace scheme comparisons exact: `replay` feeds one trace to
//! any scheme, and `run` is just generate-then-process.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cache::{ApCache, CacheTtl, MobileContext};
use crate::iapp::{
    CostModel, IappError, IappMessage, LatencyModel, MessageKind, Network, SentMessage,
};
use crate::ids::{ApId, MnId, Tick};
use crate::metrics::{MetricsLedger, MetricsSummary, SlotMetrics};
use crate::mobility::{classify_transition, step, MobileNode, MobilityConfig, Transition};
use crate::scheme::{
    on_associate, on_leave, on_reassociate, GraphSet, HandoffProbabilityTable, NongMode,
    OutboundMessage, SchemeDeps, SchemeError, SchemeKind,
};
use crate::topology::{
    build_nong, build_overlap_graph, ApGraph, GraphKind, Topology, TopologyError,
};

/// Everything one run needs.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub topology: Topology,
    pub mobility: MobilityConfig,
    pub n_mobile_nodes: u32,
    pub scheme: SchemeKind,
    /// Run length in ticks.
    pub duration: Tick,
    pub cost_model: CostModel,
    pub latency: LatencyModel,
    pub cache_ttl: CacheTtl,
    /// Fraction of the run during which snc trains before filtering.
    pub warmup_fraction: f64,
    /// Context payload bytes carried by pushes and obtain responses.
    pub payload_size: u32,
    /// Number of metric sampling windows.
    pub slots: u32,
}

impl Scenario {
    /// A scenario with the stock knobs: uniform unit costs, zero latency,
    /// infinite TTL, 20% warm-up, 256-byte contexts, 20 metric slots.
    pub fn new(
        topology: Topology,
        mobility: MobilityConfig,
        n_mobile_nodes: u32,
        scheme: SchemeKind,
        duration: Tick,
    ) -> Self {
        Scenario {
            topology,
            mobility,
            n_mobile_nodes,
            scheme,
            duration,
            cost_model: CostModel::default(),
            latency: LatencyModel::zero(),
            cache_ttl: CacheTtl::Infinite,
            warmup_fraction: 0.2,
            payload_size: 256,
            slots: 20,
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.duration == 0 {
            return Err(ScenarioError::Invalid("duration must be > 0"));
        }
        if self.n_mobile_nodes == 0 {
            return Err(ScenarioError::Invalid("need at least one mobile node"));
        }
        self.mobility.validate().map_err(ScenarioError::Invalid)?;
        self.scheme.validate().map_err(ScenarioError::Invalid)?;
        self.cost_model.validate().map_err(ScenarioError::Invalid)?;
        if !(0.0..1.0).contains(&self.warmup_fraction) {
            return Err(ScenarioError::Invalid("warmup_fraction must be in [0, 1)"));
        }
        if self.payload_size == 0 {
            return Err(ScenarioError::Invalid("payload_size must be >= 1"));
        }
        if self.slots == 0 {
            return Err(ScenarioError::Invalid("slots must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScenarioError {
    Invalid(&'static str),
    /// A replayed trace does not belong to this scenario's topology.
    TraceMismatch(String),
    Scheme(SchemeError),
    Topology(TopologyError),
    Iapp(IappError),
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::Invalid(msg) => write!(f, "invalid scenario: {msg}"),
            ScenarioError::TraceMismatch(msg) => write!(f, "trace mismatch: {msg}"),
            ScenarioError::Scheme(e) => write!(f, "scheme error: {e}"),
            ScenarioError::Topology(e) => write!(f, "topology error: {e}"),
            ScenarioError::Iapp(e) => write!(f, "message error: {e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ScenarioError {}

impl From<SchemeError> for ScenarioError {
    fn from(e: SchemeError) -> Self {
        ScenarioError::Scheme(e)
    }
}

impl From<TopologyError> for ScenarioError {
    fn from(e: TopologyError) -> Self {
        ScenarioError::Topology(e)
    }
}

impl From<IappError> for ScenarioError {
    fn from(e: IappError) -> Self {
        ScenarioError::Iapp(e)
    }
}

/// One association change.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventKind {
    Associate { ap: ApId },
    Reassociate { old: ApId, new: ApId },
    Disassociate { old: ApId },
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::Associate { .. } => "associate",
            EventKind::Reassociate { .. } => "reassociate",
            EventKind::Disassociate { .. } => "disassociate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventRecord {
    pub tick: Tick,
    pub mn: MnId,
    pub kind: EventKind,
}

/// A recorded mobility trace, replayable under any scheme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventTrace {
    pub ap_ids: BTreeSet<ApId>,
    pub duration: Tick,
    pub n_mobile_nodes: u32,
    pub seed: u64,
    pub events: Vec<EventRecord>,
}

impl EventTrace {
    /// Checks tick ordering, id scope, and the association state machine:
    /// associate only from the unassociated state, reassociate and
    /// disassociate only from the matching associated state.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let mut state: BTreeMap<MnId, Option<ApId>> = BTreeMap::new();
        let mut last_tick = 0;
        for ev in &self.events {
            if ev.tick < last_tick {
                return Err(ScenarioError::TraceMismatch(String::from(
                    "events out of tick order",
                )));
            }
            if ev.tick >= self.duration {
                return Err(ScenarioError::TraceMismatch(String::from(
                    "event beyond trace duration",
                )));
            }
            last_tick = ev.tick;
            let known = |id: &ApId| self.ap_ids.contains(id);
            let cur = state.entry(ev.mn).or_insert(None);
            match &ev.kind {
                EventKind::Associate { ap } => {
                    if !known(ap) {
                        return Err(ScenarioError::TraceMismatch(String::from("unknown AP id")));
                    }
                    if cur.is_some() {
                        return Err(ScenarioError::TraceMismatch(String::from(
                            "associate from an associated state",
                        )));
                    }
                    *cur = Some(ap.clone());
                }
                EventKind::Reassociate { old, new } => {
                    if !known(old) || !known(new) {
                        return Err(ScenarioError::TraceMismatch(String::from("unknown AP id")));
                    }
                    if cur.as_ref() != Some(old) {
                        return Err(ScenarioError::TraceMismatch(String::from(
                            "reassociate from the wrong AP",
                        )));
                    }
                    *cur = Some(new.clone());
                }
                EventKind::Disassociate { old } => {
                    if !known(old) {
                        return Err(ScenarioError::TraceMismatch(String::from("unknown AP id")));
                    }
                    if cur.as_ref() != Some(old) {
                        return Err(ScenarioError::TraceMismatch(String::from(
                            "disassociate from the wrong AP",
                        )));
                    }
                    *cur = None;
                }
            }
        }
        Ok(())
    }

    /// The (old, new) pairs of every re-association, in trace order.
    pub fn reassociations(&self) -> impl Iterator<Item = (&ApId, &ApId)> {
        self.events.iter().filter_map(|ev| match &ev.kind {
            EventKind::Reassociate { old, new } => Some((old, new)),
            _ => None,
        })
    }
}

/// Everything a finished run leaves behind.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub scheme: SchemeKind,
    pub trace: EventTrace,
    pub message_log: Vec<SentMessage>,
    pub ledger: MetricsLedger,
    pub summary: MetricsSummary,
    /// Misses where even the old AP had no context and it was rebuilt from
    /// scratch at the new AP.
    pub full_misses: u64,
}

/// Moves the nodes and records the association events. Pure mobility: the
/// result depends only on (topology, mobility config, node count, duration).
pub fn generate_trace(s: &Scenario) -> Result<EventTrace, ScenarioError> {
    s.validate()?;
    let world = s.topology.world();
    let mut rng = ChaCha8Rng::seed_from_u64(s.mobility.seed);
    let mut nodes: Vec<MobileNode> = (0..s.n_mobile_nodes)
        .map(|i| MobileNode::spawn(MnId(i), world.sample_point(&mut rng)))
        .collect();
    let mut events = Vec::new();
    for tick in 0..s.duration {
        if tick > 0 {
            for mn in &mut nodes {
                step(mn, &s.mobility, &world, &mut rng);
            }
        }
        for mn in &mut nodes {
            let tr = classify_transition(mn, &s.topology);
            match tr {
                Transition::None => {}
                Transition::Associate { ap } => {
                    mn.associated_ap = Some(ap.clone());
                    events.push(EventRecord {
                        tick,
                        mn: mn.id,
                        kind: EventKind::Associate { ap },
                    });
                }
                Transition::Reassociate { old, new } => {
                    debug_assert!(
                        s.topology
                            .get(&old)
                            .map(|a| !a.covers(mn.position))
                            .unwrap_or(true),
                        "sticky rule violated: handoff while still covered"
                    );
                    mn.associated_ap = Some(new.clone());
                    events.push(EventRecord {
                        tick,
                        mn: mn.id,
                        kind: EventKind::Reassociate { old, new },
                    });
                }
                Transition::Disassociate { old } => {
                    mn.associated_ap = None;
                    events.push(EventRecord {
                        tick,
                        mn: mn.id,
                        kind: EventKind::Disassociate { old },
                    });
                }
            }
        }
    }
    Ok(EventTrace {
        ap_ids: s.topology.ap_ids(),
        duration: s.duration,
        n_mobile_nodes: s.n_mobile_nodes,
        seed: s.mobility.seed,
        events,
    })
}

/// Runs a scenario end to end.
pub fn run(s: &Scenario) -> Result<RunResult, ScenarioError> {
    let trace = generate_trace(s)?;
    process_trace(s, trace, s.scheme.clone())
}

/// Replays a recorded trace under `scheme`. The trace must come from the
/// same topology (vertex set) as the scenario.
pub fn replay(
    s: &Scenario,
    trace: &EventTrace,
    scheme: SchemeKind,
) -> Result<RunResult, ScenarioError> {
    s.validate()?;
    if trace.ap_ids != s.topology.ap_ids() {
        return Err(ScenarioError::TraceMismatch(String::from(
            "trace AP set differs from the scenario topology",
        )));
    }
    if trace.duration == 0 {
        return Err(ScenarioError::TraceMismatch(String::from(
            "empty trace duration",
        )));
    }
    trace.validate()?;
    process_trace(s, trace.clone(), scheme)
}

struct Engine<'a> {
    scenario: &'a Scenario,
    scheme: SchemeKind,
    graphs: GraphSet,
    prob: HandoffProbabilityTable,
    caches: BTreeMap<ApId, ApCache>,
    network: Network,
    ledger: MetricsLedger,
    versions: BTreeMap<MnId, u64>,
    full_misses: u64,
    maintain_intersection_nong: bool,
    warmup_until: Tick,
}

impl<'a> Engine<'a> {
    fn new(s: &'a Scenario, scheme: SchemeKind, duration: Tick) -> Result<Self, ScenarioError> {
        let ids = s.topology.ap_ids();
        let overlap = build_overlap_graph(&s.topology);
        let maintain_intersection_nong = matches!(
            scheme,
            SchemeKind::Nacs {
                mode: NongMode::Intersection
            }
        );
        let non_overlap = if maintain_intersection_nong {
            // grows with the learned neighbor graph
            ApGraph::new(GraphKind::NonOverlap, ids.clone())
        } else {
            build_nong(&overlap, None)?
        };
        let graphs = GraphSet {
            neighbor: ApGraph::new(GraphKind::Neighbor, ids.clone()),
            overlap,
            non_overlap,
        };
        let caches = ids
            .iter()
            .map(|id| (id.clone(), ApCache::new(id.clone(), s.cache_ttl)))
            .collect();
        let warmup_until = (duration as f64 * s.warmup_fraction) as Tick;
        Ok(Engine {
            scenario: s,
            scheme,
            graphs,
            prob: HandoffProbabilityTable::new(),
            caches,
            network: Network::new(),
            ledger: MetricsLedger::new(),
            versions: BTreeMap::new(),
            full_misses: 0,
            maintain_intersection_nong,
            warmup_until,
        })
    }

    fn mint_context(&mut self, mn: MnId, ap: &ApId) -> MobileContext {
        let v = self.versions.entry(mn).or_insert(0);
        *v += 1;
        MobileContext {
            mn_id: mn,
            payload: vec![0u8; self.scenario.payload_size as usize],
            origin_ap: ap.clone(),
            version: *v,
        }
    }

    /// Sends the scheme's planned messages. An obtain request is served
    /// inline: the old AP answers from its cache (the round trip the miss
    /// costs), or the context is rebuilt at the new AP when the old AP has
    /// nothing either.
    fn dispatch(
        &mut self,
        messages: &[OutboundMessage],
        ctx: Option<&MobileContext>,
        now: Tick,
    ) -> Result<(), ScenarioError> {
        for m in messages {
            match m.kind {
                MessageKind::CacheNotify => {
                    let ctx = ctx.ok_or(ScenarioError::Invalid("notify without a context"))?;
                    self.send(m, ctx.payload.len() as u32, Some(ctx.clone()), now)?;
                }
                MessageKind::CacheInvalidate => {
                    self.send(m, 0, None, now)?;
                }
                MessageKind::ObtainRequest => {
                    self.send(m, 0, None, now)?;
                    // old AP answers with whatever copy it still holds
                    let old_ctx = self
                        .caches
                        .get_mut(&m.to)
                        .and_then(|c| c.peek(m.mn, now).cloned());
                    match old_ctx {
                        Some(c) => {
                            let resp = OutboundMessage {
                                kind: MessageKind::ObtainResponse,
                                from: m.to.clone(),
                                to: m.from.clone(),
                                mn: m.mn,
                            };
                            self.send(&resp, c.payload.len() as u32, Some(c), now)?;
                        }
                        None => self.full_misses += 1,
                    }
                }
                MessageKind::ObtainResponse => {
                    // schemes never plan responses directly
                    return Err(ScenarioError::Invalid("unexpected planned obtain response"));
                }
            }
        }
        Ok(())
    }

    fn send(
        &mut self,
        m: &OutboundMessage,
        payload_size: u32,
        context: Option<MobileContext>,
        now: Tick,
    ) -> Result<(), ScenarioError> {
        let msg = IappMessage {
            kind: m.kind,
            from_ap: m.from.clone(),
            to_ap: m.to.clone(),
            mn_id: m.mn,
            payload_size,
            sent_at: now,
        };
        self.network.send(
            msg,
            context,
            &self.scenario.cost_model,
            &self.scenario.latency,
        )?;
        Ok(())
    }

    fn handle_event(&mut self, ev: &EventRecord) -> Result<(), ScenarioError> {
        let now = ev.tick;
        let in_warmup = now < self.warmup_until;

        // the re-association itself teaches the shared graphs and the
        // probability table before any propagation decision is made
        if let EventKind::Reassociate { old, new } = &ev.kind {
            self.graphs.neighbor.add_edge(old.clone(), new.clone())?;
            if self.maintain_intersection_nong && !self.graphs.overlap.has_edge(old, new) {
                self.graphs.non_overlap.add_edge(old.clone(), new.clone())?;
            }
            self.prob.record(old, new);
        }

        match &ev.kind {
            EventKind::Associate { ap } => {
                let ctx = self.mint_context(ev.mn, ap);
                if let Some(cache) = self.caches.get_mut(ap) {
                    cache.insert(ctx.clone(), now);
                }
                let deps = SchemeDeps {
                    graphs: &self.graphs,
                    prob: &self.prob,
                    in_warmup,
                };
                let msgs = on_associate(&self.scheme, ap, ev.mn, &deps)?;
                self.dispatch(&msgs, Some(&ctx), now)?;
            }
            EventKind::Reassociate { old, new } => {
                let deps = SchemeDeps {
                    graphs: &self.graphs,
                    prob: &self.prob,
                    in_warmup,
                };
                let cache = self
                    .caches
                    .get_mut(new)
                    .ok_or_else(|| ScenarioError::Scheme(SchemeError::UnknownAp(new.clone())))?;
                let outcome = on_reassociate(&self.scheme, new, old, ev.mn, cache, now, &deps)?;
                self.ledger.record_lookup(outcome.cache_hit);
                let ctx = self.mint_context(ev.mn, new);
                self.dispatch(&outcome.messages, Some(&ctx), now)?;
                if let Some(cache) = self.caches.get_mut(new) {
                    cache.insert(ctx, now);
                }
                self.leave(old, ev.mn, now, in_warmup)?;
            }
            EventKind::Disassociate { old } => {
                self.leave(old, ev.mn, now, in_warmup)?;
            }
        }
        Ok(())
    }

    fn leave(
        &mut self,
        old: &ApId,
        mn: MnId,
        now: Tick,
        in_warmup: bool,
    ) -> Result<(), ScenarioError> {
        let deps = SchemeDeps {
            graphs: &self.graphs,
            prob: &self.prob,
            in_warmup,
        };
        let msgs = on_leave(&self.scheme, old, mn, &deps)?;
        self.dispatch(&msgs, None, now)?;
        // the old AP drops its own copy once the client is gone
        if let Some(cache) = self.caches.get_mut(old) {
            cache.invalidate(mn);
        }
        Ok(())
    }

    fn apply_deliveries(&mut self, now: Tick) {
        for d in self.network.deliver_due(now) {
            match d.msg.kind {
                MessageKind::CacheNotify | MessageKind::ObtainResponse => {
                    if let (Some(cache), Some(ctx)) = (self.caches.get_mut(&d.msg.to_ap), d.context)
                    {
                        cache.insert(ctx, now);
                    }
                }
                MessageKind::CacheInvalidate => {
                    if let Some(cache) = self.caches.get_mut(&d.msg.to_ap) {
                        cache.invalidate(d.msg.mn_id);
                    }
                }
                MessageKind::ObtainRequest => {}
            }
        }
    }
}

fn process_trace(
    s: &Scenario,
    trace: EventTrace,
    scheme: SchemeKind,
) -> Result<RunResult, ScenarioError> {
    let duration = trace.duration;
    let mut engine = Engine::new(s, scheme.clone(), duration)?;
    let slot_len = duration.div_ceil(s.slots as u64).max(1);

    let mut slot_idx: u32 = 0;
    let mut prev = SlotSnapshot::default();
    let mut ev_idx = 0usize;

    for tick in 0..duration {
        while ev_idx < trace.events.len() && trace.events[ev_idx].tick == tick {
            let ev = trace.events[ev_idx].clone();
            ev_idx += 1;
            engine.handle_event(&ev)?;
        }
        engine.apply_deliveries(tick);

        if (tick + 1) % slot_len == 0 || tick + 1 == duration {
            slot_idx += 1;
            let cur = SlotSnapshot::of(&engine);
            engine.ledger.per_slot.push(SlotMetrics {
                slot: slot_idx,
                c_hit: cur.c_hit - prev.c_hit,
                c_try: cur.c_try - prev.c_try,
                proactive_cost: cur.proactive - prev.proactive,
                reactive_cost: cur.reactive - prev.reactive,
                invalidate_cost: cur.invalidate - prev.invalidate,
                total_cost: cur.total - prev.total,
            });
            prev = cur;
        }
    }

    for kind in MessageKind::ALL {
        let cost = engine.network.cost_of_kind(kind);
        if cost != 0.0 {
            engine.ledger.cost_by_kind.insert(kind, cost);
        }
    }
    let summary = engine.ledger.summary();
    Ok(RunResult {
        scheme,
        trace,
        message_log: engine.network.take_log(),
        ledger: engine.ledger,
        summary,
        full_misses: engine.full_misses,
    })
}

#[derive(Default, Clone, Copy)]
struct SlotSnapshot {
    c_hit: u64,
    c_try: u64,
    proactive: f64,
    reactive: f64,
    invalidate: f64,
    total: f64,
}

impl SlotSnapshot {
    fn of(e: &Engine<'_>) -> Self {
        SlotSnapshot {
            c_hit: e.ledger.c_hit,
            c_try: e.ledger.c_try,
            proactive: e.network.cost_of_kind(MessageKind::CacheNotify),
            reactive: e.network.cost_of_kind(MessageKind::ObtainRequest)
                + e.network.cost_of_kind(MessageKind::ObtainResponse),
            invalidate: e.network.cost_of_kind(MessageKind::CacheInvalidate),
            total: e.network.total_cost(),
        }
    }
}
