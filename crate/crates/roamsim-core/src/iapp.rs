//! Simulated inter-AP message plane.
//!
//! Messages are typed, costed at send time, and delivered losslessly after
//! a fixed per-kind latency. Delivery between any ordered AP pair is FIFO:
//! a message never overtakes an earlier one on the same channel.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;
use core::mem;

use crate::cache::MobileContext;
use crate::ids::{ApId, MnId, Tick};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MessageKind {
    /// Proactive context push.
    CacheNotify,
    /// Drop-the-context notice.
    CacheInvalidate,
    /// Context fetch from the old AP after a cache miss.
    ObtainRequest,
    /// The old AP's reply carrying the context.
    ObtainResponse,
}

impl MessageKind {
    pub const ALL: [MessageKind; 4] = [
        MessageKind::CacheNotify,
        MessageKind::CacheInvalidate,
        MessageKind::ObtainRequest,
        MessageKind::ObtainResponse,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            MessageKind::CacheNotify => "cache_notify",
            MessageKind::CacheInvalidate => "cache_invalidate",
            MessageKind::ObtainRequest => "obtain_request",
            MessageKind::ObtainResponse => "obtain_response",
        }
    }

    /// Kinds that carry a context payload.
    pub fn carries_payload(&self) -> bool {
        matches!(self, MessageKind::CacheNotify | MessageKind::ObtainResponse)
    }
}

impl fmt::Display for MessageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One inter-AP message as it appears in logs and counters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IappMessage {
    pub kind: MessageKind,
    pub from_ap: ApId,
    pub to_ap: ApId,
    pub mn_id: MnId,
    /// Context bytes carried; 0 for requests and invalidates.
    pub payload_size: u32,
    pub sent_at: Tick,
}

/// Per-pair transfer costs, uniform 1.0 unless overridden. Costs are
/// symmetric; an optional flat security overhead is added to every context
/// push to stand in for the key-exchange machinery around it.
#[derive(Debug, Clone, PartialEq)]
pub struct CostModel {
    default_cost: f64,
    overrides: BTreeMap<(ApId, ApId), f64>,
    security_overhead: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel::uniform(1.0)
    }
}

impl CostModel {
    pub fn uniform(cost: f64) -> Self {
        CostModel {
            default_cost: cost,
            overrides: BTreeMap::new(),
            security_overhead: 0.0,
        }
    }

    pub fn with_security_overhead(mut self, overhead: f64) -> Self {
        self.security_overhead = overhead;
        self
    }

    /// Sets c(a, b) = c(b, a) = cost.
    pub fn set_pair_cost(&mut self, a: ApId, b: ApId, cost: f64) {
        let key = if a <= b { (a, b) } else { (b, a) };
        self.overrides.insert(key, cost);
    }

    pub fn validate(&self) -> Result<(), &'static str> {
        if self.default_cost < 0.0 || self.security_overhead < 0.0 {
            return Err("costs must be >= 0");
        }
        if self.overrides.values().any(|c| *c < 0.0) {
            return Err("costs must be >= 0");
        }
        Ok(())
    }

    pub fn pair_cost(&self, a: &ApId, b: &ApId) -> f64 {
        let key = if a <= b {
            (a.clone(), b.clone())
        } else {
            (b.clone(), a.clone())
        };
        self.overrides
            .get(&key)
            .copied()
            .unwrap_or(self.default_cost)
    }

    /// Full charge for one message.
    pub fn message_cost(&self, kind: MessageKind, from: &ApId, to: &ApId) -> f64 {
        let base = self.pair_cost(from, to);
        match kind {
            MessageKind::CacheNotify => base + self.security_overhead,
            _ => base,
        }
    }

    /// Scales every cost (including the overhead) by `factor`.
    pub fn scaled(&self, factor: f64) -> CostModel {
        CostModel {
            default_cost: self.default_cost * factor,
            overrides: self
                .overrides
                .iter()
                .map(|(k, v)| (k.clone(), v * factor))
                .collect(),
            security_overhead: self.security_overhead * factor,
        }
    }
}

/// Delivery delay per message kind, in ticks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LatencyModel {
    pub cache_notify: u64,
    pub cache_invalidate: u64,
    pub obtain_request: u64,
    pub obtain_response: u64,
}

impl LatencyModel {
    pub fn zero() -> Self {
        LatencyModel::default()
    }

    pub fn for_kind(&self, kind: MessageKind) -> u64 {
        match kind {
            MessageKind::CacheNotify => self.cache_notify,
            MessageKind::CacheInvalidate => self.cache_invalidate,
            MessageKind::ObtainRequest => self.obtain_request,
            MessageKind::ObtainResponse => self.obtain_response,
        }
    }

    /// Rounds a millisecond delay to whole ticks of `tick_seconds`.
    pub fn ticks_from_ms(tick_seconds: f64, ms: f64) -> u64 {
        if tick_seconds <= 0.0 || ms <= 0.0 {
            return 0;
        }
        libm::round(ms / 1000.0 / tick_seconds) as u64
    }
}

/// A sent message together with the cost it was charged.
#[derive(Debug, Clone, PartialEq)]
pub struct SentMessage {
    pub msg: IappMessage,
    pub cost: f64,
}

/// A message handed to its destination, with the context it carried.
#[derive(Debug, Clone, PartialEq)]
pub struct Delivery {
    pub msg: IappMessage,
    pub context: Option<MobileContext>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IappError {
    /// from_ap == to_ap.
    SelfMessage(ApId),
    /// payload_size inconsistent with the message kind.
    BadPayloadSize(MessageKind),
}

impl fmt::Display for IappError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IappError::SelfMessage(id) => write!(f, "message from {id} to itself"),
            IappError::BadPayloadSize(kind) => {
                write!(f, "{kind} has an inconsistent payload size")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for IappError {}

/// The in-flight queue plus the complete send log and cost accumulators.
#[derive(Debug, Clone, Default)]
pub struct Network {
    queue: BTreeMap<(Tick, u64), Delivery>,
    next_seq: u64,
    /// Latest scheduled delivery per directed pair, to keep channels FIFO.
    pair_horizon: BTreeMap<(ApId, ApId), Tick>,
    log: Vec<SentMessage>,
    cost_by_kind: BTreeMap<MessageKind, f64>,
    sent: u64,
    delivered: u64,
}

impl Network {
    pub fn new() -> Self {
        Network::default()
    }

    /// Prices and enqueues a message. Returns the delivery tick.
    ///
    /// Delivery is scheduled at send + latency, pushed later if the directed
    /// channel already has a later delivery pending.
    pub fn send(
        &mut self,
        msg: IappMessage,
        context: Option<MobileContext>,
        cost_model: &CostModel,
        latency: &LatencyModel,
    ) -> Result<Tick, IappError> {
        if msg.from_ap == msg.to_ap {
            return Err(IappError::SelfMessage(msg.from_ap));
        }
        let payload_ok = if msg.kind.carries_payload() {
            msg.payload_size > 0
        } else {
            msg.payload_size == 0
        };
        if !payload_ok {
            return Err(IappError::BadPayloadSize(msg.kind));
        }

        let cost = cost_model.message_cost(msg.kind, &msg.from_ap, &msg.to_ap);
        *self.cost_by_kind.entry(msg.kind).or_insert(0.0) += cost;
        self.log.push(SentMessage {
            msg: msg.clone(),
            cost,
        });
        self.sent += 1;

        let pair = (msg.from_ap.clone(), msg.to_ap.clone());
        let earliest = msg.sent_at + latency.for_kind(msg.kind);
        let deliver_at = match self.pair_horizon.get(&pair) {
            Some(h) => earliest.max(*h),
            None => earliest,
        };
        self.pair_horizon.insert(pair, deliver_at);
        self.queue
            .insert((deliver_at, self.next_seq), Delivery { msg, context });
        self.next_seq += 1;
        Ok(deliver_at)
    }

    /// Removes and returns every message due at or before `now`, ordered by
    /// delivery tick then send order.
    pub fn deliver_due(&mut self, now: Tick) -> Vec<Delivery> {
        let later = self.queue.split_off(&(now + 1, 0));
        let due = mem::replace(&mut self.queue, later);
        self.delivered += due.len() as u64;
        due.into_values().collect()
    }

    pub fn in_flight(&self) -> u64 {
        self.queue.len() as u64
    }

    pub fn sent_count(&self) -> u64 {
        self.sent
    }

    pub fn delivered_count(&self) -> u64 {
        self.delivered
    }

    pub fn log(&self) -> &[SentMessage] {
        &self.log
    }

    pub fn take_log(&mut self) -> Vec<SentMessage> {
        mem::take(&mut self.log)
    }

    pub fn cost_of_kind(&self, kind: MessageKind) -> f64 {
        self.cost_by_kind.get(&kind).copied().unwrap_or(0.0)
    }

    pub fn total_cost(&self) -> f64 {
        MessageKind::ALL.iter().map(|k| self.cost_of_kind(*k)).sum()
    }
}
