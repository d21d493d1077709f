//! Deterministic discrete-event simulation of context caching for 802.11
//! handoffs.
//!
//! The crate models an extended service set as a set of access points with
//! circular radio ranges, moves mobile nodes through it with a seeded
//! random-waypoint model, and drives one of four context-propagation
//! strategies over the resulting association events:
//!
//! * `reactive`: no proactive propagation; the context is fetched from the
//!   old AP on every handoff.
//! * `pnc`: proactive neighbor caching, pushing to every neighbor-graph
//!   neighbor of the current AP.
//! * `snc`: selective neighbor caching, pushing only to neighbors whose
//!   estimated handoff probability clears a threshold.
//! * `nacs`: non-overlapping AP caching, pushing along the non-overlap
//!   neighbor graph (NONG) instead of the plain neighbor graph.
//!
//! Every inter-AP message is counted and costed, and cache hit/miss
//! bookkeeping feeds the signaling-cost and cache-hit-probability metrics.
//! Runs are fully deterministic given a scenario and a seed, and a recorded
//! mobility trace can be replayed under a different scheme for same-trace
//! comparisons.
//!
//! The crate is `no_std`-compatible (with `alloc`); all file formats, CSV
//! output, and the command-line front end live in the companion `roamsim`
//! binary crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod cache;
pub mod engine;
pub mod geom;
pub mod iapp;
pub mod ids;
pub mod metrics;
pub mod mobility;
pub mod scheme;
pub mod topology;

pub use cache::{ApCache, CacheTtl, InsertOutcome, MobileContext};
pub use engine::{
    generate_trace, replay, run, EventKind, EventRecord, EventTrace, RunResult, Scenario,
    ScenarioError,
};
pub use geom::{Point, WorldBounds};
pub use iapp::{CostModel, IappMessage, LatencyModel, MessageKind, Network, SentMessage};
pub use ids::{ApId, MnId, Tick};
pub use metrics::{
    cost_ratio, cp_matrix, propagation_cost, MetricsError, MetricsLedger, MetricsSummary,
    SlotMetrics,
};
pub use mobility::{MobileNode, MobilityConfig, MobilityModel, Transition};
pub use scheme::{GraphSet, HandoffProbabilityTable, NongMode, SchemeKind};
pub use topology::{
    build_nong, build_overlap_graph, learn_neighbor_graph, overlaps, AccessPoint, ApGraph,
    GraphKind, Topology, TopologyError,
};
