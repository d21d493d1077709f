//! Engine-level laws: determinism, run/replay consistency, scheme
//! equivalences, and exact recomputability of the metrics from the logs.

use roamsim_core::{
    generate_trace, propagation_cost, replay, run, AccessPoint, EventKind, MessageKind,
    MobilityConfig, MobilityModel, NongMode, Point, RunResult, Scenario, SchemeKind, Topology,
    WorldBounds,
};

/// Eight APs: an overlapping corridor, two gap-separated islands, one
/// island bridged by overlap.
fn eight_ap_topology() -> Topology {
    Topology::new(
        vec![
            AccessPoint::new("A", Point::new(90.0, 200.0), 95.0),
            AccessPoint::new("B", Point::new(230.0, 200.0), 95.0),
            AccessPoint::new("C", Point::new(370.0, 200.0), 95.0),
            AccessPoint::new("D", Point::new(510.0, 200.0), 95.0),
            AccessPoint::new("E", Point::new(128.0, 52.0), 55.0),
            AccessPoint::new("F", Point::new(268.0, 52.0), 55.0),
            AccessPoint::new("G", Point::new(430.0, 345.0), 60.0),
            AccessPoint::new("H", Point::new(545.0, 345.0), 60.0),
        ],
        WorldBounds::new(640.0, 420.0),
    )
    .unwrap()
}

fn scenario(scheme: SchemeKind, seed: u64, mns: u32, duration: u64) -> Scenario {
    Scenario::new(
        eight_ap_topology(),
        MobilityConfig {
            model: MobilityModel::RandomWaypoint,
            speed_min: 1.0,
            speed_max: 12.0,
            pause_time: 2.0,
            tick: 1.0,
            seed,
        },
        mns,
        scheme,
        duration,
    )
}

/// CHP recounted from the raw logs: every re-association performs exactly
/// one counted lookup, and each miss is visible as an obtain request.
fn recount_chp(r: &RunResult) -> (u64, u64) {
    let tries = r
        .trace
        .events
        .iter()
        .filter(|e| matches!(e.kind, EventKind::Reassociate { .. }))
        .count() as u64;
    let misses = r
        .message_log
        .iter()
        .filter(|m| m.msg.kind == MessageKind::ObtainRequest)
        .count() as u64;
    (tries - misses, tries)
}

fn assert_metrics_recomputable(r: &RunResult, cost_model: &roamsim_core::CostModel) {
    let (hits, tries) = recount_chp(r);
    assert_eq!(r.ledger.c_try, tries, "{}", r.scheme);
    assert_eq!(r.ledger.c_hit, hits, "{}", r.scheme);
    let folded = propagation_cost(&r.message_log, cost_model);
    assert!(
        (folded - r.summary.proactive_cost).abs() < 1e-9,
        "{}",
        r.scheme
    );
    let total: f64 = r.message_log.iter().map(|m| m.cost).sum();
    assert!((total - r.summary.total_cost).abs() < 1e-9, "{}", r.scheme);
}

#[test]
fn every_scheme_is_deterministic_for_a_fixed_seed() {
    for scheme in [
        SchemeKind::Reactive,
        SchemeKind::Pnc,
        SchemeKind::Snc { threshold: 0.2 },
        SchemeKind::Nacs {
            mode: NongMode::Intersection,
        },
        SchemeKind::Nacs {
            mode: NongMode::Complement,
        },
    ] {
        let s = scenario(scheme.clone(), 7, 6, 300);
        assert_eq!(run(&s).unwrap(), run(&s).unwrap(), "{scheme}");
    }
}

#[test]
fn run_equals_replay_of_its_own_trace() {
    for seed in [1, 2, 3] {
        let s = scenario(SchemeKind::Snc { threshold: 0.3 }, seed, 5, 250);
        let r = run(&s).unwrap();
        let again = replay(&s, &r.trace, s.scheme.clone()).unwrap();
        assert_eq!(r.message_log, again.message_log);
        assert_eq!(r.ledger, again.ledger);
    }
}

#[test]
fn snc_zero_equals_pnc_and_snc_above_one_is_silent() {
    for seed in 0..6u64 {
        let s = scenario(SchemeKind::Pnc, seed, 5, 250);
        let trace = generate_trace(&s).unwrap();
        let pnc = replay(&s, &trace, SchemeKind::Pnc).unwrap();
        let snc0 = replay(&s, &trace, SchemeKind::Snc { threshold: 0.0 }).unwrap();
        assert_eq!(pnc.message_log, snc0.message_log, "seed {seed}");
        let snc_hi = replay(&s, &trace, SchemeKind::Snc { threshold: 1.01 }).unwrap();
        let proactive = snc_hi
            .message_log
            .iter()
            .filter(|m| m.msg.kind == MessageKind::CacheNotify)
            .count();
        assert_eq!(proactive, 0, "seed {seed}");
    }
}

#[test]
fn ledgers_match_log_recounts_for_every_scheme() {
    for scheme in [
        SchemeKind::Reactive,
        SchemeKind::Pnc,
        SchemeKind::Snc { threshold: 0.25 },
        SchemeKind::Nacs {
            mode: NongMode::Intersection,
        },
        SchemeKind::Nacs {
            mode: NongMode::Complement,
        },
    ] {
        let s = scenario(scheme, 11, 8, 400);
        let r = run(&s).unwrap();
        assert_metrics_recomputable(&r, &s.cost_model);
    }
}

#[test]
fn recounts_survive_pair_costs_and_security_overhead() {
    let mut s = scenario(SchemeKind::Pnc, 13, 6, 300);
    let mut cm = roamsim_core::CostModel::uniform(2.0).with_security_overhead(0.5);
    cm.set_pair_cost("A".into(), "B".into(), 3.5);
    cm.set_pair_cost("C".into(), "D".into(), 0.25);
    s.cost_model = cm;
    let r = run(&s).unwrap();
    assert_metrics_recomputable(&r, &s.cost_model);
}

#[test]
fn traces_are_legal_and_sticky() {
    for seed in 0..8u64 {
        let s = scenario(SchemeKind::Reactive, seed, 10, 300);
        let trace = generate_trace(&s).unwrap();
        trace.validate().unwrap();
        // handoffs only ever leave the old AP's coverage: the old and new AP
        // of a reassociation can never be the same
        for ev in &trace.events {
            if let EventKind::Reassociate { old, new } = &ev.kind {
                assert_ne!(old, new);
            }
        }
    }
}

#[test]
fn obtain_latency_defers_response_but_keeps_books_balanced() {
    let mut s = scenario(SchemeKind::Pnc, 21, 6, 300);
    s.latency.obtain_request = 2;
    s.latency.obtain_response = 2;
    let r = run(&s).unwrap();
    assert_metrics_recomputable(&r, &s.cost_model);
    // responses are stamped at the event tick and delivered later; version
    // ordering protects the fresher self-minted context at the new AP
    for m in &r.message_log {
        if m.msg.kind == MessageKind::ObtainResponse {
            assert!(m.msg.payload_size > 0);
        }
    }
}

#[test]
fn same_trace_nacs_intersection_cost_never_exceeds_pnc() {
    for seed in [5, 6, 7] {
        let s = scenario(SchemeKind::Pnc, seed, 10, 400);
        let trace = generate_trace(&s).unwrap();
        let pnc = replay(&s, &trace, SchemeKind::Pnc).unwrap();
        let nacs = replay(
            &s,
            &trace,
            SchemeKind::Nacs {
                mode: NongMode::Intersection,
            },
        )
        .unwrap();
        assert!(
            nacs.summary.proactive_cost <= pnc.summary.proactive_cost,
            "seed {seed}"
        );
    }
}

#[test]
fn reactive_chp_is_zero_and_costs_are_pure_obtain_traffic() {
    let s = scenario(SchemeKind::Reactive, 9, 8, 400);
    let r = run(&s).unwrap();
    assert_eq!(r.ledger.c_hit, 0);
    assert_eq!(r.summary.proactive_cost, 0.0);
    assert_eq!(r.summary.invalidate_cost, 0.0);
    assert_eq!(r.summary.total_cost, r.summary.reactive_cost);
}
