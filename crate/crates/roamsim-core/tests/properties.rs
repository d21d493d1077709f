//! Property suites for the pure modules: geometry, graphs, caches, and the
//! probability table.

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use roamsim_core::{
    build_nong, build_overlap_graph, overlaps, AccessPoint, ApCache, ApId, CacheTtl, GraphSet,
    HandoffProbabilityTable, InsertOutcome, MnId, MobileContext, Point, SchemeKind, Topology,
    WorldBounds,
};

fn ap(i: usize, x: f64, y: f64, r: f64) -> AccessPoint {
    AccessPoint::new(ApId::new(format!("ap{i:02}")), Point::new(x, y), r)
}

fn arb_topology() -> impl Strategy<Value = Topology> {
    (3usize..=12)
        .prop_flat_map(|n| {
            proptest::collection::vec((0.0..1000.0f64, 0.0..1000.0f64, 30.0..200.0f64), n)
        })
        .prop_map(|aps| {
            let aps = aps
                .into_iter()
                .enumerate()
                .map(|(i, (x, y, r))| ap(i, x, y, r))
                .collect();
            Topology::new(aps, WorldBounds::new(1000.0, 1000.0)).unwrap()
        })
}

proptest! {
    /// Complement law: NONG(complement) and the overlap graph partition all
    /// unordered AP pairs.
    #[test]
    fn complement_partitions_all_pairs(t in arb_topology()) {
        let overlap = build_overlap_graph(&t);
        let nong = build_nong(&overlap, None).unwrap();
        let n = t.aps().len();
        prop_assert_eq!(overlap.edge_count() + nong.edge_count(), n * (n - 1) / 2);
        prop_assert!(overlap.edges().is_disjoint(nong.edges()));
    }

    /// overlaps(a, b) == overlaps(b, a).
    #[test]
    fn overlap_test_is_symmetric(
        (ax, ay, ar) in (0.0..500.0f64, 0.0..500.0f64, 10.0..200.0f64),
        (bx, by, br) in (0.0..500.0f64, 0.0..500.0f64, 10.0..200.0f64),
    ) {
        let a = ap(0, ax, ay, ar);
        let b = ap(1, bx, by, br);
        prop_assert_eq!(overlaps(&a, &b).unwrap(), overlaps(&b, &a).unwrap());
    }

    /// NACS over the complement graph targets exactly
    /// (|V| - 1) - overlap_degree(ap) APs.
    #[test]
    fn nacs_complement_target_count(t in arb_topology()) {
        let overlap = build_overlap_graph(&t);
        let nong = build_nong(&overlap, None).unwrap();
        let neighbor = roamsim_core::ApGraph::new(roamsim_core::GraphKind::Neighbor, t.ap_ids());
        let graphs = GraphSet { neighbor, overlap: overlap.clone(), non_overlap: nong };
        let prob = HandoffProbabilityTable::new();
        let deps = roamsim_core::scheme::SchemeDeps { graphs: &graphs, prob: &prob, in_warmup: false };
        let scheme = SchemeKind::Nacs { mode: roamsim_core::NongMode::Complement };
        let n = t.aps().len();
        for a in t.aps() {
            let targets =
                roamsim_core::scheme::propagation_targets(&scheme, &a.id, &deps).unwrap();
            prop_assert_eq!(targets.len(), (n - 1) - overlap.degree(&a.id));
            prop_assert!(!targets.contains(&a.id));
        }
    }

    /// Round trip at the insert tick, for any payload and version.
    #[test]
    fn cache_round_trip(mn in 0u32..50, version in 1u64..100, payload in proptest::collection::vec(any::<u8>(), 1..64)) {
        let mut cache = ApCache::new(ApId::new("X"), CacheTtl::Infinite);
        let ctx = MobileContext {
            mn_id: MnId(mn),
            payload,
            origin_ap: ApId::new("X"),
            version,
        };
        cache.insert(ctx.clone(), 3);
        prop_assert_eq!(cache.lookup(MnId(mn), 3), Some(&ctx));
    }
}

/// Randomized cache workout against a reference model: 10^4 mixed
/// insert/lookup/invalidate/tick operations, checking every response and
/// the stored-version monotonicity on the way.
#[test]
fn cache_agrees_with_reference_model_over_random_ops() {
    use std::collections::BTreeMap;

    let mut rng = ChaCha8Rng::seed_from_u64(0xCAFE);
    let mut cache = ApCache::new(ApId::new("X"), CacheTtl::Ticks(40));
    // model: mn -> (version, inserted_at)
    let mut model: BTreeMap<u32, (u64, u64)> = BTreeMap::new();
    let mut now = 0u64;
    let mut tries = 0u64;
    let mut hits = 0u64;

    let live = |model: &BTreeMap<u32, (u64, u64)>, mn: u32, now: u64| -> Option<u64> {
        model
            .get(&mn)
            .and_then(|(v, at)| (now - at <= 40).then_some(*v))
    };

    for step in 0..10_000 {
        match rng.gen_range(0..10) {
            0..=3 => {
                let mn = rng.gen_range(0..12u32);
                let version = rng.gen_range(1..30u64);
                let ctx = MobileContext {
                    mn_id: MnId(mn),
                    payload: vec![step as u8; 4],
                    origin_ap: ApId::new("X"),
                    version,
                };
                let out = cache.insert(ctx, now);
                match live(&model, mn, now) {
                    Some(old_v) if version < old_v => {
                        assert_eq!(out, InsertOutcome::Stale, "step {step}");
                    }
                    Some(_) => {
                        assert_eq!(out, InsertOutcome::Replaced, "step {step}");
                        model.insert(mn, (version, now));
                    }
                    None => {
                        assert_eq!(out, InsertOutcome::Inserted, "step {step}");
                        model.insert(mn, (version, now));
                    }
                }
            }
            4..=7 => {
                let mn = rng.gen_range(0..12u32);
                let got = cache.lookup(MnId(mn), now).map(|c| c.version);
                let want = live(&model, mn, now);
                assert_eq!(got, want, "step {step}");
                tries += 1;
                if got.is_some() {
                    hits += 1;
                }
            }
            8 => {
                let mn = rng.gen_range(0..12u32);
                let got = cache.invalidate(MnId(mn));
                // invalidate reports physical presence; expired entries that
                // were never touched by a lookup still occupy their slot
                let _ = got;
                model.remove(&mn);
                // idempotence
                assert!(!cache.invalidate(MnId(mn)), "step {step}");
            }
            _ => {
                now += rng.gen_range(1..30u64);
            }
        }
        assert!(
            cache.len() <= 12,
            "cache can never outgrow the node universe"
        );
        let stats = cache.stats();
        assert!(stats.hits <= stats.tries);
    }
    assert_eq!(cache.stats().tries, tries);
    assert_eq!(cache.stats().hits, hits);
    assert!(tries >= 3_000, "workload should exercise lookups heavily");
}

/// The analytic overlap test agrees with a uniform point-sampling oracle on
/// random pairs away from tangency.
#[test]
fn overlap_matches_sampled_oracle_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xD15C);
    let mut checked = 0;
    while checked < 200 {
        let a = ap(
            0,
            rng.gen_range(0.0..600.0),
            rng.gen_range(0.0..600.0),
            rng.gen_range(20.0..180.0),
        );
        let b = ap(
            1,
            rng.gen_range(0.0..600.0),
            rng.gen_range(0.0..600.0),
            rng.gen_range(20.0..180.0),
        );
        let d = a.position.distance(b.position);
        if (d - (a.radius + b.radius)).abs() <= 1.0 {
            continue; // tangency band excluded
        }
        let analytic = overlaps(&a, &b).unwrap();
        let sampled = sample_overlap(&a, &b, &mut rng, 10_000);
        assert_eq!(analytic, sampled, "a={a:?} b={b:?}");
        checked += 1;
    }
}

fn sample_overlap(a: &AccessPoint, b: &AccessPoint, rng: &mut ChaCha8Rng, n: usize) -> bool {
    let min_x = (a.position.x - a.radius).min(b.position.x - b.radius);
    let max_x = (a.position.x + a.radius).max(b.position.x + b.radius);
    let min_y = (a.position.y - a.radius).min(b.position.y - b.radius);
    let max_y = (a.position.y + a.radius).max(b.position.y + b.radius);
    (0..n).any(|_| {
        let p = Point::new(rng.gen_range(min_x..max_x), rng.gen_range(min_y..max_y));
        a.covers(p) && b.covers(p)
    })
}

/// Probability rows always renormalize to 1 and never go negative.
#[test]
fn probability_table_rows_stay_normalized() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let ids: Vec<ApId> = (0..6).map(|i| ApId::new(format!("ap{i}"))).collect();
    let mut table = HandoffProbabilityTable::new();
    for _ in 0..5_000 {
        let i = rng.gen_range(0..ids.len());
        let mut j = rng.gen_range(0..ids.len());
        while j == i {
            j = rng.gen_range(0..ids.len());
        }
        table.record(&ids[i], &ids[j]);
    }
    let rows: BTreeSet<ApId> = table.rows().cloned().collect();
    for from in &rows {
        assert!((table.row_sum(from) - 1.0).abs() < 1e-9);
        for to in &ids {
            let p = table.probability(from, to);
            assert!((0.0..=1.0).contains(&p));
        }
    }
}
