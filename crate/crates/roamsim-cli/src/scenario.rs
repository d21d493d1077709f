//! Scenario files: the JSON schema and its conversion into a runnable
//! scenario.
//!
//! The schema is strict: unknown keys are rejected so a typo fails loudly
//! instead of silently running the default.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use roamsim_core::{
    AccessPoint, CacheTtl, CostModel, LatencyModel, MobilityConfig, MobilityModel, NongMode, Point,
    Scenario, SchemeKind, Topology, WorldBounds,
};

use crate::CliError;

/// Fixed one-way delay modeled for the obtain round trip, rounded to whole
/// ticks of the scenario's tick length.
pub const OBTAIN_LATENCY_MS: f64 = 4.0;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub aps: Vec<ApEntry>,
    pub world: WorldEntry,
    pub mobility: MobilityEntry,
    /// Mobile-node count.
    pub mns: u32,
    pub scheme: SchemeEntry,
    /// Run length in simulated seconds.
    pub duration_s: f64,
    pub seed: u64,
    #[serde(default)]
    pub cost: Option<CostEntry>,
    /// Cache TTL in ticks; absent means entries never expire.
    #[serde(default)]
    pub ttl: Option<u64>,
    #[serde(default = "default_warmup")]
    pub warmup_fraction: f64,
}

fn default_warmup() -> f64 {
    0.2
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApEntry {
    pub id: String,
    pub x: f64,
    pub y: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldEntry {
    pub width: f64,
    pub height: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MobilityEntry {
    pub model: String,
    pub speed_min: f64,
    pub speed_max: f64,
    /// Pause at each waypoint, seconds.
    pub pause: f64,
    /// Tick length, seconds.
    pub tick: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeEntry {
    /// One of reactive, pnc, snc, nacs.
    pub kind: String,
    #[serde(default)]
    pub threshold: Option<f64>,
    #[serde(default)]
    pub nong_mode: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostEntry {
    #[serde(default = "default_cost")]
    pub default: f64,
    #[serde(default)]
    pub security_overhead: f64,
    #[serde(default)]
    pub pairs: Vec<PairCostEntry>,
}

fn default_cost() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairCostEntry {
    pub a: String,
    pub b: String,
    pub cost: f64,
}

impl ScenarioFile {
    pub fn load(path: &Path) -> Result<ScenarioFile, CliError> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))
    }

    /// Builds the runnable scenario, running every core validation.
    pub fn to_scenario(&self) -> Result<Scenario, CliError> {
        let world = WorldBounds::new(self.world.width, self.world.height);
        let aps: Vec<AccessPoint> = self
            .aps
            .iter()
            .map(|a| AccessPoint::new(a.id.as_str(), Point::new(a.x, a.y), a.radius))
            .collect();
        let topology =
            Topology::new(aps, world).map_err(|e| CliError::Schema(format!("aps: {e}")))?;

        if self.mobility.model != "random_waypoint" {
            return Err(CliError::Schema(format!(
                "mobility.model: unknown model `{}` (expected random_waypoint)",
                self.mobility.model
            )));
        }
        let mobility = MobilityConfig {
            model: MobilityModel::RandomWaypoint,
            speed_min: self.mobility.speed_min,
            speed_max: self.mobility.speed_max,
            pause_time: self.mobility.pause,
            tick: self.mobility.tick,
            seed: self.seed,
        };

        let scheme = parse_scheme_entry(&self.scheme)?;

        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.duration_s) || !positive(self.mobility.tick) {
            return Err(CliError::Schema(
                "duration_s and mobility.tick must be > 0".into(),
            ));
        }
        let duration = (self.duration_s / self.mobility.tick).round() as u64;
        if duration == 0 {
            return Err(CliError::Schema(
                "duration_s is shorter than one tick".into(),
            ));
        }

        let mut cost_model = CostModel::default();
        if let Some(cost) = &self.cost {
            cost_model =
                CostModel::uniform(cost.default).with_security_overhead(cost.security_overhead);
            for p in &cost.pairs {
                if topology.get(&p.a.as_str().into()).is_none()
                    || topology.get(&p.b.as_str().into()).is_none()
                {
                    return Err(CliError::Schema(format!(
                        "cost.pairs: unknown AP pair {} {}",
                        p.a, p.b
                    )));
                }
                cost_model.set_pair_cost(p.a.as_str().into(), p.b.as_str().into(), p.cost);
            }
        }

        let obtain_ticks = LatencyModel::ticks_from_ms(self.mobility.tick, OBTAIN_LATENCY_MS);
        let latency = LatencyModel {
            cache_notify: 0,
            cache_invalidate: 0,
            obtain_request: obtain_ticks,
            obtain_response: obtain_ticks,
        };

        let mut scenario = Scenario::new(topology, mobility, self.mns, scheme, duration);
        scenario.cost_model = cost_model;
        scenario.latency = latency;
        scenario.cache_ttl = self.ttl.map_or(CacheTtl::Infinite, CacheTtl::Ticks);
        scenario.warmup_fraction = self.warmup_fraction;
        scenario
            .validate()
            .map_err(|e| CliError::Schema(e.to_string()))?;
        Ok(scenario)
    }
}

fn parse_scheme_entry(entry: &SchemeEntry) -> Result<SchemeKind, CliError> {
    match entry.kind.as_str() {
        "reactive" => Ok(SchemeKind::Reactive),
        "pnc" => Ok(SchemeKind::Pnc),
        "snc" => {
            let threshold = entry
                .threshold
                .ok_or_else(|| CliError::Schema("scheme: snc requires a threshold".into()))?;
            Ok(SchemeKind::Snc { threshold })
        }
        "nacs" => {
            let mode = match entry.nong_mode.as_deref() {
                None | Some("intersection") => NongMode::Intersection,
                Some("complement") => NongMode::Complement,
                Some(other) => {
                    return Err(CliError::Schema(format!(
                        "scheme.nong_mode: unknown mode `{other}`"
                    )))
                }
            };
            Ok(SchemeKind::Nacs { mode })
        }
        other => Err(CliError::Schema(format!(
            "scheme.kind: unknown scheme `{other}`"
        ))),
    }
}

/// Parses the `--scheme kind[:param]` flag syntax: `pnc`, `reactive`,
/// `snc:0.15`, `nacs:complement`, `nacs:intersection` (bare `nacs` means
/// intersection).
pub fn parse_scheme_flag(s: &str) -> Result<SchemeKind, CliError> {
    let (kind, param) = match s.split_once(':') {
        Some((k, p)) => (k, Some(p)),
        None => (s, None),
    };
    match (kind, param) {
        ("reactive", None) => Ok(SchemeKind::Reactive),
        ("pnc", None) => Ok(SchemeKind::Pnc),
        ("snc", Some(p)) => {
            let threshold: f64 = p
                .parse()
                .map_err(|_| CliError::Schema(format!("snc threshold `{p}` is not a number")))?;
            Ok(SchemeKind::Snc { threshold })
        }
        ("snc", None) => Err(CliError::Schema(
            "snc needs a threshold, e.g. snc:0.15".into(),
        )),
        ("nacs", None) | ("nacs", Some("intersection")) => Ok(SchemeKind::Nacs {
            mode: NongMode::Intersection,
        }),
        ("nacs", Some("complement")) => Ok(SchemeKind::Nacs {
            mode: NongMode::Complement,
        }),
        _ => Err(CliError::Schema(format!("unknown scheme `{s}`"))),
    }
}
