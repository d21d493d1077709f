//! The four subcommands, as plain functions so integration tests can drive
//! them without spawning the binary.

use std::fs;
use std::path::{Path, PathBuf};

use roamsim_core::{
    build_nong, build_overlap_graph, cost_ratio, generate_trace, learn_neighbor_graph, replay, run,
    ApId, NongMode, RunResult, Scenario, SchemeKind,
};

use crate::output;
use crate::scenario::ScenarioFile;
use crate::CliError;

/// Overrides shared by every subcommand.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub scheme: Option<SchemeKind>,
    pub seed: Option<u64>,
    pub mns: Option<u32>,
    pub duration_s: Option<f64>,
}

fn load(scenario_path: &Path, overrides: &Overrides) -> Result<(ScenarioFile, Scenario), CliError> {
    let mut file = ScenarioFile::load(scenario_path)?;
    if let Some(seed) = overrides.seed {
        file.seed = seed;
    }
    if let Some(mns) = overrides.mns {
        file.mns = mns;
    }
    if let Some(d) = overrides.duration_s {
        file.duration_s = d;
    }
    let mut scenario = file.to_scenario()?;
    if let Some(scheme) = &overrides.scheme {
        scheme
            .validate()
            .map_err(|e| CliError::Schema(e.to_string()))?;
        scenario.scheme = scheme.clone();
    }
    Ok((file, scenario))
}

/// `run`: one scenario, one scheme, full output set.
pub fn cmd_run(
    scenario_path: &Path,
    overrides: &Overrides,
    out_dir: &Path,
    command_line: &str,
) -> Result<RunResult, CliError> {
    let (file, scenario) = load(scenario_path, overrides)?;
    let result = run(&scenario).map_err(|e| CliError::Schema(e.to_string()))?;
    fs::create_dir_all(out_dir)?;
    output::write_text(&out_dir.join("events.csv"), &output::events_csv(&result))?;
    output::write_text(
        &out_dir.join("messages.csv"),
        &output::messages_csv(&result.message_log),
    )?;
    output::write_text(&out_dir.join("metrics.csv"), &output::metrics_csv(&result))?;
    output::write_text(
        &out_dir.join("cp_matrix.csv"),
        &output::cp_matrix_csv(&result),
    )?;
    output::write_text(
        &out_dir.join("summary.txt"),
        &output::summary_text(&result, scenario_path, command_line, file.mobility.tick),
    )?;
    Ok(result)
}

/// `compare`: record one trace per node count, replay it under every
/// requested scheme, and emit the joint metrics CSV. When pnc is among the
/// schemes the ratio column is filled against it.
pub fn cmd_compare(
    scenario_path: &Path,
    schemes: &[SchemeKind],
    mns_list: Option<&[u32]>,
    overrides: &Overrides,
    out_dir: &Path,
) -> Result<Vec<RunResult>, CliError> {
    if schemes.len() < 2 {
        return Err(CliError::Schema(
            "compare needs at least two schemes".into(),
        ));
    }
    let (file, base) = load(scenario_path, overrides)?;
    let counts: Vec<u32> = match mns_list {
        Some(list) if !list.is_empty() => list.to_vec(),
        _ => vec![file.mns],
    };

    let mut csv = String::from(output::METRICS_HEADER);
    csv.push('\n');
    let mut all_results = Vec::new();
    for &count in &counts {
        let mut scenario = base.clone();
        scenario.n_mobile_nodes = count;
        let trace = generate_trace(&scenario).map_err(|e| CliError::Schema(e.to_string()))?;
        let mut results: Vec<RunResult> = Vec::new();
        for scheme in schemes {
            let r = replay(&scenario, &trace, scheme.clone())
                .map_err(|e| CliError::Schema(e.to_string()))?;
            results.push(r);
        }
        let pnc = results
            .iter()
            .find(|r| r.scheme == SchemeKind::Pnc)
            .cloned();
        for r in &mut results {
            if let Some(pnc) = &pnc {
                r.summary.cost_ratio_vs_pnc = cost_ratio(&r.summary, &pnc.summary).ok();
            }
        }
        for r in &results {
            output::metrics_rows(&mut csv, r, pnc.as_ref());
        }
        all_results.extend(results);
    }
    fs::create_dir_all(out_dir)?;
    output::write_text(&out_dir.join("compare.csv"), &csv)?;
    Ok(all_results)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphChoice {
    Neighbor,
    Overlap,
    Nong,
}

impl GraphChoice {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "neighbor" => Ok(GraphChoice::Neighbor),
            "overlap" => Ok(GraphChoice::Overlap),
            "nong" => Ok(GraphChoice::Nong),
            other => Err(CliError::Schema(format!(
                "unknown graph `{other}` (expected neighbor, overlap, or nong)"
            ))),
        }
    }

    pub fn file_name(&self) -> &'static str {
        match self {
            GraphChoice::Neighbor => "neighbor.edges",
            GraphChoice::Overlap => "overlap.edges",
            GraphChoice::Nong => "nong.edges",
        }
    }
}

/// `graph`: dump one of the three graphs as a sorted edge list. The
/// neighbor graph (and the intersection-mode NONG built on it) needs a
/// recorded trace.
pub fn cmd_graph(
    scenario_path: &Path,
    which: GraphChoice,
    trace_path: Option<&Path>,
    overrides: &Overrides,
    out_dir: &Path,
) -> Result<PathBuf, CliError> {
    let (_, scenario) = load(scenario_path, overrides)?;
    let learn_from_trace = |path: &Path| -> Result<_, CliError> {
        let pairs = read_reassociations(path)?;
        learn_neighbor_graph(&scenario.topology, pairs.iter().map(|(a, b)| (a, b)))
            .map_err(|e| CliError::Schema(e.to_string()))
    };
    let graph = match which {
        GraphChoice::Overlap => build_overlap_graph(&scenario.topology),
        GraphChoice::Neighbor => {
            let Some(path) = trace_path else {
                return Err(CliError::Schema(
                    "the neighbor graph needs --trace <events.csv> from a prior run".into(),
                ));
            };
            learn_from_trace(path)?
        }
        GraphChoice::Nong => {
            let overlap = build_overlap_graph(&scenario.topology);
            let mode = match &scenario.scheme {
                SchemeKind::Nacs { mode } => *mode,
                _ => NongMode::Complement,
            };
            match mode {
                NongMode::Complement => {
                    build_nong(&overlap, None).map_err(|e| CliError::Schema(e.to_string()))?
                }
                NongMode::Intersection => {
                    let Some(path) = trace_path else {
                        return Err(CliError::Schema(
                            "the intersection-mode NONG needs --trace <events.csv> from a prior run"
                                .into(),
                        ));
                    };
                    let neighbor = learn_from_trace(path)?;
                    build_nong(&overlap, Some(&neighbor))
                        .map_err(|e| CliError::Schema(e.to_string()))?
                }
            }
        }
    };
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join(which.file_name());
    output::write_text(&path, &graph.to_edge_list())?;
    Ok(path)
}

/// `sweep`: one full run per node count, all rows in one CSV.
pub fn cmd_sweep(
    scenario_path: &Path,
    mns_list: &[u32],
    overrides: &Overrides,
    out_dir: &Path,
) -> Result<Vec<RunResult>, CliError> {
    if mns_list.is_empty() {
        return Err(CliError::Schema(
            "sweep needs --mns with at least one count".into(),
        ));
    }
    let (_, base) = load(scenario_path, overrides)?;
    let mut csv = String::from(output::METRICS_HEADER);
    csv.push('\n');
    let mut results = Vec::new();
    for &count in mns_list {
        let mut scenario = base.clone();
        scenario.n_mobile_nodes = count;
        let r = run(&scenario).map_err(|e| CliError::Schema(e.to_string()))?;
        output::metrics_rows(&mut csv, &r, None);
        results.push(r);
    }
    fs::create_dir_all(out_dir)?;
    output::write_text(&out_dir.join("sweep.csv"), &csv)?;
    Ok(results)
}

/// Pulls the (old, new) re-association pairs out of an events CSV.
pub fn read_reassociations(path: &Path) -> Result<Vec<(ApId, ApId)>, CliError> {
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if n == 0 {
            if line != output::EVENTS_HEADER {
                return Err(CliError::Schema(format!(
                    "{}: not an events CSV (unexpected header)",
                    path.display()
                )));
            }
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 5 {
            return Err(CliError::Schema(format!(
                "{}: line {} has {} columns, expected 5",
                path.display(),
                n + 1,
                cols.len()
            )));
        }
        if cols[2] == "reassociate" {
            out.push((ApId::new(cols[3]), ApId::new(cols[4])));
        }
    }
    Ok(out)
}

/// Parses the `--mns 5,10,20,40` list syntax.
pub fn parse_mns_list(s: &str) -> Result<Vec<u32>, CliError> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<u32>()
                .map_err(|_| CliError::Schema(format!("bad node count `{p}` in --mns")))
        })
        .collect()
}
