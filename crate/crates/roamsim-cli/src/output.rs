//! CSV and summary writers.
//!
//! All outputs are UTF-8 with LF line endings and a fixed column order, so
//! identical runs produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use roamsim_core::{cp_matrix, EventKind, MetricsLedger, MetricsSummary, RunResult, SentMessage};

use crate::CliError;

pub const EVENTS_HEADER: &str = "tick,mn_id,event,old_ap,new_ap";
pub const MESSAGES_HEADER: &str = "tick,kind,from_ap,to_ap,mn_id,cost";
pub const METRICS_HEADER: &str =
    "slot,scheme,n_mns,seed,c_hit,c_try,chp,proactive_cost,reactive_cost,total_cost,cost_ratio_vs_pnc";
pub const CP_MATRIX_HEADER: &str = "from_ap,to_ap,deliveries,frequency";

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, text)?;
    Ok(())
}

pub fn events_csv(result: &RunResult) -> String {
    let mut out = String::from(EVENTS_HEADER);
    out.push('\n');
    for ev in &result.trace.events {
        let (old_ap, new_ap) = match &ev.kind {
            EventKind::Associate { ap } => (String::new(), ap.to_string()),
            EventKind::Reassociate { old, new } => (old.to_string(), new.to_string()),
            EventKind::Disassociate { old } => (old.to_string(), String::new()),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            ev.tick,
            ev.mn,
            ev.kind.name(),
            old_ap,
            new_ap
        );
    }
    out
}

pub fn messages_csv(log: &[SentMessage]) -> String {
    let mut out = String::from(MESSAGES_HEADER);
    out.push('\n');
    for s in log {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            s.msg.sent_at, s.msg.kind, s.msg.from_ap, s.msg.to_ap, s.msg.mn_id, s.cost
        );
    }
    out
}

/// Per-slot rows followed by one `total` row. The ratio column is filled by
/// same-trace comparisons; it stays empty when no pnc baseline exists.
pub fn metrics_rows(out: &mut String, result: &RunResult, baseline: Option<&RunResult>) {
    let scheme = result.scheme.to_string();
    let n_mns = result.trace.n_mobile_nodes;
    let seed = result.trace.seed;
    let slot_ratio = |ledger: &MetricsLedger, idx: usize| -> String {
        match baseline {
            Some(pnc) => {
                let denom = pnc.ledger.per_slot.get(idx).map(|s| s.proactive_cost);
                match denom {
                    Some(d) if d > 0.0 => fmt_f64(ledger.per_slot[idx].proactive_cost / d),
                    _ => String::new(),
                }
            }
            None => String::new(),
        }
    };
    for (idx, slot) in result.ledger.per_slot.iter().enumerate() {
        let chp = if slot.c_try == 0 {
            0.0
        } else {
            slot.c_hit as f64 / slot.c_try as f64
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            slot.slot,
            scheme,
            n_mns,
            seed,
            slot.c_hit,
            slot.c_try,
            fmt_f64(chp),
            fmt_f64(slot.proactive_cost),
            fmt_f64(slot.reactive_cost),
            fmt_f64(slot.total_cost),
            slot_ratio(&result.ledger, idx),
        );
    }
    let total_ratio = match &result.summary.cost_ratio_vs_pnc {
        Some(r) => fmt_f64(*r),
        None => String::new(),
    };
    let _ = writeln!(
        out,
        "total,{},{},{},{},{},{},{},{},{},{}",
        scheme,
        n_mns,
        seed,
        result.ledger.c_hit,
        result.ledger.c_try,
        fmt_f64(result.summary.chp),
        fmt_f64(result.summary.proactive_cost),
        fmt_f64(result.summary.reactive_cost),
        fmt_f64(result.summary.total_cost),
        total_ratio,
    );
}

pub fn metrics_csv(result: &RunResult) -> String {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    metrics_rows(&mut out, result, None);
    out
}

pub fn cp_matrix_csv(result: &RunResult) -> String {
    let m = cp_matrix(&result.message_log);
    let total: u64 = m.values().sum();
    let mut out = String::from(CP_MATRIX_HEADER);
    out.push('\n');
    for ((from, to), n) in &m {
        let freq = if total == 0 {
            0.0
        } else {
            *n as f64 / total as f64
        };
        let _ = writeln!(out, "{from},{to},{n},{}", fmt_f64(freq));
    }
    out
}

/// The human-readable run record. Embeds everything needed to reproduce the
/// run: scenario path, seed, and the exact command line.
pub fn summary_text(
    result: &RunResult,
    scenario_path: &Path,
    command_line: &str,
    tick_seconds: f64,
) -> String {
    let mut out = String::new();
    let ev = &result.trace.events;
    let count = |pred: fn(&EventKind) -> bool| ev.iter().filter(|e| pred(&e.kind)).count();
    let _ = writeln!(out, "scenario: {}", scenario_path.display());
    let _ = writeln!(out, "command: {command_line}");
    let _ = writeln!(out, "seed: {}", result.trace.seed);
    let _ = writeln!(out, "scheme: {}", result.scheme);
    let _ = writeln!(out, "mobile_nodes: {}", result.trace.n_mobile_nodes);
    let _ = writeln!(out, "duration_ticks: {}", result.trace.duration);
    let _ = writeln!(out, "tick_seconds: {}", fmt_f64(tick_seconds));
    let _ = writeln!(
        out,
        "events: {} (associate {}, reassociate {}, disassociate {})",
        ev.len(),
        count(|k| matches!(k, EventKind::Associate { .. })),
        count(|k| matches!(k, EventKind::Reassociate { .. })),
        count(|k| matches!(k, EventKind::Disassociate { .. })),
    );
    let _ = writeln!(out, "messages: {}", result.message_log.len());
    let _ = writeln!(out, "c_hit: {}", result.ledger.c_hit);
    let _ = writeln!(out, "c_try: {}", result.ledger.c_try);
    let _ = writeln!(out, "chp: {}", fmt_f64(result.summary.chp));
    let _ = writeln!(out, "full_misses: {}", result.full_misses);
    let _ = writeln!(
        out,
        "proactive_cost: {}",
        fmt_f64(result.summary.proactive_cost)
    );
    let _ = writeln!(
        out,
        "reactive_cost: {}",
        fmt_f64(result.summary.reactive_cost)
    );
    let _ = writeln!(
        out,
        "invalidate_cost: {}",
        fmt_f64(result.summary.invalidate_cost)
    );
    let _ = writeln!(out, "total_cost: {}", fmt_f64(result.summary.total_cost));
    if let Some(r) = result.summary.cost_ratio_vs_pnc {
        let _ = writeln!(out, "cost_ratio_vs_pnc: {}", fmt_f64(r));
    }
    out
}

/// Shortest round-trip float formatting; integers print without a dot.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

pub fn summary_of(s: &MetricsSummary) -> String {
    format!(
        "chp={} proactive={} reactive={} total={}",
        fmt_f64(s.chp),
        fmt_f64(s.proactive_cost),
        fmt_f64(s.reactive_cost),
        fmt_f64(s.total_cost)
    )
}
