//! Report rendering: human-readable tables plus a machine-readable JSON
//! section with stable field order. Everything here is a pure function of
//! its inputs, which is what makes `search` runs byte-identical.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use herm_core::adequacy::AdequacyScore;
use herm_core::argnet::NetworkReport;
use herm_core::correctness::CorrectnessReport;
use herm_core::engine::{RunOutcome, StepRecord};
use herm_core::reasoner::ReasonerStats;
use herm_core::{SatVerdict, Verdict};

pub const MACHINE_MARKER: &str = "--- machine ---";

pub fn fmt_f(x: f64) -> String {
    if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else if x == f64::INFINITY {
        "inf".to_string()
    } else {
        format!("{x:.4}")
    }
}

pub fn json_f(x: f64) -> Value {
    if x.is_finite() {
        // round through the printed form so the JSON section is stable
        json!(format!("{x:.4}").parse::<f64>().unwrap())
    } else {
        json!(fmt_f(x))
    }
}

pub fn verdict_cert(v: &Verdict) -> String {
    match v {
        Verdict::Valid(p) => p.id(),
        Verdict::Invalid(m) => m.id(),
        Verdict::Unknown(r) => format!("({r})"),
    }
}

pub fn sat_cert(v: &SatVerdict) -> String {
    match v {
        SatVerdict::Sat(m) => m.id(),
        SatVerdict::Unsat(p) => p.id(),
        SatVerdict::Unknown(r) => format!("({r})"),
    }
}

pub fn render_correctness(out: &mut String, r: &CorrectnessReport, logic: &str) {
    out.push_str(&format!("argument {} [{}]\n", r.argument_id, logic));
    out.push_str(&format!(
        "  validity     {:<8} {}\n",
        r.validity.short(),
        verdict_cert(&r.validity)
    ));
    out.push_str(&format!(
        "  consistency  {:<8} {}\n",
        r.consistency.short(),
        sat_cert(&r.consistency)
    ));
    let circ = match (&r.circular, &r.circular_premise) {
        (c, Some(p)) => format!("{c} (premise {p})"),
        (c, None) => c.to_string(),
    };
    out.push_str(&format!("  circular     {circ}\n"));
    let idle = if r.idle_premises.is_empty() && r.idle_unknowns.is_empty() {
        "-".to_string()
    } else {
        let mut parts: Vec<String> = r.idle_premises.iter().cloned().collect();
        parts.extend(r.idle_unknowns.iter().map(|l| format!("{l}?")));
        parts.join(", ")
    };
    out.push_str(&format!("  idle         {idle}\n"));
    out.push_str(&format!("  overall      {}\n", r.overall));
}

pub fn correctness_json(r: &CorrectnessReport) -> Value {
    json!({
        "argument": r.argument_id,
        "validity": r.validity.short(),
        "validity_cert": verdict_cert(&r.validity),
        "consistency": r.consistency.short(),
        "consistency_cert": sat_cert(&r.consistency),
        "circular": r.circular.to_string(),
        "circular_premise": r.circular_premise,
        "idle": r.idle_premises.iter().collect::<Vec<_>>(),
        "idle_unknown": r.idle_unknowns.iter().collect::<Vec<_>>(),
        "overall": r.overall.to_string(),
    })
}

pub fn render_adequacy_row(
    out: &mut String,
    candidate: &str,
    selected: bool,
    score: &AdequacyScore,
) {
    let marker = if selected { "*" } else { " " };
    out.push_str(&format!(
        " {marker} {:<40} {:<8} {:>6} {:>6} {:>10}\n",
        truncate(candidate, 40),
        score.reliable.to_string(),
        fmt_f(score.ambitiousness),
        score.simplicity,
        fmt_f(score.aggregate),
    ));
}

fn truncate(s: &str, n: usize) -> String {
    if s.len() <= n {
        s.to_string()
    } else {
        format!("{}...", &s[..n.saturating_sub(3)])
    }
}

pub fn adequacy_json(candidate: &str, selected: bool, score: &AdequacyScore) -> Value {
    json!({
        "candidate": candidate,
        "selected": selected,
        "reliable": score.reliable.to_string(),
        "ambitiousness": json_f(score.ambitiousness),
        "validated": score.validated,
        "relevant_correct": score.relevant_correct,
        "simplicity": score.simplicity,
        "aggregate": json_f(score.aggregate),
    })
}

pub fn render_network(out: &mut String, r: &NetworkReport) {
    out.push_str(&format!("role fulfillment: {}", fmt_f(r.score)));
    if r.vacuous {
        out.push_str(" (no intended edges)");
    }
    out.push('\n');
    out.push_str("intended edges:\n");
    for e in &r.intended {
        let mechs = if e.mechanisms.is_empty() {
            "-".to_string()
        } else {
            e.mechanisms
                .iter()
                .map(|m| m.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        out.push_str(&format!(
            "  {} -{}-> {}  {}  [{mechs}]\n",
            e.from,
            e.polarity,
            e.to,
            if e.realized { "realized" } else { "unrealized" },
        ));
    }
    if r.spurious.is_empty() {
        out.push_str("spurious relations: none\n");
    } else {
        out.push_str("spurious relations:\n");
        for s in &r.spurious {
            let target = s.target.as_deref().unwrap_or("-");
            out.push_str(&format!(
                "  {} -{}-> {}  {} (target {target})\n",
                s.from, s.polarity, s.to, s.mechanism
            ));
        }
    }
    out.push_str(&format!(
        "grounded extension: {}\n",
        if r.grounded_extension.is_empty() {
            "{}".to_string()
        } else {
            format!("{{{}}}", r.grounded_extension.join(", "))
        }
    ));
    for (i, ext) in r.preferred_extensions.iter().enumerate() {
        out.push_str(&format!("preferred[{i}]: {{{}}}\n", ext.join(", ")));
    }
}

pub fn network_json(r: &NetworkReport) -> Value {
    json!({
        "score": json_f(r.score),
        "vacuous": r.vacuous,
        "intended": r.intended.iter().map(|e| json!({
            "from": e.from,
            "to": e.to,
            "polarity": e.polarity.to_string(),
            "realized": e.realized,
            "mechanisms": e.mechanisms.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "spurious": r.spurious.iter().map(|s| json!({
            "from": s.from,
            "to": s.to,
            "polarity": s.polarity.to_string(),
            "mechanism": s.mechanism.to_string(),
            "target": s.target,
        })).collect::<Vec<_>>(),
        "grounded": r.grounded_extension,
        "preferred": r.preferred_extensions,
    })
}

/// Realized attack/support graph in DOT format.
pub fn network_dot(r: &NetworkReport, nodes: &[String]) -> String {
    let mut out = String::from("digraph argnet {\n");
    for n in nodes {
        out.push_str(&format!("  \"{n}\";\n"));
    }
    for e in &r.intended {
        let style = if e.realized { "solid" } else { "dashed" };
        let color = match e.polarity {
            herm_core::argnet::Polarity::Attack => "red",
            herm_core::argnet::Polarity::Support => "green",
        };
        out.push_str(&format!(
            "  \"{}\" -> \"{}\" [color={color}, style={style}, label=\"{}\"];\n",
            e.from, e.to, e.polarity
        ));
    }
    for s in &r.spurious {
        let color = match s.polarity {
            herm_core::argnet::Polarity::Attack => "red",
            herm_core::argnet::Polarity::Support => "green",
        };
        out.push_str(&format!(
            "  \"{}\" -> \"{}\" [color={color}, style=dotted, label=\"spurious {}\"];\n",
            s.from, s.to, s.mechanism
        ));
    }
    out.push_str("}\n");
    out
}

pub fn trace_line(rec: &StepRecord) -> String {
    format!(
        "iter={} temp={} move={} delta={} accepted={} objective={} best={}",
        rec.iteration,
        fmt_f(rec.temperature),
        rec.mv
            .as_ref()
            .map(|m| m.to_string())
            .unwrap_or_else(|| "-".to_string()),
        fmt_f(rec.delta),
        rec.accepted,
        fmt_f(rec.objective),
        fmt_f(rec.best),
    )
}

pub fn render_stats(out: &mut String, s: &ReasonerStats) {
    out.push_str(&format!(
        "reasoner: {} queries, {} cache hits, {} unknown\n",
        s.queries, s.cache_hits, s.unknown
    ));
}

pub fn run_outcome_json(o: &RunOutcome, accepted_moves: u64) -> Value {
    let per_arg: BTreeMap<&String, Value> = o
        .best_eval
        .per_argument
        .iter()
        .map(|(k, b)| {
            (
                k,
                json!({
                    "validity": b.validity,
                    "consistency": b.consistency,
                    "circular": b.circular.to_string(),
                    "idle": b.idle.iter().collect::<Vec<_>>(),
                    "overall": b.overall.to_string(),
                    "points": json_f(b.points),
                }),
            )
        })
        .collect();
    let per_sentence: BTreeMap<&String, Value> = o
        .best_eval
        .per_sentence
        .iter()
        .map(|(k, s)| {
            (
                k,
                json!({
                    "reliable": s.reliable.to_string(),
                    "ambitiousness": json_f(s.ambitiousness),
                    "simplicity": s.simplicity,
                    "aggregate": json_f(s.aggregate),
                }),
            )
        })
        .collect();
    json!({
        "termination": o.termination.to_string(),
        "iterations": o.iterations_run,
        "accepted_moves": accepted_moves,
        "best_objective": json_f(o.best_eval.total),
        "structural_max": o.best_eval.structural_max,
        "promoted": o.promoted,
        "arguments": per_arg,
        "sentences": per_sentence,
        "network": o.best_eval.network.as_ref().map(network_json),
        "reasoner": {
            "queries": o.reasoner_stats.queries,
            "cache_hits": o.reasoner_stats.cache_hits,
            "unknown": o.reasoner_stats.unknown,
        },
    })
}

pub fn machine_section(value: &Value) -> String {
    format!(
        "{MACHINE_MARKER}\n{}\n",
        serde_json::to_string_pretty(value).unwrap()
    )
}

pub fn error_section(errors: &[crate::corpus::IntegrityError]) -> String {
    let mut out = String::new();
    out.push_str(&format!("{} error(s):\n", errors.len()));
    for e in errors {
        out.push_str(&format!("  {e}\n"));
    }
    let value = json!({
        "errors": errors.iter().map(|e| json!({
            "location": e.location,
            "message": e.message,
        })).collect::<Vec<_>>(),
    });
    out.push_str(&machine_section(&value));
    out
}
