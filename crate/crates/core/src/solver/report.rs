use std::fmt::Write as _;

use serde_json::{json, Value};

use super::{SolveReport, Witness};
use crate::clause::{canonicalize, Symbols};
use crate::lang::LangStore;
use crate::rewrite::Step;

fn witness_lines(w: &Witness, store: &LangStore, names: &Symbols) -> Vec<String> {
    let mut lines = Vec::new();
    for (&(from, f), &to) in &w.graph.edges {
        lines.push(format!("n{from} {} n{to}", store.alphabet().name(f)));
    }
    for (&n, &a) in &w.graph.sorts {
        lines.push(format!("{}(n{n})", names.sort(a)));
    }
    for (&x, &n) in &w.anchors {
        lines.push(format!("{} = n{n}", names.fo(x)));
    }
    for (&v, word) in &w.words {
        let word = if word.is_empty() {
            "ε".to_string()
        } else {
            store.word_to_string(word)
        };
        lines.push(format!("{} = {word}", names.path(v)));
    }
    lines
}

pub fn render_text(report: &SolveReport, store: &LangStore, names: &Symbols) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "status: {}", report.status.name());
    let _ = writeln!(out, "control: {}", report.control.name());
    for (i, c) in report.clauses.iter().enumerate() {
        let _ = writeln!(out, "clause {i}:");
        for line in c.render(store, names).lines() {
            let _ = writeln!(out, "  {line}");
        }
    }
    for (i, w) in report.witnesses.iter().enumerate() {
        let _ = writeln!(out, "witness {i} ({} nodes):", w.graph.nodes);
        for line in witness_lines(w, store, names) {
            let _ = writeln!(out, "  {line}");
        }
    }
    for d in &report.diagnostics {
        let _ = writeln!(out, "note: {d}");
    }
    let s = &report.stats;
    let _ = writeln!(
        out,
        "steps: {} ({} simplification), nodes: {}, remembered: {}, revisits pruned: {}",
        s.steps, s.simpl_steps, s.nodes, s.visited, s.pruned_revisits
    );
    out
}

/// One JSON object per line: status, clauses, witnesses, diagnostics, stats.
pub fn render_records(report: &SolveReport, store: &LangStore, names: &Symbols) -> String {
    let mut records = vec![json!({
        "kind": "status",
        "status": report.status,
        "control": report.control.name(),
    })];
    for (i, c) in report.clauses.iter().enumerate() {
        let constraints: Vec<String> = if c.is_bottom() {
            vec!["⊥".to_string()]
        } else {
            c.render(store, names).lines().map(str::to_string).collect()
        };
        records.push(json!({ "kind": "clause", "index": i, "constraints": constraints }));
    }
    for (i, w) in report.witnesses.iter().enumerate() {
        records.push(json!({
            "kind": "witness",
            "index": i,
            "nodes": w.graph.nodes,
            "facts": witness_lines(w, store, names),
        }));
    }
    for d in &report.diagnostics {
        records.push(json!({ "kind": "diagnostic", "message": d }));
    }
    let mut stats = serde_json::to_value(&report.stats).unwrap_or(Value::Null);
    if let Value::Object(map) = &mut stats {
        map.insert("kind".into(), json!("stats"));
    }
    records.push(stats);
    let mut out = String::new();
    for r in records {
        let _ = writeln!(out, "{r}");
    }
    out
}

/// A JSON record for one derivation step.
pub fn trace_record(step: &Step, store: &LangStore, names: &Symbols) -> Value {
    let branches: Vec<Value> = step
        .successors
        .iter()
        .map(|(node, s)| {
            json!({
                "node": node,
                "rule": s.rule.name(),
                "cycle": s.cycle,
                "clause": canonicalize(&s.clause),
            })
        })
        .collect();
    json!({
        "node": step.node,
        "parent": step.parent,
        "rule": step.instance.rule.name(),
        "before": step.before.render(store, names).lines().collect::<Vec<_>>(),
        "branches": branches,
    })
}
