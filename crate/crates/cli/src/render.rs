use std::fmt::Write as _;

use clap::ValueEnum;
use confspace::lie::Variant;
use confspace::model::preset_catalogue;
use confspace::oracle::OracleOutcome;
use confspace::stability::{DegreeVerdict, Expectation, StabilityReport, Verdict};
use serde::Serialize;
use serde_json::json;

use crate::cache::Row;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug)]
pub struct BettiOptions {
    pub dense: bool,
    pub raw_degrees: bool,
}

#[derive(Debug, Serialize)]
struct BettiEntry {
    k: usize,
    degree: usize,
    dimension: usize,
}

fn csv_text(header: &[&str], records: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in records {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv of utf-8 fields")
}

fn json_text(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable");
    s.push('\n');
    s
}

/// Right-aligned columns under a header.
fn aligned(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let line = |cells: &[&str], out: &mut String| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}", w = *w))
            .collect();
        out.push_str(parts.join("  ").trim_end());
        out.push('\n');
    };
    line(header, &mut out);
    for r in rows {
        let cells: Vec<&str> = r.iter().map(String::as_str).collect();
        line(&cells, &mut out);
    }
    out
}

fn betti_entries(rows: &[Row], offset: usize, opts: BettiOptions) -> Vec<BettiEntry> {
    let mut out = Vec::new();
    for row in rows {
        let shift = if opts.raw_degrees { 0 } else { row.k * offset };
        if opts.dense {
            let Some(top) = row.top else { continue };
            for raw in shift..=top {
                out.push(BettiEntry {
                    k: row.k,
                    degree: raw - shift,
                    dimension: row.raw.get(&raw).copied().unwrap_or(0),
                });
            }
        } else {
            out.extend(row.raw.iter().map(|(&raw, &b)| BettiEntry {
                k: row.k,
                degree: raw - shift,
                dimension: b,
            }));
        }
    }
    out
}

pub fn betti(name: &str, variant: Variant, offset: usize, rows: &[Row], opts: BettiOptions, format: Format) -> String {
    let entries = betti_entries(rows, offset, opts);
    let cells = || entries.iter().map(|e| vec![e.k.to_string(), e.degree.to_string(), e.dimension.to_string()]);
    let degrees = if opts.raw_degrees { "ce" } else { "space" };
    match format {
        Format::Table => {
            let body: Vec<Vec<String>> = cells().collect();
            format!("# {name}, {variant}, {degrees} degrees\n{}", aligned(&["k", "degree", "dimension"], &body))
        }
        Format::Csv => csv_text(&["k", "degree", "dimension"], cells()),
        Format::Json => json_text(&json!({
            "manifold": name,
            "variant": variant.to_string(),
            "degrees": degrees,
            "dense": opts.dense,
            "rows": entries,
        })),
    }
}

fn expectation(e: Expectation) -> &'static str {
    match e {
        Expectation::Iso => "iso",
        Expectation::Surjective => "onto",
        Expectation::Unconstrained => "-",
    }
}

fn yes(b: bool) -> String {
    if b { "yes" } else { "no" }.to_string()
}

fn verdict_cells(v: &DegreeVerdict) -> Vec<String> {
    vec![
        v.k.to_string(),
        v.degree.to_string(),
        v.source_dim.to_string(),
        v.target_dim.to_string(),
        v.rank.to_string(),
        yes(v.induced_map_iso),
        yes(v.induced_map_surjective),
        expectation(v.expected).to_string(),
    ]
}

pub fn stability(name: &str, report: &StabilityReport, format: Format) -> String {
    match format {
        Format::Json => json_text(&json!({ "manifold": name, "report": report })),
        Format::Csv => csv_text(
            &["k", "degree", "source_dim", "target_dim", "rank", "iso", "surjective", "expected"],
            report.entries.iter().map(verdict_cells),
        ),
        Format::Table => {
            let mut out = String::new();
            let verdict = match report.verdict {
                Verdict::Pass => "pass",
                Verdict::Fail => "FAIL",
            };
            let _ = writeln!(out, "manifold  {name}");
            let _ = writeln!(out, "map       H_*(B_k+1) -> H_*(B_k), k = 0..{}", report.k_range.len() - 1);
            let _ = writeln!(out, "range     {}", report.predicted);
            let _ = writeln!(out, "verdict   {verdict}");
            if let Some(c) = &report.counterexample {
                let _ = writeln!(
                    out,
                    "first counterexample: k={} degree={} ({} -> {}, rank {}, expected {})",
                    c.k,
                    c.degree,
                    c.source_dim,
                    c.target_dim,
                    c.rank,
                    expectation(c.expected)
                );
            }
            if !report.chain_level_surjective {
                let _ = writeln!(out, "chain-level cap map is not surjective");
            }
            if !report.sharp_at.is_empty() {
                let at: Vec<String> = report.sharp_at.iter().map(|(k, d)| format!("k={k} degree={d}")).collect();
                let _ = writeln!(out, "sharp     onto but not iso at {}", at.join(", "));
            }
            let improved = &report.improved;
            let slope = match improved.slope {
                None => "every degree".to_string(),
                Some((1, 1)) => "iso below k+1".to_string(),
                Some((num, 1)) => format!("iso below {num}(k+1)"),
                Some((num, den)) => format!("iso below ceil({num}(k+1)/{den})"),
            };
            let _ = writeln!(
                out,
                "improved  {slope}; {}{}",
                if improved.holds { "holds" } else { "FAILS" },
                if improved.improves { ", wider than the theorem" } else { "" }
            );
            let body: Vec<Vec<String>> = report.entries.iter().map(verdict_cells).collect();
            out.push_str(&aligned(
                &["k", "degree", "source", "target", "rank", "iso", "onto", "expected"],
                &body,
            ));
            out
        }
    }
}

pub fn check(outcomes: &[OracleOutcome], format: Format) -> String {
    match format {
        Format::Json => json_text(&outcomes),
        Format::Csv => csv_text(
            &["name", "inputs", "pipeline_value", "oracle_value", "agree"],
            outcomes.iter().map(|o| {
                vec![
                    o.name.clone(),
                    o.inputs.clone(),
                    o.pipeline_value.to_string(),
                    o.oracle_value.to_string(),
                    o.agree.to_string(),
                ]
            }),
        ),
        Format::Table => {
            let mut out = String::new();
            for o in outcomes {
                let status = if o.agree { "agree" } else { "DIFFER" };
                let _ = writeln!(out, "{status:<6}  {:<28}  {}", o.name, o.inputs);
                if !o.agree {
                    let _ = writeln!(out, "        pipeline {}", o.pipeline_value);
                    let _ = writeln!(out, "        oracle   {}", o.oracle_value);
                }
            }
            let bad = outcomes.iter().filter(|o| !o.agree).count();
            let _ = writeln!(out, "{} outcomes, {bad} disagreements", outcomes.len());
            out
        }
    }
}

#[derive(Serialize)]
struct PresetEntry {
    name: &'static str,
    params: &'static [&'static str],
    summary: &'static str,
    reproduces: &'static str,
}

pub fn presets(filter: Option<&str>, format: Format) -> String {
    let entries: Vec<PresetEntry> = preset_catalogue()
        .iter()
        .filter(|p| filter.is_none_or(|f| p.name.contains(f)))
        .map(|p| PresetEntry {
            name: p.name,
            params: p.params,
            summary: p.summary,
            reproduces: p.reproduces,
        })
        .collect();
    let cells = || {
        entries
            .iter()
            .map(|p| vec![p.name.to_string(), p.params.join(","), p.summary.to_string(), p.reproduces.to_string()])
    };
    match format {
        Format::Json => json_text(&entries),
        Format::Csv => csv_text(&["name", "params", "summary", "reproduces"], cells()),
        Format::Table => {
            let mut out = String::new();
            for c in cells() {
                let params = if c[1].is_empty() { String::new() } else { format!("({})", c[1]) };
                let _ = writeln!(out, "{:<28}  {}", format!("{}{params}", c[0]), c[2]);
                let _ = writeln!(out, "{:<28}  reproduces: {}", "", c[3]);
            }
            out
        }
    }
}
