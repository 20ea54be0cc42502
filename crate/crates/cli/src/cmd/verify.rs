use std::f64::consts::PI;
use std::path::PathBuf;

use serde::Deserialize;
use serde_json::json;
use stabmetro::dense::{
    corollary_protocol, ghz, saturation_report, theorem_check, Collective, LocalModel, Mat2,
};
use stabmetro::graph::GraphFile;
use stabmetro::qfi_formula::{protocol1_model, search_optimal_alpha, SearchOptions};
use stabmetro::{LabeledGraph, MetroError, PauliLetter, PauliString, VertexSet};

use crate::input::{parse_alpha, read, GraphSource};
use crate::output::{num, Report, Table};
use crate::{CliError, CliResult, GlobalOpts};

#[derive(clap::Args, Debug)]
pub struct Args {
    #[command(flatten)]
    pub source: GraphSource,
    /// Model file: {"graph": {...}, "alpha": [...], "measurement": "ZXY..."}.
    #[arg(long, conflicts_with_all = ["input", "preset", "graph", "ghz"])]
    pub model: Option<PathBuf>,
    /// GHZ probe on N qubits with the protocol built from Z on every qubit.
    #[arg(long, conflicts_with_all = ["input", "preset", "graph"])]
    pub ghz: Option<usize>,
    /// α for graph probes; the best α is searched for when omitted.
    #[arg(long)]
    pub alpha: Option<String>,
    /// Replace the measurement letters, one per qubit (e.g. "XZZY").
    #[arg(long)]
    pub measurement: Option<String>,
    /// Comma-separated phases; defaults to 0, 0.3, π/2, 1.7.
    #[arg(long, value_delimiter = ',')]
    pub theta: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    graph: GraphFile,
    #[serde(default)]
    alpha: Option<Vec<serde_json::Value>>,
    #[serde(default)]
    measurement: Option<String>,
}

fn parse_letters(text: &str, n: usize) -> CliResult<Vec<PauliLetter>> {
    let letters: Vec<PauliLetter> = text
        .chars()
        .map(|c| PauliLetter::from_char(c).ok_or_else(|| CliError::Input(format!("'{c}' is not a Pauli letter"))))
        .collect::<CliResult<_>>()?;
    if letters.len() != n {
        return Err(MetroError::SizeMismatch { expected: n, found: letters.len() }.into());
    }
    Ok(letters)
}

fn graph_model(
    lg: &LabeledGraph,
    alpha: Option<VertexSet>,
    g: &GlobalOpts,
) -> CliResult<(LocalModel, PauliString, String)> {
    let alpha = match alpha {
        Some(a) => a,
        None => search_optimal_alpha(&lg.graph, &SearchOptions { seed: g.seed, ..Default::default() })?.alpha,
    };
    let m = protocol1_model(&lg.graph, &alpha)?;
    let names: Vec<String> = alpha.iter().map(|v| lg.vertex_name(v)).collect();
    Ok((m.to_local_model(g.oracle_limit, 0.0)?, m.stabilizer, format!("graph state, alpha = {{{}}}", names.join(","))))
}

pub fn run(args: &Args, g: &GlobalOpts) -> CliResult<Report> {
    let (mut model, k, label) = if let Some(n) = args.ghz {
        if n > g.oracle_limit {
            return Err(MetroError::SizeLimit { what: "pure-state oracle", n, limit: g.oracle_limit }.into());
        }
        let k = PauliString::uniform(n, &VertexSet::full(n), PauliLetter::Z);
        (corollary_protocol(&k, ghz(n))?, k, format!("GHZ on {n} qubits"))
    } else if let Some(path) = &args.model {
        let file: ModelFile = serde_json::from_str(&read(path)?)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let lg = LabeledGraph::from_file(file.graph)?;
        let alpha = match file.alpha {
            Some(items) => {
                let text: Vec<String> = items
                    .iter()
                    .map(|v| v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string()))
                    .collect();
                Some(parse_alpha(&lg, &text.join(","))?)
            }
            None => None,
        };
        let (mut model, k, label) = graph_model(&lg, alpha, g)?;
        if let Some(text) = &file.measurement {
            model.measurement = parse_letters(text, model.n())?.into_iter().map(Mat2::pauli).collect();
        }
        (model, k, label)
    } else if args.source.given() {
        let lg = args.source.load()?;
        let alpha = args.alpha.as_deref().map(|t| parse_alpha(&lg, t)).transpose()?;
        graph_model(&lg, alpha, g)?
    } else {
        return Err(CliError::Input("no probe given; use --input, --preset, --graph, --model or --ghz".into()));
    };
    if let Some(text) = &args.measurement {
        model.measurement = parse_letters(text, model.n())?.into_iter().map(Mat2::pauli).collect();
    }

    let thetas = if args.theta.is_empty() { vec![0.0, 0.3, PI / 2.0, 1.7] } else { args.theta.clone() };
    let collective = Collective::Pauli(k);
    let mut conditions = [true; 4];
    for &t in &thetas {
        let r = theorem_check(&model.at_theta(t), &collective)?;
        for (c, v) in conditions.iter_mut().zip([
            r.stabilizes,
            r.measurement_anticommutes_h,
            r.measurement_commutes_k,
            r.k_anticommutes_h,
        ]) {
            *c &= v;
        }
    }
    let rep = saturation_report(&model, &thetas)?;

    let json = json!({
        "probe": label,
        "rows": rep.rows,
        "max_gap": rep.max_gap,
        "saturated": rep.saturated,
        "conditions": {
            "stabilizes": conditions[0],
            "measurement_anticommutes_h": conditions[1],
            "measurement_commutes_k": conditions[2],
            "k_anticommutes_h": conditions[3],
        },
    });
    let mut table = Table::new(["theta", "qfi", "cfi", "gap", "flagged"]);
    for r in &rep.rows {
        table.push(vec![num(r.theta), num(r.qfi), num(r.cfi), num(r.gap), r.flagged.to_string()]);
    }
    let mut failures = Vec::new();
    if !rep.saturated {
        failures.push(format!("QFI−CFI gap up to {:.3e}", rep.max_gap));
    }
    let names = ["stabilizes", "measurement_anticommutes_h", "measurement_commutes_k", "k_anticommutes_h"];
    for (ok, name) in conditions.iter().zip(names) {
        if !ok {
            failures.push(format!("condition {name} is false"));
        }
    }
    let mut report = Report::ok(json, table);
    if !failures.is_empty() {
        report.failure = Some(failures.join("; "));
    }
    Ok(report)
}
