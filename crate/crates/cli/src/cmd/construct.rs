use std::path::PathBuf;

use serde::Deserialize;
use serde_json::{json, Value};
use stabmetro::constructors::{build, scaling_experiment, MetaGraph, RuleTable, ScalingFamily};
use stabmetro::qfi_formula::{qfi_upper_bound, search_optimal_alpha, SearchMode, SearchOptions};
use stabmetro::LabeledGraph;

use crate::input::read;
use crate::output::{num, Report, Table};
use crate::presets;
use crate::{CliError, CliResult, GlobalOpts};

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Family preset file: a composite {"type": "A"|"B", ...}, or
    /// {"composite": {...}, "scaling": {...}}.
    #[arg(long, conflicts_with = "preset")]
    pub input: Option<PathBuf>,
    /// atype53.
    #[arg(long)]
    pub preset: Option<String>,
    /// Rule table file for B-type composites.
    #[arg(long)]
    pub rules: Option<PathBuf>,
    /// Also write the composite graph JSON here.
    #[arg(long)]
    pub graph_out: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScalingFile {
    family: ScalingFamily,
    n_values: Vec<usize>,
    #[serde(default = "greedy")]
    mode: SearchMode,
}

fn greedy() -> SearchMode {
    SearchMode::Greedy
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstructFile {
    composite: Option<MetaGraph>,
    scaling: Option<ScalingFile>,
}

fn parse(text: &str) -> CliResult<ConstructFile> {
    let bad = |e: serde_json::Error| CliError::Input(format!("family preset: {e}"));
    let value: Value = serde_json::from_str(text).map_err(bad)?;
    if value.get("type").is_some() {
        Ok(ConstructFile { composite: Some(serde_json::from_value(value).map_err(bad)?), scaling: None })
    } else {
        serde_json::from_value(value).map_err(bad)
    }
}

pub fn run(args: &Args, g: &GlobalOpts) -> CliResult<Report> {
    let text = match (&args.input, &args.preset) {
        (Some(path), _) => read(path)?,
        (None, Some(name)) => presets::lookup(presets::CONSTRUCT_PRESETS, name)
            .ok_or_else(|| {
                CliError::Input(format!(
                    "unknown construct preset {name:?}; known: {}",
                    presets::names(presets::CONSTRUCT_PRESETS)
                ))
            })?
            .to_string(),
        (None, None) => return Err(CliError::Input("no family given; use --input or --preset".into())),
    };
    let file = parse(&text)?;
    if file.composite.is_none() && file.scaling.is_none() {
        return Err(CliError::Input("family preset has neither a composite nor a scaling section".into()));
    }
    let rules = match &args.rules {
        Some(path) => serde_json::from_str::<RuleTable>(&read(path)?)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?,
        None => RuleTable::default(),
    };

    let mut json = json!({});
    let mut table = Table::new(["section", "n", "best_qfi", "bound", "alpha_size"]);
    if let Some(meta) = &file.composite {
        let c = build(meta, &rules)?;
        let lg = LabeledGraph::unlabeled(c.graph.clone());
        if let Some(path) = &args.graph_out {
            std::fs::write(path, lg.to_json() + "\n")
                .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
        }
        let mode = if c.graph.n() <= 20 { SearchMode::Exhaustive } else { SearchMode::Greedy };
        let best = search_optimal_alpha(&c.graph, &SearchOptions { mode, seed: g.seed, ..Default::default() })?;
        json["composite"] = json!({
            "n": c.graph.n(),
            "offsets": c.offsets,
            "bound": qfi_upper_bound(&c.graph)?,
            "best_qfi": best.qfi,
            "best_alpha": best.alpha.to_vec(),
            "search_mode": best.mode,
            "unknown_rules": c.unknown_rules,
            "graph": lg.to_file(),
        });
        table.push(vec![
            "composite".into(),
            c.graph.n().to_string(),
            best.qfi.to_string(),
            best.bound.to_string(),
            best.alpha.len().to_string(),
        ]);
    }
    if let Some(s) = &file.scaling {
        let opts = SearchOptions { mode: s.mode, seed: g.seed, ..Default::default() };
        let rep = scaling_experiment(s.family, &s.n_values, &opts)?;
        for r in &rep.rows {
            table.push(vec![
                "scaling".into(),
                r.n.to_string(),
                r.best_qfi.to_string(),
                r.bound.to_string(),
                r.alpha_size.to_string(),
            ]);
        }
        table.push(vec!["exponent".into(), String::new(), num(rep.exponent), num(rep.bound_exponent), String::new()]);
        json["scaling"] = serde_json::to_value(&rep).expect("report serializes");
    }
    Ok(Report::ok(json, table))
}
