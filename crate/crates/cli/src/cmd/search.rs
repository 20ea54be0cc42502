use serde_json::{json, Value};
use stabmetro::qfi_formula::{protocol1_model, search_optimal_alpha, Protocol1Model, SearchMode, SearchOptions};
use stabmetro::LabeledGraph;

use crate::input::{names, parse_alpha, GraphSource};
use crate::output::{Report, Table};
use crate::{CliResult, GlobalOpts};

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum Mode {
    Exhaustive,
    Greedy,
}

impl From<Mode> for SearchMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Exhaustive => SearchMode::Exhaustive,
            Mode::Greedy => SearchMode::Greedy,
        }
    }
}

#[derive(clap::Args, Debug)]
pub struct Args {
    #[command(flatten)]
    pub source: GraphSource,
    #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
    pub mode: Mode,
    /// Skip the search and use this α (comma-separated names or indices).
    #[arg(long)]
    pub alpha: Option<String>,
    /// Largest graph accepted by exhaustive search.
    #[arg(long, default_value_t = 20)]
    pub exhaustive_limit: usize,
    /// Random starts for greedy search.
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
}

/// JSON and per-vertex rows describing a protocol.
pub fn describe(lg: &LabeledGraph, m: &Protocol1Model) -> (Value, Table) {
    let n = lg.graph.n();
    let h: Vec<String> = m
        .hamiltonian
        .iter()
        .map(|(v, l)| format!("{}_{}", l.as_char(), lg.vertex_name(*v)))
        .collect();
    let json = json!({
        "alpha": names(lg, m.alpha.iter()),
        "qfi": m.qfi,
        "bound": m.bound,
        "attainable": m.attainable,
        "stabilizer": m.stabilizer.letters().iter().map(|l| l.as_char()).collect::<String>(),
        "partition": {
            "S1": names(lg, m.partition.s1.iter()),
            "S2": names(lg, m.partition.s2.iter()),
            "S3": names(lg, m.partition.s3.iter()),
            "S4": names(lg, m.partition.s4.iter()),
        },
        "hamiltonian": h,
        "measurement": m.measurement.iter().map(|l| l.as_char().to_string()).collect::<Vec<_>>(),
    });
    let mut table = Table::new(["vertex", "name", "in_alpha", "stabilizer", "hamiltonian", "measurement"]);
    for v in 0..n {
        let hv = m.hamiltonian.iter().find(|(u, _)| *u == v).map(|(_, l)| l.as_char().to_string());
        table.push(vec![
            v.to_string(),
            lg.vertex_name(v),
            m.alpha.contains(v).to_string(),
            m.stabilizer.letter(v).as_char().to_string(),
            hv.unwrap_or_default(),
            m.measurement[v].as_char().to_string(),
        ]);
    }
    (json, table)
}

pub fn run(args: &Args, g: &GlobalOpts) -> CliResult<Report> {
    let lg = args.source.load()?;
    let (alpha, mode) = match &args.alpha {
        Some(text) => (parse_alpha(&lg, text)?, Value::from("given")),
        None => {
            let opts = SearchOptions {
                mode: args.mode.into(),
                exhaustive_limit: args.exhaustive_limit,
                seed: g.seed,
                restarts: args.restarts,
            };
            let r = search_optimal_alpha(&lg.graph, &opts)?;
            (r.alpha, serde_json::to_value(r.mode).expect("mode serializes"))
        }
    };
    let model = protocol1_model(&lg.graph, &alpha)?;
    let (mut json, table) = describe(&lg, &model);
    json["mode"] = mode;
    Ok(Report::ok(json, table))
}
