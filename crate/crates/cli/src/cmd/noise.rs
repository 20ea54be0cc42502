use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Deserialize;
use serde_json::json;
use stabmetro::noise::{noise_sweep, Probe, ProbeKind};
use stabmetro::protocol2::{SubspaceSpec, SubspaceState};

use crate::input::read;
use crate::output::{num, Report, Table};
use crate::presets;
use crate::{CliError, CliResult, GlobalOpts};

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Sweep file: {"theta", "p_grid", "n_grid", "probes": [...]}.
    #[arg(long, conflicts_with = "preset")]
    pub input: Option<PathBuf>,
    /// fig3a or fig3b.
    #[arg(long)]
    pub preset: Option<String>,
    /// Evaluate at this single noise strength instead of the grid.
    #[arg(long)]
    pub p: Option<f64>,
    /// Override the encoded phase.
    #[arg(long)]
    pub theta: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    theta: f64,
    p_grid: Vec<f64>,
    #[serde(default)]
    n_grid: Vec<usize>,
    probes: Vec<ProbeFile>,
}

#[derive(Deserialize)]
struct ProbeFile {
    id: String,
    #[serde(flatten)]
    kind: ProbeKindFile,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum ProbeKindFile {
    Ghz,
    Separable,
    Subspace { state: serde_json::Value },
    Optimized { parts: usize, budget: usize, seed: Option<u64> },
    OptimizedAt { sizes: Vec<usize>, p_opt: f64, budget: usize, seed: Option<u64> },
}

fn to_probe(p: ProbeFile, seed: u64) -> CliResult<Probe> {
    let kind = match p.kind {
        ProbeKindFile::Ghz => ProbeKind::Ghz,
        ProbeKindFile::Separable => ProbeKind::Separable,
        ProbeKindFile::Subspace { state } => ProbeKind::Subspace(SubspaceState::from_json(&state.to_string())?),
        ProbeKindFile::Optimized { parts, budget, seed: s } => ProbeKind::Optimized {
            parts,
            budget,
            seed: s.unwrap_or(seed),
        },
        ProbeKindFile::OptimizedAt { sizes, p_opt, budget, seed: s } => ProbeKind::OptimizedAt {
            spec: SubspaceSpec::from_sizes(&sizes)?,
            p_opt,
            budget,
            seed: s.unwrap_or(seed),
        },
    };
    Ok(Probe { id: p.id, kind })
}

pub fn run(args: &Args, g: &GlobalOpts) -> CliResult<Report> {
    let text = match (&args.input, &args.preset) {
        (Some(path), _) => read(path)?,
        (None, Some(name)) => presets::lookup(presets::NOISE_PRESETS, name)
            .ok_or_else(|| {
                CliError::Input(format!(
                    "unknown noise preset {name:?}; known: {}",
                    presets::names(presets::NOISE_PRESETS)
                ))
            })?
            .to_string(),
        (None, None) => return Err(CliError::Input("no sweep given; use --input or --preset".into())),
    };
    let file: SweepFile = serde_json::from_str(&text).map_err(|e| CliError::Input(format!("sweep file: {e}")))?;
    let theta = args.theta.unwrap_or(file.theta);
    let p_grid = match args.p {
        Some(p) => vec![p],
        None => file.p_grid,
    };
    let probes: Vec<Probe> = file.probes.into_iter().map(|p| to_probe(p, g.seed)).collect::<CliResult<_>>()?;
    let ids: Vec<String> = probes.iter().map(|p| p.id.clone()).collect();
    let rows = noise_sweep(&probes, &p_grid, &file.n_grid, theta, g.mixed_limit)?;

    // Wide table: one row per (n, p), one column per probe.
    let mut wide: BTreeMap<(usize, usize), Vec<String>> = BTreeMap::new();
    for r in &rows {
        let pi = p_grid.iter().position(|&p| p == r.p).expect("p from grid");
        let col = ids.iter().position(|id| *id == r.probe_id).expect("known probe");
        wide.entry((r.n, pi)).or_insert_with(|| vec![String::new(); ids.len()])[col] = num(r.f_dap);
    }
    let mut table = Table::new(["n".to_string(), "p".to_string(), "theta".to_string()].into_iter().chain(ids.clone()));
    for ((n, pi), cols) in wide {
        let mut row = vec![n.to_string(), num(p_grid[pi]), num(theta)];
        row.extend(cols);
        table.push(row);
    }
    let json = json!({ "theta": theta, "probes": ids, "rows": rows });
    Ok(Report::ok(json, table))
}
