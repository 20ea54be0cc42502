use std::path::PathBuf;

use serde_json::json;
use stabmetro::dense::{qfi, sum_x};
use stabmetro::protocol2::{
    extremal_qfi, family_partition, qfi_subspace, tolerance, FamilyParams, SubspaceSpec, SubspaceState,
};

use crate::input::read;
use crate::output::{num, Report, Table};
use crate::{CliError, CliResult, GlobalOpts};

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Partition file: {"n": int, "blocks": [[...], ...]}.
    #[arg(long, conflicts_with_all = ["sizes", "family"])]
    pub input: Option<PathBuf>,
    /// Contiguous blocks of these sizes, e.g. 3,3,3.
    #[arg(long, value_delimiter = ',', conflicts_with = "family")]
    pub sizes: Vec<usize>,
    /// Family parameters file, e.g. {"family": "ii", "n": 12, "m": 2}.
    #[arg(long)]
    pub family: Option<PathBuf>,
    /// State file: {"spec": {...}, "real": [[...]], "imag": [[...]]}.
    #[arg(long, conflicts_with = "state_preset")]
    pub state: Option<PathBuf>,
    /// ghz, uniform, min, or basis:L.
    #[arg(long, default_value = "ghz")]
    pub state_preset: String,
    /// Also evaluate the dense oracle (needs n within --mixed-limit).
    #[arg(long)]
    pub oracle: bool,
}

fn preset_state(spec: &SubspaceSpec, name: &str) -> CliResult<SubspaceState> {
    let d = spec.dim();
    Ok(match name {
        "ghz" => SubspaceState::basis(spec.clone(), 0)?,
        "uniform" => SubspaceState::diagonal(spec.clone(), &vec![1.0 / d as f64; d])?,
        "min" => {
            let l = (0..d).min_by_key(|&l| spec.h(l).unsigned_abs()).expect("nonempty");
            SubspaceState::basis(spec.clone(), l)?
        }
        other => {
            let l = other
                .strip_prefix("basis:")
                .and_then(|s| s.parse::<usize>().ok())
                .ok_or_else(|| CliError::Input(format!("unknown state preset {other:?}; use ghz, uniform, min or basis:L")))?;
            SubspaceState::basis(spec.clone(), l)?
        }
    })
}

pub fn run(args: &Args, g: &GlobalOpts) -> CliResult<Report> {
    let mut family_json = serde_json::Value::Null;
    let spec = if let Some(path) = &args.family {
        let params: FamilyParams = serde_json::from_str(&read(path)?)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let rep = family_partition(&params)?;
        family_json = json!({
            "params": params,
            "r_min": rep.r_min,
            "epsilon": rep.epsilon,
            "predicted": rep.predicted,
            "within_prediction": rep.within_prediction,
            "notes": rep.notes,
        });
        rep.spec
    } else if let Some(path) = &args.input {
        SubspaceSpec::from_json(&read(path)?)?
    } else if !args.sizes.is_empty() {
        SubspaceSpec::from_sizes(&args.sizes)?
    } else if let Some(path) = &args.state {
        SubspaceState::from_json(&read(path)?)?.spec().clone()
    } else {
        return Err(CliError::Input("no partition given; use --input, --sizes, --family or --state".into()));
    };
    let state = match &args.state {
        Some(path) => {
            let s = SubspaceState::from_json(&read(path)?)?;
            if s.spec() != &spec {
                return Err(CliError::Input("state file's partition differs from the given one".into()));
            }
            s
        }
        None => preset_state(&spec, &args.state_preset)?,
    };

    let f = qfi_subspace(&state);
    let oracle = if args.oracle {
        let dense = state.to_dense(g.mixed_limit)?;
        Some(qfi(&dense, &sum_x(spec.n()))?)
    } else {
        None
    };
    let ex = extremal_qfi(&spec);
    let eps = tolerance(&spec);
    let pops = state.populations();
    let json = json!({
        "n": spec.n(),
        "m": spec.m(),
        "sizes": spec.sizes(),
        "blocks": spec.blocks(),
        "qfi": f,
        "oracle_qfi": oracle,
        "extremal": ex,
        "tolerance": if eps.is_finite() { Some(eps) } else { None },
        "populations": pops,
        "family": family_json,
    });
    let mut table = Table::new(["lambda", "h", "population", "contribution"]);
    for (l, p) in pops.iter().enumerate() {
        let h = spec.h(l);
        table.push(vec![l.to_string(), h.to_string(), num(*p), num(p * (h * h) as f64)]);
    }
    Ok(Report::ok(json, table))
}
