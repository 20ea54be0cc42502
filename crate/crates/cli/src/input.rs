use std::fs;
use std::path::{Path, PathBuf};

use stabmetro::{fixtures, LabeledGraph, MetroError, StandardGraph, VertexSet};

use crate::presets;
use crate::{CliError, CliResult};

pub fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

/// Where a graph comes from: a JSON file, a named preset, or a family
/// shorthand such as `star:8`.
#[derive(clap::Args, Clone, Debug)]
pub struct GraphSource {
    /// Graph JSON file: {"n": int, "edges": [[i,j],...], "labels": {...}}.
    #[arg(long, conflicts_with_all = ["preset", "graph"])]
    pub input: Option<PathBuf>,
    /// Named graph: fig1a, fig1b or fig1c.
    #[arg(long, conflicts_with = "graph")]
    pub preset: Option<String>,
    /// Family shorthand: star:N, cycle:N, path:N, complete:N, bipartite:A,B.
    #[arg(long)]
    pub graph: Option<String>,
}

impl GraphSource {
    pub fn given(&self) -> bool {
        self.input.is_some() || self.preset.is_some() || self.graph.is_some()
    }

    pub fn load(&self) -> CliResult<LabeledGraph> {
        if let Some(path) = &self.input {
            let text = read(path)?;
            return LabeledGraph::from_json(&text)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())));
        }
        if let Some(name) = &self.preset {
            return match name.as_str() {
                "fig1a" => Ok(LabeledGraph::from_json(presets::FIG1A)?),
                "fig1b" => Ok(LabeledGraph::unlabeled(fixtures::fig1b())),
                "fig1c" => Ok(LabeledGraph::unlabeled(fixtures::fig1c())),
                _ => Err(CliError::Input(format!(
                    "unknown graph preset {name:?}; known: {}",
                    presets::GRAPH_PRESETS.join(", ")
                ))),
            };
        }
        if let Some(spec) = &self.graph {
            return Ok(LabeledGraph::unlabeled(parse_family(spec)?.build()?));
        }
        Err(CliError::Input("no graph given; use --input, --preset or --graph".into()))
    }
}

fn parse_family(spec: &str) -> CliResult<StandardGraph> {
    let bad = || CliError::Input(format!("cannot parse graph shorthand {spec:?}"));
    let (kind, arg) = spec.split_once(':').ok_or_else(bad)?;
    let nums: Vec<usize> = arg
        .split(',')
        .map(|s| s.trim().parse().map_err(|_| bad()))
        .collect::<CliResult<_>>()?;
    Ok(match (kind, nums.as_slice()) {
        ("star", [n]) => StandardGraph::Star { n: *n },
        ("cycle", [n]) => StandardGraph::Cycle { n: *n },
        ("path", [n]) => StandardGraph::Path { n: *n },
        ("complete", [n]) => StandardGraph::Complete { n: *n },
        ("bipartite", [a, b]) => StandardGraph::CompleteBipartite { a: *a, b: *b },
        _ => return Err(bad()),
    })
}

/// Comma-separated vertex names or indices.
pub fn parse_alpha(lg: &LabeledGraph, text: &str) -> CliResult<VertexSet> {
    let mut set = VertexSet::empty(lg.graph.n());
    for name in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        set.insert(lg.resolve(name)?);
    }
    if set.is_empty() {
        return Err(MetroError::EmptySubset.into());
    }
    Ok(set)
}

pub fn names(lg: &LabeledGraph, vs: impl IntoIterator<Item = usize>) -> Vec<String> {
    vs.into_iter().map(|v| lg.vertex_name(v)).collect()
}
