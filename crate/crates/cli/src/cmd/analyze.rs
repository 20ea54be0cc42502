use serde_json::json;
use stabmetro::qfi_formula::qfi_upper_bound;

use crate::input::{names, GraphSource};
use crate::output::{Report, Table};
use crate::{CliResult, GlobalOpts};

#[derive(clap::Args, Debug)]
pub struct Args {
    #[command(flatten)]
    pub source: GraphSource,
}

pub fn run(args: &Args, _g: &GlobalOpts) -> CliResult<Report> {
    let lg = args.source.load()?;
    let g = &lg.graph;
    let ts = g.twins_structure();
    let classes = |cs: &[Vec<usize>]| -> Vec<Vec<String>> {
        cs.iter().filter(|c| c.len() >= 2).map(|c| names(&lg, c.iter().copied())).collect()
    };
    let (bound, bound_note) = match qfi_upper_bound(g) {
        Ok(b) => (Some(b), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let json = json!({
        "n": g.n(),
        "edges": g.edge_count(),
        "connected": g.is_connected(),
        "twins_classes": classes(&ts.twins_classes),
        "true_twins_classes": classes(&ts.true_twins_classes),
        "leaves": names(&lg, ts.leaves.iter()),
        "roots": names(&lg, ts.roots.iter()),
        "u": names(&lg, ts.u_set.iter()),
        "u_bar": names(&lg, ts.u_bar.iter()),
        "bound": bound,
        "bound_note": bound_note,
    });

    let class_of = |cs: &[Vec<usize>], v: usize| cs.iter().position(|c| c.contains(&v)).expect("partition");
    let mut table = Table::new([
        "vertex", "name", "degree", "twins_class", "true_twins_class", "leaf", "root", "in_u",
    ]);
    for v in 0..g.n() {
        table.push(vec![
            v.to_string(),
            lg.vertex_name(v),
            g.degree(v).to_string(),
            class_of(&ts.twins_classes, v).to_string(),
            class_of(&ts.true_twins_classes, v).to_string(),
            ts.leaves.contains(v).to_string(),
            ts.roots.contains(v).to_string(),
            ts.u_set.contains(v).to_string(),
        ]);
    }
    Ok(Report::ok(json, table))
}
