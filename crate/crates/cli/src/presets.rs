//! Figure-reproduction inputs shipped with the binary.

pub const FIG1A: &str = include_str!("../presets/fig1a.json");
pub const FIG3A: &str = include_str!("../presets/fig3a.json");
pub const FIG3B: &str = include_str!("../presets/fig3b.json");
pub const ATYPE53: &str = include_str!("../presets/atype53.json");

pub const GRAPH_PRESETS: &[&str] = &["fig1a", "fig1b", "fig1c"];
pub const NOISE_PRESETS: &[(&str, &str)] = &[("fig3a", FIG3A), ("fig3b", FIG3B)];
pub const CONSTRUCT_PRESETS: &[(&str, &str)] = &[("atype53", ATYPE53)];

pub fn lookup<'a>(table: &[(&str, &'a str)], name: &str) -> Option<&'a str> {
    table.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn names(table: &[(&str, &str)]) -> String {
    table.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", ")
}
