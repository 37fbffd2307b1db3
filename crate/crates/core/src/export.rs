//! Graphviz output.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::dd::{Edge, NodeId};
use crate::package::Package;

/// `x` with 6 significant digits, trailing zeros dropped.
fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let decimals = (5 - x.abs().log10().floor() as i32).max(0) as usize;
    let s = format!("{x:.decimals$}");
    let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.') } else { &s };
    if s == "-0" { "0".into() } else { s.into() }
}

/// A complex weight as `a+bi` / `a-bi`.
pub fn format_weight(re: f64, im: f64) -> String {
    let im_s = sig6(im);
    match im_s.strip_prefix('-') {
        Some(mag) => format!("{}-{mag}i", sig6(re)),
        None => format!("{}+{im_s}i", sig6(re)),
    }
}

fn node_name(id: NodeId) -> String {
    if id.is_terminal() {
        "t".into()
    } else {
        format!("n{}", id.index())
    }
}

impl Package {
    /// The DD below `root` in DOT format: one graph node per DD node labeled
    /// `q<var>`, a box for the terminal, and edges labeled with their weights.
    /// Stubs are omitted.
    pub fn to_dot(&self, root: Edge) -> String {
        let mut out = String::from("digraph dd {\n  root [shape=point];\n");
        let w = self.weight(root);
        if root.is_zero() {
            out.push_str("}\n");
            return out;
        }
        let _ = writeln!(
            out,
            "  root -> {} [label=\"{}\"];",
            node_name(root.node),
            format_weight(w.re, w.im)
        );
        let nodes: BTreeSet<NodeId> = self.reachable(root).into_iter().collect();
        for &id in &nodes {
            let node = self.node(id);
            let _ = writeln!(
                out,
                "  {} [label=\"q{}\", shape=circle];",
                node_name(id),
                node.var().unwrap_or(0)
            );
            for (i, e) in node.edges().iter().enumerate() {
                if e.is_zero() {
                    continue;
                }
                let w = self.weight(*e);
                let _ = writeln!(
                    out,
                    "  {} -> {} [label=\"{}\", taillabel=\"{i}\"];",
                    node_name(id),
                    node_name(e.node),
                    format_weight(w.re, w.im)
                );
            }
        }
        out.push_str("  t [label=\"1\", shape=box];\n}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::package::Config;

    #[test]
    fn weight_formatting() {
        assert_eq!(format_weight(std::f64::consts::FRAC_1_SQRT_2, 0.0), "0.707107+0i");
        assert_eq!(format_weight(-1.0, 0.0), "-1+0i");
        assert_eq!(format_weight(0.5, -0.25), "0.5-0.25i");
        assert_eq!(format_weight(123.456789, 1e-7), "123.457+0.0000001i");
        assert_eq!(format_weight(-0.0, -0.0), "0+0i");
    }

    #[test]
    fn identity_export() {
        let mut p = Package::new(Config::compact().with_max_qubits(2)).unwrap();
        let id = p.identity_dd(2).unwrap();
        let dot = p.to_dot(id);
        assert!(dot.starts_with("digraph dd {"));
        assert_eq!(dot.matches("shape=circle").count(), 2);
        assert_eq!(dot.matches(" -> ").count(), 5);
        assert!(dot.contains("label=\"q0\"") && dot.contains("label=\"q1\""));
        assert!(p.to_dot(Edge::ZERO).ends_with("}\n"));
    }
}
