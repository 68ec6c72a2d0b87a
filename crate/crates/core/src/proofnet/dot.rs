use std::fmt::Write;

use super::ProofNet;
use crate::translation::OmegaString;

/// Graphviz rendering: tokens on one rank, links `E` drawn above, `A` and
/// dominance drawn below.
pub fn to_dot(net: &ProofNet, w: &OmegaString) -> String {
    let mut out = String::from("digraph net {\n  rankdir=LR;\n  node [shape=plaintext];\n  { rank=same;");
    for i in 0..w.len() {
        let _ = write!(out, " c{i}; l{i};");
    }
    out.push_str(" }\n");
    for i in 0..w.len() {
        let _ = writeln!(out, "  c{i} [label=\"{}\"];", w.conns[i]);
        let _ = writeln!(out, "  l{i} [label=\"{}\"];", w.lits[i]);
    }
    out.push_str("  edge [style=invis];\n");
    for i in 0..w.len() {
        let _ = write!(out, "  c{i} -> l{i};");
        if i + 1 < w.len() {
            let _ = write!(out, " l{i} -> c{};", i + 1);
        }
        out.push('\n');
    }
    out.push_str("  edge [style=solid, dir=none, constraint=false, tailport=n, headport=n];\n");
    for (a, b) in net.structure.pairs() {
        let _ = writeln!(out, "  l{a} -> l{b};");
    }
    out.push_str("  edge [dir=forward, color=blue, tailport=s, headport=s];\n");
    for (c, target) in net.attach.iter().enumerate() {
        if let Some(t) = target {
            let _ = writeln!(out, "  c{c} -> c{t};");
        }
    }
    out.push_str("  edge [color=gray, style=dashed];\n");
    for (c, parent) in w.parent.iter().enumerate() {
        if let Some(p) = parent {
            let _ = writeln!(out, "  c{c} -> c{p};");
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proofnet::{check_net, ProofStructure};
    use crate::syntax::parse_sequent;
    use crate::translation::translate;

    #[test]
    fn axiom_dot() {
        let w = translate(&parse_sequent("p => p").unwrap());
        let net = check_net(&ProofStructure::new(vec![1, 0]).unwrap(), &w).unwrap();
        let dot = to_dot(&net, &w);
        assert!(dot.starts_with("digraph net {"));
        assert!(dot.contains("l0 -> l1;"));
        assert!(dot.trim_end().ends_with('}'));
    }
}
