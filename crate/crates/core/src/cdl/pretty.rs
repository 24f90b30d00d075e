use std::fmt::Write;

use super::{CircuitSpecTree, Element, ModeRef, PhaseValue, SorterSpec};
use crate::analysis::{DofKind, Party};

/// Shortest decimal that parses back to the same `f64`.
pub fn format_number(x: f64) -> String {
    let s = format!("{x}");
    if s == "-0" {
        // keep the sign bit through the lexer's negation
        "-0.0".into()
    } else {
        s
    }
}

fn mode(m: &ModeRef) -> String {
    format!("{}:{}", m.internal, m.external)
}

fn routes(r: &[(String, String)]) -> String {
    r.iter().map(|(a, b)| format!("{a} -> {b}")).collect::<Vec<_>>().join(" ")
}

/// Canonical text: declarations, particles, elements, measurements, one
/// statement per line. Comments are not preserved.
pub fn pretty_print(tree: &CircuitSpecTree) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "internal {}", tree.internal.join(" "));
    let _ = writeln!(out, "external {}", tree.external.join(" "));
    let _ = writeln!(out, "statistics {}", tree.statistics.name());
    out.push('\n');
    for p in &tree.particles {
        let _ = writeln!(out, "particle {} {}", p.internal, p.external);
    }
    if !tree.elements.is_empty() {
        out.push('\n');
    }
    for e in &tree.elements {
        let line = match e {
            Element::Hbs { ports } => format!("hbs {}", ports.join(" ")),
            Element::Bs { ports } => format!("bs {}", ports.join(" ")),
            Element::Phase { port, value } => match value {
                PhaseValue::Literal(x) => format!("phase {port} {}", format_number(*x)),
                PhaseValue::Param(p) => format!("phase {port} ${p}"),
            },
            Element::Sorter {
                spec: SorterSpec::Internal { port },
                routes: r,
            } => format!("sorter internal {port} {}", routes(r)),
            Element::Sorter {
                spec: SorterSpec::External,
                routes: r,
            } => format!("sorter external {}", routes(r)),
            Element::Exchange { routes: r } => format!("exchange {}", routes(r)),
        };
        out.push_str(&line);
        out.push('\n');
    }
    for m in &tree.measurements {
        let party = match m.party {
            Party::A => "A",
            Party::B => "B",
        };
        let kind = match m.kind {
            DofKind::Internal => "internal",
            DofKind::External => "external",
        };
        let _ = write!(out, "\nmeasure {party} {kind}");
        for (label, modes) in &m.bins {
            let modes: Vec<String> = modes.iter().map(mode).collect();
            let _ = write!(out, "\n  bin {label} = {}", modes.join(" "));
        }
        out.push('\n');
    }
    out
}
