use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::json;

use hyperfock::analysis::{
    chsh_value, coincidence_table, correlation, phase_grid, run_table, uniform_angles, ChshSettings,
    CoincidenceTable, DofKind, NamedCircuit, SignMap, TableKind,
};
use hyperfock::cdl::{self, compile, parse_source, phase_params, CircuitSpecTree, Element, PhaseValue};
use hyperfock::circuits::{
    clone_distribution, signaling_decode_exact, signaling_decode_mc, Basis, PhaseSettings, SignalVariant,
};
use hyperfock::fock::{ModeSpace, StateVector, Statistics};

use crate::record::{num, render_table, Correlations, Phases, RunRecord, TableRecord};
use crate::{CircuitArgs, Cli, CliError, Command, PhaseArgs};

pub fn run(cli: &Cli) -> Result<String, CliError> {
    if !(cli.tolerance.is_finite() && cli.tolerance > 0.0) {
        return Err(CliError::Input("--tolerance must be a positive number".into()));
    }
    match &cli.command {
        Command::Table { circuit, phases } => table(cli, circuit, phases),
        Command::Chsh {
            circuit,
            a0,
            a1,
            b0,
            b1,
        } => chsh(cli, circuit, ChshSettings::new(*a0, *a1, *b0, *b1)),
        Command::Sweep {
            circuit,
            grid,
            values,
            output,
        } => sweep(cli, circuit, *grid, values.as_deref(), output),
        Command::Signal { dofs, copies, mc } => signal(cli, *dofs, *copies, *mc),
        Command::Cascade { n, basis } => cascade(cli, *n, *basis),
        Command::Check { file } => check(cli, file),
    }
}

/// A circuit ready to be evaluated at phase settings.
enum Circuit {
    Builtin {
        circuit: NamedCircuit,
        statistics: Statistics,
        kind: TableKind,
    },
    Source {
        name: String,
        tree: CircuitSpecTree,
    },
}

struct Evaluation {
    table: CoincidenceTable,
    state: StateVector,
    space: ModeSpace,
}

fn load_source(reference: &str) -> Result<(String, String), CliError> {
    if let Some(text) = cdl::bundled(reference) {
        return Ok((reference.trim_end_matches(".cdl").to_string(), text.to_string()));
    }
    let text = std::fs::read_to_string(reference).map_err(|e| CliError::Io(format!("cannot read {reference}: {e}")))?;
    Ok((reference.to_string(), text))
}

fn parse_file(name: &str, text: &str) -> Result<CircuitSpecTree, CliError> {
    parse_source(text).map_err(|e| CliError::Input(format!("{name}:{e}")))
}

fn kind_name(a: DofKind, b: DofKind) -> &'static str {
    match (a, b) {
        (DofKind::External, DofKind::External) => "path-path",
        (DofKind::Internal, DofKind::Internal) => "spin-spin",
        (DofKind::Internal, DofKind::External) => "spin-path",
        (DofKind::External, DofKind::Internal) => "path-spin",
    }
}

impl Circuit {
    fn resolve(args: &CircuitArgs) -> Result<Self, CliError> {
        let builtin = match args.circuit.as_str() {
            "li" => Some((NamedCircuit::Li, Statistics::Fermion, TableKind::PathPath)),
            "swap" => Some((NamedCircuit::Swap, Statistics::Boson, TableKind::SpinPath)),
            _ => None,
        };
        if let Some((circuit, default_stats, default_kind)) = builtin {
            let statistics = args.stats.unwrap_or(default_stats);
            if circuit == NamedCircuit::Swap && statistics != Statistics::Boson {
                return Err(CliError::Input("the swap circuit runs photons only (--stats boson)".into()));
            }
            return Ok(Circuit::Builtin {
                circuit,
                statistics,
                kind: args.kind.unwrap_or(default_kind),
            });
        }
        let (name, text) = load_source(&args.circuit)?;
        let tree = parse_file(&name, &text)?;
        if args.kind.is_some() {
            return Err(CliError::Input("--kind applies to built-in circuits; sources declare their measurements".into()));
        }
        if let Some(s) = args.stats {
            if s != tree.statistics {
                return Err(CliError::Input(format!(
                    "--stats {} conflicts with the source's `statistics {}`",
                    s.name(),
                    tree.statistics.name()
                )));
            }
        }
        Ok(Circuit::Source { name, tree })
    }

    fn experiment(&self) -> String {
        match self {
            Circuit::Builtin { circuit, .. } => circuit.name().to_string(),
            Circuit::Source { name, .. } => name.clone(),
        }
    }

    fn statistics(&self) -> Statistics {
        match self {
            Circuit::Builtin { statistics, .. } => *statistics,
            Circuit::Source { tree, .. } => tree.statistics,
        }
    }

    fn kind(&self) -> String {
        match self {
            Circuit::Builtin { kind, .. } => kind.name().to_string(),
            Circuit::Source { tree, .. } => {
                let find = |p| tree.measurements.iter().find(|m| m.party == p).map(|m| m.kind);
                match (find(hyperfock::analysis::Party::A), find(hyperfock::analysis::Party::B)) {
                    (Some(a), Some(b)) => kind_name(a, b).to_string(),
                    _ => "custom".to_string(),
                }
            }
        }
    }

    fn evaluate(&self, s: PhaseSettings) -> Result<Evaluation, CliError> {
        match self {
            Circuit::Builtin {
                circuit,
                statistics,
                kind,
            } => {
                let run = circuit.run(*statistics, s)?;
                Ok(Evaluation {
                    table: run_table(&run, *kind)?,
                    state: run.final_state,
                    space: run.space,
                })
            }
            Circuit::Source { name, tree } => {
                let compiled = compile(tree, &phase_params(&s))?;
                let state = compiled.run()?;
                let (a, b) = compiled.party_partitions().ok_or_else(|| {
                    CliError::Input(format!("{name}: tables need `measure A` and `measure B` declarations"))
                })?;
                Ok(Evaluation {
                    table: coincidence_table(&state, a, b)?,
                    state,
                    space: compiled.space,
                })
            }
        }
    }
}

fn total_probability(state: &StateVector, tol: f64) -> Result<f64, CliError> {
    let total: f64 = state.outcome_distribution()?.iter().map(|(_, p)| p).sum();
    if (total - 1.0).abs() > tol {
        return Err(CliError::Numeric(format!("outcome probabilities sum to {total}, not 1")));
    }
    Ok(total)
}

fn settings_of(p: &PhaseArgs) -> PhaseSettings {
    PhaseSettings::new(p.phase_l, p.phase_d, p.phase_r, p.phase_u)
}

fn table(cli: &Cli, args: &CircuitArgs, phases: &PhaseArgs) -> Result<String, CliError> {
    let circuit = Circuit::resolve(args)?;
    let s = settings_of(phases);
    let ev = circuit.evaluate(s)?;
    let total = total_probability(&ev.state, cli.tolerance)?;
    let signs = SignMap::standard(&ev.space);
    let e = correlation(&ev.table, &signs).ok();
    let sum = ev.table.total();

    let mut rec = RunRecord::new(circuit.experiment(), cli.seed, cli.tolerance);
    rec.statistics = Some(circuit.statistics().name().into());
    rec.kind = Some(circuit.kind());
    rec.phases = Some(Phases::Interferometer(s));
    rec.table = Some(TableRecord::from(&ev.table));
    rec.coincidence_sum = Some(sum);
    rec.total_probability = Some(total);
    rec.e = e.map(Correlations::One);
    rec.metadata.sign_convention = signs.describe();
    if cli.json {
        return Ok(rec.to_json());
    }
    let mut out = String::new();
    let _ = writeln!(out, "experiment         {} ({}, {})", rec.experiment, circuit.statistics(), circuit.kind());
    let _ = writeln!(
        out,
        "phases             phiL={} phiD={} phiR={} phiU={}",
        num(s.phi_l),
        num(s.phi_d),
        num(s.phi_r),
        num(s.phi_u)
    );
    out.push('\n');
    out.push_str(&render_table(&ev.table));
    out.push('\n');
    let _ = writeln!(out, "coincidence sum    {}", num(sum));
    let _ = writeln!(out, "total probability  {}", num(total));
    let _ = writeln!(out, "E                  {}", e.map_or("undefined".to_string(), num));
    Ok(out)
}

fn chsh(cli: &Cli, args: &CircuitArgs, s: ChshSettings) -> Result<String, CliError> {
    let circuit = Circuit::resolve(args)?;
    let pairs = [(s.phi_a0, s.phi_b0), (s.phi_a1, s.phi_b0), (s.phi_a0, s.phi_b1), (s.phi_a1, s.phi_b1)];
    let mut tables = Vec::with_capacity(4);
    let mut space = None;
    for &(a, b) in &pairs {
        let ev = circuit.evaluate(PhaseSettings::for_parties(a, b))?;
        total_probability(&ev.state, cli.tolerance)?;
        tables.push(((a.to_bits(), b.to_bits()), ev.table));
        space.get_or_insert(ev.space);
    }
    let signs = SignMap::standard(&space.expect("four evaluations"));
    let lookup = |a: f64, b: f64| {
        let key = (a.to_bits(), b.to_bits());
        Ok(tables.iter().find(|(k, _)| *k == key).expect("precomputed").1.clone())
    };
    let r = chsh_value(lookup, &s, &signs)?;
    let witness = if r.value > 2.0 + cli.tolerance { "violation" } else { "inconclusive" };

    let mut rec = RunRecord::new(circuit.experiment(), cli.seed, cli.tolerance);
    rec.statistics = Some(circuit.statistics().name().into());
    rec.kind = Some(circuit.kind());
    rec.phases = Some(Phases::Analyzers(s));
    rec.e = Some(Correlations::Four(r.terms));
    rec.chsh = Some(r.value);
    rec.result = Some(json!({ "witness": witness }));
    rec.metadata.sign_convention = signs.describe();
    if cli.json {
        return Ok(rec.to_json());
    }
    let mut out = String::new();
    let _ = writeln!(out, "experiment  {} ({}, {})", rec.experiment, circuit.statistics(), circuit.kind());
    let _ = writeln!(
        out,
        "settings    a0={} a1={} b0={} b1={}",
        num(s.phi_a0),
        num(s.phi_a1),
        num(s.phi_b0),
        num(s.phi_b1)
    );
    for (label, e) in ["E(a0,b0)", "E(a1,b0)", "E(a0,b1)", "E(a1,b1)"].iter().zip(r.terms) {
        let _ = writeln!(out, "{label}    {}", num(e));
    }
    let _ = writeln!(out, "CHSH        {}", num(r.value));
    let _ = writeln!(out, "witness     {witness}");
    Ok(out)
}

fn sweep(
    cli: &Cli,
    args: &CircuitArgs,
    grid: Option<usize>,
    values: Option<&[f64]>,
    output: &str,
) -> Result<String, CliError> {
    let circuit = Circuit::resolve(args)?;
    let axis = match (grid, values) {
        (Some(n), None) => uniform_angles(n),
        (None, Some(v)) => v.to_vec(),
        _ => return Err(CliError::Input("give exactly one of --grid N or --values a,b,...".into())),
    };
    let points = phase_grid(&axis);
    let kind = circuit.kind();
    let mut csv = String::from("phiL,phiD,phiR,phiU,kind,p00,p01,p10,p11,E\n");
    let mut max_e: Option<f64> = None;
    for p in &points {
        let s = PhaseSettings::new(p[0], p[1], p[2], p[3]);
        let ev = circuit.evaluate(s)?;
        total_probability(&ev.state, cli.tolerance)?;
        let cells = ev.table.flat();
        if cells.len() != 4 {
            return Err(CliError::Input("sweeps need two bins per party".into()));
        }
        let e = correlation(&ev.table, &SignMap::standard(&ev.space)).ok();
        if let Some(e) = e {
            max_e = Some(max_e.map_or(e.abs(), |m: f64| m.max(e.abs())));
        }
        let fields: Vec<String> = p.iter().map(|&x| num(x)).collect();
        let _ = writeln!(
            csv,
            "{},{kind},{},{},{},{},{}",
            fields.join(","),
            num(cells[0]),
            num(cells[1]),
            num(cells[2]),
            num(cells[3]),
            e.map_or(String::new(), num)
        );
    }
    if output == "-" {
        return Ok(csv);
    }
    std::fs::write(output, &csv).map_err(|e| CliError::Io(format!("cannot write {output}: {e}")))?;

    let mut rec = RunRecord::new(circuit.experiment(), cli.seed, cli.tolerance);
    rec.statistics = Some(circuit.statistics().name().into());
    rec.kind = Some(kind.clone());
    rec.result = Some(json!({ "rows": points.len(), "output": output, "max_abs_E": max_e }));
    if cli.json {
        return Ok(rec.to_json());
    }
    Ok(format!(
        "wrote {} rows to {output} ({} {}, {kind})\nmax |E|  {}\n",
        points.len(),
        rec.experiment,
        circuit.statistics(),
        max_e.map_or("undefined".to_string(), num)
    ))
}

fn signal(cli: &Cli, dofs: Option<u32>, copies: Option<u32>, mc: Option<u64>) -> Result<String, CliError> {
    let variant = match (dofs, copies) {
        (Some(n), None) => SignalVariant::Dofs(n),
        (None, Some(m)) => SignalVariant::Copies(m),
        _ => return Err(CliError::Input("give exactly one of --dofs N or --copies M".into())),
    };
    let exact = signaling_decode_exact(variant)?;
    let estimate = mc.map(|trials| signaling_decode_mc(variant, trials, cli.seed)).transpose()?;
    let headline = exact.headline(variant);
    let (name, count) = match variant {
        SignalVariant::Dofs(n) => ("dofs", n),
        SignalVariant::Copies(m) => ("copies", m),
    };

    let mut rec = RunRecord::new("signal", cli.seed, cli.tolerance);
    rec.result = Some(json!({
        "variant": name,
        "count": count,
        "success": headline,
        "given_z": exact.given_z,
        "given_x": exact.given_x,
        "uniform_prior": exact.uniform_prior,
        "mc": estimate.map(|m| json!({
            "estimate": m.estimate,
            "stderr": m.stderr,
            "trials": m.trials,
            "seed": m.seed,
        })),
    }));
    if cli.json {
        return Ok(rec.to_json());
    }
    let mut out = String::new();
    let _ = writeln!(out, "variant        {name} = {count}");
    let _ = writeln!(out, "success        {}", num(headline));
    let _ = writeln!(out, "given Z        {}", num(exact.given_z));
    let _ = writeln!(out, "given X        {}", num(exact.given_x));
    let _ = writeln!(out, "uniform prior  {}", num(exact.uniform_prior));
    if let Some(m) = estimate {
        let _ = writeln!(
            out,
            "monte carlo    {} ± {} ({} trials, seed {})",
            num(m.estimate),
            num(m.stderr),
            m.trials,
            m.seed
        );
    }
    Ok(out)
}

fn cascade(cli: &Cli, n: u32, basis: Basis) -> Result<String, CliError> {
    if !(1..=16).contains(&n) {
        return Err(CliError::Input("--n must be between 1 and 16".into()));
    }
    let dist = clone_distribution(basis, n)?;
    let all_equal = dist[0] + dist[dist.len() - 1];
    let total: f64 = dist.iter().sum();
    if (total - 1.0).abs() > cli.tolerance {
        return Err(CliError::Numeric(format!("detector probabilities sum to {total}")));
    }
    let basis_name = match basis {
        Basis::Z => "z",
        Basis::X => "x",
    };
    let mut rec = RunRecord::new("cascade", cli.seed, cli.tolerance);
    rec.total_probability = Some(total);
    let detectors: BTreeMap<String, f64> = dist.iter().enumerate().map(|(k, &p)| (format!("D{}", k + 1), p)).collect();
    rec.result = Some(json!({
        "n": n,
        "basis": basis_name,
        "detectors": dist,
        "all_equal": all_equal,
        "mixed": 1.0 - all_equal,
    }));
    if cli.json {
        return Ok(rec.to_json());
    }
    let mut out = format!("cascade n={n} basis={basis_name}\n\n");
    let width = detectors.keys().map(String::len).max().unwrap_or(2);
    for (k, p) in dist.iter().enumerate() {
        let _ = writeln!(out, "{:width$}  {}", format!("D{}", k + 1), num(*p));
    }
    let summary = [
        (format!("P(D1 or D{})", dist.len()), all_equal),
        ("P(other)".to_string(), 1.0 - all_equal),
        ("total".to_string(), total),
    ];
    let w = summary.iter().map(|(l, _)| l.len()).max().unwrap_or(0);
    out.push('\n');
    for (label, p) in summary {
        let _ = writeln!(out, "{label:w$}  {}", num(p));
    }
    Ok(out)
}

fn check(cli: &Cli, file: &str) -> Result<String, CliError> {
    let (name, text) = load_source(file)?;
    let tree = parse_file(&name, &text)?;
    // bind every parameter so the check exercises construction
    let params: BTreeMap<String, f64> = tree
        .elements
        .iter()
        .filter_map(|e| match e {
            Element::Phase {
                value: PhaseValue::Param(p),
                ..
            } => Some((p.clone(), 0.0)),
            _ => None,
        })
        .collect();
    let compiled = compile(&tree, &params).map_err(|e| CliError::Input(format!("{name}: {e}")))?;
    let state = compiled.run()?;
    total_probability(&state, cli.tolerance)?;
    let mut rec = RunRecord::new(name.clone(), cli.seed, cli.tolerance);
    rec.statistics = Some(tree.statistics.name().into());
    rec.result = Some(json!({
        "status": "ok",
        "particles": tree.particles.len(),
        "elements": tree.elements.len(),
        "partitions": tree.measurements.len(),
        "parameters": params.keys().collect::<Vec<_>>(),
    }));
    if cli.json {
        return Ok(rec.to_json());
    }
    Ok(format!(
        "ok: {} particles, {} elements, {} partitions ({})\n",
        tree.particles.len(),
        tree.elements.len(),
        tree.measurements.len(),
        tree.statistics
    ))
}
