//! Observables: coincidence tables, correlations, CHSH values, closed-form
//! reference tables and phase sweeps.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuits::{li_circuit, swap_circuit, CircuitRun, PhaseSettings};
use crate::error::{Error, Result};
use crate::fock::{LocalMode, ModeSpace, StateVector, Statistics};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DofKind {
    Internal,
    External,
}

/// One party's detector bins.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementPartition {
    pub party: Party,
    pub kind: DofKind,
    pub bins: Vec<(String, Vec<LocalMode>)>,
}

impl MeasurementPartition {
    pub fn new(party: Party, kind: DofKind, bins: Vec<(String, Vec<LocalMode>)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for (_, modes) in &bins {
            for m in modes {
                if !seen.insert(*m) {
                    return Err(Error::OverlappingPartitions(format!("{m:?}")));
                }
            }
        }
        Ok(MeasurementPartition { party, kind, bins })
    }

    pub fn modes(&self) -> BTreeSet<LocalMode> {
        self.bins.iter().flat_map(|(_, m)| m.iter().copied()).collect()
    }

    pub fn bin_of(&self, mode: LocalMode) -> Option<usize> {
        self.bins.iter().position(|(_, ms)| ms.contains(&mode))
    }

    pub fn labels(&self) -> Vec<String> {
        self.bins.iter().map(|(l, _)| l.clone()).collect()
    }
}

/// The four measurement combinations of the two-party interferometers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TableKind {
    #[serde(rename = "path-path")]
    PathPath,
    #[serde(rename = "spin-spin")]
    SpinSpin,
    #[serde(rename = "spin-path")]
    SpinPath,
    #[serde(rename = "path-spin")]
    PathSpin,
}

impl TableKind {
    pub const ALL: [TableKind; 4] = [
        TableKind::PathPath,
        TableKind::SpinSpin,
        TableKind::SpinPath,
        TableKind::PathSpin,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TableKind::PathPath => "path-path",
            TableKind::SpinSpin => "spin-spin",
            TableKind::SpinPath => "spin-path",
            TableKind::PathSpin => "path-spin",
        }
    }

    fn dofs(self) -> (DofKind, DofKind) {
        match self {
            TableKind::PathPath => (DofKind::External, DofKind::External),
            TableKind::SpinSpin => (DofKind::Internal, DofKind::Internal),
            TableKind::SpinPath => (DofKind::Internal, DofKind::External),
            TableKind::PathSpin => (DofKind::External, DofKind::Internal),
        }
    }
}

impl std::str::FromStr for TableKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TableKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown table kind `{s}`")))
    }
}

/// Alice holds arms `D, L`, Bob holds `R, U`. Path bins are listed in that
/// order; internal bins follow the declared internal label order.
pub fn standard_partition(space: &ModeSpace, party: Party, kind: DofKind) -> Result<MeasurementPartition> {
    let arms: [&str; 2] = match party {
        Party::A => ["D", "L"],
        Party::B => ["R", "U"],
    };
    let internals = space.internal.names();
    let bins = match kind {
        DofKind::External => arms
            .iter()
            .map(|&arm| {
                let modes = internals
                    .iter()
                    .map(|s| space.local(s, arm))
                    .collect::<Result<Vec<_>>>()?;
                Ok((arm.to_string(), modes))
            })
            .collect::<Result<Vec<_>>>()?,
        DofKind::Internal => internals
            .iter()
            .map(|s| {
                let modes = arms.iter().map(|&arm| space.local(s, arm)).collect::<Result<Vec<_>>>()?;
                Ok((s.clone(), modes))
            })
            .collect::<Result<Vec<_>>>()?,
    };
    MeasurementPartition::new(party, kind, bins)
}

pub fn standard_partitions(space: &ModeSpace, kind: TableKind) -> Result<(MeasurementPartition, MeasurementPartition)> {
    let (a, b) = kind.dofs();
    Ok((
        standard_partition(space, Party::A, a)?,
        standard_partition(space, Party::B, b)?,
    ))
}

/// Post-selected probabilities of one particle per party.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoincidenceTable {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub probs: Vec<Vec<f64>>,
}

impl CoincidenceTable {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.probs[row][col]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().flatten().sum()
    }

    /// Entries in row-major order.
    pub fn flat(&self) -> Vec<f64> {
        self.probs.iter().flatten().copied().collect()
    }

    pub fn max_abs_diff(&self, other: &CoincidenceTable) -> f64 {
        self.flat()
            .iter()
            .zip(other.flat())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    fn from_2x2(rows: [&str; 2], cols: [&str; 2], probs: [[f64; 2]; 2]) -> Self {
        CoincidenceTable {
            row_labels: rows.iter().map(|s| s.to_string()).collect(),
            col_labels: cols.iter().map(|s| s.to_string()).collect(),
            probs: probs.iter().map(|r| r.to_vec()).collect(),
        }
    }
}

/// Sums outcome probabilities of every monomial with exactly one particle in
/// Alice's bins and exactly one in Bob's.
pub fn coincidence_table(
    state: &StateVector,
    part_a: &MeasurementPartition,
    part_b: &MeasurementPartition,
) -> Result<CoincidenceTable> {
    if let Some(m) = part_a.modes().intersection(&part_b.modes()).next() {
        return Err(Error::OverlappingPartitions(format!("{m:?}")));
    }
    let mut probs = vec![vec![0.0; part_b.bins.len()]; part_a.bins.len()];
    for (mono, p) in state.outcome_distribution()? {
        let mut a_hit = None;
        let mut b_hit = None;
        let (mut na, mut nb) = (0, 0);
        for (lm, n) in mono.species_blind() {
            if let Some(i) = part_a.bin_of(lm) {
                na += n;
                a_hit = Some(i);
            } else if let Some(j) = part_b.bin_of(lm) {
                nb += n;
                b_hit = Some(j);
            }
        }
        if let (1, 1, Some(i), Some(j)) = (na, nb, a_hit, b_hit) {
            probs[i][j] += p;
        }
    }
    Ok(CoincidenceTable {
        row_labels: part_a.labels(),
        col_labels: part_b.labels(),
        probs,
    })
}

/// Coincidence table of a standard measurement combination.
pub fn run_table(run: &CircuitRun, kind: TableKind) -> Result<CoincidenceTable> {
    let (a, b) = standard_partitions(&run.space, kind)?;
    coincidence_table(&run.final_state, &a, &b)
}

/// Dichotomic outcome assignment per party.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignMap {
    pub a: BTreeMap<String, i8>,
    pub b: BTreeMap<String, i8>,
}

impl SignMap {
    /// `+1` for the `L`/`U` detections and `−1` for `D`/`R`. Internal bins
    /// take the sign of the arm they are locked to in the interferometer
    /// output: Alice's first internal label pairs with `L`, Bob's second
    /// with `U`.
    pub fn standard(space: &ModeSpace) -> Self {
        let int = space.internal.names();
        let mut a = BTreeMap::from([("L".to_string(), 1), ("D".to_string(), -1)]);
        let mut b = BTreeMap::from([("U".to_string(), 1), ("R".to_string(), -1)]);
        if int.len() == 2 {
            a.insert(int[0].clone(), 1);
            a.insert(int[1].clone(), -1);
            b.insert(int[1].clone(), 1);
            b.insert(int[0].clone(), -1);
        }
        SignMap { a, b }
    }

    pub fn describe(&self) -> String {
        let side = |m: &BTreeMap<String, i8>| {
            let plus: Vec<&str> = m.iter().filter(|(_, &s)| s > 0).map(|(k, _)| k.as_str()).collect();
            let minus: Vec<&str> = m.iter().filter(|(_, &s)| s < 0).map(|(k, _)| k.as_str()).collect();
            format!("+1={{{}}} -1={{{}}}", plus.join(","), minus.join(","))
        };
        format!("A: {}; B: {}", side(&self.a), side(&self.b))
    }
}

/// `Σ s_i s_j P_ij / Σ P_ij` over the table.
pub fn correlation(table: &CoincidenceTable, signs: &SignMap) -> Result<f64> {
    let sign = |m: &BTreeMap<String, i8>, l: &String| m.get(l).copied().ok_or_else(|| Error::MissingSign(l.clone()));
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, rl) in table.row_labels.iter().enumerate() {
        let si = f64::from(sign(&signs.a, rl)?);
        for (j, cl) in table.col_labels.iter().enumerate() {
            let sj = f64::from(sign(&signs.b, cl)?);
            num += si * sj * table.probs[i][j];
            den += table.probs[i][j];
        }
    }
    if den <= 0.0 {
        return Err(Error::ZeroCoincidenceMass);
    }
    Ok(num / den)
}

/// Two analyzer angles per party.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshSettings {
    pub phi_a0: f64,
    pub phi_a1: f64,
    pub phi_b0: f64,
    pub phi_b1: f64,
}

impl ChshSettings {
    pub fn new(phi_a0: f64, phi_a1: f64, phi_b0: f64, phi_b1: f64) -> Self {
        ChshSettings {
            phi_a0,
            phi_a1,
            phi_b0,
            phi_b1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChshResult {
    /// `E(a0,b0), E(a1,b0), E(a0,b1), E(a1,b1)`.
    pub terms: [f64; 4],
    pub value: f64,
}

/// `|E(a0,b0) + E(a1,b0) + E(a0,b1) − E(a1,b1)|`, where `runner` produces the
/// coincidence table for a pair of analyzer angles.
pub fn chsh_value<F>(mut runner: F, s: &ChshSettings, signs: &SignMap) -> Result<ChshResult>
where
    F: FnMut(f64, f64) -> Result<CoincidenceTable>,
{
    let mut e = |a: f64, b: f64| -> Result<f64> { correlation(&runner(a, b)?, signs) };
    let terms = [
        e(s.phi_a0, s.phi_b0)?,
        e(s.phi_a1, s.phi_b0)?,
        e(s.phi_a0, s.phi_b1)?,
        e(s.phi_a1, s.phi_b1)?,
    ];
    Ok(ChshResult {
        terms,
        value: (terms[0] + terms[1] + terms[2] - terms[3]).abs(),
    })
}

/// Prebuilt circuits addressable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedCircuit {
    Li,
    Swap,
}

impl NamedCircuit {
    pub fn run(self, statistics: Statistics, settings: PhaseSettings) -> Result<CircuitRun> {
        match self {
            NamedCircuit::Li => li_circuit(statistics, settings),
            NamedCircuit::Swap => {
                if statistics != Statistics::Boson {
                    return Err(Error::InvalidArgument("the swap circuit runs photons only".into()));
                }
                swap_circuit(settings)
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NamedCircuit::Li => "li",
            NamedCircuit::Swap => "swap",
        }
    }

    /// Runner for [`chsh_value`]: party angles mapped through
    /// [`PhaseSettings::for_parties`].
    pub fn chsh(self, statistics: Statistics, kind: TableKind, s: &ChshSettings) -> Result<ChshResult> {
        let space = self.run(statistics, PhaseSettings::default())?.space;
        let signs = SignMap::standard(&space);
        chsh_value(
            |a, b| run_table(&self.run(statistics, PhaseSettings::for_parties(a, b))?, kind),
            s,
            &signs,
        )
    }
}

/// Generalized table for both statistics: `φ₁ = φ_D − φ_L`,
/// `φ₂ = −(φ_R − φ_U)`, shifted by `π/2` for fermions, then the
/// `¼cos²(φ₁−φ₂)` / `¼sin²(φ₁−φ₂)` pattern of the selected combination.
pub fn closed_form_table(kind: TableKind, statistics: Statistics, settings: &PhaseSettings) -> Result<CoincidenceTable> {
    let phi1 = settings.phi_d - settings.phi_l;
    let phi2 = match statistics {
        Statistics::Boson => -(settings.phi_r - settings.phi_u),
        Statistics::Fermion => -(settings.phi_r - settings.phi_u) + FRAC_PI_2,
        Statistics::Distinguishable => {
            return Err(Error::InvalidArgument(
                "the generalized closed form covers bosons and fermions only".into(),
            ))
        }
    };
    let x = phi1 - phi2;
    let c = 0.25 * x.cos().powi(2);
    let s = 0.25 * x.sin().powi(2);
    Ok(match kind {
        TableKind::PathPath => CoincidenceTable::from_2x2(["D", "L"], ["R", "U"], [[c, s], [s, c]]),
        TableKind::SpinSpin => CoincidenceTable::from_2x2(["down", "up"], ["down", "up"], [[s, c], [c, s]]),
        TableKind::SpinPath => CoincidenceTable::from_2x2(["down", "up"], ["R", "U"], [[s, c], [c, s]]),
        TableKind::PathSpin => CoincidenceTable::from_2x2(["D", "L"], ["down", "up"], [[c, s], [s, c]]),
    })
}

/// Fermionic tables in terms of `φ = (φ_D − φ_L − φ_R + φ_U)/2`.
pub fn fermion_reference_table(kind: TableKind, settings: &PhaseSettings) -> CoincidenceTable {
    let phi = settings.aggregate();
    let cos2 = phi.cos() * phi.cos() / 4.0;
    let sin2 = phi.sin() * phi.sin() / 4.0;
    match kind {
        TableKind::PathPath => CoincidenceTable::from_2x2(["D", "L"], ["R", "U"], [[cos2, sin2], [sin2, cos2]]),
        TableKind::SpinSpin => CoincidenceTable::from_2x2(["down", "up"], ["down", "up"], [[sin2, cos2], [cos2, sin2]]),
        TableKind::SpinPath => CoincidenceTable::from_2x2(["down", "up"], ["R", "U"], [[sin2, cos2], [cos2, sin2]]),
        TableKind::PathSpin => CoincidenceTable::from_2x2(["D", "L"], ["down", "up"], [[cos2, sin2], [sin2, cos2]]),
    }
}

/// Swap-circuit table, Alice on polarization and Bob on path.
pub fn swap_reference_table(settings: &PhaseSettings) -> CoincidenceTable {
    let phi = settings.aggregate();
    let cos2 = phi.cos() * phi.cos() / 4.0;
    let sin2 = phi.sin() * phi.sin() / 4.0;
    CoincidenceTable::from_2x2(["H", "V"], ["R", "U"], [[cos2, sin2], [sin2, cos2]])
}

/// Internal × external statistics of the particle one party receives,
/// restricted to coincidence events.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SideDofReport {
    pub internal_labels: Vec<String>,
    pub external_labels: Vec<String>,
    /// `joint[i][e]`, normalized over coincidence events.
    pub joint: Vec<Vec<f64>>,
    /// `max |P(i,e) − P(i)P(e)|`.
    pub factorization_residual: f64,
    /// Twice the largest reduced-density-matrix coherence between modes that
    /// differ in both internal and external label; 1 for a maximally
    /// hybrid-entangled single particle, 0 when no such coherence survives.
    pub hybrid_coherence: f64,
}

/// Reduced single-particle statistics on `side`'s arms given that `other`
/// also receives exactly one particle.
pub fn side_dof_report(state: &StateVector, space: &ModeSpace, side: &[&str], other: &[&str]) -> Result<SideDofReport> {
    let side_ext = side.iter().map(|s| space.external_label(s)).collect::<Result<Vec<_>>>()?;
    let other_ext = other.iter().map(|s| space.external_label(s)).collect::<Result<Vec<_>>>()?;
    let ni = space.internal.len();
    let side_modes: Vec<LocalMode> = side_ext
        .iter()
        .flat_map(|&e| (0..ni as u16).map(move |i| LocalMode { external: e, internal: crate::fock::InternalLabel(i) }))
        .collect();
    // amplitude matrix over (side mode, other-side outcome)
    let mut amps: BTreeMap<(usize, Vec<(LocalMode, u32)>), Complex64> = BTreeMap::new();
    let norm = state.norm_squared();
    if norm <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    for mono in state.terms().keys() {
        let blind = mono.species_blind();
        let mine: Vec<_> = blind.iter().filter(|(m, _)| side_ext.contains(&m.external)).collect();
        let theirs: Vec<_> = blind.iter().filter(|(m, _)| other_ext.contains(&m.external)).copied().collect();
        let n_theirs: u32 = theirs.iter().map(|(_, n)| n).sum();
        if mine.len() == 1 && mine[0].1 == 1 && n_theirs == 1 {
            let idx = side_modes.iter().position(|m| *m == mine[0].0).expect("side mode");
            // species tags become part of the environment label
            let mut env = theirs.clone();
            env.extend(mono.entries().iter().map(|(m, _)| {
                (LocalMode { external: crate::fock::ExternalLabel(u16::MAX), internal: crate::fock::InternalLabel(m.species.0) }, 0)
            }));
            *amps.entry((idx, env)).or_default() += state.amplitude(mono) / norm.sqrt();
        }
    }
    let envs: BTreeSet<_> = amps.keys().map(|(_, e)| e.clone()).collect();
    let d = side_modes.len();
    let mut rho = vec![vec![Complex64::new(0.0, 0.0); d]; d];
    for env in &envs {
        let column: Vec<Complex64> = (0..d)
            .map(|i| amps.get(&(i, env.clone())).copied().unwrap_or_default())
            .collect();
        for (row, ai) in rho.iter_mut().zip(&column) {
            for (cell, aj) in row.iter_mut().zip(&column) {
                *cell += ai * aj.conj();
            }
        }
    }
    let mass: f64 = (0..d).map(|i| rho[i][i].re).sum();
    if mass <= 0.0 {
        return Err(Error::ZeroCoincidenceMass);
    }
    let ne = side_ext.len();
    let mut joint = vec![vec![0.0; ne]; ni];
    for (k, m) in side_modes.iter().enumerate() {
        let e = side_ext.iter().position(|x| *x == m.external).expect("side arm");
        joint[m.internal.0 as usize][e] = rho[k][k].re / mass;
    }
    let p_int: Vec<f64> = joint.iter().map(|r| r.iter().sum()).collect();
    let p_ext: Vec<f64> = (0..ne).map(|e| joint.iter().map(|r| r[e]).sum()).collect();
    let mut residual: f64 = 0.0;
    for i in 0..ni {
        for e in 0..ne {
            residual = residual.max((joint[i][e] - p_int[i] * p_ext[e]).abs());
        }
    }
    let mut coherence: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let (a, b) = (side_modes[i], side_modes[j]);
            if a.internal != b.internal && a.external != b.external {
                coherence = coherence.max(2.0 * rho[i][j].norm() / mass);
            }
        }
    }
    Ok(SideDofReport {
        internal_labels: space.internal.names().to_vec(),
        external_labels: side.iter().map(|s| s.to_string()).collect(),
        joint,
        factorization_residual: residual,
        hybrid_coherence: coherence,
    })
}

/// One sweep point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub settings: PhaseSettings,
    pub table: CoincidenceTable,
    pub correlation: f64,
    /// CHSH value with the same four numbers read as
    /// `(φ_A⁰, φ_A¹, φ_B⁰, φ_B¹)`.
    pub chsh: f64,
}

/// Cartesian grid over the four phases `(φ_L, φ_D, φ_R, φ_U)`, in
/// lexicographic order with `φ_L` slowest.
pub fn phase_grid(values: &[f64]) -> Vec<[f64; 4]> {
    let mut out = Vec::with_capacity(values.len().pow(4));
    for &a in values {
        for &b in values {
            for &c in values {
                for &d in values {
                    out.push([a, b, c, d]);
                }
            }
        }
    }
    out
}

/// `n` equally spaced angles covering `[0, 2π)`.
pub fn uniform_angles(n: usize) -> Vec<f64> {
    (0..n).map(|k| std::f64::consts::TAU * k as f64 / n as f64).collect()
}

/// Evaluates one record per grid point, in grid order.
pub fn sweep(
    circuit: NamedCircuit,
    statistics: Statistics,
    kind: TableKind,
    grid: &[[f64; 4]],
) -> Result<Vec<SweepRecord>> {
    let mut out = Vec::with_capacity(grid.len());
    let mut signs = None;
    for p in grid {
        let settings = PhaseSettings::new(p[0], p[1], p[2], p[3]);
        let run = circuit.run(statistics, settings)?;
        let signs = signs.get_or_insert_with(|| SignMap::standard(&run.space));
        let table = run_table(&run, kind)?;
        let correlation = correlation(&table, signs)?;
        let chsh = chsh_value(
            |a, b| run_table(&circuit.run(statistics, PhaseSettings::for_parties(a, b))?, kind),
            &ChshSettings::new(p[0], p[1], p[2], p[3]),
            signs,
        )?
        .value;
        out.push(SweepRecord {
            settings,
            table,
            correlation,
            chsh,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn fermion_path_path_at_zero_phase() {
        let run = li_circuit(Statistics::Fermion, PhaseSettings::default()).unwrap();
        let t = run_table(&run, TableKind::PathPath).unwrap();
        assert_eq!(t.row_labels, ["D", "L"]);
        assert_eq!(t.col_labels, ["R", "U"]);
        assert!((t.get(0, 0) - 0.25).abs() < 1e-12);
        assert!(t.get(0, 1).abs() < 1e-12);
        assert!(t.get(1, 0).abs() < 1e-12);
        assert!((t.get(1, 1) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn correlation_examples() {
        let signs = SignMap::standard(&crate::circuits::li_space(Statistics::Fermion));
        for (a, b, want) in [(0.7, 0.7, 1.0), (0.0, PI / 2.0, 0.0), (0.3, 1.1, (0.3f64 - 1.1).cos())] {
            let run = li_circuit(Statistics::Fermion, PhaseSettings::for_parties(a, b)).unwrap();
            let e = correlation(&run_table(&run, TableKind::PathPath).unwrap(), &signs).unwrap();
            assert!((e - want).abs() < 1e-9, "{a} {b}: {e}");
        }
        let run = li_circuit(Statistics::Distinguishable, PhaseSettings::for_parties(0.2, 1.9)).unwrap();
        let e = correlation(&run_table(&run, TableKind::SpinSpin).unwrap(), &signs).unwrap();
        assert!(e.abs() < 1e-12);
    }

    #[test]
    fn zero_mass_table_rejected() {
        let t = CoincidenceTable::from_2x2(["D", "L"], ["R", "U"], [[0.0; 2]; 2]);
        let signs = SignMap::standard(&crate::circuits::li_space(Statistics::Fermion));
        assert_eq!(correlation(&t, &signs), Err(Error::ZeroCoincidenceMass));
    }

    #[test]
    fn missing_sign_reported() {
        let t = CoincidenceTable::from_2x2(["X", "L"], ["R", "U"], [[0.1; 2]; 2]);
        let signs = SignMap::standard(&crate::circuits::li_space(Statistics::Fermion));
        assert_eq!(correlation(&t, &signs), Err(Error::MissingSign("X".into())));
    }

    #[test]
    fn overlapping_partitions_rejected() {
        let space = crate::circuits::li_space(Statistics::Fermion);
        let a = standard_partition(&space, Party::A, DofKind::External).unwrap();
        let run = li_circuit(Statistics::Fermion, PhaseSettings::default()).unwrap();
        assert!(matches!(
            coincidence_table(&run.final_state, &a, &a),
            Err(Error::OverlappingPartitions(_))
        ));
        let m = space.local("up", "D").unwrap();
        assert!(MeasurementPartition::new(
            Party::A,
            DofKind::External,
            vec![("x".into(), vec![m]), ("y".into(), vec![m])]
        )
        .is_err());
    }

    #[test]
    fn tsirelson_settings_for_fermions() {
        let r = NamedCircuit::Li
            .chsh(
                Statistics::Fermion,
                TableKind::PathPath,
                &ChshSettings::new(0.0, PI / 2.0, PI / 4.0, -PI / 4.0),
            )
            .unwrap();
        assert!((r.value - 2.0 * 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn equal_settings_bounded_by_two() {
        let r = NamedCircuit::Li
            .chsh(Statistics::Fermion, TableKind::PathPath, &ChshSettings::new(0.4, 0.4, 0.4, 0.4))
            .unwrap();
        assert!((r.value - 2.0 * r.terms[0].abs()).abs() < 1e-12);
        assert!(r.value <= 2.0 + 1e-12);
    }

    #[test]
    fn closed_form_examples() {
        // fermion with φ₁ − φ₂ = 0: φ_D − φ_L + φ_R − φ_U = π/2
        let s = PhaseSettings::new(0.0, PI / 2.0, 0.0, 0.0);
        let t = closed_form_table(TableKind::PathPath, Statistics::Fermion, &s).unwrap();
        assert!((t.get(0, 0) - 0.25).abs() < 1e-15 && (t.get(1, 1) - 0.25).abs() < 1e-15);
        assert!(t.get(0, 1) < 1e-15 && t.get(1, 0) < 1e-15);
        let t = closed_form_table(TableKind::SpinSpin, Statistics::Boson, &PhaseSettings::default()).unwrap();
        assert_eq!(t.flat(), vec![0.0, 0.25, 0.25, 0.0]);
        assert!(closed_form_table(TableKind::PathPath, Statistics::Distinguishable, &s).is_err());
    }

    #[test]
    fn kind_names_round_trip() {
        for k in TableKind::ALL {
            assert_eq!(k.name().parse::<TableKind>().unwrap(), k);
        }
        assert!("spin-up".parse::<TableKind>().is_err());
    }

    #[test]
    fn one_point_sweep_matches_direct_calls() {
        let p = [0.1, 0.5, -0.3, 1.2];
        let rec = sweep(NamedCircuit::Li, Statistics::Fermion, TableKind::PathSpin, &[p]).unwrap();
        assert_eq!(rec.len(), 1);
        let run = li_circuit(Statistics::Fermion, PhaseSettings::new(p[0], p[1], p[2], p[3])).unwrap();
        assert_eq!(rec[0].table, run_table(&run, TableKind::PathSpin).unwrap());
        assert!(sweep(NamedCircuit::Li, Statistics::Fermion, TableKind::PathSpin, &[]).unwrap().is_empty());
    }

    #[test]
    fn swap_rejects_non_photons() {
        assert!(NamedCircuit::Swap.run(Statistics::Fermion, PhaseSettings::default()).is_err());
    }
}
