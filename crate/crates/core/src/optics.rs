//! Linear-optical elements as mode transforms.
//!
//! Every element acts the same way on each particle species, so a transform
//! is stored as one matrix over the *local* basis (external × internal) and
//! applied block-diagonally over the species of its [`ModeSpace`]. Entry
//! `[n, m]` is the coefficient of output mode `n` for input mode `m`.
//!
//! Splitters use the symmetric convention: transmission is real, reflection
//! picks up a factor `i`.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{CreationMap, ExternalLabel, InternalLabel, LocalMode, Mode, ModeSpace, SpeciesTag};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Which degree of freedom a sorter reads.
#[derive(Debug, Clone, PartialEq)]
pub enum SorterSelector {
    /// Route by internal label, acting on particles arriving at `input`.
    Internal { input: String },
    /// Route by external label.
    External,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ElementKind {
    Identity,
    BeamSplitter { ports: [String; 4] },
    HybridBeamSplitter { ports: [String; 4] },
    PhaseShifter { port: String, phase: f64 },
    Sorter { selector: SorterSelector, routing: Vec<(String, String)> },
    Exchange { relabel: Vec<(String, String)> },
    Composed { stages: usize },
}

#[derive(Debug, Clone)]
pub struct ModeTransform {
    space: ModeSpace,
    local: DMatrix<Complex64>,
    kind: ElementKind,
}

impl ModeTransform {
    pub fn identity(space: &ModeSpace) -> Self {
        let d = local_dim(space);
        ModeTransform {
            space: space.clone(),
            local: DMatrix::identity(d, d),
            kind: ElementKind::Identity,
        }
    }

    /// Wraps an explicit local matrix. Used by tests and custom elements.
    pub fn from_local_matrix(space: &ModeSpace, local: DMatrix<Complex64>) -> Result<Self> {
        let d = local_dim(space);
        if local.nrows() != d || local.ncols() != d {
            return Err(Error::BasisMismatch(format!(
                "matrix is {}x{}, local basis has {d} modes",
                local.nrows(),
                local.ncols()
            )));
        }
        Ok(ModeTransform {
            space: space.clone(),
            local,
            kind: ElementKind::Identity,
        })
    }

    pub fn space(&self) -> &ModeSpace {
        &self.space
    }

    pub fn kind(&self) -> &ElementKind {
        &self.kind
    }

    /// Full basis in canonical order.
    pub fn basis(&self) -> Vec<Mode> {
        self.space.modes()
    }

    /// Matrix over one species block.
    pub fn local_matrix(&self) -> &DMatrix<Complex64> {
        &self.local
    }

    /// Block-diagonal matrix over [`Self::basis`].
    pub fn matrix(&self) -> DMatrix<Complex64> {
        let d = self.local.nrows();
        let n = self.space.species.len();
        let mut full = DMatrix::zeros(d * n, d * n);
        for b in 0..n {
            full.view_mut((b * d, b * d), (d, d)).copy_from(&self.local);
        }
        full
    }

    /// `‖T†T − I‖_max < tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        verify_unitary(self, tol)
    }

    /// Re-targets this transform to a space with more species.
    pub fn embed(&self, space: &ModeSpace) -> Result<ModeTransform> {
        if space.internal != self.space.internal || space.external != self.space.external {
            return Err(Error::BasisMismatch("label sets differ".into()));
        }
        Ok(ModeTransform {
            space: space.clone(),
            local: self.local.clone(),
            kind: self.kind.clone(),
        })
    }

    /// The transform mapping `a†_m` to `Σ_n self[n,m] a†_n` followed by `next`.
    pub fn then(&self, next: &ModeTransform) -> Result<ModeTransform> {
        compose(&self.space, &[self.clone(), next.clone()])
    }
}

impl CreationMap for ModeTransform {
    fn image(&self, mode: Mode) -> Option<Vec<(Mode, Complex64)>> {
        if !self.space.species.contains(&mode.species) {
            return None;
        }
        let ni = self.space.internal.len();
        if mode.internal.0 as usize >= ni || mode.external.0 as usize >= self.space.external.len() {
            return None;
        }
        let col = local_index(ni, mode.local());
        let out = (0..self.local.nrows())
            .filter_map(|row| {
                let c = self.local[(row, col)];
                (c != Complex64::new(0.0, 0.0)).then(|| {
                    let lm = local_mode(ni, row);
                    (Mode::new(mode.species, lm.internal, lm.external), c)
                })
            })
            .collect();
        Some(out)
    }
}

fn local_dim(space: &ModeSpace) -> usize {
    space.internal.len() * space.external.len()
}

fn local_index(n_internal: usize, m: LocalMode) -> usize {
    m.external.0 as usize * n_internal + m.internal.0 as usize
}

fn local_mode(n_internal: usize, idx: usize) -> LocalMode {
    LocalMode {
        external: ExternalLabel((idx / n_internal) as u16),
        internal: InternalLabel((idx % n_internal) as u16),
    }
}

/// Builds a local matrix from explicit columns for some inputs, then
/// completes it: untouched modes map to themselves and any output-port modes
/// used as inputs are routed back onto the freed input modes in canonical
/// order. Valid whenever the explicit columns are orthonormal.
fn assemble(space: &ModeSpace, columns: BTreeMap<LocalMode, Vec<(LocalMode, Complex64)>>) -> DMatrix<Complex64> {
    let ni = space.internal.len();
    let d = local_dim(space);
    let mut m = DMatrix::zeros(d, d);
    let mut targets = BTreeSet::new();
    for (src, img) in &columns {
        for &(dst, c) in img {
            m[(local_index(ni, dst), local_index(ni, *src))] += c;
            targets.insert(dst);
        }
    }
    let leftover_in: Vec<LocalMode> = (0..d)
        .map(|i| local_mode(ni, i))
        .filter(|lm| !columns.contains_key(lm) && targets.contains(lm))
        .collect();
    let leftover_out: Vec<LocalMode> = (0..d)
        .map(|i| local_mode(ni, i))
        .filter(|lm| columns.contains_key(lm) && !targets.contains(lm))
        .collect();
    for (src, dst) in leftover_in.iter().zip(&leftover_out) {
        m[(local_index(ni, *dst), local_index(ni, *src))] = ONE;
    }
    for i in 0..d {
        let lm = local_mode(ni, i);
        if !columns.contains_key(&lm) && !targets.contains(&lm) {
            m[(i, i)] = ONE;
        }
    }
    m
}

fn resolve_ports(space: &ModeSpace, names: [&str; 4]) -> Result<[ExternalLabel; 4]> {
    let [a, b, t, r] = names;
    if a == b {
        return Err(Error::DuplicatePort(a.to_string()));
    }
    if t == r {
        return Err(Error::DuplicatePort(t.to_string()));
    }
    let ins: BTreeSet<&str> = [a, b].into();
    let outs: BTreeSet<&str> = [t, r].into();
    if ins != outs && !ins.is_disjoint(&outs) {
        return Err(Error::PortSetMismatch {
            inputs: vec![a.into(), b.into()],
            outputs: vec![t.into(), r.into()],
        });
    }
    Ok([
        space.external_label(a)?,
        space.external_label(b)?,
        space.external_label(t)?,
        space.external_label(r)?,
    ])
}

fn splitter(space: &ModeSpace, ports: [&str; 4], flip: bool) -> Result<DMatrix<Complex64>> {
    let [a, b, t, r] = resolve_ports(space, ports)?;
    let n = space.internal.len();
    let reflected = |s: u16| if flip { InternalLabel(1 - s) } else { InternalLabel(s) };
    let mut columns = BTreeMap::new();
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    for s in 0..n as u16 {
        let lm = |e: ExternalLabel, i: InternalLabel| LocalMode { external: e, internal: i };
        columns.insert(
            lm(a, InternalLabel(s)),
            vec![(lm(t, InternalLabel(s)), h), (lm(r, reflected(s)), I * h)],
        );
        columns.insert(
            lm(b, InternalLabel(s)),
            vec![(lm(r, InternalLabel(s)), h), (lm(t, reflected(s)), I * h)],
        );
    }
    Ok(assemble(space, columns))
}

/// Balanced beam splitter preserving the internal label.
///
/// `a†(s,in_a) → (a†(s,out_t) + i a†(s,out_r))/√2` and
/// `a†(s,in_b) → (a†(s,out_r) + i a†(s,out_t))/√2`.
pub fn beam_splitter(space: &ModeSpace, in_a: &str, in_b: &str, out_t: &str, out_r: &str) -> Result<ModeTransform> {
    let local = splitter(space, [in_a, in_b, out_t, out_r], false)?;
    Ok(ModeTransform {
        space: space.clone(),
        local,
        kind: ElementKind::BeamSplitter {
            ports: [in_a.into(), in_b.into(), out_t.into(), out_r.into()],
        },
    })
}

/// Balanced hybrid beam splitter: the reflected arm flips the (binary)
/// internal label.
///
/// `a†(s,in_a) → (a†(s,out_t) + i a†(s̄,out_r))/√2` and
/// `a†(s,in_b) → (a†(s,out_r) + i a†(s̄,out_t))/√2`.
pub fn hybrid_beam_splitter(
    space: &ModeSpace,
    in_a: &str,
    in_b: &str,
    out_t: &str,
    out_r: &str,
) -> Result<ModeTransform> {
    if space.internal.len() != 2 {
        return Err(Error::InternalSetNotBinary(space.internal.len()));
    }
    let local = splitter(space, [in_a, in_b, out_t, out_r], true)?;
    Ok(ModeTransform {
        space: space.clone(),
        local,
        kind: ElementKind::HybridBeamSplitter {
            ports: [in_a.into(), in_b.into(), out_t.into(), out_r.into()],
        },
    })
}

/// Path-dependent phase `e^{i·phase}` on every internal state at `port`.
pub fn phase_shifter(space: &ModeSpace, port: &str, phase: f64) -> Result<ModeTransform> {
    let e = space.external_label(port)?;
    let ni = space.internal.len();
    let mut local = DMatrix::identity(local_dim(space), local_dim(space));
    let factor = Complex64::from_polar(1.0, phase);
    for s in 0..ni as u16 {
        let idx = local_index(ni, LocalMode { external: e, internal: InternalLabel(s) });
        local[(idx, idx)] = factor;
    }
    Ok(ModeTransform {
        space: space.clone(),
        local,
        kind: ElementKind::PhaseShifter {
            port: port.into(),
            phase,
        },
    })
}

fn permutation(space: &ModeSpace, map: BTreeMap<LocalMode, LocalMode>) -> Result<DMatrix<Complex64>> {
    let mut seen = BTreeSet::new();
    for dst in map.values() {
        if !seen.insert(*dst) {
            return Err(Error::NotBijective(format!(
                "two inputs routed to {}",
                space.describe_local(*dst)
            )));
        }
    }
    Ok(assemble(
        space,
        map.into_iter().map(|(s, d)| (s, vec![(d, ONE)])).collect(),
    ))
}

/// Passive sorter routing each eigenstate of the selected DOF to its port.
pub fn dof_sorter(space: &ModeSpace, selector: SorterSelector, routing: &[(&str, &str)]) -> Result<ModeTransform> {
    let mut map = BTreeMap::new();
    match &selector {
        SorterSelector::Internal { input } => {
            let port = space.external_label(input)?;
            for name in space.internal.names() {
                let (_, out) = routing
                    .iter()
                    .find(|(l, _)| l == name)
                    .ok_or_else(|| Error::IncompleteRouting(name.clone()))?;
                let s = space.internal_label(name)?;
                let out = space.external_label(out)?;
                map.insert(
                    LocalMode { external: port, internal: s },
                    LocalMode { external: out, internal: s },
                );
            }
            if let Some((extra, _)) = routing.iter().find(|(l, _)| space.internal.index_of(l).is_none()) {
                return Err(Error::UnknownLabel(extra.to_string()));
            }
        }
        SorterSelector::External => {
            if routing.is_empty() {
                return Err(Error::IncompleteRouting("<no routes>".into()));
            }
            insert_external_routes(space, routing, &mut map)?;
        }
    }
    let local = permutation(space, map)?;
    Ok(ModeTransform {
        space: space.clone(),
        local,
        kind: ElementKind::Sorter {
            selector,
            routing: routing.iter().map(|&(a, b)| (a.into(), b.into())).collect(),
        },
    })
}

fn insert_external_routes(
    space: &ModeSpace,
    routes: &[(&str, &str)],
    map: &mut BTreeMap<LocalMode, LocalMode>,
) -> Result<()> {
    let mut sources = BTreeSet::new();
    for &(from, to) in routes {
        if !sources.insert(from) {
            return Err(Error::NotBijective(format!("`{from}` routed twice")));
        }
        let f = space.external_label(from)?;
        let t = space.external_label(to)?;
        for s in 0..space.internal.len() as u16 {
            map.insert(
                LocalMode { external: f, internal: InternalLabel(s) },
                LocalMode { external: t, internal: InternalLabel(s) },
            );
        }
    }
    Ok(())
}

/// Renames external labels, leaving internal labels untouched. Particles
/// physically routed to another party are expressed this way.
pub fn exchange_wiring(space: &ModeSpace, relabel: &[(&str, &str)]) -> Result<ModeTransform> {
    let mut map = BTreeMap::new();
    insert_external_routes(space, relabel, &mut map)?;
    let local = permutation(space, map)?;
    Ok(ModeTransform {
        space: space.clone(),
        local,
        kind: ElementKind::Exchange {
            relabel: relabel.iter().map(|&(a, b)| (a.into(), b.into())).collect(),
        },
    })
}

/// Applies `stages` in order. Stages are embedded into the union of their
/// species with `space`; label sets must agree.
pub fn compose(space: &ModeSpace, stages: &[ModeTransform]) -> Result<ModeTransform> {
    let mut species: Vec<SpeciesTag> = space.species.clone();
    for st in stages {
        if st.space.internal != space.internal || st.space.external != space.external {
            return Err(Error::BasisMismatch(
                "stage label sets differ from the circuit space".into(),
            ));
        }
        species.extend(st.space.species.iter().copied());
    }
    let union = ModeSpace::new(space.internal.clone(), space.external.clone(), species);
    let d = local_dim(&union);
    let mut acc = DMatrix::identity(d, d);
    for st in stages {
        acc = &st.local * acc;
    }
    Ok(ModeTransform {
        space: union,
        local: acc,
        kind: match stages.len() {
            0 => ElementKind::Identity,
            1 => stages[0].kind.clone(),
            n => ElementKind::Composed { stages: n },
        },
    })
}

/// True iff `‖T†T − I‖_max < tol`.
pub fn verify_unitary(t: &ModeTransform, tol: f64) -> bool {
    let m = &t.local;
    let prod = m.adjoint() * m;
    let d = m.nrows();
    (0..d).all(|r| {
        (0..d).all(|c| {
            let target = if r == c { ONE } else { Complex64::new(0.0, 0.0) };
            (prod[(r, c)] - target).norm() < tol
        })
    })
}
