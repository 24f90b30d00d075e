//! Two-particle interferometers: the hyper-hybrid entangling circuit and the
//! two-particle entanglement-swapping circuit.
//!
//! Both share one topology over the external arms `L, D` (Alice) and `R, U`
//! (Bob). External labels name the arm a particle ends up in, so the
//! particle exchange between the parties is already folded into the port
//! assignment of the first splitter stage:
//!
//! 1. a splitter on the particle entering at `R` (outputs `R`, `D`) and one
//!    on the particle entering at `L` (outputs `L`, `U`);
//! 2. path phases `φ_L, φ_D, φ_R, φ_U`;
//! 3. Alice mixes `D` with `L`, Bob mixes `R` with `U`.
//!
//! The entangling circuit uses hybrid splitters everywhere. The swap circuit
//! keeps hybrid splitters on Alice's side and plain splitters on Bob's.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fock::{LabelSet, ModeSpace, StateVector, Statistics};
use crate::optics::{beam_splitter, compose, hybrid_beam_splitter, phase_shifter, ModeTransform};

/// Path-dependent phases applied by the two parties.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseSettings {
    #[serde(rename = "phiL")]
    pub phi_l: f64,
    #[serde(rename = "phiD")]
    pub phi_d: f64,
    #[serde(rename = "phiR")]
    pub phi_r: f64,
    #[serde(rename = "phiU")]
    pub phi_u: f64,
}

impl PhaseSettings {
    pub fn new(phi_l: f64, phi_d: f64, phi_r: f64, phi_u: f64) -> Self {
        PhaseSettings {
            phi_l,
            phi_d,
            phi_r,
            phi_u,
        }
    }

    /// Phases realizing local analyzer angles: Alice's angle sits on `D`,
    /// Bob's on `R`, so that `φ_D − φ_L = phi_a` and `φ_R − φ_U = phi_b`.
    pub fn for_parties(phi_a: f64, phi_b: f64) -> Self {
        PhaseSettings::new(0.0, phi_a, phi_b, 0.0)
    }

    /// `(φ_D − φ_L − φ_R + φ_U)/2`, the argument of the coincidence tables.
    pub fn aggregate(&self) -> f64 {
        (self.phi_d - self.phi_l - self.phi_r + self.phi_u) / 2.0
    }

    pub fn alice_angle(&self) -> f64 {
        self.phi_d - self.phi_l
    }

    pub fn bob_angle(&self) -> f64 {
        self.phi_r - self.phi_u
    }

    pub fn is_finite(&self) -> bool {
        [self.phi_l, self.phi_d, self.phi_r, self.phi_u]
            .iter()
            .all(|p| p.is_finite())
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.phi_l, self.phi_d, self.phi_r, self.phi_u]
    }
}

/// Output of a circuit run.
#[derive(Debug, Clone)]
pub struct CircuitRun {
    pub final_state: StateVector,
    pub settings: PhaseSettings,
    pub statistics: Statistics,
    pub space: ModeSpace,
}

fn arms() -> LabelSet {
    LabelSet::new(["L", "D", "R", "U"]).expect("static labels")
}

/// Spin `{down, up}` × arms `{L, D, R, U}`.
pub fn li_space(statistics: Statistics) -> ModeSpace {
    ModeSpace::new(
        LabelSet::new(["down", "up"]).expect("static labels"),
        arms(),
        ModeSpace::species_for(statistics, 2),
    )
}

/// Polarization `{H, V}` × arms `{L, D, R, U}`, photons only.
pub fn swap_space() -> ModeSpace {
    ModeSpace::indistinct(LabelSet::new(["H", "V"]).expect("static labels"), arms())
}

fn phases(space: &ModeSpace, s: &PhaseSettings) -> Result<Vec<ModeTransform>> {
    Ok(vec![
        phase_shifter(space, "L", s.phi_l)?,
        phase_shifter(space, "D", s.phi_d)?,
        phase_shifter(space, "R", s.phi_r)?,
        phase_shifter(space, "U", s.phi_u)?,
    ])
}

/// Element sequence of the hyper-hybrid entangling circuit.
pub fn li_stages(space: &ModeSpace, settings: &PhaseSettings) -> Result<Vec<ModeTransform>> {
    let mut st = vec![
        hybrid_beam_splitter(space, "R", "D", "R", "D")?,
        hybrid_beam_splitter(space, "L", "U", "L", "U")?,
    ];
    st.extend(phases(space, settings)?);
    st.push(hybrid_beam_splitter(space, "D", "L", "D", "L")?);
    st.push(hybrid_beam_splitter(space, "R", "U", "R", "U")?);
    Ok(st)
}

/// Element sequence of the two-particle swapping circuit.
pub fn swap_stages(space: &ModeSpace, settings: &PhaseSettings) -> Result<Vec<ModeTransform>> {
    let mut st = vec![
        hybrid_beam_splitter(space, "R", "D", "R", "D")?,
        beam_splitter(space, "L", "U", "L", "U")?,
    ];
    st.extend(phases(space, settings)?);
    st.push(hybrid_beam_splitter(space, "D", "L", "D", "L")?);
    st.push(beam_splitter(space, "R", "U", "R", "U")?);
    Ok(st)
}

fn run(space: ModeSpace, initial: StateVector, stages: &[ModeTransform], settings: PhaseSettings) -> Result<CircuitRun> {
    let statistics = initial.statistics();
    let circuit = compose(&space, stages)?;
    let final_state = initial.substitute(&circuit)?;
    Ok(CircuitRun {
        final_state,
        settings,
        statistics,
        space,
    })
}

/// Two spin-down particles entering at `R` and `L`, pushed through the
/// hyper-hybrid entangling circuit. Distinguishable particles get species
/// tags 1 (at `R`) and 2 (at `L`).
pub fn li_circuit(statistics: Statistics, settings: PhaseSettings) -> Result<CircuitRun> {
    let space = li_space(statistics);
    let r = space.mode("down", "R")?;
    let l = space.mode("down", "L")?;
    let (r, l) = match statistics {
        Statistics::Distinguishable => (r.with_species(space.species[0]), l.with_species(space.species[1])),
        _ => (r, l),
    };
    let initial = StateVector::from_creations(statistics, &[r, l]);
    let stages = li_stages(&space, &settings)?;
    run(space, initial, &stages, settings)
}

/// Two horizontally polarized photons entering at `R` and `L`, pushed through
/// the swapping circuit.
pub fn swap_circuit(settings: PhaseSettings) -> Result<CircuitRun> {
    let space = swap_space();
    let initial = StateVector::from_creations(Statistics::Boson, &[space.mode("H", "R")?, space.mode("H", "L")?]);
    let stages = swap_stages(&space, &settings)?;
    run(space, initial, &stages, settings)
}
