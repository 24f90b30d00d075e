use std::collections::BTreeMap;

use super::{CircuitSpecTree, Element, PhaseValue, SorterSpec};
use crate::analysis::MeasurementPartition;
use crate::circuits::PhaseSettings;
use crate::error::{Error, Result};
use crate::fock::{LabelSet, ModeSpace, StateVector};
use crate::optics::{
    beam_splitter, compose, dof_sorter, exchange_wiring, hybrid_beam_splitter, phase_shifter, ModeTransform,
    SorterSelector,
};

/// Executable form of a source.
#[derive(Debug, Clone)]
pub struct CompiledCircuit {
    pub space: ModeSpace,
    pub initial: StateVector,
    pub stages: Vec<ModeTransform>,
    pub partitions: Vec<MeasurementPartition>,
}

impl CompiledCircuit {
    /// Initial state pushed through every stage.
    pub fn run(&self) -> Result<StateVector> {
        self.initial.substitute(&compose(&self.space, &self.stages)?)
    }

    /// The `A` and `B` partitions, when both are declared.
    pub fn party_partitions(&self) -> Option<(&MeasurementPartition, &MeasurementPartition)> {
        use crate::analysis::Party;
        let a = self.partitions.iter().find(|p| p.party == Party::A)?;
        let b = self.partitions.iter().find(|p| p.party == Party::B)?;
        Some((a, b))
    }
}

/// `phiL, phiD, phiR, phiU` bound to the given settings.
pub fn phase_params(s: &PhaseSettings) -> BTreeMap<String, f64> {
    BTreeMap::from([
        ("phiL".to_string(), s.phi_l),
        ("phiD".to_string(), s.phi_d),
        ("phiR".to_string(), s.phi_r),
        ("phiU".to_string(), s.phi_u),
    ])
}

fn pairs(r: &[(String, String)]) -> Vec<(&str, &str)> {
    r.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect()
}

/// Builds the mode space, initial state, element sequence and partitions.
/// Distinguishable particles receive species tags in declaration order.
pub fn compile(tree: &CircuitSpecTree, params: &BTreeMap<String, f64>) -> Result<CompiledCircuit> {
    let space = ModeSpace::new(
        LabelSet::new(&tree.internal)?,
        LabelSet::new(&tree.external)?,
        ModeSpace::species_for(tree.statistics, tree.particles.len()),
    );
    let mut ops = Vec::with_capacity(tree.particles.len());
    for (k, p) in tree.particles.iter().enumerate() {
        let m = space.mode(&p.internal, &p.external)?;
        ops.push(match tree.statistics {
            crate::fock::Statistics::Distinguishable => m.with_species(space.species[k]),
            _ => m,
        });
    }
    let initial = StateVector::from_creations(tree.statistics, &ops);

    let mut stages = Vec::with_capacity(tree.elements.len());
    for e in &tree.elements {
        stages.push(match e {
            Element::Hbs { ports: [a, b, t, r] } => hybrid_beam_splitter(&space, a, b, t, r)?,
            Element::Bs { ports: [a, b, t, r] } => beam_splitter(&space, a, b, t, r)?,
            Element::Phase { port, value } => {
                let phase = match value {
                    PhaseValue::Literal(x) => *x,
                    PhaseValue::Param(name) => *params
                        .get(name)
                        .ok_or_else(|| Error::InvalidArgument(format!("unbound parameter ${name}")))?,
                };
                phase_shifter(&space, port, phase)?
            }
            Element::Sorter { spec, routes } => {
                let selector = match spec {
                    SorterSpec::Internal { port } => SorterSelector::Internal { input: port.clone() },
                    SorterSpec::External => SorterSelector::External,
                };
                dof_sorter(&space, selector, &pairs(routes))?
            }
            Element::Exchange { routes } => exchange_wiring(&space, &pairs(routes))?,
        });
    }

    let mut partitions = Vec::new();
    for m in &tree.measurements {
        let bins = m
            .bins
            .iter()
            .map(|(label, modes)| {
                let modes = modes
                    .iter()
                    .map(|r| space.local(&r.internal, &r.external))
                    .collect::<Result<Vec<_>>>()?;
                Ok((label.clone(), modes))
            })
            .collect::<Result<Vec<_>>>()?;
        partitions.push(MeasurementPartition::new(m.party, m.kind, bins)?);
    }
    Ok(CompiledCircuit {
        space,
        initial,
        stages,
        partitions,
    })
}
