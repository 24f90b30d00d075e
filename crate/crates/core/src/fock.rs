//! Few-particle second-quantized states.
//!
//! A state is a complex combination of canonically ordered products of
//! creation operators acting on the vacuum. Canonical order is lexicographic
//! on (species, external label, internal label); for fermions the sign of the
//! sorting permutation is folded into the stored coefficient.
//!
//! Coefficients are stored against the *unnormalized* operator product
//! `(a†_1)^{n_1} (a†_2)^{n_2} ... |0⟩`. The overlap with the normalized
//! occupation-number ket therefore carries a factor `√(∏ n_k!)`, which
//! [`StateVector::amplitude`] and [`StateVector::norm_squared`] apply.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_PRUNE_TOLERANCE: f64 = 1e-12;

/// Exchange statistics of a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Boson,
    Fermion,
    /// Each particle carries its own species tag; operators of different
    /// species commute and never interfere.
    Distinguishable,
}

impl Statistics {
    pub fn name(self) -> &'static str {
        match self {
            Statistics::Boson => "boson",
            Statistics::Fermion => "fermion",
            Statistics::Distinguishable => "distinguishable",
        }
    }
}

impl fmt::Display for Statistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Statistics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "boson" => Ok(Statistics::Boson),
            "fermion" => Ok(Statistics::Fermion),
            "distinguishable" => Ok(Statistics::Distinguishable),
            other => Err(Error::InvalidArgument(format!("unknown statistics `{other}`"))),
        }
    }
}

/// Particle species. `0` is shared by all identical particles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SpeciesTag(pub u16);

impl SpeciesTag {
    pub const INDISTINCT: SpeciesTag = SpeciesTag(0);
}

/// Index into an internal (spin, polarization) label set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InternalLabel(pub u16);

/// Index into an external (path) label set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExternalLabel(pub u16);

/// One creation-operator slot.
///
/// Field order gives the derived total order: species, then external, then
/// internal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mode {
    pub species: SpeciesTag,
    pub external: ExternalLabel,
    pub internal: InternalLabel,
}

impl Mode {
    pub fn new(species: SpeciesTag, internal: InternalLabel, external: ExternalLabel) -> Self {
        Mode {
            species,
            external,
            internal,
        }
    }

    /// The same slot for identical particles.
    pub fn indistinct(internal: InternalLabel, external: ExternalLabel) -> Self {
        Mode::new(SpeciesTag::INDISTINCT, internal, external)
    }

    pub fn with_species(self, species: SpeciesTag) -> Self {
        Mode { species, ..self }
    }

    /// What a species-blind detector sees.
    pub fn local(self) -> LocalMode {
        LocalMode {
            external: self.external,
            internal: self.internal,
        }
    }
}

/// A mode with the species tag dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocalMode {
    pub external: ExternalLabel,
    pub internal: InternalLabel,
}

/// A declared finite ordered set of label names.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabelSet {
    names: Vec<String>,
}

impl LabelSet {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::InvalidArgument("label set must not be empty".into()));
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::InvalidArgument(format!("duplicate label `{n}`")));
            }
        }
        Ok(LabelSet { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<u16> {
        self.names.iter().position(|n| n == name).map(|i| i as u16)
    }

    pub fn name(&self, index: u16) -> &str {
        &self.names[index as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

/// The mode basis of a circuit: every (species, internal, external) triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeSpace {
    pub internal: LabelSet,
    pub external: LabelSet,
    pub species: Vec<SpeciesTag>,
}

impl ModeSpace {
    pub fn new(internal: LabelSet, external: LabelSet, species: Vec<SpeciesTag>) -> Self {
        let mut species = species;
        species.sort();
        species.dedup();
        ModeSpace {
            internal,
            external,
            species,
        }
    }

    /// Space for identical particles only.
    pub fn indistinct(internal: LabelSet, external: LabelSet) -> Self {
        ModeSpace::new(internal, external, vec![SpeciesTag::INDISTINCT])
    }

    /// Species tags to use for `particles` inputs under `statistics`.
    pub fn species_for(statistics: Statistics, particles: usize) -> Vec<SpeciesTag> {
        match statistics {
            Statistics::Distinguishable => (1..=particles as u16).map(SpeciesTag).collect(),
            _ => vec![SpeciesTag::INDISTINCT],
        }
    }

    pub fn internal_label(&self, name: &str) -> Result<InternalLabel> {
        self.internal
            .index_of(name)
            .map(InternalLabel)
            .ok_or_else(|| Error::UnknownLabel(name.to_string()))
    }

    pub fn external_label(&self, name: &str) -> Result<ExternalLabel> {
        self.external
            .index_of(name)
            .map(ExternalLabel)
            .ok_or_else(|| Error::UnknownLabel(name.to_string()))
    }

    /// Looks up a local mode by label names.
    pub fn local(&self, internal: &str, external: &str) -> Result<LocalMode> {
        Ok(LocalMode {
            internal: self.internal_label(internal)?,
            external: self.external_label(external)?,
        })
    }

    /// Identical-particle mode by label names.
    pub fn mode(&self, internal: &str, external: &str) -> Result<Mode> {
        Ok(Mode::indistinct(
            self.internal_label(internal)?,
            self.external_label(external)?,
        ))
    }

    /// All modes in canonical order.
    pub fn modes(&self) -> Vec<Mode> {
        let mut out = Vec::with_capacity(self.dim());
        for &s in &self.species {
            for e in 0..self.external.len() as u16 {
                for i in 0..self.internal.len() as u16 {
                    out.push(Mode::new(s, InternalLabel(i), ExternalLabel(e)));
                }
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.species.len() * self.external.len() * self.internal.len()
    }

    pub fn describe(&self, mode: Mode) -> String {
        let base = format!(
            "{}:{}",
            self.internal.name(mode.internal.0),
            self.external.name(mode.external.0)
        );
        if mode.species == SpeciesTag::INDISTINCT {
            base
        } else {
            format!("{base}#{}", mode.species.0)
        }
    }

    pub fn describe_local(&self, mode: LocalMode) -> String {
        format!(
            "{}:{}",
            self.internal.name(mode.internal.0),
            self.external.name(mode.external.0)
        )
    }
}

/// Canonically ordered product of creation operators with occupations.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial {
    entries: Vec<(Mode, u32)>,
}

impl Monomial {
    /// The empty product, i.e. the vacuum.
    pub fn vacuum() -> Self {
        Monomial::default()
    }

    pub fn entries(&self) -> &[(Mode, u32)] {
        &self.entries
    }

    pub fn particle_count(&self) -> u32 {
        self.entries.iter().map(|&(_, n)| n).sum()
    }

    pub fn occupation(&self, mode: Mode) -> u32 {
        self.entries
            .binary_search_by(|(m, _)| m.cmp(&mode))
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }

    /// `∏ n_k!`, the squared norm of the unnormalized operator product.
    pub fn factorial_weight(&self) -> f64 {
        self.entries
            .iter()
            .map(|&(_, n)| (1..=n).map(f64::from).product::<f64>())
            .product()
    }

    /// Operators in product order, repeated by occupation.
    pub fn operators(&self) -> Vec<Mode> {
        self.entries
            .iter()
            .flat_map(|&(m, n)| std::iter::repeat_n(m, n as usize))
            .collect()
    }

    /// Occupations with species tags merged away.
    pub fn species_blind(&self) -> Vec<(LocalMode, u32)> {
        let mut merged: BTreeMap<LocalMode, u32> = BTreeMap::new();
        for &(m, n) in &self.entries {
            *merged.entry(m.local()).or_default() += n;
        }
        merged.into_iter().collect()
    }

    /// Builds a monomial from an operator list, if it is nonzero. Convenience
    /// wrapper around [`canonicalize`] that drops the sign.
    pub fn from_modes(ops: &[Mode], statistics: Statistics) -> Option<Monomial> {
        match canonicalize(ops, statistics) {
            Canonical::Zero => None,
            Canonical::Term { monomial, .. } => Some(monomial),
        }
    }
}

/// Result of bringing an operator product into canonical order.
#[derive(Debug, Clone, PartialEq)]
pub enum Canonical {
    /// The product vanishes (Pauli exclusion).
    Zero,
    Term { coefficient: f64, monomial: Monomial },
}

/// Sorts a product of creation operators into canonical order.
///
/// Fermionic operators anticommute, so the coefficient is the parity of the
/// sorting permutation and any repeated mode yields [`Canonical::Zero`].
/// Bosonic and distinguishable operators commute and accumulate occupations.
pub fn canonicalize(ops: &[Mode], statistics: Statistics) -> Canonical {
    let mut sorted = ops.to_vec();
    let mut coefficient = 1.0;
    match statistics {
        Statistics::Fermion => {
            // insertion sort; each adjacent transposition flips the sign
            for i in 1..sorted.len() {
                let mut j = i;
                while j > 0 && sorted[j - 1] > sorted[j] {
                    sorted.swap(j - 1, j);
                    coefficient = -coefficient;
                    j -= 1;
                }
            }
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Canonical::Zero;
            }
        }
        Statistics::Boson | Statistics::Distinguishable => sorted.sort(),
    }
    let mut entries: Vec<(Mode, u32)> = Vec::with_capacity(sorted.len());
    for m in sorted {
        match entries.last_mut() {
            Some((last, n)) if *last == m => *n += 1,
            _ => entries.push((m, 1)),
        }
    }
    Canonical::Term {
        coefficient,
        monomial: Monomial { entries },
    }
}

/// Linear map over creation operators: `a†_m ↦ Σ_n coeffs(m)[n] a†_n`.
///
/// Implemented by [`crate::optics::ModeTransform`]; kept as a trait so the
/// algebra does not depend on the matrix representation.
pub trait CreationMap {
    /// Image of one creation operator, or `None` if the mode is outside the
    /// map's basis.
    fn image(&self, mode: Mode) -> Option<Vec<(Mode, Complex64)>>;
}

/// A pure state of a few particles.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    statistics: Statistics,
    terms: BTreeMap<Monomial, Complex64>,
    prune_tolerance: f64,
}

impl StateVector {
    /// The vacuum `|0⟩`.
    pub fn vacuum(statistics: Statistics) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::vacuum(), Complex64::new(1.0, 0.0));
        StateVector {
            statistics,
            terms,
            prune_tolerance: DEFAULT_PRUNE_TOLERANCE,
        }
    }

    /// The zero vector.
    pub fn zero(statistics: Statistics) -> Self {
        StateVector {
            statistics,
            terms: BTreeMap::new(),
            prune_tolerance: DEFAULT_PRUNE_TOLERANCE,
        }
    }

    /// Applies the listed creation operators (rightmost first) to the vacuum.
    pub fn from_creations(statistics: Statistics, ops: &[Mode]) -> Self {
        ops.iter()
            .rev()
            .fold(StateVector::vacuum(statistics), |s, &m| s.apply_creation(m))
    }

    /// Collects `(coefficient, operator list)` pairs, canonicalizing each.
    pub fn from_terms<I>(statistics: Statistics, terms: I) -> Self
    where
        I: IntoIterator<Item = (Complex64, Vec<Mode>)>,
    {
        let mut out = StateVector::zero(statistics);
        for (c, ops) in terms {
            out.accumulate(c, &ops);
        }
        out.prune();
        out
    }

    pub fn with_prune_tolerance(mut self, tol: f64) -> Self {
        self.prune_tolerance = tol;
        self.prune();
        self
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn prune_tolerance(&self) -> f64 {
        self.prune_tolerance
    }

    /// Stored coefficients keyed by canonical monomial.
    pub fn terms(&self) -> &BTreeMap<Monomial, Complex64> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Stored coefficient of `monomial` (zero when absent).
    pub fn coefficient(&self, monomial: &Monomial) -> Complex64 {
        self.terms.get(monomial).copied().unwrap_or_default()
    }

    /// Distinct particle counts across terms, ascending.
    pub fn particle_counts(&self) -> Vec<u32> {
        let mut counts: Vec<u32> = self.terms.keys().map(Monomial::particle_count).collect();
        counts.sort_unstable();
        counts.dedup();
        counts
    }

    /// Every mode carrying at least one particle in some term.
    pub fn modes(&self) -> Vec<Mode> {
        let mut modes: Vec<Mode> = self
            .terms
            .keys()
            .flat_map(|m| m.entries().iter().map(|&(mode, _)| mode))
            .collect();
        modes.sort();
        modes.dedup();
        modes
    }

    fn accumulate(&mut self, c: Complex64, ops: &[Mode]) {
        if let Canonical::Term {
            coefficient,
            monomial,
        } = canonicalize(ops, self.statistics)
        {
            *self.terms.entry(monomial).or_default() += c * coefficient;
        }
    }

    fn prune(&mut self) {
        let tol = self.prune_tolerance;
        self.terms.retain(|_, c| c.norm() >= tol);
    }

    /// Multiplies every term on the left by `a†(mode)`.
    pub fn apply_creation(&self, mode: Mode) -> StateVector {
        let mut out = StateVector::zero(self.statistics).with_prune_tolerance(self.prune_tolerance);
        for (mono, &c) in &self.terms {
            let mut ops = Vec::with_capacity(mono.particle_count() as usize + 1);
            ops.push(mode);
            ops.extend(mono.operators());
            out.accumulate(c, &ops);
        }
        out.prune();
        out
    }

    /// Replaces each creation operator by its image under `map`, expanding
    /// products distributively.
    pub fn substitute<M: CreationMap + ?Sized>(&self, map: &M) -> Result<StateVector> {
        let mut images: BTreeMap<Mode, Vec<(Mode, Complex64)>> = BTreeMap::new();
        for mode in self.modes() {
            let img = map.image(mode).ok_or_else(|| Error::UnknownMode(format!("{mode:?}")))?;
            images.insert(mode, img);
        }
        let mut out = StateVector::zero(self.statistics).with_prune_tolerance(self.prune_tolerance);
        for (mono, &c) in &self.terms {
            let ops = mono.operators();
            let mut partial: Vec<(Complex64, Vec<Mode>)> = vec![(c, Vec::with_capacity(ops.len()))];
            for op in &ops {
                let img = &images[op];
                let mut next = Vec::with_capacity(partial.len() * img.len());
                for (pc, plist) in &partial {
                    for &(target, t) in img {
                        let mut l = plist.clone();
                        l.push(target);
                        next.push((pc * t, l));
                    }
                }
                partial = next;
            }
            for (pc, l) in partial {
                out.accumulate(pc, &l);
            }
        }
        out.prune();
        Ok(out)
    }

    /// `⟨outcome|ψ⟩` against the normalized occupation-number ket.
    pub fn amplitude(&self, outcome: &Monomial) -> Complex64 {
        self.coefficient(outcome) * outcome.factorial_weight().sqrt()
    }

    pub fn norm_squared(&self) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| c.norm_sqr() * m.factorial_weight())
            .sum()
    }

    /// Probability of the exact (species-resolved) occupation pattern.
    pub fn outcome_probability(&self, outcome: &Monomial) -> Result<f64> {
        let norm = self.norm_squared();
        if norm <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(self.amplitude(outcome).norm_sqr() / norm)
    }

    /// Probability that species-blind detectors register `pattern`.
    ///
    /// For identical particles this equals [`Self::outcome_probability`]; for
    /// distinguishable particles it sums over all species assignments.
    pub fn detection_probability(&self, pattern: &[(LocalMode, u32)]) -> Result<f64> {
        let mut want = pattern.to_vec();
        want.sort();
        Ok(self
            .outcome_distribution()?
            .into_iter()
            .filter(|(m, _)| m.species_blind() == want)
            .map(|(_, p)| p)
            .sum())
    }

    /// Probability of every canonical outcome with nonzero amplitude.
    pub fn outcome_distribution(&self) -> Result<Vec<(Monomial, f64)>> {
        let norm = self.norm_squared();
        if norm <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), c.norm_sqr() * m.factorial_weight() / norm))
            .collect())
    }

    pub fn scale(&self, factor: Complex64) -> StateVector {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= factor;
        }
        out.prune();
        out
    }

    pub fn add(&self, other: &StateVector) -> StateVector {
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            *out.terms.entry(m.clone()).or_default() += c;
        }
        out.prune();
        out
    }

    /// Largest coefficient difference over the union of both supports.
    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        let mut keys: Vec<&Monomial> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .map(|k| (self.coefficient(k) - other.coefficient(k)).norm())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space() -> ModeSpace {
        ModeSpace::indistinct(
            LabelSet::new(["down", "up"]).unwrap(),
            LabelSet::new(["L", "D", "R", "U"]).unwrap(),
        )
    }

    #[test]
    fn fermion_pauli_exclusion() {
        let s = space();
        let r = s.mode("down", "R").unwrap();
        assert_eq!(canonicalize(&[r, r], Statistics::Fermion), Canonical::Zero);
    }

    #[test]
    fn fermion_single_transposition() {
        let s = space();
        let r = s.mode("down", "R").unwrap();
        let l = s.mode("down", "L").unwrap();
        match canonicalize(&[r, l], Statistics::Fermion) {
            Canonical::Term {
                coefficient,
                monomial,
            } => {
                assert_eq!(coefficient, -1.0);
                assert_eq!(monomial.entries(), &[(l, 1), (r, 1)]);
            }
            Canonical::Zero => panic!("unexpected zero"),
        }
    }

    #[test]
    fn boson_double_occupation() {
        let pol = ModeSpace::indistinct(
            LabelSet::new(["H", "V"]).unwrap(),
            LabelSet::new(["L", "D", "R", "U"]).unwrap(),
        );
        let hl = pol.mode("H", "L").unwrap();
        match canonicalize(&[hl, hl], Statistics::Boson) {
            Canonical::Term {
                coefficient,
                monomial,
            } => {
                assert_eq!(coefficient, 1.0);
                assert_eq!(monomial.entries(), &[(hl, 2)]);
            }
            Canonical::Zero => panic!("unexpected zero"),
        }
    }

    #[test]
    fn creation_on_vacuum_and_exclusion() {
        let s = space();
        let r = s.mode("down", "R").unwrap();
        let l = s.mode("down", "L").unwrap();
        let one = StateVector::vacuum(Statistics::Fermion).apply_creation(r);
        assert_eq!(one.terms().len(), 1);
        assert_eq!(one.norm_squared(), 1.0);
        assert!(one.apply_creation(r).is_zero());
        let two = one.apply_creation(l);
        let mono = Monomial::from_modes(&[l, r], Statistics::Fermion).unwrap();
        assert_eq!(two.coefficient(&mono), Complex64::new(1.0, 0.0));
        let swapped = StateVector::vacuum(Statistics::Fermion).apply_creation(l).apply_creation(r);
        assert_eq!(swapped.coefficient(&mono), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn bosonic_amplitude_carries_factorial() {
        let s = space();
        let m = s.mode("down", "L").unwrap();
        let c = Complex64::new(0.3, -0.2);
        let st = StateVector::from_terms(Statistics::Boson, [(c, vec![m, m])]);
        let mono = Monomial::from_modes(&[m, m], Statistics::Boson).unwrap();
        let amp = st.amplitude(&mono);
        assert!((amp - c * 2f64.sqrt()).norm() < 1e-15);
        assert!((st.norm_squared() - 2.0 * c.norm_sqr()).abs() < 1e-15);
    }

    #[test]
    fn zero_state_has_zero_norm() {
        let z = StateVector::zero(Statistics::Boson);
        assert_eq!(z.norm_squared(), 0.0);
        assert_eq!(
            z.outcome_probability(&Monomial::vacuum()),
            Err(Error::ZeroNorm)
        );
    }

    #[test]
    fn pruning_drops_tiny_terms() {
        let s = space();
        let m = s.mode("up", "D").unwrap();
        let st = StateVector::from_terms(Statistics::Fermion, [(Complex64::new(1e-13, 0.0), vec![m])]);
        assert!(st.is_zero());
    }

    #[test]
    fn species_blind_merges_tags() {
        let s = space();
        let m = s.mode("up", "D").unwrap();
        let mono = Monomial::from_modes(
            &[m.with_species(SpeciesTag(1)), m.with_species(SpeciesTag(2))],
            Statistics::Distinguishable,
        )
        .unwrap();
        assert_eq!(mono.species_blind(), vec![(m.local(), 2)]);
    }

    #[test]
    fn label_set_rejects_duplicates() {
        assert!(LabelSet::new(["a", "a"]).is_err());
        assert!(LabelSet::new(Vec::<String>::new()).is_err());
    }
}
