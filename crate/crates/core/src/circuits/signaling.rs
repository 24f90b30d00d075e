//! Basis-discrimination experiment fed by ideal clones.
//!
//! The cloning stage is modeled at the distribution level: after Alice's
//! basis choice Bob holds `n` identical copies of a qubit, each carried by
//! one binary degree of freedom of a particle, and reads them out with a
//! cascade of sorters in the computational basis. Bob guesses "Z" when all
//! readouts agree and "X" otherwise.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Identifier of the generator used by [`signaling_decode_mc`].
pub const RNG_ALGORITHM: &str = "ChaCha8Rng (rand_chacha 0.3, seed_from_u64)";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    pub amp0: Complex64,
    pub amp1: Complex64,
}

impl QubitState {
    pub fn new(amp0: Complex64, amp1: Complex64) -> Result<Self> {
        let n = amp0.norm_sqr() + amp1.norm_sqr();
        if (n - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("qubit norm² {n} ≠ 1")));
        }
        Ok(QubitState { amp0, amp1 })
    }

    pub fn zero() -> Self {
        QubitState {
            amp0: Complex64::new(1.0, 0.0),
            amp1: Complex64::new(0.0, 0.0),
        }
    }

    pub fn one() -> Self {
        QubitState {
            amp0: Complex64::new(0.0, 0.0),
            amp1: Complex64::new(1.0, 0.0),
        }
    }

    pub fn plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        QubitState {
            amp0: Complex64::new(h, 0.0),
            amp1: Complex64::new(h, 0.0),
        }
    }

    pub fn minus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        QubitState {
            amp0: Complex64::new(h, 0.0),
            amp1: Complex64::new(-h, 0.0),
        }
    }

    /// `|⟨bit|ψ⟩|²`.
    pub fn probability(&self, bit: bool) -> f64 {
        if bit {
            self.amp1.norm_sqr()
        } else {
            self.amp0.norm_sqr()
        }
    }
}

/// Alice's measurement basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Basis {
    Z,
    X,
}

impl std::str::FromStr for Basis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "z" | "Z" => Ok(Basis::Z),
            "x" | "X" => Ok(Basis::X),
            other => Err(Error::InvalidArgument(format!("unknown basis `{other}`"))),
        }
    }
}

/// `n_dofs` identical copies of one qubit, one per degree of freedom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloneEnsemble {
    pub n_dofs: u32,
    pub per_dof_state: QubitState,
}

impl CloneEnsemble {
    pub fn new(n_dofs: u32, per_dof_state: QubitState) -> Result<Self> {
        if n_dofs == 0 {
            return Err(Error::InvalidArgument("need at least one degree of freedom".into()));
        }
        Ok(CloneEnsemble { n_dofs, per_dof_state })
    }
}

/// Detector click probabilities keyed by 1-based detector number.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectorDistribution {
    pub probs: BTreeMap<u64, f64>,
}

impl DetectorDistribution {
    pub fn probability(&self, detector: u64) -> f64 {
        self.probs.get(&detector).copied().unwrap_or(0.0)
    }

    pub fn set_probability(&self, detectors: &[u64]) -> f64 {
        detectors.iter().map(|&d| self.probability(d)).sum()
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }
}

/// Reads every degree of freedom with its sorter. Detector `d` collects the
/// outcome string whose binary value is `d − 1`, with DOF 1 as the most
/// significant bit; `D₁` is all zeros and `D_{2ⁿ}` all ones.
pub fn sorter_cascade(clones: &CloneEnsemble) -> DetectorDistribution {
    let n = clones.n_dofs;
    let p0 = clones.per_dof_state.probability(false);
    let p1 = clones.per_dof_state.probability(true);
    let probs = (0..1u64 << n)
        .map(|word| {
            let p: f64 = (0..n)
                .map(|k| if word >> (n - 1 - k) & 1 == 1 { p1 } else { p0 })
                .product();
            (word + 1, p)
        })
        .collect();
    DetectorDistribution { probs }
}

/// Joint computational-basis readout of `n` clones after Alice measured in
/// `basis`, indexed by the outcome word (DOF 1 most significant).
///
/// A Z measurement leaves Bob's clones in `|0⟩` or `|1⟩` with equal weight,
/// so the readouts are all zeros or all ones. An X measurement leaves them in
/// `|+⟩` or `|−⟩`, and every word is equally likely.
pub fn clone_distribution(basis: Basis, n: u32) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one clone".into()));
    }
    let size = 1usize << n;
    let mut dist = vec![0.0; size];
    let branches = match basis {
        Basis::Z => [QubitState::zero(), QubitState::one()],
        Basis::X => [QubitState::plus(), QubitState::minus()],
    };
    for state in branches {
        let cascade = sorter_cascade(&CloneEnsemble::new(n, state)?);
        for (d, p) in cascade.probs {
            dist[(d - 1) as usize] += 0.5 * p;
        }
    }
    Ok(dist)
}

fn all_equal(word: usize, n: u32) -> bool {
    word == 0 || word == (1usize << n) - 1
}

/// Resource Bob spends on the discrimination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "variant", content = "count")]
pub enum SignalVariant {
    /// One particle carrying `N` cloned degrees of freedom.
    Dofs(u32),
    /// `M` particles, each carrying two cloned degrees of freedom.
    Copies(u32),
}

impl SignalVariant {
    pub fn count(self) -> u32 {
        match self {
            SignalVariant::Dofs(n) | SignalVariant::Copies(n) => n,
        }
    }

    fn validate(self) -> Result<()> {
        match self {
            SignalVariant::Dofs(0) | SignalVariant::Copies(0) => {
                Err(Error::InvalidArgument("count must be at least 1".into()))
            }
            SignalVariant::Dofs(n) if n > 30 => Err(Error::InvalidArgument("at most 30 DOFs supported".into())),
            _ => Ok(()),
        }
    }
}

/// Decoding probabilities of the all-equal rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecodeProbabilities {
    /// `Pr(X_B = 0 | X_A = 0)`.
    pub given_z: f64,
    /// `Pr(X_B = 1 | X_A = 1)`.
    pub given_x: f64,
    /// `½ given_z + ½ given_x`.
    pub uniform_prior: f64,
}

impl DecodeProbabilities {
    /// The figure quoted for each variant: the prior-averaged success for
    /// the DOF variant, and the no-error probability of the X branch (the
    /// only branch that can fail) for the copies variant.
    pub fn headline(&self, variant: SignalVariant) -> f64 {
        match variant {
            SignalVariant::Dofs(_) => self.uniform_prior,
            SignalVariant::Copies(_) => self.given_x,
        }
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Exact decoding probabilities by summing over every readout the strategy
/// can see.
pub fn signaling_decode_exact(variant: SignalVariant) -> Result<DecodeProbabilities> {
    variant.validate()?;
    let (given_z, given_x) = match variant {
        SignalVariant::Dofs(n) => {
            let z = clone_distribution(Basis::Z, n)?;
            let x = clone_distribution(Basis::X, n)?;
            let pz: f64 = z.iter().enumerate().filter(|(w, _)| all_equal(*w, n)).map(|(_, p)| p).sum();
            let px: f64 = x.iter().enumerate().filter(|(w, _)| !all_equal(*w, n)).map(|(_, p)| p).sum();
            (pz, px)
        }
        SignalVariant::Copies(m) => {
            // per-particle probability of landing in the all-equal detectors
            let in_set = |basis| -> Result<f64> {
                let d = clone_distribution(basis, 2)?;
                Ok(d[0] + d[3])
            };
            let (qz, qx) = (in_set(Basis::Z)?, in_set(Basis::X)?);
            // k = number of particles outside the all-equal set; Bob answers
            // "Z" only for k = 0
            let term = |q: f64, k: u32| binomial(m, k) * q.powi((m - k) as i32) * (1.0 - q).powi(k as i32);
            let pz: f64 = term(qz, 0);
            let px: f64 = (1..=m).map(|k| term(qx, k)).sum();
            (pz, px)
        }
    };
    Ok(DecodeProbabilities {
        given_z,
        given_x,
        uniform_prior: 0.5 * given_z + 0.5 * given_x,
    })
}

/// Monte Carlo estimate of the prior-averaged decoding success.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
}

fn sample_word<R: Rng>(rng: &mut R, basis: Basis, n: u32) -> u64 {
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    match basis {
        Basis::Z => {
            if rng.gen::<bool>() {
                mask
            } else {
                0
            }
        }
        Basis::X => rng.gen::<u64>() & mask,
    }
}

/// Simulates `trials` rounds: Alice picks her bit uniformly, Bob samples his
/// readouts and applies the all-equal rule. Deterministic for a fixed seed.
pub fn signaling_decode_mc(variant: SignalVariant, trials: u64, seed: u64) -> Result<McEstimate> {
    variant.validate()?;
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    for _ in 0..trials {
        let alice = rng.gen::<bool>();
        let basis = if alice { Basis::X } else { Basis::Z };
        let guess_x = match variant {
            SignalVariant::Dofs(n) => {
                let w = sample_word(&mut rng, basis, n);
                !all_equal(w as usize, n)
            }
            SignalVariant::Copies(m) => (0..m).any(|_| {
                let w = sample_word(&mut rng, basis, 2);
                !all_equal(w as usize, 2)
            }),
        };
        if guess_x == alice {
            hits += 1;
        }
    }
    let p = hits as f64 / trials as f64;
    Ok(McEstimate {
        estimate: p,
        stderr: (p * (1.0 - p) / trials as f64).sqrt(),
        trials,
        seed,
    })
}
