//! Prebuilt experiments.

mod interferometer;
mod signaling;

pub use interferometer::{
    li_circuit, li_space, li_stages, swap_circuit, swap_space, swap_stages, CircuitRun, PhaseSettings,
};
pub use signaling::{
    clone_distribution, signaling_decode_exact, signaling_decode_mc, sorter_cascade, Basis, CloneEnsemble,
    DecodeProbabilities, DetectorDistribution, McEstimate, QubitState, SignalVariant, RNG_ALGORITHM,
};
