//! chshlab — a correlation laboratory for the CHSH scenario.
//!
//! Three regimes of bipartite correlations live side by side here, each with
//! the machinery to build models, evaluate them, and certify their bounds:
//!
//! - **Classical** (CHSH ≤ 2): finite local-hidden-variable ensembles, exact
//!   and Monte Carlo evaluation, and the bound by exhaustive enumeration of
//!   the 16 deterministic strategies ([`lhv`]).
//! - **Quantum** (CHSH ≤ 2√2): two-qubit strategies, the CHSH operator with
//!   its spectral-norm and operator-identity certificates, and numerical
//!   optimization of measurement settings ([`quantum`], [`optimize`]).
//! - **Super-quantum** (CHSH ≤ 4): Popescu–Rohrlich boxes, the noisy-box
//!   family of every intermediate strength, and the ℓ^p-norm toy model whose
//!   bound 2·2^{1/p} sweeps all three regimes ([`superquantum`]).
//!
//! On top of the models sit the van Dam inner-product protocol — computing a
//! distributed Boolean function with one communicated bit once boxes are
//! strong enough ([`commcomplexity`]) — and the two-knob surface mixing the
//! quantum angle curve with PR-box weight ([`surface`]).
//!
//! The crate's own currency is the [`behavior::Behavior`]: every model turns
//! into a joint outcome distribution before CHSH values, no-signaling checks,
//! or mixtures are computed.
//!
//! Start with the `examples/` directory — one runnable example per
//! capability — or the `chshlab` binary, which fronts the same operations as
//! subcommands (`eval`, `certify`, `optimize`, `surface`, `vandam`).

pub mod behavior;
pub mod cli;
pub mod commcomplexity;
pub mod error;
pub mod lhv;
pub mod linalg;
pub mod optimize;
pub mod quantum;
pub mod rng;
pub mod superquantum;
pub mod surface;

pub use behavior::{
    classify, Behavior, ChshReport, CorrelationTable, Regime, Sign, CLASSICAL_BOUND,
    MAXIMAL_CHSH, TSIRELSON_BOUND,
};
pub use error::{Error, Result};
pub use lhv::{classical_max, DeterministicStrategy, LhvModel};
pub use optimize::optimize_settings;
pub use quantum::{
    chat, chat_squared_identity, quantum_behavior, singlet, MeasurementSettings, QuantumStrategy,
    StateVector,
};
pub use superquantum::{noisy_box, pnorm_chsh_bound, pr_box, PNormSpace};
