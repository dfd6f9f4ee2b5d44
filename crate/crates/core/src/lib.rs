//! Hiding a classical bit in mixtures of Bell states.
//!
//! The hider encodes `b` in the parity of the number of singlets among `n`
//! Bell pairs shared between Alice and Bob. This crate builds those states
//! exactly, certifies how well any PPT (hence any LOCC) two-outcome
//! measurement can tell them apart by solving a linear program over
//! Bell-diagonal POVMs, simulates both preparation procedures and a family of
//! local attack strategies, and composes blocks to hide several bits.
//!
//! Module map:
//!
//! * [`bellcode`]: two-bit labels for Bell products, local Pauli action, counts.
//! * [`states`]: the hiding states, their recursive and Werner constructions.
//! * [`dense`]: explicit `4^n × 4^n` oracle matrices (n ≤ 4).
//! * [`povmopt`]: PPT constraints, twirling, and the certifying LP.
//! * [`prep`]: one-singlet recursive sampler and random-Clifford preparation.
//! * [`locc`]: exact enumeration of local measurement strategies and the unlock.
//! * [`multibit`]: block encoding of several bits and block-size scaling.

pub mod bellcode;
pub mod dense;
pub mod error;
pub mod locc;
pub mod multibit;
pub mod povmopt;
pub mod prep;
pub mod rational;
pub mod states;
pub mod tolerance;

pub use bellcode::{
    alternating_sum, enumerate_strings, parity_class_size, pauli_act, singlet_count, BellString,
    BellSymbol, Parity, PauliString, PauliSymbol,
};
pub use dense::DenseOperator;
pub use error::{Error, Result};
pub use locc::{InfoReport, MeasurementStrategy, StrategyTranscript};
pub use multibit::MultibitEncoding;
pub use povmopt::{BellDiagonalPovm, SecurityCertificate};
pub use prep::{PrepSample, StabilizerState};
pub use rational::Rational;
pub use states::{BellDiagonalState, WernerForm};

/// Crate version, embedded in serialized outputs.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
