//! Finite-blocklength physical-layer security over quasi-static Rayleigh
//! fading channels.
//!
//! The crate models a transmitter (possibly multi-antenna) sending wiretap-
//! coded packets of finite blocklength to a legitimate receiver while an
//! eavesdropper listens. It provides:
//!
//! - decoding-error and information-leakage probabilities under exact,
//!   piecewise-linear, and asymptotic evaluation models ([`leakage`]);
//! - the fading distributions and SINR algebra behind them ([`channel`]);
//! - secrecy-throughput maximization over blocklength, code rates, on-off
//!   threshold, and artificial-noise power split, for adaptive and
//!   non-adaptive designs ([`single_opt`], [`multi_opt`]);
//! - independent Monte-Carlo estimators, grid-search optimizers, and
//!   finite-difference audits used to validate the analytic path ([`oracle`]).
//!
//! A narrative guide with runnable examples lives in `book/`; its code
//! snippets run as doctests of this crate.

pub mod channel;
pub mod leakage;
pub mod multi_opt;
pub mod oracle;
pub mod single_opt;
pub mod specfun;

pub use channel::{AnAllocation, ChannelSampler, ChannelSnapshot, ParamError, SystemParams};
pub use leakage::{LeakageError, LeakageModel};
pub use multi_opt::{AoResult, AoState, MultiOptError};
pub use single_opt::{DesignPoint, SingleOptError};
pub use specfun::{SpecFunError, Tolerance};

// Run every code block of the guide as a doctest, so the book cannot drift
// from the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/finite-blocklength.md")]
    pub struct FiniteBlocklength;
    #[doc = include_str!("../../../book/src/channel-model.md")]
    pub struct ChannelModel;
    #[doc = include_str!("../../../book/src/leakage.md")]
    pub struct Leakage;
    #[doc = include_str!("../../../book/src/single-antenna.md")]
    pub struct SingleAntenna;
    #[doc = include_str!("../../../book/src/artificial-noise.md")]
    pub struct ArtificialNoise;
    #[doc = include_str!("../../../book/src/validation.md")]
    pub struct Validation;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
