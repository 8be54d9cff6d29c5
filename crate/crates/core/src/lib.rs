//! Causal model selection for bipartite Bell experiments.
//!
//! Candidate causal models (classical common cause, classical cause-effect,
//! classical superdeterministic, quantum common cause) are fitted to a
//! training frequency table by multistart Nelder–Mead and ranked by their
//! squared-error loss on an independent test table. Parametric bootstrap
//! supplies error bars; a simulator produces entangled or dephased
//! two-photon data.

pub mod behavior;
pub mod chart;
pub mod classical;
pub mod error;
pub mod io;
pub mod optimizer;
pub mod params;
pub mod quantum;
pub mod selection;
pub mod simulator;

pub use behavior::{normalize, signalling_deficit, sq_loss, Behavior, CountTable, Scenario};
pub use error::{Error, Result};
pub use optimizer::{fit, FitResult, OptimizerConfig};
pub use params::{ModelFamily, ModelSpec, ParamVector};
pub use selection::{adjudicate, AdjudicationConfig, AdjudicationReport};
