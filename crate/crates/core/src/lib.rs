//! Tangle hierarchies and monogamy inequalities for multi-qubit states.
//!
//! The crate computes one- and two-tangles in closed form, the recursive
//! n-tangle with convex-roof mixed-state terms, and the CKW and strong
//! monogamy residuals built from them. Generalized W-class states get
//! dedicated constructors and analytic cross-checks.
//!
//! ```
//! use monotangle::{monogamy, wclass};
//!
//! let params = wclass::WClassParams::w_state(4).unwrap();
//! let report = monogamy::verify_saturation(&params, &Default::default()).unwrap();
//! assert!(report.saturated_sm);
//! ```

pub mod cli;
pub mod error;
pub mod monogamy;
pub mod qstate;
pub mod random;
pub mod roof;
pub mod tangle;
pub mod wclass;

pub use error::{Error, Result};
pub use monogamy::{MonogamyConfig, MonogamyReport, Tolerances};
pub use qstate::{partial_trace, DensityOperator, QubitSubset, StateVector, C64};
pub use roof::{RoofConfig, RoofResult, WeightedEnsemble};
pub use tangle::{IndexOrdering, IndexVector, NTangle, TangleValue};
pub use wclass::{WClassParams, WClassReduction};
