//! Tight Bell correlation inequalities for N-party scenarios with three
//! dichotomic settings per party.
//!
//! Facets of the correlation polytope are generated from admissible sign
//! functions and every geometric claim is checked with exact arithmetic:
//! determinants, ranks and linear programs all run over arbitrary-precision
//! integers and rationals.

pub mod error;
pub mod inequality;
pub mod linalg;
pub mod membership;
pub mod polytope;
pub mod records;
pub mod signfn;
pub mod verify;

pub use error::{Error, Result};
pub use inequality::{FaceCertificate, Inequality};
pub use linalg::{IntVector, RatVector, Rational};
pub use membership::{FeasibilityResult, Witness};

pub use polytope::{CorrelationTensor, LocalOrder, Polytope, Scenario, Vertex};
pub use signfn::{Enumeration, FourierSpectrum, SignFunction};
