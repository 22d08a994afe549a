//! A numerical laboratory for operator inequalities on finite matrix
//! algebras: matrix geometric means, constructive positive linear maps,
//! certificate-producing inequality verifiers, and spectral-scale machinery,
//! all with quantified Loewner-order margins.

pub mod certify;
pub mod ensemble;
pub mod error;
pub mod io;
pub mod linalg;
pub mod means;
pub mod posmaps;
pub mod spectral;
pub mod suite;

pub use error::{Error, Result};
pub use linalg::{CMatrix, Tolerance};
