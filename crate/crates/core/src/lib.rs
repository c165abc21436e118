//! Virial inversion toolkit: formal power series over finite species spaces,
//! graph coefficients of the cluster expansion, the tree fixed point of the
//! inverse map, and convergence certificates.

pub mod applications;
pub mod certificate;
pub mod error;
pub mod fps;
pub mod graphs;
pub mod homogeneous;
pub mod inversion;
pub mod io;
pub mod report;
pub mod scalar;
pub mod species;
pub mod tree;

pub use certificate::{BoundCertificate, Condition};
pub use error::{Error, Result};
pub use fps::{FormalSeries, Limits, RootedFamily, SymTensor};
pub use report::ResidualReport;
pub use scalar::{Analytic, Rational, Scalar};
pub use species::{
    build_mayer, c_bar, check_stability, Energy, FMatrix, MayerMatrices, MeasureVec, PairPotential, Payload, Species,
    SpeciesSpace,
};
