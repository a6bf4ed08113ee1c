//! Exact computations for involutive random walks on `{0, ..., n-1}`: weights,
//! transition matrices, binomial transforms, spectra, classification of
//! reversible walks, and their continuum limits.

pub mod classify;
pub mod continuum;
pub mod error;
pub mod exactnum;
pub mod matrix;
pub mod poly;
pub mod quadrature;
pub mod spectral;
pub mod transform;
pub mod walk;
pub mod weights;

pub use classify::{Classification, SamplerConfig, SearchReport};
pub use continuum::{ContinuousWalk, PolyFunction};
pub use error::{Error, Result};
pub use exactnum::{parse_rational, rat, Rational};
pub use matrix::Matrix;
pub use poly::Poly;
pub use spectral::{EigenSystem, MixingReport};
pub use transform::{LambdaSeq, PascalMatrix, PropertyReport, StochasticityReport};
pub use walk::{Distribution, ErgodicityReport, SubsetWalk, WalkMatrix};
pub use weights::{CustomWeight, DomainLimit, WeightSpec};
