//! Brown measure of `X = p + iq` for freely independent Hermitian `p`, `q`
//! with two-atom spectral laws, plus a Haar-rotated random matrix model and
//! tools to compare the two.

pub mod brown;
pub mod compare;
pub mod cplx;
pub mod error;
pub mod io;
pub mod model;
pub mod quadrature;
pub mod rmt;
pub mod transforms;

pub use brown::{brown_measure, BrownDescriptor, NuDensity};
pub use compare::{ComparisonReport, Thresholds};
pub use error::{Error, Result};
pub use model::{geometry, Atom, AtomWeights, ModelParams, Orientation, SupportGeometry, TwoAtomLaw};
pub use rmt::{EnsembleConfig, EsdCloud};
