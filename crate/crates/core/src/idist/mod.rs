//! Infinitely divisible laws: triplets, Lévy measures, cumulants, sampling.

mod cumulant;
mod ecf;
pub(crate) mod engine;
pub mod mass;
mod measure;
mod polar;
mod radial;
mod sample;
mod transform;
mod triplet;

pub use cumulant::{cumulant, cumulant_tol, log_moment, CumulantValue};
pub(crate) use cumulant::scale_series_cumulant;
pub use ecf::{ecf, ecf_radius, EcfGrid, ECF_Q};
pub use mass::{MassLaw, MassPiece, MassTerm};
pub use measure::{Atom, LevyComponent, LevyMeasure, ScaleLattice};
pub use polar::{polar_atoms, PolarDecomposition, PolarDirection, RadialLattice};
pub use radial::{KProfile, RadialDensity, RadialProfile};
pub use sample::{sample, stream_rng, IncrementSampler, SampleBatch, SamplerConfig, SamplerMeta, Scheme, CHUNK};
pub use transform::{convolve, scale_and_time};
pub use triplet::{LevyTriplet, ValidationReport, Violation, PSD_TOL};
