#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distributions;
pub mod error;
pub mod grid;
pub mod oscillatory;
pub mod physical_state;
pub mod reduction;
pub mod verify;
pub mod wavepacket;

pub use distributions::{
    flux_toa, moments, naive_norm_crosscheck, position_density, relational_toa,
    semiclassical_toa, total_variation_distance, Moments, NaiveCrosscheck, TimeDensity,
};
pub use error::{Result, ToaError};
pub use grid::{MomentumGrid, PositionGrid, TimeGrid};
pub use oscillatory::{method_crosscheck, toa_amplitude_batch, QuadratureMethod};
pub use physical_state::{
    half_axis, physical_inner_product, HalfAxis, PhysicalState, Sector,
    CLOCK_POVM_NORMALIZATION,
};
pub use verify::{
    kijowski_reference, run_verify, run_verify_with_fault, Comparison, Fault, InvariantCheck,
    VerifyLevel, VerifyReport,
};
pub use wavepacket::MomentumWavefunction;
