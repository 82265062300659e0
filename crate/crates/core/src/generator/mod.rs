//! Generator of the thermostatted Kac walk on even Hermite sectors.
//!
//! After the ground-state transform the generator is `mu L_T + lambda L_K`
//! acting on `L^2(gamma)`, in reduced velocities `u = sqrt(beta) v`. Each
//! space `L_{2l}` spanned by `H_{2 alpha}`, `|alpha| = l`, is invariant, so
//! the operator is assembled one sector at a time.

mod assemble;
mod basis;
mod gaps;
mod kac;

pub use assemble::{
    build_comparison, build_full, build_lk, build_lr, build_lt, build_radial_projector,
    direct_sum, thermostat_eigenvalue, OperatorTag, SectorMatrix,
};
pub use basis::{hermite_norm_sq, SectorBasis, Truncation};
pub use gaps::{
    first_gap, kac_l4_eigenvector, lower_root, second_gap, second_gap_limit, second_gap_matrix,
    second_gap_quadratic, sector_gap_bound, FirstGap, SecondGap,
};
pub use kac::apply_q_monomial;
