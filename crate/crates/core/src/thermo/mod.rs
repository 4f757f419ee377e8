//! Spectral tracking, eigenbasis generator and the energy ledger.
//!
//! For `rho = sum_j lambda_j |psi_j><psi_j|` evolving under an open dynamics,
//! the rate of change of `<O>` splits into
//!
//! ```text
//! d<O>/dt = sum_j lambda_dot_j <psi_j|O|psi_j>   (eigenvalue / thermal term)
//!         + <dO/dt>                              (explicit time dependence)
//!         + i <[Omega, O]>                       (coherence term)
//! ```
//!
//! where `Omega` generates the motion of the eigenvectors. With `O = H` the
//! first term is the heat rate and the other two form the work rate
//! `<dH/dt + i[Omega, H]>`.

mod assignment;
mod audit;
mod fd;
mod frame;
mod omega;
mod rates;

pub use audit::{
    analyze, cumulative_integral, first_law_audit, thermo_records, track_spectrum, AnalysisOptions, SampleAnalysis,
    ThermoRecord, DEFAULT_AUDIT_TOL,
};
pub use fd::{FdEstimate, FdStencil, DEFAULT_FD_STEP};
pub use frame::{SpectralFrame, AMBIGUITY_TOL, DEFAULT_DEG_TOL, GREEDY_OVERLAP_MIN};
pub use omega::{reconstruct_omega, Gauge, OmegaGenerator, DEFAULT_LEAK_TOL};
pub use rates::{
    commutes, cyclic_coherence_forms, ehrenfest_rate, entropy_and_rate, heat_rate,
    power_operator, robertson_check, EhrenfestDecomposition, RobertsonCheck, LAMBDA_FLOOR,
    ROBERTSON_SLACK,
};
