//! Closed-form eigenfunctions, the local analysis at the crest, and the
//! exact membership inequalities.

mod indicial;
mod profiles;
mod reconstruction;

pub use indicial::{
    adjoint_constant_system, indicial_roots, membership, AdjointConstantReport, Membership,
    MembershipOperator, MembershipSpace,
};
pub use profiles::{
    adjoint_k_profile, eigfun_l0, eigfun_l0_adjoint, momentum_profile, sample_ode_residuals,
    BranchConstants, EigenfunctionSpec, ProfileKind, ResidualSweep,
};
pub use reconstruction::{
    f_ode_residual, fit_local_exponent, reconstruct_eigenfunction, ExponentReport, FResidualReport,
    FitWindow,
};
