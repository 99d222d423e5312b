//! Dense discretizations of L0, L and L*, their spectra, and the exact band geometry.

mod assembly;
mod bands;
mod projection;
mod spectrum;

pub use assembly::{
    apply_l_upwind, assemble_l, assemble_l0, assemble_l0_with, assemble_l_adjoint,
    assemble_l_adjoint_with, assemble_l_with, OperatorMatrix, OperatorTag, Stencil,
};
pub use bands::{band_prediction, subspace_eigenvalues, BandPrediction, Space, SubspacePair};
pub use projection::{
    projected_eigenvalues, projected_matrix, richardson_projected_eigenvalues, ProjectionReport,
};
pub use spectrum::{band_map, compute_spectrum, BandMapRow, SpectrumConfig, SpectrumReport};
