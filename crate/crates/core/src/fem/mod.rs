//! Two-dimensional P1 finite elements on the thin ladder domain.

pub mod assembly;
pub mod bands;
pub mod mesh;
pub mod quasimode;
pub mod reference;
pub mod supercell;

use serde::{Deserialize, Serialize};

/// Eigensolver controls shared by the cell and supercell solves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    /// Relative backward error required of every returned pair.
    pub tol: f64,
    /// Seed of the Lanczos start vector.
    pub seed: u64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            tol: 1e-10,
            seed: 0x5EED,
        }
    }
}

pub use assembly::{
    assemble_bloch_pencil, assemble_supercell_pencil, bloch_phase, element_matrices, DofMap,
    HermitianPencil,
};
pub use bands::{
    cell_eigenvalues, fem_bloch_bands, fem_bloch_bands_with, theta_grid, BandEdge, FemBand,
    FemBlochBands, FemGap,
};
pub use mesh::{build_cell_mesh, build_supercell_mesh, BoundaryEdge, BoundaryTag, Mesh, MeshKind};
pub use quasimode::{
    pseudo_mode, quasimode_residual, quasimode_residual_report, QuasimodeResidual,
};
pub use reference::{
    neumann_rectangle_check, rectangle_eigenvalues, rectangle_exact, RectangleCheck,
};
pub use supercell::{
    gap_window, localized_modes, localized_modes_full, LocalizedMode, LocalizedModes,
    LocalizedSolve,
};
