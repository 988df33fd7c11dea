//! Sampling grids, symmetry completion, bias subtraction and Fourier
//! reconstruction of quasiprobabilities from sampled χ.

mod chigrid;
mod dft;
mod grid;
pub(crate) mod io;
mod oracle;

pub use chigrid::{complete_by_symmetry, subtract_bias, ChiGrid, ChiPoint, MirrorMode, Provenance};
pub use dft::{dft_wigner, dft_wigner_direct, parity_from_grid, resample_to_lattice, WignerGrid, WignerPoint};
pub use grid::{build_grid, GridKind, GridSpec};
pub use io::{
    read_chi_grid_csv, read_chi_grid_json, read_wigner_grid_csv, write_chi_grid_csv, write_chi_grid_json, write_header,
    write_wigner_grid_csv, write_wigner_grid_json, Header,
};
pub use oracle::{assemble_chi_grid, dft_error_oracle, measurement_plan, wigner_deviation_percent, MeasurementPlan};
