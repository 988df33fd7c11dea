//! Parametric state models fitted to quadrature records by weighted least squares.

mod lm;
mod model;

pub use lm::{
    compare_calibration, fit, grid_search_init, reduced_chi_squared, CalibrationReport, FitOptions, FitResult,
    ParamComparison,
};
pub use model::{
    bounds, check_bounds, model_predict, ModelEvaluator, ModelFamily, ParamMap, StateModel, B_MAX, MAX_AMPLITUDE, R_MAX,
};
