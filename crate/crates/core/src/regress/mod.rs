//! Ordinary least squares with full inference, and the week-over-week
//! relaxation design builder.

mod ols;
mod relaxation;
mod report;
pub mod student_t;

pub use ols::{ols_fit, DesignMatrix, FStat, Interval, OlsFit, Prediction, RegressError, INTERCEPT};
pub use relaxation::{
    build_relaxation_design, RelaxationDesign, RelaxationError, RelaxationObservation, WEEKEND_COLUMN,
};
pub use report::{significance_stars, FStatReport, FitReport, TermReport};
