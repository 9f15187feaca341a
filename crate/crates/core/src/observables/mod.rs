//! Analysis layer shared by the classical and quantum engines.

mod husimi;
mod portrait;
mod series;

pub use husimi::{husimi, HusimiGrid, HusimiOptions};
pub use portrait::{poincare_histogram, PhaseGrid, PhaseWindow, PoincareHistogram};
pub use series::{
    blocked_mean, detect_asymptote, detect_transient_peak, mean, Asymptote, CurrentEntry,
    CurrentSeries, NeumaierSum, SeriesError, TransientPeak, DEFAULT_PEAK_PROMINENCE,
};
