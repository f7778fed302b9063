//! Metrics over session transcripts, closed-form predictions, and reports.

mod metrics;
mod report;
mod theory;

pub use metrics::{qber, Counts, TrialMetrics};
pub use report::{
    emit_report, load_report, write_security_curve, Check, CurvePoint, ExperimentReport, SecurityCurve, Summary,
    FLAT_COLUMNS, SCHEMA_VERSION,
};
pub use theory::{ie_mean, ie_sum, matching_probability, Theory};
