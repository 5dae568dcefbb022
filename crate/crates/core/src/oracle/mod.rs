//! Reference results and randomized differential testing.

pub mod dd;
pub mod gen;
pub mod reference;
pub mod report;

pub use gen::{gen_case, gen_cases, special_values, Case, CaseProfile, ProfileName};
pub use reference::{
    exact_reciprocal_scale, relative_error, relative_error_parts, ulp_distance, Reference,
    WideComplex,
};
pub use report::{
    error_report, error_report_for, Engine, ErrorReport, Execution, Failure, FailureKind,
};
