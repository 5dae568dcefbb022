//! Scaling complex vectors by the reciprocal of a complex scalar.
//!
//! [`crscl`] divides a strided complex vector by `a` using one reciprocal
//! plan and plain multiplications: no complex division, at most four real
//! divisions, and no overflow or underflow in the multipliers unless `a` is
//! zero. The crate also carries an LU factorization that uses it for pivot
//! scaling, a wider-precision reference for differential testing, and the
//! text formats used by the command-line tool.

mod arith;
pub mod complex;
pub mod error;
pub mod hexfloat;
pub mod lu_factor;
pub mod oracle;
pub mod real;
pub mod scalar_core;
pub mod textfmt;
pub mod vector_scaling;

pub use complex::Complex;
pub use error::{Error, Result};
pub use real::{Precision, Real};
pub use scalar_core::{
    compute_uv, fp_env, gamma, real_reciprocal_plan, reciprocal_plan, safe_range, CaseTag, FpEnv,
    ScalePlan, ScaleStep,
};
pub use vector_scaling::{
    complex_div, crscl, naive_div_scale, rscl, scal_complex, scal_imaginary, scal_real, Division,
    FlopCounter, FlopSink, NoFlops, StridedVector,
};
