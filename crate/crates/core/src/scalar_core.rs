//! Floating-point environment constants and the reciprocal scaling plan.
//!
//! A [`ScalePlan`] is one or two multipliers whose product is `1/a`. Applying
//! the steps in order to a vector divides it by `a` without a complex
//! division and without spurious overflow or underflow in the multipliers.
//!
//! For `a = ar + ai*i` with both parts nonzero the reciprocal is written as
//! `1/ur - (1/ui)*i` where
//!
//! ```text
//! ur = ar + ai * (ai / ar)
//! ui = ai + ar * (ar / ai)
//! ```
//!
//! and the magnitudes of `ur` and `ui` decide whether a power-of-two
//! pre- or post-scaling by `SFMIN` is needed.

use std::fmt;

use arrayvec::ArrayVec;
use serde::{Deserialize, Serialize};

use crate::arith::{Arith, Tally};
use crate::complex::Complex;
use crate::error::{Error, Result};
use crate::real::{Precision, Real};

/// Per-precision constants, all exact in binary64.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FpEnv {
    pub precision: Precision,
    /// Smallest normal number whose reciprocal is finite.
    pub sfmin: f64,
    /// Unit roundoff.
    pub eps: f64,
    /// Largest finite number.
    pub overflow: f64,
    pub min_subnormal: f64,
}

impl FpEnv {
    pub fn of<T: Real>() -> FpEnv {
        FpEnv {
            precision: T::PRECISION,
            sfmin: T::SFMIN.widen(),
            eps: T::UNIT_ROUNDOFF.widen(),
            overflow: T::OVERFLOW.widen(),
            min_subnormal: T::MIN_SUBNORMAL.widen(),
        }
    }
}

pub fn fp_env(precision: Precision) -> FpEnv {
    match precision {
        Precision::Binary32 => FpEnv::of::<f32>(),
        Precision::Binary64 => FpEnv::of::<f64>(),
    }
}

/// `k*u / (1 - k*u)`, the relative error bound of a k-operation product chain.
pub fn gamma(k: u32, env: &FpEnv) -> Result<f64> {
    let ku = k as f64 * env.eps;
    if k == 0 || ku >= 1.0 {
        return Err(Error::GammaUndefined { k, ku });
    }
    Ok(ku / (1.0 - ku))
}

/// `SFMIN <= |v| <= 1/SFMIN`; false for NaN.
pub fn safe_range<T: Real>(v: T) -> bool {
    let m = v.abs();
    m >= T::SFMIN && m <= T::SFMIN_RECIP
}

/// Branch of the reciprocal algorithm a denominator falls into.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CaseTag {
    /// Imaginary part is zero; real reciprocal scaling.
    RealDenominator,
    /// Real part is zero, imaginary part is not.
    ImaginaryDenominator,
    /// Both `ur` and `ui` are in the safe range.
    FullSafe,
    /// `|ur|` or `|ui|` is below `SFMIN`.
    FullSmall,
    /// A part of the denominator is infinite or NaN.
    FullInfOperand,
    /// `ur` or `ui` overflowed although the denominator is finite.
    FullInfRescue,
    /// `ur` or `ui` is finite but above `1/SFMIN`.
    FullLarge,
}

impl CaseTag {
    pub const ALL: [CaseTag; 7] = [
        CaseTag::RealDenominator,
        CaseTag::ImaginaryDenominator,
        CaseTag::FullSafe,
        CaseTag::FullSmall,
        CaseTag::FullInfOperand,
        CaseTag::FullInfRescue,
        CaseTag::FullLarge,
    ];

    /// Cases where both parts of the denominator are nonzero.
    pub fn is_full(self) -> bool {
        !matches!(
            self,
            CaseTag::RealDenominator | CaseTag::ImaginaryDenominator
        )
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// One multiplier of a plan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScaleStep<T> {
    /// Multiply by `c + 0i`.
    Real(T),
    /// Multiply by `0 + t*i`.
    Imaginary(T),
    /// Multiply by a general complex factor.
    Complex(Complex<T>),
}

impl<T: Real> ScaleStep<T> {
    pub fn value(&self) -> Complex<T> {
        match *self {
            ScaleStep::Real(c) => Complex::new(c, T::zero()),
            ScaleStep::Imaginary(t) => Complex::new(T::zero(), t),
            ScaleStep::Complex(c) => c,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ScaleStep::Real(_) => "real",
            ScaleStep::Imaginary(_) => "imaginary",
            ScaleStep::Complex(_) => "complex",
        }
    }

    /// Real multiplications and additions this step costs per element.
    pub fn flops_per_element(&self) -> (u64, u64) {
        match self {
            ScaleStep::Real(_) | ScaleStep::Imaginary(_) => (2, 0),
            ScaleStep::Complex(_) => (4, 2),
        }
    }

    #[inline(always)]
    pub(crate) fn apply<A: Arith<T>>(&self, v: Complex<T>, ops: &mut A) -> Complex<T> {
        match *self {
            ScaleStep::Real(c) => Complex::new(ops.mul(v.re, c), ops.mul(v.im, c)),
            ScaleStep::Imaginary(t) => Complex::new(-ops.mul(v.im, t), ops.mul(v.re, t)),
            ScaleStep::Complex(c) => Complex::new(
                ops.mul(v.re, c.re) - ops.mul(v.im, c.im),
                ops.mul(v.re, c.im) + ops.mul(v.im, c.re),
            ),
        }
    }
}

/// Ordered multipliers whose product is the reciprocal of a denominator.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalePlan<T> {
    steps: ArrayVec<ScaleStep<T>, 2>,
    pub case: CaseTag,
    /// Real divisions performed while building the plan.
    pub division_count: u32,
    /// A product or quotient formed while building the plan rounded below
    /// the normal range.
    pub underflow: bool,
}

impl<T: Real> ScalePlan<T> {
    fn new(case: CaseTag, steps: &[ScaleStep<T>], tally: Tally) -> Self {
        ScalePlan {
            steps: steps.iter().copied().collect(),
            case,
            division_count: tally.divisions,
            underflow: tally.underflow,
        }
    }

    pub fn steps(&self) -> &[ScaleStep<T>] {
        &self.steps
    }

    /// Applies every step to one value.
    pub fn apply(&self, v: Complex<T>) -> Complex<T> {
        self.steps
            .iter()
            .fold(v, |acc, s| s.apply(acc, &mut crate::arith::Plain))
    }

    /// Real multiplications and additions per element for the whole plan.
    pub fn flops_per_element(&self) -> u64 {
        self.steps
            .iter()
            .map(|s| {
                let (m, a) = s.flops_per_element();
                m + a
            })
            .sum()
    }
}

/// `(ur, ui)` with `ur = ar + ai*(ai/ar)` and `ui = ai + ar*(ar/ai)`.
///
/// Expects both parts nonzero.
pub fn compute_uv<T: Real>(a: Complex<T>) -> (T, T) {
    let uv = Uv::compute(a, &mut Tally::default());
    (uv.ur, uv.ui)
}

struct Uv<T> {
    /// ai / ar
    q_ir: T,
    /// ar / ai
    q_ri: T,
    ur: T,
    ui: T,
}

impl<T: Real> Uv<T> {
    fn compute<A: Arith<T>>(a: Complex<T>, ops: &mut A) -> Self {
        let q_ir = ops.div(a.im, a.re);
        let ur = a.re + ops.mul(a.im, q_ir);
        let q_ri = ops.div(a.re, a.im);
        let ui = a.im + ops.mul(a.re, q_ri);
        Uv { q_ir, q_ri, ur, ui }
    }
}

/// Steps dividing by a real value `d`, as in real reciprocal scaling.
///
/// `place` wraps a reciprocal into the right step kind so the same logic
/// serves real and purely imaginary denominators.
fn one_part_steps<T: Real>(
    d: T,
    place: impl Fn(T) -> ScaleStep<T>,
    tally: &mut Tally,
) -> ArrayVec<ScaleStep<T>, 2> {
    let mut steps = ArrayVec::new();
    let m = d.abs();
    if m < T::SFMIN {
        // reciprocal would overflow: multiply by SFMIN/d, then by 1/SFMIN
        steps.push(place(tally.div(T::SFMIN, d)));
        steps.push(ScaleStep::Real(T::SFMIN_RECIP));
    } else if m > T::SFMIN_RECIP {
        // reciprocal would be subnormal: pre-scale by SFMIN
        let scaled = tally.mul(T::SFMIN, d);
        steps.push(ScaleStep::Real(T::SFMIN));
        steps.push(place(tally.div(T::one(), scaled)));
    } else {
        // safe range or NaN
        steps.push(place(tally.div(T::one(), d)));
    }
    steps
}

/// Plan for dividing by a real number, the building block of `rscl`.
pub fn real_reciprocal_plan<T: Real>(a: T) -> ScalePlan<T> {
    let mut tally = Tally::default();
    let steps = one_part_steps(a, ScaleStep::Real, &mut tally);
    ScalePlan::new(CaseTag::RealDenominator, &steps, tally)
}

/// Builds the multiplier sequence for dividing by `a`.
///
/// Every bit pattern is accepted. NaN parts propagate, and so does the NaN
/// produced when both parts are infinite. Infinite multipliers appear only
/// for `a = ±0 ± 0i`.
pub fn reciprocal_plan<T: Real>(a: Complex<T>) -> ScalePlan<T> {
    let zero = T::zero();
    if a.im == zero {
        return real_reciprocal_plan(a.re);
    }
    let mut tally = Tally::default();
    if a.re == zero {
        // 1/(ai*i) = -(1/ai)*i
        let steps = one_part_steps(a.im, |t| ScaleStep::Imaginary(-t), &mut tally);
        return ScalePlan::new(CaseTag::ImaginaryDenominator, &steps, tally);
    }

    let uv = Uv::compute(a, &mut tally);
    let (ur, ui) = (uv.ur, uv.ui);
    let sfmin = T::SFMIN;

    if safe_range(ur) && safe_range(ui) {
        let c = Complex::new(tally.div(T::one(), ur), -tally.div(T::one(), ui));
        return ScalePlan::new(CaseTag::FullSafe, &[ScaleStep::Complex(c)], tally);
    }

    if ur.abs() < sfmin || ui.abs() < sfmin {
        // Both are small here; scale the reciprocal up, then back down.
        let c = Complex::new(tally.div(sfmin, ur), -tally.div(sfmin, ui));
        return ScalePlan::new(
            CaseTag::FullSmall,
            &[ScaleStep::Complex(c), ScaleStep::Real(T::SFMIN_RECIP)],
            tally,
        );
    }

    if !a.is_finite() {
        // ur and ui are both infinite, or NaN
        let c = Complex::new(tally.div(T::one(), ur), -tally.div(T::one(), ui));
        return ScalePlan::new(CaseTag::FullInfOperand, &[ScaleStep::Complex(c)], tally);
    }

    if ur.is_infinite() || ui.is_infinite() {
        // SFMIN*ur and SFMIN*ui from scaled operands; the quotients from
        // compute_uv are reused so no further division is needed.
        let (sar, sai) = (tally.mul(sfmin, a.re), tally.mul(sfmin, a.im));
        let ur_s = sar + tally.mul(sai, uv.q_ir);
        let ui_s = sai + tally.mul(sar, uv.q_ri);
        let c = Complex::new(tally.div(T::one(), ur_s), -tally.div(T::one(), ui_s));
        return ScalePlan::new(
            CaseTag::FullInfRescue,
            &[ScaleStep::Real(sfmin), ScaleStep::Complex(c)],
            tally,
        );
    }

    let (sur, sui) = (tally.mul(sfmin, ur), tally.mul(sfmin, ui));
    let c = Complex::new(tally.div(T::one(), sur), -tally.div(T::one(), sui));
    ScalePlan::new(
        CaseTag::FullLarge,
        &[ScaleStep::Real(sfmin), ScaleStep::Complex(c)],
        tally,
    )
}
