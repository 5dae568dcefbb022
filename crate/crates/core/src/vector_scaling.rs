//! Strided in-place scaling kernels and the reciprocal scaling entry points.

use serde::{Deserialize, Serialize};

use crate::arith::{Arith, Plain};
use crate::complex::Complex;
use crate::error::{Error, Result};
use crate::real::Real;
use crate::scalar_core::{real_reciprocal_plan, reciprocal_plan, ScalePlan, ScaleStep};

/// A BLAS-style view `x[offset + k*stride]`, `k < len`, over a buffer.
#[derive(Debug)]
pub struct StridedVector<'a, T> {
    data: &'a mut [Complex<T>],
    offset: usize,
    stride: usize,
    len: usize,
}

impl<'a, T: Real> StridedVector<'a, T> {
    pub fn new(
        data: &'a mut [Complex<T>],
        offset: usize,
        stride: usize,
        len: usize,
    ) -> Result<Self> {
        if stride == 0 {
            return Err(Error::ZeroStride);
        }
        if len > 0 {
            let last = (len - 1)
                .checked_mul(stride)
                .and_then(|s| s.checked_add(offset));
            if last.is_none_or(|l| l >= data.len()) {
                return Err(Error::StrideOutOfBounds {
                    offset,
                    stride,
                    len,
                    buffer: data.len(),
                });
            }
        }
        Ok(StridedVector {
            data,
            offset,
            stride,
            len,
        })
    }

    /// The whole buffer with unit stride.
    pub fn contiguous(data: &'a mut [Complex<T>]) -> Self {
        let len = data.len();
        StridedVector {
            data,
            offset: 0,
            stride: 1,
            len,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, k: usize) -> Option<Complex<T>> {
        (k < self.len).then(|| self.data[self.offset + k * self.stride])
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut Complex<T>> + '_ {
        let (offset, stride, len) = (self.offset, self.stride, self.len);
        let tail: &mut [Complex<T>] = if len == 0 {
            &mut []
        } else {
            &mut self.data[offset..]
        };
        tail.iter_mut().step_by(stride).take(len)
    }

    /// The addressed elements as one slice when the stride is 1.
    fn as_unit_stride(&mut self) -> Option<&mut [Complex<T>]> {
        (self.stride == 1 && self.len > 0)
            .then(|| &mut self.data[self.offset..self.offset + self.len])
    }
}

/// Receives operation counts from the kernels.
///
/// The default methods do nothing, so [`NoFlops`] costs nothing.
pub trait FlopSink {
    #[inline(always)]
    fn real_mul(&mut self, _n: u64) {}
    #[inline(always)]
    fn real_add(&mut self, _n: u64) {}
    #[inline(always)]
    fn real_div(&mut self, _n: u64) {}
    #[inline(always)]
    fn complex_mul(&mut self, _n: u64) {}
    #[inline(always)]
    fn complex_div(&mut self, _n: u64) {}
}

#[derive(Clone, Copy, Debug, Default)]
pub struct NoFlops;

impl FlopSink for NoFlops {}

/// Operation counts. `real_mul` and `real_add` hold per-element kernel work;
/// `real_div` also includes the divisions spent building a plan.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlopCounter {
    pub real_mul: u64,
    pub real_add: u64,
    pub real_div: u64,
    pub complex_mul: u64,
    pub complex_div: u64,
}

impl FlopCounter {
    /// Multiplications plus additions.
    pub fn mul_add_flops(&self) -> u64 {
        self.real_mul + self.real_add
    }

    pub fn total_flops(&self) -> u64 {
        self.real_mul + self.real_add + self.real_div
    }
}

impl FlopSink for FlopCounter {
    fn real_mul(&mut self, n: u64) {
        self.real_mul += n;
    }
    fn real_add(&mut self, n: u64) {
        self.real_add += n;
    }
    fn real_div(&mut self, n: u64) {
        self.real_div += n;
    }
    fn complex_mul(&mut self, n: u64) {
        self.complex_mul += n;
    }
    fn complex_div(&mut self, n: u64) {
        self.complex_div += n;
    }
}

/// `x_k <- x_k * c` for real `c`.
pub fn scal_real<T: Real>(x: &mut StridedVector<'_, T>, c: T, flops: &mut impl FlopSink) {
    scal_step(x, &ScaleStep::Real(c), flops);
}

/// `x_k <- x_k * (t*i)`, computed as `(-im*t, re*t)` so no `0*Inf` is formed.
pub fn scal_imaginary<T: Real>(x: &mut StridedVector<'_, T>, t: T, flops: &mut impl FlopSink) {
    scal_step(x, &ScaleStep::Imaginary(t), flops);
}

/// `x_k <- x_k * c` with the four-multiply, two-add product.
pub fn scal_complex<T: Real>(
    x: &mut StridedVector<'_, T>,
    c: Complex<T>,
    flops: &mut impl FlopSink,
) {
    scal_step(x, &ScaleStep::Complex(c), flops);
}

fn scal_step<T: Real>(
    x: &mut StridedVector<'_, T>,
    step: &ScaleStep<T>,
    flops: &mut impl FlopSink,
) {
    let (muls, adds) = step.flops_per_element();
    let n = x.len() as u64;
    flops.real_mul(muls * n);
    flops.real_add(adds * n);
    if matches!(step, ScaleStep::Complex(_)) {
        flops.complex_mul(n);
    }
    match x.as_unit_stride() {
        Some(xs) => xs.iter_mut().for_each(|v| *v = step.apply(*v, &mut Plain)),
        None => x.iter_mut().for_each(|v| *v = step.apply(*v, &mut Plain)),
    }
}

fn apply_plan<T: Real>(
    x: &mut StridedVector<'_, T>,
    plan: &ScalePlan<T>,
    flops: &mut impl FlopSink,
) {
    flops.real_div(plan.division_count as u64);
    for step in plan.steps() {
        scal_step(x, step, flops);
    }
}

/// Divides a complex vector by a real number.
pub fn rscl<T: Real>(
    x: &mut StridedVector<'_, T>,
    a: T,
    flops: &mut impl FlopSink,
) -> ScalePlan<T> {
    let plan = real_reciprocal_plan(a);
    apply_plan(x, &plan, flops);
    plan
}

/// Divides a complex vector by a complex number without complex divisions.
///
/// Returns the plan that was applied.
pub fn crscl<T: Real>(
    x: &mut StridedVector<'_, T>,
    a: Complex<T>,
    flops: &mut impl FlopSink,
) -> ScalePlan<T> {
    let plan = reciprocal_plan(a);
    apply_plan(x, &plan, flops);
    plan
}

/// Reference complex division algorithms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Division {
    /// Ratio of the smaller to the larger denominator part.
    Smith,
    /// `x * conj(a) / (ar^2 + ai^2)`.
    Textbook,
}

/// Divides `x` by `a` with the selected algorithm.
pub fn complex_div<T: Real>(
    x: Complex<T>,
    a: Complex<T>,
    division: Division,
    flops: &mut impl FlopSink,
) -> Complex<T> {
    flops.complex_div(1);
    match division {
        Division::Smith => {
            flops.real_div(3);
            flops.real_mul(3);
            flops.real_add(3);
        }
        Division::Textbook => {
            flops.real_div(2);
            flops.real_mul(6);
            flops.real_add(3);
        }
    }
    divide(x, a, division, &mut Plain)
}

pub(crate) fn divide<T: Real, A: Arith<T>>(
    x: Complex<T>,
    a: Complex<T>,
    division: Division,
    ops: &mut A,
) -> Complex<T> {
    match division {
        Division::Smith => {
            if a.re.abs() >= a.im.abs() {
                let r = ops.div(a.im, a.re);
                let d = a.re + ops.mul(a.im, r);
                let (pr, pi) = (ops.mul(x.im, r), ops.mul(x.re, r));
                Complex::new(ops.div(x.re + pr, d), ops.div(x.im - pi, d))
            } else {
                let r = ops.div(a.re, a.im);
                let d = a.im + ops.mul(a.re, r);
                let (pr, pi) = (ops.mul(x.re, r), ops.mul(x.im, r));
                Complex::new(ops.div(pr + x.im, d), ops.div(pi - x.re, d))
            }
        }
        Division::Textbook => {
            let d = ops.mul(a.re, a.re) + ops.mul(a.im, a.im);
            let nr = ops.mul(x.re, a.re) + ops.mul(x.im, a.im);
            let ni = ops.mul(x.im, a.re) - ops.mul(x.re, a.im);
            Complex::new(ops.div(nr, d), ops.div(ni, d))
        }
    }
}

/// Divides every addressed element by `a`, one complex division each.
pub fn naive_div_scale<T: Real>(
    x: &mut StridedVector<'_, T>,
    a: Complex<T>,
    division: Division,
    flops: &mut impl FlopSink,
) {
    for v in x.iter_mut() {
        *v = complex_div(*v, a, division, flops);
    }
}
