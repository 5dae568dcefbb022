//! Unblocked LU factorization with partial pivoting.
//!
//! [`getf2`] scales each pivot column with [`crscl`]. [`getf2_naive`] follows
//! the classic control flow: multiply by a reciprocal obtained from a complex
//! division when the pivot is not tiny, otherwise divide entry by entry.

use crate::complex::Complex;
use crate::error::{Error, Result};
use crate::oracle::dd::DoubleDouble;
use crate::real::{scale2, Precision, Real};
use crate::vector_scaling::{complex_div, crscl, scal_complex, Division, NoFlops, StridedVector};

/// Column-major `rows x cols` complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        if rows.checked_mul(cols) != Some(data.len()) {
            return Err(Error::DimensionMismatch {
                rows,
                cols,
                len: data.len(),
            });
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    /// Builds a matrix from row-major nested rows.
    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                rows: m,
                cols: n,
                len: rows.iter().map(Vec::len).sum(),
            });
        }
        let data = (0..n)
            .flat_map(|j| rows.iter().map(move |r| r[j]))
            .collect();
        DenseMatrix::new(m, n, data)
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut data = vec![Complex::zero(); n * n];
        for i in 0..n {
            data[i + i * n] = Complex::one();
        }
        DenseMatrix::new(n, n, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn precision(&self) -> Precision {
        T::PRECISION
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i + j * self.rows]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex<T>) {
        self.data[i + j * self.rows] = v;
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a + j * self.rows, b + j * self.rows);
        }
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, v| acc.max(v.norm()))
    }
}

/// Packed factors: strict lower triangle of `lu` holds L (unit diagonal
/// implied), the upper triangle holds U.
#[derive(Clone, Debug, PartialEq)]
pub struct LuResult<T> {
    pub lu: DenseMatrix<T>,
    /// 1-based pivot rows, `ipiv[j] >= j + 1`.
    pub ipiv: Vec<usize>,
    /// 0 on success, otherwise the 1-based index of the first exactly zero
    /// diagonal entry of U.
    pub info: usize,
}

impl<T: Real> LuResult<T> {
    pub fn l(&self, i: usize, j: usize) -> Complex<T> {
        match i.cmp(&j) {
            std::cmp::Ordering::Greater => self.lu.get(i, j),
            std::cmp::Ordering::Equal => Complex::one(),
            std::cmp::Ordering::Less => Complex::zero(),
        }
    }

    pub fn u(&self, i: usize, j: usize) -> Complex<T> {
        if i <= j {
            self.lu.get(i, j)
        } else {
            Complex::zero()
        }
    }
}

/// Row index of the first entry with the largest `|re| + |im|` in
/// `col[start..]`.
fn pivot_row<T: Real>(a: &DenseMatrix<T>, col: usize, start: usize) -> usize {
    let mut best = start;
    let mut best_mag = a.get(start, col).abs1();
    for i in start + 1..a.rows {
        let mag = a.get(i, col).abs1();
        if mag > best_mag {
            best = i;
            best_mag = mag;
        }
    }
    best
}

fn factor<T: Real>(
    mut a: DenseMatrix<T>,
    mut scale_column: impl FnMut(&mut StridedVector<'_, T>, Complex<T>),
) -> LuResult<T> {
    let (m, n) = (a.rows, a.cols);
    let k = m.min(n);
    let mut ipiv = Vec::with_capacity(k);
    let mut info = 0;
    for j in 0..k {
        let p = pivot_row(&a, j, j);
        ipiv.push(p + 1);
        let pivot = a.get(p, j);
        if !pivot.is_zero() {
            if p != j {
                a.swap_rows(p, j);
            }
            if j + 1 < m {
                let mut sub = StridedVector::new(&mut a.data, j + 1 + j * m, 1, m - j - 1)
                    .expect("subcolumn lies inside the matrix");
                scale_column(&mut sub, pivot);
            }
        } else if info == 0 {
            info = j + 1;
        }
        // rank-1 update of the trailing block
        for c in j + 1..n {
            let u = a.get(j, c);
            for r in j + 1..m {
                let l = a.get(r, j);
                let v = a.get(r, c) - l * u;
                a.set(r, c, v);
            }
        }
    }
    LuResult { lu: a, ipiv, info }
}

/// LU factorization whose pivot column scaling uses [`crscl`].
pub fn getf2<T: Real>(a: DenseMatrix<T>) -> LuResult<T> {
    factor(a, |x, pivot| {
        crscl(x, pivot, &mut NoFlops);
    })
}

/// LU factorization with the reciprocal taken by complex division when
/// `|pivot| >= SFMIN`, and entry-wise division otherwise.
pub fn getf2_naive<T: Real>(a: DenseMatrix<T>, division: Division) -> LuResult<T> {
    factor(a, |x, pivot| {
        if pivot.norm() >= T::SFMIN {
            let r = complex_div(Complex::one(), pivot, division, &mut NoFlops);
            scal_complex(x, r, &mut NoFlops);
        } else {
            for v in x.iter_mut() {
                *v = complex_div(*v, pivot, division, &mut NoFlops);
            }
        }
    })
}

#[derive(Clone, Copy)]
struct Wide {
    re: DoubleDouble,
    im: DoubleDouble,
}

impl Wide {
    fn scaled<T: Real>(v: Complex<T>, shift: i32) -> Wide {
        Wide {
            re: DoubleDouble::from(scale2(v.re.widen(), shift)),
            im: DoubleDouble::from(scale2(v.im.widen(), shift)),
        }
    }

    fn sub_product(self, a: Wide, b: Wide) -> Wide {
        Wide {
            re: self.re - (a.re * b.re - a.im * b.im),
            im: self.im - (a.re * b.im + a.im * b.re),
        }
    }
}

/// `max|P*A - L*U| / (n * u * max|A|)`, evaluated in double-double after
/// scaling `A` and `U` by a common power of two.
pub fn backward_error<T: Real>(a: &DenseMatrix<T>, r: &LuResult<T>) -> f64 {
    let (m, n) = (a.rows, a.cols);
    let k = m.min(n);
    let anorm = a.max_norm();
    if !anorm.is_finite() {
        return f64::INFINITY;
    }
    if anorm == T::zero() {
        let all_zero = r.lu.data.iter().all(|v| v.is_zero());
        return if all_zero { 0.0 } else { f64::INFINITY };
    }
    let shift = -anorm.exponent();

    let mut pa = a.clone();
    for (j, &p) in r.ipiv.iter().enumerate() {
        if p - 1 != j {
            pa.swap_rows(j, p - 1);
        }
    }

    let mut worst = 0.0f64;
    for c in 0..n {
        for i in 0..m {
            let mut acc = Wide::scaled(pa.get(i, c), shift);
            for t in 0..=i.min(c).min(k - 1) {
                acc = acc.sub_product(Wide::scaled(r.l(i, t), 0), Wide::scaled(r.u(t, c), shift));
            }
            let res = acc.re.hi().hypot(acc.im.hi());
            if res.is_nan() {
                return f64::INFINITY;
            }
            worst = worst.max(res);
        }
    }
    let denom = n as f64 * T::UNIT_ROUNDOFF.widen() * scale2(anorm.widen(), shift);
    worst / denom
}

/// A matrix on which naive pivot scaling breaks down, with the factors the
/// crscl-based factorization must produce.
#[derive(Clone, Debug)]
pub struct IssueMatrix<T> {
    pub label: &'static str,
    pub matrix: DenseMatrix<T>,
    pub expected_l21: Complex<T>,
    pub expected_u22: Complex<T>,
    /// Relative tolerance on U(2,2); zero demands bitwise equality.
    pub u22_tolerance: f64,
    /// `info` the naive factorization reports.
    pub naive_info: usize,
    pub description: &'static str,
}

/// The two 2x2 breakdown matrices, with constants chosen for `T`.
///
/// `issue1` sits at half the overflow threshold, so a naive complex division
/// overflows its denominator. `issue2` has `1/b^2` below the smallest
/// subnormal, so the reciprocal of the pivot loses its imaginary part.
pub fn issue_matrices<T: Real>() -> Vec<IssueMatrix<T>> {
    let c = Complex::new;
    let zero = T::zero();
    let one = T::one();
    let half = T::pow2(-1);

    let m = T::pow2(T::max_exp());
    let issue1 =
        DenseMatrix::from_rows(&[vec![c(m, m), c(m, zero)], vec![c(m, zero), c(zero, zero)]])
            .expect("2x2");

    // smallest b with 1/b^2 below half the smallest subnormal
    let min_sub_exp = T::min_exp() - T::FRACTION_BITS as i32;
    let be = (-(min_sub_exp - 1) + 1) / 2;
    let b = T::pow2(be);
    let issue2 =
        DenseMatrix::from_rows(&[vec![c(b, one), c(b, zero)], vec![c(b, zero), c(b, zero)]])
            .expect("2x2");

    vec![
        IssueMatrix {
            label: "issue1",
            matrix: issue1,
            expected_l21: c(half, -half),
            expected_u22: c(-m * half, m * half),
            u22_tolerance: 0.0,
            naive_info: 2,
            description: "entries at half the overflow threshold",
        },
        IssueMatrix {
            label: "issue2",
            matrix: issue2,
            expected_l21: c(one, -T::pow2(-be)),
            expected_u22: c(T::pow2(-be), one),
            u22_tolerance: 2f64.powi(-20),
            naive_info: 2,
            description: "1/b^2 underflows to zero",
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f32, im: f32) -> Complex<f32> {
        Complex::new(re, im)
    }

    #[test]
    fn identity_factors_trivially() {
        let a = DenseMatrix::<f32>::identity(2).unwrap();
        for r in [getf2(a.clone()), getf2_naive(a.clone(), Division::Smith)] {
            assert_eq!(r.ipiv, vec![1, 2]);
            assert_eq!(r.info, 0);
            assert_eq!(r.lu, a);
            assert_eq!(backward_error(&a, &r), 0.0);
        }
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert_eq!(
            DenseMatrix::<f64>::new(2, 2, vec![Complex::zero(); 3]).unwrap_err(),
            Error::DimensionMismatch {
                rows: 2,
                cols: 2,
                len: 3
            }
        );
        assert_eq!(
            DenseMatrix::<f64>::new(0, 2, vec![]).unwrap_err(),
            Error::EmptyMatrix
        );
    }

    #[test]
    fn issue_constants() {
        let m32 = issue_matrices::<f32>();
        assert_eq!(m32[0].matrix.get(0, 0), c(f32::pow2(127), f32::pow2(127)));
        assert_eq!(m32[1].matrix.get(0, 0), c(f32::pow2(75), 1.0));
        let m64 = issue_matrices::<f64>();
        assert_eq!(m64[0].matrix.get(1, 0).re, f64::pow2(1023));
        assert_eq!(m64[1].matrix.get(1, 1).re, f64::pow2(538));
    }

    #[test]
    fn issue1_crscl_is_exact() {
        let issue = &issue_matrices::<f32>()[0];
        let r = getf2(issue.matrix.clone());
        assert_eq!(r.info, 0);
        assert_eq!(r.ipiv, vec![1, 2]);
        assert!(r.lu.get(1, 0).bits_eq(c(0.5, -0.5)));
        assert!(r.lu.get(1, 1).bits_eq(c(-f32::pow2(126), f32::pow2(126))));
        assert_eq!(backward_error(&issue.matrix, &r), 0.0);
    }

    #[test]
    fn issue1_naive_breaks_down() {
        let issue = &issue_matrices::<f32>()[0];
        let r = getf2_naive(issue.matrix.clone(), Division::Smith);
        assert_eq!(r.info, 2);
        assert!(r.lu.get(1, 0).is_zero());
        assert!(r.lu.get(1, 1).is_zero());
        assert!(backward_error(&issue.matrix, &r) >= 1e5);
    }

    #[test]
    fn issue2_both_variants() {
        let issue = &issue_matrices::<f32>()[1];
        let r = getf2(issue.matrix.clone());
        assert_eq!(r.info, 0);
        assert!(r.lu.get(1, 0).bits_eq(c(1.0, -f32::pow2(-75))));
        let u22 = r.lu.get(1, 1);
        assert_eq!(u22.im, 1.0);
        assert!(u22.re.abs() <= f32::pow2(-74));

        let r = getf2_naive(issue.matrix.clone(), Division::Smith);
        assert_eq!(r.info, 2);
        assert_eq!(r.lu.get(1, 0), c(1.0, 0.0));
        assert!(r.lu.get(1, 1).is_zero());
    }

    #[test]
    fn binary64_analogues_reproduce() {
        for issue in issue_matrices::<f64>() {
            let good = getf2(issue.matrix.clone());
            assert_eq!(good.info, 0, "{}", issue.label);
            assert!(
                good.lu.get(1, 0).bits_eq(issue.expected_l21),
                "{}",
                issue.label
            );
            let bad = getf2_naive(issue.matrix.clone(), Division::Smith);
            assert_eq!(bad.info, issue.naive_info, "{}", issue.label);
        }
    }

    #[test]
    fn zero_column_sets_info_and_continues() {
        let a = DenseMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)],
            vec![c(0.0, 0.0), c(3.0, 1.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 1.0), c(5.0, 0.0)],
        ])
        .unwrap();
        let r = getf2(a.clone());
        assert_eq!(r.info, 1);
        assert_eq!(r.ipiv[0], 1);
        assert_eq!(r.ipiv[1], 2);
        assert!(backward_error(&a, &r) < 10.0);
    }

    #[test]
    fn ties_pick_lowest_row() {
        let a = DenseMatrix::from_rows(&[
            vec![c(1.0, 1.0), c(1.0, 0.0)],
            vec![c(2.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, 2.0), c(0.0, 1.0)],
        ])
        .unwrap();
        let r = getf2(a);
        assert_eq!(r.ipiv[0], 1);
    }

    #[test]
    fn rectangular_shapes() {
        let wide = DenseMatrix::from_rows(&[vec![c(2.0, 0.0), c(1.0, 1.0), c(0.0, 3.0)]]).unwrap();
        let r = getf2(wide.clone());
        assert_eq!(r.ipiv, vec![1]);
        assert_eq!(backward_error(&wide, &r), 0.0);

        let tall =
            DenseMatrix::from_rows(&[vec![c(1.0, 0.0)], vec![c(4.0, 0.0)], vec![c(0.0, 2.0)]])
                .unwrap();
        let r = getf2(tall.clone());
        assert_eq!(r.ipiv, vec![2]);
        assert_eq!(r.lu.get(1, 0), c(0.25, 0.0));
        assert!(backward_error(&tall, &r) < 1.0);
    }
}
