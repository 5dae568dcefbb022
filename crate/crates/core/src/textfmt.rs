//! Line-oriented text files for vectors and matrices.
//!
//! Vector file: one element per line as `re im`, each number in hex-float or
//! decimal. Blank lines and lines starting with `#` are skipped.
//!
//! Matrix file: a header `m n precision`, then `m*n` element lines in
//! column-major order. Comments and blank lines are allowed anywhere.
//!
//! Writers always use hex-float so that reading back is bit-exact.

use crate::complex::Complex;
use crate::error::{Error, Result};
use crate::hexfloat;
use crate::lu_factor::DenseMatrix;
use crate::real::{Precision, Real};

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let t = l.trim();
        (!t.is_empty() && !t.starts_with('#')).then_some((i + 1, t))
    })
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parses `"re im"`.
pub fn parse_complex<T: Real>(text: &str) -> Result<Complex<T>> {
    let mut parts = text.split_whitespace();
    let (Some(re), Some(im), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(Error::InvalidNumber(text.to_string()));
    };
    Ok(Complex::new(hexfloat::parse(re)?, hexfloat::parse(im)?))
}

fn parse_line<T: Real>(line: usize, text: &str) -> Result<Complex<T>> {
    parse_complex(text).map_err(|e| match e {
        Error::InvalidNumber(tok) if tok == text => {
            parse_error(line, format!("expected `re im`, found `{text}`"))
        }
        Error::InvalidNumber(tok) => parse_error(line, format!("invalid number `{tok}`")),
        other => other,
    })
}

pub fn format_complex<T: Real>(v: Complex<T>) -> String {
    format!("{} {}", hexfloat::format(v.re), hexfloat::format(v.im))
}

pub fn parse_vector<T: Real>(text: &str) -> Result<Vec<Complex<T>>> {
    data_lines(text).map(|(n, l)| parse_line(n, l)).collect()
}

pub fn format_vector<T: Real>(v: &[Complex<T>]) -> String {
    v.iter().map(|z| format_complex(*z) + "\n").collect()
}

/// A matrix whose precision comes from the file header.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyMatrix {
    Binary32(DenseMatrix<f32>),
    Binary64(DenseMatrix<f64>),
}

fn parse_header(line: usize, text: &str) -> Result<(usize, usize, Precision)> {
    let fields: Vec<&str> = text.split_whitespace().collect();
    let [m, n, p] = fields[..] else {
        return Err(parse_error(line, "expected header `m n precision`"));
    };
    let dim = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| parse_error(line, format!("invalid dimension `{s}`")))
    };
    let precision = p
        .parse::<Precision>()
        .map_err(|e| parse_error(line, e.to_string()))?;
    Ok((dim(m)?, dim(n)?, precision))
}

fn parse_body<'a, T: Real>(
    lines: impl Iterator<Item = (usize, &'a str)>,
    header_line: usize,
    m: usize,
    n: usize,
) -> Result<DenseMatrix<T>> {
    let data: Vec<Complex<T>> = lines
        .map(|(i, l)| parse_line(i, l))
        .collect::<Result<_>>()?;
    if data.len() != m * n {
        return Err(parse_error(
            header_line,
            format!("header declares {} entries, file has {}", m * n, data.len()),
        ));
    }
    DenseMatrix::new(m, n, data).map_err(|e| parse_error(header_line, e.to_string()))
}

pub fn parse_matrix(text: &str) -> Result<AnyMatrix> {
    let mut lines = data_lines(text);
    let (hl, header) = lines
        .next()
        .ok_or_else(|| parse_error(1, "missing header"))?;
    let (m, n, precision) = parse_header(hl, header)?;
    Ok(match precision {
        Precision::Binary32 => AnyMatrix::Binary32(parse_body(lines, hl, m, n)?),
        Precision::Binary64 => AnyMatrix::Binary64(parse_body(lines, hl, m, n)?),
    })
}

pub fn format_matrix<T: Real>(a: &DenseMatrix<T>) -> String {
    let mut out = format!("{} {} {}\n", a.rows(), a.cols(), T::PRECISION);
    out.push_str(&format_vector(a.data()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vector_round_trip() {
        let text = "# header\n0x1p127 0x1p127\n\n  25 0\n-0x1.8p1 1e-45\n";
        let v: Vec<Complex<f32>> = parse_vector(text).unwrap();
        assert_eq!(v.len(), 3);
        assert_eq!(v[0], Complex::new(f32::pow2(127), f32::pow2(127)));
        assert_eq!(v[2].im, f32::MIN_SUBNORMAL);
        let out = format_vector(&v);
        assert_eq!(out, "0x1p127 0x1p127\n0x1.9p4 0x0p0\n-0x1.8p1 0x1p-149\n");
        let back: Vec<Complex<f32>> = parse_vector(&out).unwrap();
        assert!(v.iter().zip(&back).all(|(p, q)| p.bits_eq(*q)));
    }

    #[test]
    fn empty_vector() {
        assert!(parse_vector::<f64>("").unwrap().is_empty());
        assert!(parse_vector::<f64>("# nothing\n\n").unwrap().is_empty());
        assert_eq!(format_vector::<f64>(&[]), "");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_vector::<f32>("1 2\n\n3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
        let err = parse_vector::<f32>("1 2\n1 zz\n").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 2,
                message: "invalid number `zz`".into()
            }
        );
        let err = parse_vector::<f32>("1 2 3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn matrix_round_trip() {
        let text = "2 2 binary32\n0x1p127 0x1p127\n0x1p127 0\n0x1p127 0\n0 0\n";
        let AnyMatrix::Binary32(a) = parse_matrix(text).unwrap() else {
            panic!("wrong precision");
        };
        assert_eq!(a.get(1, 0), Complex::new(f32::pow2(127), 0.0));
        assert_eq!(a.get(0, 1), Complex::new(f32::pow2(127), 0.0));
        assert_eq!(
            parse_matrix(&format_matrix(&a)).unwrap(),
            AnyMatrix::Binary32(a)
        );
    }

    #[test]
    fn matrix_errors() {
        assert!(matches!(
            parse_matrix("").unwrap_err(),
            Error::Parse { line: 1, .. }
        ));
        assert!(matches!(
            parse_matrix("2 2 binary16\n").unwrap_err(),
            Error::Parse { line: 1, .. }
        ));
        assert!(matches!(
            parse_matrix("# c\n1 2 binary64\n1 0\n").unwrap_err(),
            Error::Parse { line: 2, .. }
        ));
        assert!(matches!(
            parse_matrix("1 1 binary64\n1 x\n").unwrap_err(),
            Error::Parse { line: 2, .. }
        ));
    }
}
