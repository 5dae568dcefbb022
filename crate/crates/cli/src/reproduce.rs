//! `reproduce-issues`: the two 2x2 matrices on which naive pivot scaling
//! breaks down.

use std::fmt::Write as _;
use std::io::Write;

use crscl::hexfloat;
use crscl::lu_factor::{backward_error, getf2, getf2_naive, issue_matrices, IssueMatrix, LuResult};
use crscl::textfmt::format_matrix;
use crscl::{Complex, Division, Precision, Real};
use serde::Serialize;

use crate::{emit, format_signed, CliResult, Format, ReproduceArgs, EXIT_FAIL, EXIT_PASS};

#[derive(Debug, Serialize)]
pub struct Factorization {
    pub engine: &'static str,
    pub info: usize,
    pub ipiv: Vec<usize>,
    /// Column-major packed L and U.
    pub lu: Vec<[String; 2]>,
    pub l21: [String; 2],
    pub u22: [String; 2],
    pub backward_error: f64,
}

#[derive(Debug, Serialize)]
pub struct IssueOutcome {
    pub command: &'static str,
    pub precision: Precision,
    pub label: &'static str,
    pub description: &'static str,
    pub naive: Factorization,
    pub crscl: Factorization,
    pub expected_l21: [String; 2],
    pub expected_u22: [String; 2],
    pub u22_tolerance: f64,
    pub u22_rel_err: f64,
    /// `-`/`+` lines for every check that failed.
    pub mismatches: Vec<String>,
    pub passed: bool,
    #[serde(skip)]
    text: String,
}

fn hex2<T: Real>(v: Complex<T>) -> [String; 2] {
    [hexfloat::format(v.re), hexfloat::format(v.im)]
}

fn factorization<T: Real>(
    engine: &'static str,
    issue: &IssueMatrix<T>,
    r: &LuResult<T>,
) -> Factorization {
    Factorization {
        engine,
        info: r.info,
        ipiv: r.ipiv.clone(),
        lu: r.lu.data().iter().map(|v| hex2(*v)).collect(),
        l21: hex2(r.l(1, 0)),
        u22: hex2(r.u(1, 1)),
        backward_error: backward_error(&issue.matrix, r),
    }
}

fn rel_err<T: Real>(got: Complex<T>, want: Complex<T>) -> f64 {
    let (g, w) = (got.widen(), want.widen());
    (g.re - w.re).hypot(g.im - w.im) / w.re.hypot(w.im)
}

fn indent(text: &str) -> String {
    text.lines().map(|l| format!("    {l}\n")).collect()
}

fn check<T: Real>(issue: &IssueMatrix<T>) -> IssueOutcome {
    let naive = getf2_naive(issue.matrix.clone(), Division::Smith);
    let fast = getf2(issue.matrix.clone());
    let (l21, u22) = (fast.l(1, 0), fast.u(1, 1));
    let u22_rel_err = rel_err(u22, issue.expected_u22);

    let mut mismatches = Vec::new();
    let mut diff = |what: &str, want: String, got: String| {
        mismatches.push(format!("- {what} {want}"));
        mismatches.push(format!("+ {what} {got}"));
    };
    if naive.info != issue.naive_info {
        diff(
            "naive info",
            issue.naive_info.to_string(),
            naive.info.to_string(),
        );
    }
    if fast.info != 0 {
        diff("crscl info", "0".into(), fast.info.to_string());
    }
    if !l21.bits_eq(issue.expected_l21) {
        diff(
            "crscl L21",
            format_signed(issue.expected_l21),
            format_signed(l21),
        );
    }
    let u22_ok = if issue.u22_tolerance == 0.0 {
        u22.bits_eq(issue.expected_u22)
    } else {
        u22_rel_err <= issue.u22_tolerance
    };
    if !u22_ok {
        diff(
            "crscl U22",
            format_signed(issue.expected_u22),
            format_signed(u22),
        );
    }

    let mut text = String::new();
    let w = &mut text;
    writeln!(
        w,
        "{} ({}): {}",
        issue.label,
        T::PRECISION,
        issue.description
    )
    .unwrap();
    writeln!(w, "  A").unwrap();
    w.push_str(&indent(&format_matrix(&issue.matrix)));
    for (name, r) in [("naive_smith", &naive), ("crscl", &fast)] {
        writeln!(
            w,
            "  {name}: info={} ipiv={:?} backward_error={:e}",
            r.info,
            r.ipiv,
            backward_error(&issue.matrix, r)
        )
        .unwrap();
        w.push_str(&indent(&format_matrix(&r.lu)));
    }
    writeln!(
        w,
        "{}: naive info={}, crscl info={}, L21={}, U22={}",
        issue.label,
        naive.info,
        fast.info,
        format_signed(l21),
        format_signed(u22)
    )
    .unwrap();
    for m in &mismatches {
        writeln!(w, "{m}").unwrap();
    }

    IssueOutcome {
        command: "reproduce-issues",
        precision: T::PRECISION,
        label: issue.label,
        description: issue.description,
        naive: factorization("naive_smith", issue, &naive),
        crscl: factorization("crscl", issue, &fast),
        expected_l21: hex2(issue.expected_l21),
        expected_u22: hex2(issue.expected_u22),
        u22_tolerance: issue.u22_tolerance,
        u22_rel_err,
        passed: mismatches.is_empty(),
        mismatches,
        text,
    }
}

/// Factors both issue matrices in the given precision.
pub fn outcomes(precision: Precision) -> Vec<IssueOutcome> {
    fn all<T: Real>() -> Vec<IssueOutcome> {
        issue_matrices::<T>().iter().map(check).collect()
    }
    match precision {
        Precision::Binary32 => all::<f32>(),
        Precision::Binary64 => all::<f64>(),
    }
}

fn to_csv(outcomes: &[IssueOutcome]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "label",
        "precision",
        "naive_info",
        "crscl_info",
        "l21_re",
        "l21_im",
        "u22_re",
        "u22_im",
        "naive_backward_error",
        "crscl_backward_error",
        "passed",
    ])
    .map_err(std::io::Error::from)?;
    for o in outcomes {
        w.write_record([
            o.label.to_string(),
            o.precision.to_string(),
            o.naive.info.to_string(),
            o.crscl.info.to_string(),
            o.crscl.l21[0].clone(),
            o.crscl.l21[1].clone(),
            o.crscl.u22[0].clone(),
            o.crscl.u22[1].clone(),
            o.naive.backward_error.to_string(),
            o.crscl.backward_error.to_string(),
            o.passed.to_string(),
        ])
        .map_err(std::io::Error::from)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn run(args: &ReproduceArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let outcomes = outcomes(args.common.precision);
    let text = match args.common.format {
        Format::Text => outcomes
            .iter()
            .map(|o| o.text.as_str())
            .collect::<Vec<_>>()
            .join("\n"),
        Format::Json => {
            serde_json::to_string_pretty(&outcomes).map_err(std::io::Error::from)? + "\n"
        }
        Format::Csv => to_csv(&outcomes)?,
    };
    emit(args.common.out.as_deref(), &text, stdout)?;
    Ok(if outcomes.iter().all(|o| o.passed) {
        EXIT_PASS
    } else {
        EXIT_FAIL
    })
}
