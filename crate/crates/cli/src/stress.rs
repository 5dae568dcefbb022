//! `stress`: error sweeps against the wider-precision reference.

use std::fmt::Write as _;
use std::io::Write;

use crscl::oracle::{error_report_for, CaseProfile, Engine, ErrorReport, Execution, ProfileName};
use crscl::Precision;
use serde::Serialize;

use crate::{emit, json_one_or_many, CliResult, Format, StressArgs, EXIT_FAIL, EXIT_PASS};

#[derive(Debug, Serialize)]
pub struct StressReport {
    pub command: &'static str,
    #[serde(flatten)]
    pub report: ErrorReport,
}

impl StressReport {
    /// Bound violations always fail crscl; the exception rules are asserted
    /// on the special-value profile.
    pub fn failed(&self) -> bool {
        let r = &self.report;
        r.engine == Engine::Crscl
            && (r.violations > 0
                || (r.profile == ProfileName::SpecialValues && r.rule_violations > 0))
    }
}

pub fn reports(
    precision: Precision,
    profiles: &[ProfileName],
    engines: &[Engine],
    seed: u64,
    count: usize,
    execution: Execution,
) -> Vec<StressReport> {
    let mut out = Vec::new();
    for &name in profiles {
        let profile = CaseProfile::new(name, seed, count);
        for &engine in engines {
            out.push(StressReport {
                command: "stress",
                report: error_report_for(engine, &profile, precision, execution),
            });
        }
    }
    out
}

fn text(reports: &[StressReport]) -> String {
    let mut s = String::new();
    for StressReport { report: r, .. } in reports {
        let w = &mut s;
        writeln!(
            w,
            "{} {} profile={} seed={} cases={}",
            r.engine, r.precision, r.profile, r.seed, r.cases
        )
        .unwrap();
        writeln!(
            w,
            "  samples={} excluded={} underflow_excluded={} underflow_over_bound={}",
            r.samples, r.excluded, r.underflow_excluded, r.underflow_over_bound
        )
        .unwrap();
        writeln!(
            w,
            "  modulus: samples={} max_rel_err={:e} bound={:e}",
            r.modulus_samples, r.max_rel_err, r.bound
        )
        .unwrap();
        writeln!(
            w,
            "  per part: samples={} max_rel_err={:e} bound={:e}",
            r.part_samples, r.max_rel_err_part, r.bound_per_part
        )
        .unwrap();
        writeln!(
            w,
            "  violations={} rule_violations={} max_ulp=({}, {}) complex_divisions={} max_real_divisions={}",
            r.violations, r.rule_violations, r.max_ulp_re, r.max_ulp_im, r.complex_divisions, r.max_real_divisions
        )
        .unwrap();
        let hist: Vec<String> = r
            .case_histogram
            .iter()
            .map(|(t, n)| format!("{t}={n}"))
            .collect();
        writeln!(w, "  cases: {}", hist.join(" ")).unwrap();
        for f in &r.failures {
            let element = f.element.map_or("-".to_string(), |e| e.to_string());
            let rel = f.rel_err.map_or("-".to_string(), |e| format!("{e:e}"));
            writeln!(
                w,
                "  failure {:?} case={} element={} {} a=({} {}) x=({} {}) computed=({} {}) exact=({} {}) rel_err={}",
                f.kind, f.case_index, element, f.case, f.a[0], f.a[1], f.x[0], f.x[1],
                f.computed[0], f.computed[1], f.exact[0], f.exact[1], rel
            )
            .unwrap();
        }
    }
    s
}

fn csv(reports: &[StressReport]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header = [
        "command",
        "precision",
        "engine",
        "profile",
        "seed",
        "cases",
        "samples",
        "excluded",
        "violations",
        "max_rel_err",
        "bound",
        "max_rel_err_part",
        "bound_per_part",
        "rule_violations",
        "complex_divisions",
        "max_real_divisions",
        "failures",
    ];
    w.write_record(header).map_err(std::io::Error::from)?;
    for StressReport { command, report: r } in reports {
        w.write_record([
            command.to_string(),
            r.precision.to_string(),
            r.engine.to_string(),
            r.profile.to_string(),
            r.seed.to_string(),
            r.cases.to_string(),
            r.samples.to_string(),
            r.excluded.to_string(),
            r.violations.to_string(),
            format!("{:e}", r.max_rel_err),
            format!("{:e}", r.bound),
            format!("{:e}", r.max_rel_err_part),
            format!("{:e}", r.bound_per_part),
            r.rule_violations.to_string(),
            r.complex_divisions.to_string(),
            r.max_real_divisions.to_string(),
            r.failures.len().to_string(),
        ])
        .map_err(std::io::Error::from)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn run(args: &StressArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let engines = if args.engines.is_empty() {
        vec![Engine::Crscl]
    } else {
        args.engines.clone()
    };
    let execution = if args.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let reports = reports(
        args.common.precision,
        &args.profile.names(),
        &engines,
        args.seed,
        args.count,
        execution,
    );
    let out = match args.common.format {
        Format::Text => text(&reports),
        Format::Json => json_one_or_many(&reports)?,
        Format::Csv => csv(&reports)?,
    };
    emit(args.common.out.as_deref(), &out, stdout)?;
    Ok(if reports.iter().any(StressReport::failed) {
        EXIT_FAIL
    } else {
        EXIT_PASS
    })
}
