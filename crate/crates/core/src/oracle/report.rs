//! Differential error reports: run an engine over a generated stream and
//! compare each element with the reference quotient.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::Tally;
use crate::complex::Complex;
use crate::error::Error;
use crate::hexfloat;
use crate::oracle::gen::{gen_case, Case, CaseProfile, ProfileName};
use crate::oracle::reference::{relative_error, relative_error_parts, ulp_distance, Reference};
use crate::real::{Precision, Real};
use crate::scalar_core::{fp_env, gamma, reciprocal_plan, CaseTag};
use crate::vector_scaling::{crscl, divide, naive_div_scale, Division, FlopCounter, StridedVector};

/// Most failures kept in a report; the ones with the smallest
/// `(case_index, element)` win.
pub const FAILURE_CAP: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Crscl,
    NaiveSmith,
    NaiveTextbook,
}

impl Engine {
    pub const ALL: [Engine; 3] = [Engine::Crscl, Engine::NaiveSmith, Engine::NaiveTextbook];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Crscl => "crscl",
            Engine::NaiveSmith => "naive_smith",
            Engine::NaiveTextbook => "naive_textbook",
        }
    }

    /// Scales `x` in place by `1/a`, counting operations into `flops`.
    pub fn run<T: Real>(self, x: &mut [Complex<T>], a: Complex<T>, flops: &mut FlopCounter) {
        let mut v = StridedVector::contiguous(x);
        match self {
            Engine::Crscl => {
                crscl(&mut v, a, flops);
            }
            Engine::NaiveSmith => naive_div_scale(&mut v, a, Division::Smith, flops),
            Engine::NaiveTextbook => naive_div_scale(&mut v, a, Division::Textbook, flops),
        }
    }

    /// Recomputes one element with underflow tracking; true if an inexact
    /// result fell below the normal range.
    fn underflows<T: Real>(self, x: Complex<T>, a: Complex<T>) -> bool {
        let mut tally = Tally::default();
        match self {
            Engine::Crscl => {
                let plan = reciprocal_plan(a);
                if plan.underflow {
                    return true;
                }
                plan.steps().iter().fold(x, |v, s| s.apply(v, &mut tally));
            }
            Engine::NaiveSmith => {
                divide(x, a, Division::Smith, &mut tally);
            }
            Engine::NaiveTextbook => {
                divide(x, a, Division::Textbook, &mut tally);
            }
        }
        tally.underflow
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.replace('-', "_");
        Engine::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or(Error::UnknownEngine(s))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Uses the rayon pool when the `parallel` feature is enabled.
    #[default]
    Parallel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    /// Relative error above the bound.
    Bound,
    /// NaN appeared (or did not) contrary to the operand classification.
    NanRule,
    /// Infinite plan factor for a nonzero denominator, or none for zero.
    InfiniteFactorRule,
    /// A normal part of `1/a` came out as zero.
    FlushRule,
}

/// One offending element, in hex-float for exact reproduction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub kind: FailureKind,
    pub case_index: usize,
    /// Element index in the vector; `None` for checks on the plan itself.
    pub element: Option<usize>,
    pub case: CaseTag,
    pub a: [String; 2],
    pub x: [String; 2],
    pub computed: [String; 2],
    pub exact: [String; 2],
    /// Present for bound failures.
    pub rel_err: Option<f64>,
}

impl Failure {
    fn key(&self) -> (usize, Option<usize>, FailureKind) {
        (self.case_index, self.element, self.kind)
    }
}

fn hex<T: Real>(v: Complex<T>) -> [String; 2] {
    [hexfloat::format(v.re), hexfloat::format(v.im)]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub engine: Engine,
    pub precision: Precision,
    pub profile: ProfileName,
    pub seed: u64,
    pub cases: usize,
    /// Vector elements processed; `excluded` of them fall outside the region
    /// where the bounds apply.
    pub samples: usize,
    pub excluded: usize,
    /// Included samples measured with the modulus metric.
    pub modulus_samples: usize,
    /// Included samples measured part by part (real or imaginary denominator).
    pub part_samples: usize,
    pub violations: usize,
    pub max_rel_err: f64,
    pub bound: f64,
    pub max_rel_err_part: f64,
    pub bound_per_part: f64,
    pub max_ulp_re: u64,
    pub max_ulp_im: u64,
    /// Excluded only because an intermediate underflowed with rounding; the
    /// error of these samples is still measured.
    pub underflow_excluded: usize,
    /// Of `underflow_excluded`, samples whose error exceeds their bound.
    pub underflow_over_bound: usize,
    pub case_histogram: BTreeMap<CaseTag, usize>,
    pub rule_violations: usize,
    pub complex_divisions: u64,
    /// Largest number of real divisions in a single call.
    pub max_real_divisions: u64,
    pub failures: Vec<Failure>,
}

impl ErrorReport {
    pub fn empty(engine: Engine, precision: Precision, profile: &CaseProfile) -> Self {
        let env = fp_env(precision);
        ErrorReport {
            engine,
            precision,
            profile: profile.name,
            seed: profile.seed,
            cases: 0,
            samples: 0,
            excluded: 0,
            modulus_samples: 0,
            part_samples: 0,
            violations: 0,
            max_rel_err: 0.0,
            bound: 2f64.sqrt() * gamma(6, &env).expect("gamma_6 is defined"),
            max_rel_err_part: 0.0,
            bound_per_part: gamma(2, &env).expect("gamma_2 is defined"),
            max_ulp_re: 0,
            max_ulp_im: 0,
            underflow_excluded: 0,
            underflow_over_bound: 0,
            case_histogram: BTreeMap::new(),
            rule_violations: 0,
            complex_divisions: 0,
            max_real_divisions: 0,
            failures: Vec::new(),
        }
    }

    /// Combines two partial reports of the same run. Associative and
    /// commutative, so any split of the stream gives the same result.
    pub fn merge(mut self, other: ErrorReport) -> ErrorReport {
        self.cases += other.cases;
        self.samples += other.samples;
        self.excluded += other.excluded;
        self.modulus_samples += other.modulus_samples;
        self.part_samples += other.part_samples;
        self.violations += other.violations;
        self.max_rel_err = self.max_rel_err.max(other.max_rel_err);
        self.max_rel_err_part = self.max_rel_err_part.max(other.max_rel_err_part);
        self.max_ulp_re = self.max_ulp_re.max(other.max_ulp_re);
        self.max_ulp_im = self.max_ulp_im.max(other.max_ulp_im);
        self.underflow_excluded += other.underflow_excluded;
        self.underflow_over_bound += other.underflow_over_bound;
        for (tag, n) in other.case_histogram {
            *self.case_histogram.entry(tag).or_insert(0) += n;
        }
        self.rule_violations += other.rule_violations;
        self.complex_divisions += other.complex_divisions;
        self.max_real_divisions = self.max_real_divisions.max(other.max_real_divisions);
        self.failures.extend(other.failures);
        self.failures.sort_by_key(Failure::key);
        self.failures.truncate(FAILURE_CAP);
        self
    }

    pub fn included(&self) -> usize {
        self.samples - self.excluded
    }

    pub fn passed(&self) -> bool {
        self.violations == 0 && self.rule_violations == 0
    }

    fn push_failure(&mut self, f: Failure) {
        if self.failures.len() < FAILURE_CAP {
            self.failures.push(f);
        }
    }
}

fn nan_expected<T: Real>(a: Complex<T>) -> bool {
    a.is_nan() || (a.re.is_infinite() && a.im.is_infinite())
}

fn evaluate<T: Reference>(engine: Engine, case: &Case<T>, mut report: ErrorReport) -> ErrorReport {
    let a = case.a;
    let plan = reciprocal_plan(a);
    report.cases += 1;
    *report.case_histogram.entry(plan.case).or_insert(0) += 1;

    let mut y = case.x.clone();
    let mut flops = FlopCounter::default();
    engine.run(&mut y, a, &mut flops);
    report.complex_divisions += flops.complex_div;
    report.max_real_divisions = report.max_real_divisions.max(flops.real_div);

    let failure = |kind, element: Option<usize>, x: Complex<T>, computed, exact, rel_err| Failure {
        kind,
        case_index: case.index,
        element,
        case: plan.case,
        a: hex(a),
        x: hex(x),
        computed: hex(computed),
        exact: hex(exact),
        rel_err,
    };

    // plan-level rules, checked through the engine on x = 1
    let one = Complex::one();
    let mut r = [one];
    engine.run(&mut r, a, &mut FlopCounter::default());
    let recip = r[0];
    let exact_recip = T::exact_quotient(one, a);
    if engine == Engine::Crscl {
        let infinite = plan.steps().iter().any(|s| s.value().is_infinite());
        if infinite != a.is_zero() {
            report.rule_violations += 1;
            report.push_failure(failure(
                FailureKind::InfiniteFactorRule,
                None,
                one,
                recip,
                exact_recip.round(),
                None,
            ));
        }
    }
    if exact_recip.is_finite() && !exact_recip.is_zero() {
        let (er, ei) = exact_recip.part_magnitudes();
        let normal = |m: f64| m >= T::SFMIN.widen() && m <= T::OVERFLOW.widen();
        let flushed =
            (normal(er) && recip.re == T::zero()) || (normal(ei) && recip.im == T::zero());
        if flushed {
            report.rule_violations += 1;
            report.push_failure(failure(
                FailureKind::FlushRule,
                None,
                one,
                recip,
                exact_recip.round(),
                None,
            ));
        }
    }

    let a_usable = a.is_finite() && !a.is_zero();
    let per_part = !plan.case.is_full();
    let sfmin = T::SFMIN.widen();
    for (k, (&x, &yk)) in case.x.iter().zip(&y).enumerate() {
        report.samples += 1;

        let x_regular = x.is_finite() && x.re != T::zero() && x.im != T::zero();
        if x_regular && yk.is_nan() != nan_expected(a) {
            report.rule_violations += 1;
            let exact = T::exact_quotient(x, a).round();
            report.push_failure(failure(FailureKind::NanRule, Some(k), x, yk, exact, None));
        }

        if !a_usable || !x.is_finite() || x.is_zero() {
            report.excluded += 1;
            continue;
        }
        let exact = T::exact_quotient(x, a);
        let modulus = exact.modulus();
        if !exact.is_finite() || !(sfmin..=T::OVERFLOW.widen() / 2.0).contains(&modulus) {
            report.excluded += 1;
            continue;
        }
        if per_part {
            let (er, ei) = exact.part_magnitudes();
            if (er != 0.0 && er < sfmin) || (ei != 0.0 && ei < sfmin) {
                report.excluded += 1;
                continue;
            }
        }
        let measure = |report: &ErrorReport| {
            if per_part {
                let (er, ei) =
                    relative_error_parts(yk, &exact).expect("exact is finite and nonzero");
                (er.max(ei), report.bound_per_part)
            } else {
                let e = relative_error(yk, &exact).expect("exact is finite and nonzero");
                (e, report.bound)
            }
        };
        if engine.underflows(x, a) {
            report.excluded += 1;
            report.underflow_excluded += 1;
            let (err, bound) = measure(&report);
            if err > bound {
                report.underflow_over_bound += 1;
            }
            continue;
        }

        let rounded = exact.round::<T>();
        if let Some(d) = ulp_distance(yk.re, rounded.re) {
            report.max_ulp_re = report.max_ulp_re.max(d);
        }
        if let Some(d) = ulp_distance(yk.im, rounded.im) {
            report.max_ulp_im = report.max_ulp_im.max(d);
        }

        let (err, bound) = measure(&report);
        if per_part {
            report.part_samples += 1;
            report.max_rel_err_part = report.max_rel_err_part.max(err);
        } else {
            report.modulus_samples += 1;
            report.max_rel_err = report.max_rel_err.max(err);
        }
        if err > bound {
            report.violations += 1;
            report.push_failure(failure(
                FailureKind::Bound,
                Some(k),
                x,
                yk,
                rounded,
                Some(err),
            ));
        }
    }
    report
}

/// Runs `engine` over every case of `profile` in precision `T`.
pub fn error_report<T: Reference>(
    engine: Engine,
    profile: &CaseProfile,
    execution: Execution,
) -> ErrorReport {
    let empty = || ErrorReport::empty(engine, T::PRECISION, profile);
    let one = |i: usize| evaluate(engine, &gen_case::<T>(profile, i), empty());
    match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..profile.count)
                .into_par_iter()
                .with_min_len(64)
                .map(one)
                .reduce(empty, ErrorReport::merge)
        }
        _ => (0..profile.count).fold(empty(), |acc, i| acc.merge(one(i))),
    }
}

/// [`error_report`] with the precision chosen at runtime.
pub fn error_report_for(
    engine: Engine,
    profile: &CaseProfile,
    precision: Precision,
    execution: Execution,
) -> ErrorReport {
    match precision {
        Precision::Binary32 => error_report::<f32>(engine, profile, execution),
        Precision::Binary64 => error_report::<f64>(engine, profile, execution),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(name: ProfileName, count: usize) -> CaseProfile {
        CaseProfile::new(name, 1, count)
    }

    #[test]
    fn empty_profile() {
        let r = error_report::<f32>(
            Engine::Crscl,
            &p(ProfileName::Safe, 0),
            Execution::Sequential,
        );
        assert_eq!((r.samples, r.violations, r.excluded, r.cases), (0, 0, 0, 0));
        assert!(r.passed());
    }

    #[test]
    fn safe_profile_conforms() {
        for engine in [Engine::Crscl, Engine::NaiveSmith] {
            let r = error_report::<f32>(engine, &p(ProfileName::Safe, 3000), Execution::Sequential);
            assert_eq!(r.violations, 0, "{engine}: {:?}", r.failures.first());
            assert!(r.included() > 10_000);
        }
        // products of safe-range operands overflow in the textbook formula
        let r = error_report::<f32>(
            Engine::NaiveTextbook,
            &p(ProfileName::Safe, 3000),
            Execution::Sequential,
        );
        assert!(r.violations > 0);
        let r = error_report::<f64>(
            Engine::Crscl,
            &p(ProfileName::Safe, 3000),
            Execution::Sequential,
        );
        assert_eq!(r.violations, 0, "{:?}", r.failures.first());
    }

    #[test]
    fn crscl_counts() {
        let r = error_report::<f32>(
            Engine::Crscl,
            &p(ProfileName::MixedExtreme, 500),
            Execution::Sequential,
        );
        assert_eq!(r.complex_divisions, 0);
        assert!(r.max_real_divisions <= 4);
        let r = error_report::<f32>(
            Engine::NaiveSmith,
            &p(ProfileName::Safe, 50),
            Execution::Sequential,
        );
        assert_eq!(r.complex_divisions as usize, r.samples);
    }

    #[test]
    fn parallel_matches_sequential() {
        for name in ProfileName::ALL {
            let prof = p(name, 700);
            let s = error_report::<f32>(Engine::Crscl, &prof, Execution::Sequential);
            let q = error_report::<f32>(Engine::Crscl, &prof, Execution::Parallel);
            assert_eq!(s, q, "{name}");
        }
    }

    #[test]
    fn special_values_obey_rules() {
        let prof = p(ProfileName::SpecialValues, 225);
        let r = error_report::<f32>(Engine::Crscl, &prof, Execution::Sequential);
        assert_eq!(r.rule_violations, 0, "{:#?}", r.failures);
        assert_eq!(r.violations, 0, "{:#?}", r.failures);
        let r = error_report::<f64>(Engine::Crscl, &prof, Execution::Sequential);
        assert_eq!(r.rule_violations, 0, "{:#?}", r.failures);
        let naive = error_report::<f32>(Engine::NaiveSmith, &prof, Execution::Sequential);
        assert!(naive.rule_violations > 0);
    }

    #[test]
    fn engine_names_round_trip() {
        for e in Engine::ALL {
            assert_eq!(e.name().parse::<Engine>().unwrap(), e);
        }
        assert_eq!("naive-smith".parse::<Engine>().unwrap(), Engine::NaiveSmith);
        assert!("fast".parse::<Engine>().is_err());
    }
}
