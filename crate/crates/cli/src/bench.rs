//! `bench`: wall-clock comparison of crscl with per-element division.

use std::fmt::Write as _;
use std::hint::black_box;
use std::io::Write;
use std::time::Instant;

use crscl::oracle::{gen_case, CaseProfile, Engine, ProfileName};
use crscl::{
    crscl, hexfloat, naive_div_scale, reciprocal_plan, CaseTag, Complex, Division, FlopCounter,
    NoFlops, Precision, Real, StridedVector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::{emit, BenchArgs, CliResult, Format, EXIT_PASS};

/// Operation count most naive complex divisions need per element.
pub const NAIVE_REFERENCE_MINIMUM: u64 = 13;

#[derive(Debug, Serialize)]
pub struct BenchRow {
    pub engine: Engine,
    pub n: usize,
    pub reps: u32,
    pub median_ns: u64,
    /// `None` for empty vectors.
    pub ns_per_element: Option<f64>,
    pub flops: FlopCounter,
    pub mul_add_per_element: Option<f64>,
    pub divisions_per_element: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct FlopComparison {
    /// Multiplications and additions per element, no divisions.
    pub crscl: u64,
    /// Multiplications, additions and divisions per element.
    pub naive_smith: u64,
    pub naive_textbook: u64,
    pub naive_reference_minimum: u64,
}

#[derive(Debug, Serialize)]
pub struct BenchReport {
    pub command: &'static str,
    pub precision: Precision,
    pub seed: u64,
    pub denominator: [String; 2],
    pub case: CaseTag,
    pub rows: Vec<BenchRow>,
    pub flop_comparison: FlopComparison,
}

/// First safe-profile denominator whose plan is a single complex multiplier.
fn denominator<T: Real>(seed: u64) -> Complex<T> {
    let profile = CaseProfile::new(ProfileName::Safe, seed, usize::MAX);
    (0..)
        .map(|i| gen_case::<T>(&profile, i).a)
        .find(|a| reciprocal_plan(*a).case == CaseTag::FullSafe)
        .expect("the safe profile yields full denominators")
}

/// Elements with parts uniform in `[-1, 1)`; the same for every engine.
fn input<T: Real>(n: usize, seed: u64) -> Vec<Complex<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let re: f64 = rng.gen_range(-1.0..1.0);
            let im: f64 = rng.gen_range(-1.0..1.0);
            Complex::new(T::narrow(re), T::narrow(im))
        })
        .collect()
}

fn apply<T: Real>(engine: Engine, x: &mut [Complex<T>], a: Complex<T>) {
    let mut v = StridedVector::contiguous(x);
    match engine {
        Engine::Crscl => {
            crscl(&mut v, a, &mut NoFlops);
        }
        Engine::NaiveSmith => naive_div_scale(&mut v, a, Division::Smith, &mut NoFlops),
        Engine::NaiveTextbook => naive_div_scale(&mut v, a, Division::Textbook, &mut NoFlops),
    }
}

fn median(mut v: Vec<u64>) -> u64 {
    v.sort_unstable();
    v[v.len() / 2]
}

fn per_element(total: u64, n: usize) -> Option<f64> {
    (n > 0).then(|| total as f64 / n as f64)
}

fn row<T: Real>(engine: Engine, x: &[Complex<T>], a: Complex<T>, reps: u32) -> BenchRow {
    let n = x.len();
    let mut flops = FlopCounter::default();
    engine.run(&mut x.to_vec(), a, &mut flops);
    let times = (0..reps)
        .map(|_| {
            let mut buf = x.to_vec();
            let start = Instant::now();
            apply(engine, black_box(&mut buf), black_box(a));
            let ns = start.elapsed().as_nanos() as u64;
            black_box(&buf);
            ns
        })
        .collect();
    let median_ns = median(times);
    BenchRow {
        engine,
        n,
        reps,
        median_ns,
        ns_per_element: per_element(median_ns, n),
        flops,
        mul_add_per_element: per_element(flops.mul_add_flops(), n),
        divisions_per_element: per_element(flops.real_div, n),
    }
}

/// Flops per element of one engine on a single element.
fn unit_flops<T: Real>(engine: Engine, a: Complex<T>, include_divisions: bool) -> u64 {
    let mut flops = FlopCounter::default();
    engine.run(&mut [Complex::one()], a, &mut flops);
    if include_divisions {
        flops.total_flops()
    } else {
        flops.mul_add_flops()
    }
}

fn bench<T: Real>(args: &BenchArgs, engines: &[Engine]) -> BenchReport {
    let a = denominator::<T>(args.seed);
    let mut rows = Vec::new();
    for &n in &args.sizes {
        let x = input::<T>(n, args.seed);
        for &engine in engines {
            rows.push(row(engine, &x, a, args.reps));
        }
    }
    BenchReport {
        command: "bench",
        precision: T::PRECISION,
        seed: args.seed,
        denominator: [hexfloat::format(a.re), hexfloat::format(a.im)],
        case: reciprocal_plan(a).case,
        rows,
        flop_comparison: FlopComparison {
            crscl: unit_flops(Engine::Crscl, a, false),
            naive_smith: unit_flops(Engine::NaiveSmith, a, true),
            naive_textbook: unit_flops(Engine::NaiveTextbook, a, true),
            naive_reference_minimum: NAIVE_REFERENCE_MINIMUM,
        },
    }
}

pub fn report(args: &BenchArgs) -> BenchReport {
    let engines = if args.engines.is_empty() {
        Engine::ALL.to_vec()
    } else {
        args.engines.clone()
    };
    match args.common.precision {
        Precision::Binary32 => bench::<f32>(args, &engines),
        Precision::Binary64 => bench::<f64>(args, &engines),
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or("n/a".to_string(), |v| format!("{v:.3}"))
}

fn text(r: &BenchReport) -> String {
    let mut s = String::new();
    let w = &mut s;
    writeln!(
        w,
        "bench {} a=({} {}) case={} reps={}",
        r.precision,
        r.denominator[0],
        r.denominator[1],
        r.case,
        r.rows.first().map_or(0, |x| x.reps)
    )
    .unwrap();
    writeln!(
        w,
        "{:<16} {:>9} {:>14} {:>12} {:>10} {:>10}",
        "engine", "n", "median_ns", "ns/element", "flops/el", "divs/el"
    )
    .unwrap();
    for x in &r.rows {
        writeln!(
            w,
            "{:<16} {:>9} {:>14} {:>12} {:>10} {:>10}",
            x.engine.name(),
            x.n,
            x.median_ns,
            opt(x.ns_per_element),
            opt(x.mul_add_per_element),
            opt(x.divisions_per_element)
        )
        .unwrap();
    }
    let f = &r.flop_comparison;
    writeln!(
        w,
        "flops per element: crscl {} (no divisions), naive_smith {}, naive_textbook {}, naive reference minimum {}",
        f.crscl, f.naive_smith, f.naive_textbook, f.naive_reference_minimum
    )
    .unwrap();
    s
}

fn csv(r: &BenchReport) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "command",
        "precision",
        "engine",
        "n",
        "reps",
        "median_ns",
        "ns_per_element",
        "mul_add_per_element",
        "divisions_per_element",
    ])
    .map_err(std::io::Error::from)?;
    let cell = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
    for x in &r.rows {
        w.write_record([
            r.command.to_string(),
            r.precision.to_string(),
            x.engine.to_string(),
            x.n.to_string(),
            x.reps.to_string(),
            x.median_ns.to_string(),
            cell(x.ns_per_element),
            cell(x.mul_add_per_element),
            cell(x.divisions_per_element),
        ])
        .map_err(std::io::Error::from)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn run(args: &BenchArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let r = report(args);
    let out = match args.common.format {
        Format::Text => text(&r),
        Format::Json => serde_json::to_string_pretty(&r).map_err(std::io::Error::from)? + "\n",
        Format::Csv => csv(&r)?,
    };
    emit(args.common.out.as_deref(), &out, stdout)?;
    Ok(EXIT_PASS)
}
