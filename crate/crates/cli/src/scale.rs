//! `scale`: divides a vector file by a complex scalar.

use std::io::Write;

use crscl::textfmt::{format_vector, parse_complex, parse_vector};
use crscl::{crscl, hexfloat, CaseTag, Complex, NoFlops, Precision, Real, StridedVector};
use serde::Serialize;

use crate::{emit, read_file, CliError, CliResult, Format, ScaleArgs, EXIT_PASS};

#[derive(Debug, Serialize)]
pub struct Step {
    pub kind: &'static str,
    pub value: [String; 2],
}

#[derive(Debug, Serialize)]
pub struct ScaleReport {
    pub command: &'static str,
    pub precision: Precision,
    pub engine: &'static str,
    pub denominator: [String; 2],
    pub case: CaseTag,
    pub steps: Vec<Step>,
    pub output: Vec<[String; 2]>,
    #[serde(skip)]
    vector: String,
}

fn hex2<T: Real>(v: Complex<T>) -> [String; 2] {
    [hexfloat::format(v.re), hexfloat::format(v.im)]
}

fn scale<T: Real>(input: &str, denominator: &str) -> CliResult<ScaleReport> {
    let a: Complex<T> =
        parse_complex(denominator).map_err(|e| CliError::Usage(format!("--denominator: {e}")))?;
    let mut x: Vec<Complex<T>> = parse_vector(input)?;
    let plan = crscl(&mut StridedVector::contiguous(&mut x), a, &mut NoFlops);
    Ok(ScaleReport {
        command: "scale",
        precision: T::PRECISION,
        engine: "crscl",
        denominator: hex2(a),
        case: plan.case,
        steps: plan
            .steps()
            .iter()
            .map(|s| Step {
                kind: s.kind(),
                value: hex2(s.value()),
            })
            .collect(),
        output: x.iter().map(|v| hex2(*v)).collect(),
        vector: format_vector(&x),
    })
}

impl ScaleReport {
    /// `#` lines naming the case and each multiplier in order.
    pub fn explanation(&self) -> String {
        let mut s = format!("# case: {}\n", self.case);
        for (k, step) in self.steps.iter().enumerate() {
            s += &format!(
                "# step {}: {} {} {}\n",
                k + 1,
                step.kind,
                step.value[0],
                step.value[1]
            );
        }
        s
    }
}

pub fn report(args: &ScaleArgs) -> CliResult<ScaleReport> {
    let input = read_file(&args.input)?;
    match args.common.precision {
        Precision::Binary32 => scale::<f32>(&input, &args.denominator),
        Precision::Binary64 => scale::<f64>(&input, &args.denominator),
    }
}

pub fn run(args: &ScaleArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let r = report(args)?;
    let out = match args.common.format {
        Format::Text if args.explain => r.explanation() + &r.vector,
        Format::Text => r.vector.clone(),
        Format::Json => serde_json::to_string_pretty(&r).map_err(std::io::Error::from)? + "\n",
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["re", "im"]).map_err(std::io::Error::from)?;
            for v in &r.output {
                w.write_record(v).map_err(std::io::Error::from)?;
            }
            let bytes = w.into_inner().map_err(|e| e.into_error())?;
            String::from_utf8(bytes).expect("csv output is utf-8")
        }
    };
    emit(args.common.out.as_deref(), &out, stdout)?;
    Ok(EXIT_PASS)
}
