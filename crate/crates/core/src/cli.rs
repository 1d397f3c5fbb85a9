//! Command-line front end: `classify`, `experiment` and `sweep`.
//!
//! Exponents accept the literal `inf`. Exit status is 0 on success, 2 for invalid input (no
//! output file is written) and 3 when the numerics are infeasible for the chosen grid (an
//! experiment keeps the rows computed so far and ends with a `#error` line).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::Error;
use crate::presets::GridPreset;
use crate::spaces::{Family, Setting, SpaceParams};
use crate::szasz::{classify, SzaszQuery};
use crate::witnesses::{divergence_experiment, ExperimentRecord, WitnessKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "szasz",
    version,
    about = "Classify and probe weighted Fourier inequalities on Besov and Triebel-Lizorkin spaces"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weak and strong verdicts for one parameter system.
    Classify(PointArgs),
    /// Ratio of the weighted functional to the space norm along a witness family.
    Experiment(ExperimentArgs),
    /// Classify every combination of comma-separated parameter lists.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub s: String,
    #[arg(long, allow_hyphen_values = true)]
    pub p: String,
    #[arg(long, allow_hyphen_values = true)]
    pub q: String,
    #[arg(long, allow_hyphen_values = true)]
    pub r: String,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub n: String,
    #[arg(long, default_value = "B")]
    pub family: String,
    #[arg(long, default_value = "homogeneous")]
    pub setting: String,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long)]
    pub kind: String,
    /// Comma-separated sizes, e.g. `2,4,8,16`; an empty string gives no rows.
    #[arg(long, allow_hyphen_values = true)]
    pub sizes: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Grid preset; defaults to the preset suited to the kind.
    #[arg(long)]
    pub grid: Option<String>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub s: String,
    #[arg(long, allow_hyphen_values = true)]
    pub p: String,
    #[arg(long, allow_hyphen_values = true)]
    pub q: String,
    #[arg(long, allow_hyphen_values = true)]
    pub r: String,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub n: String,
    #[arg(long, default_value = "B")]
    pub family: String,
    #[arg(long, default_value = "homogeneous")]
    pub setting: String,
}

/// A failure with its exit status and one-line message.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_INVALID, message: message.into() }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParams(_) | Error::InvalidExponent(_) | Error::InfiniteRInTriebel => EXIT_INVALID,
            _ => EXIT_INFEASIBLE,
        };
        Failure { code, message: e.to_string() }
    }
}

/// Parses a real number or `inf`.
pub fn parse_real(text: &str) -> Option<f64> {
    match text.trim() {
        "inf" | "+inf" | "infinity" => Some(f64::INFINITY),
        "-inf" | "-infinity" => Some(f64::NEG_INFINITY),
        t => t.parse::<f64>().ok().filter(|v| v.is_finite()),
    }
}

/// Shortest representation that parses back to the same value; `inf` for infinity.
pub fn format_real(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x}")
    }
}

/// Seventeen significant digits.
fn format_sig17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format_real(x)
    }
}

fn json_real(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::String(format_real(x))
    }
}

fn split_list(text: &str) -> Vec<&str> {
    text.split(',').map(str::trim).filter(|t| !t.is_empty()).collect()
}

fn real_list(name: &str, text: &str) -> Result<Vec<f64>, Failure> {
    split_list(text)
        .into_iter()
        .map(|t| parse_real(t).ok_or_else(|| invalid(format!("invalid value {t:?} for --{name}"))))
        .collect()
}

fn dim_list(text: &str) -> Result<Vec<u32>, Failure> {
    split_list(text)
        .into_iter()
        .map(|t| {
            t.parse::<u32>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| invalid(format!("invalid dimension {t:?} for --n")))
        })
        .collect()
}

fn family_list(text: &str) -> Result<Vec<Family>, Failure> {
    split_list(text).into_iter().map(|t| t.parse::<Family>().map_err(Failure::from)).collect()
}

fn single<T: Copy>(name: &str, values: Vec<T>) -> Result<T, Failure> {
    match values.as_slice() {
        [v] => Ok(*v),
        _ => Err(invalid(format!("--{name} needs exactly one value"))),
    }
}

fn point_query(a: &PointArgs) -> Result<SzaszQuery, Failure> {
    let s = single("s", real_list("s", &a.s)?)?;
    let p = single("p", real_list("p", &a.p)?)?;
    let q = single("q", real_list("q", &a.q)?)?;
    let r = single("r", real_list("r", &a.r)?)?;
    let n = single("n", dim_list(&a.n)?)?;
    let family = single("family", family_list(&a.family)?)?;
    let setting: Setting = a.setting.parse()?;
    Ok(SzaszQuery::new(SpaceParams { s, r, q, family, setting }, p, n)?)
}

fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for row in rows {
        w.write_record(row).expect("writing to memory");
    }
    w.into_inner().expect("flushing to memory")
}

fn json_lines(objects: &[Value]) -> Vec<u8> {
    let mut out = Vec::new();
    for v in objects {
        serde_json::to_writer(&mut out, v).expect("writing to memory");
        out.push(b'\n');
    }
    out
}

const CLASSIFY_HEADER: [&str; 11] =
    ["s", "p", "q", "r", "n", "family", "setting", "theta", "weak", "strong", "verdict_trace"];
const SWEEP_HEADER: [&str; 9] = ["s", "p", "q", "r", "n", "family", "theta", "weak", "strong"];
const EXPERIMENT_HEADER: [&str; 4] = ["size", "space_norm", "lhs", "ratio"];

fn run_classify(a: &PointArgs, format: Format) -> Result<Vec<u8>, Failure> {
    let query = point_query(a)?;
    let c = classify(&query);
    let sp = &query.space;
    Ok(match format {
        Format::Csv => {
            let row = vec![
                format_real(sp.s),
                format_real(query.p),
                format_real(sp.q),
                format_real(sp.r),
                query.n.to_string(),
                sp.family.to_string(),
                sp.setting.to_string(),
                format_real(c.theta),
                c.weak.to_string(),
                c.strong.to_string(),
                c.trace_string(),
            ];
            csv_bytes(&CLASSIFY_HEADER, &[row])
        }
        Format::Json => {
            let trace = serde_json::to_value(&c.verdict_trace).expect("plain data");
            json_lines(&[json!({
                "s": json_real(sp.s), "p": json_real(query.p), "q": json_real(sp.q),
                "r": json_real(sp.r), "n": query.n, "family": sp.family.to_string(),
                "setting": sp.setting.to_string(), "theta": json_real(c.theta),
                "weak": c.weak, "strong": c.strong, "verdict_trace": trace,
            })])
        }
    })
}

fn run_sweep(a: &SweepArgs, format: Format) -> Result<Vec<u8>, Failure> {
    let ss = real_list("s", &a.s)?;
    let ps = real_list("p", &a.p)?;
    let qs = real_list("q", &a.q)?;
    let rs = real_list("r", &a.r)?;
    let ns = dim_list(&a.n)?;
    let fams = family_list(&a.family)?;
    let setting: Setting = a.setting.parse()?;
    let mut queries = Vec::new();
    for &s in &ss {
        for &p in &ps {
            for &q in &qs {
                for &r in &rs {
                    for &n in &ns {
                        for &family in &fams {
                            queries.push(SzaszQuery::new(SpaceParams { s, r, q, family, setting }, p, n)?);
                        }
                    }
                }
            }
        }
    }
    let results: Vec<_> = queries.iter().map(|q| (q, classify(q))).collect();
    Ok(match format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = results
                .iter()
                .map(|(q, c)| {
                    vec![
                        format_real(q.space.s),
                        format_real(q.p),
                        format_real(q.space.q),
                        format_real(q.space.r),
                        q.n.to_string(),
                        q.space.family.to_string(),
                        format_real(c.theta),
                        c.weak.to_string(),
                        c.strong.to_string(),
                    ]
                })
                .collect();
            csv_bytes(&SWEEP_HEADER, &rows)
        }
        Format::Json => {
            let objs: Vec<Value> = results
                .iter()
                .map(|(q, c)| {
                    json!({
                        "s": json_real(q.space.s), "p": json_real(q.p), "q": json_real(q.space.q),
                        "r": json_real(q.space.r), "n": q.n, "family": q.space.family.to_string(),
                        "theta": json_real(c.theta), "weak": c.weak, "strong": c.strong,
                    })
                })
                .collect();
            json_lines(&objs)
        }
    })
}

fn default_preset(kind: WitnessKind) -> GridPreset {
    match kind {
        WitnessKind::Modulated | WitnessKind::ModulatedBorderline => GridPreset::HiBand,
        WitnessKind::RandomBandlimited => GridPreset::MidBand,
        WitnessKind::DilatedLow | WitnessKind::LowfreqBlowup => GridPreset::LoBand,
    }
}

fn experiment_bytes(records: &[ExperimentRecord], error: Option<&Error>, format: Format) -> Vec<u8> {
    match format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = records
                .iter()
                .map(|r| {
                    vec![
                        r.size.to_string(),
                        format_sig17(r.space_norm),
                        format_sig17(r.lhs),
                        format_sig17(r.ratio),
                    ]
                })
                .collect();
            let mut out = csv_bytes(&EXPERIMENT_HEADER, &rows);
            if let Some(e) = error {
                writeln!(out, "#error {}", e.to_string().replace('\n', " ")).expect("writing to memory");
            }
            out
        }
        Format::Json => {
            let mut objs: Vec<Value> = records
                .iter()
                .map(|r| {
                    json!({
                        "size": r.size, "space_norm": json_real(r.space_norm),
                        "lhs": json_real(r.lhs), "ratio": json_real(r.ratio),
                    })
                })
                .collect();
            if let Some(e) = error {
                objs.push(json!({ "error": e.to_string() }));
            }
            json_lines(&objs)
        }
    }
}

/// Validates the whole configuration, then runs. Returns the output bytes and, if the run
/// stopped early, the infeasibility that stopped it.
fn run_experiment(a: &ExperimentArgs, format: Format) -> Result<(Vec<u8>, Option<Failure>), Failure> {
    let query = point_query(&a.point)?;
    query.space.validate()?;
    let kind: WitnessKind = a.kind.parse()?;
    let sizes: Vec<usize> = split_list(&a.sizes)
        .into_iter()
        .map(|t| t.parse::<usize>().map_err(|_| invalid(format!("invalid size {t:?} for --sizes"))))
        .collect::<Result<_, _>>()?;
    let preset = match &a.grid {
        Some(name) => name.parse::<GridPreset>()?,
        None => default_preset(kind),
    };
    if query.n != 1 {
        return Err(invalid(format!("grid presets are one-dimensional, got n = {}", query.n)));
    }
    if kind == WitnessKind::LowfreqBlowup && !(query.space.s > query.n as f64 / query.space.r) {
        return Err(invalid("lowfreq_blowup needs s > n/r"));
    }
    let outcome = divergence_experiment(kind, &query, &sizes, &preset.grid(), a.seed);
    let bytes = experiment_bytes(&outcome.records, outcome.error.as_ref(), format);
    Ok((bytes, outcome.error.map(Failure::from)))
}

fn emit(out: &Option<PathBuf>, bytes: &[u8]) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|e| Failure {
            code: EXIT_INFEASIBLE,
            message: format!("cannot write {}: {e}", path.display()),
        }),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| Failure { code: EXIT_INFEASIBLE, message: format!("cannot write output: {e}") }),
    }
}

fn execute(config: &RunConfig) -> Result<(), Failure> {
    let (bytes, failure) = match &config.command {
        Command::Classify(a) => (run_classify(a, config.format)?, None),
        Command::Sweep(a) => (run_sweep(a, config.format)?, None),
        Command::Experiment(a) => run_experiment(a, config.format)?,
    };
    emit(&config.out, &bytes)?;
    failure.map_or(Ok(()), Err)
}

/// Parses arguments, runs the subcommand and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match execute(&config) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("szasz: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip() {
        assert_eq!(parse_real("inf"), Some(f64::INFINITY));
        assert_eq!(parse_real(" 1.5 "), Some(1.5));
        assert_eq!(parse_real("nan"), None);
        assert_eq!(parse_real("x"), None);
        for x in [0.1, 1.0 / 3.0, -2.5e-17, 4.000000000000001, f64::INFINITY] {
            assert_eq!(parse_real(&format_real(x)), Some(x));
        }
        assert_eq!(format_sig17(1.0 / 3.0), "3.3333333333333331e-1");
        assert_eq!(format_sig17(1.0 / 3.0).parse::<f64>().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn lists() {
        assert_eq!(real_list("p", "1, 2,inf").unwrap(), vec![1.0, 2.0, f64::INFINITY]);
        assert!(real_list("p", "").unwrap().is_empty());
        assert!(real_list("p", "1,a").is_err());
        assert!(dim_list("0").is_err());
        assert_eq!(family_list("B,F").unwrap(), vec![Family::B, Family::F]);
    }

    #[test]
    fn error_codes() {
        assert_eq!(Failure::from(Error::InvalidExponent(-1.0)).code, EXIT_INVALID);
        assert_eq!(Failure::from(Error::InfiniteRInTriebel).code, EXIT_INVALID);
        let band = Error::SizeExceedsBand { size: 40, reason: "x".into() };
        assert_eq!(Failure::from(band).code, EXIT_INFEASIBLE);
    }
}
