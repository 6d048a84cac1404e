//! Command-line front end.
//!
//! Exit codes: 0 success, 2 input error, 3 construction precondition failure,
//! 4 a requested check failed.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::constructions::{p_to_s, werner_ge_threshold, ConstructSpec};
use crate::distill::{npt_subspace_check, rank2_witness_search, sample_random_rank};
use crate::error::{Error, Result};
use crate::linalg::Bipartition;
use crate::measures::{subspace_measure_across_cut, OptimizerPolicy};
use crate::policy::NumericPolicy;
use crate::subspace::Subspace;
use crate::verify::{self, Mode, VerifyConfig};

pub const DEFAULT_SEED: u64 = 0xA5A5;
pub const SEED_ENV: &str = "GESFORGE_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_CHECK_FAILED: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "gesforge", version, about = "Build and certify entangled multipartite subspaces")]
pub struct Cli {
    /// Root seed for every randomized step (default: $GESFORGE_SEED or 0xA5A5).
    #[arg(long, global = true, value_parser = parse_seed)]
    pub seed: Option<u64>,

    /// Output format; each command has a natural default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write the output to this file instead of stdout.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Param {
    S,
    P,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a subspace from a JSON construction spec.
    Construct {
        spec_file: PathBuf,
        #[command(flatten)]
        optimizer: OptimizerArgs,
    },
    /// Geometric measure of a subspace across one or all cuts.
    Measure {
        subspace_file: PathBuf,
        /// Parties on one side of the cut, comma separated (default: all cuts).
        #[arg(long, value_delimiter = ',')]
        cut: Option<Vec<usize>>,
        #[command(flatten)]
        optimizer: OptimizerArgs,
    },
    /// Product-state witness over a grid of two Werner states.
    WernerScan {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 21)]
        grid: usize,
        #[arg(long, value_enum, default_value_t = Param::S)]
        param: Param,
    },
    /// NPT or one-copy distillability check by sampling states on a subspace.
    Check {
        subspace_file: PathBuf,
        #[arg(long, conflicts_with = "distill", required_unless_present = "distill")]
        npt: bool,
        #[arg(long)]
        distill: bool,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[command(flatten)]
        optimizer: OptimizerArgs,
    },
    /// Recompute the reference values and print a pass/fail table.
    VerifyPaper {
        #[arg(long, conflicts_with = "full")]
        fast: bool,
        #[arg(long)]
        full: bool,
    },
}

#[derive(Debug, Args)]
pub struct OptimizerArgs {
    /// Seesaw / search restarts.
    #[arg(long)]
    pub restarts: Option<usize>,
}

fn parse_seed(text: &str) -> std::result::Result<u64, String> {
    let t = text.trim();
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    };
    parsed.map_err(|e| format!("invalid seed {text:?}: {e}"))
}

/// Explicit flag, then the environment, then the default.
pub fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => parse_seed(&v).map_err(|e| Error::Argument(format!("{SEED_ENV}: {e}"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

/// Outcome of a command: the rendered output and the exit code.
pub struct Outcome {
    pub text: String,
    pub exit_code: i32,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, exit_code: EXIT_OK }
    }
}

pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Precondition(_) => EXIT_PRECONDITION,
        Error::Argument(_) | Error::Resource(_) | Error::Data(_) => EXIT_INPUT,
    }
}

/// Parses nothing; runs an already parsed command line and writes the
/// output. Returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match execute(&cli) {
        Ok(out) => match emit(&cli.output, &out.text) {
            Ok(()) => out.exit_code,
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_INPUT
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn emit(path: &Option<PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::Argument(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    let seed = resolve_seed(cli.seed)?;
    match &cli.command {
        Command::Construct { spec_file, optimizer } => {
            reject_csv(cli.format, "construct")?;
            let spec = ConstructSpec::from_json(&read(spec_file)?)?;
            let w = spec.build(&optimizer.policy(seed)?)?;
            Ok(Outcome::ok(w.to_json() + "\n"))
        }
        Command::Measure { subspace_file, cut, optimizer } => {
            reject_csv(cli.format, "measure")?;
            let w = load_subspace(subspace_file)?;
            let report = measure(&w, cut.as_deref(), &optimizer.policy(seed)?)?;
            Ok(Outcome::ok(to_json(&report)))
        }
        Command::WernerScan { d, grid, param } => {
            let scan = werner_scan(*d, *grid, *param)?;
            eprintln!(
                "square-domain corner: s = 1/sqrt2 = {}, p = {}",
                fmt_sig12(std::f64::consts::FRAC_1_SQRT_2),
                fmt_sig12(scan.corner_p)
            );
            let text = match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => scan.to_csv(),
                Format::Json => to_json(&scan),
            };
            Ok(Outcome::ok(text))
        }
        Command::Check { subspace_file, npt, distill: _, samples, optimizer } => {
            reject_csv(cli.format, "check")?;
            let w = load_subspace(subspace_file)?;
            let cuts = Bipartition::all_cuts(w.profile());
            let (text, passed) = if *npt {
                let r = npt_subspace_check(&w, &cuts, *samples, seed)?;
                (to_json(&r), r.passed)
            } else {
                let r = distill_check(&w, &cuts, *samples, seed, &optimizer.policy(seed)?)?;
                (to_json(&r), r.passed)
            };
            Ok(Outcome { text, exit_code: if passed { EXIT_OK } else { EXIT_CHECK_FAILED } })
        }
        Command::VerifyPaper { fast, full: _ } => {
            let mode = if *fast { Mode::Fast } else { Mode::Full };
            let report = verify::run(&VerifyConfig::new(mode, seed));
            let text = match cli.format {
                None => report.to_table(),
                Some(Format::Csv) => report.to_csv(),
                Some(Format::Json) => to_json(&report),
            };
            Ok(Outcome { text, exit_code: if report.all_passed { EXIT_OK } else { EXIT_CHECK_FAILED } })
        }
    }
}

impl OptimizerArgs {
    fn policy(&self, seed: u64) -> Result<OptimizerPolicy> {
        let mut p = OptimizerPolicy::default().with_seed(seed);
        if let Some(r) = self.restarts {
            p = p.with_restarts(r);
        }
        p.validate()?;
        Ok(p)
    }
}

fn reject_csv(format: Option<Format>, cmd: &str) -> Result<()> {
    if format == Some(Format::Csv) {
        return Err(Error::Argument(format!("{cmd} only produces JSON")));
    }
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))
}

fn load_subspace(path: &Path) -> Result<Subspace> {
    Subspace::from_json(&read(path)?)
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report types serialize") + "\n"
}

fn complex_pairs(v: &nalgebra::DVector<crate::linalg::C64>) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

#[derive(Debug, Serialize)]
pub struct CutMeasure {
    pub cut: Vec<usize>,
    pub cut_label: String,
    pub value: f64,
    pub stable: bool,
    pub restarts_agreeing: usize,
    pub witness_vector: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize)]
pub struct MeasureOutput {
    pub dims: Vec<usize>,
    pub subspace_dim: usize,
    pub restarts: usize,
    pub seed: u64,
    pub cuts: Vec<CutMeasure>,
    pub min_value: f64,
    pub min_cut: Vec<usize>,
}

pub fn measure(w: &Subspace, cut: Option<&[usize]>, opt: &OptimizerPolicy) -> Result<MeasureOutput> {
    let cuts = match cut {
        Some(members) => vec![Bipartition::new(members, w.profile())?],
        None => Bipartition::all_cuts(w.profile()),
    };
    if cuts.is_empty() {
        return Err(Error::Argument("a single-party subspace has no cuts".into()));
    }
    let mut out = Vec::with_capacity(cuts.len());
    for c in &cuts {
        let r = subspace_measure_across_cut(w, c, opt)?;
        out.push(CutMeasure {
            cut: c.members().to_vec(),
            cut_label: c.to_string(),
            value: r.value,
            stable: r.stable,
            restarts_agreeing: r.restarts_agreeing,
            witness_vector: complex_pairs(r.witness_vector.amplitudes()),
        });
    }
    let mut min_i = 0;
    for (i, c) in out.iter().enumerate() {
        if c.value < out[min_i].value {
            min_i = i;
        }
    }
    Ok(MeasureOutput {
        dims: w.profile().dims().to_vec(),
        subspace_dim: w.dim(),
        restarts: opt.restarts,
        seed: opt.seed,
        min_value: out[min_i].value,
        min_cut: out[min_i].cut.clone(),
        cuts: out,
    })
}

#[derive(Debug, Serialize)]
pub struct CutDistill {
    pub cut: Vec<usize>,
    pub cut_label: String,
    pub witnesses_found: usize,
    /// Largest witness value over the samples (0 when a sample had none).
    pub max_witness_value: f64,
    pub worst_sample: usize,
    pub worst_witness: Option<Vec<[f64; 2]>>,
    pub distillable: bool,
}

#[derive(Debug, Serialize)]
pub struct DistillOutput {
    pub dims: Vec<usize>,
    pub subspace_dim: usize,
    pub n_samples: usize,
    pub seed: u64,
    pub cuts: Vec<CutDistill>,
    pub passed: bool,
}

/// Runs the rank-2 witness search on sampled states for every cut.
pub fn distill_check(w: &Subspace, cuts: &[Bipartition], n_samples: usize, seed: u64, opt: &OptimizerPolicy) -> Result<DistillOutput> {
    if n_samples == 0 {
        return Err(Error::Argument("need at least one sample".into()));
    }
    let samples = (0..n_samples)
        .map(|k| sample_random_rank(w, seed, k as u64))
        .collect::<Result<Vec<_>>>()?;
    let mut reports = Vec::with_capacity(cuts.len());
    for cut in cuts {
        let mut found = 0;
        let mut worst: Option<(usize, f64, Option<Vec<[f64; 2]>>)> = None;
        for (k, rho) in samples.iter().enumerate() {
            let res = rank2_witness_search(rho, cut, opt)?;
            let (value, vec) = match &res {
                Some(wit) => {
                    found += 1;
                    (wit.value, Some(complex_pairs(wit.psi.amplitudes())))
                }
                None => (0.0, None),
            };
            if worst.as_ref().map_or(true, |(_, v, _)| value > *v) {
                worst = Some((k, value, vec));
            }
        }
        let (worst_sample, max_witness_value, worst_witness) = worst.expect("at least one sample");
        reports.push(CutDistill {
            cut: cut.members().to_vec(),
            cut_label: cut.to_string(),
            witnesses_found: found,
            max_witness_value,
            worst_sample,
            worst_witness,
            distillable: found == n_samples,
        });
    }
    Ok(DistillOutput {
        dims: w.profile().dims().to_vec(),
        subspace_dim: w.dim(),
        n_samples,
        seed,
        passed: reports.iter().all(|r| r.distillable),
        cuts: reports,
    })
}

#[derive(Debug, Serialize)]
pub struct ScanRow {
    pub x: f64,
    pub y: f64,
    pub witness_value: f64,
    pub certified: bool,
}

#[derive(Debug, Serialize)]
pub struct WernerScan {
    pub d: usize,
    pub param: String,
    /// `p` at the corner of the certified square domain.
    pub corner_p: f64,
    pub rows: Vec<ScanRow>,
}

impl WernerScan {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,witness_value,certified\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                fmt_sig12(r.x),
                fmt_sig12(r.y),
                fmt_sig12(r.witness_value),
                r.certified
            ));
        }
        out
    }
}

/// Witness `s_1 s_2 - 1/2` for two Werner states over an `n × n` grid of
/// `s` in `[0, 1]` or `p` in `[-1, 1]`.
pub fn werner_scan(d: usize, n: usize, param: Param) -> Result<WernerScan> {
    if n < 2 {
        return Err(Error::Argument(format!("grid size must be at least 2, got {n}")));
    }
    let corner_p = werner_ge_threshold(d)?;
    let (lo, hi) = match param {
        Param::S => (0.0, 1.0),
        Param::P => (-1.0, 1.0),
    };
    let axis: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let to_s = |x: f64| match param {
        Param::S => Ok(x),
        Param::P => p_to_s(x, d),
    };
    let margin = NumericPolicy::DEFAULT.strict_margin;
    let mut rows = Vec::with_capacity(n * n);
    for &x in &axis {
        for &y in &axis {
            let w = to_s(x)? * to_s(y)? - 0.5;
            rows.push(ScanRow { x, y, witness_value: w, certified: w > margin });
        }
    }
    Ok(WernerScan {
        d,
        param: match param {
            Param::S => "s".into(),
            Param::P => "p".into(),
        },
        corner_p,
        rows,
    })
}

/// Decimal rendering with 12 significant digits.
pub fn fmt_sig12(x: f64) -> String {
    if x == 0.0 || x.abs() < 1e-15 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (11 - exp).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    // rounding can carry into a new leading digit (9.99.. -> 10.0..)
    let digits = s.chars().filter(|c| c.is_ascii_digit()).skip_while(|&c| c == '0').count();
    if digits > 12 && decimals > 0 {
        s = format!("{x:.prec$}", prec = decimals - 1);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig12_formatting() {
        assert_eq!(fmt_sig12(0.14), "0.140000000000");
        assert_eq!(fmt_sig12(-0.01), "-0.0100000000000");
        assert_eq!(fmt_sig12(1.0), "1.00000000000");
        assert_eq!(fmt_sig12(-0.757359312880714), "-0.757359312881");
        assert_eq!(fmt_sig12(0.0), "0");
        assert_eq!(fmt_sig12(9.9999999999999), "10.0000000000");
    }

    #[test]
    fn seed_parsing() {
        assert_eq!(parse_seed("0xA5A5").unwrap(), 0xA5A5);
        assert_eq!(parse_seed("42").unwrap(), 42);
        assert!(parse_seed("x").is_err());
    }

    #[test]
    fn scan_points() {
        let scan = werner_scan(2, 11, Param::S).unwrap();
        let at = |x: f64, y: f64| scan.rows.iter().find(|r| (r.x - x).abs() < 1e-12 && (r.y - y).abs() < 1e-12).unwrap();
        let r = at(0.8, 0.8);
        assert!((r.witness_value - 0.14).abs() < 1e-12 && r.certified);
        let r = at(0.7, 0.7);
        assert!((r.witness_value + 0.01).abs() < 1e-12 && !r.certified);
        let p = werner_scan(2, 3, Param::P).unwrap();
        assert!((p.corner_p - (3.0 * 2f64.sqrt() - 5.0)).abs() < 1e-12);
        assert!(werner_scan(2, 1, Param::S).is_err());
    }

    #[test]
    fn parses_command_lines() {
        let cli = Cli::try_parse_from(["gesforge", "measure", "w.json", "--cut", "0,2", "--restarts", "8"]).unwrap();
        match cli.command {
            Command::Measure { cut, optimizer, .. } => {
                assert_eq!(cut, Some(vec![0, 2]));
                assert_eq!(optimizer.restarts, Some(8));
            }
            other => panic!("{other:?}"),
        }
        assert!(Cli::try_parse_from(["gesforge", "check", "w.json"]).is_err());
        assert!(Cli::try_parse_from(["gesforge", "check", "w.json", "--npt", "--distill"]).is_err());
        assert!(Cli::try_parse_from(["gesforge", "--seed", "0x10", "verify-paper", "--fast"]).is_ok());
    }
}
