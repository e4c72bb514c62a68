//! The `qam` command-line front end.
//!
//! Exit codes: 0 success, 2 input error, 3 domain or range error,
//! 4 convergence error, 5 verification failure.

use std::ffi::OsString;
use std::fs;
use std::io::Read;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{Branch, FamilySpec, ScaleFamily};
use crate::generator::Generator;
use crate::mean::{mean, WeightedSample};
use crate::neutral::NeutralMap;
use crate::solver::{solve, sweep, DEFAULT_TOL};
use crate::verify::{run_suite, Report, Suite};

#[derive(Debug, Parser)]
#[command(name = "qam", version, about = "Quasi-arithmetic means and invariant scales")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Weighted quasi-arithmetic mean of a sample
    Mean {
        #[command(flatten)]
        generator: GeneratorArgs,
        /// CSV with header `value,weight` (`-` for stdin)
        #[arg(long)]
        sample: PathBuf,
    },
    /// Find the family index whose mean hits a target
    Solve {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        sample: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        target: f64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// k-th f-root of the neutral map (a, b)
    Root {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        #[arg(long)]
        k: u32,
        #[command(flatten)]
        generator: GeneratorArgs,
    },
    /// Table of (beta, mean) over a grid of family indices
    FamilySweep {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        sample: PathBuf,
        /// Comma-separated indices, e.g. `-2,0,1.5`
        #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["beta_min", "beta_max", "steps"])]
        betas: Option<String>,
        #[arg(long, allow_hyphen_values = true, default_value_t = -5.0)]
        beta_min: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 5.0)]
        beta_max: f64,
        #[arg(long, default_value_t = 11)]
        steps: usize,
    },
    /// Run verification suites and print a JSON report
    Verify {
        /// internality | homogeneity | translation | noncomparability | scale | all
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, env = "QAM_SEED", default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
}

#[derive(Debug, Args)]
struct GeneratorArgs {
    /// Generator expression as inline JSON
    #[arg(long, conflicts_with = "generator_file")]
    generator: Option<String>,
    /// File holding the generator JSON
    #[arg(long)]
    generator_file: Option<PathBuf>,
}

impl GeneratorArgs {
    fn resolve(&self) -> Result<Option<Generator>> {
        let text = match (&self.generator, &self.generator_file) {
            (Some(t), _) => t.clone(),
            (None, Some(p)) => read_path(p)?,
            (None, None) => return Ok(None),
        };
        Generator::from_json(&text).map(Some)
    }
}

#[derive(Debug, Args)]
struct FamilyArgs {
    /// Whole family as JSON `{case, generator, a, b, branch}`
    #[arg(long, conflicts_with_all = ["family_file", "generator", "generator_file", "a", "b"])]
    family: Option<String>,
    #[arg(long, conflicts_with_all = ["generator", "generator_file", "a", "b"])]
    family_file: Option<PathBuf>,
    #[command(flatten)]
    generator: GeneratorArgs,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    /// positive | negative (scaling families whose shift changes sign)
    #[arg(long)]
    branch: Option<String>,
}

impl FamilyArgs {
    fn resolve(&self) -> Result<ScaleFamily> {
        let branch = match self.branch.as_deref() {
            None => None,
            Some("positive") => Some(Branch::Positive),
            Some("negative") => Some(Branch::Negative),
            Some(other) => return Err(Error::Input(format!("unknown branch {other:?}"))),
        };
        let from_json = |text: &str| -> Result<ScaleFamily> {
            let mut spec: FamilySpec = serde_json::from_str(text)
                .map_err(|e| Error::Input(format!("bad family JSON: {e}")))?;
            if branch.is_some() {
                spec.branch = branch;
            }
            ScaleFamily::from_spec(&spec)
        };
        if let Some(text) = &self.family {
            return from_json(text);
        }
        if let Some(p) = &self.family_file {
            return from_json(&read_path(p)?);
        }
        let g = self
            .generator
            .resolve()?
            .ok_or_else(|| Error::Input("give --family, --family-file or --generator".into()))?;
        let (a, b) = match (self.a, self.b) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::Input("a family needs both --a and --b".into())),
        };
        let n = NeutralMap::from_coeffs(&g, a, b)?;
        let mut families = crate::family::build(&g, &n)?;
        match branch {
            None if families.len() > 1 => Err(Error::Input(
                "the shifted generator changes sign; choose --branch positive or negative".into(),
            )),
            None => Ok(families.remove(0)),
            Some(br) => families
                .into_iter()
                .find(|f| f.branch() == Some(br))
                .ok_or_else(|| Error::Input(format!("branch {br:?} is empty"))),
        }
    }
}

fn read_path(p: &PathBuf) -> Result<String> {
    if p.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Error::Input(format!("stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(p).map_err(|e| Error::Input(format!("{}: {e}", p.display())))
}

fn read_sample(p: &PathBuf) -> Result<WeightedSample> {
    WeightedSample::from_csv(read_path(p)?.as_bytes())
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

/// Round to 12 significant digits and print the shortest form, switching to
/// exponent notation outside `[1e-6, 1e15)`.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    if rounded == 0.0 {
        return "0".into();
    }
    let mag = rounded.abs();
    if (1e-6..1e15).contains(&mag) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

/// CSV text `beta,mean` for sweep rows.
pub fn format_sweep_csv(rows: &[(f64, f64)]) -> String {
    let mut out = String::from("beta,mean\n");
    for (beta, m) in rows {
        out.push_str(&format_number(*beta));
        out.push(',');
        out.push_str(&format_number(*m));
        out.push('\n');
    }
    out
}

pub fn parse_sweep_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| Error::Input(format!("CSV header: {e}")))?;
    if headers.iter().collect::<Vec<_>>() != ["beta", "mean"] {
        return Err(Error::Input("sweep CSV must have header beta,mean".into()));
    }
    rdr.records()
        .map(|rec| {
            let rec = rec.map_err(|e| Error::Input(e.to_string()))?;
            let num = |i: usize| -> Result<f64> {
                rec.get(i)
                    .unwrap_or("")
                    .parse()
                    .map_err(|_| Error::Input(format!("bad number in row {:?}", rec)))
            };
            Ok((num(0)?, num(1)?))
        })
        .collect()
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    suite: &'a str,
    seed: u64,
    trials: usize,
    passed: bool,
    reports: Vec<Report>,
}

pub fn run<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            let code = if e.use_stderr() { 2 } else { 0 };
            return if e.use_stderr() {
                CliOutput {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                CliOutput {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    match execute(cli.command) {
        Ok((code, stdout)) => CliOutput {
            code,
            stdout,
            stderr: String::new(),
        },
        Err(e) => CliOutput {
            code: e.exit_code() as u8,
            stdout: String::new(),
            stderr: format!("error[{}]: {e}\n", e.kind()),
        },
    }
}

fn execute(cmd: Command) -> Result<(u8, String)> {
    match cmd {
        Command::Mean { generator, sample } => {
            let g = generator
                .resolve()?
                .ok_or_else(|| Error::Input("give --generator or --generator-file".into()))?;
            let s = read_sample(&sample)?;
            Ok((0, format!("{}\n", format_number(mean(&g, &s)?))))
        }
        Command::Solve {
            family,
            sample,
            target,
            tol,
        } => {
            let fam = family.resolve()?;
            let s = read_sample(&sample)?;
            let beta = solve(&fam, &s, target, tol)?;
            let achieved = fam.mean_at(beta, &s)?.resolve(&s);
            Ok((
                0,
                format!("beta={} mean={}\n", format_number(beta), format_number(achieved)),
            ))
        }
        Command::Root { a, b, k, generator } => {
            let g = generator.resolve()?.unwrap_or_else(Generator::identity);
            let root = NeutralMap::from_coeffs(&g, a, b)?.kth_root(k)?;
            Ok((
                0,
                format!("p={} q={}\n", format_number(root.a()), format_number(root.b())),
            ))
        }
        Command::FamilySweep {
            family,
            sample,
            betas,
            beta_min,
            beta_max,
            steps,
        } => {
            let fam = family.resolve()?;
            let s = read_sample(&sample)?;
            let grid = match betas {
                Some(list) => parse_beta_list(&list)?,
                None => linear_grid(beta_min, beta_max, steps)?,
            };
            Ok((0, format_sweep_csv(&sweep(&fam, &s, &grid)?)))
        }
        Command::Verify {
            suite,
            seed,
            trials,
        } => {
            let which: Suite = suite.parse()?;
            let reports = run_suite(which, trials, seed);
            let passed = reports.iter().all(|r| r.passed);
            let out = VerifyOutput {
                suite: &suite,
                seed,
                trials,
                passed,
                reports,
            };
            let mut text = serde_json::to_string_pretty(&out).expect("report serializes");
            text.push('\n');
            Ok((if passed { 0 } else { 5 }, text))
        }
    }
}

fn parse_beta_list(list: &str) -> Result<Vec<f64>> {
    list.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .ok()
                .filter(|b| b.is_finite())
                .ok_or_else(|| Error::Input(format!("bad beta {t:?}")))
        })
        .collect()
}

fn linear_grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite()) || steps == 0 || (steps == 1 && lo != hi) {
        return Err(Error::Input(format!(
            "grid needs finite bounds and at least 2 steps, got [{lo}, {hi}] x {steps}"
        )));
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    let h = (hi - lo) / (steps - 1) as f64;
    Ok((0..steps).map(|i| lo + h * i as f64).collect())
}
