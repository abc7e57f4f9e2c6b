//! The `nilcurv` command-line tool.

pub mod commands;
pub mod error;
pub mod format;
pub mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nilcurv::families::Sign;
use nilcurv::scalar::DEFAULT_REL_TOL;
use nilcurv::{Mode, Tolerance};
use sha2::{Digest, Sha256};

use crate::commands::check::{run_checks, CheckOptions};
use crate::commands::family::{family_file, parse_number, FamilyParams};
use crate::commands::verify::{verify_paper, VerifyOptions};
use crate::commands::{lemma, search};
use crate::error::{CliError, Result};
use crate::format::{load_str, to_json};
use crate::report::Report;

/// Exit status for errors that prevent a report.
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "nilcurv", version, about = "Curvature checks for metric nilpotent Lie algebras")]
pub struct Cli {
    /// Print the JSON report instead of the summary.
    #[arg(long, global = true)]
    pub json: bool,
    /// Also write the JSON report to this path.
    #[arg(long, global = true, value_name = "PATH")]
    pub report: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate an algebra file and report its curvature.
    Check(CheckArgs),
    /// Print or write a named family instance as an algebra file.
    Family(FamilyArgs),
    /// Run a randomized search.
    Search(SearchArgs),
    /// Matrix lemma checks.
    #[command(subcommand)]
    Lemma(LemmaCommand),
    /// Re-run every checkable claim.
    VerifyPaper(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub file: PathBuf,
    /// Relative tolerance; overrides NILCURV_TOL and the file's own value.
    #[arg(long, env = "NILCURV_TOL")]
    pub tol: Option<f64>,
    /// Arithmetic to evaluate in (defaults to the file's mode).
    #[arg(long)]
    pub mode: Option<Mode>,
    /// Also decompose into attributes and check the Einstein system.
    #[arg(long)]
    pub decompose: bool,
    /// Also test the soliton candidate.
    #[arg(long)]
    pub soliton: bool,
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    pub name: String,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub a2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub a3: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Option<Sign>,
    #[arg(long, allow_hyphen_values = true)]
    pub sign: Option<Sign>,
    #[arg(long, default_value = "float")]
    pub mode: Mode,
    /// Write the file here instead of printing it.
    #[arg(long, value_name = "PATH")]
    pub emit: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long, default_value = "lambda-sign")]
    pub problem: String,
    /// Total trials, shared round-robin over the templates.
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum LemmaCommand {
    /// Random symmetric pairs against the eigenvalue interlacing bounds.
    WeylFuzz {
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, env = "NILCURV_TOL", default_value_t = 1e-10)]
        tol: f64,
    },
    /// Kernel/rank conclusions for the `J` family of an algebra.
    Genlem0 {
        #[arg(long)]
        file: Option<PathBuf>,
        /// Comma-separated coordinates of `v`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        v: Option<Vec<f64>>,
        #[arg(long, env = "NILCURV_TOL", default_value_t = DEFAULT_REL_TOL)]
        tol: f64,
    },
    /// Adapted orthonormal basis for a skew family.
    Genlem1 {
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, env = "NILCURV_TOL", default_value_t = DEFAULT_REL_TOL)]
        tol: f64,
    },
    /// Residual of the explicit two-parameter solution.
    ImpCheck {
        #[arg(long, default_value = "3", allow_hyphen_values = true)]
        a1: String,
        #[arg(long, default_value = "4", allow_hyphen_values = true)]
        a2: String,
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        eps: Sign,
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        sign: Sign,
        #[arg(long, default_value = "rational")]
        mode: Mode,
        #[arg(long, env = "NILCURV_TOL", default_value_t = 1e-12)]
        tol: f64,
    },
    /// Multistart minimisation of the residual for `k` blocks.
    ImpSearch {
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Replace every claim's threshold.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Fewer restarts for the slowest search.
    #[arg(long)]
    pub quick: bool,
}

fn read(path: &Path) -> Result<(String, String)> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let hash = hex::encode(Sha256::digest(&bytes));
    let text = String::from_utf8(bytes).map_err(|e| CliError::Parse {
        line: 0,
        column: 0,
        message: e.to_string(),
    })?;
    Ok((text, hash))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn positive(tol: f64) -> Result<f64> {
    if tol.is_finite() && tol > 0.0 {
        Ok(tol)
    } else {
        Err(CliError::Flag(format!("tolerance must be positive, got {tol}")))
    }
}

fn check(a: &CheckArgs) -> Result<Report> {
    let (text, hash) = read(&a.file)?;
    let mut doc = load_str(&text)?;
    if let Some(m) = a.mode {
        doc = doc.into_mode(m)?;
    }
    let tol = positive(a.tol.or(doc.tolerance()).unwrap_or(DEFAULT_REL_TOL))?;
    let mut cmd = String::from("check");
    if let Some(m) = a.mode {
        cmd.push_str(&format!(" --mode {}", m.as_str()));
    }
    if a.decompose {
        cmd.push_str(" --decompose");
    }
    if a.soliton {
        cmd.push_str(" --soliton");
    }
    let mut r = Report::new(cmd, tol);
    r.input_sha256 = Some(hash);
    r.mode = Some(doc.mode().as_str().into());
    let opts = CheckOptions {
        decompose: a.decompose,
        soliton: a.soliton,
    };
    r.extend(run_checks(&doc, opts, &Tolerance::new(tol))?);
    Ok(r)
}

fn family(a: &FamilyArgs) -> Result<String> {
    let params = FamilyParams {
        alpha: a.alpha.clone(),
        r: a.r.clone(),
        a: a.a.clone(),
        a2: a.a2.clone(),
        a3: a.a3.clone(),
        p: a.p.clone(),
        eps: a.eps,
        sign: a.sign,
    };
    let text = to_json(&family_file(&a.name, &params, a.mode)?);
    Ok(match &a.emit {
        Some(path) => {
            write(path, &text)?;
            String::new()
        }
        None => text,
    })
}

fn lemma_report(c: &LemmaCommand) -> Result<Report> {
    let doc = |f: &Option<PathBuf>| -> Result<(Option<format::AnyDocument>, Option<String>)> {
        match f {
            Some(p) => {
                let (text, hash) = read(p)?;
                Ok((Some(load_str(&text)?), Some(hash)))
            }
            None => Ok((None, None)),
        }
    };
    Ok(match c {
        LemmaCommand::WeylFuzz { pairs, seed, tol } => {
            let mut r = Report::new(format!("lemma weyl-fuzz --pairs {pairs} --seed {seed}"), *tol);
            r.push(lemma::weyl(*pairs, *seed, positive(*tol)?));
            r
        }
        LemmaCommand::Genlem0 { file, v, tol } => {
            let (d, hash) = doc(file)?;
            let mut cmd = String::from("lemma genlem0");
            if let Some(v) = v {
                let s: Vec<String> = v.iter().map(f64::to_string).collect();
                cmd.push_str(&format!(" --v {}", s.join(",")));
            }
            let mut r = Report::new(cmd, *tol);
            r.input_sha256 = hash;
            r.push(lemma::genlem0(d.as_ref(), v.clone(), positive(*tol)?)?);
            r
        }
        LemmaCommand::Genlem1 { file, tol } => {
            let (d, hash) = doc(file)?;
            let mut r = Report::new("lemma genlem1", *tol);
            r.input_sha256 = hash;
            r.push(lemma::genlem1(d.as_ref(), positive(*tol)?)?);
            r
        }
        LemmaCommand::ImpCheck {
            a1,
            a2,
            eps,
            sign,
            mode,
            tol,
        } => {
            let s = |x: &Sign| if *x == Sign::Plus { "+" } else { "-" };
            let mut r = Report::new(
                format!(
                    "lemma imp-check --a1 {a1} --a2 {a2} --eps {} --sign {} --mode {}",
                    s(eps),
                    s(sign),
                    mode.as_str()
                ),
                *tol,
            );
            r.mode = Some(mode.as_str().into());
            r.push(lemma::imp_check(
                &parse_number(a1)?,
                &parse_number(a2)?,
                *eps,
                *sign,
                *mode,
                positive(*tol)?,
            )?);
            r
        }
        LemmaCommand::ImpSearch { k, restarts, seed } => {
            if *k == 0 {
                return Err(CliError::Flag("--k must be at least 1".into()));
            }
            let mut r = Report::new(
                format!("lemma imp-search --k {k} --restarts {restarts} --seed {seed}"),
                lemma::IMP_SOLVED,
            );
            r.push(lemma::imp_search(*k, *restarts, *seed)?);
            r
        }
    })
}

fn search_report(a: &SearchArgs) -> Result<Report> {
    if a.problem != "lambda-sign" {
        return Err(CliError::Flag(format!(
            "unknown problem `{}` (expected lambda-sign)",
            a.problem
        )));
    }
    let mut r = Report::new(
        format!("search --problem lambda-sign --trials {} --seed {}", a.trials, a.seed),
        search::LAMBDA_SLACK,
    );
    r.extend(search::lambda_sign_scan(a.trials, a.seed)?);
    Ok(r)
}

fn verify_report(a: &VerifyArgs) -> Result<Report> {
    let tol = a.tol.map(positive).transpose()?;
    let mut cmd = String::from("verify-paper");
    if let Some(t) = tol {
        cmd.push_str(&format!(" --tol {t:e}"));
    }
    if a.quick {
        cmd.push_str(" --quick");
    }
    let mut r = Report::new(cmd, tol.unwrap_or(DEFAULT_REL_TOL));
    r.extend(verify_paper(VerifyOptions { tol, quick: a.quick })?);
    Ok(r)
}

fn execute(cli: &Cli) -> Result<i32> {
    let report = match &cli.command {
        Command::Check(a) => check(a)?,
        Command::Family(a) => {
            print!("{}", family(a)?);
            return Ok(0);
        }
        Command::Search(a) => search_report(a)?,
        Command::Lemma(c) => lemma_report(c)?,
        Command::VerifyPaper(a) => verify_report(a)?,
    };
    if let Some(path) = &cli.report {
        write(path, &report.to_json())?;
    }
    if cli.json {
        print!("{}", report.to_json());
    } else {
        print!("{}", report.to_human());
    }
    Ok(report.exit_code())
}

/// Runs the tool on `args` (including the program name) and returns the
/// process exit status: 0 when every check passes, 1 when some fail, 2 on
/// errors.
pub fn run<I, A>(args: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
