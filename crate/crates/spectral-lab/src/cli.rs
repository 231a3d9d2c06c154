//! Batch front-end: parse matrix/point JSON, dispatch to the operations,
//! emit reports as JSON or plain tables.
//!
//! Exit codes: 0 for success or a conclusive certificate, 2 for an
//! inconclusive certificate, 1 for any other error, 64 for usage errors.
//! All randomness derives from the seed flag (or SPECTRAL_LAB_SEED), so
//! identical invocations produce byte-identical output.

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bounds::{bharali_lower, disc_search_upper, AnalyticDisc};
use crate::config::RunConfig;
use crate::discontinuity::{
    discontinuity_certificate, example_5_1, example_5_2, green_vs_lempert_chain,
    verify_det_identity, PerturbationSpec,
};
use crate::error::Error;
use crate::gn_geometry::{ball_radius_in_gn, caratheodory_lb_g3, SigmaPoint};
use crate::lifting::lift_through;
use crate::matrix_core::matrix::{C64, CMatrix};
use crate::matrix_core::spectral::{is_cyclic, sigma};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Table,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// Clustering / rank tolerance.
    #[arg(long, global = true, default_value_t = 1e-7)]
    tol: f64,
    /// Circle grid for the Caratheodory bound (power of two).
    #[arg(long, global = true, default_value_t = 4096)]
    grid: usize,
    /// Polynomial degree cap for disc searches (default 2n).
    #[arg(long, global = true)]
    degree: Option<usize>,
    /// Disc-search restarts.
    #[arg(long, global = true, default_value_t = 32)]
    restarts: usize,
    /// Master seed; SPECTRAL_LAB_SEED overrides when set.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Certificate strictness margin.
    #[arg(long, global = true, default_value_t = 1e-4)]
    margin: f64,
    /// Directions sampled for safe inclusion radii.
    #[arg(long, global = true, default_value_t = 1024)]
    directions: usize,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    output: OutputFormat,
}

impl GlobalOpts {
    fn config(&self) -> RunConfig {
        let seed = std::env::var("SPECTRAL_LAB_SEED")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or(self.seed);
        RunConfig {
            tol: self.tol,
            grid: self.grid,
            degree: self.degree,
            restarts: self.restarts,
            seed,
            margin: self.margin,
            directions: self.directions,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "spectral-lab",
    about = "Certified Lempert-function bounds and analytic disc lifting \
             for the spectral ball and symmetrized polydisc",
    version
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Symmetric functions of the eigenvalues of a matrix.
    Sigma { matrix: PathBuf },
    /// Cyclicity (non-derogatory) test.
    Cyclic { matrix: PathBuf },
    /// Spectral lower bound for the Lempert function at a pair.
    Bharali { a: PathBuf, b: PathBuf },
    /// Caratheodory lower bound on the 3-dimensional symmetrized polydisc.
    Cara3 { s: PathBuf, t: PathBuf },
    /// Search for an interpolating disc; alpha is an upper bound.
    DiscSearch { s: PathBuf, t: PathBuf },
    /// Lift a disc through B, hitting A at zeta0.
    Lift {
        b: PathBuf,
        a: PathBuf,
        disc: PathBuf,
        /// Interpolation point, e.g. "0.4+0.1i".
        #[arg(long)]
        zeta0: String,
    },
    /// Residuals of the closed-form symmetric functions of the perturbed
    /// nilpotent block.
    Detcheck {
        #[arg(long)]
        m: usize,
        /// Superdiagonal positions carrying ones, e.g. "2,4".
        #[arg(long, value_delimiter = ',')]
        j: Vec<usize>,
        #[arg(long)]
        delta: f64,
    },
    /// Discontinuity certificate for the block perturbation.
    Discont {
        #[arg(long)]
        m: usize,
        #[arg(long, value_delimiter = ',')]
        j: Vec<usize>,
        #[arg(long)]
        delta: f64,
        /// Approximant indices.
        #[arg(long, value_delimiter = ',', default_value = "10,100")]
        j_list: Vec<u32>,
        /// Halve delta (up to 20 times) until the certificate closes.
        #[arg(long)]
        auto_shrink: bool,
        /// Optional invertible remainder block (matrix JSON).
        #[arg(long)]
        a1: Option<PathBuf>,
    },
    /// First worked example: one-link nilpotent vs spread diagonal.
    Example51 {
        #[arg(long)]
        eps: f64,
    },
    /// Second worked example: all eigenvalues of B equal.
    Example52 {
        /// Complex eigenvalue, e.g. "0.2" or "0.4i".
        #[arg(long)]
        mu: String,
    },
    /// Certified strict gap between the Lempert and Green functions.
    GreenChain {
        a: PathBuf,
        #[arg(long)]
        mu: String,
        #[arg(long)]
        alpha: String,
    },
    /// Safe Euclidean inclusion radius of the symmetrized polydisc.
    BallRadius {
        #[arg(long)]
        n: usize,
    },
}

/// Parses and runs a full command line; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return EXIT_OK;
        }
        Err(e) => {
            eprint!("{e}");
            return EXIT_USAGE;
        }
    };
    let cfg = cli.global.config();
    match dispatch(cli.command, &cfg, cli.global.output) {
        Ok(code) => code,
        Err(e) => {
            let code = match &e {
                Error::CertificateFailed(_) | Error::ChainInconclusive(_) => EXIT_INCONCLUSIVE,
                _ => EXIT_ERROR,
            };
            eprintln!("error: {e}");
            code
        }
    }
}

fn dispatch(cmd: Command, cfg: &RunConfig, output: OutputFormat) -> crate::error::Result<i32> {
    match cmd {
        Command::Sigma { matrix } => {
            let a: CMatrix = load(&matrix)?;
            emit(&sigma(&a), output, sigma_rows)?;
            Ok(EXIT_OK)
        }
        Command::Cyclic { matrix } => {
            let a: CMatrix = load(&matrix)?;
            #[derive(Serialize)]
            struct Out {
                cyclic: bool,
            }
            let out = Out {
                cyclic: is_cyclic(&a, cfg.tol)?,
            };
            emit(&out, output, |o: &Out| vec![("cyclic".into(), o.cyclic.to_string())])?;
            Ok(EXIT_OK)
        }
        Command::Bharali { a, b } => {
            let (a, b): (CMatrix, CMatrix) = (load(&a)?, load(&b)?);
            emit_value(bharali_lower(&a, &b, cfg.tol)?, output)?;
            Ok(EXIT_OK)
        }
        Command::Cara3 { s, t } => {
            let (s, t): (SigmaPoint, SigmaPoint) = (load(&s)?, load(&t)?);
            emit_value(caratheodory_lb_g3(&s, &t, cfg.grid)?, output)?;
            Ok(EXIT_OK)
        }
        Command::DiscSearch { s, t } => {
            let (s, t): (SigmaPoint, SigmaPoint) = (load(&s)?, load(&t)?);
            let (alpha, disc) = disc_search_upper(&s, &t, cfg)?;
            #[derive(Serialize)]
            struct Out {
                alpha: f64,
                disc: AnalyticDisc,
            }
            let out = Out { alpha, disc };
            emit(&out, output, |o: &Out| {
                vec![("alpha".into(), format!("{:.12e}", o.alpha))]
            })?;
            Ok(EXIT_OK)
        }
        Command::Lift { b, a, disc, zeta0 } => {
            let (b, a): (CMatrix, CMatrix) = (load(&b)?, load(&a)?);
            let disc: AnalyticDisc = load(&disc)?;
            let zeta0 = parse_complex(&zeta0)?;
            let lift = lift_through(&b, &a, &disc, zeta0, cfg.tol, None)?;
            let dev0 = lift.eval(C64::new(0.0, 0.0))?.sub(&b).norm_fro();
            let dev1 = lift.eval(zeta0)?.sub(&a).norm_fro();
            #[derive(Serialize)]
            struct Out {
                endpoint0_deviation: f64,
                endpoint1_deviation: f64,
                lift: crate::lifting::MatrixDisc,
            }
            let out = Out {
                endpoint0_deviation: dev0,
                endpoint1_deviation: dev1,
                lift,
            };
            emit(&out, output, |o: &Out| {
                vec![
                    ("endpoint0_deviation".into(), format!("{:.3e}", o.endpoint0_deviation)),
                    ("endpoint1_deviation".into(), format!("{:.3e}", o.endpoint1_deviation)),
                ]
            })?;
            Ok(EXIT_OK)
        }
        Command::Detcheck { m, j, delta } => {
            let spec = PerturbationSpec::new(m, j.into_iter().collect::<BTreeSet<_>>(), None, delta)?;
            let report = verify_det_identity(&spec);
            emit(&report, output, |r: &crate::discontinuity::DetIdentityReport| {
                vec![
                    ("max_residual".into(), format!("{:.3e}", r.max_residual)),
                    ("observed_sign".into(), format!("{}", r.observed_sign)),
                ]
            })?;
            Ok(EXIT_OK)
        }
        Command::Discont {
            m,
            j,
            delta,
            j_list,
            auto_shrink,
            a1,
        } => {
            let a1 = a1.map(|p| load::<CMatrix>(&p)).transpose()?;
            let spec = PerturbationSpec::new(m, j.into_iter().collect::<BTreeSet<_>>(), a1, delta)?;
            let cert = discontinuity_certificate(&spec, &j_list, cfg, auto_shrink)?;
            let conclusive = cert.conclusion;
            emit(&cert, output, certificate_rows)?;
            Ok(if conclusive { EXIT_OK } else { EXIT_INCONCLUSIVE })
        }
        Command::Example51 { eps } => {
            let cert = example_5_1(eps, cfg)?;
            let conclusive = cert.conclusion;
            emit(&cert, output, certificate_rows)?;
            Ok(if conclusive { EXIT_OK } else { EXIT_INCONCLUSIVE })
        }
        Command::Example52 { mu } => {
            let mu = parse_complex(&mu)?;
            let report = example_5_2(mu, cfg)?;
            emit(&report, output, report_rows)?;
            Ok(EXIT_OK)
        }
        Command::GreenChain { a, mu, alpha } => {
            let a: CMatrix = load(&a)?;
            let chain = green_vs_lempert_chain(&a, parse_complex(&mu)?, parse_complex(&alpha)?, cfg)?;
            let conclusive = chain.conclusion;
            emit(&chain, output, |c: &crate::discontinuity::ChainReport| {
                let mut rows = vec![
                    ("lower".into(), format!("{} {:.12e}", c.lower.method, c.lower.value)),
                    ("upper".into(), format!("{} {:.12e}", c.upper.method, c.upper.value)),
                    ("gap".into(), format!("{:.6e}", c.gap)),
                    ("conclusion".into(), c.conclusion.to_string()),
                ];
                rows.extend(
                    c.links
                        .iter()
                        .map(|l| (l.name.clone(), format!("{} {:.6e}", l.relation, l.value))),
                );
                rows
            })?;
            Ok(if conclusive { EXIT_OK } else { EXIT_INCONCLUSIVE })
        }
        Command::BallRadius { n } => {
            #[derive(Serialize)]
            struct Out {
                n: usize,
                directions: usize,
                seed: u64,
                r_safe: f64,
            }
            let out = Out {
                n,
                directions: cfg.directions,
                seed: cfg.seed,
                r_safe: ball_radius_in_gn(n, cfg.directions, cfg.seed),
            };
            emit(&out, output, |o: &Out| {
                vec![("r_safe".into(), format!("{:.15}", o.r_safe))]
            })?;
            Ok(EXIT_OK)
        }
    }
}

fn load<T: serde::de::DeserializeOwned>(path: &PathBuf) -> crate::error::Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::InvalidInput(format!("cannot parse {}: {e}", path.display())))
}

/// Accepts "0.3", "0.4i", "0.1+0.2i", "-0.3-0.1i", "i", "-i".
pub fn parse_complex(text: &str) -> crate::error::Result<C64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::InvalidInput(format!("cannot parse complex number '{text}'"));
    if s.is_empty() {
        return Err(bad());
    }
    // Split into at most two signed terms.
    let mut terms: Vec<String> = Vec::new();
    let mut cur = String::new();
    for (i, ch) in s.chars().enumerate() {
        if (ch == '+' || ch == '-') && i > 0 {
            let prev = s.chars().nth(i - 1).unwrap();
            if prev != 'e' && prev != 'E' {
                terms.push(std::mem::take(&mut cur));
            }
        }
        cur.push(ch);
    }
    terms.push(cur);
    if terms.len() > 2 {
        return Err(bad());
    }
    let mut re = 0.0;
    let mut im = 0.0;
    for term in &terms {
        if let Some(body) = term.strip_suffix(['i', 'I']) {
            im += match body {
                "" | "+" => 1.0,
                "-" => -1.0,
                _ => body.parse::<f64>().map_err(|_| bad())?,
            };
        } else {
            re += term.parse::<f64>().map_err(|_| bad())?;
        }
    }
    Ok(C64::new(re, im))
}

fn emit<T: Serialize>(
    value: &T,
    output: OutputFormat,
    rows: impl Fn(&T) -> Vec<(String, String)>,
) -> crate::error::Result<()> {
    match output {
        OutputFormat::Json => {
            println!(
                "{}",
                serde_json::to_string(value)
                    .map_err(|e| Error::InvalidInput(format!("serialization failed: {e}")))?
            );
        }
        OutputFormat::Table => {
            for (k, v) in rows(value) {
                println!("{k:<28} {v}");
            }
        }
    }
    Ok(())
}

fn emit_value(value: f64, output: OutputFormat) -> crate::error::Result<()> {
    #[derive(Serialize)]
    struct Out {
        value: f64,
    }
    emit(&Out { value }, output, |o: &Out| {
        vec![("value".into(), format!("{:.15e}", o.value))]
    })
}

fn sigma_rows(s: &SigmaPoint) -> Vec<(String, String)> {
    s.coords()
        .iter()
        .enumerate()
        .map(|(i, c)| (format!("sigma_{}", i + 1), format!("{:+.15e} {:+.15e}i", c.re, c.im)))
        .collect()
}

fn certificate_rows(c: &crate::discontinuity::Certificate) -> Vec<(String, String)> {
    let mut rows = vec![
        ("pair".into(), c.pair.clone()),
        (
            "lower".into(),
            format!("{} {:.12e}", c.lower.method, c.lower.value),
        ),
    ];
    for u in &c.uppers {
        let tag = u.j.map_or("upper".to_string(), |j| format!("upper[j={j}]"));
        rows.push((tag, format!("{} {:.12e}", u.method, u.value)));
    }
    rows.push(("conclusion".into(), c.conclusion.to_string()));
    rows.push(("margin".into(), format!("{:.1e}", c.margin)));
    rows.push(("gap".into(), format!("{:.6e}", c.gap)));
    rows
}

fn report_rows(r: &crate::bounds::BoundReport) -> Vec<(String, String)> {
    let mut rows = vec![("pair".into(), r.pair.clone())];
    for b in &r.bounds {
        rows.push((
            format!("{:?} {:?} {}", b.kind, b.space, b.name),
            format!("{:.12e}", b.value),
        ));
    }
    rows.push(("verdict".into(), format!("{:?}", r.verdict)));
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("0.25").unwrap(), C64::new(0.25, 0.0));
        assert_eq!(parse_complex("0.4i").unwrap(), C64::new(0.0, 0.4));
        assert_eq!(parse_complex("-0.4i").unwrap(), C64::new(0.0, -0.4));
        assert_eq!(parse_complex("0.1+0.2i").unwrap(), C64::new(0.1, 0.2));
        assert_eq!(parse_complex("-0.3-0.1i").unwrap(), C64::new(-0.3, -0.1));
        assert_eq!(parse_complex("i").unwrap(), C64::new(0.0, 1.0));
        assert_eq!(parse_complex("1e-3").unwrap(), C64::new(1e-3, 0.0));
        assert_eq!(parse_complex("1e-3+2e-4i").unwrap(), C64::new(1e-3, 2e-4));
        assert!(parse_complex("abc").is_err());
    }

    #[test]
    fn usage_error_exit_code() {
        assert_eq!(run(["spectral-lab", "no-such-command"]), EXIT_USAGE);
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(run(["spectral-lab", "--help"]), EXIT_OK);
    }
}
