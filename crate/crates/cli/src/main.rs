//! `jcover`: command-line front end.
//!
//! Exit status: 0 success, 1 domain error, 2 precision failure or
//! undecidable comparison, 3 failed verification, 64 usage error.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use jcover::cm::{class_polynomial, class_polynomial_auto, ClassPolynomial};
use jcover::fingal::{group_elements, group_order, Flavor};
use jcover::gl2q::{coset_representatives, GroupElement};
use jcover::halfplane::{apply, parse_point_json, HalfPlanePoint};
use jcover::hecke::{in_hecke_orbit, OrbitSearch};
use jcover::jfun::evaluate_j;
use jcover::modelcheck::{
    extend_partial_iso, nonstandard_fiber_witness, sample_point, sf_identify, sf_violations,
    FiniteLevelStructure,
};
use jcover::modpoly::{modular_polynomial, phi};
use jcover::{cache, verify, Error, JValue};
use serde_json::json;

const EXIT_DOMAIN: u8 = 1;
const EXIT_PRECISION: u8 = 2;
const EXIT_VERIFY: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "jcover",
    version,
    about = "Modular j-function computations at finite level"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the modular polynomial Φ_N.
    Modpoly {
        level: u64,
        /// Interpolate at this precision instead of choosing one.
        #[arg(long)]
        digits: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Print the class polynomial H_D.
    Classpoly {
        #[arg(allow_negative_numbers = true)]
        disc: i64,
        #[arg(long)]
        digits: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Print the coset representatives of determinant N.
    Cosets {
        level: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Smallest N up to the bound with Φ_N(j1, j2) = 0.
    Isogeny {
        #[arg(allow_negative_numbers = true)]
        j1: String,
        #[arg(allow_negative_numbers = true)]
        j2: String,
        #[arg(long, default_value_t = 10)]
        max_n: u64,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate j at `i`, `rho`, a JSON point, or `RE IM`.
    JEval {
        #[arg(required = true, num_args = 1..=2, allow_negative_numbers = true)]
        tau: Vec<String>,
        #[arg(long, default_value_t = 30)]
        digits: u32,
        #[arg(long)]
        json: bool,
    },
    /// Order of PSL2(Z/N) or PGL2(Z/N).
    GaloisOrder {
        level: u64,
        #[arg(long, default_value = "psl")]
        flavor: Flavor,
        #[arg(long)]
        json: bool,
    },
    /// Back-and-forth extension across every torsor twist.
    Backforth {
        #[arg(long)]
        level: u64,
        /// Run the built-in demonstration structures.
        #[arg(long, required = true)]
        demo: bool,
        #[arg(long)]
        json: bool,
    },
    /// Run the invariant suite.
    Verify {
        #[arg(long)]
        quick: bool,
    },
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::PrecisionTooLow(_) | Error::Indeterminate(_) => EXIT_PRECISION,
            _ => EXIT_DOMAIN,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

/// Output text plus an optional nonzero status to exit with after printing.
struct Output {
    text: String,
    status: u8,
}

impl From<String> for Output {
    fn from(text: String) -> Self {
        Output { text, status: 0 }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    cache::configure(cache::platform_default());
    let out_path = match &cli.command {
        Command::Modpoly { out, .. }
        | Command::Classpoly { out, .. }
        | Command::Cosets { out, .. } => out.clone(),
        _ => None,
    };
    let result = run(cli.command).and_then(|output| {
        match out_path {
            Some(path) => cache::write_atomic(&path, &output.text)?,
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(output.text.as_bytes())
                    .map_err(Error::from)?;
            }
        }
        Ok(output.status)
    });
    match result {
        Ok(status) => ExitCode::from(status),
        Err(f) => {
            eprintln!("jcover: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<Output, Failure> {
    Ok(match command {
        Command::Modpoly {
            level,
            digits,
            json,
            ..
        } => {
            let p = match digits {
                Some(d) => std::sync::Arc::new(modular_polynomial(level, d)?),
                None => phi(level)?,
            };
            if json {
                let terms: Vec<_> = p
                    .terms()
                    .map(|(&(i, j), c)| json!({"x": i, "y": j, "c": c.to_string()}))
                    .collect();
                pretty(&json!({"level": level, "terms": terms}))
            } else {
                p.to_phi_text(level)
            }
            .into()
        }
        Command::Classpoly {
            disc, digits, json, ..
        } => {
            let h: std::sync::Arc<ClassPolynomial> = match digits {
                Some(d) => std::sync::Arc::new(class_polynomial(disc, d)?),
                None => class_polynomial_auto(disc)?,
            };
            if json {
                let coeffs: Vec<_> = h
                    .polynomial()
                    .coefficients()
                    .iter()
                    .map(|c| c.to_string())
                    .collect();
                pretty(&json!({"disc": disc, "coefficients": coeffs}))
            } else {
                h.to_text()
            }
            .into()
        }
        Command::Cosets { level, json, .. } => {
            if level == 0 {
                return Err(Error::Domain("level must be positive".into()).into());
            }
            let reps = coset_representatives(level);
            if json {
                pretty(&serde_json::to_value(reps.representatives()).map_err(Error::from)?)
            } else {
                reps.representatives()
                    .iter()
                    .map(|g| format!("{g}\n"))
                    .collect::<String>()
            }
            .into()
        }
        Command::Isogeny {
            j1,
            j2,
            max_n,
            json,
        } => {
            let (a, b) = (JValue::parse(&j1)?, JValue::parse(&j2)?);
            let verdict = in_hecke_orbit(&a, &b, max_n)?;
            let (line, status) = match verdict {
                OrbitSearch::Related(n) => (format!("related N={n}"), 0),
                OrbitSearch::Unrelated { max_n } => (format!("unrelated up to {max_n}"), 0),
                OrbitSearch::Indeterminate(n) => (format!("indeterminate N={n}"), EXIT_PRECISION),
            };
            let text = if json {
                let level = match verdict {
                    OrbitSearch::Related(n) | OrbitSearch::Indeterminate(n) => Some(n),
                    OrbitSearch::Unrelated { .. } => None,
                };
                pretty(&json!({"verdict": line.split(' ').next(), "level": level, "max_n": max_n}))
            } else {
                line + "\n"
            };
            Output { text, status }
        }
        Command::JEval { tau, digits, json } => {
            let point = parse_tau(&tau, digits)?;
            let j = evaluate_j(&point, digits)?;
            let (re, im) = j.to_decimal(digits);
            if json {
                pretty(&json!({"tau": point, "digits": digits, "re": re, "im": im}))
            } else {
                format!("re {re}\nim {im}\n")
            }
            .into()
        }
        Command::GaloisOrder {
            level,
            flavor,
            json,
        } => {
            if level == 0 {
                return Err(Error::Domain("level must be positive".into()).into());
            }
            let order = group_order(level, flavor);
            let name = match flavor {
                Flavor::Psl => "PSL2",
                Flavor::Pgl => "PGL2",
            };
            if json {
                pretty(&json!({"level": level, "flavor": flavor, "order": order}))
            } else {
                format!("|{name}(Z/{level})| = {order}\n")
            }
            .into()
        }
        Command::Backforth { level, json, .. } => backforth_demo(level, json)?,
        Command::Verify { quick } => {
            let checks = verify::run_suite(quick);
            let text: String = checks.iter().map(|c| format!("{c}\n")).collect();
            let failed = checks.iter().filter(|c| !c.passed).count();
            let summary = format!(
                "{} of {} checks passed\n",
                checks.len() - failed,
                checks.len()
            );
            Output {
                text: text + &summary,
                status: if failed == 0 { 0 } else { EXIT_VERIFY },
            }
        }
    })
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n"
}

fn parse_tau(args: &[String], digits: u32) -> Result<HalfPlanePoint, Failure> {
    match args {
        [one] if one == "i" => Ok(HalfPlanePoint::i()),
        [one] if one == "rho" => Ok(HalfPlanePoint::rho()),
        [one] if one.trim_start().starts_with('{') => Ok(parse_point_json(one)?),
        [re, im] => Ok(HalfPlanePoint::parse_numeric(re, im, digits + 20)?),
        _ => Err(usage("expected `i`, `rho`, a JSON point, or `RE IM`")),
    }
}

/// A generic point, `2i` and a level-`N` image of the generic point; each
/// global twist of the labels must extend the map fixing the first two.
fn backforth_demo(level: u64, json: bool) -> Result<Output, Failure> {
    if level < 2 {
        return Err(Error::Domain("the demonstration needs level at least 2".into()).into());
    }
    let tau = sample_point(3, 40)?;
    let mut source = FiniteLevelStructure::new(level)?;
    source.add_standard_point(&tau)?;
    source.add_standard_point(&HalfPlanePoint::exact(1, 0, -16)?)?;
    let g = GroupElement::from_i64(level as i64, 1, 0, 1)?;
    source.add_standard_point(&apply(&g, &tau))?;

    let mut lines = Vec::new();
    let mut records = Vec::new();
    let mut missing = 0;
    for sigma in group_elements(level, Flavor::Psl).iter() {
        let target = source.twisted(sigma)?;
        match extend_partial_iso(&source, &target, &[(0, 0), (1, 1)], 2)? {
            Some(e) => {
                lines.push(format!(
                    "twist {sigma}: image {} twist {}{}",
                    e.image,
                    e.twist,
                    if e.adjoined { " (adjoined)" } else { "" }
                ));
                records.push(json!({"sigma": sigma, "image": e.image, "twist": e.twist, "adjoined": e.adjoined}));
            }
            None => {
                missing += 1;
                lines.push(format!("twist {sigma}: no extension"));
                records.push(json!({"sigma": sigma, "image": null}));
            }
        }
    }
    let witness = nonstandard_fiber_witness(level)?;
    let violations = sf_violations(&witness)?;
    let identified = sf_identify(&witness)?.len();
    let total = records.len();
    let text = if json {
        let witness_doc: serde_json::Value =
            serde_json::from_str(&witness.to_json()).map_err(Error::from)?;
        pretty(&json!({
            "level": level,
            "extensions": records,
            "witness": witness_doc,
            "sf_violations": violations,
            "after_identification": identified,
        }))
    } else {
        lines.push(format!("{} of {total} twists extended", total - missing));
        lines.push(format!(
            "witness: SF violations {violations:?}; {identified} points after identification"
        ));
        lines.join("\n") + "\n"
    };
    let ok = missing == 0 && !violations.is_empty();
    Ok(Output {
        text,
        status: if ok { 0 } else { EXIT_VERIFY },
    })
}
