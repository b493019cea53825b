//! `bcirc`: batch front end for boolean convolution on the unit circle.
//!
//! Measures are read and written as JSON (`-` reads stdin); tables go out as
//! JSON or CSV. Exit status 1 marks invalid input, 2 a numerical precondition
//! failure and 3 a failed verification.

mod io;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use bcirc::convolution::{verify_multiplicativity, OperatorPairModel, MAX_ORACLE_ORDER};
use bcirc::gallery::{self, BlaschkeData};
use bcirc::json;
use bcirc::levy;
use bcirc::transform::{cauchy_eval, f_from_measure, psi_from_moments};
use bcirc::{
    convolve, product_moments_combinatorial, AtomicMeasure, BlaschkeFactor, CircleMeasure, Error,
    FiniteCircleMeasure,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

const VERIFY_TOLERANCE: f64 = 1e-9;

#[derive(Debug)]
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidMeasure(_)
            | Error::NonFiniteCoefficient { .. }
            | Error::ParameterOutOfRange { .. }
            | Error::WordNotAlternating { .. }
            | Error::OrderTooLargeForOracle { .. }
            | Error::DimensionTooLarge { .. }
            | Error::NotAtomic
            | Error::RadiusOutOfRange { .. }
            | Error::EvaluationOutsideDomain { .. } => 1,
            Error::VerificationFailed { .. } => 3,
            _ => 2,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult = Result<(), Failure>;

#[derive(Parser)]
#[command(
    name = "bcirc",
    version,
    about = "Multiplicative boolean convolution of measures on the unit circle"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct OrderArg {
    /// Number of moments carried through the computation.
    #[arg(long, env = "BCIRC_ORDER", default_value_t = bcirc::DEFAULT_ORDER)]
    order: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Convolve two measures.
    Convolve {
        a: String,
        b: String,
        #[command(flatten)]
        order: OrderArg,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Cross-check the result against a brute-force oracle.
        #[arg(long, value_enum)]
        oracle: Option<Oracle>,
    },
    /// Print ψ, F or the Cauchy transform as coefficients or grid samples.
    Transform {
        #[arg(default_value = "-")]
        measure: String,
        #[arg(long, value_enum)]
        show: Show,
        /// Sample on the circle of this radius instead of printing coefficients (CSV).
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[command(flatten)]
        order: OrderArg,
    },
    /// Decide infinite divisibility.
    Divisible {
        #[arg(default_value = "-")]
        measure: String,
        #[arg(long, default_value_t = 0.999)]
        rmax: f64,
        #[command(flatten)]
        order: OrderArg,
    },
    /// Characteristic pair (b, ρ) of an infinitely divisible measure.
    Charpair {
        #[arg(default_value = "-")]
        measure: String,
        #[arg(long, default_value_t = 0.999)]
        rmax: f64,
        #[command(flatten)]
        order: OrderArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measure with a given characteristic pair.
    Synth {
        #[arg(default_value = "-")]
        pair: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// n-th boolean convolution root.
    Root {
        #[arg(default_value = "-")]
        measure: String,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 0.999)]
        rmax: f64,
        #[command(flatten)]
        order: OrderArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Member μ_t of the convolution semigroup of a pair.
    Semigroup {
        #[arg(default_value = "-")]
        pair: String,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Poisson-smoothed density on a grid as angle,density CSV.
    Density {
        #[arg(default_value = "-")]
        measure: String,
        #[arg(long, default_value_t = 0.99)]
        radius: f64,
        #[arg(long, default_value_t = 1024)]
        grid: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Closed-form example measures.
    Gallery {
        #[command(subcommand)]
        which: GalleryCommand,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Seeded sweep comparing the convolution with both oracles.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        pairs: usize,
        #[arg(long, default_value_t = 5)]
        max_atoms: usize,
        #[arg(long, default_value_t = 8)]
        moments: usize,
    },
    /// Estimate the mass a measure puts on a single point.
    AtomMass {
        #[arg(default_value = "-")]
        measure: String,
        #[arg(long)]
        angle: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [0.9, 0.99, 0.999])]
        radii: Vec<f64>,
    },
}

#[derive(Subcommand)]
enum GalleryCommand {
    Dirac {
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        b: f64,
    },
    Twopoint {
        #[arg(long)]
        p: f64,
        #[arg(long, allow_hyphen_values = true)]
        b1: f64,
        #[arg(long, allow_hyphen_values = true)]
        b2: f64,
        /// Emit the atoms instead of the closed-form transform.
        #[arg(long)]
        atomic: bool,
        #[command(flatten)]
        order: OrderArg,
    },
    Haar,
    Cyclic {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        atomic: bool,
        #[command(flatten)]
        order: OrderArg,
    },
    Poisson {
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        b: f64,
    },
    /// Measure with pair (0, δ at e^{iβ}); `--zeros N` prints the induced atoms instead.
    Singular {
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long)]
        zeros: Option<usize>,
        #[command(flatten)]
        order: OrderArg,
    },
    /// Compose F = B·S·O.
    Bso {
        /// Power of z in B.
        #[arg(long, default_value_t = 0)]
        p: u32,
        /// Blaschke zeros as `re,im` (repeatable).
        #[arg(long = "alpha", allow_hyphen_values = true)]
        alphas: Vec<String>,
        /// Angle of the unimodular factor of B.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        phase: f64,
        /// Singular part atoms as `angle,weight` (repeatable).
        #[arg(long = "tau", allow_hyphen_values = true)]
        tau: Vec<String>,
        /// JSON array with the outer density sampled on an equally spaced grid.
        #[arg(long)]
        q_file: Option<PathBuf>,
        /// Constant outer density, used when no file is given.
        #[arg(long, default_value_t = 0.0)]
        q_const: f64,
        #[arg(long, default_value_t = 256)]
        grid: usize,
        /// Angle of the constant c in O.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        c: f64,
        #[command(flatten)]
        order: OrderArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Oracle {
    Combinatorial,
    Operator,
    Both,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Show {
    Psi,
    #[value(name = "F", alias = "f")]
    F,
    Cauchy,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> CliResult {
    let mut stdin_used = false;
    match command {
        Command::Convolve {
            a,
            b,
            order,
            out,
            oracle,
        } => {
            let mu = io::read_measure(&a, &mut stdin_used)?;
            let nu = io::read_measure(&b, &mut stdin_used)?;
            let order = positive_order(order)?;
            let result = convolve(&mu, &nu, order)?;
            io::emit(out.as_deref(), &json::measure_to_string(&result))?;
            if let Some(oracle) = oracle {
                cross_check(&mu, &nu, &result, oracle, order)?;
            }
            Ok(())
        }
        Command::Transform {
            measure,
            show,
            radius,
            grid,
            order,
        } => {
            let mu = io::read_measure(&measure, &mut stdin_used)?;
            let order = positive_order(order)?;
            match radius {
                Some(r) => io::emit(None, &transform_samples(&mu, show, r, grid, order)?),
                None => io::emit(None, &json::to_string(&transform_table(&mu, show, order)?)),
            }
        }
        Command::Divisible {
            measure,
            rmax,
            order,
        } => {
            let mu = io::read_measure(&measure, &mut stdin_used)?;
            let verdict = levy::is_infinitely_divisible(&mu, rmax, positive_order(order)?)?;
            io::emit(None, &json::to_string(&json::verdict_value(&verdict)))
        }
        Command::Charpair {
            measure,
            rmax,
            order,
            out,
        } => {
            let mu = io::read_measure(&measure, &mut stdin_used)?;
            let pair = levy::char_pair(&mu, rmax, positive_order(order)?)?;
            io::emit(out.as_deref(), &json::pair_to_string(&pair))
        }
        Command::Synth { pair, out } => {
            let pair = io::read_pair(&pair, &mut stdin_used)?;
            let mu = levy::measure_from_char_pair(&pair);
            io::emit(out.as_deref(), &json::measure_to_string(&mu))
        }
        Command::Root {
            measure,
            n,
            rmax,
            order,
            out,
        } => {
            let mu = io::read_measure(&measure, &mut stdin_used)?;
            let root = levy::nth_root(&mu, n, rmax, positive_order(order)?)?;
            io::emit(out.as_deref(), &json::measure_to_string(&root))
        }
        Command::Semigroup { pair, t, out } => {
            let pair = io::read_pair(&pair, &mut stdin_used)?;
            let mu = levy::semigroup_measure(&pair, t)?;
            io::emit(out.as_deref(), &json::measure_to_string(&mu))
        }
        Command::Density {
            measure,
            radius,
            grid,
            csv,
        } => {
            let mu = io::read_measure(&measure, &mut stdin_used)?;
            let rows = mu.density_approx(radius, grid)?;
            let mut text = String::from("angle,density\n");
            for (t, d) in rows {
                writeln!(text, "{t:.16e},{d:.16e}").expect("writing to a String cannot fail");
            }
            io::emit(csv.as_deref(), &text)
        }
        Command::Gallery { which, out } => run_gallery(which, out),
        Command::Verify {
            seed,
            pairs,
            max_atoms,
            moments,
        } => {
            if moments == 0 || moments > MAX_ORACLE_ORDER {
                return Err(Error::OrderTooLargeForOracle { n: moments }.into());
            }
            let report = verify_multiplicativity(seed, pairs, max_atoms, moments)?;
            let value = json!({
                "seed": report.seed,
                "pairs": report.pairs,
                "moments": report.moments,
                "max_deviation_combinatorial": report.max_deviation_combinatorial,
                "max_deviation_operator": report.max_deviation_operator,
                "tolerance": VERIFY_TOLERANCE,
                "passed": report.max_deviation() <= VERIFY_TOLERANCE,
            });
            io::emit(None, &json::to_string(&value))?;
            if report.max_deviation() > VERIFY_TOLERANCE {
                return Err(Error::VerificationFailed {
                    deviation: report.max_deviation(),
                    tolerance: VERIFY_TOLERANCE,
                }
                .into());
            }
            Ok(())
        }
        Command::AtomMass {
            measure,
            angle,
            radii,
        } => {
            if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0 && *r < 1.0)) {
                return Err(Failure::input("radii must lie in (0, 1)"));
            }
            let mu = io::read_measure(&measure, &mut stdin_used)?;
            let estimate = mu.atom_mass_estimate(angle, &radii);
            let value = json!({"angle": angle, "radii": radii, "estimate": estimate});
            io::emit(None, &json::to_string(&value))
        }
    }
}

fn positive_order(order: OrderArg) -> Result<usize, Failure> {
    if order.order == 0 {
        return Err(Failure::input("order must be positive"));
    }
    Ok(order.order)
}

fn cross_check(
    mu: &CircleMeasure,
    nu: &CircleMeasure,
    result: &CircleMeasure,
    oracle: Oracle,
    order: usize,
) -> CliResult {
    let n = order.min(MAX_ORACLE_ORDER);
    let moments = result.moments(n)?;
    let mut report = serde_json::Map::new();
    let mut worst = 0.0f64;
    if matches!(oracle, Oracle::Combinatorial | Oracle::Both) {
        let mut dev = 0.0f64;
        for k in 1..=n {
            dev = dev.max((product_moments_combinatorial(mu, nu, k)? - moments[k - 1]).norm());
        }
        report.insert("max_deviation_combinatorial".into(), json!(dev));
        worst = worst.max(dev);
    }
    if matches!(oracle, Oracle::Operator | Oracle::Both) {
        let model = OperatorPairModel::build(mu, nu)?;
        let dev = model
            .moments(n)
            .iter()
            .zip(&moments)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        report.insert("max_deviation_operator".into(), json!(dev));
        worst = worst.max(dev);
    }
    report.insert("moments_checked".into(), json!(n));
    eprint!("{}", json::to_string(&serde_json::Value::Object(report)));
    if worst > VERIFY_TOLERANCE {
        return Err(Error::VerificationFailed {
            deviation: worst,
            tolerance: VERIFY_TOLERANCE,
        }
        .into());
    }
    Ok(())
}

fn transform_table(
    mu: &CircleMeasure,
    show: Show,
    order: usize,
) -> Result<serde_json::Value, Failure> {
    let (name, coeffs) = match show {
        Show::Psi => ("psi", psi_from_moments(&mu.moments(order)?).into_coeffs()),
        Show::F => (
            "F",
            f_from_measure(mu, order)?
                .to_series(order - 1)?
                .into_coeffs(),
        ),
        Show::Cauchy => {
            // G(w) = Σ_{k≥0} m_k w^{−k−1}
            let mut c = vec![Complex64::new(1.0, 0.0)];
            c.extend(mu.moments(order)?);
            ("cauchy", c)
        }
    };
    Ok(json!({"show": name, "coeffs": json::complex_list(&coeffs)}))
}

fn transform_samples(
    mu: &CircleMeasure,
    show: Show,
    radius: f64,
    grid: usize,
    order: usize,
) -> Result<String, Failure> {
    if grid == 0 {
        return Err(Failure::input("grid must be positive"));
    }
    let inside = show != Show::Cauchy;
    if !radius.is_finite()
        || radius < 0.0
        || (inside && radius >= 1.0)
        || (!inside && radius <= 1.0)
    {
        return Err(Error::RadiusOutOfRange { radius }.into());
    }
    let f = if show == Show::Cauchy {
        Some(f_from_measure(mu, order)?)
    } else {
        None
    };
    let mut text = String::from("angle,re,im\n");
    for j in 0..grid {
        let theta = std::f64::consts::TAU * j as f64 / grid as f64;
        let z = Complex64::from_polar(radius, theta);
        let v = match show {
            Show::Psi => mu.psi_at(z),
            Show::F => mu.f_at(z)?,
            Show::Cauchy => cauchy_eval(f.as_ref().expect("set above"), z)?,
        };
        writeln!(text, "{theta:.16e},{:.16e},{:.16e}", v.re, v.im)
            .expect("writing to a String cannot fail");
    }
    Ok(text)
}

fn parse_pair_arg(s: &str, what: &str) -> Result<(f64, f64), Failure> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [a, b] => match (a.trim().parse::<f64>(), b.trim().parse::<f64>()) {
            (Ok(x), Ok(y)) if x.is_finite() && y.is_finite() => Ok((x, y)),
            _ => Err(Failure::input(format!("{what}: cannot parse \"{s}\""))),
        },
        _ => Err(Failure::input(format!(
            "{what}: expected two comma-separated numbers, got \"{s}\""
        ))),
    }
}

fn run_gallery(which: GalleryCommand, out: Option<PathBuf>) -> CliResult {
    let text = match which {
        GalleryCommand::Dirac { b } => json::measure_to_string(&gallery::dirac(b)),
        GalleryCommand::Twopoint {
            p,
            b1,
            b2,
            atomic,
            order,
        } => {
            let mu = if atomic {
                CircleMeasure::Atomic(gallery::two_point_atoms(p, b1, b2)?)
            } else {
                gallery::two_point(p, b1, b2, positive_order(order)?)?
            };
            json::measure_to_string(&mu)
        }
        GalleryCommand::Haar => json::measure_to_string(&gallery::haar()),
        GalleryCommand::Cyclic { n, atomic, order } => {
            let mu = if atomic {
                CircleMeasure::Atomic(gallery::cyclic_haar_atoms(n)?)
            } else {
                gallery::cyclic_haar(n, positive_order(order)?)?
            };
            json::measure_to_string(&mu)
        }
        GalleryCommand::Poisson { r, b } => json::measure_to_string(&gallery::poisson(r, b)?),
        GalleryCommand::Singular { beta, zeros, order } => match zeros {
            Some(count) => json::to_string(&json::singular_example_value(
                &gallery::singular_example(beta, count)?,
            )),
            None => {
                json::measure_to_string(&gallery::singular_measure(beta, positive_order(order)?))
            }
        },
        GalleryCommand::Bso {
            p,
            alphas,
            phase,
            tau,
            q_file,
            q_const,
            grid,
            c,
            order,
        } => {
            let mut factors = Vec::new();
            for a in &alphas {
                let (re, im) = parse_pair_arg(a, "--alpha")?;
                factors.push(BlaschkeFactor {
                    alpha: Complex64::new(re, im),
                    multiplicity: 1,
                });
            }
            let blaschke = BlaschkeData {
                p,
                factors,
                phase: Complex64::from_polar(1.0, phase),
            };
            let order = positive_order(order)?;
            let tau_measure = if tau.is_empty() {
                FiniteCircleMeasure::zero()
            } else {
                let (angles, weights): (Vec<f64>, Vec<f64>) = tau
                    .iter()
                    .map(|t| parse_pair_arg(t, "--tau"))
                    .collect::<Result<Vec<_>, _>>()?
                    .into_iter()
                    .unzip();
                if weights.iter().any(|w| *w < 0.0) {
                    return Err(Failure::input("--tau: weights must be non-negative"));
                }
                FiniteCircleMeasure::from_atoms(AtomicMeasure::new(angles, weights)?, order)
            };
            let q = match q_file {
                Some(path) => {
                    let mut used = false;
                    let text = io::read_source(&path.to_string_lossy(), &mut used)?;
                    serde_json::from_str::<Vec<f64>>(&text).map_err(|e| {
                        Failure::input(format!(
                            "{}: expected an array of numbers: {e}",
                            path.display()
                        ))
                    })?
                }
                None => vec![q_const; grid],
            };
            let comp = gallery::bso_compose(
                &blaschke,
                &tau_measure,
                &q,
                Complex64::from_polar(1.0, c),
                order,
            )?;
            eprint!(
                "{}",
                json::to_string(&json!({"max_deviation": comp.max_deviation}))
            );
            json::measure_to_string(&comp.mu)
        }
    };
    io::emit(out.as_deref(), &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_arguments_parse() {
        assert_eq!(parse_pair_arg("0.5,-1", "x").unwrap(), (0.5, -1.0));
        assert_eq!(parse_pair_arg(" 1 , 2 ", "x").unwrap(), (1.0, 2.0));
        assert!(parse_pair_arg("1", "x").is_err());
        assert!(parse_pair_arg("1,2,3", "x").is_err());
        assert!(parse_pair_arg("a,2", "x").is_err());
        assert!(parse_pair_arg("inf,2", "x").is_err());
    }

    #[test]
    fn errors_map_to_exit_codes() {
        assert_eq!(Failure::from(Error::InvalidMeasure("x".into())).code, 1);
        assert_eq!(
            Failure::from(Error::RadiusOutOfRange { radius: 2.0 }).code,
            1
        );
        assert_eq!(Failure::from(Error::ZeroAtOrigin).code, 2);
        assert_eq!(
            Failure::from(Error::ConditioningWarning { modulus: 0.99 }).code,
            2
        );
        let v = Error::VerificationFailed {
            deviation: 1.0,
            tolerance: 1e-9,
        };
        assert_eq!(Failure::from(v).code, 3);
    }

    #[test]
    fn cauchy_table_starts_with_total_mass() {
        let mu = CircleMeasure::atomic(vec![0.0], vec![1.0]).unwrap();
        let t = transform_table(&mu, Show::Cauchy, 4).unwrap();
        assert_eq!(t["coeffs"].as_array().unwrap().len(), 5);
        assert_eq!(t["coeffs"][0][0], 1.0);
    }

    #[test]
    fn sampling_radius_is_checked() {
        let mu = CircleMeasure::atomic(vec![0.0], vec![1.0]).unwrap();
        assert!(transform_samples(&mu, Show::F, 1.0, 8, 4).is_err());
        assert!(transform_samples(&mu, Show::Cauchy, 0.5, 8, 4).is_err());
        let csv = transform_samples(&mu, Show::Cauchy, 2.0, 4, 4).unwrap();
        assert_eq!(csv.lines().count(), 5);
    }
}
