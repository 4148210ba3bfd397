//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for bad input or an invariant violation,
//! 2 for a numerical failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::curves::{
    curve_from_points, formation_endpoints, phase_scan, pure_extraction_line, uniform_grid,
    FormationFamily, InformationCurve, PointKind, Probe, ProtocolPoint, ScanConfig,
};
use crate::ensembles::{
    delta_f_upper_bound, er_upper_bound, formation_point, local_orthogonality_check, Orthogonality,
};
use crate::families::{bell_mixture, classically_correlated, classify, pure_schmidt, BellMixtureFamily};
use crate::io::{read_ensemble, read_state, IoError, StateFile};
use crate::matrix::{DensityOperator, PureState};
use crate::measures::{information_content, measure_report, pure_state_entanglement};
use crate::render::{curve_series, curves_csv, render_svg, rounded_json, scan_csv, Chart, RenderSpec};
use crate::Error;

#[derive(Debug, Parser)]
#[command(name = "infospace", version, about = "Information-space diagrams for bipartite quantum states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entropies, information content and two-qubit entanglement measures.
    Entropy {
        #[command(flatten)]
        input: FamilyArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Formation and extraction curves.
    Curve {
        #[command(flatten)]
        input: FamilyArgs,
        #[command(flatten)]
        out: OutArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Also write an SVG plot here.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Plot with unnegated formation coordinates.
        #[arg(long)]
        plain_axes: bool,
        #[arg(long, action = ArgAction::Set, default_value_t = true)]
        include_extraction: bool,
    },
    /// Susceptibility along a family parameter.
    PhaseScan {
        #[arg(long, value_enum, default_value_t = FamilyName::BellMixture)]
        family: FamilyName,
        #[arg(long, default_value_t = 0.01)]
        p_min: f64,
        #[arg(long, default_value_t = 0.49)]
        p_max: f64,
        #[arg(long, default_value_t = 49)]
        steps: usize,
        /// Probe a fixed Q instead of the steepest segment.
        #[arg(long)]
        probe_q: Option<f64>,
        /// |dI/dQ| above which a growing tail counts as divergent.
        #[arg(long, default_value_t = 50.0)]
        threshold: f64,
        #[command(flatten)]
        out: OutArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        plain_axes: bool,
    },
    /// Pure product / pure entangled / classically correlated / NPT / PPT.
    Classify {
        #[command(flatten)]
        input: FamilyArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Formation point and bounds for an ensemble file.
    Ensemble {
        #[arg(long)]
        ensemble: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    BellMixture,
    PureSchmidt,
    Classical,
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub family: Option<FamilyName>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub probs: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub coeffs: Vec<f64>,
    /// State file (implies the raw family).
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Write the resolved density matrix as a state file.
    #[arg(long)]
    pub dump_state: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) | CliError::Io(IoError::Invalid(e)) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

enum Input {
    Bell(f64),
    Pure(PureState),
    Classical(DensityOperator),
    Raw(DensityOperator),
}

impl Input {
    fn density(&self) -> CliResult<DensityOperator> {
        Ok(match self {
            Input::Bell(p) => bell_mixture(*p)?,
            Input::Pure(psi) => psi.projector(),
            Input::Classical(rho) | Input::Raw(rho) => rho.clone(),
        })
    }
}

fn resolve(args: &FamilyArgs) -> CliResult<Input> {
    let family = match (args.family, &args.state) {
        (Some(f), _) => f,
        (None, Some(_)) => FamilyName::Raw,
        (None, None) => return Err(CliError::Usage("one of --family or --state is required".into())),
    };
    let input = match family {
        FamilyName::BellMixture => {
            let p = args.p.ok_or_else(|| CliError::Usage("--family bell-mixture needs --p".into()))?;
            bell_mixture(p)?;
            Input::Bell(p)
        }
        FamilyName::PureSchmidt => {
            if args.coeffs.is_empty() {
                return Err(CliError::Usage("--family pure-schmidt needs --coeffs".into()));
            }
            Input::Pure(pure_schmidt(&args.coeffs)?)
        }
        FamilyName::Classical => {
            if args.probs.is_empty() {
                return Err(CliError::Usage("--family classical needs --probs".into()));
            }
            Input::Classical(classically_correlated(&args.probs)?)
        }
        FamilyName::Raw => {
            let path = args
                .state
                .as_ref()
                .ok_or_else(|| CliError::Usage("--family raw needs --state".into()))?;
            Input::Raw(read_state(path)?)
        }
    };
    if let Some(path) = &args.dump_state {
        let rho = input.density()?;
        let text = serde_json::to_string_pretty(&StateFile::from_density(&rho))
            .map_err(|e| CliError::Usage(e.to_string()))?;
        write_file(path, &text)?;
    }
    Ok(input)
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })
}

fn emit(out: &OutArgs, text: &str, stdout: &mut dyn Write) -> CliResult<()> {
    match &out.out {
        Some(path) => write_file(path, text),
        None => stdout.write_all(text.as_bytes()).map_err(|source| CliError::Write {
            path: "<stdout>".into(),
            source,
        }),
    }
}

#[derive(Serialize)]
struct CurveOutput<'a> {
    formation: &'a InformationCurve,
    #[serde(skip_serializing_if = "Option::is_none")]
    extraction: Option<&'a InformationCurve>,
}

fn curves_for(input: &Input, include_extraction: bool, stderr: &mut dyn Write) -> CliResult<(InformationCurve, Option<InformationCurve>)> {
    match input {
        Input::Bell(p) => {
            let formation = curve_from_points(BellMixtureFamily.formation_points(*p)?)?;
            if include_extraction {
                let _ = writeln!(stderr, "note: extraction curve is not computable for bell-mixture; omitted");
            }
            Ok((formation, None))
        }
        Input::Pure(psi) => {
            let rho = psi.projector();
            let n = rho.qubit_count()?;
            let e = pure_state_entanglement(psi)?;
            let formation = {
                let (a, b) = formation_endpoints(n, 0.0, e, e)?;
                curve_from_points(vec![a, b])?
            };
            let extraction = include_extraction.then(|| pure_extraction_line(n, e)).transpose()?;
            Ok((formation, extraction))
        }
        Input::Classical(rho) => {
            let info = information_content(rho)?;
            let formation = {
                let (a, b) = formation_endpoints(info, 0.0, 0.0, 0.0)?;
                curve_from_points(vec![a, b])?
            };
            let extraction = include_extraction
                .then(|| {
                    curve_from_points(vec![ProtocolPoint::new(0.0, info, PointKind::ExtractionZero, "I_l(0)")])
                })
                .transpose()?;
            Ok((formation, extraction))
        }
        Input::Raw(_) => Err(CliError::Usage(
            "raw states have no formation-point rules; use entropy, classify or ensemble".into(),
        )),
    }
}

fn chart(title: &str, series: Vec<crate::render::Series>, spec: &RenderSpec) -> Chart {
    let sign = if spec.negate_formation { "-" } else { "" };
    Chart {
        title: title.to_string(),
        x_label: format!("Q (qubits; formation plotted at {sign}Q)"),
        y_label: format!("I (bits; formation plotted at {sign}I)"),
        width: spec.width,
        height: spec.height,
        series,
    }
}

#[derive(Serialize)]
struct EnsembleOutput {
    orthogonality: Orthogonality,
    formation_point: ProtocolPoint,
    er_upper_bound: Option<f64>,
    delta_f_upper_bound: Option<f64>,
}

fn run_command(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    match cmd {
        Command::Entropy { input, out } => {
            let rho = resolve(&input)?.density()?;
            emit(&out, &rounded_json(&measure_report(&rho)?), stdout)
        }
        Command::Classify { input, out } => {
            let rho = resolve(&input)?.density()?;
            emit(&out, &rounded_json(&classify(&rho)?), stdout)
        }
        Command::Curve {
            input,
            out,
            format,
            svg,
            plain_axes,
            include_extraction,
        } => {
            let resolved = resolve(&input)?;
            let (formation, extraction) = curves_for(&resolved, include_extraction, stderr)?;
            let text = match format {
                Format::Csv => {
                    let mut all = vec![&formation];
                    all.extend(extraction.as_ref());
                    curves_csv(&all)
                }
                Format::Json => rounded_json(&CurveOutput {
                    formation: &formation,
                    extraction: extraction.as_ref(),
                }),
            };
            emit(&out, &text, stdout)?;
            if let Some(path) = svg {
                let spec = RenderSpec {
                    negate_formation: !plain_axes,
                    ..RenderSpec::default()
                };
                let mut series = vec![curve_series(&formation, "formation", &spec)];
                series.extend(extraction.as_ref().map(|c| curve_series(c, "extraction", &spec)));
                write_file(&path, &render_svg(&chart("information curves", series, &spec)))?;
            }
            Ok(())
        }
        Command::PhaseScan {
            family,
            p_min,
            p_max,
            steps,
            probe_q,
            threshold,
            out,
            format,
            svg,
            plain_axes,
        } => {
            if family != FamilyName::BellMixture {
                return Err(CliError::Usage("phase-scan needs a parametrized family (bell-mixture)".into()));
            }
            if !(0.0 < p_min && p_min < p_max && p_max < 0.5) {
                return Err(CliError::Usage("phase-scan needs 0 < p-min < p-max < 0.5".into()));
            }
            if steps < 2 {
                return Err(CliError::Usage("phase-scan needs --steps >= 2".into()));
            }
            let probe = probe_q.map_or(Probe::SteepestSegment, Probe::FixedQ);
            let grid = uniform_grid(p_min, p_max, steps);
            let config = ScanConfig {
                divergence_threshold: threshold,
            };
            let result = phase_scan(&BellMixtureFamily, &grid, probe, config)?;
            let text = match format {
                Format::Csv => scan_csv(&result),
                Format::Json => rounded_json(&result),
            };
            emit(&out, &text, stdout)?;
            if let Some(path) = svg {
                let spec = RenderSpec {
                    negate_formation: !plain_axes,
                    ..RenderSpec::default()
                };
                let series = grid
                    .iter()
                    .map(|&p| {
                        let c = curve_from_points(BellMixtureFamily.formation_points(p)?)?;
                        Ok(curve_series(&c, &format!("p={}", crate::numfmt::fmt_sig(p)), &spec))
                    })
                    .collect::<CliResult<Vec<_>>>()?;
                write_file(&path, &render_svg(&chart("formation curves across the family", series, &spec)))?;
            }
            Ok(())
        }
        Command::Ensemble { ensemble, out } => {
            let e = read_ensemble(&ensemble)?;
            let orthogonality = local_orthogonality_check(&e);
            let point = formation_point(&e)?;
            let (er, df) = if orthogonality.is_certified() {
                (Some(er_upper_bound(&e)?), Some(delta_f_upper_bound(&e)?))
            } else {
                (None, None)
            };
            emit(
                &out,
                &rounded_json(&EnsembleOutput {
                    orthogonality,
                    formation_point: point,
                    er_upper_bound: er,
                    delta_f_upper_bound: df,
                }),
                stdout,
            )
        }
    }
}

/// Runs a parsed command, reporting any failure on `stderr`, and returns the
/// process exit code.
pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8 {
    match run_command(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
