use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use fracsym::dynamics::{
    integrate, measure_frequency, simulate_landau, Composition, FractionalIvp, LandauRun, Scheme, Trajectory,
};
use fracsym::frac::{gamma, FracOrder};
use fracsym::hall::{estimate_alpha_near_one, estimate_alpha_small, noncommutativity_report, HallAlpha, HallScenario};
use fracsym::modelfile::parse_model;
use fracsym::symplectic::{
    brackets_to_commutators, fj_iterate, fractional_equations_of_motion, Alpha, Model, Terminal,
};
use num_complex::Complex64;

#[derive(Parser)]
#[command(name = "fracsym", version, about = "Fractional symplectic quantization toolkit")]
struct Cli {
    /// Output file (JSON for quantize, CSV for simulate).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Fractional order in (0, 1], or "symbolic".
    #[arg(long, global = true)]
    alpha: Option<AlphaArg>,
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Brackets of a model file via the symplectic iteration.
    Quantize {
        model: PathBuf,
        /// Numeric ħ for the commutator column.
        #[arg(long)]
        hbar: Option<f64>,
    },
    /// Integrates a model file or the Landau problem.
    Simulate {
        model: Option<PathBuf>,
        /// Landau problem with charge, field and mass.
        #[arg(long, num_args = 3, value_names = ["E", "B", "M"], allow_negative_numbers = true, conflicts_with = "model")]
        landau: Option<Vec<f64>>,
        #[arg(long = "T")]
        t_end: f64,
        #[arg(long)]
        h: f64,
        #[arg(long, value_enum, default_value_t = SchemeArg::Pc)]
        scheme: SchemeArg,
        #[arg(long, value_enum, default_value_t = CompositionArg::Single)]
        composition: CompositionArg,
        /// Initial state, comma separated, in model variable order.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        initial: Option<Vec<f64>>,
        /// Short-memory window in steps.
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        measure_frequency: bool,
    },
    /// Order estimate from a relative cyclotron-frequency shift.
    EstimateAlpha {
        #[arg(long, allow_negative_numbers = true)]
        delta: f64,
        #[arg(long, value_enum, default_value_t = RegimeArg::Small)]
        regime: RegimeArg,
    },
    /// Classical and fractional noncommutativity of the strong-field model.
    ReportHall {
        #[arg(long, default_value_t = 1.0)]
        e: f64,
        #[arg(long = "B", default_value_t = 1.0)]
        b: f64,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
    },
}

#[derive(Clone, Copy)]
enum AlphaArg {
    Symbolic,
    Value(f64),
}

impl FromStr for AlphaArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "symbolic" {
            return Ok(AlphaArg::Symbolic);
        }
        match s.parse::<f64>() {
            Ok(a) if (0.0..=1.0).contains(&a) => Ok(AlphaArg::Value(a)),
            Ok(a) => Err(format!("{a} is outside [0, 1]")),
            Err(e) => Err(e.to_string()),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    /// Explicit Grünwald-Letnikov.
    Gl,
    /// Grünwald-Letnikov predictor-corrector.
    Pc,
}

#[derive(Clone, Copy, ValueEnum)]
enum CompositionArg {
    Single,
    Sequential,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegimeArg {
    Small,
    NearOne,
}

fn order(a: AlphaArg) -> Result<FracOrder> {
    match a {
        AlphaArg::Value(v) => Ok(FracOrder::new(v)?),
        AlphaArg::Symbolic => bail!("a numeric --alpha is required"),
    }
}

fn write_out(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_model(path: &Path, alpha: Option<AlphaArg>) -> Result<Model> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let m = parse_model(&text).with_context(|| format!("{}", path.display()))?;
    Ok(match alpha {
        None => m,
        Some(AlphaArg::Symbolic) => m.with_alpha(Alpha::Symbolic),
        Some(a) => m.with_alpha(Alpha::Numeric(order(a)?)),
    })
}

fn quantize(cli: &Cli, path: &Path, hbar: Option<f64>) -> Result<u8> {
    let m = load_model(path, cli.alpha)?;
    let out = fj_iterate(&m)?;
    let log = out.chain.log();
    let json = match &out.table {
        Some(t) => match hbar {
            Some(h) => brackets_to_commutators(t, h).to_json(),
            None => t.to_json(),
        },
        None => {
            let v = serde_json::json!({
                "terminal": out.chain.terminal.name(),
                "log": log.lines().collect::<Vec<_>>(),
            });
            serde_json::to_string_pretty(&v)? + "\n"
        }
    };
    let regular = out.chain.terminal == Terminal::Regular;
    match &cli.out {
        Some(p) => {
            write_out(p, &json)?;
            write_out(&p.with_extension("log"), &log)?;
        }
        None => io::stdout().write_all(json.as_bytes())?,
    }
    if cli.verbose || (!regular && cli.out.is_none()) {
        eprint!("{log}");
    }
    Ok(match out.chain.terminal {
        Terminal::Regular => 0,
        Terminal::GaugeTheory { .. } => 2,
        Terminal::Inconsistent { .. } => 3,
    })
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    cli: &Cli,
    model: Option<&Path>,
    landau: Option<&[f64]>,
    t_end: f64,
    h: f64,
    scheme: Scheme,
    composition: Composition,
    initial: Option<&[f64]>,
    window: Option<usize>,
    frequency: bool,
) -> Result<()> {
    let traj: Trajectory = match (model, landau) {
        (_, Some(&[e, b, m])) => {
            let alpha = order(cli.alpha.unwrap_or(AlphaArg::Value(1.0)))?;
            let mut run = LandauRun::new(e, b, m, alpha, t_end, h)
                .with_scheme(scheme)
                .with_composition(composition);
            if let Some(init) = initial {
                let [x, y, vx, vy] = init else {
                    bail!("--initial for --landau takes x,y,vx,vy");
                };
                run = run.with_initial(Complex64::new(*x, *y), Complex64::new(*vx, *vy));
            }
            if window.is_some() {
                bail!("--window applies to model runs only");
            }
            simulate_landau(&run)?
        }
        (Some(path), None) => {
            let m = load_model(path, cli.alpha)?;
            let eom = fractional_equations_of_motion(&m)?;
            let y0 = initial.map_or_else(|| vec![0.0; m.dim()], <[f64]>::to_vec);
            let mut ivp = FractionalIvp::from_equations(&eom, m.binding(), y0, t_end, h)?
                .with_scheme(scheme)
                .with_composition(composition);
            if let Some(w) = window {
                ivp = ivp.with_window(w);
            }
            integrate(&ivp)?
        }
        _ => bail!("give a model file or --landau E B M"),
    };
    if cli.verbose {
        eprintln!("{} samples of {}", traj.len(), traj.variables().join(", "));
    }
    match &cli.out {
        Some(p) => {
            let file = fs::File::create(p).with_context(|| format!("writing {}", p.display()))?;
            traj.write_csv(io::BufWriter::new(file))?;
            write_out(&p.with_extension("json"), &traj.metadata_json())?;
        }
        None if !frequency => traj.write_csv(io::stdout().lock())?,
        None => {}
    }
    if frequency {
        let w = measure_frequency(&traj)?;
        let g = gamma(1.0 + traj.meta().alpha)?;
        println!("frequency {w:.10}");
        println!("frequency_times_gamma {:.10}", w * g);
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Quantize { model, hbar } => quantize(cli, model, *hbar),
        Command::Simulate {
            model,
            landau,
            t_end,
            h,
            scheme,
            composition,
            initial,
            window,
            measure_frequency,
        } => {
            let scheme = match scheme {
                SchemeArg::Gl => Scheme::GrunwaldLetnikov,
                SchemeArg::Pc => Scheme::PredictorCorrector,
            };
            let composition = match composition {
                CompositionArg::Single => Composition::SingleOrder,
                CompositionArg::Sequential => Composition::SequentialAlphaAlpha,
            };
            simulate(
                cli,
                model.as_deref(),
                landau.as_deref(),
                *t_end,
                *h,
                scheme,
                composition,
                initial.as_deref(),
                *window,
                *measure_frequency,
            )?;
            Ok(0)
        }
        Command::EstimateAlpha { delta, regime } => {
            let est = match regime {
                RegimeArg::Small => estimate_alpha_small(*delta)?,
                RegimeArg::NearOne => estimate_alpha_near_one(*delta)?,
            };
            emit(cli, &est.to_json())?;
            Ok(0)
        }
        Command::ReportHall { e, b, hbar } => {
            let alpha = match cli.alpha {
                Some(AlphaArg::Value(a)) => HallAlpha::Value(a),
                _ => bail!("report-hall needs a numeric --alpha"),
            };
            let s = HallScenario::new(
                *e,
                *b,
                1.0,
                *hbar,
                alpha,
                fracsym::hall::HallRegime::StrongFieldMasslessLimit,
            )?;
            emit(cli, &noncommutativity_report(&s)?.to_json())?;
            Ok(0)
        }
    }
}

fn emit(cli: &Cli, json: &str) -> Result<()> {
    match &cli.out {
        Some(p) => write_out(p, json),
        None => Ok(io::stdout().write_all(json.as_bytes())?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
