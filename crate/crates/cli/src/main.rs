//! `brown`: compute Brown-measure descriptors, simulate the Haar-rotated
//! matrix model, compare the two, and draw the result.

mod args;
mod svg;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use brown_core::brown::{brown_measure, sample_brown};
use brown_core::compare::{point_rows, pullback_points, report_from_clouds, CompareOptions, DEFAULT_ATOM_RADIUS};
use brown_core::io::{read_clouds, read_json, write_atomic, write_cloud, write_json, write_rows_csv, CloudKind};
use brown_core::rmt::{esd_trials, EnsembleConfig, EsdCloud};
use brown_core::{BrownDescriptor, Error, Thresholds};
use clap::{Parser, Subcommand};

use args::{resolve_out, LawArgs};

const EXIT_VALIDATION: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_MISMATCH: u8 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn validation(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_VALIDATION,
            message: message.into(),
        }
    }

    fn mismatch(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_MISMATCH,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::InvalidParameter { .. } | Error::NormalCase(_) | Error::OutOfRange(_) => EXIT_VALIDATION,
            Error::Io(_) | Error::Json(_) | Error::Csv(_) | Error::Empty(_) => EXIT_IO,
            Error::Mismatch(_) | Error::Inconsistent(_) => EXIT_MISMATCH,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

#[derive(Parser)]
#[command(name = "brown", version, about = "Brown measure of p + iq for two-atom laws")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the Brown measure descriptor and write it as JSON
    Brown {
        #[command(flatten)]
        law: LawArgs,
        /// Output JSON file [default: $BROWN_OUT_DIR/brown.json]
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate eigenvalues of the Haar-rotated matrix model
    Esd {
        #[command(flatten)]
        law: LawArgs,
        /// Matrix size
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(2..))]
        n: u64,
        /// Independent realizations
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory [default: $BROWN_OUT_DIR/esd]
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw exact samples from the analytic Brown measure (control cloud)
    Sample {
        #[command(flatten)]
        law: LawArgs,
        /// Number of samples
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory [default: $BROWN_OUT_DIR/exact]
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare simulated or sampled clouds against a descriptor
    Compare {
        /// Directory written by `esd` or `sample`
        #[arg(long)]
        esd: PathBuf,
        /// Descriptor JSON written by `brown`
        #[arg(long)]
        desc: PathBuf,
        /// Report JSON [default: $BROWN_OUT_DIR/report.json]
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write per-point classification rows to this CSV
        #[arg(long)]
        points: Option<PathBuf>,
        /// Radius of the balls counted as atoms
        #[arg(long, default_value_t = DEFAULT_ATOM_RADIUS, value_parser = args::parse_number)]
        atom_radius: f64,
    },
    /// Draw the support, the atoms and optionally an eigenvalue scatter as SVG
    Plot {
        #[arg(long)]
        desc: PathBuf,
        #[arg(long)]
        esd: Option<PathBuf>,
        /// Output SVG [default: $BROWN_OUT_DIR/plot.svg]
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::from(Error::Io(e)))
}

fn cmd_brown(law: &LawArgs, out: Option<PathBuf>) -> Result<(), Failure> {
    let params = law.params()?;
    let desc = brown_measure(&params)?;
    let out = resolve_out(out, "brown.json");
    write_json(&out, &desc)?;

    println!("{:<28} {:>10}", "atom", "mass");
    let atoms = desc.nonzero_atoms();
    if atoms.is_empty() {
        println!("(none)");
    }
    for atom in atoms {
        println!("{:<28} {:>10.6}", format!("{}", atom.position), atom.mass);
    }
    println!("continuous mass {:.6}", desc.weights.w_cont);
    let [lo, hi] = desc.nu.support;
    println!("nu support [{lo:.6}, {hi:.6}]");
    println!("wrote {}", out.display());
    Ok(())
}

fn cmd_esd(law: &LawArgs, n: u64, trials: u64, seed: u64, out: Option<PathBuf>) -> Result<(), Failure> {
    let params = law.params()?;
    let cfg = EnsembleConfig::new(n as usize, params, seed, trials as usize)?;
    let dir = resolve_out(out, "esd");
    ensure_dir(&dir)?;
    let clouds = esd_trials(&cfg)?;
    for cloud in &clouds {
        let path = write_cloud(&dir, cloud, CloudKind::Esd)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_sample(law: &LawArgs, n: u64, seed: u64, out: Option<PathBuf>) -> Result<(), Failure> {
    let params = law.params()?;
    let desc = brown_measure(&params)?;
    let dir = resolve_out(out, "exact");
    ensure_dir(&dir)?;
    let cloud = EsdCloud::from_points(params, seed, 0, sample_brown(&desc, n as usize, seed));
    let path = write_cloud(&dir, &cloud, CloudKind::Exact)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn load_clouds(dir: &Path, desc: &BrownDescriptor) -> Result<(Vec<EsdCloud>, CloudKind), Failure> {
    let loaded = read_clouds(dir)?;
    let kind = loaded[0].1;
    if loaded.iter().any(|(_, k)| *k != kind) {
        return Err(Failure::mismatch(format!("{} mixes simulated and exact clouds", dir.display())));
    }
    let clouds: Vec<EsdCloud> = loaded.into_iter().map(|(c, _)| c).collect();
    if let Some(c) = clouds.iter().find(|c| c.params != desc.params) {
        return Err(Failure::mismatch(format!(
            "cloud trial {} in {} was generated with {:?}, descriptor has {:?}",
            c.trial,
            dir.display(),
            c.params,
            desc.params
        )));
    }
    Ok((clouds, kind))
}

fn cmd_compare(
    esd: &Path,
    desc_path: &Path,
    out: Option<PathBuf>,
    points: Option<PathBuf>,
    atom_radius: f64,
) -> Result<(), Failure> {
    let desc: BrownDescriptor = read_json(desc_path)?;
    let (clouds, kind) = load_clouds(esd, &desc)?;
    let thresholds = match kind {
        CloudKind::Esd => Thresholds::RMT,
        CloudKind::Exact => Thresholds::CONTROL,
    };
    let opts = CompareOptions {
        atom_radius,
        thresholds,
    };
    let report = report_from_clouds(&clouds, &desc, &opts)?;
    let out = resolve_out(out, "report.json");
    write_json(&out, &report)?;
    if let Some(path) = points {
        let pts: Vec<_> = clouds.iter().flat_map(|c| c.eigenvalues.iter().copied()).collect();
        let pb = pullback_points(&pts, &desc, atom_radius)?;
        write_rows_csv(&path, &point_rows(&pts, &pb))?;
    }
    for c in &report.checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        println!("{verdict} {:<24} {:>12.3e} (limit {:.3e})", c.name, c.value, c.threshold);
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn cmd_plot(desc_path: &Path, esd: Option<&Path>, out: Option<PathBuf>) -> Result<(), Failure> {
    let desc: BrownDescriptor = read_json(desc_path)?;
    let points = match esd {
        Some(dir) => {
            let (clouds, _) = load_clouds(dir, &desc)?;
            Some(clouds.into_iter().flat_map(|c| c.eigenvalues).collect::<Vec<_>>())
        }
        None => None,
    };
    let out = resolve_out(out, "plot.svg");
    write_atomic(&out, svg::render(&desc, points.as_deref()).as_bytes())?;
    println!("wrote {}", out.display());
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Brown { law, out } => cmd_brown(&law, out),
        Command::Esd {
            law,
            n,
            trials,
            seed,
            out,
        } => cmd_esd(&law, n, trials, seed, out),
        Command::Sample { law, n, seed, out } => cmd_sample(&law, n, seed, out),
        Command::Compare {
            esd,
            desc,
            out,
            points,
            atom_radius,
        } => cmd_compare(&esd, &desc, out, points, atom_radius),
        Command::Plot { desc, esd, out } => cmd_plot(&desc, esd.as_deref(), out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}
