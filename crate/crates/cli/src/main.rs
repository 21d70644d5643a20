//! `effsym` command-line tool: synthesize symmetry maps, recover them from
//! map files, and run the property suites.

mod report;
mod wire;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use effsym::linalg::haar_unitary;
use effsym::oracle::MapOracle;
use effsym::recover::{recover, RecoveryOptions};
use effsym::suites::{run_suite, Exec, SuiteConfig, SUITE_NAMES};
use effsym::symmetry::{Family, Kind, Sign, SymmetryDescriptor};
use effsym::{Error, VERSION};
use rayon::prelude::*;
use serde::Serialize;

use report::{ConfigEcho, RecoveryJson, ReportFile, SuiteJson, VerifyJson};
use wire::{AffineMapJson, DescriptorJson, MapFile};

const EXIT_REJECTED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "effsym", version, about = "Symmetries of the effect algebra: synthesis, recovery, verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random descriptor and its affine-map representation.
    Synth(SynthArgs),
    /// Recover the canonical form of a map given as a descriptor or affine-map file.
    Recover(RecoverArgs),
    /// Run the property suites at one dimension.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum FamilyArg {
    Affine,
    TripleEffects,
    TripleHermitian,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Affine => Family::Affine,
            FamilyArg::TripleEffects => Family::TripleEffects,
            FamilyArg::TripleHermitian => Family::TripleHermitian,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Unitary,
    Antiunitary,
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Residual acceptance tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 32)]
    trials: usize,
    #[arg(long, value_enum, default_value_t = FamilyArg::Affine)]
    family: FamilyArg,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 3)]
    dim: usize,
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value_t = KindArg::Unitary)]
    kind: KindArg,
    #[arg(long)]
    complement: bool,
    #[arg(long, default_value_t = 1, allow_hyphen_values = true, value_parser = parse_sign)]
    sign: i32,
    /// Output directory.
    #[arg(long, default_value = ".")]
    output: PathBuf,
}

#[derive(Args)]
struct RecoverArgs {
    /// Expected dimension; must match the map file when given.
    #[arg(long)]
    dim: Option<usize>,
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    input: PathBuf,
    /// Report path; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 4)]
    dim: usize,
    #[command(flatten)]
    common: Common,
    /// Report path; only the summary is printed when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_sign(s: &str) -> Result<i32, String> {
    match s {
        "1" | "+1" => Ok(1),
        "-1" => Ok(-1),
        _ => Err(format!("sign must be 1 or -1, got {s}")),
    }
}

enum Failure {
    Usage(String),
    Io(String),
}

impl Failure {
    fn report(self) -> ExitCode {
        let (msg, code) = match self {
            Failure::Usage(m) => (m, EXIT_USAGE),
            Failure::Io(m) => (m, EXIT_IO),
        };
        eprintln!("error: {msg}");
        ExitCode::from(code)
    }
}

fn check_common(c: &Common) -> Result<(), Failure> {
    if !(c.tol > 0.0 && c.tol.is_finite()) {
        return Err(Failure::Usage(format!("--tol must be positive, got {}", c.tol)));
    }
    if c.trials == 0 {
        return Err(Failure::Usage("--trials must be at least 1".into()));
    }
    Ok(())
}

fn check_dim(dim: usize, family: Family) -> Result<(), Failure> {
    if dim < family.min_dim() {
        return Err(Failure::Usage(format!(
            "--dim {dim} is below {} for family {}",
            family.min_dim(),
            family.as_str()
        )));
    }
    Ok(())
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Io(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn emit(path: Option<&Path>, value: &impl Serialize) -> Result<(), Failure> {
    match path {
        Some(p) => write_json(p, value),
        None => {
            let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Io(e.to_string()))?;
            println!("{text}");
            Ok(())
        }
    }
}

fn synth(args: SynthArgs) -> Result<ExitCode, Failure> {
    check_common(&args.common)?;
    let family = Family::from(args.common.family);
    check_dim(args.dim, family)?;
    if args.complement && family != Family::Affine {
        return Err(Failure::Usage(format!("--complement is only valid for family affine, not {}", family.as_str())));
    }
    if args.sign == -1 && family != Family::TripleHermitian {
        return Err(Failure::Usage("--sign -1 is only valid for family triple_hermitian".into()));
    }
    let kind = match args.kind {
        KindArg::Unitary => Kind::Unitary,
        KindArg::Antiunitary => Kind::Antiunitary,
    };
    let sign = if args.sign == -1 { Sign::Minus } else { Sign::Plus };
    let u = haar_unitary(args.dim, args.common.seed).map_err(|e| Failure::Usage(e.to_string()))?;
    let d = SymmetryDescriptor::new(kind, u, args.complement, sign).map_err(|e| Failure::Usage(e.to_string()))?;

    fs::create_dir_all(&args.output).map_err(|e| Failure::Io(format!("{}: {e}", args.output.display())))?;
    let descriptor_path = args.output.join("descriptor.json");
    let map_path = args.output.join("affine_map.json");
    write_json(&descriptor_path, &DescriptorJson::from(&d))?;
    write_json(&map_path, &AffineMapJson::from(&d.to_affine_rep()))?;
    println!("{}", descriptor_path.display());
    println!("{}", map_path.display());
    Ok(ExitCode::SUCCESS)
}

fn recover_cmd(args: RecoverArgs) -> Result<ExitCode, Failure> {
    check_common(&args.common)?;
    let family = Family::from(args.common.family);
    let text = fs::read_to_string(&args.input)
        .map_err(|e| Failure::Usage(format!("{}: {e}", args.input.display())))?;
    let map = MapFile::parse(&text).map_err(Failure::Usage)?;
    let dim = map.dim();
    if let Some(expected) = args.dim {
        if expected != dim {
            return Err(Failure::Usage(format!("--dim {expected} but the map file has dimension {dim}")));
        }
    }
    check_dim(dim, family)?;
    let oracle: &dyn MapOracle = match &map {
        MapFile::Affine(r) => r,
        MapFile::Descriptor(d) => d,
    };
    let opts = RecoveryOptions {
        tol: args.common.tol,
        trials: args.common.trials,
        seed: args.common.seed,
        ..RecoveryOptions::default()
    };

    let start = Instant::now();
    let report = recover(family, oracle, &opts).map_err(|e| match e {
        Error::Oracle(m) => Failure::Usage(format!("map evaluation failed: {m}")),
        other => Failure::Usage(other.to_string()),
    })?;
    let file = ReportFile {
        version: VERSION,
        config: ConfigEcho {
            command: "recover",
            dim,
            seed: args.common.seed,
            tol: args.common.tol,
            trials: args.common.trials,
            family: family.as_str(),
            input: Some(args.input.display().to_string()),
        },
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        report: RecoveryJson::from(&report),
    };
    emit(args.output.as_deref(), &file)?;
    if report.is_canonical() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("rejected: {}", report.reason.as_deref().unwrap_or("no reason recorded"));
        Ok(ExitCode::from(EXIT_REJECTED))
    }
}

fn verify(args: VerifyArgs) -> Result<ExitCode, Failure> {
    check_common(&args.common)?;
    if args.dim < 2 {
        return Err(Failure::Usage(format!("--dim must be at least 2, got {}", args.dim)));
    }
    let cfg = SuiteConfig {
        exec: Exec::Sequential,
        ..SuiteConfig::new([args.dim], args.common.trials, args.common.seed).with_tol(args.common.tol)
    };
    let start = Instant::now();
    // suites run concurrently; each one is sequential and seed-deterministic
    let outcomes: Vec<_> = (0..SUITE_NAMES.len())
        .into_par_iter()
        .map(|i| run_suite(i, &cfg))
        .collect();
    let elapsed = start.elapsed().as_secs_f64();

    for o in &outcomes {
        println!("{}", o.summary());
    }
    let failing: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.name).collect();
    if let Some(path) = &args.output {
        let file = ReportFile {
            version: VERSION,
            config: ConfigEcho {
                command: "verify",
                dim: args.dim,
                seed: args.common.seed,
                tol: args.common.tol,
                trials: args.common.trials,
                family: Family::from(args.common.family).as_str(),
                input: None,
            },
            wall_clock_seconds: elapsed,
            report: VerifyJson {
                passed: failing.is_empty(),
                suites: outcomes.iter().map(SuiteJson::from).collect(),
            },
        };
        write_json(path, &file)?;
    }
    if failing.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("failing suites: {}", failing.join(", "));
        Ok(ExitCode::from(EXIT_REJECTED))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(a) => synth(a),
        Command::Recover(a) => recover_cmd(a),
        Command::Verify(a) => verify(a),
    };
    result.unwrap_or_else(Failure::report)
}
