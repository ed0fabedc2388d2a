use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use leray_persist::error::Error;
use leray_persist::field::{Field, FieldChoice};
use leray_persist::io::{self, InstanceFile, Loaded};
use leray_persist::report;
use leray_persist::spectral::SpectralSlice;
use leray_persist::{with_field, Instance};

/// Persistent cohomology through the spectral sequence of a pulled-back cover.
#[derive(Parser, Debug)]
#[command(name = "leray-persist", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Coefficient field: a prime, or 0 for the rationals. Overrides the file.
    #[arg(long)]
    field: Option<u32>,
    /// Instance file.
    instance: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate an instance; exits non-zero with itemized diagnostics.
    Check(Common),
    /// Dimensions of E_r^{p,q} at one slice and the ranks of d_r.
    Pages {
        #[command(flatten)]
        common: Common,
        /// Filtration index, clamped to [0, N].
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        slice: i64,
        #[arg(long, default_value_t = 2)]
        page: usize,
    },
    /// Oracle and spectral barcodes, optionally plotted.
    Barcode {
        #[command(flatten)]
        common: Common,
        /// Cohomological degree; all degrees when omitted.
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Show bars born at 0 as open to the left (birth null).
        #[arg(long)]
        open_start: bool,
    },
    /// Full comparison report; exits 0 iff every dimension check passes.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Include wall-clock time, which makes the output nondeterministic.
        #[arg(long)]
        timing: bool,
    },
    /// Band cover of a path or cycle; replaces the cover of INSTANCE if given.
    Bands {
        #[arg(long)]
        vertices: u32,
        #[arg(long)]
        bands: usize,
        #[arg(long)]
        cyclic: bool,
        instance: Option<PathBuf>,
    },
}

/// Failure classes, mapped to exit codes.
enum Failure {
    /// The computation ran but a check failed.
    Check,
    Error(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

impl From<leray_persist::error::FieldError> for Failure {
    fn from(e: leray_persist::error::FieldError) -> Self {
        Failure::Error(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = thread_cap() {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn thread_cap() -> Option<usize> {
    let raw = std::env::var("LERAY_THREADS").ok()?;
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => Some(n),
        _ => {
            eprintln!("warning: ignoring LERAY_THREADS={raw:?}");
            None
        }
    }
}

fn load(common: &Common) -> Result<Loaded, Failure> {
    let mut loaded = io::load(&common.instance)?;
    if let Some(p) = common.field {
        loaded.field = FieldChoice::new(p)?;
    }
    Ok(loaded)
}

fn warn(loaded: &Loaded) {
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Check(common) => check(&common),
        Command::Pages { common, slice, page } => {
            let loaded = load(&common)?;
            warn(&loaded);
            let i = io::clamp_slice(slice, loaded.instance.len());
            let r = with_field!(loaded.field, S => report::pages_report::<S>(&loaded.instance, loaded.field, i, page))??;
            print!("{}", report::to_json(&r));
            Ok(())
        }
        Command::Barcode {
            common,
            degree,
            svg,
            open_start,
        } => {
            let loaded = load(&common)?;
            warn(&loaded);
            let (r, bars) = with_field!(loaded.field, S => report::barcode_report::<S>(&loaded.instance, loaded.field, degree, open_start))??;
            if let Some(path) = svg {
                let refs: Vec<(usize, &leray_persist::Barcode)> = bars.iter().map(|(n, b)| (*n, b)).collect();
                std::fs::write(path, io::barcode_svg(loaded.instance.len(), &refs)).map_err(Error::from)?;
            }
            match (degree, r.degrees.as_slice()) {
                (Some(_), [one]) => print!("{}", report::to_json(one)),
                _ => print!("{}", report::to_json(&r)),
            }
            if r.degrees.iter().all(|d| d.agree) {
                Ok(())
            } else {
                Err(Failure::Check)
            }
        }
        Command::Compare { common, timing } => {
            let loaded = load(&common)?;
            warn(&loaded);
            let r = with_field!(loaded.field, S => report::compare_report::<S>(&loaded.instance, loaded.field, timing))??;
            print!("{}", report::to_json(&r));
            if r.ok {
                Ok(())
            } else {
                for m in &r.mismatches {
                    eprintln!(
                        "mismatch at i={}, n={}: E_inf total {} vs H^n {}",
                        m.index, m.degree, m.e_infinity, m.cohomology
                    );
                }
                Err(Failure::Check)
            }
        }
        Command::Bands {
            vertices,
            bands,
            cyclic,
            instance,
        } => bands_command(vertices, bands, cyclic, instance.as_deref()),
    }
}

fn check(common: &Common) -> Result<(), Failure> {
    let loaded = load(common)?;
    if !loaded.warnings.is_empty() {
        for w in &loaded.warnings {
            eprintln!("error: {w}");
        }
        return Err(Failure::Check);
    }
    with_field!(loaded.field, S => check_slices::<S>(&loaded.instance))??;
    let inst = &loaded.instance;
    println!(
        "ok: {} simplices, N = {}, {} cover pieces, field {}",
        inst.complex.entries().count(),
        inst.len(),
        inst.system.n_pieces(),
        loaded.field
    );
    Ok(())
}

/// Builds every slice; construction verifies that the total differential
/// squares to zero.
fn check_slices<S: Field>(inst: &Instance) -> Result<(), Error> {
    for i in 0..=inst.len() {
        SpectralSlice::<S>::build(&inst.complex, &inst.system, i)?;
    }
    Ok(())
}

fn bands_command(vertices: u32, bands: usize, cyclic: bool, instance: Option<&Path>) -> Result<(), Failure> {
    let cover = io::band_cover(vertices, bands, cyclic)?;
    let pieces: Vec<io::PieceEntry> = cover
        .pieces
        .iter()
        .map(|p| io::PieceEntry {
            id: p.id,
            simplices: io::maximal_simplices(&p.complex),
        })
        .collect();
    let target: Vec<_> = cover.target.iter().cloned().collect();
    match instance {
        Some(path) => {
            let mut file = InstanceFile::read(path)?;
            file.target = Some(target);
            if file.map.is_none() {
                return Err(Error::Invalid("the instance needs an explicit map onto the band target".into()).into());
            }
            file.cover = pieces;
            file.build()?;
            print!("{}", file.to_text());
        }
        None => {
            let fragment = serde_json::json!({ "target": target, "cover": pieces });
            println!("{}", serde_json::to_string_pretty(&fragment).expect("serializes"));
        }
    }
    Ok(())
}
