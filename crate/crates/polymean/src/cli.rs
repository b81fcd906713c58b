//! Command-line interface.
//!
//! Exit codes: 0 success, 1 other failures (I/O), 2 usage, 3 malformed
//! manifest, 4 dimension mismatch, 5 missing file, 6 numerical error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use polymean_core::data::{
    forward_means, means_to_wave_2d, means_to_wave_3d, wave_to_means_2d, wave_to_means_3d,
};
use polymean_core::{
    build_domain, invert_means_2d, invert_means_3d, invert_wave_2d, invert_wave_3d, Executor,
    GridSpec, ImageGrid, MeansDataset, Params2D, Params3D, Quantity, RadialGrid, WaveDataset,
};
use serde_json::json;

use crate::error::{Error, Result};
use crate::exec::{thread_count, Threads};
use crate::format::{self, Provenance};
use crate::metrics::{metrics, metrics_where};
use crate::setup;
use crate::study;

#[derive(Debug, Parser)]
#[command(
    name = "polymean",
    version,
    about = "Spherical and circular mean inversion on polyhedral and polygonal domains"
)]
pub struct Cli {
    /// Worker threads (falls back to POLYMEAN_THREADS, then all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a phantom spec and its values on a grid.
    Phantom(PhantomArgs),
    /// Simulate a means or wave dataset.
    Forward(ForwardArgs),
    /// Convert between means and wave data.
    Convert(ConvertArgs),
    /// Reconstruct an image from a dataset.
    Invert(InvertArgs),
    /// Error metrics of one image against another.
    Compare(CompareArgs),
    /// Parameter sweeps written as CSV.
    Study {
        #[command(subcommand)]
        kind: StudyKind,
    },
}

#[derive(Debug, Args)]
pub struct DomainArgs {
    /// KIND[:SIZES], prism:BASE[:SIDE,HEIGHT], or a JSON domain spec.
    #[arg(long)]
    pub domain: String,
    /// Detectors per edge (prisms: base,height).
    #[arg(long, value_delimiter = ',', default_value = "64")]
    pub detectors: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct PhantomArgs {
    #[command(flatten)]
    pub domain: DomainArgs,
    /// Declared phantom name or JSON file.
    #[arg(long)]
    pub phantom: String,
    /// Grid nodes per axis over the domain's bounding box.
    #[arg(long, default_value_t = 65)]
    pub grid: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ForwardArgs {
    #[command(flatten)]
    pub domain: DomainArgs,
    #[arg(long)]
    pub phantom: String,
    /// Radii for 2D datasets.
    #[arg(long)]
    pub nr: Option<usize>,
    /// Times for 3D datasets.
    #[arg(long)]
    pub nt: Option<usize>,
    /// Largest radius or time; defaults to the domain diameter.
    #[arg(long)]
    pub rmax: Option<f64>,
    /// Write wave data instead of means.
    #[arg(long)]
    pub wave: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Means,
    Wave,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub to: Target,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct InvertArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Grid nodes per axis (default 129 in 2D, 65 in 3D).
    #[arg(long)]
    pub grid: Option<usize>,
    /// 2D truncation radius (default: circumradius + diameter).
    #[arg(long)]
    pub rtrunc: Option<f64>,
    /// 3D integration radius (default: diameter).
    #[arg(long = "T")]
    pub t: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    pub a: PathBuf,
    /// Reference image; relative norms are taken against it.
    pub b: PathBuf,
    /// Only compare nodes inside the domain recorded with the reference.
    #[arg(long)]
    pub inside: bool,
    /// Print JSON instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum StudyKind {
    /// Error against the truncation radius (2D).
    Truncation {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long)]
        phantom: String,
        #[arg(long, default_value_t = 1024)]
        nr: usize,
        #[arg(long, default_value_t = 129)]
        grid: usize,
        /// Truncation radii.
        #[arg(long, value_delimiter = ',', required = true)]
        rtrunc: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Error against resolution; each level sets detectors and grid nodes.
    Convergence {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long)]
        phantom: String,
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<usize>,
        /// Radii (2D) or times (3D).
        #[arg(long, alias = "nt", default_value_t = 257)]
        nr: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("polymean: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let exec = Threads::new(thread_count(cli.threads));
    match cli.command {
        Command::Phantom(a) => cmd_phantom(a),
        Command::Forward(a) => cmd_forward(a, &exec),
        Command::Convert(a) => cmd_convert(a, &exec),
        Command::Invert(a) => cmd_invert(a, &exec),
        Command::Compare(a) => cmd_compare(a),
        Command::Study { kind } => cmd_study(kind, &exec),
    }
}

fn cmd_phantom(a: PhantomArgs) -> Result<()> {
    let spec = setup::parse_domain(&a.domain.domain, &a.domain.detectors)?;
    let p = setup::phantom(&a.phantom, &spec)?;
    let d = build_domain(&spec)?;
    let (lo, hi) = d.bounds();
    let grid = GridSpec::fit(d.dim, a.grid, lo, hi)?;
    let img = ImageGrid::from_fn(grid, |x| p.eval(x));
    format::write_phantom(&format::sibling(&a.out, "phantom.json"), &p)?;
    let prov = Provenance::new("phantom", json!({ "phantom": a.phantom, "grid": a.grid }));
    let m = format::image_manifest(&a.out, &img, Some(spec), prov);
    format::write_image(&a.out, &m, &img)
}

fn cmd_forward(a: ForwardArgs, exec: &dyn Executor) -> Result<()> {
    let spec = setup::parse_domain(&a.domain.domain, &a.domain.detectors)?;
    let p = setup::phantom(&a.phantom, &spec)?;
    let d = build_domain(&spec)?;
    let count = match (d.dim, a.nr, a.nt) {
        (2, Some(n), None) | (3, None, Some(n)) => n,
        (2, None, None) => 1024,
        (3, None, None) => 257,
        (2, _, Some(_)) => return Err(Error::Usage("2D datasets take --nr".into())),
        _ => return Err(Error::Usage("3D datasets take --nt".into())),
    };
    let grid = RadialGrid::new(count, a.rmax.unwrap_or(d.diam))?;
    let m = forward_means(&p, &d, grid, exec)?;
    let violation = m.support_violation();
    if violation > 1e-9 {
        eprintln!(
            "polymean: warning: means do not vanish at the last radius (relative {violation:.2e})"
        );
    }
    let (quantity, samples) = if a.wave {
        let w = if d.dim == 2 {
            means_to_wave_2d(&m, exec)?
        } else {
            means_to_wave_3d(&m, exec)?
        };
        (Quantity::Wave, w.0)
    } else {
        (Quantity::Means, m.0)
    };
    let prov = Provenance::new(
        "forward",
        json!({ "phantom": a.phantom, "radii": count, "rmax": grid.max, "wave": a.wave }),
    );
    let manifest = format::dataset_manifest(&a.out, &samples, quantity, Some(p), prov);
    format::write_dataset(&a.out, &manifest, &samples.values)
}

fn cmd_convert(a: ConvertArgs, exec: &dyn Executor) -> Result<()> {
    let (src, s) = format::read_dataset(&a.input)?;
    let dim = s.domain.dim;
    let out = match (src.quantity, a.to, dim) {
        (Quantity::Means, Target::Wave, 2) => means_to_wave_2d(&MeansDataset(s), exec)?.0,
        (Quantity::Means, Target::Wave, _) => means_to_wave_3d(&MeansDataset(s), exec)?.0,
        (Quantity::Wave, Target::Means, 2) => wave_to_means_2d(&WaveDataset(s), exec)?.0,
        (Quantity::Wave, Target::Means, _) => wave_to_means_3d(&WaveDataset(s), exec)?.0,
        (_, _, _) => s,
    };
    let quantity = match a.to {
        Target::Means => Quantity::Means,
        Target::Wave => Quantity::Wave,
    };
    let prov = Provenance::new("convert", json!({ "to": quantity }))
        .with_input(&a.input, &src.payload_sha256)?;
    let m = format::dataset_manifest(&a.out, &out, quantity, src.phantom, prov);
    format::write_dataset(&a.out, &m, &out.values)
}

fn cmd_invert(a: InvertArgs, exec: &dyn Executor) -> Result<()> {
    let (src, s) = format::read_dataset(&a.input)?;
    let dim = s.domain.dim;
    let n = a.grid.unwrap_or(if dim == 2 { 129 } else { 65 });
    let spec = s.domain.spec.clone();
    let (img, params) = if dim == 2 {
        if a.t.is_some() {
            return Err(Error::Usage(
                "--T applies to 3D datasets; use --rtrunc".into(),
            ));
        }
        let mut p = Params2D::for_domain(&s.domain, n)?;
        if let Some(r) = a.rtrunc {
            p.r_trunc = r;
        }
        let img = match src.quantity {
            Quantity::Means => invert_means_2d(&MeansDataset(s), &p, exec)?,
            Quantity::Wave => invert_wave_2d(&WaveDataset(s), &p, exec)?,
        };
        (img, json!({ "grid": n, "rtrunc": p.r_trunc }))
    } else {
        if a.rtrunc.is_some() {
            return Err(Error::Usage(
                "--rtrunc applies to 2D datasets; use --T".into(),
            ));
        }
        let mut p = Params3D::for_domain(&s.domain, n)?;
        if let Some(t) = a.t {
            p.t = t;
        }
        let img = match src.quantity {
            Quantity::Means => invert_means_3d(&MeansDataset(s), &p, exec)?,
            Quantity::Wave => invert_wave_3d(&WaveDataset(s), &p, exec)?,
        };
        (img, json!({ "grid": n, "T": p.t }))
    };
    let prov = Provenance::new("invert", params).with_input(&a.input, &src.payload_sha256)?;
    let m = format::image_manifest(&a.out, &img, Some(spec), prov);
    format::write_image(&a.out, &m, &img)
}

fn cmd_compare(a: CompareArgs) -> Result<()> {
    let (_, ia) = format::read_image(&a.a)?;
    let (mb, ib) = format::read_image(&a.b)?;
    let m = if a.inside {
        let spec = mb
            .domain
            .ok_or_else(|| Error::Usage(format!("{} records no domain", a.b.display())))?;
        let d = build_domain(&spec)?;
        let tol = d.tolerance();
        metrics_where(&ia, &ib, |x| d.contains(x, tol))?
    } else {
        metrics(&ia, &ib)?
    };
    if a.json {
        println!("{}", serde_json::to_string(&m).expect("metrics serialize"));
    } else {
        let kind = if m.relative { "relative" } else { "absolute" };
        println!("linf_{kind} {:e}", m.linf);
        println!("l2_{kind} {:e}", m.l2);
        println!("max_abs {:e} at {:?}", m.max_abs, &m.max_at[..ia.spec.dim]);
        println!("nodes {}", m.count);
    }
    Ok(())
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_study(kind: StudyKind, exec: &dyn Executor) -> Result<()> {
    match kind {
        StudyKind::Truncation {
            domain,
            phantom,
            nr,
            grid,
            rtrunc,
            out,
        } => {
            let spec = setup::parse_domain(&domain.domain, &domain.detectors)?;
            let p = setup::phantom(&phantom, &spec)?;
            let rows = study::truncation(&spec, &p, nr, grid, &rtrunc, exec)?;
            emit(out.as_deref(), &study::truncation_csv(&rows))
        }
        StudyKind::Convergence {
            domain,
            phantom,
            levels,
            nr,
            out,
        } => {
            let spec = setup::parse_domain(&domain.domain, &domain.detectors)?;
            let p = setup::phantom(&phantom, &spec)?;
            let rows = study::convergence(&spec, &p, &levels, nr, exec)?;
            emit(out.as_deref(), &study::convergence_csv(&rows))
        }
    }
}
