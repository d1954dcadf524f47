// Negated comparisons below are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qtomo::grid::UniformGrid;
use qtomo::group::{
    builtin_group, character_from_csv, character_to_csv, group_from_json, reconstruct_finite, smeared_character,
    BuiltinGroup, UnitaryRep,
};
use qtomo::radon::{covering_detector_grid, inverse_radon, radon, uniform_angles, ImageGrid, Sinogram};
use qtomo::spin::{spin_tomogram, spin_tomogram_to_json, SpinAxis};
use qtomo::states::{density_from_json_with, density_to_json, DensityMatrix, DensityTolerances};
use qtomo::verify::{format_table, run_all, run_module, MODULES};
use qtomo::weyl::{
    characteristic_samples, embed, grid_tomogram_with, reconstruct_wh, wigner, wigner_to_csv, wigner_to_raw,
    CharacteristicSamples, ReconstructionOptions, TomogramMethod, TomogramOptions, WHDirection,
};
use qtomo::Error;

const EXIT_VALIDATION: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "qtomo", version, about = "Quantum and classical tomography from the command line")]
struct Cli {
    /// Base seed for seeded fixtures.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Tolerance used when validating input density matrices.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Project an image onto a sinogram.
    Radon(RadonArgs),
    /// Filtered backprojection of a sinogram onto an image grid.
    Iradon(IradonArgs),
    /// Spin tomogram of a qubit state along an axis.
    SpinTomogram(SpinArgs),
    /// Character samples of a state over a finite group.
    GroupCharacter(GroupCharacterArgs),
    /// Density matrix from finite-group character samples.
    GroupReconstruct(GroupReconstructArgs),
    /// Oscillator tomogram on a grid.
    WhTomogram(WhTomogramArgs),
    /// Characteristic-function samples on a midpoint box.
    WhCharacteristic(WhCharacteristicArgs),
    /// Density matrix from characteristic-function samples.
    WhReconstruct(WhReconstructArgs),
    /// Wigner function on a square grid.
    Wigner(WignerArgs),
    /// Run the invariant suites.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct Output {
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RadonArgs {
    /// Headerless image CSV, one row per q node.
    #[arg(long)]
    image: PathBuf,
    /// Sidecar JSON with {q0, p0, dq, dp, nq, np}.
    #[arg(long)]
    meta: PathBuf,
    #[arg(long, default_value_t = 180)]
    angles: usize,
    /// Detector nodes; the detector always covers the image diagonal.
    #[arg(long, default_value_t = 256)]
    nx: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct IradonArgs {
    #[arg(long)]
    sinogram: PathBuf,
    /// Output grid half-width; defaults to the largest square inside the detector range.
    #[arg(long)]
    half_width: Option<f64>,
    /// Output nodes per axis; defaults to the detector node count.
    #[arg(long)]
    n: Option<usize>,
    /// Image CSV; the sidecar metadata goes next to it with a .json extension.
    #[arg(long)]
    out: PathBuf,
    /// Also write an 8-bit PGM preview.
    #[arg(long)]
    pgm: Option<PathBuf>,
}

fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    let v: Vec<f64> =
        s.split(',').map(|c| c.trim().parse::<f64>().map_err(|e| format!("{c:?}: {e}"))).collect::<Result<_, _>>()?;
    <[f64; 3]>::try_from(v).map_err(|v| format!("expected three comma-separated numbers, got {}", v.len()))
}

fn parse_grid(s: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [lo, hi, n] = parts[..] else {
        return Err("expected min,max,n".into());
    };
    let num = |c: &str| c.parse::<f64>().map_err(|e| format!("{c:?}: {e}"));
    Ok((num(lo)?, num(hi)?, n.parse::<usize>().map_err(|e| format!("{n:?}: {e}"))?))
}

#[derive(Args, Debug)]
struct SpinArgs {
    #[arg(long)]
    state: PathBuf,
    /// Axis components `sx,sy,sz`.
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
    axis: [f64; 3],
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct GroupArg {
    /// `pauli`, `cyclic:n[:k]`, `heisenberg:d`, `dihedral:n`, or `file:<group.json>` (first representation).
    #[arg(long)]
    group: String,
}

#[derive(Args, Debug)]
struct GroupCharacterArgs {
    #[command(flatten)]
    group: GroupArg,
    #[arg(long)]
    state: PathBuf,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct GroupReconstructArgs {
    #[command(flatten)]
    group: GroupArg,
    /// CSV `g,re,im`, one row per group element.
    #[arg(long)]
    chi: PathBuf,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Fourier,
    Spectral,
}

#[derive(Args, Debug)]
struct WhTomogramArgs {
    #[arg(long)]
    state: PathBuf,
    /// One value per mode, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    mu: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    nu: Vec<f64>,
    #[arg(long, allow_hyphen_values = true)]
    xmin: f64,
    #[arg(long, allow_hyphen_values = true)]
    xmax: f64,
    #[arg(long)]
    nx: usize,
    /// Fock cutoff; a single-mode state is padded up to it.
    #[arg(long)]
    cutoff: Option<usize>,
    #[arg(long, value_enum, default_value_t = Method::Fourier)]
    method: Method,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct WhCharacteristicArgs {
    #[arg(long)]
    state: PathBuf,
    /// Box half-width L.
    #[arg(long = "box")]
    half_width: f64,
    /// Nodes per axis.
    #[arg(long)]
    grid: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct WhReconstructArgs {
    /// CSV `mu,nu,re,im` on the midpoint box.
    #[arg(long)]
    chi: PathBuf,
    #[arg(long = "box")]
    half_width: f64,
    #[arg(long)]
    grid: usize,
    #[arg(long)]
    cutoff: usize,
    /// Clip negative eigenvalues and renormalize.
    #[arg(long)]
    psd_clip: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct WignerArgs {
    #[arg(long)]
    state: PathBuf,
    /// `min,max,n`, shared by q and p.
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    grid: (f64, f64, usize),
    /// Headerless matrix plus a `{x0, dx, n}` sidecar at `<out>.json`; needs --out.
    #[arg(long, requires = "out")]
    raw: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(MODULES))]
    module: Option<String>,
}

enum Failure {
    Lib(Error),
    Io(String),
    Checks(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Run<T> = Result<T, Failure>;

fn read(path: &Path) -> Run<String> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Run<()> {
    fs::write(path, bytes).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn emit(output: &Output, text: &str) -> Run<()> {
    match &output.out {
        Some(p) => write_file(p, text.as_bytes()),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Io(e.to_string())),
    }
}

fn sidecar(path: &Path) -> PathBuf {
    path.with_extension("json")
}

fn read_state(path: &Path, tol: f64) -> Run<DensityMatrix> {
    if !(tol > 0.0) {
        return Err(Error::BadParameter(format!("--tol must be positive, got {tol}")).into());
    }
    let t = DensityTolerances { hermitian: tol, trace: tol, psd: tol };
    Ok(density_from_json_with(&read(path)?, &t)?)
}

fn emit_state(output: &Output, rho: &DensityMatrix) -> Run<()> {
    emit(output, &(density_to_json(rho)? + "\n"))
}

fn parse_group(spec: &str) -> Run<UnitaryRep> {
    let bad = || Error::BadParameter(format!("unknown group {spec:?}"));
    let parts: Vec<&str> = spec.splitn(2, ':').collect();
    if parts[0] == "file" && parts.len() == 2 {
        let (_, reps) = group_from_json(&read(Path::new(parts[1]))?)?;
        return reps
            .into_iter()
            .next()
            .ok_or_else(|| Error::FileFormat("group file has no representations".into()).into());
    }
    let nums = |s: Option<&&str>| -> Result<Vec<usize>, Error> {
        s.map_or(Ok(vec![]), |s| s.split(':').map(|v| v.parse::<usize>().map_err(|_| bad())).collect())
    };
    let args = nums(parts.get(1))?;
    let kind = match (parts[0], args.as_slice()) {
        ("pauli", []) => BuiltinGroup::PauliQubit,
        ("cyclic", [n]) => BuiltinGroup::Cyclic { n: *n, k: 1 },
        ("cyclic", [n, k]) => BuiltinGroup::Cyclic { n: *n, k: *k },
        ("heisenberg", [d]) => BuiltinGroup::Heisenberg { d: *d },
        ("dihedral", [n]) => BuiltinGroup::Dihedral { n: *n },
        _ => return Err(bad().into()),
    };
    Ok(builtin_group(kind)?.1)
}

fn cmd_radon(a: &RadonArgs) -> Run<()> {
    let img = ImageGrid::from_csv(&read(&a.image)?, &read(&a.meta)?)?;
    let x = covering_detector_grid(&img, a.nx)?;
    emit(&a.output, &radon(&img, &uniform_angles(a.angles), &x)?.to_csv())
}

fn cmd_iradon(a: &IradonArgs) -> Run<()> {
    let sino = Sinogram::from_csv(&read(&a.sinogram)?)?;
    let x = sino.x_grid();
    let reach = x.x0.abs().min(x.last().abs());
    let half = a.half_width.unwrap_or(reach / 2f64.sqrt());
    let g = UniformGrid::span(-half, half, a.n.unwrap_or(x.n))?;
    let img = inverse_radon(&sino, &g, &g)?;
    write_file(&a.out, img.to_csv().as_bytes())?;
    write_file(&sidecar(&a.out), (img.metadata_json()? + "\n").as_bytes())?;
    if let Some(p) = &a.pgm {
        write_file(p, &img.to_pgm())?;
    }
    Ok(())
}

fn cmd_spin(a: &SpinArgs, tol: f64) -> Run<()> {
    let rho = read_state(&a.state, tol)?;
    let axis = SpinAxis::new(a.axis)?;
    emit(&a.output, &(spin_tomogram_to_json(&spin_tomogram(&rho, &axis)?)? + "\n"))
}

fn cmd_group_character(a: &GroupCharacterArgs, tol: f64) -> Run<()> {
    let rep = parse_group(&a.group.group)?;
    let rho = read_state(&a.state, tol)?;
    emit(&a.output, &character_to_csv(&smeared_character(&rho, &rep)?))
}

fn cmd_group_reconstruct(a: &GroupReconstructArgs) -> Run<()> {
    let rep = parse_group(&a.group.group)?;
    let chi = character_from_csv(&read(&a.chi)?, rep.group().order())?;
    emit_state(&a.output, &reconstruct_finite(&chi, &rep)?)
}

fn cmd_wh_tomogram(a: &WhTomogramArgs, tol: f64) -> Run<()> {
    let d = WHDirection::new(a.mu.clone(), a.nu.clone())?;
    let mut rho = read_state(&a.state, tol)?;
    if let Some(n) = a.cutoff {
        if d.modes() == 1 {
            rho = embed(&rho, n)?;
        } else if rho.dim() != n.pow(d.modes() as u32) {
            return Err(Error::DimensionMismatch { expected: n.pow(d.modes() as u32), found: rho.dim() }.into());
        }
    }
    let x = UniformGrid::span(a.xmin, a.xmax, a.nx)?;
    let method = match a.method {
        Method::Fourier => TomogramMethod::Fourier,
        Method::Spectral => TomogramMethod::Spectral,
    };
    let opts = TomogramOptions { method, ..Default::default() };
    emit(&a.output, &grid_tomogram_with(&rho, &d, &x, &opts)?.to_csv())
}

fn cmd_wh_characteristic(a: &WhCharacteristicArgs, tol: f64) -> Run<()> {
    let rho = read_state(&a.state, tol)?;
    emit(&a.output, &characteristic_samples(&rho, a.half_width, a.grid)?.to_csv())
}

fn cmd_wh_reconstruct(a: &WhReconstructArgs) -> Run<()> {
    let samples = CharacteristicSamples::from_csv(&read(&a.chi)?)?;
    let (half, m) = (samples.box_half_width(), samples.grid().n);
    if m != a.grid || (half - a.half_width).abs() > 1e-9 * a.half_width.abs().max(1.0) {
        return Err(Error::FileFormat(format!(
            "samples lie on a box of half-width {half} with {m} nodes, not --box {} --grid {}",
            a.half_width, a.grid
        ))
        .into());
    }
    let out = reconstruct_wh(&samples, a.cutoff, &ReconstructionOptions { psd_clip: a.psd_clip })?;
    eprintln!(
        "raw trace {:.6} {:+.3e}i, raw min eigenvalue {:.3e}, tail mass {:.3e}",
        out.raw_trace.re, out.raw_trace.im, out.min_eigenvalue, out.tail_mass
    );
    emit_state(&a.output, &out.state()?)
}

fn cmd_wigner(a: &WignerArgs, tol: f64) -> Run<()> {
    let (lo, hi, n) = a.grid;
    let g = UniformGrid::span(lo, hi, n)?;
    let w = wigner(&read_state(&a.state, tol)?, &g, &g)?;
    if a.raw {
        let (csv, meta) = wigner_to_raw(&w)?;
        let out = a.output.out.as_ref().expect("clap enforces --out with --raw");
        write_file(out, csv.as_bytes())?;
        write_file(&sidecar(out), (meta + "\n").as_bytes())
    } else {
        emit(&a.output, &wigner_to_csv(&w))
    }
}

fn cmd_verify(a: &VerifyArgs, seed: u64) -> Run<()> {
    let rows = match &a.module {
        Some(m) => run_module(m, seed)?,
        None => run_all(seed)?,
    };
    print!("{}", format_table(&rows));
    let failed = rows.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        return Err(Failure::Checks(failed));
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Run<()> {
    match &cli.command {
        Command::Radon(a) => cmd_radon(a),
        Command::Iradon(a) => cmd_iradon(a),
        Command::SpinTomogram(a) => cmd_spin(a, cli.tol),
        Command::GroupCharacter(a) => cmd_group_character(a, cli.tol),
        Command::GroupReconstruct(a) => cmd_group_reconstruct(a),
        Command::WhTomogram(a) => cmd_wh_tomogram(a, cli.tol),
        Command::WhCharacteristic(a) => cmd_wh_characteristic(a, cli.tol),
        Command::WhReconstruct(a) => cmd_wh_reconstruct(a),
        Command::Wigner(a) => cmd_wigner(a, cli.tol),
        Command::Verify(a) => cmd_verify(a, cli.seed),
    }
}

struct StderrLogger;

impl log::Log for StderrLogger {
    fn enabled(&self, m: &log::Metadata) -> bool {
        m.level() <= log::Level::Warn
    }

    fn log(&self, r: &log::Record) {
        if self.enabled(r.metadata()) {
            eprintln!("{}: {}", r.level().as_str().to_lowercase(), r.args());
        }
    }

    fn flush(&self) {}
}

static LOGGER: StderrLogger = StderrLogger;

fn main() -> ExitCode {
    let _ = log::set_logger(&LOGGER).map(|()| log::set_max_level(log::LevelFilter::Warn));
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            if let Error::ReconstructionNotState { .. } = e {
                eprintln!("hint: pass --psd-clip to project onto the nearest state");
            }
            ExitCode::from(if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_VALIDATION })
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Checks(n)) => {
            eprintln!("{n} check(s) failed");
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}
