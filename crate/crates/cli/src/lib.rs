//! Command-line front end for `multiportlab`.

pub mod config;

use std::f64::consts::PI;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use multiportlab::chain::{band_structure, bloch_hamiltonian, consistency_report, crossing_points, BandSource};
use multiportlab::error::Error;
use multiportlab::experiment::{prepare_position, sample_shots, w_state};
use multiportlab::hamiltonian::{momentum_state, reversible_double, ring_site_hamiltonian, three_point_hamiltonian};
use multiportlab::linalg::{
    exp_evolution, principal_log_hamiltonian, CMatrix, CVector, Hamiltonian, StateVector, Unitary,
};
use multiportlab::multiport::{exit_probabilities, parse_port, strict_three_port, ExitDistribution, MultiportSpec};
use multiportlab::netspec::{compile_evolution, parse_network, parse_network_unchecked, validate_network, Diagnostic};
use multiportlab::scattering::{build_unbiased_multiport, effective_smatrix, CalibrationProfile};
use multiportlab::su3::{appendix_coefficients, su2_decompose, su3_decompose, CoefficientRecord};
use serde_json::{json, Value};

pub use config::CliConfig;

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or configuration; exit code 2.
    Usage(String),
    /// The computation itself failed; exit code 1.
    Domain(String),
    /// Invalid network description, reported line by line.
    Invalid(Vec<Diagnostic>),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Network(d) => CliError::Invalid(d),
            other => CliError::Domain(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "multiportlab", version, about = "Directionally unbiased multiports, their walks and band structures")]
struct Cli {
    /// Config file; by default `multiportlab.toml` in the working directory, then in $HOME.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Transition matrix of an n-port Grover multiport, or of a custom ring.
    Unitary(UnitaryArgs),
    /// The strictly unbiased three-port.
    Strict3(PortArg),
    /// Solve the internal beam-splitter construction for given vertex phases.
    Scatter(ScatterArgs),
    /// Hermitian generators and their spectra.
    Hamiltonian(HamiltonianArgs),
    /// Band structure samples.
    Bands(BandsArgs),
    /// Momenta where adjacent bands meet.
    Crossings(CrossingsArgs),
    /// Pauli or Gell-Mann coefficients.
    Decompose(DecomposeArgs),
    /// Step a state through a multiport or a network description.
    Evolve(EvolveArgs),
    /// Build an initial state.
    Prepare(PrepareArgs),
    /// Chain consistency report.
    Report(ReportArgs),
    /// Check a network description.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
struct PortArg {
    /// Also report exit probabilities for this input port (A/B/C or index).
    #[arg(long)]
    port: Option<String>,
}

#[derive(Debug, Args)]
struct UnitaryArgs {
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Comma-separated vertex phases; builds the multiport from its internal ring.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    phases: Option<Vec<f64>>,
    #[command(flatten)]
    port: PortArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Profile {
    Grover,
    SinglePass,
}

#[derive(Debug, Args)]
struct ScatterArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    phases: Vec<f64>,
    #[arg(long, value_enum, default_value = "grover")]
    profile: Profile,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum HamiltonianKind {
    /// Three-site hopping matrix.
    ThreePoint,
    /// Ring of `n` sites.
    Ring,
    /// Principal logarithm of the n-port Grover matrix.
    Log,
    /// Time-reversal doubling of the n-port Grover matrix.
    Double,
    /// 3x3 Bloch matrix at `--k`.
    Bloch,
}

#[derive(Debug, Args)]
struct HamiltonianArgs {
    #[arg(long, value_enum, default_value = "three-point")]
    kind: HamiltonianKind,
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, allow_hyphen_values = true)]
    k: Option<f64>,
    /// Also report exp(-iHt).
    #[arg(long, allow_hyphen_values = true)]
    time: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Source {
    ClosedForm,
    Numerical,
    Chain,
}

impl From<Source> for BandSource {
    fn from(s: Source) -> Self {
        match s {
            Source::ClosedForm => BandSource::ClosedForm,
            Source::Numerical => BandSource::Numerical,
            Source::Chain => BandSource::Chain,
        }
    }
}

#[derive(Debug, Args)]
struct BandsArgs {
    #[arg(long, value_enum, default_value = "closed-form")]
    source: Source,
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Debug, Args)]
struct CrossingsArgs {
    #[arg(long, value_enum, default_value = "closed-form")]
    source: Source,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Algebra {
    Su2,
    Su3,
}

#[derive(Debug, Args)]
struct DecomposeArgs {
    #[arg(value_enum)]
    algebra: Algebra,
    /// JSON file `{"re": [[..]], "im": [[..]]}` holding a Hermitian matrix.
    #[arg(long)]
    matrix_file: Option<PathBuf>,
    /// Decompose the Bloch matrix at this momentum (su3 only).
    #[arg(long, allow_hyphen_values = true)]
    k: Option<f64>,
    /// Decompose the Bloch matrix on a grid of this many momenta (su3 only).
    #[arg(long)]
    samples: Option<usize>,
    /// Use the tabulated appendix expansion instead of decomposing.
    #[arg(long)]
    appendix: bool,
}

#[derive(Debug, Args)]
struct EvolveArgs {
    /// Network description; without it the walk runs on a single Grover multiport.
    #[arg(long)]
    network: Option<PathBuf>,
    /// Port count of the single multiport when no network is given.
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// `port:K`, `terminal:ID` or `mode:I`.
    #[arg(long)]
    input: String,
    #[arg(long, default_value_t = 1)]
    steps: usize,
    #[arg(long, default_value_t = 0)]
    shots: u64,
    #[arg(long)]
    seed: Option<u64>,
    /// Remove amplitude reaching non-reflective terminals after every step.
    #[arg(long, conflicts_with = "shots")]
    absorb: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PrepareKind {
    Position,
    Momentum,
    W,
}

#[derive(Debug, Args)]
struct PrepareArgs {
    #[arg(value_enum)]
    kind: PrepareKind,
    /// Occupied site for `position`.
    #[arg(long, default_value_t = 0)]
    m: usize,
    /// Number of modes or sites.
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Momentum grid index for `momentum`: k = 2 pi index / n.
    #[arg(long, default_value_t = 0)]
    index: usize,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[arg(long, default_value_t = 12)]
    sites: usize,
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long)]
    network: PathBuf,
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code. Results go to `out` (or the `--out` file), diagnostics
/// to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok(text) => match emit(&cli, &text, out) {
            Ok(()) => 0,
            Err(msg) => {
                let _ = writeln!(err, "error: {msg}");
                1
            }
        },
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(CliError::Domain(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(CliError::Invalid(diags)) => {
            for d in diags {
                let _ = writeln!(err, "{d}");
            }
            1
        }
    }
}

fn emit(cli: &Cli, text: &str, out: &mut dyn Write) -> Result<(), String> {
    match &cli.out {
        Some(path) => {
            let cfg = CliConfig::load(cli.config.as_deref()).map_err(|_| "config".to_string())?;
            let path = cfg.output_path(path);
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
            }
            fs::write(&path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

fn execute(cli: &Cli) -> Result<String, CliError> {
    let cfg = CliConfig::load(cli.config.as_deref())?;
    let f = cli.format;
    match &cli.command {
        Command::Unitary(a) => {
            let spec = match &a.phases {
                Some(p) if p.len() != a.n => {
                    return Err(CliError::Usage(format!("--phases has {} entries but --n is {}", p.len(), a.n)))
                }
                Some(p) => MultiportSpec::custom(p.clone()),
                None => MultiportSpec::grover(a.n),
            };
            unitary_output(&spec.unitary()?, a.port.port.as_deref(), f)
        }
        Command::Strict3(a) => unitary_output(&strict_three_port(), a.port.as_deref(), f),
        Command::Scatter(a) => {
            let profile = match a.profile {
                Profile::Grover => CalibrationProfile::GROVER,
                Profile::SinglePass => CalibrationProfile::SINGLE_PASS,
            };
            let s = effective_smatrix(&build_unbiased_multiport(&a.phases, &profile)?)?;
            unitary_output(&s, None, f)
        }
        Command::Hamiltonian(a) => hamiltonian(a, f),
        Command::Bands(a) => {
            let cfg = cfg.with_flags(None, a.samples, None)?;
            let b = band_structure(a.source.into(), cfg.samples)?;
            Ok(match f {
                Format::Csv => b.to_csv(),
                Format::Json => pretty(&json!({
                    "source": b.provenance.as_str(),
                    "k": b.k_grid,
                    "energies": b.energies,
                    "tracked": b.tracked,
                })),
            })
        }
        Command::Crossings(a) => {
            let cfg = cfg.with_flags(a.tolerance, a.samples, None)?;
            let b = band_structure(a.source.into(), cfg.samples)?;
            let ks = crossing_points(&b, cfg.tolerance);
            Ok(match f {
                Format::Csv => ks.iter().fold(String::from("k\n"), |mut s, k| {
                    let _ = writeln!(s, "{}", num(*k));
                    s
                }),
                Format::Json => pretty(&json!({
                    "source": b.provenance.as_str(),
                    "samples": cfg.samples,
                    "tolerance": cfg.tolerance,
                    "crossings": ks,
                })),
            })
        }
        Command::Decompose(a) => decompose(a, &cfg, f),
        Command::Evolve(a) => evolve(a, &cfg, f),
        Command::Prepare(a) => {
            let state = match a.kind {
                PrepareKind::Position => prepare_position(a.m, a.n)?,
                PrepareKind::Momentum => momentum_state(2.0 * PI * a.index as f64 / a.n as f64, a.n)?.vector,
                PrepareKind::W => {
                    let w = w_state(a.n)?;
                    let labels = (0..a.n).map(|i| w.occupation_label(i)).collect();
                    w.to_state().with_labels(labels)?
                }
            };
            Ok(state_output(&state, f))
        }
        Command::Report(a) => {
            if f == Format::Csv {
                return Err(CliError::Usage("report is only available as json".into()));
            }
            let cfg = cfg.with_flags(None, a.samples, None)?;
            Ok(consistency_report(a.sites, cfg.samples)?.to_json() + "\n")
        }
        Command::Validate(a) => validate(&a.network, f),
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize") + "\n"
}

fn matrix_json(m: &CMatrix) -> Value {
    let part = |g: fn(&multiportlab::linalg::C64) -> f64| {
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| g(&m[(i, j)])).collect::<Vec<_>>()).collect::<Vec<_>>()
    };
    json!({ "re": part(|z| z.re), "im": part(|z| z.im) })
}

fn matrix_csv(m: &CMatrix) -> String {
    let mut s = String::from("row,col,re,im\n");
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            let _ = writeln!(s, "{i},{j},{},{}", num(z.re), num(z.im));
        }
    }
    s
}

fn distribution_csv(d: &ExitDistribution) -> String {
    let mut s = String::from("port,probability\n");
    for (i, p) in d.probabilities.iter().enumerate() {
        let _ = writeln!(s, "{i},{}", num(*p));
    }
    s
}

fn unitary_output(u: &Unitary, port: Option<&str>, f: Format) -> Result<String, CliError> {
    let dist = port
        .map(|p| {
            let k = parse_port(p).ok_or_else(|| CliError::Usage(format!("cannot parse port {p:?}")))?;
            Ok::<_, CliError>(exit_probabilities(u, k)?)
        })
        .transpose()?;
    Ok(match (f, dist) {
        (Format::Csv, Some(d)) => distribution_csv(&d),
        (Format::Csv, None) => matrix_csv(u.matrix()),
        (Format::Json, d) => {
            let mut v =
                json!({ "dim": u.dim(), "matrix": matrix_json(u.matrix()), "unitarity_residual": u.residual() });
            if let Some(d) = d {
                v["exit_probabilities"] = json!(d);
            }
            pretty(&v)
        }
    })
}

fn hamiltonian(a: &HamiltonianArgs, f: Format) -> Result<String, CliError> {
    let h = match a.kind {
        HamiltonianKind::ThreePoint => three_point_hamiltonian(),
        HamiltonianKind::Ring => ring_site_hamiltonian(a.n)?,
        HamiltonianKind::Log => principal_log_hamiltonian(&MultiportSpec::grover(a.n).unitary()?)?,
        HamiltonianKind::Double => reversible_double(&MultiportSpec::grover(a.n).unitary()?)?.inner,
        HamiltonianKind::Bloch => {
            let k = a.k.ok_or_else(|| CliError::Usage("--kind bloch needs --k".into()))?;
            Hamiltonian::new(bloch_hamiltonian(k))?
        }
    };
    let propagator = a.time.map(|t| exp_evolution(&h, t)).transpose()?;
    Ok(match f {
        Format::Csv => {
            let mut s = String::from("index,energy\n");
            for (i, e) in h.energies().iter().enumerate() {
                let _ = writeln!(s, "{i},{}", num(*e));
            }
            s
        }
        Format::Json => {
            let mut v = json!({ "dim": h.dim(), "matrix": matrix_json(h.matrix()), "energies": h.energies() });
            if let (Some(t), Some(p)) = (a.time, propagator) {
                v["time"] = json!(t);
                v["propagator"] = matrix_json(p.matrix());
            }
            pretty(&v)
        }
    })
}

fn read_matrix(path: &Path) -> Result<CMatrix, CliError> {
    #[derive(serde::Deserialize)]
    struct Parts {
        re: Vec<Vec<f64>>,
        im: Option<Vec<Vec<f64>>>,
    }
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Domain(format!("cannot read {}: {e}", path.display())))?;
    let p: Parts = serde_json::from_str(&text)
        .map_err(|e| CliError::Domain(format!("bad matrix file {}: {e}", path.display())))?;
    let n = p.re.len();
    let im = p.im.unwrap_or_else(|| vec![vec![0.0; n]; n]);
    if p.re.iter().chain(&im).any(|r| r.len() != n) || im.len() != n {
        return Err(CliError::Domain(format!("matrix in {} is not square", path.display())));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| multiportlab::linalg::c(p.re[i][j], im[i][j])))
}

fn decompose(a: &DecomposeArgs, cfg: &CliConfig, f: Format) -> Result<String, CliError> {
    match a.algebra {
        Algebra::Su2 => {
            let path = a.matrix_file.as_ref().ok_or_else(|| CliError::Usage("su2 needs --matrix-file".into()))?;
            let p = su2_decompose(&read_matrix(path)?)?;
            Ok(match f {
                Format::Csv => format!("d0,dx,dy,dz\n{},{},{},{}\n", num(p.d0), num(p.dx), num(p.dy), num(p.dz)),
                Format::Json => pretty(&json!(p)),
            })
        }
        Algebra::Su3 => {
            let records: Vec<CoefficientRecord> = if let Some(path) = &a.matrix_file {
                if a.k.is_some() || a.samples.is_some() || a.appendix {
                    return Err(CliError::Usage("--matrix-file excludes --k, --samples and --appendix".into()));
                }
                vec![CoefficientRecord::new(f64::NAN, &su3_decompose(&read_matrix(path)?)?)]
            } else {
                let ks = match a.k {
                    Some(k) => vec![k],
                    None => multiportlab::chain::k_grid(cfg.clone().with_flags(None, a.samples, None)?.samples),
                };
                ks.iter()
                    .map(|&k| {
                        let g =
                            if a.appendix { appendix_coefficients(k) } else { su3_decompose(&bloch_hamiltonian(k))? };
                        Ok(CoefficientRecord::new(k, &g))
                    })
                    .collect::<Result<_, CliError>>()?
            };
            let from_file = a.matrix_file.is_some();
            Ok(match f {
                Format::Csv => {
                    let mut s = String::from(if from_file {
                        "d0,d1,d2,d3,d4,d5,d6,d7,d8\n"
                    } else {
                        "k,d0,d1,d2,d3,d4,d5,d6,d7,d8\n"
                    });
                    for r in &records {
                        let mut cols: Vec<String> =
                            [r.d0, r.d1, r.d2, r.d3, r.d4, r.d5, r.d6, r.d7, r.d8].iter().map(|x| num(*x)).collect();
                        if !from_file {
                            cols.insert(0, num(r.k));
                        }
                        s += &cols.join(",");
                        s.push('\n');
                    }
                    s
                }
                Format::Json if from_file => {
                    let mut v = json!(records[0]);
                    v.as_object_mut().expect("record is an object").remove("k");
                    pretty(&v)
                }
                Format::Json => multiportlab::su3::coefficients_json(&records) + "\n",
            })
        }
    }
}

fn input_index(
    spec: &str,
    labels: &[String],
    terminal: &dyn Fn(&str) -> Option<usize>,
    port: &dyn Fn(usize) -> Option<usize>,
) -> Result<usize, CliError> {
    let (kind, value) = spec
        .split_once(':')
        .ok_or_else(|| CliError::Usage(format!("--input must be port:K, terminal:ID or mode:I, got {spec:?}")))?;
    let index = |v: &str| v.parse::<usize>().map_err(|_| CliError::Usage(format!("bad index in --input {spec:?}")));
    match kind {
        "port" => {
            let k = parse_port(value).ok_or_else(|| CliError::Usage(format!("bad port in --input {spec:?}")))?;
            port(k).ok_or_else(|| CliError::Domain(format!("no input at port {k}")))
        }
        "terminal" => terminal(value).ok_or_else(|| CliError::Domain(format!("no terminal {value:?}"))),
        "mode" => {
            let i = index(value)?;
            (i < labels.len())
                .then_some(i)
                .ok_or_else(|| CliError::Domain(format!("mode {i} out of range (dim {})", labels.len())))
        }
        _ => Err(CliError::Usage(format!("unknown input kind {kind:?}; use port, terminal or mode"))),
    }
}

fn evolve(a: &EvolveArgs, cfg: &CliConfig, f: Format) -> Result<String, CliError> {
    let cfg = cfg.clone().with_flags(None, None, a.seed)?;
    let (labels, probabilities, marginal, absorbed, input_port) = match &a.network {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Domain(format!("cannot read {}: {e}", path.display())))?;
            let compiled = compile_evolution(&parse_network(&text)?)?;
            let labels = compiled.basis.labels();
            let modes = &compiled.basis.modes;
            let terminal =
                |id: &str| compiled.terminal_ids.iter().position(|t| t == id).map(|t| compiled.terminal_modes[t]);
            let port = |k: usize| compiled.terminal_modes.iter().copied().find(|&m| modes[m].port == k);
            let i = input_index(&a.input, &labels, &terminal, &port)?;
            let mut psi = CVector::zeros(compiled.dim());
            psi[i] = multiportlab::linalg::ONE;
            let r = compiled.run(&psi, a.steps, a.absorb)?;
            let probs: Vec<f64> = r.amplitudes.iter().map(|z| z.norm_sqr()).collect();
            let absorbed: Vec<(String, f64)> = compiled.terminal_ids.iter().cloned().zip(r.absorbed).collect();
            (labels, probs, compiled.port_marginal(&r.amplitudes), Some(absorbed), modes[i].port)
        }
        None => {
            let u = MultiportSpec::grover(a.n).unitary()?;
            let labels: Vec<String> = (0..a.n).map(|i| i.to_string()).collect();
            let i = input_index(&a.input, &labels, &|_| None, &|k| (k < a.n).then_some(k))?;
            let psi = StateVector::basis(a.n, i)?;
            let d = multiportlab::experiment::walk_distribution(&u, &psi, a.steps)?;
            (labels, d.probabilities.clone(), d.probabilities, None, i)
        }
    };
    let shots = if a.shots > 0 {
        let total: f64 = marginal.iter().sum();
        let dist = ExitDistribution::new(input_port, marginal.iter().map(|p| p / total).collect())?;
        Some(sample_shots(&dist, a.shots, cfg.seed))
    } else {
        None
    };
    Ok(match f {
        Format::Csv => {
            let mut s = String::from(if shots.is_some() { "port,probability,count\n" } else { "port,probability\n" });
            for (p, x) in marginal.iter().enumerate() {
                let _ = write!(s, "{p},{}", num(*x));
                if let Some(r) = &shots {
                    let _ = write!(s, ",{}", r.counts[p]);
                }
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let modes: Vec<Value> =
                labels.iter().zip(&probabilities).map(|(l, p)| json!({ "label": l, "probability": p })).collect();
            let mut v = json!({
                "input": a.input,
                "steps": a.steps,
                "modes": modes,
                "port_marginal": marginal,
            });
            if let Some(abs) = absorbed.filter(|_| a.absorb) {
                v["absorbed"] = abs.iter().map(|(id, p)| json!({ "terminal": id, "probability": p })).collect();
            }
            if let Some(r) = shots {
                v["shots"] = json!(r);
            }
            pretty(&v)
        }
    })
}

fn state_output(state: &StateVector, f: Format) -> String {
    let amps = state.amplitudes();
    match f {
        Format::Csv => {
            let mut s = String::from("label,re,im\n");
            for (l, z) in state.labels().iter().zip(amps.iter()) {
                let _ = writeln!(s, "{l},{},{}", num(z.re), num(z.im));
            }
            s
        }
        Format::Json => {
            let entries: Vec<Value> = state
                .labels()
                .iter()
                .zip(amps.iter())
                .map(|(l, z)| json!({ "label": l, "re": z.re, "im": z.im }))
                .collect();
            pretty(&json!({ "dim": state.dim(), "amplitudes": entries }))
        }
    }
}

fn validate(path: &Path, f: Format) -> Result<String, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Domain(format!("cannot read {}: {e}", path.display())))?;
    let diags = match parse_network_unchecked(&text) {
        Ok(spec) => validate_network(&spec),
        Err(Error::Network(d)) => d,
        Err(e) => return Err(e.into()),
    };
    if !diags.is_empty() {
        return Err(CliError::Invalid(diags));
    }
    Ok(match f {
        Format::Csv => "valid\ntrue\n".to_string(),
        Format::Json => pretty(&json!({ "valid": true, "diagnostics": [] })),
    })
}
