//! `flatmagic`: run the anti-flatness experiments and write CSV.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use flatmagic::clifford::GateMode;
use flatmagic::experiments::{
    layer_summaries, run_experiment_with, success_probability, verify_theorem_n2,
    write_csv, write_csv_file, ExperimentConfig, ExperimentKind, InitialState, PartitionSpec,
    WitnessMode,
};
use flatmagic::pauli::{m2_from_mlin, product_mlin, PauliSweep, DEFAULT_SWEEP_CAP};
use flatmagic::stabilizer::{c_constant, toric_code_ground_state, ConstantMode};
use flatmagic::statevec::{anti_flatness, PureState};
use flatmagic::{Error, Exec};

#[derive(Parser)]
#[command(name = "flatmagic", version, about = "Magic of pure states via entanglement-spectrum anti-flatness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Product states under random Clifford layers; F_A after every layer.
    OrbitAverage(RunArgs),
    /// Like orbit-average after --prep-layers scrambling layers.
    RatioTrace(RunArgs),
    /// Witness trajectories; witness_fired is the outcome at each depth budget.
    WitnessSweep(RunArgs),
    /// |+⟩^n under noise-dressed Clifford layers, one curve per --sigma.
    NoiseScan(RunArgs),
    /// Toric-code ground state under noise-dressed Clifford layers.
    ToricNoise(RunArgs),
    /// Exhaustive two-qubit Clifford average against the stabilizer linear entropy.
    VerifyTheoremN2 {
        /// Number of random test states.
        #[arg(long, default_value_t = 20)]
        realizations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// M_lin, M_2 and F_A of a product, |+⟩ or toric state.
    Magic(MagicArgs),
}

#[derive(Args, Clone, Default)]
struct RunArgs {
    /// TOML config; flags given alongside override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated angles in radians (π/4 is the T state).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    theta: Option<Vec<f64>>,
    #[arg(long)]
    layers: Option<usize>,
    #[arg(long)]
    prep_layers: Option<usize>,
    #[arg(long)]
    realizations: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    epsilon: Option<f64>,
    /// Comma-separated noise strengths.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    sigma: Option<Vec<f64>>,
    #[arg(long)]
    seed: Option<u64>,
    /// `half` or a comma-separated list of qubits in A.
    #[arg(long)]
    partition: Option<String>,
    #[arg(long)]
    gate_mode: Option<GateModeArg>,
    #[arg(long)]
    witness_mode: Option<WitnessModeArg>,
    #[arg(long)]
    toric_lx: Option<usize>,
    #[arg(long)]
    toric_ly: Option<usize>,
    /// Output CSV; standard output when neither this nor the config sets one.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Print per-layer means with 95% half-widths to standard error.
    #[arg(long)]
    summary: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum GateModeArg {
    Uniform,
    Generators,
}

#[derive(Clone, Copy, ValueEnum)]
enum WitnessModeArg {
    Incremental,
    Fresh,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum StateArg {
    Product,
    Plus,
    Toric,
}

#[derive(Args)]
struct MagicArgs {
    #[arg(long, default_value = "product")]
    state: StateArg,
    #[arg(long)]
    n: Option<usize>,
    /// One angle for every qubit, or one per qubit.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    theta: Option<Vec<f64>>,
    #[arg(long)]
    partition: Option<String>,
    #[arg(long, default_value_t = 4)]
    toric_lx: usize,
    #[arg(long, default_value_t = 2)]
    toric_ly: usize,
}

fn kind_of(cmd: &Command) -> Option<ExperimentKind> {
    Some(match cmd {
        Command::OrbitAverage(_) => ExperimentKind::OrbitAverage,
        Command::RatioTrace(_) => ExperimentKind::RatioTrace,
        Command::WitnessSweep(_) => ExperimentKind::WitnessSweep,
        Command::NoiseScan(_) => ExperimentKind::NoiseScan,
        Command::ToricNoise(_) => ExperimentKind::ToricNoise,
        _ => return None,
    })
}

fn build_config(kind: ExperimentKind, a: &RunArgs) -> flatmagic::Result<ExperimentConfig> {
    let mut cfg = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let cfg = ExperimentConfig::from_toml(&text)?;
            if cfg.kind != kind {
                return Err(Error::Config {
                    field: "kind".into(),
                    message: format!("config is `{}`, subcommand is `{}`", cfg.kind.name(), kind.name()),
                });
            }
            cfg
        }
        None => ExperimentConfig::new(kind),
    };
    if a.n.is_some() {
        cfg.n = a.n;
    }
    if let Some(t) = &a.theta {
        cfg.thetas = t.clone();
    }
    if let Some(v) = a.layers {
        cfg.layers = v;
    }
    if let Some(v) = a.prep_layers {
        cfg.prep_layers = v;
    }
    if let Some(v) = a.realizations {
        cfg.realizations = v;
    }
    if let Some(v) = a.epsilon {
        cfg.epsilon = v;
    }
    if let Some(s) = &a.sigma {
        cfg.sigmas = s.clone();
    }
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    if let Some(p) = &a.partition {
        cfg.partition = PartitionSpec::parse(p)?;
    }
    if let Some(m) = a.gate_mode {
        cfg.gate_mode = match m {
            GateModeArg::Uniform => GateMode::Uniform,
            GateModeArg::Generators => GateMode::Generators,
        };
    }
    if let Some(m) = a.witness_mode {
        cfg.witness_mode = match m {
            WitnessModeArg::Incremental => WitnessMode::Incremental,
            WitnessModeArg::Fresh => WitnessMode::Fresh,
        };
    }
    if let Some(v) = a.toric_lx {
        cfg.toric_lx = v;
    }
    if let Some(v) = a.toric_ly {
        cfg.toric_ly = v;
    }
    if a.out.is_some() {
        cfg.output = a.out.clone();
    }
    if kind == ExperimentKind::WitnessSweep && a.theta.is_none() && cfg.thetas.is_empty()
        && cfg.initial() == InitialState::Product
    {
        // the canonical input
        cfg.thetas = vec![std::f64::consts::FRAC_PI_4];
    }
    cfg.validate()?;
    Ok(cfg)
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    #[cfg(feature = "parallel")]
    if let Some(k) = threads {
        match rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build() {
            Ok(pool) => return pool.install(f),
            Err(e) => eprintln!("warning: could not build a {k}-thread pool: {e}"),
        }
    }
    #[cfg(not(feature = "parallel"))]
    if threads.is_some() {
        eprintln!("warning: built without the `parallel` feature; --threads ignored");
    }
    f()
}

fn run(kind: ExperimentKind, a: &RunArgs) -> flatmagic::Result<()> {
    let cfg = build_config(kind, a)?;
    let n = cfg.num_qubits()?;
    let curves = match kind {
        ExperimentKind::NoiseScan | ExperimentKind::ToricNoise => cfg.sigmas.len(),
        _ => cfg.thetas.len().max(1),
    };
    eprintln!(
        "{}: n = {n}, {curves} curve(s) × {} realizations × {} layers, seed {}",
        kind.name(),
        cfg.realizations,
        cfg.layers,
        cfg.seed
    );
    let start = Instant::now();
    let records = with_threads(a.threads, || run_experiment_with(&cfg, Exec::default()))?;
    match &cfg.output {
        Some(path) => {
            write_csv_file(path, &records)?;
            eprintln!(
                "wrote {} records to {} in {:.1}s",
                records.len(),
                path.display(),
                start.elapsed().as_secs_f64()
            );
        }
        None => write_csv(std::io::stdout().lock(), &records)?,
    }
    if a.summary {
        for s in layer_summaries(&records) {
            let curve = match (s.theta, s.sigma) {
                (Some(t), _) => format!("theta={t}"),
                (None, Some(sg)) => format!("sigma={sg}"),
                _ => String::new(),
            };
            let ratio = s
                .ratio
                .map(|r| format!("  ratio {:.6} ± {:.6}", r.mean, r.half_width()))
                .unwrap_or_default();
            eprintln!(
                "{curve} layer {:>4}: F_A {:.6e} ± {:.2e}{ratio}",
                s.layer,
                s.f_a.mean,
                s.f_a.half_width()
            );
        }
        if kind == ExperimentKind::WitnessSweep {
            for p in success_probability(&records, cfg.epsilon, cfg.layers) {
                eprintln!(
                    "theta={} M2={:.6} epsilon={} layers={}: P_suc = {:.4} ({}/{})",
                    p.theta.unwrap_or(f64::NAN),
                    p.m2,
                    p.epsilon,
                    p.max_layers,
                    p.p_suc(),
                    p.successes,
                    p.trials
                );
            }
        }
    }
    Ok(())
}

fn verify(realizations: usize, seed: u64, threads: Option<usize>) -> flatmagic::Result<bool> {
    let start = Instant::now();
    let chk = with_threads(threads, || verify_theorem_n2(realizations, seed, Exec::default()))?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "state  m_lin                 avg_f_a               ratio")?;
    for (i, s) in chk.samples.iter().enumerate() {
        writeln!(out, "{i:>5}  {:.17}  {:.17}  {:.17}", s.m_lin, s.average_f_a, s.ratio)?;
    }
    let golden = c_constant(4, 2, ConstantMode::ExactDerived)?.value;
    writeln!(out, "c(4,2) measured = {:.17}", chk.c_measured)?;
    writeln!(out, "c(4,2) golden   = {golden}")?;
    writeln!(out, "ratio spread    = {:.3e}", chk.spread)?;
    writeln!(out, "stabilizer max  = {:.3e}", chk.stabilizer_max_average)?;
    let ok = chk.spread <= 1e-10
        && chk.stabilizer_max_average <= 1e-12
        && (chk.c_measured - golden).abs() <= 1e-10;
    writeln!(out, "consistent      = {ok}")?;
    eprintln!("verify-theorem-n2: {:.1}s", start.elapsed().as_secs_f64());
    Ok(ok)
}

fn magic(a: &MagicArgs) -> flatmagic::Result<()> {
    let (state, thetas) = match a.state {
        StateArg::Toric => (toric_code_ground_state(a.toric_lx, a.toric_ly)?, None),
        StateArg::Plus => {
            let n = a.n.ok_or_else(|| Error::Config {
                field: "n".into(),
                message: "required for the |+⟩ state".into(),
            })?;
            (PureState::plus(n)?, Some(vec![0.0; n]))
        }
        StateArg::Product => {
            let given = a.theta.clone().ok_or_else(|| Error::Config {
                field: "theta".into(),
                message: "required for a product state".into(),
            })?;
            let n = a.n.unwrap_or(given.len());
            let thetas = match given.len() {
                1 => vec![given[0]; n],
                len if len == n => given,
                len => {
                    return Err(Error::Config {
                        field: "theta".into(),
                        message: format!("expected 1 or {n} angles, got {len}"),
                    })
                }
            };
            (PureState::product(&thetas)?, Some(thetas))
        }
    };
    let n = state.num_qubits();
    let m_lin = match (&thetas, n <= DEFAULT_SWEEP_CAP) {
        (_, true) => PauliSweep::default().stabilizer_linear_entropy(&state)?,
        (Some(t), false) => product_mlin(t),
        (None, false) => {
            return Err(Error::Capacity {
                what: "Pauli sweep",
                got: n,
                cap: DEFAULT_SWEEP_CAP,
            })
        }
    };
    let m2 = m2_from_mlin(m_lin)?;
    println!("n     = {n}");
    println!("M_lin = {m_lin:.17}");
    println!("M_2   = {m2:.17}");
    if n >= 2 {
        let spec = PartitionSpec::parse(a.partition.as_deref().unwrap_or("half"))?;
        let part = spec.resolve(n)?;
        println!("F_A   = {:.17}  (A = {:?})", anti_flatness(&state, &part)?, part.subsystem());
    } else {
        println!("F_A   = n/a  (single qubit has no bipartition)");
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    if e.is_capacity() {
        3
    } else {
        match e {
            Error::Config { .. }
            | Error::Validation(_)
            | Error::Domain { .. }
            | Error::Partition(_)
            | Error::Index(_) => 2,
            _ => 1,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::VerifyTheoremN2 {
            realizations,
            seed,
            threads,
        } => match verify(*realizations, *seed, *threads) {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::from(1),
            Err(e) => Err(e),
        },
        Command::Magic(a) => magic(a),
        Command::OrbitAverage(a)
        | Command::RatioTrace(a)
        | Command::WitnessSweep(a)
        | Command::NoiseScan(a)
        | Command::ToricNoise(a) => run(kind_of(&cli.command).expect("experiment"), a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
