//! Seeded Monte Carlo experiments over random brickwork Clifford circuits.
//!
//! Every experiment is a grid of independent tasks, one per (curve,
//! realization). Realization `r` draws all of its randomness from
//! `SeedTree::new(master_seed).child(r)`, shared by every curve of the run,
//! so curves at different `θ` or `σ` see the same Clifford skeletons.
//! Records come back sorted by `(realization, layer)` with curve order as
//! the tie-break, independent of the execution strategy.

pub mod config;
pub mod output;
pub mod stats;

use serde::{Deserialize, Serialize};

use crate::clifford::{CircuitSpec, GateMode};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::pauli::product_mlin;
use crate::seed::{role, SeedTree};
use crate::stabilizer::{
    best_c_constant, enumerate_stabilizer_states, exhaustive_clifford_average_with, ConstantMode,
    FlatnessConstant, ToricCode,
};
use crate::statevec::{anti_flatness, Bipartition, PureState};

pub use config::{
    parse_config, ExperimentConfig, ExperimentKind, InitialState, PartitionKeyword, PartitionSpec,
    WitnessMode,
};
pub use output::{read_csv, write_csv, write_csv_file, CSV_HEADER};
pub use stats::{
    layer_summaries, plateau_ratio, success_probability, Estimate, LayerSummary, SuccessPoint,
};

/// Below this the initial linear entropy counts as zero and no ratio is formed.
pub const MLIN_FLOOR: f64 = 1e-12;

/// One sample: `F_A` after `layer` layers of realization `realization`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub kind: ExperimentKind,
    pub n: usize,
    pub theta: Option<f64>,
    pub sigma: Option<f64>,
    pub layer: usize,
    pub realization: usize,
    pub seed: u64,
    pub f_a: f64,
    pub m_lin_initial: f64,
    pub ratio: Option<f64>,
    pub witness_fired: Option<bool>,
    /// Which `c(d, d_A)` formed the ratio. Not part of the CSV.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_mode: Option<ConstantMode>,
}

/// Seed stream of realization `r`.
pub fn realization_seeds(master_seed: u64, r: usize) -> SeedTree {
    SeedTree::new(master_seed).child(r as u64)
}

/// Parameters of the witness loop.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WitnessParams {
    pub epsilon: f64,
    pub max_layers: usize,
    pub mode: WitnessMode,
    pub gate_mode: GateMode,
}

impl WitnessParams {
    pub fn new(epsilon: f64, max_layers: usize) -> Self {
        WitnessParams {
            epsilon,
            max_layers,
            mode: WitnessMode::Incremental,
            gate_mode: GateMode::Uniform,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::config("epsilon", format!("must be > 0, got {}", self.epsilon)));
        }
        if self.max_layers == 0 {
            return Err(Error::config("layers", "witness needs at least one layer"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WitnessOutcome {
    pub fired: bool,
    /// Layers applied before the loop stopped.
    pub layers_used: usize,
    /// Largest `F_A` seen.
    pub max_f_a: f64,
}

/// Stabilizer witness on the half cut: `fired` is true as soon as `F_A > ε`
/// after some layer, false if `max_layers` layers never exceed it.
pub fn witness(
    state: &PureState,
    epsilon: f64,
    max_layers: usize,
    seeds: SeedTree,
) -> Result<WitnessOutcome> {
    let part = Bipartition::half(state.num_qubits())?;
    witness_with(state, &part, WitnessParams::new(epsilon, max_layers), seeds)
}

pub fn witness_with(
    state: &PureState,
    part: &Bipartition,
    params: WitnessParams,
    seeds: SeedTree,
) -> Result<WitnessOutcome> {
    params.validate()?;
    let mut max_f_a: f64 = 0.0;
    let mut trajectory = Trajectory::new(state, part, params.mode, params.gate_mode, seeds);
    for k in 1..=params.max_layers {
        let f = trajectory.advance_to(k)?;
        max_f_a = max_f_a.max(f);
        if f > params.epsilon {
            return Ok(WitnessOutcome {
                fired: true,
                layers_used: k,
                max_f_a,
            });
        }
    }
    Ok(WitnessOutcome {
        fired: false,
        layers_used: params.max_layers,
        max_f_a,
    })
}

/// `F_A` after successive depths, either along one extended circuit or with
/// a fresh circuit per depth.
struct Trajectory<'a> {
    initial: &'a PureState,
    current: PureState,
    part: &'a Bipartition,
    mode: WitnessMode,
    spec: CircuitSpec,
    seeds: SeedTree,
    depth: usize,
}

impl<'a> Trajectory<'a> {
    fn new(
        initial: &'a PureState,
        part: &'a Bipartition,
        mode: WitnessMode,
        gate_mode: GateMode,
        seeds: SeedTree,
    ) -> Self {
        let n = initial.num_qubits();
        Trajectory {
            initial,
            current: initial.clone(),
            part,
            mode,
            spec: CircuitSpec::new(n, 0, seeds.value()).with_mode(gate_mode),
            seeds,
            depth: 0,
        }
    }

    /// `F_A` after depth `k`; incremental mode requires `k = depth + 1`.
    fn advance_to(&mut self, k: usize) -> Result<f64> {
        match self.mode {
            WitnessMode::Incremental => {
                debug_assert_eq!(k, self.depth + 1);
                self.current.apply_all(&self.spec.layer(self.depth)?)?;
            }
            WitnessMode::Fresh => {
                let fresh = self.seeds.child(role::FRESH_CIRCUIT).child(k as u64);
                let spec = CircuitSpec {
                    master_seed: fresh.value(),
                    ..self.spec.clone()
                };
                self.current = self.initial.clone();
                for j in 0..k {
                    self.current.apply_all(&spec.layer(j)?)?;
                }
            }
        }
        self.depth = k;
        anti_flatness(&self.current, self.part)
    }
}

/// One curve of an experiment: a fixed initial state and noise strength.
struct Curve {
    theta: Option<f64>,
    sigma: Option<f64>,
    initial: PureState,
    m_lin: f64,
}

struct Plan<'a> {
    cfg: &'a ExperimentConfig,
    n: usize,
    part: Bipartition,
    c: FlatnessConstant,
    curves: Vec<Curve>,
}

impl<'a> Plan<'a> {
    fn new(cfg: &'a ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let n = cfg.num_qubits()?;
        let part = cfg.bipartition()?;
        let c = best_c_constant(1 << n, part.dim_a() as u64)?;
        let sigmas: Vec<Option<f64>> = match cfg.kind {
            ExperimentKind::NoiseScan | ExperimentKind::ToricNoise => {
                cfg.sigmas.iter().map(|&s| Some(s)).collect()
            }
            _ => vec![None],
        };
        let mut curves = Vec::new();
        match cfg.initial() {
            InitialState::Product => {
                for &t in &cfg.thetas {
                    let thetas = vec![t; n];
                    let initial = PureState::product(&thetas)?;
                    for &sigma in &sigmas {
                        curves.push(Curve {
                            theta: Some(t),
                            sigma,
                            initial: initial.clone(),
                            m_lin: product_mlin(&thetas),
                        });
                    }
                }
            }
            InitialState::Plus | InitialState::Toric => {
                let initial = if cfg.initial() == InitialState::Plus {
                    PureState::plus(n)?
                } else {
                    ToricCode::new(cfg.toric_lx, cfg.toric_ly)?.ground_state()?
                };
                for &sigma in &sigmas {
                    curves.push(Curve {
                        theta: None,
                        sigma,
                        initial: initial.clone(),
                        m_lin: 0.0,
                    });
                }
            }
        }
        Ok(Plan {
            cfg,
            n,
            part,
            c,
            curves,
        })
    }

    fn record(&self, curve: &Curve, r: usize, seed: u64, layer: usize, f_a: f64) -> RunRecord {
        let has_ratio = curve.m_lin > MLIN_FLOOR;
        RunRecord {
            kind: self.cfg.kind,
            n: self.n,
            theta: curve.theta,
            sigma: curve.sigma,
            layer,
            realization: r,
            seed,
            f_a,
            m_lin_initial: curve.m_lin,
            ratio: has_ratio.then(|| f_a / (self.c.value * curve.m_lin)),
            witness_fired: None,
            c_mode: has_ratio.then_some(self.c.mode),
        }
    }

    fn realization(&self, curve: &Curve, r: usize) -> Result<Vec<RunRecord>> {
        let cfg = self.cfg;
        let seeds = realization_seeds(cfg.seed, r);
        let seed = seeds.value();
        let layers = cfg.layers;
        let mut out = Vec::with_capacity(layers + 1);

        if cfg.kind == ExperimentKind::WitnessSweep {
            let mut trajectory =
                Trajectory::new(&curve.initial, &self.part, cfg.witness_mode, cfg.gate_mode, seeds);
            let mut running_max: f64 = 0.0;
            for k in 1..=layers {
                let f = trajectory.advance_to(k)?;
                running_max = running_max.max(f);
                let mut rec = self.record(curve, r, seed, k, f);
                rec.witness_fired = Some(running_max > cfg.epsilon);
                out.push(rec);
            }
            return Ok(out);
        }

        let prep = if cfg.kind == ExperimentKind::RatioTrace {
            cfg.prep_layers
        } else {
            0
        };
        let spec = CircuitSpec::new(self.n, prep + layers, seed)
            .with_noise(curve.sigma.unwrap_or(0.0))
            .with_mode(cfg.gate_mode);
        spec.validate()?;
        let mut state = curve.initial.clone();
        for k in 0..prep {
            state.apply_all(&spec.layer(k)?)?;
        }
        out.push(self.record(curve, r, seed, 0, anti_flatness(&state, &self.part)?));
        for j in 0..layers {
            state.apply_all(&spec.layer(prep + j)?)?;
            out.push(self.record(curve, r, seed, j + 1, anti_flatness(&state, &self.part)?));
        }
        Ok(out)
    }
}

/// Runs any experiment kind with the default execution strategy.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    run_experiment_with(cfg, Exec::default())
}

pub fn run_experiment_with(cfg: &ExperimentConfig, exec: Exec) -> Result<Vec<RunRecord>> {
    let plan = Plan::new(cfg)?;
    let reals = cfg.realizations;
    let tasks = plan.curves.len() * reals;
    let chunks = exec.map(0..tasks, |t| plan.realization(&plan.curves[t / reals], t % reals));
    let mut records = Vec::with_capacity(tasks * (cfg.layers + 1));
    for chunk in chunks {
        records.extend(chunk?);
    }
    // stable: curves keep their config order within a (realization, layer) slot
    records.sort_by_key(|rec| (rec.realization, rec.layer));
    Ok(records)
}

fn expect_kind(cfg: &ExperimentConfig, kinds: &[ExperimentKind]) -> Result<()> {
    if kinds.contains(&cfg.kind) {
        Ok(())
    } else {
        Err(Error::config(
            "kind",
            format!(
                "expected {}, got {}",
                kinds.iter().map(|k| k.name()).collect::<Vec<_>>().join(" or "),
                cfg.kind.name()
            ),
        ))
    }
}

/// Product state evolved by noiseless layers, `F_A` after each.
pub fn orbit_average_trace(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    expect_kind(cfg, &[ExperimentKind::OrbitAverage])?;
    run_experiment(cfg)
}

/// Like [`orbit_average_trace`] after `prep_layers` scrambling layers; layer 0
/// is the scrambled state.
pub fn ratio_trace_volume_law(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    expect_kind(cfg, &[ExperimentKind::RatioTrace])?;
    run_experiment(cfg)
}

/// Full witness trajectories; `witness_fired` at layer `k` is the witness
/// outcome with `max_layers = k` and the configured `ε`.
pub fn success_probability_sweep(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    expect_kind(cfg, &[ExperimentKind::WitnessSweep])?;
    run_experiment(cfg)
}

/// Noise-dressed circuits from `|+⟩^{⊗n}` or the toric-code ground state.
pub fn noise_scan(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    expect_kind(cfg, &[ExperimentKind::NoiseScan, ExperimentKind::ToricNoise])?;
    run_experiment(cfg)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TheoremSample {
    pub m_lin: f64,
    pub average_f_a: f64,
    pub ratio: f64,
}

/// Exhaustive two-qubit check of `F̄_A ∝ M_lin`.
#[derive(Clone, Debug, PartialEq)]
pub struct TheoremCheck {
    pub samples: Vec<TheoremSample>,
    /// Mean of the per-state ratios.
    pub c_measured: f64,
    /// `max |ratio − c_measured|`.
    pub spread: f64,
    /// Largest orbit average over the 60 two-qubit stabilizer states.
    pub stabilizer_max_average: f64,
}

/// Averages `F_A` over all 11520 two-qubit Cliffords for `num_states` Haar
/// random states (stream `seed / TEST_STATE / i`) and every stabilizer state.
pub fn verify_theorem_n2(num_states: usize, seed: u64, exec: Exec) -> Result<TheoremCheck> {
    if num_states == 0 {
        return Err(Error::config("realizations", "need at least one test state"));
    }
    let base = SeedTree::new(seed).child(role::TEST_STATE);
    let mut samples = Vec::with_capacity(num_states);
    for i in 0..num_states {
        let state = PureState::random(2, &mut base.child(i as u64).rng())?;
        let m_lin = crate::pauli::stabilizer_linear_entropy(&state)?;
        let average_f_a = exhaustive_clifford_average_with(&state, exec)?;
        samples.push(TheoremSample {
            m_lin,
            average_f_a,
            ratio: average_f_a / m_lin,
        });
    }
    let c_measured = samples.iter().map(|s| s.ratio).sum::<f64>() / num_states as f64;
    let spread = samples
        .iter()
        .map(|s| (s.ratio - c_measured).abs())
        .fold(0.0, f64::max);
    let mut stabilizer_max_average: f64 = 0.0;
    for s in enumerate_stabilizer_states(2)?.states() {
        stabilizer_max_average = stabilizer_max_average.max(exhaustive_clifford_average_with(s, exec)?);
    }
    Ok(TheoremCheck {
        samples,
        c_measured,
        spread,
        stabilizer_max_average,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orbit(n: usize, thetas: Vec<f64>, layers: usize, reals: usize) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(ExperimentKind::OrbitAverage);
        cfg.n = Some(n);
        cfg.thetas = thetas;
        cfg.layers = layers;
        cfg.realizations = reals;
        cfg.seed = 11;
        cfg
    }

    #[test]
    fn records_sorted_and_complete() {
        let cfg = orbit(4, vec![0.0, 0.5], 3, 4);
        let recs = run_experiment(&cfg).unwrap();
        assert_eq!(recs.len(), 2 * 4 * 4);
        for w in recs.windows(2) {
            assert!((w[0].realization, w[0].layer) <= (w[1].realization, w[1].layer));
        }
        assert!(recs.iter().all(|r| r.f_a >= -1e-12));
        for r in recs.iter().filter(|r| r.theta == Some(0.0)) {
            assert!(r.f_a < 1e-10);
            assert_eq!(r.ratio, None);
        }
        assert!(recs.iter().filter(|r| r.theta == Some(0.5)).all(|r| r.ratio.is_some()));
    }

    #[test]
    fn strategies_agree_bitwise() {
        let cfg = orbit(5, vec![0.3, 0.785], 4, 6);
        let a = run_experiment_with(&cfg, Exec::Sequential).unwrap();
        let b = run_experiment_with(&cfg, Exec::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn curves_share_circuits() {
        // θ = 0 and θ = 0.4 use identical realization seeds
        let recs = run_experiment(&orbit(4, vec![0.0, 0.4], 2, 3)).unwrap();
        for r in 0..3 {
            let seeds: Vec<u64> = recs.iter().filter(|x| x.realization == r).map(|x| x.seed).collect();
            assert!(seeds.iter().all(|&s| s == seeds[0]));
        }
    }

    #[test]
    fn sweep_matches_standalone_witness() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::WitnessSweep);
        cfg.n = Some(4);
        cfg.thetas = vec![0.785];
        cfg.layers = 6;
        cfg.realizations = 5;
        cfg.epsilon = 0.02;
        cfg.seed = 3;
        for mode in [WitnessMode::Incremental, WitnessMode::Fresh] {
            cfg.witness_mode = mode;
            let recs = run_experiment(&cfg).unwrap();
            let state = PureState::product(&[0.785; 4]).unwrap();
            let part = Bipartition::half(4).unwrap();
            for rec in &recs {
                let params = WitnessParams {
                    mode,
                    ..WitnessParams::new(cfg.epsilon, rec.layer)
                };
                let out =
                    witness_with(&state, &part, params, realization_seeds(3, rec.realization))
                        .unwrap();
                assert_eq!(Some(out.fired), rec.witness_fired);
            }
        }
    }

    #[test]
    fn witness_rejects_bad_parameters() {
        let s = PureState::zero(2).unwrap();
        assert!(matches!(
            witness(&s, 0.0, 3, SeedTree::new(0)),
            Err(Error::Config { ref field, .. }) if field == "epsilon"
        ));
        assert!(witness(&s, 0.1, 0, SeedTree::new(0)).is_err());
        assert!(!witness(&s, 1e-9, 20, SeedTree::new(0)).unwrap().fired);
    }

    #[test]
    fn ratio_trace_starts_scrambled() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::RatioTrace);
        cfg.n = Some(4);
        cfg.thetas = vec![0.785];
        cfg.prep_layers = 20;
        cfg.layers = 2;
        cfg.realizations = 2;
        let recs = run_experiment(&cfg).unwrap();
        assert!(recs.iter().filter(|r| r.layer == 0).all(|r| r.f_a > 0.0));
    }

    #[test]
    fn noise_scan_zero_sigma_stays_flat() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::NoiseScan);
        cfg.n = Some(4);
        cfg.sigmas = vec![0.0, 0.05];
        cfg.layers = 5;
        cfg.realizations = 3;
        let recs = noise_scan(&cfg).unwrap();
        assert!(recs
            .iter()
            .filter(|r| r.sigma == Some(0.0))
            .all(|r| r.f_a < 1e-10));
        assert!(recs
            .iter()
            .filter(|r| r.sigma == Some(0.05) && r.layer == 5)
            .any(|r| r.f_a > 1e-8));
        assert!(orbit_average_trace(&cfg).is_err());
    }
}
