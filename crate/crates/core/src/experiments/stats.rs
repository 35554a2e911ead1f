//! Aggregates over realizations: normal-approximation 95% intervals and
//! witness success probabilities.

use std::ops::RangeInclusive;

use crate::pauli::m2_from_mlin;

use super::RunRecord;

/// z-value of a two-sided 95% normal interval.
pub const Z95: f64 = 1.96;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    /// Standard error of the mean (sample standard deviation over √count).
    pub std_err: f64,
    pub count: usize,
}

impl Estimate {
    pub fn from_samples(samples: &[f64]) -> Self {
        let count = samples.len();
        if count == 0 {
            return Estimate {
                mean: f64::NAN,
                std_err: f64::NAN,
                count,
            };
        }
        let mean = samples.iter().sum::<f64>() / count as f64;
        let std_err = if count > 1 {
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
            (var / count as f64).sqrt()
        } else {
            0.0
        };
        Estimate {
            mean,
            std_err,
            count,
        }
    }

    pub fn half_width(&self) -> f64 {
        Z95 * self.std_err
    }

    pub fn lower(&self) -> f64 {
        self.mean - self.half_width()
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.half_width()
    }
}

fn same(a: Option<f64>, b: Option<f64>) -> bool {
    a.map(f64::to_bits) == b.map(f64::to_bits)
}

/// Per-curve, per-layer statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerSummary {
    pub theta: Option<f64>,
    pub sigma: Option<f64>,
    pub layer: usize,
    pub f_a: Estimate,
    pub max_f_a: f64,
    pub ratio: Option<Estimate>,
}

/// Curves in order of first appearance, layers ascending.
pub fn layer_summaries(records: &[RunRecord]) -> Vec<LayerSummary> {
    let mut curves: Vec<(Option<f64>, Option<f64>)> = Vec::new();
    for r in records {
        if !curves.iter().any(|&(t, s)| same(t, r.theta) && same(s, r.sigma)) {
            curves.push((r.theta, r.sigma));
        }
    }
    let mut out = Vec::new();
    for (theta, sigma) in curves {
        let mine: Vec<&RunRecord> = records
            .iter()
            .filter(|r| same(r.theta, theta) && same(r.sigma, sigma))
            .collect();
        let mut layers: Vec<usize> = mine.iter().map(|r| r.layer).collect();
        layers.sort_unstable();
        layers.dedup();
        for layer in layers {
            let at: Vec<&&RunRecord> = mine.iter().filter(|r| r.layer == layer).collect();
            let f: Vec<f64> = at.iter().map(|r| r.f_a).collect();
            let ratios: Vec<f64> = at.iter().filter_map(|r| r.ratio).collect();
            out.push(LayerSummary {
                theta,
                sigma,
                layer,
                f_a: Estimate::from_samples(&f),
                max_f_a: f.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                ratio: (!ratios.is_empty()).then(|| Estimate::from_samples(&ratios)),
            });
        }
    }
    out
}

/// Ratio averaged over `layers` within each realization, then across
/// realizations, for the curve at `theta`.
pub fn plateau_ratio(
    records: &[RunRecord],
    theta: f64,
    layers: RangeInclusive<usize>,
) -> Option<Estimate> {
    let mut per_real: Vec<(usize, f64, usize)> = Vec::new();
    for r in records {
        if !same(r.theta, Some(theta)) || !layers.contains(&r.layer) {
            continue;
        }
        let Some(ratio) = r.ratio else { continue };
        match per_real.iter_mut().find(|e| e.0 == r.realization) {
            Some(e) => {
                e.1 += ratio;
                e.2 += 1;
            }
            None => per_real.push((r.realization, ratio, 1)),
        }
    }
    if per_real.is_empty() {
        return None;
    }
    let means: Vec<f64> = per_real.iter().map(|&(_, s, c)| s / c as f64).collect();
    Some(Estimate::from_samples(&means))
}

/// `P_Suc` of one witness-sweep curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuccessPoint {
    pub theta: Option<f64>,
    /// Stabilizer 2-Rényi entropy of the input, from its linear entropy.
    pub m2: f64,
    pub epsilon: f64,
    pub max_layers: usize,
    pub successes: usize,
    pub trials: usize,
}

impl SuccessPoint {
    pub fn p_suc(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }

    /// Binomial standard error.
    pub fn std_err(&self) -> f64 {
        let p = self.p_suc();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

/// Witness success probability at threshold `epsilon` and depth budget
/// `max_layers`, read off full witness-sweep trajectories: a realization
/// succeeds if some layer `1..=max_layers` has `F_A > ε`.
pub fn success_probability(
    records: &[RunRecord],
    epsilon: f64,
    max_layers: usize,
) -> Vec<SuccessPoint> {
    let mut out: Vec<(SuccessPoint, Vec<(usize, bool)>)> = Vec::new();
    for r in records {
        if r.layer == 0 || r.layer > max_layers {
            continue;
        }
        let fired = r.f_a > epsilon;
        let idx = match out.iter().position(|(p, _)| same(p.theta, r.theta)) {
            Some(i) => i,
            None => {
                out.push((
                    SuccessPoint {
                        theta: r.theta,
                        m2: m2_from_mlin(r.m_lin_initial).unwrap_or(f64::INFINITY),
                        epsilon,
                        max_layers,
                        successes: 0,
                        trials: 0,
                    },
                    Vec::new(),
                ));
                out.len() - 1
            }
        };
        let reals = &mut out[idx].1;
        match reals.iter_mut().find(|e| e.0 == r.realization) {
            Some(e) => e.1 |= fired,
            None => reals.push((r.realization, fired)),
        }
    }
    out.into_iter()
        .map(|(mut p, reals)| {
            p.trials = reals.len();
            p.successes = reals.iter().filter(|e| e.1).count();
            p
        })
        .collect()
}
