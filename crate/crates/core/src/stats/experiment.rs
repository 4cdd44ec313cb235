//! Seeded Monte Carlo harness for the concentration statistics.

use std::io::{self, Write};

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{
    count_mz, coverage, expected_g_tau_table, island_choice_exponent, SuffixSizeHistogram,
};
use crate::assembly::true_ordering;
use crate::channel::{random_codeword, transmit_codeword, ChannelOutput, ChannelParams};
use crate::error::ChannelError;
use crate::par::{map_range, Execution, KahanSum};
use crate::seed::{Seeder, Stage};
use crate::tritstring::TritString;

/// How the unerased size of each probe `z` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MzTarget {
    /// Exactly this many unerased symbols.
    Size(usize),
    /// `round(tau log n)` unerased symbols.
    Tau(f64),
    /// Uniform over `[min, max]`.
    Uniform { min: usize, max: usize },
}

impl MzTarget {
    fn draw<R: Rng + ?Sized>(&self, params: &ChannelParams, rng: &mut R) -> usize {
        let s = match *self {
            MzTarget::Size(s) => s,
            MzTarget::Tau(tau) => (tau * params.log_n()).round() as usize,
            MzTarget::Uniform { min, max } => rng.gen_range(min..=max.max(min)),
        };
        s.min(params.read_len)
    }
}

/// One `M_z` probe. `z` is a length-`L` prefix of a random read with some of
/// its unerased symbols re-erased so that exactly `size` remain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MzSample {
    pub size: usize,
    pub tau_ue: f64,
    /// Erased reads compatible with `z`.
    pub observed: usize,
    /// Pre-erasure read windows compatible with `z`.
    pub clean: usize,
    /// `K n^{-tau_ue} = K 2^{-size}`.
    pub predicted_clean: f64,
    /// `K ((1 + delta) / 2)^size`, the mean count against erased reads.
    pub predicted_observed: f64,
}

fn probe_mz<R: Rng + ?Sized>(output: &ChannelOutput, target: MzTarget, rng: &mut R) -> MzSample {
    let params = output.params();
    let reads = output.reads();
    let want = target.draw(params, rng);
    let mut source = &reads[rng.gen_range(0..reads.len())];
    let mut positions = source.unerased_positions();
    for _ in 0..10_000 {
        if positions.len() >= want {
            break;
        }
        source = &reads[rng.gen_range(0..reads.len())];
        positions = source.unerased_positions();
    }
    let size = want.min(positions.len());
    let mut z = TritString::erased(source.len());
    for i in sample(rng, positions.len(), size) {
        let p = positions[i];
        z.set(p, source.get(p));
    }
    let clean = output.clean_reads();
    let k = params.num_reads as f64;
    MzSample {
        size,
        tau_ue: size as f64 / params.log_n(),
        observed: count_mz(reads, &z),
        clean: count_mz(&clean, &z),
        predicted_clean: k * 0.5f64.powi(size as i32),
        predicted_observed: k * ((1.0 + params.delta) / 2.0).powi(size as i32),
    }
}

/// `draws` independent channel uses, one probe `z` each.
pub fn mz_spot_check(
    params: &ChannelParams,
    target: MzTarget,
    draws: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<MzSample>, ChannelError> {
    params.validate()?;
    let root = Seeder::new(seed);
    let out = map_range(draws, exec, |d| {
        let s = root.child(Stage::Probe, d as u64);
        let x = random_codeword(params.n, &mut s.rng(Stage::Codebook, 0));
        let output = transmit_codeword(&x, 0, params, &s)?;
        Ok(probe_mz(&output, target, &mut s.rng(Stage::Probe, 0)))
    });
    out.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationConfig {
    pub params: ChannelParams,
    pub trials: usize,
    pub seed: u64,
    /// Probes of `M_z` per trial.
    pub mz_probes: usize,
    pub mz_target: MzTarget,
}

impl ConcentrationConfig {
    pub fn new(params: ChannelParams, trials: usize, seed: u64) -> Self {
        Self {
            params,
            trials,
            seed,
            mz_probes: 2,
            mz_target: MzTarget::Tau(0.5),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    /// Reads with zero true overlap with their successor (number of true islands).
    pub islands: usize,
    /// Reads whose true merging suffix is empty or fully erased.
    pub zero_suffix: usize,
    pub phi: f64,
    pub phi_v: f64,
    pub histogram: SuffixSizeHistogram,
    /// `max_s |G(s) - Ḡ(s)|`.
    pub g_max_abs_dev: f64,
    pub mz: Vec<MzSample>,
}

/// Sample mean with standard error against a predicted value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
    pub predicted: f64,
    pub rel_dev: f64,
}

impl Estimate {
    pub fn from_samples(xs: &[f64], predicted: f64) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().copied().collect::<KahanSum>().total() / n;
        let var = if xs.len() > 1 {
            xs.iter()
                .map(|x| (x - mean) * (x - mean))
                .collect::<KahanSum>()
                .total()
                / (n - 1.0)
        } else {
            0.0
        };
        Self {
            mean,
            std_err: (var / n).sqrt(),
            predicted,
            rel_dev: rel_dev(mean, predicted),
        }
    }
}

fn rel_dev(x: f64, reference: f64) -> f64 {
    if reference == 0.0 {
        if x == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        ((x - reference) / reference).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GTauRow {
    pub size: usize,
    pub tau: f64,
    pub estimate: Estimate,
    pub max_abs_dev: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MzSummary {
    pub draws: usize,
    pub mean_size: f64,
    pub clean: Estimate,
    pub observed: Estimate,
    /// Largest per-draw relative deviation of the clean count.
    pub worst_rel_dev: f64,
}

impl MzSummary {
    pub fn from_samples(samples: &[MzSample]) -> Self {
        let mean = |f: &dyn Fn(&MzSample) -> f64| {
            samples.iter().map(f).collect::<KahanSum>().total() / samples.len().max(1) as f64
        };
        let clean: Vec<f64> = samples.iter().map(|s| s.clean as f64).collect();
        let observed: Vec<f64> = samples.iter().map(|s| s.observed as f64).collect();
        let pred_clean = mean(&|s| s.predicted_clean);
        let pred_obs = mean(&|s| s.predicted_observed);
        Self {
            draws: samples.len(),
            mean_size: mean(&|s| s.size as f64),
            clean: Estimate::from_samples(&clean, pred_clean),
            observed: Estimate::from_samples(&observed, pred_obs),
            worst_rel_dev: samples
                .iter()
                .map(|s| rel_dev(s.clean as f64, s.predicted_clean))
                .fold(0.0, f64::max),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationSummary {
    pub config: ConcentrationConfig,
    pub coverage_depth: f64,
    /// `K'/K` against `e^{-c}`.
    pub islands_ratio: Estimate,
    /// Zero-size suffixes per read against `Ḡ(0)/K`.
    pub zero_suffix_ratio: Estimate,
    /// `Phi` against `1 - e^{-c}`.
    pub phi: Estimate,
    /// `Phi_v` against `1 - e^{-c(1 - delta)}`.
    pub phi_v: Estimate,
    pub g_tau: Vec<GTauRow>,
    pub mz: MzSummary,
    /// Finite-`n` island-choice exponent from the exact `Ḡ`.
    pub island_choice_exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub summary: ConcentrationSummary,
    pub trials: Vec<TrialRecord>,
}

impl ConcentrationReport {
    pub const CSV_HEADER: &'static str =
        "trial,islands,islands_ratio,zero_suffix,phi,phi_v,g_max_abs_dev,mz_mean_observed,mz_mean_clean";

    /// One row per trial.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        let k = self.summary.config.params.num_reads as f64;
        for t in &self.trials {
            let m = t.mz.len().max(1) as f64;
            let obs = t.mz.iter().map(|s| s.observed as f64).sum::<f64>() / m;
            let clean = t.mz.iter().map(|s| s.clean as f64).sum::<f64>() / m;
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                t.trial,
                t.islands,
                t.islands as f64 / k,
                t.zero_suffix,
                t.phi,
                t.phi_v,
                t.g_max_abs_dev,
                obs,
                clean
            )?;
        }
        Ok(())
    }
}

fn run_trial(
    config: &ConcentrationConfig,
    g_bar: &[f64],
    root: &Seeder,
    trial: usize,
) -> Result<TrialRecord, ChannelError> {
    let params = &config.params;
    let s = root.child(Stage::Trial, trial as u64);
    let x = random_codeword(params.n, &mut s.rng(Stage::Codebook, 0));
    let output = transmit_codeword(&x, 0, params, &s)?;
    let truth = true_ordering(&output);
    let islands = truth.overlaps.iter().filter(|&&l| l == 0).count();
    let histogram = SuffixSizeHistogram::from_sizes(&truth.suffix_sizes, params.read_len);
    let g_max_abs_dev = histogram
        .counts
        .iter()
        .zip(g_bar)
        .map(|(&g, &e)| (g as f64 - e).abs())
        .fold(0.0, f64::max);
    let cov = coverage(&output);
    let mut rng = s.rng(Stage::Probe, 0);
    let mz = (0..config.mz_probes)
        .map(|_| probe_mz(&output, config.mz_target, &mut rng))
        .collect();
    Ok(TrialRecord {
        trial,
        islands,
        zero_suffix: histogram.counts[0],
        phi: cov.phi,
        phi_v: cov.phi_v,
        histogram,
        g_max_abs_dev,
        mz,
    })
}

/// Runs `config.trials` independent channel uses and aggregates them. The
/// result depends only on the configuration, not on the execution mode or
/// thread count.
pub fn concentration_experiment(
    config: &ConcentrationConfig,
    exec: Execution,
) -> Result<ConcentrationReport, ChannelError> {
    let params = &config.params;
    params.validate()?;
    if config.trials == 0 {
        return Err(ChannelError::InvalidParams(
            "trials must be at least 1".into(),
        ));
    }
    let g_bar = expected_g_tau_table(params);
    let root = Seeder::new(config.seed);
    let trials = map_range(config.trials, exec, |t| run_trial(config, &g_bar, &root, t))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;

    let k = params.num_reads as f64;
    let c = params.coverage_depth();
    let delta = params.delta;
    let col = |f: &dyn Fn(&TrialRecord) -> f64| trials.iter().map(f).collect::<Vec<f64>>();
    let g_tau = (0..=params.read_len)
        .map(|s| GTauRow {
            size: s,
            tau: s as f64 / params.log_n(),
            estimate: Estimate::from_samples(&col(&|t| t.histogram.counts[s] as f64), g_bar[s]),
            max_abs_dev: trials
                .iter()
                .map(|t| (t.histogram.counts[s] as f64 - g_bar[s]).abs())
                .fold(0.0, f64::max),
        })
        .collect();
    let mz_samples: Vec<MzSample> = trials.iter().flat_map(|t| t.mz.iter().cloned()).collect();
    let summary = ConcentrationSummary {
        config: config.clone(),
        coverage_depth: c,
        islands_ratio: Estimate::from_samples(&col(&|t| t.islands as f64 / k), (-c).exp()),
        zero_suffix_ratio: Estimate::from_samples(
            &col(&|t| t.zero_suffix as f64 / k),
            g_bar[0] / k,
        ),
        phi: Estimate::from_samples(&col(&|t| t.phi), 1.0 - (-c).exp()),
        phi_v: Estimate::from_samples(&col(&|t| t.phi_v), 1.0 - (-c * (1.0 - delta)).exp()),
        g_tau,
        mz: MzSummary::from_samples(&mz_samples),
        island_choice_exponent: island_choice_exponent(params),
    };
    Ok(ConcentrationReport { summary, trials })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replay_is_schedule_independent() {
        let p = ChannelParams::new(2000, 22, 180, 0.2).unwrap();
        let cfg = ConcentrationConfig::new(p, 6, 17);
        let a = concentration_experiment(&cfg, Execution::Sequential).unwrap();
        let b = concentration_experiment(&cfg, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        let mut csv = Vec::new();
        a.write_csv(&mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 7);
    }

    #[test]
    fn trial_invariants() {
        let p = ChannelParams::new(500, 12, 90, 0.3).unwrap();
        let r = concentration_experiment(&ConcentrationConfig::new(p, 4, 3), Execution::Sequential)
            .unwrap();
        for t in &r.trials {
            assert!(t.phi_v <= t.phi && t.phi <= 1.0);
            assert_eq!(t.histogram.total(), 90);
            assert!(t.zero_suffix >= t.islands);
            for m in &t.mz {
                assert!(m.observed >= m.clean);
                assert!(m.clean >= 1);
            }
        }
    }

    #[test]
    fn zero_trials_rejected() {
        let p = ChannelParams::new(50, 5, 10, 0.0).unwrap();
        assert!(concentration_experiment(
            &ConcentrationConfig::new(p, 0, 1),
            Execution::Sequential
        )
        .is_err());
    }

    #[test]
    fn probe_sizes() {
        let p = ChannelParams::new(4096, 24, 400, 0.2).unwrap();
        let s = mz_spot_check(&p, MzTarget::Size(6), 5, 9, Execution::Sequential).unwrap();
        assert!(s
            .iter()
            .all(|m| m.size == 6 && (m.predicted_clean - 400.0 / 64.0).abs() < 1e-12));
    }
}
