//! Coverage, visibility and suffix-size statistics, the exact `Ḡ` oracle,
//! Bernoulli tail bounds and the Monte Carlo concentration harness.

mod experiment;
mod hoeffding;
mod oracle;

pub use experiment::{
    concentration_experiment, mz_spot_check, ConcentrationConfig, ConcentrationReport,
    ConcentrationSummary, Estimate, GTauRow, MzSample, MzSummary, MzTarget, TrialRecord,
};
pub use hoeffding::{hoeffding_one_sided, hoeffding_two_sided};
pub use oracle::{
    expected_g_tau, expected_g_tau_exact, expected_g_tau_table, expected_overlap_counts,
    expected_suffix_sizes, island_choice_exponent, OracleScalar,
};

use serde::{Deserialize, Serialize};

use crate::assembly::true_ordering;
use crate::channel::{ChannelOutput, ChannelParams};
use crate::tritstring::{windows_compatible, TritString};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    /// Fraction of codeword positions covered by at least one read.
    pub phi: f64,
    /// Fraction covered and unerased in at least one covering read.
    pub phi_v: f64,
}

pub fn coverage(output: &ChannelOutput) -> CoverageReport {
    let params = output.params();
    let n = params.n;
    // bit 0: covered, bit 1: visible
    let mut flags = vec![0u8; n];
    for (read, &start) in output.reads().iter().zip(&output.truth().starts) {
        for j in 0..read.len() {
            let pos = (start + j) % n;
            flags[pos] |= if read.get(j).is_erased() { 1 } else { 3 };
        }
    }
    let covered = flags.iter().filter(|&&f| f & 1 != 0).count();
    let visible = flags.iter().filter(|&&f| f & 2 != 0).count();
    CoverageReport {
        phi: covered as f64 / n as f64,
        phi_v: visible as f64 / n as f64,
    }
}

/// Number of reads whose `|z|`-prefix is compatible with `z`.
pub fn count_mz(reads: &[TritString], z: &TritString) -> usize {
    let l = z.len();
    reads
        .iter()
        .filter(|y| y.len() >= l && windows_compatible(y, 0, z, 0, l))
        .count()
}

/// Counts of true merging-suffix sizes; `counts[s]` is the number of reads of
/// size `s`, for `s = 0..=L`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuffixSizeHistogram {
    pub counts: Vec<usize>,
}

impl SuffixSizeHistogram {
    pub fn from_sizes(sizes: &[usize], read_len: usize) -> Self {
        let mut counts = vec![0; read_len + 1];
        for &s in sizes {
            counts[s] += 1;
        }
        Self { counts }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn get(&self, size: usize) -> usize {
        self.counts.get(size).copied().unwrap_or(0)
    }
}

pub fn g_tau_histogram(output: &ChannelOutput) -> SuffixSizeHistogram {
    let t = true_ordering(output);
    SuffixSizeHistogram::from_sizes(&t.suffix_sizes, output.params().read_len)
}

/// Thresholds of the four atypical events: too many islands, too little
/// visible coverage, too many reads compatible with some `z`, and a suffix
/// size class far above its mean.
#[derive(Debug, Clone, PartialEq)]
pub struct TypicalityThresholds {
    pub epsilon: f64,
    params: ChannelParams,
    g_bar: Vec<f64>,
}

impl TypicalityThresholds {
    pub fn new(params: ChannelParams, epsilon: f64) -> Self {
        Self {
            epsilon,
            g_bar: expected_g_tau_table(&params),
            params,
        }
    }

    /// `(1 + eps) K e^{-c}`.
    pub fn b1(&self) -> f64 {
        (1.0 + self.epsilon) * self.params.num_reads as f64 * (-self.params.coverage_depth()).exp()
    }

    /// `(1 - eps)(1 - e^{-c(1 - delta)})`.
    pub fn b2(&self) -> f64 {
        let c = self.params.coverage_depth();
        (1.0 - self.epsilon) * (1.0 - (-c * (1.0 - self.params.delta)).exp())
    }

    pub fn b3(&self, tau: f64) -> f64 {
        let n = self.params.n as f64;
        if tau <= 1.0 - self.epsilon {
            (1.0 + self.epsilon) * n.powf(1.0 - tau)
        } else {
            n.powf(self.epsilon)
        }
    }

    /// `Ḡ(s) + eps n / log^2 n` for integer suffix size `s`.
    pub fn b4(&self, suffix_size: usize) -> f64 {
        let g = self.g_bar.get(suffix_size).copied().unwrap_or(0.0);
        g + self.slack()
    }

    /// `eps n / log^2 n`.
    pub fn slack(&self) -> f64 {
        let log_n = self.params.log_n();
        self.epsilon * self.params.n as f64 / (log_n * log_n)
    }

    pub fn g_bar(&self) -> &[f64] {
        &self.g_bar
    }
}
