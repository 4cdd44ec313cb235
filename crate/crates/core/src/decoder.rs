//! Exhaustive merge/filter/compatibility decoder for toy instances, and a
//! brute-force reference decoder.
//!
//! The merge phase walks cyclic orderings of the reads together with, for
//! each consecutive pair, either "no merge" (suffix size 0) or an overlap
//! length whose merging suffix is non-empty and compatible. Rotating an
//! ordering (with its tuple) gives the same islands, so read 0 is pinned to
//! the first position.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::assembly::{build_islands, IslandSet, OrderedMerge};
use crate::channel::{transmit, ChannelOutput, ChannelParams, Codebook};
use crate::error::{ChannelError, DecodeError};
use crate::par::{map_slice, Execution};
use crate::seed::{Seeder, Stage};
use crate::stats::expected_g_tau_table;
use crate::tritstring::{is_compatible_substring, windows_compatible, TritString};

/// Hard cap on `K`: the search visits up to `(K-1)! (L+1)^K` leaves.
pub const MAX_READS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OmegaMode {
    /// Only suffix-size tuples passing [`is_typical_tuple`].
    TypicalOnly,
    /// Every tuple.
    AllTuples,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoderConfig {
    /// Typicality and filter slack; `f64::INFINITY` disables both checks.
    pub epsilon: f64,
    pub max_k: usize,
    pub omega_mode: OmegaMode,
    /// Match non-circular islands against cyclic windows of codewords.
    pub cyclic_check: bool,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        Self {
            epsilon: f64::INFINITY,
            max_k: MAX_READS,
            omega_mode: OmegaMode::AllTuples,
            cyclic_check: true,
        }
    }
}

impl DecoderConfig {
    pub fn validate(&self) -> Result<(), DecodeError> {
        if self.max_k > MAX_READS {
            return Err(DecodeError::Config(format!(
                "max_k = {} exceeds {MAX_READS}",
                self.max_k
            )));
        }
        if self.epsilon.is_nan() || self.epsilon < 0.0 {
            return Err(DecodeError::Config(format!(
                "epsilon = {} must be non-negative",
                self.epsilon
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "index")]
pub enum Outcome {
    Message(usize),
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SearchStats {
    /// Complete (ordering, overlap tuple) leaves reached.
    pub leaves: u64,
    /// Leaves whose suffix-size tuple was typical.
    pub typical: u64,
    /// Leaves whose merges succeeded.
    pub merged: u64,
    /// Merged island sets that passed the filter.
    pub filtered: u64,
}

impl SearchStats {
    fn absorb(&mut self, o: &SearchStats) {
        self.leaves += o.leaves;
        self.typical += o.typical;
        self.merged += o.merged;
        self.filtered += o.filtered;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecodeResult {
    pub outcome: Outcome,
    /// Distinct island sets retained after filtering, sorted by canonical key.
    pub candidate_islands: Vec<IslandSet>,
    /// Codebook indices compatible with at least one retained island set.
    pub candidate_codewords: Vec<usize>,
    pub stats: SearchStats,
}

impl DecodeResult {
    /// Whether an island set with the same canonical key was retained.
    pub fn contains_islands(&self, islands: &IslandSet) -> bool {
        let key = islands.canonical_key();
        self.candidate_islands
            .iter()
            .any(|s| s.canonical_key() == key)
    }

    pub fn trace(&self, config: &DecoderConfig) -> DecodeTrace {
        DecodeTrace {
            epsilon: config.epsilon.is_finite().then_some(config.epsilon),
            omega_mode: config.omega_mode,
            visited_tuples: self.stats.leaves,
            typical_tuples: self.stats.typical,
            merged_tuples: self.stats.merged,
            candidate_island_sets: self.candidate_islands.len(),
            candidate_codewords: self.candidate_codewords.clone(),
            outcome: self.outcome,
        }
    }
}

/// Compact, serializable summary of a decode run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeTrace {
    pub epsilon: Option<f64>,
    pub omega_mode: OmegaMode,
    pub visited_tuples: u64,
    pub typical_tuples: u64,
    pub merged_tuples: u64,
    pub candidate_island_sets: usize,
    pub candidate_codewords: Vec<usize>,
    pub outcome: Outcome,
}

/// Typicality bounds shared by [`is_typical_tuple`] and the search pruning.
struct TypicalBounds {
    zeros: (f64, f64),
    g_bar: Vec<f64>,
    slack: f64,
}

impl TypicalBounds {
    fn new(params: &ChannelParams, epsilon: f64) -> Self {
        let k_zero = params.num_reads as f64 * (-params.coverage_depth()).exp();
        let log_n = params.log_n();
        Self {
            zeros: (k_zero - epsilon * k_zero, k_zero + epsilon * k_zero),
            g_bar: expected_g_tau_table(params),
            slack: epsilon * params.n as f64 / (log_n * log_n),
        }
    }

    fn upper_ok(&self, size: usize, count: usize) -> bool {
        if size == 0 {
            count as f64 <= self.zeros.1
        } else {
            count as f64 <= self.g_bar.get(size).copied().unwrap_or(0.0) + self.slack
        }
    }

    fn all_ok(&self, counts: &[usize]) -> bool {
        let z = counts[0] as f64;
        z >= self.zeros.0
            && z <= self.zeros.1
            && counts.iter().enumerate().skip(1).all(|(s, &cnt)| {
                (cnt as f64 - self.g_bar.get(s).copied().unwrap_or(0.0)).abs() <= self.slack
            })
    }
}

fn size_counts(omega: &[usize], read_len: usize) -> Vec<usize> {
    let mut counts = vec![0; read_len.max(omega.iter().copied().max().unwrap_or(0)) + 1];
    for &w in omega {
        counts[w] += 1;
    }
    counts
}

/// Whether the suffix-size tuple `omega` has a typical number of zeros and
/// typical counts for every positive size.
pub fn is_typical_tuple(omega: &[usize], params: &ChannelParams, epsilon: f64) -> bool {
    if epsilon.is_infinite() {
        return true;
    }
    TypicalBounds::new(params, epsilon).all_ok(&size_counts(omega, params.read_len))
}

/// Whether the unerased symbols across `islands`, per codeword symbol, are
/// within relative `epsilon` of the visible-coverage limit
/// `1 - e^{-c(1 - delta)}`.
pub fn filter_islands(islands: &IslandSet, params: &ChannelParams, epsilon: f64) -> bool {
    if epsilon.is_infinite() {
        return true;
    }
    let target = 1.0 - (-params.coverage_depth() * (1.0 - params.delta)).exp();
    let phi = islands.total_size() as f64 / params.n as f64;
    (phi - target).abs() <= epsilon * target
}

/// Codewords in which every read is a compatible substring.
pub fn oracle_candidates(codebook: &Codebook, reads: &[TritString], cyclic: bool) -> Vec<usize> {
    codebook
        .words()
        .iter()
        .enumerate()
        .filter(|(_, x)| reads.iter().all(|r| is_compatible_substring(r, x, cyclic)))
        .map(|(i, _)| i)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleOutcome {
    Unique(usize),
    Ambiguous(Vec<usize>),
    None,
}

impl OracleOutcome {
    pub fn candidates(&self) -> Vec<usize> {
        match self {
            OracleOutcome::Unique(w) => vec![*w],
            OracleOutcome::Ambiguous(v) => v.clone(),
            OracleOutcome::None => Vec::new(),
        }
    }

    pub fn contains(&self, w: usize) -> bool {
        self.candidates().contains(&w)
    }
}

pub fn oracle_decode(codebook: &Codebook, reads: &[TritString], cyclic: bool) -> OracleOutcome {
    let c = oracle_candidates(codebook, reads, cyclic);
    match c.len() {
        0 => OracleOutcome::None,
        1 => OracleOutcome::Unique(c[0]),
        _ => OracleOutcome::Ambiguous(c),
    }
}

/// Options for one ordered pair: `(overlap, suffix size)`, always starting
/// with `(0, 0)`.
fn pair_options(reads: &[TritString]) -> Vec<Vec<Vec<(usize, usize)>>> {
    reads
        .iter()
        .map(|u| {
            reads
                .iter()
                .map(|v| {
                    let mut opts = vec![(0, 0)];
                    for l in 1..=u.len().min(v.len()) {
                        let s = u.suffix_size(l);
                        if s > 0 && windows_compatible(u, u.len() - l, v, 0, l) {
                            opts.push((l, s));
                        }
                    }
                    opts
                })
                .collect()
        })
        .collect()
}

type Candidates = BTreeMap<(bool, Vec<TritString>), IslandSet>;

struct Search<'a> {
    reads: &'a [TritString],
    params: &'a ChannelParams,
    config: &'a DecoderConfig,
    options: &'a [Vec<Vec<(usize, usize)>>],
    bounds: Option<&'a TypicalBounds>,
}

#[derive(Clone)]
struct Partial {
    order: Vec<usize>,
    sizes: Vec<usize>,
    overlaps: Vec<usize>,
    used: Vec<bool>,
    counts: Vec<usize>,
}

impl Partial {
    fn push(&mut self, next: Option<usize>, (l, s): (usize, usize)) {
        self.overlaps.push(l);
        self.sizes.push(s);
        self.counts[s] += 1;
        if let Some(r) = next {
            self.order.push(r);
            self.used[r] = true;
        }
    }

    fn pop(&mut self, next: Option<usize>) {
        let s = self.sizes.pop().expect("non-empty");
        self.overlaps.pop();
        self.counts[s] -= 1;
        if let Some(r) = next {
            self.order.pop();
            self.used[r] = false;
        }
    }
}

impl Search<'_> {
    fn admissible(&self, partial: &Partial, size: usize) -> bool {
        match self.bounds {
            Some(b) => b.upper_ok(size, partial.counts[size] + 1),
            None => true,
        }
    }

    fn leaf(&self, partial: &Partial, out: &mut Candidates, stats: &mut SearchStats) {
        stats.leaves += 1;
        if let Some(b) = self.bounds {
            if !b.all_ok(&partial.counts) {
                return;
            }
        }
        stats.typical += 1;
        let om = OrderedMerge::new(
            partial.order.clone(),
            partial.sizes.clone(),
            partial.overlaps.clone(),
        );
        let Ok(islands) = build_islands(self.reads, &om) else {
            return;
        };
        stats.merged += 1;
        if !filter_islands(&islands, self.params, self.config.epsilon) {
            return;
        }
        stats.filtered += 1;
        out.entry(islands.canonical_key()).or_insert(islands);
    }

    fn dfs(&self, partial: &mut Partial, out: &mut Candidates, stats: &mut SearchStats) {
        let k = self.reads.len();
        let pos = partial.order.len() - 1;
        let cur = partial.order[pos];
        if pos + 1 == k {
            let first = partial.order[0];
            for &opt in &self.options[cur][first] {
                if !self.admissible(partial, opt.1) {
                    continue;
                }
                partial.push(None, opt);
                self.leaf(partial, out, stats);
                partial.pop(None);
            }
            return;
        }
        for next in 0..k {
            if partial.used[next] {
                continue;
            }
            for &opt in &self.options[cur][next] {
                if !self.admissible(partial, opt.1) {
                    continue;
                }
                partial.push(Some(next), opt);
                self.dfs(partial, out, stats);
                partial.pop(Some(next));
            }
        }
    }
}

/// Codewords compatible with an island, as a bitset over the codebook.
fn island_matches(
    island: &TritString,
    circular: bool,
    codebook: &Codebook,
    cyclic: bool,
) -> Vec<u64> {
    let mut bits = vec![0u64; codebook.len().div_ceil(64)];
    for (i, x) in codebook.words().iter().enumerate() {
        let ok = if circular {
            island.len() == x.len() && is_compatible_substring(island, x, true)
        } else {
            is_compatible_substring(island, x, cyclic)
        };
        if ok {
            bits[i / 64] |= 1 << (i % 64);
        }
    }
    bits
}

/// Runs the three decoding phases on the decoder's view of the reads.
pub fn algorithm1_decode(
    codebook: &Codebook,
    reads: &[TritString],
    params: &ChannelParams,
    config: &DecoderConfig,
) -> Result<DecodeResult, DecodeError> {
    algorithm1_decode_with(codebook, reads, params, config, Execution::default())
}

pub fn algorithm1_decode_with(
    codebook: &Codebook,
    reads: &[TritString],
    params: &ChannelParams,
    config: &DecoderConfig,
    exec: Execution,
) -> Result<DecodeResult, DecodeError> {
    config.validate()?;
    let k = reads.len();
    if k > config.max_k {
        return Err(DecodeError::TooManyReads {
            reads: k,
            cap: config.max_k,
        });
    }
    if k == 0 {
        return Err(DecodeError::Config("no reads to decode".into()));
    }
    let options = pair_options(reads);
    let bounds = (config.omega_mode == OmegaMode::TypicalOnly && config.epsilon.is_finite())
        .then(|| TypicalBounds::new(params, config.epsilon));
    let search = Search {
        reads,
        params,
        config,
        options: &options,
        bounds: bounds.as_ref(),
    };
    let max_size = reads.iter().map(TritString::len).max().unwrap_or(0);
    let root = Partial {
        order: vec![0],
        sizes: Vec::with_capacity(k),
        overlaps: Vec::with_capacity(k),
        used: (0..k).map(|i| i == 0).collect(),
        counts: vec![0; max_size + 1],
    };

    // Branch on the first pair so independent subtrees can run in parallel.
    let mut branches: Vec<(Option<usize>, (usize, usize))> = Vec::new();
    if k == 1 {
        branches.extend(options[0][0].iter().map(|&o| (None, o)));
    } else {
        for next in 1..k {
            branches.extend(options[0][next].iter().map(|&o| (Some(next), o)));
        }
    }
    let results = map_slice(&branches, exec, |&(next, opt)| {
        let mut out = Candidates::new();
        let mut stats = SearchStats::default();
        let mut partial = root.clone();
        if search.admissible(&partial, opt.1) {
            partial.push(next, opt);
            if next.is_none() {
                search.leaf(&partial, &mut out, &mut stats);
            } else {
                search.dfs(&mut partial, &mut out, &mut stats);
            }
        }
        (out, stats)
    });

    let mut all = Candidates::new();
    let mut stats = SearchStats::default();
    for (out, s) in results {
        stats.absorb(&s);
        for (key, set) in out {
            all.entry(key).or_insert(set);
        }
    }

    let words = codebook.len().div_ceil(64);
    let mut memo: HashMap<(bool, &TritString), Vec<u64>> = HashMap::new();
    let mut hits = vec![0u64; words];
    for set in all.values() {
        let mut acc = vec![u64::MAX; words];
        for island in &set.islands {
            let m = memo.entry((set.circular, island)).or_insert_with(|| {
                island_matches(island, set.circular, codebook, config.cyclic_check)
            });
            for (a, b) in acc.iter_mut().zip(m.iter()) {
                *a &= *b;
            }
        }
        for (h, a) in hits.iter_mut().zip(&acc) {
            *h |= *a;
        }
    }
    let candidate_codewords: Vec<usize> = (0..codebook.len())
        .filter(|&i| hits[i / 64] >> (i % 64) & 1 == 1)
        .collect();
    let outcome = match candidate_codewords.as_slice() {
        [w] => Outcome::Message(*w),
        _ => Outcome::Fail,
    };
    Ok(DecodeResult {
        outcome,
        candidate_islands: all.into_values().collect(),
        candidate_codewords,
        stats,
    })
}

/// A seeded toy decoding instance: a random codebook, a uniformly chosen
/// message and one channel use.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToyInstance {
    pub codebook: Codebook,
    pub output: ChannelOutput,
}

impl ToyInstance {
    /// Codebook of `codebook_size` words.
    pub fn sample(
        params: &ChannelParams,
        codebook_size: usize,
        seeder: &Seeder,
    ) -> Result<Self, ChannelError> {
        params.validate()?;
        if codebook_size == 0 {
            return Err(ChannelError::InvalidParams(
                "codebook must be non-empty".into(),
            ));
        }
        let codebook = Codebook::random(params.n, codebook_size, seeder);
        Self::with_codebook(params, codebook, seeder)
    }

    /// Codebook of `ceil(2^{nR})` words.
    pub fn sample_rate(
        params: &ChannelParams,
        rate: f64,
        cap: usize,
        seeder: &Seeder,
    ) -> Result<Self, ChannelError> {
        params.validate()?;
        let codebook = Codebook::generate(params.n, rate, seeder, cap)?;
        Self::with_codebook(params, codebook, seeder)
    }

    fn with_codebook(
        params: &ChannelParams,
        codebook: Codebook,
        seeder: &Seeder,
    ) -> Result<Self, ChannelError> {
        let message = seeder.rng(Stage::Message, 0).gen_range(0..codebook.len());
        let output = transmit(&codebook, message, params, seeder)?;
        Ok(Self { codebook, output })
    }

    pub fn message(&self) -> usize {
        self.output.truth().message
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{true_islands, true_ordering};

    fn t(s: &str) -> TritString {
        s.parse().unwrap()
    }

    #[test]
    fn oracle_examples() {
        let cb = Codebook::from_words(vec![t("01101001"), t("11110000")]).unwrap();
        let reads = vec![t("0110"), t("1*0")];
        assert_eq!(oracle_decode(&cb, &reads, true), OracleOutcome::Unique(0));
        let erased = vec![t("***"), t("***")];
        assert_eq!(
            oracle_decode(&cb, &erased, true),
            OracleOutcome::Ambiguous(vec![0, 1])
        );
        assert_eq!(
            oracle_decode(&cb, &[t("00000")], false),
            OracleOutcome::None
        );
    }

    #[test]
    fn typicality_checks() {
        let p = ChannelParams::new(1024, 20, 100, 0.0).unwrap();
        assert!(is_typical_tuple(&[0; 100], &p, f64::INFINITY));
        assert!(!is_typical_tuple(&[0; 100], &p, 0.1));
    }

    #[test]
    fn filter_checks() {
        let p = ChannelParams::new(32, 8, 6, 0.0).unwrap();
        let empty = IslandSet {
            islands: vec![],
            runs: vec![],
            members: vec![],
            circular: false,
        };
        assert!(!filter_islands(&empty, &p, 0.1));
        assert!(filter_islands(&empty, &p, f64::INFINITY));
    }

    #[test]
    fn too_many_reads_refused() {
        let p = ChannelParams::new(64, 4, 9, 0.0).unwrap();
        let cb = Codebook::random(64, 2, &Seeder::new(1));
        let reads = vec![t("0101"); 9];
        let err = algorithm1_decode(&cb, &reads, &p, &DecoderConfig::default()).unwrap_err();
        assert!(matches!(
            err,
            DecodeError::TooManyReads { reads: 9, cap: 8 }
        ));
        let bad = DecoderConfig {
            max_k: 9,
            ..DecoderConfig::default()
        };
        assert!(algorithm1_decode(&cb, &reads, &p, &bad).is_err());
    }

    #[test]
    fn duplicate_codewords_never_decode() {
        let x = t("01101001110010100111010001101011");
        let cb = Codebook::from_words(vec![x.clone(), x.clone()]).unwrap();
        let p = ChannelParams::new(32, 8, 6, 0.0).unwrap();
        let out = transmit(&cb, 1, &p, &Seeder::new(4)).unwrap();
        let r = algorithm1_decode(&cb, out.reads(), &p, &DecoderConfig::default()).unwrap();
        assert_eq!(r.outcome, Outcome::Fail);
        assert_eq!(r.candidate_codewords, vec![0, 1]);
    }

    #[test]
    fn toy_instances_are_consistent() {
        let p = ChannelParams::new(32, 8, 6, 0.1).unwrap();
        for seed in 0..20 {
            let inst = ToyInstance::sample(&p, 5, &Seeder::new(seed)).unwrap();
            let reads = inst.output.reads();
            let oracle = oracle_decode(&inst.codebook, reads, true);
            assert!(oracle.contains(inst.message()));
            let seq = algorithm1_decode_with(
                &inst.codebook,
                reads,
                &p,
                &DecoderConfig::default(),
                Execution::Sequential,
            )
            .unwrap();
            let par = algorithm1_decode_with(
                &inst.codebook,
                reads,
                &p,
                &DecoderConfig::default(),
                Execution::Parallel,
            )
            .unwrap();
            assert_eq!(seq, par);
            assert_eq!(seq.candidate_codewords, oracle.candidates());
            let tr = true_ordering(&inst.output);
            if tr
                .overlaps
                .iter()
                .zip(&tr.suffix_sizes)
                .all(|(&l, &s)| l == 0 || s > 0)
            {
                assert!(seq.contains_islands(&true_islands(&inst.output)));
            }
        }
    }

    #[test]
    fn enlarging_epsilon_never_shrinks_candidates() {
        let p = ChannelParams::new(32, 8, 6, 0.0).unwrap();
        let inst = ToyInstance::sample(&p, 4, &Seeder::new(11)).unwrap();
        let mut prev = 0;
        for eps in [0.2, 0.5, 1.0, 3.0, f64::INFINITY] {
            let cfg = DecoderConfig {
                epsilon: eps,
                omega_mode: OmegaMode::TypicalOnly,
                ..DecoderConfig::default()
            };
            let r = algorithm1_decode(&inst.codebook, inst.output.reads(), &p, &cfg).unwrap();
            assert!(r.candidate_islands.len() >= prev);
            prev = r.candidate_islands.len();
        }
    }
}
