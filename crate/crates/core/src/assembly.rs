//! True orderings/overlaps and island construction.
//!
//! An ordering `zeta` lists the reads cyclically; entry `i` of the overlap
//! and suffix-size tuples describes the merge of `zeta[i]` with
//! `zeta[(i + 1) % K]`. A zero overlap ends an island.

use serde::Serialize;

use crate::channel::ChannelOutput;
use crate::error::{MergeFailure, TritError};
use crate::tritstring::{merge_unchecked, windows_compatible, TritString};

/// Ground-truth ordering of the reads.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrueOrdering {
    /// Read indices sorted by start; ties keep read index order.
    pub order: Vec<usize>,
    /// Forward distance from each read to its true successor, in `[0, n]`.
    pub distances: Vec<usize>,
    /// `max(0, L - distance)`.
    pub overlaps: Vec<usize>,
    /// Unerased symbols in the overlapping suffix of each read.
    pub suffix_sizes: Vec<usize>,
}

/// True successor distances for `starts` on a cycle of length `n`, in sorted
/// order. Returns `(order, distances)`.
///
/// A read followed by another read with the same start is at distance 0.
/// Otherwise the distance is to the next strictly later start; a read with no
/// such successor (all reads share one start, or `K = 1`) is at distance `n`.
pub fn successor_distances(starts: &[usize], n: usize) -> (Vec<usize>, Vec<usize>) {
    let k = starts.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&i| (starts[i], i));
    let distances = (0..k)
        .map(|pos| {
            let here = starts[order[pos]];
            let next = starts[order[(pos + 1) % k]];
            if pos + 1 < k && next == here {
                0
            } else {
                let d = (next + n - here) % n;
                if d == 0 {
                    n
                } else {
                    d
                }
            }
        })
        .collect();
    (order, distances)
}

pub fn true_ordering(output: &ChannelOutput) -> TrueOrdering {
    let params = output.params();
    let (order, distances) = successor_distances(&output.truth().starts, params.n);
    let overlaps: Vec<usize> = distances
        .iter()
        .map(|&d| params.read_len.saturating_sub(d))
        .collect();
    let suffix_sizes = order
        .iter()
        .zip(&overlaps)
        .map(|(&r, &l)| output.reads()[r].suffix_size(l))
        .collect();
    TrueOrdering {
        order,
        distances,
        overlaps,
        suffix_sizes,
    }
}

/// An ordering with a suffix-size tuple and, for each positive size, the
/// overlap length realizing it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct OrderedMerge {
    pub order: Vec<usize>,
    pub suffix_sizes: Vec<usize>,
    /// 0 exactly where no merge happens.
    pub overlaps: Vec<usize>,
}

impl OrderedMerge {
    pub fn new(order: Vec<usize>, suffix_sizes: Vec<usize>, overlaps: Vec<usize>) -> Self {
        Self {
            order,
            suffix_sizes,
            overlaps,
        }
    }

    /// The merge that true islands are built from.
    pub fn from_truth(t: &TrueOrdering) -> Self {
        Self::new(t.order.clone(), t.suffix_sizes.clone(), t.overlaps.clone())
    }
}

/// Islands produced by one merge pass.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IslandSet {
    pub islands: Vec<TritString>,
    /// For each island, the ordering positions it merges.
    pub runs: Vec<Vec<usize>>,
    /// For each island, the read indices it merges.
    pub members: Vec<Vec<usize>>,
    /// Every pair merged, so the single island closes on itself. Such an
    /// island is cyclic: its last symbol is followed by its first.
    pub circular: bool,
}

impl IslandSet {
    pub fn len(&self) -> usize {
        self.islands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.islands.is_empty()
    }

    /// Total unerased symbols over all islands.
    pub fn total_size(&self) -> usize {
        self.islands.iter().map(TritString::size).sum()
    }

    /// Order-independent identity used to deduplicate island sets. A
    /// circular island is keyed by its least rotation.
    pub fn canonical_key(&self) -> (bool, Vec<TritString>) {
        if self.circular {
            let keys = self
                .islands
                .iter()
                .map(|z| {
                    (0..z.len().max(1))
                        .map(|k| z.rotate_left(k))
                        .min()
                        .unwrap_or_default()
                })
                .collect();
            return (true, keys);
        }
        let mut v = self.islands.clone();
        v.sort();
        (self.circular, v)
    }
}

/// Builds islands for the decoder: every positive suffix size must be
/// realized by its overlap on the predecessor read, and each merge must
/// satisfy [`crate::tritstring::merge`]'s preconditions.
pub fn build_islands(reads: &[TritString], om: &OrderedMerge) -> Result<IslandSet, MergeFailure> {
    build(reads, om, true)
}

/// Islands from the true ordering, merging at every positive true overlap.
pub fn true_islands(output: &ChannelOutput) -> IslandSet {
    let t = true_ordering(output);
    build(output.reads(), &OrderedMerge::from_truth(&t), false)
        .expect("true overlaps are always compatible")
}

fn build(reads: &[TritString], om: &OrderedMerge, strict: bool) -> Result<IslandSet, MergeFailure> {
    let k = om.order.len();
    let mut seen = vec![false; reads.len()];
    if k != reads.len()
        || om.overlaps.len() != k
        || om.suffix_sizes.len() != k
        || om
            .order
            .iter()
            .any(|&r| r >= reads.len() || std::mem::replace(&mut seen[r], true))
    {
        return Err(MergeFailure::BadOrdering { reads: reads.len() });
    }
    for pos in 0..k {
        let (l, w) = (om.overlaps[pos], om.suffix_sizes[pos]);
        let u = &reads[om.order[pos]];
        let v = &reads[om.order[(pos + 1) % k]];
        if l == 0 {
            if strict && w != 0 {
                return Err(MergeFailure::BadOverlap {
                    position: pos,
                    overlap: 0,
                    read_len: u.len(),
                });
            }
            continue;
        }
        if l > u.len() || l > v.len() {
            return Err(MergeFailure::BadOverlap {
                position: pos,
                overlap: l,
                read_len: u.len().min(v.len()),
            });
        }
        if strict {
            let actual = u.suffix_size(l);
            if actual != w || w == 0 {
                return Err(MergeFailure::SizeMismatch {
                    position: pos,
                    overlap: l,
                    expected: w,
                    actual,
                });
            }
        }
        if !windows_compatible(u, u.len() - l, v, 0, l) {
            return Err(MergeFailure::Incompatible {
                position: pos,
                source: TritError::NotCompatible { overlap: l },
            });
        }
    }

    let boundaries: Vec<usize> = (0..k).filter(|&p| om.overlaps[p] == 0).collect();
    if boundaries.is_empty() {
        let runs: Vec<usize> = (0..k).collect();
        let island = circular_island(reads, om, &runs)?;
        return Ok(IslandSet {
            islands: vec![island],
            members: vec![om.order.clone()],
            runs: vec![runs],
            circular: true,
        });
    }

    let mut runs: Vec<Vec<usize>> = boundaries
        .iter()
        .enumerate()
        .map(|(bi, &b)| {
            let end = boundaries[(bi + 1) % boundaries.len()];
            let mut run = Vec::new();
            let mut p = (b + 1) % k;
            loop {
                run.push(p);
                if p == end {
                    break;
                }
                p = (p + 1) % k;
            }
            run
        })
        .collect();
    runs.sort_by_key(|r| r[0]);

    let mut islands = Vec::with_capacity(runs.len());
    for run in &runs {
        islands.push(merge_run(reads, om, run)?);
    }
    let members = runs
        .iter()
        .map(|run| run.iter().map(|&p| om.order[p]).collect())
        .collect();
    Ok(IslandSet {
        islands,
        runs,
        members,
        circular: false,
    })
}

/// Successively merges the reads at `run` (ordering positions).
fn merge_run(
    reads: &[TritString],
    om: &OrderedMerge,
    run: &[usize],
) -> Result<TritString, MergeFailure> {
    let mut acc = reads[om.order[run[0]]].clone();
    for w in run.windows(2) {
        let l = om.overlaps[w[0]];
        let next = &reads[om.order[w[1]]];
        if !windows_compatible(&acc, acc.len() - l, next, 0, l) {
            return Err(MergeFailure::Incompatible {
                position: w[0],
                source: TritError::NotCompatible { overlap: l },
            });
        }
        acc = merge_unchecked(&acc, next, l);
    }
    Ok(acc)
}

fn circular_island(
    reads: &[TritString],
    om: &OrderedMerge,
    run: &[usize],
) -> Result<TritString, MergeFailure> {
    let acc = merge_run(reads, om, run)?;
    let last = *run.last().expect("non-empty run");
    let l = om.overlaps[last];
    let m = acc.len() - l;
    if l > m {
        return Err(MergeFailure::BadOverlap {
            position: last,
            overlap: l,
            read_len: m,
        });
    }
    if !windows_compatible(&acc, m, &acc, 0, l) {
        return Err(MergeFailure::Incompatible {
            position: last,
            source: TritError::NotCompatible { overlap: l },
        });
    }
    let head = acc.slice(0, l).expect("in range");
    let tail = acc.slice(m, l).expect("in range");
    let z = merge_unchecked(&tail, &head, l);
    Ok(z.concat(&acc.slice(l, m - l).expect("in range")))
}
