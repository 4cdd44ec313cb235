//! Random codebooks and the shotgun sequencing channel with erasures.
//!
//! The channel draws `K` read starts uniformly (with replacement) on the
//! cyclic codeword, copies the `L`-window at each start, then erases every
//! read symbol independently with probability `delta`. Positions are
//! 0-indexed throughout.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::ChannelError;
use crate::seed::{Seeder, Stage};
use crate::tritstring::TritString;

/// Largest codebook [`Codebook::generate`] will build by default.
pub const DEFAULT_CODEBOOK_CAP: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub n: usize,
    #[serde(rename = "L")]
    pub read_len: usize,
    #[serde(rename = "K")]
    pub num_reads: usize,
    pub delta: f64,
}

/// Read length given literally or as `L̄` with `L = round(L̄ log2 n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReadLength {
    Literal(usize),
    Normalized(f64),
}

/// Read count given literally or as coverage depth `c` with `K = round(c n / L)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReadCount {
    Literal(usize),
    Depth(f64),
}

impl ChannelParams {
    pub fn new(
        n: usize,
        read_len: usize,
        num_reads: usize,
        delta: f64,
    ) -> Result<Self, ChannelError> {
        let p = Self {
            n,
            read_len,
            num_reads,
            delta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if self.n == 0 {
            return Err(ChannelError::InvalidParams("n must be at least 1".into()));
        }
        if self.read_len == 0 || self.read_len > self.n {
            return Err(ChannelError::InvalidParams(format!(
                "read length {} outside [1, n = {}]",
                self.read_len, self.n
            )));
        }
        if self.num_reads == 0 {
            return Err(ChannelError::InvalidParams("K must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(ChannelError::InvalidParams(format!(
                "erasure probability {} outside [0, 1]",
                self.delta
            )));
        }
        Ok(())
    }

    /// Resolves literal or normalized read length and count.
    pub fn resolve(
        n: usize,
        len: ReadLength,
        count: ReadCount,
        delta: f64,
    ) -> Result<Self, ChannelError> {
        let read_len = match len {
            ReadLength::Literal(l) => l,
            ReadLength::Normalized(lbar) => {
                if n < 2 || !(lbar > 0.0) {
                    return Err(ChannelError::InvalidParams(format!(
                        "normalized read length needs n >= 2 and lbar > 0 (n = {n}, lbar = {lbar})"
                    )));
                }
                ((lbar * (n as f64).log2()).round() as usize).clamp(1, n)
            }
        };
        let num_reads = match count {
            ReadCount::Literal(k) => k,
            ReadCount::Depth(c) => {
                if !(c > 0.0) || read_len == 0 {
                    return Err(ChannelError::InvalidParams(format!(
                        "coverage depth must be positive (c = {c})"
                    )));
                }
                ((c * n as f64 / read_len as f64).round() as usize).max(1)
            }
        };
        Self::new(n, read_len, num_reads, delta)
    }

    /// Convenience constructor for the `L = L̄ log2 n`, `K = c n / L` regime.
    pub fn from_normalized(n: usize, lbar: f64, c: f64, delta: f64) -> Result<Self, ChannelError> {
        Self::resolve(n, ReadLength::Normalized(lbar), ReadCount::Depth(c), delta)
    }

    /// Coverage depth `c = K L / n`.
    pub fn coverage_depth(&self) -> f64 {
        crate::rates::coverage_depth(self.num_reads, self.read_len, self.n)
    }

    /// `log2 n`.
    pub fn log_n(&self) -> f64 {
        (self.n as f64).log2()
    }

    /// `L̄ = L / log2 n`; `None` when `n < 2`.
    pub fn normalized_read_length(&self) -> Option<f64> {
        (self.n >= 2).then(|| self.read_len as f64 / self.log_n())
    }
}

/// One channel read: its symbols and (ground-truth) start position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Read {
    pub symbols: TritString,
    pub start: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Codebook {
    n: usize,
    words: Vec<TritString>,
}

impl Codebook {
    /// `ceil(2^(n rate))` i.i.d. uniform binary words of length `n`,
    /// refusing anything above `cap` words.
    pub fn generate(
        n: usize,
        rate: f64,
        seeder: &Seeder,
        cap: usize,
    ) -> Result<Self, ChannelError> {
        if n == 0 {
            return Err(ChannelError::InvalidParams("n must be at least 1".into()));
        }
        if !(rate > 0.0) {
            return Err(ChannelError::InvalidParams(format!(
                "rate must be positive (got {rate})"
            )));
        }
        let exponent = n as f64 * rate;
        if exponent > (cap as f64).log2() + 1e-9 {
            return Err(ChannelError::CodebookTooLarge { exponent, cap });
        }
        let size = (exponent.exp2() - 1e-9).ceil().max(1.0) as usize;
        Ok(Self::random(n, size, seeder))
    }

    /// `size` i.i.d. uniform binary words of length `n`.
    pub fn random(n: usize, size: usize, seeder: &Seeder) -> Self {
        let mut rng = seeder.rng(Stage::Codebook, 0);
        let words = (0..size).map(|_| random_codeword(n, &mut rng)).collect();
        Self { n, words }
    }

    /// Wraps explicit codewords; all must be binary of the same length.
    pub fn from_words(words: Vec<TritString>) -> Result<Self, ChannelError> {
        let n = words.first().map_or(0, TritString::len);
        if let Some(bad) = words.iter().find(|w| w.len() != n || !w.is_binary()) {
            return Err(ChannelError::CodewordLength {
                got: bad.len(),
                expected: n,
            });
        }
        Ok(Self { n, words })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[TritString] {
        &self.words
    }

    pub fn get(&self, index: usize) -> Option<&TritString> {
        self.words.get(index)
    }
}

/// A uniform binary string of length `n`.
pub fn random_codeword<R: Rng + ?Sized>(n: usize, rng: &mut R) -> TritString {
    let words = (0..n.div_ceil(64)).map(|_| rng.gen::<u64>()).collect();
    TritString::from_packed_bits(n, words)
}

/// Draws `K` starts uniformly on `[0, n)` and copies the cyclic `L`-windows.
pub fn sample_reads<R: Rng + ?Sized>(
    x: &TritString,
    params: &ChannelParams,
    rng: &mut R,
) -> Result<Vec<Read>, ChannelError> {
    if x.len() != params.n {
        return Err(ChannelError::CodewordLength {
            got: x.len(),
            expected: params.n,
        });
    }
    Ok((0..params.num_reads)
        .map(|_| {
            let start = rng.gen_range(0..params.n);
            Read {
                symbols: x.cyclic_window(start, params.read_len),
                start,
            }
        })
        .collect())
}

/// Erases each symbol independently with probability `delta`; starts are
/// left unchanged.
pub fn apply_erasures<R: Rng + ?Sized>(reads: &[Read], delta: f64, rng: &mut R) -> Vec<Read> {
    reads
        .iter()
        .map(|r| {
            let mut symbols = r.symbols.clone();
            if delta >= 1.0 {
                symbols = TritString::erased(symbols.len());
            } else if delta > 0.0 {
                for i in 0..symbols.len() {
                    if rng.gen_bool(delta) {
                        symbols.erase(i);
                    }
                }
            }
            Read {
                symbols,
                start: r.start,
            }
        })
        .collect()
}

/// Ground truth of one channel use. Only analysis code should look at it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Truth {
    #[serde(rename = "w")]
    pub message: usize,
    #[serde(rename = "x")]
    pub codeword: TritString,
    pub starts: Vec<usize>,
}

/// The decoder-facing part of a channel output: parameters and read symbols.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecoderView {
    pub params: ChannelParams,
    #[serde(with = "read_records")]
    pub reads: Vec<TritString>,
}

/// Channel output: the multiset of `K` erased reads plus a sealed truth record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelOutput {
    params: ChannelParams,
    #[serde(with = "read_records")]
    reads: Vec<TritString>,
    truth: Truth,
}

mod read_records {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::tritstring::TritString;

    #[derive(Serialize, Deserialize)]
    struct Record<T> {
        symbols: T,
    }

    pub fn serialize<S: Serializer>(reads: &[TritString], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(reads.iter().map(|symbols| Record { symbols }))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<TritString>, D::Error> {
        let recs = Vec::<Record<TritString>>::deserialize(d)?;
        Ok(recs.into_iter().map(|r| r.symbols).collect())
    }
}

impl ChannelOutput {
    /// Assembles an output from explicit parts, checking consistency: each
    /// read has length `L` and is compatible with the codeword window at its
    /// start.
    pub fn from_parts(
        params: ChannelParams,
        message: usize,
        codeword: TritString,
        starts: Vec<usize>,
        reads: Vec<TritString>,
    ) -> Result<Self, ChannelError> {
        params.validate()?;
        if codeword.len() != params.n {
            return Err(ChannelError::CodewordLength {
                got: codeword.len(),
                expected: params.n,
            });
        }
        if starts.len() != reads.len() || reads.len() != params.num_reads {
            return Err(ChannelError::InvalidParams(format!(
                "expected {} reads and starts, got {} and {}",
                params.num_reads,
                reads.len(),
                starts.len()
            )));
        }
        for (r, &s) in reads.iter().zip(&starts) {
            if s >= params.n || r.len() != params.read_len {
                return Err(ChannelError::InvalidParams(format!(
                    "read {r} with start {s} does not fit n = {}, L = {}",
                    params.n, params.read_len
                )));
            }
            let window = codeword.cyclic_window(s, params.read_len);
            if !crate::tritstring::compatible(r, &window).unwrap_or(false) {
                return Err(ChannelError::InvalidParams(format!(
                    "read {r} is not compatible with the codeword at {s}"
                )));
            }
        }
        Ok(Self {
            params,
            reads,
            truth: Truth {
                message,
                codeword,
                starts,
            },
        })
    }

    /// Error-free output with the given starts.
    pub fn from_starts(
        params: ChannelParams,
        codeword: TritString,
        starts: Vec<usize>,
    ) -> Result<Self, ChannelError> {
        let reads = starts
            .iter()
            .map(|&s| codeword.cyclic_window(s % codeword.len().max(1), params.read_len))
            .collect();
        Self::from_parts(params, 0, codeword, starts, reads)
    }

    pub fn params(&self) -> &ChannelParams {
        &self.params
    }

    /// Post-erasure read symbols in channel order.
    pub fn reads(&self) -> &[TritString] {
        &self.reads
    }

    /// Ground truth (codeword, message index, starts).
    pub fn truth(&self) -> &Truth {
        &self.truth
    }

    /// Pre-erasure reads, rebuilt from the codeword and starts.
    pub fn clean_reads(&self) -> Vec<TritString> {
        self.truth
            .starts
            .iter()
            .map(|&s| self.truth.codeword.cyclic_window(s, self.params.read_len))
            .collect()
    }

    /// Reads with their true starts.
    pub fn reads_with_starts(&self) -> Vec<Read> {
        self.reads
            .iter()
            .zip(&self.truth.starts)
            .map(|(symbols, &start)| Read {
                symbols: symbols.clone(),
                start,
            })
            .collect()
    }

    pub fn decoder_view(&self) -> DecoderView {
        DecoderView {
            params: self.params,
            reads: self.reads.clone(),
        }
    }
}

/// Sends codeword `x` (message index `message`) through the channel.
pub fn transmit_codeword(
    x: &TritString,
    message: usize,
    params: &ChannelParams,
    seeder: &Seeder,
) -> Result<ChannelOutput, ChannelError> {
    params.validate()?;
    let clean = sample_reads(x, params, &mut seeder.rng(Stage::Starts, 0))?;
    let erased = apply_erasures(&clean, params.delta, &mut seeder.rng(Stage::Erasures, 0));
    let (reads, starts) = erased.into_iter().map(|r| (r.symbols, r.start)).unzip();
    Ok(ChannelOutput {
        params: *params,
        reads,
        truth: Truth {
            message,
            codeword: x.clone(),
            starts,
        },
    })
}

/// Sends codeword `w` of `codebook` through the channel.
pub fn transmit(
    codebook: &Codebook,
    message: usize,
    params: &ChannelParams,
    seeder: &Seeder,
) -> Result<ChannelOutput, ChannelError> {
    let x = codebook.get(message).ok_or(ChannelError::BadMessage {
        index: message,
        size: codebook.len(),
    })?;
    transmit_codeword(x, message, params, seeder)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tritstring::compatible;

    fn t(s: &str) -> TritString {
        s.parse().unwrap()
    }

    #[test]
    fn params_validation_and_derived_values() {
        assert!(ChannelParams::new(10, 0, 1, 0.0).is_err());
        assert!(ChannelParams::new(10, 11, 1, 0.0).is_err());
        assert!(ChannelParams::new(10, 5, 0, 0.0).is_err());
        assert!(ChannelParams::new(10, 5, 1, 1.5).is_err());
        let p = ChannelParams::new(1000, 10, 100, 0.1).unwrap();
        assert_eq!(p.coverage_depth(), 1.0);
        let q = ChannelParams::from_normalized(100_000, 2.0, 2.0, 0.2).unwrap();
        assert_eq!(q.read_len, 33);
        assert_eq!(q.num_reads, 6061);
        assert!((q.coverage_depth() - 2.0).abs() < 1e-3);
        assert!(ChannelParams::new(1, 1, 1, 0.0)
            .unwrap()
            .normalized_read_length()
            .is_none());
    }

    #[test]
    fn codebook_generation() {
        let s = Seeder::new(9);
        let cb = Codebook::generate(4, 0.5, &s, DEFAULT_CODEBOOK_CAP).unwrap();
        assert_eq!(cb.len(), 4);
        assert!(cb.words().iter().all(|w| w.len() == 4 && w.is_binary()));
        assert_eq!(
            cb,
            Codebook::generate(4, 0.5, &s, DEFAULT_CODEBOOK_CAP).unwrap()
        );
        assert_ne!(
            cb,
            Codebook::generate(4, 0.5, &Seeder::new(10), DEFAULT_CODEBOOK_CAP).unwrap()
        );
        let err = Codebook::generate(10_000, 0.4, &s, DEFAULT_CODEBOOK_CAP).unwrap_err();
        assert!(matches!(err, ChannelError::CodebookTooLarge { .. }));
        assert!(err.to_string().contains("exceeds"));
        let five = Codebook::generate(32, 5f64.log2() / 32.0, &s, DEFAULT_CODEBOOK_CAP).unwrap();
        assert_eq!(five.len(), 5);
    }

    #[test]
    fn reads_wrap_cyclically() {
        let x = t("0110");
        assert_eq!(x.cyclic_window(3, 2), t("00"));
        let p = ChannelParams::new(4, 4, 20, 0.0).unwrap();
        let reads = sample_reads(&x, &p, &mut Seeder::new(1).rng(Stage::Starts, 0)).unwrap();
        for r in &reads {
            assert_eq!(r.symbols, x.rotate_left(r.start));
        }
    }

    #[test]
    fn erasure_extremes() {
        let x = t("0110100111");
        let p = ChannelParams::new(10, 5, 8, 0.0).unwrap();
        let reads = sample_reads(&x, &p, &mut Seeder::new(2).rng(Stage::Starts, 0)).unwrap();
        let same = apply_erasures(&reads, 0.0, &mut Seeder::new(2).rng(Stage::Erasures, 0));
        assert_eq!(same, reads);
        let gone = apply_erasures(&reads, 1.0, &mut Seeder::new(2).rng(Stage::Erasures, 0));
        assert!(gone
            .iter()
            .all(|r| r.symbols.size() == 0 && r.symbols.len() == 5));
        assert!(gone.iter().zip(&reads).all(|(a, b)| a.start == b.start));
    }

    #[test]
    fn transmit_is_deterministic_and_consistent() {
        let s = Seeder::new(77);
        let cb = Codebook::random(64, 3, &s);
        let p = ChannelParams::new(64, 12, 30, 0.3).unwrap();
        let a = transmit(&cb, 2, &p, &s).unwrap();
        let b = transmit(&cb, 2, &p, &s).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.reads().len(), 30);
        for (r, clean) in a.reads().iter().zip(a.clean_reads()) {
            assert!(compatible(r, &clean).unwrap());
        }
        assert!(transmit(&cb, 3, &p, &s).is_err());
    }

    #[test]
    fn json_schema() {
        let p = ChannelParams::new(4, 2, 2, 0.5).unwrap();
        let out =
            ChannelOutput::from_parts(p, 1, t("0110"), vec![0, 3], vec![t("0*"), t("*0")]).unwrap();
        let v: serde_json::Value = serde_json::to_value(&out).unwrap();
        assert_eq!(
            v,
            serde_json::json!({
                "params": {"n": 4, "L": 2, "K": 2, "delta": 0.5},
                "reads": [{"symbols": "0*"}, {"symbols": "*0"}],
                "truth": {"w": 1, "x": "0110", "starts": [0, 3]}
            })
        );
        let view = serde_json::to_value(out.decoder_view()).unwrap();
        assert!(view.get("truth").is_none());
        assert_eq!(view["reads"][1]["symbols"], "*0");
        let back: ChannelOutput = serde_json::from_value(v).unwrap();
        assert_eq!(back, out);
    }

    #[test]
    fn from_parts_rejects_inconsistent_reads() {
        let p = ChannelParams::new(4, 2, 1, 0.0).unwrap();
        assert!(ChannelOutput::from_parts(p, 0, t("0110"), vec![0], vec![t("11")]).is_err());
        assert!(ChannelOutput::from_parts(p, 0, t("0110"), vec![4], vec![t("01")]).is_err());
    }
}
