//! Strings over the ternary alphabet `{0, 1, ⊥}`.
//!
//! A [`TritString`] is stored as two bit-planes: `known` marks unerased
//! positions and `value` holds the bit at those positions (always zero where
//! erased). Compatibility of two windows is then a word-parallel check
//! `(a.value ^ b.value) & a.known & b.known == 0`.
//!
//! The text codec uses `'0'`, `'1'` and `'*'` for an erased symbol; `'⊥'` is
//! accepted on input as an alias of `'*'`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::TritError;

const WORD: usize = 64;

/// A single symbol of a [`TritString`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Trit {
    Zero,
    One,
    Erased,
}

impl Trit {
    pub fn is_erased(self) -> bool {
        self == Trit::Erased
    }

    pub fn to_char(self) -> char {
        match self {
            Trit::Zero => '0',
            Trit::One => '1',
            Trit::Erased => '*',
        }
    }

    pub fn from_char(ch: char) -> Option<Self> {
        match ch {
            '0' => Some(Trit::Zero),
            '1' => Some(Trit::One),
            '*' | '⊥' => Some(Trit::Erased),
            _ => None,
        }
    }
}

/// A sequence over `{0, 1, ⊥}` with word-parallel compatibility and merge.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TritString {
    len: usize,
    value: Vec<u64>,
    known: Vec<u64>,
}

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

#[inline]
fn low_mask(cnt: usize) -> u64 {
    if cnt >= WORD {
        u64::MAX
    } else {
        (1u64 << cnt) - 1
    }
}

/// Reads `cnt <= 64` bits starting at bit `pos`. Bits past the logical end
/// are zero by the storage invariant.
#[inline]
fn read_bits(words: &[u64], pos: usize, cnt: usize) -> u64 {
    if cnt == 0 {
        return 0;
    }
    let w = pos / WORD;
    let o = pos % WORD;
    let mut v = words[w] >> o;
    if o != 0 && w + 1 < words.len() {
        v |= words[w + 1] << (WORD - o);
    }
    v & low_mask(cnt)
}

impl TritString {
    /// The empty string.
    pub fn new() -> Self {
        Self::default()
    }

    /// A string of `len` erased symbols.
    pub fn erased(len: usize) -> Self {
        Self {
            len,
            value: vec![0; words_for(len)],
            known: vec![0; words_for(len)],
        }
    }

    /// An unerased binary string.
    pub fn from_bits(bits: &[bool]) -> Self {
        bits.iter()
            .map(|&b| if b { Trit::One } else { Trit::Zero })
            .collect()
    }

    /// Builds an unerased binary string of `len` symbols from packed words
    /// (bit `i` of the string is bit `i % 64` of word `i / 64`).
    pub fn from_packed_bits(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(words_for(len), 0);
        let mut known = vec![u64::MAX; words_for(len)];
        if len % WORD != 0 {
            let last = words.len() - 1;
            words[last] &= low_mask(len % WORD);
            known[last] = low_mask(len % WORD);
        }
        Self {
            len,
            value: words,
            known,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of unerased symbols.
    pub fn size(&self) -> usize {
        self.known.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// `(length, size)`.
    pub fn measure(&self) -> (usize, usize) {
        (self.len, self.size())
    }

    /// True when no symbol is erased.
    pub fn is_binary(&self) -> bool {
        self.size() == self.len
    }

    pub fn get(&self, i: usize) -> Trit {
        assert!(
            i < self.len,
            "index {i} out of range for length {}",
            self.len
        );
        let (w, b) = (i / WORD, i % WORD);
        if (self.known[w] >> b) & 1 == 0 {
            Trit::Erased
        } else if (self.value[w] >> b) & 1 == 1 {
            Trit::One
        } else {
            Trit::Zero
        }
    }

    pub fn set(&mut self, i: usize, t: Trit) {
        assert!(
            i < self.len,
            "index {i} out of range for length {}",
            self.len
        );
        let (w, b) = (i / WORD, i % WORD);
        let bit = 1u64 << b;
        match t {
            Trit::Erased => {
                self.known[w] &= !bit;
                self.value[w] &= !bit;
            }
            Trit::Zero => {
                self.known[w] |= bit;
                self.value[w] &= !bit;
            }
            Trit::One => {
                self.known[w] |= bit;
                self.value[w] |= bit;
            }
        }
    }

    /// Erases position `i`.
    pub fn erase(&mut self, i: usize) {
        self.set(i, Trit::Erased);
    }

    pub fn iter(&self) -> impl Iterator<Item = Trit> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Indices of the unerased symbols, ascending.
    pub fn unerased_positions(&self) -> Vec<usize> {
        (0..self.len)
            .filter(|&i| (self.known[i / WORD] >> (i % WORD)) & 1 == 1)
            .collect()
    }

    fn push_chunk(&mut self, val: u64, kn: u64, cnt: usize) {
        debug_assert!(cnt <= WORD);
        if cnt == 0 {
            return;
        }
        let (val, kn) = (val & low_mask(cnt), kn & low_mask(cnt));
        let o = self.len % WORD;
        if o == 0 {
            self.value.push(val);
            self.known.push(kn);
        } else {
            let last = self.value.len() - 1;
            self.value[last] |= val << o;
            self.known[last] |= kn << o;
            if o + cnt > WORD {
                self.value.push(val >> (WORD - o));
                self.known.push(kn >> (WORD - o));
            }
        }
        self.len += cnt;
    }

    /// Appends `src[start .. start + cnt]`.
    fn push_range(&mut self, src: &TritString, start: usize, cnt: usize) {
        debug_assert!(start + cnt <= src.len);
        let mut done = 0;
        while done < cnt {
            let take = (cnt - done).min(WORD);
            let v = read_bits(&src.value, start + done, take);
            let k = read_bits(&src.known, start + done, take);
            self.push_chunk(v, k, take);
            done += take;
        }
    }

    pub fn push(&mut self, t: Trit) {
        match t {
            Trit::Zero => self.push_chunk(0, 1, 1),
            Trit::One => self.push_chunk(1, 1, 1),
            Trit::Erased => self.push_chunk(0, 0, 1),
        }
    }

    fn slice_unchecked(&self, start: usize, cnt: usize) -> TritString {
        let mut out = TritString {
            len: 0,
            value: Vec::with_capacity(words_for(cnt)),
            known: Vec::with_capacity(words_for(cnt)),
        };
        out.push_range(self, start, cnt);
        out
    }

    /// The substring `self[start .. start + len]`.
    pub fn slice(&self, start: usize, len: usize) -> Result<TritString, TritError> {
        if start + len > self.len {
            return Err(TritError::OutOfRange {
                requested: start + len,
                length: self.len,
            });
        }
        Ok(self.slice_unchecked(start, len))
    }

    /// The first `l` symbols.
    pub fn prefix(&self, l: usize) -> Result<TritString, TritError> {
        self.slice(0, l)
    }

    /// The last `l` symbols.
    pub fn suffix(&self, l: usize) -> Result<TritString, TritError> {
        if l > self.len {
            return Err(TritError::OutOfRange {
                requested: l,
                length: self.len,
            });
        }
        Ok(self.slice_unchecked(self.len - l, l))
    }

    /// Number of unerased symbols among the last `l`.
    pub fn suffix_size(&self, l: usize) -> usize {
        assert!(l <= self.len);
        self.range_size(self.len - l, l)
    }

    fn range_size(&self, start: usize, cnt: usize) -> usize {
        let mut total = 0;
        let mut done = 0;
        while done < cnt {
            let take = (cnt - done).min(WORD);
            total += read_bits(&self.known, start + done, take).count_ones() as usize;
            done += take;
        }
        total
    }

    /// Length-`len` window starting at `start`, wrapping around the end.
    /// Requires `len <= self.len()` and a non-empty string when `len > 0`.
    pub fn cyclic_window(&self, start: usize, len: usize) -> TritString {
        assert!(len <= self.len, "window longer than the string");
        if len == 0 {
            return TritString::new();
        }
        let start = start % self.len;
        let first = len.min(self.len - start);
        let mut out = self.slice_unchecked(start, first);
        out.push_range(self, 0, len - first);
        out
    }

    /// Cyclic rotation so that position `k` comes first.
    pub fn rotate_left(&self, k: usize) -> TritString {
        if self.len == 0 {
            return TritString::new();
        }
        self.cyclic_window(k, self.len)
    }

    /// Concatenation.
    pub fn concat(&self, other: &TritString) -> TritString {
        let mut out = self.clone();
        out.push_range(other, 0, other.len);
        out
    }
}

/// True when `a[a_start ..]` and `b[b_start ..]` agree over `cnt` symbols
/// wherever both are unerased.
#[inline]
pub(crate) fn windows_compatible(
    a: &TritString,
    a_start: usize,
    b: &TritString,
    b_start: usize,
    cnt: usize,
) -> bool {
    let mut done = 0;
    while done < cnt {
        let take = (cnt - done).min(WORD);
        let av = read_bits(&a.value, a_start + done, take);
        let ak = read_bits(&a.known, a_start + done, take);
        let bv = read_bits(&b.value, b_start + done, take);
        let bk = read_bits(&b.known, b_start + done, take);
        if (av ^ bv) & ak & bk != 0 {
            return false;
        }
        done += take;
    }
    true
}

/// Like [`windows_compatible`] but the window of `b` wraps cyclically.
pub(crate) fn window_compatible_cyclic(a: &TritString, b: &TritString, b_start: usize) -> bool {
    let cnt = a.len;
    let first = cnt.min(b.len - b_start);
    windows_compatible(a, 0, b, b_start, first) && windows_compatible(a, first, b, 0, cnt - first)
}

/// Symbol-wise compatibility of two equal-length strings: wherever the
/// symbols differ at least one of them is erased.
pub fn compatible(u: &TritString, v: &TritString) -> Result<bool, TritError> {
    if u.len != v.len {
        return Err(TritError::LengthMismatch {
            left: u.len,
            right: v.len,
        });
    }
    Ok(windows_compatible(u, 0, v, 0, u.len))
}

/// `compatible(suffix(u, l), prefix(v, l))`.
pub fn is_l_compatible(u: &TritString, v: &TritString, l: usize) -> Result<bool, TritError> {
    let bound = u.len.min(v.len);
    if l > bound {
        return Err(TritError::OutOfRange {
            requested: l,
            length: bound,
        });
    }
    Ok(windows_compatible(u, u.len - l, v, 0, l))
}

/// All 0-indexed positions `p` such that `v` is compatible with the
/// `v.len()`-window of `u` starting at `p`. Windows wrap around when
/// `cyclic` is set; otherwise only the `u.len() - v.len() + 1` in-range
/// windows are scanned.
pub fn compatible_positions(v: &TritString, u: &TritString, cyclic: bool) -> Vec<usize> {
    if v.len > u.len {
        return Vec::new();
    }
    if cyclic && !u.is_empty() {
        (0..u.len)
            .filter(|&p| window_compatible_cyclic(v, u, p))
            .collect()
    } else {
        (0..=u.len - v.len)
            .filter(|&p| windows_compatible(v, 0, u, p, v.len))
            .collect()
    }
}

/// True when `v` is compatible with at least one window of `u`.
pub fn is_compatible_substring(v: &TritString, u: &TritString, cyclic: bool) -> bool {
    if v.len > u.len {
        return false;
    }
    if cyclic && !u.is_empty() {
        (0..u.len).any(|p| window_compatible_cyclic(v, u, p))
    } else {
        (0..=u.len - v.len).any(|p| windows_compatible(v, 0, u, p, v.len))
    }
}

/// Merges `u` and `v` with overlap `l`:
/// `prefix(u, |u| - l) ∥ z ∥ suffix(v, |v| - l)`, where `z` fills each
/// overlap position from whichever side is unerased.
///
/// Requires `1 <= l <= min(|u|, |v|)`, `v` l-compatible with `u`, and at
/// least one unerased symbol in the merging suffix of `u`.
pub fn merge(u: &TritString, v: &TritString, l: usize) -> Result<TritString, TritError> {
    if l == 0 {
        return Err(TritError::ZeroOverlap);
    }
    if !is_l_compatible(u, v, l)? {
        return Err(TritError::NotCompatible { overlap: l });
    }
    if u.suffix_size(l) == 0 {
        return Err(TritError::ErasedSuffix { overlap: l });
    }
    Ok(merge_unchecked(u, v, l))
}

/// Merge without the non-empty-suffix precondition. Compatibility is still
/// required by callers; ground-truth island construction uses this since
/// true overlaps merge even when fully erased.
pub(crate) fn merge_unchecked(u: &TritString, v: &TritString, l: usize) -> TritString {
    debug_assert!(l <= u.len && l <= v.len);
    let mut out = TritString {
        len: 0,
        value: Vec::with_capacity(words_for(u.len + v.len - l)),
        known: Vec::with_capacity(words_for(u.len + v.len - l)),
    };
    out.push_range(u, 0, u.len - l);
    let mut done = 0;
    let base = u.len - l;
    while done < l {
        let take = (l - done).min(WORD);
        let uv = read_bits(&u.value, base + done, take);
        let uk = read_bits(&u.known, base + done, take);
        let vv = read_bits(&v.value, done, take);
        let vk = read_bits(&v.known, done, take);
        out.push_chunk((uv & uk) | (vv & vk), uk | vk, take);
        done += take;
    }
    out.push_range(v, l, v.len - l);
    out
}

impl FromIterator<Trit> for TritString {
    fn from_iter<I: IntoIterator<Item = Trit>>(iter: I) -> Self {
        let mut out = TritString::new();
        for t in iter {
            out.push(t);
        }
        out
    }
}

impl FromStr for TritString {
    type Err = TritError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .enumerate()
            .map(|(i, ch)| Trit::from_char(ch).ok_or(TritError::BadSymbol { ch, index: i }))
            .collect()
    }
}

impl fmt::Display for TritString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in self.iter() {
            write!(f, "{}", t.to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for TritString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl Serialize for TritString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TritString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> TritString {
        s.parse().unwrap()
    }

    #[test]
    fn measure_examples() {
        assert_eq!(t("").measure(), (0, 0));
        assert_eq!(t("1*0*").measure(), (4, 2));
        assert_eq!(t("***").measure(), (3, 0));
        assert_eq!(t("1⊥0⊥"), t("1*0*"));
    }

    #[test]
    fn affixes() {
        let u = t("10*1");
        assert_eq!(u.prefix(2).unwrap(), t("10"));
        assert_eq!(u.suffix(2).unwrap(), t("*1"));
        assert_eq!(u.prefix(4).unwrap(), u);
        assert_eq!(u.suffix(0).unwrap(), t(""));
        assert!(matches!(u.prefix(5), Err(TritError::OutOfRange { .. })));
        assert!(matches!(u.suffix(5), Err(TritError::OutOfRange { .. })));
    }

    #[test]
    fn compatibility_examples() {
        assert!(compatible(&t("1*0"), &t("110")).unwrap());
        assert!(!compatible(&t("1*0"), &t("111")).unwrap());
        assert!(compatible(&t("**"), &t("01")).unwrap());
        assert!(compatible(&t("1"), &t("10")).is_err());
    }

    #[test]
    fn l_compatibility_examples() {
        assert!(is_l_compatible(&t("1*0"), &t("10*1"), 2).unwrap());
        assert!(!is_l_compatible(&t("11"), &t("01"), 1).unwrap());
        assert!(is_l_compatible(&t("11"), &t("01"), 0).unwrap());
        assert!(is_l_compatible(&t("11"), &t("01"), 3).is_err());
    }

    #[test]
    fn substring_positions() {
        // 0-indexed: windows "01" at 0 and "11" at 1 match "*1", "10" at 2 fails.
        assert_eq!(
            compatible_positions(&t("*1"), &t("0110"), false),
            vec![0, 1]
        );
        let u = t("0110");
        assert_eq!(compatible_positions(&u, &u, false), vec![0]);
        // Wrap-around window covering positions 3 and 0.
        assert_eq!(compatible_positions(&t("11"), &t("1001"), true), vec![3]);
        assert!(compatible_positions(&t("11"), &t("1001"), false).is_empty());
        assert!(compatible_positions(&t("00000"), &t("1001"), true).is_empty());
    }

    #[test]
    fn merge_examples() {
        assert_eq!(merge(&t("1*0"), &t("10*1"), 2).unwrap(), t("110*1"));
        assert_eq!(merge(&t("10*1"), &t("*110"), 2).unwrap(), t("10*110"));
        assert!(matches!(
            merge(&t("11"), &t("01"), 1),
            Err(TritError::NotCompatible { overlap: 1 })
        ));
        assert!(matches!(
            merge(&t("1**"), &t("**1"), 2),
            Err(TritError::ErasedSuffix { overlap: 2 })
        ));
        assert!(matches!(
            merge(&t("1"), &t("1"), 0),
            Err(TritError::ZeroOverlap)
        ));
    }

    #[test]
    fn long_strings_cross_word_boundaries() {
        let s: String = (0..150)
            .map(|i| match i % 7 {
                0 => '*',
                1 | 4 => '1',
                _ => '0',
            })
            .collect();
        let u = t(&s);
        assert_eq!(u.to_string(), s);
        assert_eq!(u.slice(61, 70).unwrap().to_string(), &s[61..131]);
        let w = u.cyclic_window(140, 30);
        assert_eq!(w.to_string(), format!("{}{}", &s[140..], &s[..20]));
        let m = merge(&u, &u.suffix(80).unwrap().concat(&t("1")), 80).unwrap();
        assert_eq!(m.to_string(), format!("{s}1"));
    }

    #[test]
    fn packed_bits() {
        let x = TritString::from_packed_bits(5, vec![0b1_0110]);
        assert_eq!(x.to_string(), "01101");
        assert!(x.is_binary());
    }

    #[test]
    fn serde_roundtrip() {
        let u = t("01*1");
        let j = serde_json::to_string(&u).unwrap();
        assert_eq!(j, "\"01*1\"");
        assert_eq!(serde_json::from_str::<TritString>(&j).unwrap(), u);
        assert!(serde_json::from_str::<TritString>("\"01x\"").is_err());
    }
}
