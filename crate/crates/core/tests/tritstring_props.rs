use proptest::prelude::*;

use sse_core::tritstring::{
    compatible, compatible_positions, is_compatible_substring, is_l_compatible, merge,
};
use sse_core::{Trit, TritError, TritString};

fn trit() -> impl Strategy<Value = Trit> {
    prop_oneof![Just(Trit::Zero), Just(Trit::One), Just(Trit::Erased)]
}

fn trits(max: usize) -> impl Strategy<Value = TritString> {
    prop::collection::vec(trit(), 0..=max).prop_map(|v| v.into_iter().collect())
}

/// Reference compatibility over `Vec<Trit>`.
fn naive_compatible(a: &[Trit], b: &[Trit]) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(x, y)| x.is_erased() || y.is_erased() || x == y)
}

fn syms(s: &TritString) -> Vec<Trit> {
    s.iter().collect()
}

/// Equal-length pair that agrees on known symbols, built by erasing parts of
/// one base string.
fn compatible_pair(max: usize) -> impl Strategy<Value = (TritString, TritString)> {
    prop::collection::vec((any::<bool>(), any::<bool>(), any::<bool>()), 0..=max).prop_map(|v| {
        let a = v
            .iter()
            .map(|&(b, ea, _)| {
                if ea {
                    Trit::Erased
                } else if b {
                    Trit::One
                } else {
                    Trit::Zero
                }
            })
            .collect();
        let b = v
            .iter()
            .map(|&(b, _, eb)| {
                if eb {
                    Trit::Erased
                } else if b {
                    Trit::One
                } else {
                    Trit::Zero
                }
            })
            .collect();
        (a, b)
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 2000, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn display_parse_round_trip(s in trits(150)) {
        let text = s.to_string();
        prop_assert_eq!(text.chars().count(), s.len());
        prop_assert_eq!(text.parse::<TritString>().unwrap(), s);
    }

    #[test]
    fn compatibility_is_reflexive_and_symmetric(a in trits(130), b in trits(130)) {
        prop_assert!(compatible(&a, &a).unwrap());
        match compatible(&a, &b) {
            Ok(x) => {
                prop_assert_eq!(Ok(x), compatible(&b, &a));
                prop_assert_eq!(x, naive_compatible(&syms(&a), &syms(&b)));
            }
            Err(e) => {
                let is_mismatch = matches!(e, TritError::LengthMismatch { .. });
                prop_assert!(is_mismatch);
                prop_assert!(a.len() != b.len());
            }
        }
    }

    #[test]
    fn erasing_preserves_compatibility((a, b) in compatible_pair(100), idx in any::<prop::sample::Index>()) {
        prop_assert!(compatible(&a, &b).unwrap());
        if !a.is_empty() {
            let mut c = a.clone();
            c.erase(idx.index(a.len()));
            prop_assert!(compatible(&c, &b).unwrap());
            prop_assert!(c.size() + 1 >= a.size());
        }
    }

    #[test]
    fn measure_and_size(s in trits(200)) {
        let (len, size) = s.measure();
        prop_assert_eq!(len, s.len());
        prop_assert_eq!(size, syms(&s).iter().filter(|t| !t.is_erased()).count());
        prop_assert_eq!(s.unerased_positions().len(), size);
        prop_assert_eq!(s.is_binary(), size == len);
    }

    #[test]
    fn slicing_identities(s in trits(200), cut in any::<prop::sample::Index>()) {
        let k = cut.index(s.len() + 1);
        let p = s.prefix(k).unwrap();
        let q = s.suffix(s.len() - k).unwrap();
        prop_assert_eq!(p.concat(&q), s.clone());
        prop_assert_eq!(p.size() + q.size(), s.size());
        prop_assert_eq!(s.suffix_size(s.len() - k), q.size());
        prop_assert!(s.prefix(s.len() + 1).is_err());
    }

    #[test]
    fn merge_length_and_size((u0, v0) in compatible_pair(80), pre in trits(40), post in trits(40)) {
        // u = pre ∥ u0, v = v0 ∥ post, overlap l = |u0|.
        let l = u0.len();
        let u = pre.concat(&u0);
        let v = v0.concat(&post);
        match merge(&u, &v, l) {
            Ok(m) => {
                prop_assert!(l >= 1 && u0.size() > 0);
                prop_assert_eq!(m.len(), u.len() + v.len() - l);
                let union = syms(&u0).iter().zip(syms(&v0)).filter(|(a, b)| !a.is_erased() || !b.is_erased()).count();
                prop_assert_eq!(m.size(), pre.size() + union + post.size());
                prop_assert!(compatible(&m.prefix(u.len()).unwrap(), &u).unwrap());
                prop_assert!(compatible(&m.suffix(v.len()).unwrap(), &v).unwrap());
            }
            Err(TritError::ZeroOverlap) => prop_assert_eq!(l, 0),
            Err(TritError::ErasedSuffix { .. }) => prop_assert_eq!(u0.size(), 0),
            Err(e) => prop_assert!(false, "unexpected {e}"),
        }
    }

    #[test]
    fn merge_rejects_incompatible(u in trits(30), v in trits(30), l in 1usize..30) {
        if l <= u.len().min(v.len()) {
            let ok = is_l_compatible(&u, &v, l).unwrap();
            let want = naive_compatible(&syms(&u)[u.len() - l..], &syms(&v)[..l]);
            prop_assert_eq!(ok, want);
            if !ok {
                prop_assert_eq!(merge(&u, &v, l), Err(TritError::NotCompatible { overlap: l }));
            }
        } else {
            prop_assert!(is_l_compatible(&u, &v, l).is_err());
        }
    }

    #[test]
    fn substring_search_matches_naive(v in trits(12), u in trits(40), cyclic in any::<bool>()) {
        let vs = syms(&v);
        let us = syms(&u);
        let want: Vec<usize> = if vs.len() > us.len() {
            Vec::new()
        } else if cyclic && !us.is_empty() {
            (0..us.len())
                .filter(|&p| naive_compatible(&vs, &(0..vs.len()).map(|j| us[(p + j) % us.len()]).collect::<Vec<_>>()))
                .collect()
        } else {
            (0..=us.len() - vs.len()).filter(|&p| naive_compatible(&vs, &us[p..p + vs.len()])).collect()
        };
        prop_assert_eq!(compatible_positions(&v, &u, cyclic), want.clone());
        prop_assert_eq!(is_compatible_substring(&v, &u, cyclic), !want.is_empty());
    }

    #[test]
    fn cyclic_windows_and_rotation(s in trits(100).prop_filter("non-empty", |s| !s.is_empty()), k in 0usize..300, len in 0usize..100) {
        let n = s.len();
        let r = s.rotate_left(k);
        prop_assert_eq!(r.len(), n);
        prop_assert_eq!(r.rotate_left(n - k % n), s.clone());
        let len = len.min(n);
        let w = s.cyclic_window(k % n, len);
        prop_assert_eq!(w, r.prefix(len).unwrap());
    }
}
