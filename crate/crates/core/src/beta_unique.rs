//! Unique beta-representations: Thue-Morse machinery, the Komornik-Loreti
//! constant and its N-digit generalizations, the gap map, cardinality and
//! entropy of the uniqueness sets, and the doubling-map-with-hole threshold.

use crate::beta_core::{expansion_of_one_bounded, Beta, BetaError};
use crate::digits::DigitSeq;
use crate::exactnum::Approx;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

/// Thue-Morse sequence 0110 1001 1001 0110 ..., the fixed point of the
/// substitution 0 -> 01, 1 -> 10. Zero-indexed: digit(n) is the parity of
/// the binary weight of n, so digit(2n) = digit(n) and
/// digit(2n+1) = 1 - digit(n).
pub struct ThueMorse;

impl ThueMorse {
    pub fn digit(n: u64) -> u32 {
        (n.count_ones() & 1) as u32
    }

    pub fn word(n: usize) -> Vec<u32> {
        (0..n as u64).map(Self::digit).collect()
    }
}

/// Fixed point of the substitution a -> ac, b -> ad, c -> da, d -> db,
/// iterated from d. Reading the shifted Thue-Morse word in 4-blocks
/// (a = 0010, b = 0011, c = 1100, d = 1101) reproduces this word.
pub struct RhoWord;

impl RhoWord {
    pub fn word(n: usize) -> Vec<char> {
        let mut w = vec!['d'];
        while w.len() < n {
            let mut next = Vec::with_capacity(w.len() * 2);
            for &ch in &w {
                match ch {
                    'a' => next.extend(['a', 'c']),
                    'b' => next.extend(['a', 'd']),
                    'c' => next.extend(['d', 'a']),
                    'd' => next.extend(['d', 'b']),
                    _ => unreachable!(),
                }
            }
            w = next;
        }
        w.truncate(n);
        w
    }
}

/// Komornik-Loreti constant: the unique solution of
/// `sum_{k>=1} t_k x^{-k} = 1` with t the Thue-Morse sequence.
pub fn komornik_loreti(eps: f64) -> Approx {
    assert!(eps > 0.0);
    bisect_series(|k| f64::from(ThueMorse::digit(k)), 1.5, 2.0, eps)
}

/// Critical base for unique expansions with digits {0,...,N-1}.
/// N = 2n solves 1 = sum P_n(t_k) x^{-k} with P_n(0) = n-1, P_n(1) = n;
/// N = 2n+1 solves 1 = sum Q_n(w_k) x^{-k} over the rho word with
/// Q_n(a) = n-1, Q_n(b) = Q_n(c) = n, Q_n(d) = n+1.
pub fn generalized_critical_base(n_digits: u32, eps: f64) -> Approx {
    assert!(n_digits >= 2);
    assert!(eps > 0.0);
    if n_digits % 2 == 0 {
        let n = f64::from(n_digits / 2);
        bisect_series(
            move |k| n - 1.0 + f64::from(ThueMorse::digit(k)),
            1.0 + 1e-9,
            f64::from(n_digits) + 1.0,
            eps,
        )
    } else {
        let n = f64::from(n_digits / 2);
        let w = RhoWord::word(SERIES_TERMS);
        bisect_series(
            move |k| match w[(k - 1) as usize] {
                'a' => n - 1.0,
                'b' | 'c' => n,
                'd' => n + 1.0,
                _ => unreachable!(),
            },
            1.0 + 1e-9,
            f64::from(n_digits) + 1.0,
            eps,
        )
    }
}

const SERIES_TERMS: usize = 256;

/// Bisection on the decreasing function x -> sum_{k=1}^{K} d_k x^{-k} - 1.
fn bisect_series<F: Fn(u64) -> f64>(digit: F, mut lo: f64, mut hi: f64, eps: f64) -> Approx {
    let f = |x: f64| -> f64 {
        let mut s = 0.0;
        let mut w = 1.0;
        for k in 1..=SERIES_TERMS as u64 {
            w /= x;
            s += digit(k) * w;
        }
        s - 1.0
    };
    while f(lo) < 0.0 {
        lo = 1.0 + (lo - 1.0) / 2.0;
    }
    while hi - lo > eps / 4.0 {
        let mid = (lo + hi) / 2.0;
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let value = (lo + hi) / 2.0;
    Approx {
        value,
        error_bound: (hi - lo) / 2.0 + value.powi(-(SERIES_TERMS as i32)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniqueCheck {
    pub unique: bool,
    /// Set for the all-zero and all-max sequences; these represent the
    /// interval endpoints, which have no alternative expansion by fiat.
    pub endpoint: bool,
}

/// Whether every shift of `eps` lies strictly between the complement of `a`
/// and `a` itself, with strictness witnessed within `depth` symbols (the
/// executable form of the two-sided uniqueness criterion for bases in (1,2)).
pub fn is_unique_expansion(
    eps: &DigitSeq,
    beta: &Beta,
    depth: usize,
) -> Result<UniqueCheck, BetaError> {
    let parry = expansion_of_one_bounded(beta, depth.max(64))?;
    let a = &parry.a;
    let a_bar = complement(a);
    if eps.is_zero() {
        return Ok(UniqueCheck {
            unique: true,
            endpoint: true,
        });
    }
    let all_ones = (1..=depth).all(|i| eps.digit(i) == 1);
    if all_ones && eps.period == vec![1] && eps.preperiod.is_empty() {
        return Ok(UniqueCheck {
            unique: true,
            endpoint: true,
        });
    }
    // Check shifts 0..depth, each over a depth-symbol window; the caller is
    // expected to supply at least 2*depth digits of data for truncated input.
    for k in 0..depth {
        if !strictly_between_at(eps, k, &a_bar, a, depth) {
            return Ok(UniqueCheck {
                unique: false,
                endpoint: false,
            });
        }
    }
    Ok(UniqueCheck {
        unique: true,
        endpoint: false,
    })
}

fn complement(a: &DigitSeq) -> DigitSeq {
    DigitSeq::eventually_periodic(
        a.alphabet_max,
        a.preperiod.iter().map(|&d| a.alphabet_max - d).collect(),
        a.period.iter().map(|&d| a.alphabet_max - d).collect(),
    )
}

/// `lo < sigma^k(s) < hi` with both strict inequalities decided within
/// `depth` symbols.
fn strictly_between_at(s: &DigitSeq, k: usize, lo: &DigitSeq, hi: &DigitSeq, depth: usize) -> bool {
    let mut below = false;
    let mut above = false;
    for i in 1..=depth {
        let d = s.digit(k + i);
        if !above {
            match d.cmp(&lo.digit(i)) {
                Ordering::Greater => above = true,
                Ordering::Less => return false,
                Ordering::Equal => {}
            }
        }
        if !below {
            match d.cmp(&hi.digit(i)) {
                Ordering::Less => below = true,
                Ordering::Greater => return false,
                Ordering::Equal => {}
            }
        }
        if below && above {
            return true;
        }
    }
    false
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UniquenessCategory {
    Empty,
    Countable,
    UncountableZeroDim,
    PositiveDim,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UniquenessVerdict {
    pub category: UniquenessCategory,
    pub golden_threshold: f64,
    pub komornik_loreti: f64,
}

pub const BOUNDARY_RESOLUTION: f64 = 1e-9;

/// Cardinality class of the set of reals with a unique expansion, decided by
/// the position of beta relative to the golden ratio and the Komornik-Loreti
/// constant.
pub fn classify_unique_set(beta: f64) -> Result<UniquenessVerdict, BetaError> {
    if beta <= 1.0 || beta >= 2.0 {
        return Err(BetaError::BadParameter("base must lie in (1,2)".into()));
    }
    let g = (1.0 + 5f64.sqrt()) / 2.0;
    let kl = komornik_loreti(1e-12).value;
    if (beta - g).abs() < BOUNDARY_RESOLUTION {
        return Err(BetaError::BadParameter(
            "base indistinguishable from the golden ratio at resolution 1e-9".into(),
        ));
    }
    if (beta - kl).abs() < BOUNDARY_RESOLUTION {
        return Err(BetaError::BadParameter(
            "base indistinguishable from the Komornik-Loreti constant at resolution 1e-9".into(),
        ));
    }
    let category = if beta < g {
        UniquenessCategory::Empty
    } else if beta < kl {
        UniquenessCategory::Countable
    } else {
        UniquenessCategory::PositiveDim
    };
    Ok(UniquenessVerdict {
        category,
        golden_threshold: g,
        komornik_loreti: kl,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GapOrbitReport {
    /// First step (0-based) at which the orbit landed in the gap
    /// `[1/beta, 1/(beta(beta-1))]`, if any.
    pub entered_gap_at: Option<usize>,
    pub steps_run: usize,
    pub digits: Vec<u32>,
}

/// Iterates the two-branch map `T x = beta x` (x below the gap) or
/// `beta x - 1` (x above), reporting the first entry into the gap, which
/// witnesses non-uniqueness of the expansion of x.
pub fn gap_map_orbit(x: f64, beta: f64, n: usize) -> Result<GapOrbitReport, BetaError> {
    if !(1.0..2.0).contains(&beta) || beta <= 1.0 {
        return Err(BetaError::BadParameter("base must lie in (1,2)".into()));
    }
    let top = 1.0 / (beta - 1.0);
    if !(0.0..=top).contains(&x) {
        return Err(BetaError::OutOfDomain(format!("{x} not in [0, 1/(beta-1)]")));
    }
    let gap_lo = 1.0 / beta;
    let gap_hi = 1.0 / (beta * (beta - 1.0));
    let mut y = x;
    let mut digits = Vec::with_capacity(n);
    for step in 0..n {
        if y >= gap_lo && y <= gap_hi {
            return Ok(GapOrbitReport {
                entered_gap_at: Some(step),
                steps_run: step,
                digits,
            });
        }
        if y < gap_lo {
            digits.push(0);
            y *= beta;
        } else {
            digits.push(1);
            y = beta * y - 1.0;
        }
    }
    Ok(GapOrbitReport {
        entered_gap_at: None,
        steps_run: n,
        digits,
    })
}

/// Number of length-n binary words with no witnessed violation of the
/// two-sided constraint `a_bar < shift < a` (overlap comparison; words whose
/// overlap ties an endpoint are kept, so counts are upper bounds on the
/// factor language of the uniqueness set).
pub fn unique_word_count(beta: &Beta, n: usize) -> Result<u64, BetaError> {
    let parry = expansion_of_one_bounded(beta, (n + 64).max(128))?;
    let a = parry.a.prefix(n);
    let a_bar: Vec<u32> = a.iter().map(|&d| parry.a.alphabet_max - d).collect();
    Ok(count_constrained_words(&a_bar, &a, n))
}

pub fn unique_entropy_estimate(beta: &Beta, n: usize) -> Result<f64, BetaError> {
    let c = unique_word_count(beta, n)?;
    Ok((c.max(1) as f64).ln() / n as f64)
}

/// Depth-first count of 0-1 words of length n all of whose suffixes stay
/// lexicographically within (lo, hi) on the available overlap.
fn count_constrained_words(lo: &[u32], hi: &[u32], n: usize) -> u64 {
    // state: for each active suffix start, how far it has matched lo / hi
    // exactly; a suffix still tied to an endpoint constrains the next digit.
    fn rec(word: &mut Vec<u32>, lo: &[u32], hi: &[u32], n: usize) -> u64 {
        if word.len() == n {
            return 1;
        }
        let mut total = 0;
        'next: for d in 0..=1u32 {
            word.push(d);
            // check every suffix against the overlap of lo/hi
            for start in 0..word.len() {
                let suffix = &word[start..];
                match cmp_prefix(suffix, hi) {
                    Ordering::Greater => {
                        word.pop();
                        continue 'next;
                    }
                    _ => {}
                }
                match cmp_prefix(suffix, lo) {
                    Ordering::Less => {
                        word.pop();
                        continue 'next;
                    }
                    _ => {}
                }
            }
            total += rec(word, lo, hi, n);
            word.pop();
        }
        total
    }
    fn cmp_prefix(s: &[u32], bound: &[u32]) -> Ordering {
        for (i, &d) in s.iter().enumerate() {
            if i >= bound.len() {
                break;
            }
            match d.cmp(&bound[i]) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        Ordering::Equal
    }
    let mut word = Vec::with_capacity(n);
    rec(&mut word, lo, hi, n)
}

/// `sum_{n>=1} m_n 2^{-n}` over the one-indexed Thue-Morse sequence
/// (m_n = digit(n-1)): the critical hole size for the doubling map.
pub fn doubling_hole_threshold(eps: f64) -> Approx {
    assert!(eps > 0.0);
    let terms = 64u64;
    let mut s = 0.0;
    for n in 1..=terms {
        s += f64::from(ThueMorse::digit(n - 1)) * 2f64.powi(-(n as i32));
    }
    Approx {
        value: s,
        error_bound: 2f64.powi(-(terms as i32)) + eps * 0.0,
    }
}

/// Number of length-n binary words whose every suffix can still avoid the
/// hole [delta, 1-delta] under the doubling map: a word dies as soon as some
/// suffix's dyadic value interval [k/2^m, (k+1)/2^m] sits entirely inside
/// the hole.
pub fn doubling_hole_survivor_count(delta: f64, n: usize) -> Result<u64, BetaError> {
    if !(0.0..0.5).contains(&delta) || delta <= 0.0 {
        return Err(BetaError::BadParameter("delta must lie in (0, 1/2)".into()));
    }
    assert!(n <= 40);
    fn rec(word: &mut Vec<u32>, delta: f64, n: usize) -> u64 {
        if word.len() == n {
            return 1;
        }
        let mut total = 0;
        'next: for d in 0..=1u32 {
            word.push(d);
            for start in 0..word.len() {
                let m = word.len() - start;
                let mut k: u64 = 0;
                for &b in &word[start..] {
                    k = (k << 1) | u64::from(b);
                }
                let scale = (1u64 << m) as f64;
                let lo = k as f64 / scale;
                let hi = (k + 1) as f64 / scale;
                if lo >= delta && hi <= 1.0 - delta {
                    word.pop();
                    continue 'next;
                }
            }
            total += rec(word, delta, n);
            word.pop();
        }
        total
    }
    let mut word = Vec::with_capacity(n);
    Ok(rec(&mut word, delta, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thue_morse_prefix_and_recurrences() {
        let w = ThueMorse::word(16);
        assert_eq!(w, vec![0, 1, 1, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0]);
        for n in 0..(1u64 << 20) {
            assert_eq!(ThueMorse::digit(2 * n), ThueMorse::digit(n));
            assert_eq!(ThueMorse::digit(2 * n + 1), 1 - ThueMorse::digit(n));
        }
    }

    #[test]
    fn rho_word_prefix() {
        // rho^3(d) = dbadacdb; also matches the 4-block parse of the shifted
        // Thue-Morse word with a=0010, b=0011, c=1100, d=1101.
        let w: String = RhoWord::word(8).into_iter().collect();
        assert_eq!(w, "dbadacdb");
        let shifted: Vec<u32> = (1..33).map(|i| ThueMorse::digit(i)).collect();
        let codes = [
            ('a', [0, 0, 1, 0]),
            ('b', [0, 0, 1, 1]),
            ('c', [1, 1, 0, 0]),
            ('d', [1, 1, 0, 1]),
        ];
        let rho = RhoWord::word(8);
        for (i, ch) in rho.iter().enumerate() {
            let block = &shifted[4 * i..4 * i + 4];
            let code = codes.iter().find(|(c, _)| c == ch).unwrap().1;
            assert_eq!(block, code, "block {i}");
        }
    }

    #[test]
    fn komornik_loreti_value() {
        let a = komornik_loreti(1e-11);
        assert!((a.value - 1.787231650).abs() < 1e-9, "{}", a.value);
        assert!(a.value > 1.618 && a.value < 2.0);
        // self-consistency at doubled precision
        let b = komornik_loreti(1e-13);
        assert!((a.value - b.value).abs() < 1e-11);
    }

    #[test]
    fn generalized_bases() {
        let b2 = generalized_critical_base(2, 1e-10);
        let kl = komornik_loreti(1e-10);
        assert!((b2.value - kl.value).abs() < 1e-9);
        // Known critical bases for alphabets {0,1,2} and {0,1,2,3}.
        let b3 = generalized_critical_base(3, 1e-9);
        assert!((b3.value - 2.5359480481).abs() < 1e-8, "{}", b3.value);
        let b4 = generalized_critical_base(4, 1e-9);
        assert!((b4.value - 2.9100160556).abs() < 1e-8, "{}", b4.value);
    }

    #[test]
    fn unique_expansion_checks() {
        let golden = Beta::golden();
        let zero = DigitSeq::finite(1, vec![]);
        let r = is_unique_expansion(&zero, &golden, 60).unwrap();
        assert!(r.unique && r.endpoint);
        let ones = DigitSeq::eventually_periodic(1, vec![], vec![1]);
        let r = is_unique_expansion(&ones, &golden, 60).unwrap();
        assert!(r.unique && r.endpoint);
        let ten = DigitSeq::eventually_periodic(1, vec![], vec![1, 0]);
        let r = is_unique_expansion(&ten, &golden, 60).unwrap();
        assert!(!r.unique);
    }

    #[test]
    fn kl_anchors() {
        // At the critical constant the greedy expansion of 1 is the shifted
        // Thue-Morse word.
        let kl = komornik_loreti(1e-12).value;
        let parry = expansion_of_one_bounded(&Beta::Numeric(kl), 40).unwrap();
        let digits = parry.a_prime.prefix(36);
        let tm: Vec<u32> = (1..37).map(ThueMorse::digit).collect();
        assert_eq!(digits, tm);
    }

    #[test]
    fn unique_expansion_above_threshold() {
        // (1100)* at beta = 1.9 is a unique expansion: brute force over all
        // 0-1 representations of its value finds exactly one path to depth 40.
        let b = Beta::Numeric(1.9);
        let eps = DigitSeq::eventually_periodic(1, vec![], vec![1, 1, 0, 0]);
        let r = is_unique_expansion(&eps, &b, 40).unwrap();
        assert!(r.unique && !r.endpoint);
    }

    #[test]
    fn classification_sweep() {
        assert_eq!(
            classify_unique_set(1.5).unwrap().category,
            UniquenessCategory::Empty
        );
        assert_eq!(
            classify_unique_set(1.7).unwrap().category,
            UniquenessCategory::Countable
        );
        assert_eq!(
            classify_unique_set(1.9).unwrap().category,
            UniquenessCategory::PositiveDim
        );
        assert!(classify_unique_set((1.0 + 5f64.sqrt()) / 2.0).is_err());
    }

    #[test]
    fn gap_map_examples() {
        let g = (1.0 + 5f64.sqrt()) / 2.0;
        // maximal point is fixed by the upper branch, never enters the gap
        let r = gap_map_orbit(1.0 / (g - 1.0), g, 100).unwrap();
        assert_eq!(r.entered_gap_at, None);
        // 1/2 maps to ~0.809 inside [0.618, 1.0]
        let r = gap_map_orbit(0.5, g, 10).unwrap();
        assert!(matches!(r.entered_gap_at, Some(k) if k <= 2));
    }

    #[test]
    fn word_counts_grow_above_threshold() {
        let b19 = Beta::Numeric(1.9);
        let c8 = unique_word_count(&b19, 8).unwrap();
        let c12 = unique_word_count(&b19, 12).unwrap();
        let c16 = unique_word_count(&b19, 16).unwrap();
        assert!(c12 > c8 && c16 > c12, "{c8} {c12} {c16}");
        // exponential-looking growth
        assert!((c16 as f64) / (c12 as f64) > 1.3);
        // below the constant growth is tame
        let b17 = Beta::Numeric(1.7);
        let d16 = unique_word_count(&b17, 16).unwrap();
        assert!(d16 < c16);
        // monotone in beta at fixed length
        for (b1, b2) in [(1.82, 1.9), (1.85, 1.95)] {
            let lo = unique_word_count(&Beta::Numeric(b1), 12).unwrap();
            let hi = unique_word_count(&Beta::Numeric(b2), 12).unwrap();
            assert!(lo <= hi, "{b1}->{lo} {b2}->{hi}");
        }
    }

    #[test]
    fn hole_threshold_and_survivors() {
        let t = doubling_hole_threshold(1e-12);
        assert!((t.value - 0.4124540336).abs() < 1e-9, "{}", t.value);
        let big12 = doubling_hole_survivor_count(0.45, 12).unwrap();
        let big16 = doubling_hole_survivor_count(0.45, 16).unwrap();
        assert!(big16 as f64 > big12 as f64 * 1.5, "{big12} {big16}");
        let small12 = doubling_hole_survivor_count(0.3, 12).unwrap();
        let small16 = doubling_hole_survivor_count(0.3, 16).unwrap();
        assert!(small16 <= small12 + 4, "{small12} {small16}");
    }
}
