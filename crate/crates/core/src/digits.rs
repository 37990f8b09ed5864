//! Eventually periodic digit sequences and lexicographic machinery shared by
//! the expansion modules.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

/// Digit sequence `d_1 d_2 d_3 ...` that is either finite (trailing zeros
/// implied) or eventually periodic: `preperiod` followed by `period` repeated
/// forever. An empty `period` means the sequence ends in zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DigitSeq {
    pub alphabet_max: u32,
    pub preperiod: Vec<u32>,
    pub period: Vec<u32>,
}

impl DigitSeq {
    pub fn finite(alphabet_max: u32, digits: Vec<u32>) -> Self {
        let mut s = DigitSeq {
            alphabet_max,
            preperiod: digits,
            period: Vec::new(),
        };
        s.normalize();
        s
    }

    pub fn eventually_periodic(alphabet_max: u32, preperiod: Vec<u32>, period: Vec<u32>) -> Self {
        let mut s = DigitSeq {
            alphabet_max,
            preperiod,
            period,
        };
        s.normalize();
        s
    }

    /// Strips trailing zeros from finite sequences, collapses an all-zero
    /// period and rolls period digits out of the preperiod tail when the
    /// preperiod ends with a full copy of the period.
    fn normalize(&mut self) {
        if self.period.iter().all(|&d| d == 0) {
            self.period.clear();
        }
        if self.period.is_empty() {
            while self.preperiod.last() == Some(&0) {
                self.preperiod.pop();
            }
            return;
        }
        // Minimal period length.
        let p = self.period.len();
        for cand in 1..p {
            if p % cand == 0 && (0..p).all(|i| self.period[i] == self.period[i % cand]) {
                self.period.truncate(cand);
                break;
            }
        }
        // Shortest preperiod: absorb when the preperiod ends with the last
        // period digit rotated in.
        while let Some(&last) = self.preperiod.last() {
            if last == *self.period.last().unwrap() {
                self.preperiod.pop();
                self.period.rotate_right(1);
            } else {
                break;
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.period.is_empty()
    }

    pub fn is_eventually_periodic(&self) -> bool {
        true
    }

    /// Digit at 1-based position `n`.
    pub fn digit(&self, n: usize) -> u32 {
        assert!(n >= 1);
        let i = n - 1;
        if i < self.preperiod.len() {
            self.preperiod[i]
        } else if self.period.is_empty() {
            0
        } else {
            self.period[(i - self.preperiod.len()) % self.period.len()]
        }
    }

    pub fn prefix(&self, n: usize) -> Vec<u32> {
        (1..=n).map(|i| self.digit(i)).collect()
    }

    /// Shifted sequence `d_{k+1} d_{k+2} ...`.
    pub fn shift(&self, k: usize) -> DigitSeq {
        if k <= self.preperiod.len() {
            DigitSeq::eventually_periodic(
                self.alphabet_max,
                self.preperiod[k..].to_vec(),
                self.period.clone(),
            )
        } else if self.period.is_empty() {
            DigitSeq::finite(self.alphabet_max, Vec::new())
        } else {
            let r = (k - self.preperiod.len()) % self.period.len();
            let mut period = self.period.clone();
            period.rotate_left(r);
            DigitSeq::eventually_periodic(self.alphabet_max, Vec::new(), period)
        }
    }

    /// All distinct shifts of an eventually periodic sequence.
    pub fn all_shifts(&self) -> Vec<DigitSeq> {
        let n = self.preperiod.len() + self.period.len().max(1);
        let mut out = Vec::new();
        for k in 0..n {
            let s = self.shift(k);
            if !out.contains(&s) {
                out.push(s);
            }
        }
        out
    }

    /// Lexicographic comparison of the infinite sequences. Terminates because
    /// both sequences are eventually periodic: past the preperiods it suffices
    /// to scan one full lcm of the periods.
    pub fn cmp_lex(&self, other: &DigitSeq) -> Ordering {
        let pre = self.preperiod.len().max(other.preperiod.len());
        let pa = self.period.len().max(1);
        let pb = other.period.len().max(1);
        let horizon = pre + lcm(pa, pb) + 1;
        for n in 1..=horizon {
            match self.digit(n).cmp(&other.digit(n)) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }

    pub fn is_zero(&self) -> bool {
        self.preperiod.is_empty() && self.period.is_empty()
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl fmt::Display for DigitSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let multi = self.alphabet_max > 9;
        let join = |ds: &[u32]| {
            if multi {
                ds.iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            } else {
                ds.iter().map(|d| d.to_string()).collect()
            }
        };
        if self.period.is_empty() {
            if self.preperiod.is_empty() {
                write!(f, "0")
            } else {
                write!(f, "{}", join(&self.preperiod))
            }
        } else {
            write!(f, "{}({})*", join(&self.preperiod), join(&self.period))
        }
    }
}
