//! Markov compacta with per-level digit orders and the adic transformation:
//! successor/predecessor on finite path prefixes, with the full odometer as
//! the classical special case.

use crate::rotation::{ContinuedFraction, RotCompactum1, RotCompactum2, RotError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AdicError {
    #[error("digit {digit} at level {level} is out of range or inadmissible")]
    Inadmissible { level: usize, digit: u64 },
    #[error("level {0} has no stored data; deepen the compactum")]
    DepthExhausted(usize),
    #[error("incidence matrix {0} has a dead row or column")]
    DeadState(usize),
    #[error("incidence shapes do not chain at matrix {0}")]
    ShapeMismatch(usize),
    #[error("order at level {0} is not a permutation of its alphabet")]
    BadOrder(usize),
    #[error(transparent)]
    Rot(#[from] RotError),
}

/// A level: alphabet {0..size-1} listed from order-minimal to order-maximal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelOrder {
    pub size: u64,
    pub order: Vec<u64>,
}

impl LevelOrder {
    pub fn ascending(size: u64) -> LevelOrder {
        LevelOrder {
            size,
            order: (0..size).collect(),
        }
    }

    pub fn descending(size: u64) -> LevelOrder {
        LevelOrder {
            size,
            order: (0..size).rev().collect(),
        }
    }

    fn rank(&self, d: u64) -> Option<usize> {
        self.order.iter().position(|&x| x == d)
    }
}

/// Finitely materialized Markov compactum: `incidence[k]` connects level k+1
/// to level k+2 (1-based levels). `stationary` records that every level is
/// the same, which is informative only; operations read the stored data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MarkovCompactum {
    pub levels: Vec<LevelOrder>,
    pub incidence: Vec<Vec<Vec<u8>>>,
    pub stationary: bool,
}

impl MarkovCompactum {
    pub fn new(levels: Vec<LevelOrder>, incidence: Vec<Vec<Vec<u8>>>) -> Result<Self, AdicError> {
        if incidence.len() + 1 != levels.len() {
            return Err(AdicError::ShapeMismatch(incidence.len()));
        }
        for (k, lv) in levels.iter().enumerate() {
            let mut seen = vec![false; lv.size as usize];
            if lv.order.len() != lv.size as usize {
                return Err(AdicError::BadOrder(k + 1));
            }
            for &d in &lv.order {
                if d >= lv.size || seen[d as usize] {
                    return Err(AdicError::BadOrder(k + 1));
                }
                seen[d as usize] = true;
            }
        }
        for (k, m) in incidence.iter().enumerate() {
            let rows = levels[k].size as usize;
            let cols = levels[k + 1].size as usize;
            if m.len() != rows || m.iter().any(|r| r.len() != cols) {
                return Err(AdicError::ShapeMismatch(k));
            }
            for row in m {
                if row.iter().all(|&c| c == 0) {
                    return Err(AdicError::DeadState(k));
                }
            }
            for j in 0..cols {
                if m.iter().all(|r| r[j] == 0) {
                    return Err(AdicError::DeadState(k));
                }
            }
        }
        let stationary = levels.windows(2).all(|w| w[0] == w[1])
            && incidence.windows(2).all(|w| w[0] == w[1]);
        Ok(MarkovCompactum {
            levels,
            incidence,
            stationary,
        })
    }

    /// The full odometer over the given radices: all transitions allowed,
    /// natural order everywhere.
    pub fn full_odometer(radices: &[u64]) -> Self {
        let levels: Vec<LevelOrder> = radices.iter().map(|&r| LevelOrder::ascending(r)).collect();
        let incidence = radices
            .windows(2)
            .map(|w| vec![vec![1u8; w[1] as usize]; w[0] as usize])
            .collect();
        MarkovCompactum::new(levels, incidence).expect("odometer is well formed")
    }

    /// Stationary golden compactum: two digits, no consecutive ones, natural
    /// order.
    pub fn golden(depth: usize) -> Self {
        let levels = vec![LevelOrder::ascending(2); depth];
        let incidence = vec![vec![vec![1, 1], vec![1, 0]]; depth - 1];
        MarkovCompactum::new(levels, incidence).expect("golden compactum is well formed")
    }

    pub fn from_rot1(x: &RotCompactum1, depth: usize) -> Result<Self, AdicError> {
        let mut levels = Vec::with_capacity(depth);
        let mut incidence = Vec::with_capacity(depth.saturating_sub(1));
        for k in 1..=depth {
            levels.push(LevelOrder::ascending(x.digit_count(k)?));
            if k < depth {
                incidence.push(x.incidence(k)?);
            }
        }
        MarkovCompactum::new(levels, incidence)
    }

    pub fn from_rot2(x: &RotCompactum2, depth: usize) -> Result<Self, AdicError> {
        let mut levels = Vec::with_capacity(depth);
        let mut incidence = Vec::with_capacity(depth.saturating_sub(1));
        for k in 1..=depth {
            let size = x.digit_count(k)?;
            levels.push(if x.ascending(k) {
                LevelOrder::ascending(size)
            } else {
                LevelOrder::descending(size)
            });
            if k < depth {
                incidence.push(x.incidence(k)?);
            }
        }
        MarkovCompactum::new(levels, incidence)
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    fn allowed(&self, level: usize, i: u64, j: u64) -> bool {
        self.incidence[level - 1][i as usize][j as usize] == 1
    }

    pub fn validate_path(&self, digits: &[u64]) -> Result<(), AdicError> {
        if digits.len() > self.levels.len() {
            return Err(AdicError::DepthExhausted(digits.len()));
        }
        for (idx, &d) in digits.iter().enumerate() {
            if d >= self.levels[idx].size {
                return Err(AdicError::Inadmissible {
                    level: idx + 1,
                    digit: d,
                });
            }
            if idx + 1 < digits.len() && !self.allowed(idx + 1, d, digits[idx + 1]) {
                return Err(AdicError::Inadmissible {
                    level: idx + 2,
                    digit: digits[idx + 1],
                });
            }
        }
        Ok(())
    }

    /// Order-minimal path prefix of the given depth.
    pub fn minimal_path(&self, depth: usize) -> Result<AdicPath, AdicError> {
        let mut digits = vec![0u64; depth];
        for k in (0..depth).rev() {
            let next = if k + 1 < depth {
                Some(digits[k + 1])
            } else {
                None
            };
            digits[k] = self.extremal_digit(k + 1, next, false)?;
        }
        Ok(AdicPath { digits })
    }

    /// Order-minimal (or maximal) digit at `level` compatible with the digit
    /// above; one-step lookahead suffices because incidence has no dead
    /// columns.
    fn extremal_digit(
        &self,
        level: usize,
        above: Option<u64>,
        maximal: bool,
    ) -> Result<u64, AdicError> {
        let lv = self.levels.get(level - 1).ok_or(AdicError::DepthExhausted(level))?;
        let scan: Box<dyn Iterator<Item = &u64>> = if maximal {
            Box::new(lv.order.iter().rev())
        } else {
            Box::new(lv.order.iter())
        };
        for &d in scan {
            match above {
                Some(j) if !self.allowed(level, d, j) => continue,
                _ => return Ok(d),
            }
        }
        Err(AdicError::DeadState(level))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdicPath {
    pub digits: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Extremal {
    /// The carry escaped the prefix going up.
    Maximal,
    /// The borrow escaped the prefix going down.
    Minimal,
}

/// Immediate successor in the adic order: bump the lowest level whose digit
/// can be increased compatibly with the digit above it, and reset everything
/// below to the order-minimal admissible filler.
pub fn successor(x: &AdicPath, c: &MarkovCompactum) -> Result<Result<AdicPath, Extremal>, AdicError> {
    adic_step(x, c, false)
}

/// Immediate predecessor: mirror of the successor with maximal refill.
pub fn predecessor(
    x: &AdicPath,
    c: &MarkovCompactum,
) -> Result<Result<AdicPath, Extremal>, AdicError> {
    adic_step(x, c, true)
}

fn adic_step(
    x: &AdicPath,
    c: &MarkovCompactum,
    downward: bool,
) -> Result<Result<AdicPath, Extremal>, AdicError> {
    c.validate_path(&x.digits)?;
    let depth = x.digits.len();
    for n in 1..=depth {
        let lv = &c.levels[n - 1];
        let cur_rank = lv.rank(x.digits[n - 1]).unwrap();
        let candidates: Box<dyn Iterator<Item = usize>> = if downward {
            Box::new((0..cur_rank).rev())
        } else {
            Box::new(cur_rank + 1..lv.order.len())
        };
        let above = if n < depth { Some(x.digits[n]) } else { None };
        for r in candidates {
            let d = lv.order[r];
            if let Some(j) = above {
                if !c.allowed(n, d, j) {
                    continue;
                }
            }
            let mut digits = x.digits.clone();
            digits[n - 1] = d;
            for k in (1..n).rev() {
                digits[k - 1] = c.extremal_digit(k, Some(digits[k]), downward)?;
            }
            return Ok(Ok(AdicPath { digits }));
        }
    }
    Ok(Err(if downward {
        Extremal::Minimal
    } else {
        Extremal::Maximal
    }))
}

/// Mixed-radix little-endian encoding of n.
pub fn mixed_radix(mut n: u64, radices: &[u64]) -> Option<Vec<u64>> {
    let mut digits = Vec::with_capacity(radices.len());
    for &r in radices {
        digits.push(n % r);
        n /= r;
    }
    (n == 0).then_some(digits)
}

/// Checks that iterating the successor from the zero path counts exactly in
/// mixed radix for every N <= n_max (capped at the odometer's full range).
pub fn odometer_equivalence_check(radices: &[u64], n_max: u64) -> Result<bool, AdicError> {
    let capacity: u64 = radices.iter().product();
    let n_max = n_max.min(capacity.saturating_sub(1));
    let c = MarkovCompactum::full_odometer(radices);
    let mut path = c.minimal_path(radices.len())?;
    for n in 0..=n_max {
        let expect = match mixed_radix(n, radices) {
            Some(d) => d,
            None => return Ok(false),
        };
        if path.digits != expect {
            return Ok(false);
        }
        if n < n_max {
            path = successor(&path, &c)??;
        }
    }
    Ok(true)
}

impl From<Extremal> for AdicError {
    fn from(_: Extremal) -> AdicError {
        AdicError::DepthExhausted(0)
    }
}

/// Convenience: model-2 rotational compactum for a continued fraction.
pub fn rot2_compactum(cf: &ContinuedFraction, depth: usize) -> Result<MarkovCompactum, AdicError> {
    MarkovCompactum::from_rot2(&RotCompactum2::new(cf.clone()), depth)
}
