//! Continued fractions and rotational expansions: two Markov-compactum
//! models for coding an irrational circle rotation, Ostrowski-style digit
//! encodings for reals and integers, the Markov measure with digit
//! statistics, and the classification of unique rotational expansions.

use crate::beta_core::Real;
use crate::exactnum::{Approx, FieldElement, FieldError, MinimalPolynomial};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

type Rat = BigRational;

#[derive(Debug, Error)]
pub enum RotError {
    #[error("alpha is rational; continued fraction terminates")]
    RationalAlpha,
    #[error("alpha must lie in (0,1)")]
    AlphaRange,
    #[error("model 1 needs alpha < 1/2 (a_1 >= 2); pass the complement")]
    ModelOneRange,
    #[error("digit {digit} at position {pos} is inadmissible")]
    Inadmissible { pos: usize, digit: u64 },
    #[error("quotient stream exhausted at depth {0}; supply a period or more terms")]
    DepthExhausted(usize),
    #[error("quotients must be positive")]
    BadQuotient,
    #[error("period must be nonempty for an exact continued fraction")]
    EmptyPeriod,
    #[error("encoding search failed to terminate")]
    EncodingFailed,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Regular continued fraction of an irrational alpha in (0,1), with the
/// convergent convention p_1=0, p_2=1, q_1=1, q_2=a_1 and
/// p_{n+1} = a_n p_n + p_{n-1} (likewise q). Then alpha_1 = alpha and
/// alpha_{n-1} = a_n alpha_n + alpha_{n+1} for the residues
/// alpha_n = |q_n alpha - p_n|.
#[derive(Debug, Clone)]
pub struct ContinuedFraction {
    pub alpha: Real,
    pub preperiod: Vec<u64>,
    /// Nonempty for eventually periodic (exact) quotient streams.
    pub period: Vec<u64>,
}

impl ContinuedFraction {
    /// Expands alpha to at least `n` quotients. Quadratic irrationals get
    /// period detection and an exact stream; floats a finite prefix.
    pub fn expand(alpha: &Real, n: usize) -> Result<ContinuedFraction, RotError> {
        let in_unit = |v: &Real| !v.is_negative() && v.to_f64() < 1.0;
        if !in_unit(alpha) {
            return Err(RotError::AlphaRange);
        }
        match alpha {
            Real::Rat(_) => Err(RotError::RationalAlpha),
            Real::Alg(a0) => {
                if a0.is_rational() {
                    return Err(RotError::RationalAlpha);
                }
                let mut quotients = Vec::new();
                let mut seen: HashMap<FieldElement, usize> = HashMap::new();
                let mut t = a0.clone();
                for k in 0.. {
                    if t.is_rational() {
                        return Err(RotError::RationalAlpha);
                    }
                    if let Some(&k0) = seen.get(&t) {
                        return Ok(ContinuedFraction {
                            alpha: alpha.clone(),
                            preperiod: quotients[..k0].to_vec(),
                            period: quotients[k0..].to_vec(),
                        });
                    }
                    seen.insert(t.clone(), k);
                    let inv = t.inverse()?;
                    let a = inv.floor_int();
                    let au = a.to_u64().ok_or(RotError::BadQuotient)?;
                    quotients.push(au);
                    t = inv.sub(&FieldElement::from_rational(
                        inv.field(),
                        Rat::from_integer(a),
                    ));
                    if quotients.len() > n + 4096 {
                        break; // degenerate: cycle not found, fall through
                    }
                }
                Err(RotError::EncodingFailed)
            }
            Real::F64(a0) => {
                let mut quotients = Vec::new();
                let mut t = *a0;
                for _ in 0..n {
                    if t < 1e-12 {
                        return Err(RotError::RationalAlpha);
                    }
                    let inv = 1.0 / t;
                    let a = inv.floor();
                    if a > 1e15 {
                        return Err(RotError::RationalAlpha);
                    }
                    quotients.push(a as u64);
                    t = inv - a;
                }
                Ok(ContinuedFraction {
                    alpha: alpha.clone(),
                    preperiod: quotients,
                    period: Vec::new(),
                })
            }
        }
    }

    /// Exact alpha from eventually periodic quotients: the periodic tail is
    /// a root of a quadratic found from its convergent matrix, and alpha is
    /// a Moebius image of it.
    pub fn from_quotients(preperiod: Vec<u64>, period: Vec<u64>) -> Result<ContinuedFraction, RotError> {
        if period.is_empty() {
            return Err(RotError::EmptyPeriod);
        }
        if preperiod.iter().chain(&period).any(|&a| a == 0) {
            return Err(RotError::BadQuotient);
        }
        // tail T = [b_1; b_2, ..., b_p, T]: T = (A T + B)/(C T + D)
        let (mut a, mut b, mut c, mut d) = (
            BigInt::one(),
            BigInt::zero(),
            BigInt::zero(),
            BigInt::one(),
        );
        for &q in &period {
            let q = BigInt::from(q);
            let (na, nb) = (&a * &q + &b, a.clone());
            let (nc, nd) = (&c * &q + &d, c.clone());
            a = na;
            b = nb;
            c = nc;
            d = nd;
        }
        // s = C T satisfies s^2 + (D - A)s - BC = 0, with s > C since T > 1
        let c0 = -(&b * &c);
        let c1 = &d - &a;
        let b1 = BigInt::from(period[0]);
        let lo = Rat::from_integer(&c * &b1);
        let hi = Rat::from_integer(&c * (&b1 + BigInt::one()));
        let field = MinimalPolynomial::new(vec![c0, c1, BigInt::one()], lo, hi)?;
        let s = field.gen_element();
        let t = s.mul_rat(&Rat::new(BigInt::one(), c.clone()));
        let mut v = t;
        for &q in preperiod.iter().rev() {
            v = FieldElement::from_integer(v.field(), q as i64).add(&v.inverse()?);
        }
        let alpha = v.inverse()?;
        Ok(ContinuedFraction {
            alpha: Real::Alg(alpha),
            preperiod,
            period,
        })
    }

    pub fn is_exact(&self) -> bool {
        !self.period.is_empty()
    }

    /// 1-based quotient a_n; None past a finite prefix.
    pub fn quotient(&self, n: usize) -> Option<u64> {
        if n == 0 {
            return None;
        }
        let i = n - 1;
        if i < self.preperiod.len() {
            Some(self.preperiod[i])
        } else if self.period.is_empty() {
            None
        } else {
            Some(self.period[(i - self.preperiod.len()) % self.period.len()])
        }
    }

    pub fn quotients(&self, n: usize) -> Result<Vec<u64>, RotError> {
        (1..=n)
            .map(|k| self.quotient(k).ok_or(RotError::DepthExhausted(k)))
            .collect()
    }

    /// (p_k, q_k) for k = 1..=n.
    pub fn convergents(&self, n: usize) -> Result<Vec<(BigInt, BigInt)>, RotError> {
        let mut out = Vec::with_capacity(n);
        if n >= 1 {
            out.push((BigInt::zero(), BigInt::one()));
        }
        if n >= 2 {
            out.push((BigInt::one(), BigInt::from(self.quotient(1).ok_or(RotError::DepthExhausted(1))?)));
        }
        for k in 3..=n {
            let a = BigInt::from(self.quotient(k - 1).ok_or(RotError::DepthExhausted(k - 1))?);
            let p = &a * &out[k - 2].0 + &out[k - 3].0;
            let q = &a * &out[k - 2].1 + &out[k - 3].1;
            out.push((p, q));
        }
        Ok(out)
    }

    /// Residues alpha_1..alpha_n by the exact recurrence
    /// alpha_{n+1} = alpha_{n-1} - a_n alpha_n (alpha_0 = 1, alpha_1 = alpha).
    pub fn residues(&self, n: usize) -> Result<Vec<Real>, RotError> {
        let one = real_one_like(&self.alpha);
        let mut prev = one;
        let mut cur = self.alpha.clone();
        let mut out = Vec::with_capacity(n);
        for k in 1..=n {
            out.push(cur.clone());
            let a = self.quotient(k).ok_or(RotError::DepthExhausted(k))?;
            let next = prev.sub(&real_mul_u64(&cur, a));
            prev = cur;
            cur = next;
        }
        Ok(out)
    }

    /// Ratios r_k = alpha_k / alpha_{k-1} for k = 1..=n, computed by the
    /// backward recurrence r_k = 1/(a_k + r_{k+1}); numerically stable for
    /// deep levels where alpha_k underflows.
    pub fn residue_ratios(&self, n: usize) -> Result<Vec<f64>, RotError> {
        let buffer = 64;
        let top = n + buffer;
        let mut r = 0.0f64;
        let mut out = vec![0.0; n];
        for k in (1..=top).rev() {
            let a = match self.quotient(k) {
                Some(a) => a,
                None if k > n => continue, // short prefix: seed closer in
                None => return Err(RotError::DepthExhausted(k)),
            };
            r = 1.0 / (a as f64 + r);
            if k <= n {
                out[k - 1] = r;
            }
        }
        Ok(out)
    }

    /// Continued fraction of 1 - alpha: [0;1,a_2,...] <-> [0;a_2+1,...].
    pub fn complement(&self) -> Result<ContinuedFraction, RotError> {
        let a1 = self.quotient(1).ok_or(RotError::DepthExhausted(1))?;
        let mut pre = self.preperiod.clone();
        if pre.is_empty() && !self.period.is_empty() {
            // quotients start inside the period: materialize one turn
            pre = self.period.clone();
        }
        if a1 == 1 {
            pre.remove(0);
            if pre.is_empty() && self.period.is_empty() {
                return Err(RotError::DepthExhausted(2));
            }
            if pre.is_empty() {
                pre = self.period.clone();
            }
            pre[0] += 1;
        } else {
            pre.insert(0, 1);
            if pre.is_empty() {
                return Err(RotError::DepthExhausted(1));
            }
            let idx = 1;
            if pre.len() > idx {
                pre[idx] -= 1;
                if pre[idx] == 0 {
                    // [0;1,a_1-1,...] with a_1 = 1 degenerate; not needed here
                    return Err(RotError::BadQuotient);
                }
            }
        }
        if self.period.is_empty() {
            let alpha = Real::F64(1.0 - self.alpha.to_f64());
            Ok(ContinuedFraction {
                alpha,
                preperiod: pre,
                period: Vec::new(),
            })
        } else {
            ContinuedFraction::from_quotients(pre, self.period.clone())
        }
    }
}

fn real_one_like(sample: &Real) -> Real {
    match sample {
        Real::Alg(a) => Real::Alg(FieldElement::one(a.field())),
        Real::Rat(_) => Real::Rat(Rat::one()),
        Real::F64(_) => Real::F64(1.0),
    }
}

fn real_from_rat_like(sample: &Real, r: Rat) -> Real {
    match sample {
        Real::Alg(a) => Real::Alg(FieldElement::from_rational(a.field(), r)),
        Real::Rat(_) => Real::Rat(r),
        Real::F64(_) => Real::F64(r.to_f64().unwrap_or(f64::NAN)),
    }
}

fn real_mul_u64(v: &Real, k: u64) -> Real {
    match v {
        Real::Alg(a) => Real::Alg(a.mul_rat(&Rat::from_integer(BigInt::from(k)))),
        Real::Rat(r) => Real::Rat(r * Rat::from_integer(BigInt::from(k))),
        Real::F64(f) => Real::F64(f * k as f64),
    }
}

fn real_div(v: &Real, w: &Real) -> Result<Real, RotError> {
    match (v, w) {
        (Real::Alg(a), Real::Alg(b)) => Ok(Real::Alg(a.div(b)?)),
        (Real::Rat(a), Real::Rat(b)) => Ok(Real::Rat(a / b)),
        (Real::F64(a), Real::F64(b)) => Ok(Real::F64(a / b)),
        _ => Err(RotError::EncodingFailed),
    }
}

/// Markov compactum of model 1: digit sets {0..a_1-1}, {0..a_n} for n >= 2,
/// natural order at every level; the top digit at level n+1 is reachable
/// only from digit 0.
#[derive(Debug, Clone)]
pub struct RotCompactum1 {
    pub cf: ContinuedFraction,
}

/// Markov compactum of model 2: digit sets {0..a_n}, order ascending at odd
/// levels and descending at even; after a maximal digit only 0 follows.
#[derive(Debug, Clone)]
pub struct RotCompactum2 {
    pub cf: ContinuedFraction,
}

impl RotCompactum1 {
    pub fn new(cf: ContinuedFraction) -> Result<Self, RotError> {
        if cf.quotient(1).ok_or(RotError::DepthExhausted(1))? < 2 {
            return Err(RotError::ModelOneRange);
        }
        Ok(RotCompactum1 { cf })
    }

    /// r_n: a_1 at the first level, a_n + 1 after.
    pub fn digit_count(&self, n: usize) -> Result<u64, RotError> {
        let a = self.cf.quotient(n).ok_or(RotError::DepthExhausted(n))?;
        Ok(if n == 1 { a } else { a + 1 })
    }

    pub fn allowed(&self, n: usize, i: u64, j: u64) -> Result<bool, RotError> {
        let ri = self.digit_count(n)?;
        let rj = self.digit_count(n + 1)?;
        if i >= ri || j >= rj {
            return Ok(false);
        }
        Ok(i == 0 || j != rj - 1)
    }

    pub fn incidence(&self, n: usize) -> Result<Vec<Vec<u8>>, RotError> {
        let rows = self.digit_count(n)? as usize;
        let cols = self.digit_count(n + 1)? as usize;
        Ok((0..rows)
            .map(|i| {
                (0..cols)
                    .map(|j| u8::from(i == 0 || j != cols - 1))
                    .collect()
            })
            .collect())
    }

    pub fn ascending(&self, _n: usize) -> bool {
        true
    }
}

impl RotCompactum2 {
    pub fn new(cf: ContinuedFraction) -> Self {
        RotCompactum2 { cf }
    }

    pub fn digit_count(&self, n: usize) -> Result<u64, RotError> {
        Ok(self.cf.quotient(n).ok_or(RotError::DepthExhausted(n))? + 1)
    }

    pub fn allowed(&self, n: usize, i: u64, j: u64) -> Result<bool, RotError> {
        let ri = self.digit_count(n)?;
        let rj = self.digit_count(n + 1)?;
        if i >= ri || j >= rj {
            return Ok(false);
        }
        Ok(i != ri - 1 || j == 0)
    }

    pub fn incidence(&self, n: usize) -> Result<Vec<Vec<u8>>, RotError> {
        let rows = self.digit_count(n)? as usize;
        let cols = self.digit_count(n + 1)? as usize;
        Ok((0..rows)
            .map(|i| {
                (0..cols)
                    .map(|j| u8::from(i != rows - 1 || j == 0))
                    .collect()
            })
            .collect())
    }

    pub fn ascending(&self, n: usize) -> bool {
        n % 2 == 1
    }
}

fn check_admissible_2(cf: &ContinuedFraction, digits: &[u64]) -> Result<(), RotError> {
    for (idx, &d) in digits.iter().enumerate() {
        let n = idx + 1;
        let a = cf.quotient(n).ok_or(RotError::DepthExhausted(n))?;
        if d > a {
            return Err(RotError::Inadmissible { pos: n, digit: d });
        }
        if d == a && idx + 1 < digits.len() && digits[idx + 1] != 0 {
            return Err(RotError::Inadmissible {
                pos: n + 1,
                digit: digits[idx + 1],
            });
        }
    }
    Ok(())
}

fn check_admissible_1(cf: &ContinuedFraction, digits: &[u64]) -> Result<(), RotError> {
    for (idx, &d) in digits.iter().enumerate() {
        let n = idx + 1;
        let a = cf.quotient(n).ok_or(RotError::DepthExhausted(n))?;
        let top = if n == 1 { a - 1 } else { a };
        if d > top {
            return Err(RotError::Inadmissible { pos: n, digit: d });
        }
        if n >= 2 && d == a && digits[idx - 1] != 0 {
            return Err(RotError::Inadmissible { pos: n, digit: d });
        }
    }
    Ok(())
}

/// Bound on any admissible tail past depth n: sum of a_k alpha_k telescopes
/// to alpha_n + alpha_{n+1}.
fn tail_bound(cf: &ContinuedFraction, n: usize) -> Result<f64, RotError> {
    let ratios = cf.residue_ratios(n + 1)?;
    let mut alpha_n = 1.0;
    for r in &ratios[..n] {
        alpha_n *= r;
    }
    Ok(alpha_n * (1.0 + ratios[n]))
}

/// psi of model 1: alpha + sum x_n (-1)^{n+1} alpha_n, with a rigorous tail
/// bound from the part not yet read.
pub fn psi1(cf: &ContinuedFraction, digits: &[u64]) -> Result<Approx, RotError> {
    if cf.quotient(1).ok_or(RotError::DepthExhausted(1))? < 2 {
        return Err(RotError::ModelOneRange);
    }
    check_admissible_1(cf, digits)?;
    let res = cf.residues(digits.len())?;
    let mut acc = cf.alpha.clone();
    for (idx, &d) in digits.iter().enumerate() {
        let term = real_mul_u64(&res[idx], d);
        acc = if idx % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    Ok(Approx {
        value: acc.to_f64(),
        error_bound: tail_bound(cf, digits.len())?,
    })
}

/// psi of model 2: sum x_n alpha_n.
pub fn psi2(cf: &ContinuedFraction, digits: &[u64]) -> Result<Approx, RotError> {
    check_admissible_2(cf, digits)?;
    let res = cf.residues(digits.len())?;
    let mut acc = match &cf.alpha {
        Real::Alg(a) => Real::Alg(FieldElement::zero(a.field())),
        Real::Rat(_) => Real::Rat(Rat::zero()),
        Real::F64(_) => Real::F64(0.0),
    };
    for (idx, &d) in digits.iter().enumerate() {
        acc = acc.add(&real_mul_u64(&res[idx], d));
    }
    Ok(Approx {
        value: acc.to_f64(),
        error_bound: tail_bound(cf, digits.len())?,
    })
}

/// Greedy model-2 encoding: x_k = min(floor(r/alpha_k), a_k). The remainder
/// bound forces admissibility: after a maximal digit the next one is 0.
pub fn ostrowski_encode(cf: &ContinuedFraction, x: &Real, n: usize) -> Result<Vec<u64>, RotError> {
    if x.is_negative() || x.to_f64() >= 1.0 {
        return Err(RotError::AlphaRange);
    }
    let res = cf.residues(n)?;
    let mut r = x.clone();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let a = cf.quotient(k + 1).ok_or(RotError::DepthExhausted(k + 1))?;
        let quot = real_div(&r, &res[k])?;
        let f = quot.floor_int();
        let mut d = f.to_u64().unwrap_or(0);
        if f.is_negative() {
            d = 0;
        }
        if d > a {
            d = a;
        }
        if k > 0 && out[k - 1] == cf.quotient(k).unwrap() {
            assert_eq!(d, 0, "greedy digit after a maximal one must be 0");
        }
        r = r.sub(&real_mul_u64(&res[k], d));
        out.push(d);
    }
    Ok(out)
}

/// Model-1 encoding by exact interval bookkeeping over the signed weights
/// (-1)^{n+1} alpha_n: digit d at level k is kept when the residual target
/// stays between the extreme admissible tail sums.
pub fn rot1_encode(cf: &ContinuedFraction, x: &Real, n: usize) -> Result<Vec<u64>, RotError> {
    if cf.quotient(1).ok_or(RotError::DepthExhausted(1))? < 2 {
        return Err(RotError::ModelOneRange);
    }
    if x.is_negative() || x.to_f64() >= 1.0 {
        return Err(RotError::AlphaRange);
    }
    let horizon = n + 40;
    let res = cf.residues(horizon + 2)?;
    let signed = |k: usize| -> Real {
        // weight of level k (1-based)
        if k % 2 == 1 {
            res[k - 1].clone()
        } else {
            real_mul_u64(&res[k - 1], 1).sub(&real_mul_u64(&res[k - 1], 2))
        }
    };
    let top = |k: usize| -> u64 {
        let a = cf.quotient(k).unwrap();
        if k == 1 {
            a - 1
        } else {
            a
        }
    };
    // sup/inf of admissible tail sums from level k on; index [k][capped]
    let seed = res[horizon - 1].add(&res[horizon]);
    let neg_seed = real_mul_u64(&seed, 0).sub(&seed);
    let mut sup = vec![[seed.clone(), seed.clone()]; horizon + 2];
    let mut inf = vec![[neg_seed.clone(), neg_seed]; horizon + 2];
    for k in (1..=horizon).rev() {
        let w = signed(k);
        for capped in 0..2usize {
            let mut hi: Option<Real> = None;
            let mut lo: Option<Real> = None;
            let t = top(k) - capped as u64;
            for d in [0, 1.min(t), t] {
                let next = usize::from(d > 0);
                let contrib = real_mul_u64(&w, d);
                let h = contrib.add(&sup[k + 1][next]);
                let l = contrib.add(&inf[k + 1][next]);
                hi = Some(match hi {
                    Some(v) if v.cmp_real(&h) != std::cmp::Ordering::Less => v,
                    _ => h,
                });
                lo = Some(match lo {
                    Some(v) if v.cmp_real(&l) != std::cmp::Ordering::Greater => v,
                    _ => l,
                });
            }
            sup[k][capped] = hi.unwrap();
            inf[k][capped] = lo.unwrap();
        }
    }
    let mut t = x.sub(&cf.alpha);
    let mut out = Vec::with_capacity(n);
    let mut capped = 0usize;
    for k in 1..=n {
        let w = signed(k);
        let tmax = top(k) - capped as u64;
        let mut chosen = None;
        for d in 0..=tmax {
            let next = usize::from(d > 0);
            let rest = t.sub(&real_mul_u64(&w, d));
            if rest.cmp_real(&inf[k + 1][next]) != std::cmp::Ordering::Less
                && rest.cmp_real(&sup[k + 1][next]) != std::cmp::Ordering::Greater
            {
                chosen = Some((d, rest));
                break;
            }
        }
        let (d, rest) = chosen.ok_or(RotError::EncodingFailed)?;
        capped = usize::from(d > 0);
        t = rest;
        out.push(d);
    }
    Ok(out)
}

/// Model 1 integer numeration N = 1 + sum x_k q_k by the greedy algorithm;
/// the remainder bound keeps the digits admissible.
pub fn integer_encode1(cf: &ContinuedFraction, n: &BigInt) -> Result<Vec<u64>, RotError> {
    if n < &BigInt::one() {
        return Err(RotError::AlphaRange);
    }
    let mut rem = n - BigInt::one();
    let mut depth = 2usize;
    loop {
        let conv = cf.convergents(depth)?;
        if conv.last().unwrap().1 > rem {
            let mut out = vec![0u64; depth - 1];
            for k in (1..depth).rev() {
                let q = &conv[k - 1].1;
                let d = (&rem / q).to_u64().ok_or(RotError::EncodingFailed)?;
                rem -= BigInt::from(d) * q;
                out[k - 1] = d;
            }
            debug_assert!(rem.is_zero());
            check_admissible_1(cf, &out)?;
            return Ok(out);
        }
        depth += 1;
        if depth > 10_000 {
            return Err(RotError::EncodingFailed);
        }
    }
}

/// Model 2 integer numeration N = sum x_n (-1)^n q_n over admissible finite
/// strings; digits found by depth-first search pruned with exact reachable
/// ranges.
pub fn integer_encode2(cf: &ContinuedFraction, n: &BigInt) -> Result<Vec<u64>, RotError> {
    for depth in 1..=256usize {
        let conv = cf.convergents(depth)?;
        let a: Vec<u64> = cf.quotients(depth)?;
        let w = |k: usize| -> BigInt {
            // weight of level k (1-based): (-1)^k q_k
            if k % 2 == 0 {
                conv[k - 1].1.clone()
            } else {
                -conv[k - 1].1.clone()
            }
        };
        // reachable range of sums over levels k..=depth; index [k][forced0]
        let mut lo = vec![[BigInt::zero(), BigInt::zero()]; depth + 2];
        let mut hi = vec![[BigInt::zero(), BigInt::zero()]; depth + 2];
        for k in (1..=depth).rev() {
            let wk = w(k);
            for forced in 0..2usize {
                let mut l: Option<BigInt> = None;
                let mut h: Option<BigInt> = None;
                let dmax = if forced == 1 { 0 } else { a[k - 1] };
                for d in [0, dmax.saturating_sub(1), dmax] {
                    let next = usize::from(forced == 0 && d == a[k - 1]);
                    let base = BigInt::from(d) * &wk;
                    let cl = &base + &lo[k + 1][next];
                    let ch = base + &hi[k + 1][next];
                    l = Some(match l {
                        Some(v) if v <= cl => v,
                        _ => cl,
                    });
                    h = Some(match h {
                        Some(v) if v >= ch => v,
                        _ => ch,
                    });
                }
                lo[k][forced] = l.unwrap();
                hi[k][forced] = h.unwrap();
            }
        }
        if n < &lo[1][0] || n > &hi[1][0] {
            continue;
        }
        // depth-first digit choice with range pruning
        fn dfs(
            k: usize,
            depth: usize,
            forced: usize,
            target: &BigInt,
            a: &[u64],
            w: &dyn Fn(usize) -> BigInt,
            lo: &[[BigInt; 2]],
            hi: &[[BigInt; 2]],
            out: &mut Vec<u64>,
        ) -> bool {
            if k > depth {
                return target.is_zero();
            }
            let dmax = if forced == 1 { 0 } else { a[k - 1] };
            let wk = w(k);
            for d in 0..=dmax {
                let rest = target - BigInt::from(d) * &wk;
                let next = usize::from(forced == 0 && d == a[k - 1]);
                if rest < lo[k + 1][next] || rest > hi[k + 1][next] {
                    continue;
                }
                out.push(d);
                if dfs(k + 1, depth, next, &rest, a, w, lo, hi, out) {
                    return true;
                }
                out.pop();
            }
            false
        }
        let mut out = Vec::new();
        if dfs(1, depth, 0, n, &a, &w, &lo, &hi, &mut out) {
            while out.last() == Some(&0) {
                out.pop();
            }
            return Ok(out);
        }
    }
    Err(RotError::EncodingFailed)
}

/// Markov measure of model 2 with the printed initial/transition/marginal
/// laws; probabilities are carried as residue ratios for stability.
#[derive(Debug, Clone)]
pub struct RotMeasure {
    pub cf: ContinuedFraction,
    ratios: Vec<f64>,
}

pub fn markov_measure(cf: &ContinuedFraction, depth: usize) -> Result<RotMeasure, RotError> {
    let ratios = cf.residue_ratios(depth + 2)?;
    Ok(RotMeasure {
        cf: cf.clone(),
        ratios,
    })
}

impl RotMeasure {
    /// P(x_1 = i): alpha for i < a_1, alpha_2 for i = a_1.
    pub fn initial(&self) -> Result<Vec<f64>, RotError> {
        let a1 = self.cf.quotient(1).ok_or(RotError::DepthExhausted(1))? as usize;
        let alpha = self.ratios[0];
        let alpha2 = self.ratios[0] * self.ratios[1];
        let mut row = vec![alpha; a1 + 1];
        row[a1] = alpha2;
        Ok(row)
    }

    /// P(x_n = i | x_{n-1} = j) for n >= 2, rows indexed by j.
    pub fn transition(&self, n: usize) -> Result<Vec<Vec<f64>>, RotError> {
        if n < 2 || n + 1 > self.ratios.len() {
            return Err(RotError::DepthExhausted(n));
        }
        let a_prev = self.cf.quotient(n - 1).ok_or(RotError::DepthExhausted(n - 1))? as usize;
        let a_n = self.cf.quotient(n).ok_or(RotError::DepthExhausted(n))? as usize;
        let rn = self.ratios[n - 1]; // alpha_n / alpha_{n-1}
        let rn1 = rn * self.ratios[n]; // alpha_{n+1} / alpha_{n-1}
        let mut rows = Vec::with_capacity(a_prev + 1);
        for j in 0..=a_prev {
            let mut row = vec![0.0; a_n + 1];
            if j < a_prev {
                for cell in row.iter_mut().take(a_n) {
                    *cell = rn;
                }
                row[a_n] = rn1;
            } else {
                row[0] = 1.0;
            }
            rows.push(row);
        }
        Ok(rows)
    }

    /// P(x_n = i): (q_{n-1}+q_n) alpha_n for 0, q_n alpha_n in the middle,
    /// q_n alpha_{n+1} at the top.
    pub fn marginal(&self, n: usize) -> Result<Vec<f64>, RotError> {
        let conv = self.cf.convergents(n.max(2))?;
        let a_n = self.cf.quotient(n).ok_or(RotError::DepthExhausted(n))? as usize;
        let mut alpha_n = 1.0;
        for r in &self.ratios[..n] {
            alpha_n *= r;
        }
        let qn = conv[n - 1].1.to_f64().unwrap_or(f64::INFINITY);
        let qn_prev = if n >= 2 {
            conv[n - 2].1.to_f64().unwrap_or(f64::INFINITY)
        } else {
            0.0
        };
        let mut row = vec![qn * alpha_n; a_n + 1];
        row[0] = (qn_prev + qn) * alpha_n;
        row[a_n] = qn * alpha_n * self.ratios[n];
        Ok(row)
    }
}

/// Ancestral sampling of digit strings x_1..x_n under the Markov measure.
pub fn sample_digits(
    measure: &RotMeasure,
    n: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<Vec<u64>>, RotError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let initial = measure.initial()?;
    let mut transitions = Vec::with_capacity(n);
    for level in 2..=n {
        transitions.push(measure.transition(level)?);
    }
    let draw = |row: &[f64], rng: &mut ChaCha8Rng| -> u64 {
        let mut u: f64 = rng.gen();
        for (i, p) in row.iter().enumerate() {
            u -= p;
            if u <= 0.0 {
                return i as u64;
            }
        }
        (row.len() - 1) as u64
    };
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut digits = Vec::with_capacity(n);
        digits.push(draw(&initial, &mut rng));
        for t in &transitions {
            let prev = *digits.last().unwrap() as usize;
            digits.push(draw(&t[prev], &mut rng));
        }
        out.push(digits);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DigitStats {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

/// Moment statistics of the digit sums S = x_1 + ... + x_n across samples.
pub fn digit_statistics(samples: &[Vec<u64>]) -> DigitStats {
    let sums: Vec<f64> = samples
        .iter()
        .map(|s| s.iter().map(|&d| d as f64).sum())
        .collect();
    let m = sums.len() as f64;
    let mean = sums.iter().sum::<f64>() / m;
    let central = |p: i32| sums.iter().map(|s| (s - mean).powi(p)).sum::<f64>() / m;
    let var = central(2);
    DigitStats {
        mean,
        variance: var,
        skewness: central(3) / var.powf(1.5),
        excess_kurtosis: central(4) / (var * var) - 3.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cardinality {
    Finite,
    Continuum,
    Unknown,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UniqueRotAnalysis {
    pub empty: Option<bool>,
    pub measure_zero: Option<bool>,
    pub cardinality: Cardinality,
    pub dim_positive: Option<bool>,
    pub mu_k_alpha: Approx,
    /// Last index with a_n = 1; None if no quotient equals 1 (or unknown).
    pub n0: Option<usize>,
}

/// Classification of the set of points with a unique rotational expansion.
/// Exact verdicts need an eventually periodic quotient stream; a bare prefix
/// leaves the tail-dependent answers Unknown.
pub fn unique_rotational_analysis(
    cf: &ContinuedFraction,
    horizon: usize,
) -> Result<UniqueRotAnalysis, RotError> {
    let horizon = horizon.max(8);
    if !cf.is_exact() {
        return Ok(UniqueRotAnalysis {
            empty: None,
            measure_zero: None,
            cardinality: Cardinality::Unknown,
            dim_positive: None,
            mu_k_alpha: Approx {
                value: 0.0,
                error_bound: 1.0,
            },
            n0: None,
        });
    }
    let period_has_one = cf.period.contains(&1);
    let empty = period_has_one;
    // bounded quotients make sum 1/a_n diverge
    let measure_zero = true;
    let n0 = if period_has_one {
        None
    } else {
        cf.preperiod
            .iter()
            .rposition(|&a| a == 1)
            .map(|i| i + 1)
    };
    let all_two_tail = !period_has_one && cf.period.iter().all(|&a| a == 2);
    let cardinality = if empty || all_two_tail {
        Cardinality::Finite
    } else {
        Cardinality::Continuum
    };
    let dim_positive = !empty && cf.period.iter().any(|&a| a >= 3);
    let mu = if empty {
        Approx {
            value: 0.0,
            error_bound: 0.0,
        }
    } else {
        // alpha_{n0} prod_{n > n0} (a_n - 1) alpha_n/alpha_{n-1}: upper bound
        // from the partial product, which already tends to 0 here
        let start = n0.unwrap_or(0);
        let ratios = cf.residue_ratios(horizon + start + 1)?;
        let mut upper = 1.0;
        for r in &ratios[..start] {
            upper *= r; // alpha_{n0}
        }
        for k in start + 1..=start + horizon {
            let a = cf.quotient(k).unwrap();
            upper *= (a - 1) as f64 * ratios[k - 1];
        }
        Approx {
            value: upper / 2.0,
            error_bound: upper / 2.0,
        }
    };
    Ok(UniqueRotAnalysis {
        empty: Some(empty),
        measure_zero: Some(measure_zero),
        cardinality,
        dim_positive: Some(dim_positive),
        mu_k_alpha: mu,
        n0,
    })
}

/// The three digit-statistics growth conditions on the quotient stream:
/// sum a_k^2 = o(n^2) (LLN), sum a_n^2 ln^2 n / n^2 < inf (SLLN), bounded
/// quotients (CLT). All hold for eventually periodic streams.
pub fn statistics_conditions(cf: &ContinuedFraction) -> (Option<bool>, Option<bool>, Option<bool>) {
    if cf.is_exact() {
        (Some(true), Some(true), Some(true))
    } else {
        (None, None, None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::fields;

    fn sqrt2_minus_1() -> Real {
        let f = fields::sqrt(2);
        Real::Alg(f.gen_element().sub(&FieldElement::one(&f)))
    }

    fn golden_minus_1() -> Real {
        let f = fields::golden();
        Real::Alg(f.gen_element().sub(&FieldElement::one(&f)))
    }

    #[test]
    fn cf_sqrt2() {
        let cf = ContinuedFraction::expand(&sqrt2_minus_1(), 10).unwrap();
        assert_eq!(cf.quotients(6).unwrap(), vec![2; 6]);
        assert!(cf.is_exact());
        let conv = cf.convergents(4).unwrap();
        let pq: Vec<(i64, i64)> = conv
            .iter()
            .map(|(p, q)| (p.to_i64().unwrap(), q.to_i64().unwrap()))
            .collect();
        assert_eq!(pq, vec![(0, 1), (1, 2), (2, 5), (5, 12)]);
    }

    #[test]
    fn cf_golden_fibonacci() {
        let cf = ContinuedFraction::expand(&golden_minus_1(), 10).unwrap();
        assert_eq!(cf.quotients(6).unwrap(), vec![1; 6]);
        let q: Vec<i64> = cf
            .convergents(6)
            .unwrap()
            .iter()
            .map(|(_, q)| q.to_i64().unwrap())
            .collect();
        assert_eq!(q, vec![1, 1, 2, 3, 5, 8]);
    }

    #[test]
    fn cf_rational_rejected() {
        let r = Real::Rat(Rat::new(BigInt::from(1), BigInt::from(3)));
        assert!(matches!(
            ContinuedFraction::expand(&r, 10),
            Err(RotError::RationalAlpha)
        ));
    }

    #[test]
    fn cf_identities_depth_200() {
        for cf in [
            ContinuedFraction::expand(&sqrt2_minus_1(), 8).unwrap(),
            ContinuedFraction::from_quotients(vec![3, 1], vec![2, 5]).unwrap(),
        ] {
            let n = 200;
            let conv = cf.convergents(n + 1).unwrap();
            let res = cf.residues(n + 1).unwrap();
            let alpha = &cf.alpha;
            for k in 2..=n {
                // alpha_k = |q_k alpha - p_k| with alternating sign
                let (p, q) = &conv[k - 1];
                let qr = real_from_rat_like(alpha, Rat::from_integer(q.clone()));
                let pr = real_from_rat_like(alpha, Rat::from_integer(p.clone()));
                let signed = alpha.mul(&qr).sub(&pr);
                let expect = if k % 2 == 1 {
                    signed
                } else {
                    real_mul_u64(&signed, 0).sub(&signed)
                };
                assert_eq!(
                    expect.cmp_real(&res[k - 1]),
                    std::cmp::Ordering::Equal,
                    "residue identity at {k}"
                );
                // q_k alpha_{k-1} + q_{k-1} alpha_k = 1
                let q_prev = real_from_rat_like(alpha, Rat::from_integer(conv[k - 2].1.clone()));
                let lhs = qr.mul(&res[k - 2]).add(&q_prev.mul(&res[k - 1]));
                assert_eq!(
                    lhs.cmp_real(&real_one_like(alpha)),
                    std::cmp::Ordering::Equal,
                    "unit identity at {k}"
                );
            }
        }
    }

    #[test]
    fn from_quotients_roundtrip() {
        let cf = ContinuedFraction::from_quotients(vec![2, 1], vec![3, 4]).unwrap();
        let re = ContinuedFraction::expand(&cf.alpha, 32).unwrap();
        assert_eq!(re.quotients(12).unwrap(), cf.quotients(12).unwrap());
    }

    #[test]
    fn psi_base_cases() {
        let cf = ContinuedFraction::expand(&sqrt2_minus_1(), 8).unwrap();
        let alpha = cf.alpha.to_f64();
        let p = psi1(&cf, &[0; 12]).unwrap();
        assert!((p.value - alpha).abs() < 1e-12);
        let p = psi2(&cf, &[1, 0, 0, 0, 0, 0, 0, 0]).unwrap();
        assert!((p.value - alpha).abs() < 1e-12);
    }

    #[test]
    fn psi2_maximal_telescopes() {
        let cf = ContinuedFraction::expand(&sqrt2_minus_1(), 8).unwrap();
        let k = 6;
        let mut digits = vec![0u64; 2 * k];
        for (i, d) in digits.iter_mut().enumerate() {
            if i % 2 == 0 {
                *d = cf.quotient(i + 1).unwrap();
            }
        }
        let res = cf.residues(2 * k + 1).unwrap();
        let expect = 1.0 - res[2 * k - 1].to_f64();
        let p = psi2(&cf, &digits).unwrap();
        assert!((p.value - expect).abs() < 1e-12);
    }

    #[test]
    fn psi_inadmissible_flagged() {
        let cf = ContinuedFraction::expand(&sqrt2_minus_1(), 8).unwrap();
        // digit 2 = a_2 followed by nonzero
        assert!(matches!(
            psi2(&cf, &[0, 2, 1]),
            Err(RotError::Inadmissible { pos: 3, .. })
        ));
    }

    #[test]
    fn encode_base_cases() {
        let cf = ContinuedFraction::expand(&sqrt2_minus_1(), 8).unwrap();
        let enc = ostrowski_encode(&cf, &cf.alpha.clone(), 8).unwrap();
        assert_eq!(enc, vec![1, 0, 0, 0, 0, 0, 0, 0]);
        let zero = Real::Alg(FieldElement::zero(&fields::sqrt(2)));
        assert_eq!(ostrowski_encode(&cf, &zero, 5).unwrap(), vec![0; 5]);
        let half = Real::Alg(FieldElement::from_rational(
            &fields::sqrt(2),
            Rat::new(BigInt::from(1), BigInt::from(2)),
        ));
        let enc = ostrowski_encode(&cf, &half, 4).unwrap();
        assert_eq!(enc, vec![1, 0, 1, 0]);
    }

    #[test]
    fn encode_roundtrip_random() {
        let cf = ContinuedFraction::expand(&sqrt2_minus_1(), 8).unwrap();
        let f = fields::sqrt(2);
        let mut state = 0x9E3779B97F4A7C15u64;
        let depth = 20;
        let res = cf.residues(depth + 1).unwrap();
        let tol = res[depth - 1].to_f64() * 1.001;
        for _ in 0..400 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            let num = (state >> 20) as i64 % 100_000;
            let x = Real::Alg(FieldElement::from_rational(
                &f,
                Rat::new(BigInt::from(num), BigInt::from(100_000)),
            ));
            let enc = ostrowski_encode(&cf, &x, depth).unwrap();
            let back = psi2(&cf, &enc).unwrap();
            assert!((back.value - x.to_f64()).abs() <= tol);
        }
    }

    #[test]
    fn model1_encode_roundtrip() {
        let cf = ContinuedFraction::expand(&sqrt2_minus_1(), 8).unwrap();
        let f = fields::sqrt(2);
        let depth = 16;
        let res = cf.residues(depth + 2).unwrap();
        let tol = (res[depth - 1].to_f64() + res[depth].to_f64()) * 1.001;
        for num in [1i64, 7, 13, 29, 55, 71, 88, 97] {
            let x = Real::Alg(FieldElement::from_rational(
                &f,
                Rat::new(BigInt::from(num), BigInt::from(101)),
            ));
            let enc = rot1_encode(&cf, &x, depth).unwrap();
            check_admissible_1(&cf, &enc).unwrap();
            let back = psi1(&cf, &enc).unwrap();
            assert!(
                (back.value - x.to_f64()).abs() <= tol,
                "x={num}/101 got {} want {}",
                back.value,
                x.to_f64()
            );
        }
    }

    #[test]
    fn integer_encodings() {
        // model 2 with Fibonacci weights
        let cf = ContinuedFraction::expand(&golden_minus_1(), 8).unwrap();
        let enc = integer_encode2(&cf, &BigInt::from(1)).unwrap();
        assert_eq!(enc, vec![0, 1]);
        let enc = integer_encode2(&cf, &BigInt::from(-1)).unwrap();
        assert_eq!(enc, vec![1]);
        // model 1 base case: N = 1 is the empty sum
        let pell = ContinuedFraction::expand(&sqrt2_minus_1(), 8).unwrap();
        let enc = integer_encode1(&pell, &BigInt::from(1)).unwrap();
        assert!(enc.iter().all(|&d| d == 0));
    }

    #[test]
    fn integer_identities_bulk() {
        for cf in [
            ContinuedFraction::expand(&golden_minus_1(), 8).unwrap(),
            ContinuedFraction::expand(&sqrt2_minus_1(), 8).unwrap(),
        ] {
            let conv = cf.convergents(64).unwrap();
            let model1 = cf.quotient(1).unwrap() >= 2;
            for n in (1..=100_000i64).step_by(271) {
                if model1 {
                    let digits = integer_encode1(&cf, &BigInt::from(n)).unwrap();
                    let total: BigInt = digits
                        .iter()
                        .enumerate()
                        .map(|(i, &d)| BigInt::from(d) * &conv[i].1)
                        .sum();
                    assert_eq!(total + 1, BigInt::from(n));
                }
                for sign in [1, -1] {
                    let target = BigInt::from(sign * n);
                    let digits = integer_encode2(&cf, &target).unwrap();
                    check_admissible_2(&cf, &digits).unwrap();
                    let total: BigInt = digits
                        .iter()
                        .enumerate()
                        .map(|(i, &d)| {
                            let s = if (i + 1) % 2 == 0 { 1 } else { -1 };
                            BigInt::from(d) * s * &conv[i].1
                        })
                        .sum();
                    assert_eq!(total, target);
                }
            }
        }
    }

    #[test]
    fn incidence_shapes() {
        let cf = ContinuedFraction::from_quotients(vec![], vec![2, 3]).unwrap();
        let x1 = RotCompactum1::new(cf.clone()).unwrap();
        // level 1: r_1 = a_1 = 2 rows, r_2 = a_2 + 1 = 4 cols
        assert_eq!(
            x1.incidence(1).unwrap(),
            vec![vec![1, 1, 1, 1], vec![1, 1, 1, 0]]
        );
        let x2 = RotCompactum2::new(cf);
        assert_eq!(
            x2.incidence(1).unwrap(),
            vec![vec![1, 1, 1, 1], vec![1, 1, 1, 1], vec![1, 0, 0, 0]]
        );
        assert!(x2.ascending(1));
        assert!(!x2.ascending(2));
    }

    #[test]
    fn markov_rows_and_marginals() {
        let cf = ContinuedFraction::expand(&sqrt2_minus_1(), 8).unwrap();
        let m = markov_measure(&cf, 40).unwrap();
        let init = m.initial().unwrap();
        assert!((init.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for n in 2..=40 {
            for row in m.transition(n).unwrap() {
                assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12, "level {n}");
            }
        }
        for n in 1..=30 {
            let marg = m.marginal(n).unwrap();
            assert!((marg.iter().sum::<f64>() - 1.0).abs() < 1e-9, "level {n}");
        }
        // marginal consistency: initial pushed through the kernel
        let mut dist = init;
        for n in 2..=20 {
            let t = m.transition(n).unwrap();
            let cols = t[0].len();
            let mut next = vec![0.0; cols];
            for (j, row) in t.iter().enumerate() {
                for (i, p) in row.iter().enumerate() {
                    next[i] += dist[j] * p;
                }
            }
            let marg = m.marginal(n).unwrap();
            for (a, b) in next.iter().zip(&marg) {
                assert!((a - b).abs() < 1e-9, "level {n}");
            }
            dist = next;
        }
    }

    #[test]
    fn clt_echo() {
        let cf = ContinuedFraction::expand(&sqrt2_minus_1(), 8).unwrap();
        let m = markov_measure(&cf, 10_000).unwrap();
        let samples = sample_digits(&m, 10_000, 1_000, 42).unwrap();
        let stats = digit_statistics(&samples);
        assert!(stats.skewness.abs() < 0.2, "skew {}", stats.skewness);
        assert!(
            stats.excess_kurtosis.abs() < 0.2,
            "kurt {}",
            stats.excess_kurtosis
        );
    }

    #[test]
    fn unique_analysis_verdicts() {
        let all1 = ContinuedFraction::from_quotients(vec![], vec![1]).unwrap();
        let v = unique_rotational_analysis(&all1, 32).unwrap();
        assert_eq!(v.empty, Some(true));
        assert_eq!(v.cardinality, Cardinality::Finite);

        let all2 = ContinuedFraction::from_quotients(vec![], vec![2]).unwrap();
        let v = unique_rotational_analysis(&all2, 32).unwrap();
        assert_eq!(v.empty, Some(false));
        assert_eq!(v.measure_zero, Some(true));
        assert_eq!(v.cardinality, Cardinality::Finite);
        assert_eq!(v.dim_positive, Some(false));

        let all3 = ContinuedFraction::from_quotients(vec![], vec![3]).unwrap();
        let v = unique_rotational_analysis(&all3, 32).unwrap();
        assert_eq!(v.cardinality, Cardinality::Continuum);
        assert_eq!(v.measure_zero, Some(true));
        assert_eq!(v.dim_positive, Some(true));

        let prefix = ContinuedFraction::expand(&Real::F64(0.717171), 12).unwrap();
        let v = unique_rotational_analysis(&prefix, 32).unwrap();
        assert_eq!(v.cardinality, Cardinality::Unknown);
        assert_eq!(v.empty, None);
    }

    #[test]
    fn complement_swaps_range() {
        let cf = ContinuedFraction::expand(&golden_minus_1(), 8).unwrap();
        let comp = cf.complement().unwrap();
        assert!(comp.quotient(1).unwrap() >= 2);
        assert!((comp.alpha.to_f64() - (1.0 - cf.alpha.to_f64())).abs() < 1e-12);
    }
}
