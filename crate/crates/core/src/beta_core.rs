//! Beta-expansions of reals: greedy, lazy and intermediate digit algorithms,
//! Parry admissibility, and classification of the beta-compactum.

use crate::digits::DigitSeq;
use crate::exactnum::{fields, rat_to_f64, Field, FieldElement};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::HashMap;
use thiserror::Error;

type Rat = BigRational;

#[derive(Debug, Error)]
pub enum BetaError {
    #[error("base must exceed 1")]
    BaseNotGreaterThanOne,
    #[error("input {0} outside the domain of the requested expansion")]
    OutOfDomain(String),
    #[error("operation requires an exact (algebraic or rational) base")]
    ExactBaseRequired,
    #[error("parameter out of range: {0}")]
    BadParameter(String),
}

/// A real number in the same representation mode as the base.
#[derive(Debug, Clone, PartialEq)]
pub enum Real {
    Alg(FieldElement),
    Rat(Rat),
    F64(f64),
}

impl Real {
    pub fn from_rat_in(beta: &Beta, r: Rat) -> Real {
        match beta {
            Beta::Algebraic(b) => Real::Alg(FieldElement::from_rational(b.field(), r)),
            Beta::Rational(_) => Real::Rat(r),
            Beta::Numeric(_) => Real::F64(rat_to_f64(&r)),
        }
    }

    pub fn zero_in(beta: &Beta) -> Real {
        Real::from_rat_in(beta, Rat::zero())
    }

    pub fn add(&self, other: &Real) -> Real {
        match (self, other) {
            (Real::Alg(a), Real::Alg(b)) => Real::Alg(a.add(b)),
            (Real::Rat(a), Real::Rat(b)) => Real::Rat(a + b),
            (Real::F64(a), Real::F64(b)) => Real::F64(a + b),
            _ => panic!("mixed real modes"),
        }
    }

    pub fn sub(&self, other: &Real) -> Real {
        match (self, other) {
            (Real::Alg(a), Real::Alg(b)) => Real::Alg(a.sub(b)),
            (Real::Rat(a), Real::Rat(b)) => Real::Rat(a - b),
            (Real::F64(a), Real::F64(b)) => Real::F64(a - b),
            _ => panic!("mixed real modes"),
        }
    }

    pub fn mul(&self, other: &Real) -> Real {
        match (self, other) {
            (Real::Alg(a), Real::Alg(b)) => Real::Alg(a.mul(b)),
            (Real::Rat(a), Real::Rat(b)) => Real::Rat(a * b),
            (Real::F64(a), Real::F64(b)) => Real::F64(a * b),
            _ => panic!("mixed real modes"),
        }
    }

    pub fn sub_int(&self, n: &BigInt) -> Real {
        match self {
            Real::Alg(a) => Real::Alg(a.sub(&FieldElement::from_rational(
                a.field(),
                Rat::from_integer(n.clone()),
            ))),
            Real::Rat(a) => Real::Rat(a - Rat::from_integer(n.clone())),
            Real::F64(a) => Real::F64(a - n.to_f64().unwrap_or(f64::NAN)),
        }
    }

    pub fn floor_int(&self) -> BigInt {
        match self {
            Real::Alg(a) => a.floor_int(),
            Real::Rat(a) => a.floor().to_integer(),
            Real::F64(a) => BigInt::from(a.floor() as i64),
        }
    }

    pub fn cmp_real(&self, other: &Real) -> Ordering {
        match (self, other) {
            (Real::Alg(a), Real::Alg(b)) => a.cmp_exact(b),
            (Real::Rat(a), Real::Rat(b)) => a.cmp(b),
            (Real::F64(a), Real::F64(b)) => a.partial_cmp(b).expect("NaN in comparison"),
            _ => panic!("mixed real modes"),
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Real::Alg(a) => a.is_negative(),
            Real::Rat(a) => a.is_negative(),
            Real::F64(a) => *a < 0.0,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Alg(a) => a.to_f64(),
            Real::Rat(a) => rat_to_f64(a),
            Real::F64(a) => *a,
        }
    }

    /// Exact orbit key for cycle detection; None in numeric mode.
    fn exact_key(&self) -> Option<RealKey> {
        match self {
            Real::Alg(a) => Some(RealKey::Alg(a.clone())),
            Real::Rat(a) => Some(RealKey::Rat(a.clone())),
            Real::F64(_) => None,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum RealKey {
    Alg(FieldElement),
    Rat(Rat),
}

/// The base of the expansion, `beta > 1`.
#[derive(Debug, Clone)]
pub enum Beta {
    Algebraic(FieldElement),
    Rational(Rat),
    Numeric(f64),
}

impl Beta {
    pub fn algebraic(field: &Field) -> Beta {
        Beta::Algebraic(field.gen_element())
    }

    pub fn golden() -> Beta {
        Beta::algebraic(&fields::golden())
    }

    pub fn tribonacci() -> Beta {
        Beta::algebraic(&fields::tribonacci())
    }

    pub fn plastic() -> Beta {
        Beta::algebraic(&fields::plastic())
    }

    pub fn integer(n: u32) -> Beta {
        Beta::Rational(Rat::from_integer(BigInt::from(n)))
    }

    pub fn validate(&self) -> Result<(), BetaError> {
        let ok = match self {
            Beta::Algebraic(b) => {
                b.sub(&FieldElement::one(b.field())).is_positive()
            }
            Beta::Rational(b) => *b > Rat::one(),
            Beta::Numeric(b) => *b > 1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(BetaError::BaseNotGreaterThanOne)
        }
    }

    pub fn as_real(&self) -> Real {
        match self {
            Beta::Algebraic(b) => Real::Alg(b.clone()),
            Beta::Rational(b) => Real::Rat(b.clone()),
            Beta::Numeric(b) => Real::F64(*b),
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Beta::Numeric(_))
    }

    pub fn to_f64(&self) -> f64 {
        self.as_real().to_f64()
    }

    /// Integer part of beta.
    pub fn floor(&self) -> u32 {
        self.as_real().floor_int().to_u32().expect("huge base")
    }

    /// Smallest digit bound for expansions on [0,1): `ceil(beta) - 1`.
    pub fn greedy_alphabet_max(&self) -> u32 {
        let f = self.floor();
        if self.is_integer() {
            f - 1
        } else {
            f
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Beta::Algebraic(b) => b.as_rational().map_or(false, |r| r.is_integer()),
            Beta::Rational(b) => b.is_integer(),
            Beta::Numeric(b) => b.fract() == 0.0,
        }
    }

    /// `1/(beta - 1)` as an exact Real when possible.
    fn one_over_beta_minus_one(&self) -> Real {
        match self {
            Beta::Algebraic(b) => {
                let one = FieldElement::one(b.field());
                Real::Alg(one.div(&b.sub(&one)).expect("beta > 1"))
            }
            Beta::Rational(b) => Real::Rat(Rat::one() / (b - Rat::one())),
            Beta::Numeric(b) => Real::F64(1.0 / (b - 1.0)),
        }
    }
}

fn digit_u32(d: &BigInt) -> u32 {
    d.to_u32().expect("digit out of u32 range")
}

/// Shared orbit loop: `state -> beta*state - digit(state)`, with exact cycle
/// detection when the mode allows it.
fn expand_orbit<F>(
    mut state: Real,
    beta: &Beta,
    alphabet_max: u32,
    n: usize,
    digit_rule: F,
) -> DigitSeq
where
    F: Fn(&Real) -> BigInt,
{
    let b = beta.as_real();
    let mut digits: Vec<u32> = Vec::new();
    let mut seen: HashMap<RealKey, usize> = HashMap::new();
    for step in 0..n {
        if let Some(key) = state.exact_key() {
            if let Some(&first) = seen.get(&key) {
                let period = digits.split_off(first);
                return DigitSeq::eventually_periodic(alphabet_max, digits, period);
            }
            seen.insert(key, step);
        }
        let scaled = b.mul(&state);
        let d = digit_rule(&scaled);
        digits.push(digit_u32(&d));
        state = scaled.sub_int(&d);
    }
    DigitSeq::finite(alphabet_max, digits)
}

/// First `n` greedy digits of `x` in base beta; exact modes detect eventual
/// periodicity and return preperiod plus period.
pub fn greedy_expand(x: &Real, beta: &Beta, n: usize) -> Result<DigitSeq, BetaError> {
    beta.validate()?;
    let one = Real::from_rat_in(beta, Rat::one());
    if x.is_negative() || x.cmp_real(&one) != Ordering::Less {
        return Err(BetaError::OutOfDomain(format!("{:.6} not in [0,1)", x.to_f64())));
    }
    Ok(expand_orbit(x.clone(), beta, beta.greedy_alphabet_max().max(1), n, |scaled| scaled.floor_int()))
}

/// First `n` lazy digits of `x`, digits in `{0,...,floor(beta)}` and remainders
/// kept inside the half-open interval `[0, floor(beta)/(beta-1))`.
pub fn lazy_expand(x: &Real, beta: &Beta, n: usize) -> Result<DigitSeq, BetaError> {
    beta.validate()?;
    let dmax = BigInt::from(beta.floor());
    let bound = beta
        .one_over_beta_minus_one()
        .mul(&Real::from_rat_in(beta, Rat::from_integer(dmax.clone())));
    if x.is_negative() || x.cmp_real(&bound) != Ordering::Less {
        return Err(BetaError::OutOfDomain(format!(
            "{:.6} not in [0, floor(beta)/(beta-1))",
            x.to_f64()
        )));
    }
    let dmax_u = digit_u32(&dmax);
    Ok(expand_orbit(x.clone(), beta, dmax_u.max(1), n, move |scaled| {
        // Smallest digit d with beta*y - d strictly below the domain bound.
        let t = scaled.sub(&bound);
        let mut d: BigInt = t.floor_int() + 1;
        if d.is_negative() {
            d = BigInt::zero();
        }
        debug_assert!(d <= dmax);
        d
    }))
}

/// Digits of the intermediate map `T_{beta,alpha}` on `[alpha, 1+alpha]` for
/// `beta` in (1,2): digit 1 whenever the upper branch `beta*x - 1` is taken.
pub fn intermediate_expand(
    x: &Real,
    beta: &Beta,
    alpha: &Real,
    n: usize,
) -> Result<DigitSeq, BetaError> {
    beta.validate()?;
    let b = beta.as_real();
    let one = Real::from_rat_in(beta, Rat::one());
    let two = Real::from_rat_in(beta, Rat::from_integer(BigInt::from(2)));
    if b.cmp_real(&two) != Ordering::Less {
        return Err(BetaError::BadParameter("beta must lie in (1,2)".into()));
    }
    // alpha in [0, (2-beta)/(beta-1)]
    let alpha_top = two.sub(&b).mul(&beta.one_over_beta_minus_one());
    if alpha.is_negative() || alpha.cmp_real(&alpha_top) == Ordering::Greater {
        return Err(BetaError::BadParameter(
            "alpha must lie in [0,(2-beta)/(beta-1)]".into(),
        ));
    }
    let hi = one.add(alpha);
    if x.cmp_real(alpha) == Ordering::Less || x.cmp_real(&hi) == Ordering::Greater {
        return Err(BetaError::OutOfDomain(format!(
            "{:.6} not in [alpha, 1+alpha]",
            x.to_f64()
        )));
    }
    // Branch boundary (1+alpha)/beta; the boundary point takes digit 1,
    // matching the greedy convention at branch boundaries.
    Ok(expand_orbit(x.clone(), beta, 1, n, move |scaled| {
        if scaled.cmp_real(&hi) == Ordering::Less {
            BigInt::zero()
        } else {
            BigInt::one()
        }
    }))
}

/// Greedy expansion of 1 together with the derived quasi-greedy sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParryData {
    /// Greedy expansion `a'` of 1, finite or eventually periodic.
    pub a_prime: DigitSeq,
    /// Quasi-greedy sequence `a`; when `a'` is finite with last nonzero digit
    /// at position k, this is `(a'_1,...,a'_{k-1}, a'_k - 1)` repeated.
    pub a: DigitSeq,
    /// False when the orbit search hit the step bound without resolving.
    pub complete: bool,
}

pub const ORBIT_BOUND: usize = 10_000;

pub fn expansion_of_one(beta: &Beta) -> Result<ParryData, BetaError> {
    expansion_of_one_bounded(beta, ORBIT_BOUND)
}

pub fn expansion_of_one_bounded(beta: &Beta, bound: usize) -> Result<ParryData, BetaError> {
    beta.validate()?;
    let one = Real::from_rat_in(beta, Rat::one());
    let a_prime = expand_orbit(one, beta, beta.floor().max(1), bound, |scaled| scaled.floor_int());
    let complete = beta.is_exact()
        && (a_prime.is_finite() || !a_prime.period.is_empty())
        && a_prime.preperiod.len() + a_prime.period.len() < bound;
    // Only rewrite finite -> periodic when the orbit genuinely terminated;
    // a truncated expansion must stay as-is.
    let a = if complete {
        quasi_greedy(&a_prime)
    } else {
        a_prime.clone()
    };
    Ok(ParryData {
        a_prime,
        a,
        complete,
    })
}

fn quasi_greedy(a_prime: &DigitSeq) -> DigitSeq {
    if a_prime.is_finite() && !a_prime.is_zero() {
        let mut period = a_prime.preperiod.clone();
        let last = period.last_mut().unwrap();
        *last -= 1;
        DigitSeq::eventually_periodic(a_prime.alphabet_max, Vec::new(), period)
    } else {
        a_prime.clone()
    }
}

/// Membership in the beta-compactum: every shift of `eps` lexicographically
/// strictly below the quasi-greedy sequence.
pub fn is_parry_admissible(eps: &DigitSeq, parry: &ParryData) -> bool {
    eps.all_shifts()
        .iter()
        .all(|s| s.cmp_lex(&parry.a) == Ordering::Less)
}

/// Whether `a` is itself a valid quasi-greedy sequence: every shift is below
/// it, with equality only for purely periodic shifts.
pub fn is_parry_sequence(a: &DigitSeq) -> bool {
    if a.is_zero() {
        return false;
    }
    let n = a.preperiod.len() + a.period.len().max(1);
    for k in 1..=n {
        let s = a.shift(k);
        match s.cmp_lex(a) {
            Ordering::Greater => return false,
            Ordering::Equal => {
                if !s.preperiod.is_empty() {
                    return false;
                }
            }
            Ordering::Less => {}
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CompactumClass {
    /// Subshift of finite type: greedy expansion of 1 is finite.
    Sft,
    /// Sofic but not SFT: quasi-greedy sequence eventually periodic.
    Sofic,
    /// Orbit of 1 proven infinite.
    NotSofic,
    /// Bound exhausted without resolving the orbit.
    Unknown,
}

pub fn classify_compactum(beta: &Beta) -> Result<CompactumClass, BetaError> {
    classify_compactum_bounded(beta, ORBIT_BOUND)
}

pub fn classify_compactum_bounded(
    beta: &Beta,
    bound: usize,
) -> Result<CompactumClass, BetaError> {
    if !beta.is_exact() {
        return Err(BetaError::ExactBaseRequired);
    }
    let parry = expansion_of_one_bounded(beta, bound)?;
    if !parry.complete {
        return Ok(CompactumClass::Unknown);
    }
    if parry.a_prime.is_finite() {
        Ok(CompactumClass::Sft)
    } else {
        Ok(CompactumClass::Sofic)
    }
}

/// `sum_{n >= start_index} eps_n beta^{-n}` with the period summed by the
/// geometric closed form; exact in algebraic and rational modes.
pub fn evaluate(eps: &DigitSeq, beta: &Beta, start_index: i64) -> Result<Real, BetaError> {
    beta.validate()?;
    let b = beta.as_real();
    let binv = real_inverse(&b, beta)?;
    // Value with first digit at weight beta^{-1}, then scaled by
    // beta^{1-start_index}.
    let mut prefix = Real::zero_in(beta);
    let mut w = binv.clone();
    for &d in &eps.preperiod {
        prefix = prefix.add(&w.mul(&Real::from_rat_in(beta, Rat::from_integer(BigInt::from(d)))));
        w = w.mul(&binv);
    }
    let mut total = prefix;
    if !eps.period.is_empty() {
        // P = sum_{i=1..p} d_i beta^{-i}, tail = beta^{-L} P / (1 - beta^{-p}).
        let mut p_sum = Real::zero_in(beta);
        let mut wi = binv.clone();
        for &d in &eps.period {
            p_sum = p_sum.add(&wi.mul(&Real::from_rat_in(beta, Rat::from_integer(BigInt::from(d)))));
            wi = wi.mul(&binv);
        }
        // After the loops wi is beta^{-(p+1)} and w is beta^{-(L+1)}; scale
        // both back by beta.
        let one = Real::from_rat_in(beta, Rat::one());
        let denom = one.sub(&wi.mul(&b));
        let tail = w.mul(&b).mul(&p_sum).mul(&real_inverse_of(&denom, beta)?);
        total = total.add(&tail);
    }
    // Scale by beta^{1-start_index}.
    let shift = 1 - start_index;
    let factor = real_pow(&b, &binv, shift, beta);
    Ok(total.mul(&factor))
}

fn real_inverse(b: &Real, beta: &Beta) -> Result<Real, BetaError> {
    real_inverse_of(b, beta)
}

fn real_inverse_of(v: &Real, beta: &Beta) -> Result<Real, BetaError> {
    match v {
        Real::Alg(a) => a
            .inverse()
            .map(Real::Alg)
            .map_err(|_| BetaError::BadParameter("inverse of zero".into())),
        Real::Rat(r) => {
            if r.is_zero() {
                Err(BetaError::BadParameter("inverse of zero".into()))
            } else {
                Ok(Real::Rat(Rat::one() / r))
            }
        }
        Real::F64(f) => Ok(Real::F64(1.0 / f)),
        #[allow(unreachable_patterns)]
        _ => {
            let _ = beta;
            unreachable!()
        }
    }
}

fn real_pow(b: &Real, binv: &Real, k: i64, beta: &Beta) -> Real {
    let mut acc = Real::from_rat_in(beta, Rat::one());
    let base = if k >= 0 { b.clone() } else { binv.clone() };
    for _ in 0..k.unsigned_abs() {
        acc = acc.mul(&base);
    }
    acc
}
