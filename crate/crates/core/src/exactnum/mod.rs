//! Exact arithmetic in real algebraic number fields.
//!
//! A field is described by the monic integer minimal polynomial of its
//! generator `beta` together with a rational interval isolating the
//! designated real root. Elements are rational coordinate vectors with
//! respect to the power basis `1, beta, ..., beta^{m-1}`; arithmetic is
//! performed modulo the minimal polynomial, and all sign decisions are made
//! by interval refinement with an exact-zero shortcut.

pub mod poly;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, Mutex};
use thiserror::Error;

use poly::Rat;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("minimal polynomial must be monic of degree >= 1")]
    NotMonic,
    #[error("polynomial is reducible over the rationals: factor {0}")]
    Reducible(String),
    #[error("irreducibility check unavailable above degree 6; construct with assert_irreducible")]
    DegreeTooLarge,
    #[error("isolating interval must contain exactly one real root (found {0})")]
    BadRootCount(usize),
    #[error("designated root must exceed 1")]
    RootNotGreaterThanOne,
    #[error("division by zero field element")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("invalid field descriptor: {0}")]
    BadDescriptor(String),
}

/// Monic integer minimal polynomial with an isolating interval for the
/// designated real root `beta > 1`.
pub struct MinimalPolynomial {
    coeffs: Vec<BigInt>,
    degree: usize,
    root_interval: Mutex<(Rat, Rat)>,
    irreducibility_verified: bool,
}

impl fmt::Debug for MinimalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MinimalPolynomial({:?})", self.coeffs)
    }
}

impl PartialEq for MinimalPolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}
impl Eq for MinimalPolynomial {}

/// Shared handle to a number field.
pub type Field = Arc<MinimalPolynomial>;

impl MinimalPolynomial {
    /// `coeffs[i]` is the coefficient of `x^i`; the polynomial must be monic.
    pub fn new(coeffs: Vec<BigInt>, lo: Rat, hi: Rat) -> Result<Field, FieldError> {
        Self::build(coeffs, lo, hi, false)
    }

    /// Skips the irreducibility check; the flag is recorded in the value.
    pub fn assert_irreducible(coeffs: Vec<BigInt>, lo: Rat, hi: Rat) -> Result<Field, FieldError> {
        Self::build(coeffs, lo, hi, true)
    }

    fn build(coeffs: Vec<BigInt>, lo: Rat, hi: Rat, trusted: bool) -> Result<Field, FieldError> {
        let coeffs = {
            let mut c = coeffs;
            while c.last().map_or(false, |x| x.is_zero()) {
                c.pop();
            }
            c
        };
        if coeffs.len() < 2 || !coeffs.last().unwrap().is_one() {
            return Err(FieldError::NotMonic);
        }
        let degree = coeffs.len() - 1;
        let verified = if trusted {
            false
        } else {
            if degree > 6 {
                return Err(FieldError::DegreeTooLarge);
            }
            if let Some(factor) = reducible_factor(&coeffs) {
                return Err(FieldError::Reducible(factor));
            }
            true
        };
        let rat: Vec<Rat> = coeffs.iter().map(|c| Rat::from_integer(c.clone())).collect();
        let roots = poly::count_roots(&rat, &lo, &hi);
        if roots != 1 {
            return Err(FieldError::BadRootCount(roots));
        }
        if hi <= Rat::one() {
            return Err(FieldError::RootNotGreaterThanOne);
        }
        let field = MinimalPolynomial {
            coeffs,
            degree,
            root_interval: Mutex::new((lo, hi)),
            irreducibility_verified: verified,
        };
        // Make sure the whole isolating interval sits above 1 so that interval
        // evaluation of powers of beta is meaningful.
        field.refine_until(|l, _| *l >= Rat::one());
        Ok(Arc::new(field))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn irreducibility_verified(&self) -> bool {
        self.irreducibility_verified
    }

    fn rational_coeffs(&self) -> Vec<Rat> {
        self.coeffs
            .iter()
            .map(|c| Rat::from_integer(c.clone()))
            .collect()
    }

    pub fn root_interval(&self) -> (Rat, Rat) {
        self.root_interval.lock().unwrap().clone()
    }

    /// Narrows the cached isolating interval until `stop(lo, hi)` holds.
    fn refine_until<F: Fn(&Rat, &Rat) -> bool>(&self, stop: F) -> (Rat, Rat) {
        let mut guard = self.root_interval.lock().unwrap();
        let p = self.rational_coeffs();
        let sign_hi = poly::eval(&p, &guard.1).is_positive();
        while !stop(&guard.0, &guard.1) {
            let mid = (&guard.0 + &guard.1) / Rat::from_integer(BigInt::from(2));
            let v = poly::eval(&p, &mid);
            if v.is_zero() {
                // Root is rational; collapse to a point.
                guard.0 = mid.clone();
                guard.1 = mid;
                break;
            }
            if v.is_positive() == sign_hi {
                guard.1 = mid;
            } else {
                guard.0 = mid;
            }
        }
        guard.clone()
    }

    /// Isolating interval of width at most `eps`.
    pub fn refine_root(&self, eps: &Rat) -> (Rat, Rat) {
        self.refine_until(|lo, hi| &(hi - lo) <= eps)
    }

    /// Discriminant of the polynomial (an integer for monic integer input).
    pub fn discriminant(&self) -> BigInt {
        let p = self.rational_coeffs();
        let dp = poly::derivative(&p);
        let res = poly::resultant(&p, &dp);
        let m = self.degree;
        let sign = if (m * (m - 1) / 2) % 2 == 1 { -1 } else { 1 };
        let d = res * Rat::from_integer(BigInt::from(sign));
        debug_assert!(d.is_integer());
        d.to_integer()
    }

    /// The generator as a field element.
    pub fn gen_element(self: &Field) -> FieldElement {
        let mut coords = vec![Rat::zero(); self.degree];
        if self.degree == 1 {
            // beta is rational: x + c0 = 0 => beta = -c0.
            coords[0] = Rat::from_integer(-self.coeffs[0].clone());
        } else {
            coords[1] = Rat::one();
        }
        FieldElement {
            coords,
            field: self.clone(),
        }
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        let (lo, hi) = self.root_interval();
        FieldDescriptor {
            minpoly: self.coeffs.iter().map(|c| c.to_string()).collect(),
            root_interval: [rat_to_string(&lo), rat_to_string(&hi)],
        }
    }
}

/// JSON-facing field descriptor with exact integer/rational strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub minpoly: Vec<String>,
    pub root_interval: [String; 2],
}

impl FieldDescriptor {
    pub fn to_field(&self) -> Result<Field, FieldError> {
        let coeffs: Result<Vec<BigInt>, _> = self
            .minpoly
            .iter()
            .map(|s| s.parse::<BigInt>())
            .collect();
        let coeffs = coeffs.map_err(|e| FieldError::BadDescriptor(e.to_string()))?;
        let lo = parse_rat(&self.root_interval[0])
            .ok_or_else(|| FieldError::BadDescriptor("bad interval lo".into()))?;
        let hi = parse_rat(&self.root_interval[1])
            .ok_or_else(|| FieldError::BadDescriptor("bad interval hi".into()))?;
        MinimalPolynomial::new(coeffs, lo, hi)
    }
}

pub fn parse_rat(s: &str) -> Option<Rat> {
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Rat::new(n, d))
    } else if let Some((int, frac)) = s.split_once('.') {
        let sign = if int.trim_start().starts_with('-') { -1 } else { 1 };
        let int: BigInt = if int.trim() == "-" || int.trim().is_empty() {
            BigInt::zero()
        } else {
            int.trim().parse().ok()?
        };
        let digits = frac.trim();
        let num: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().ok()?
        };
        let den = BigInt::from(10u32).pow(digits.len() as u32);
        Some(Rat::from_integer(int) + Rat::new(num * BigInt::from(sign), den))
    } else {
        let n: BigInt = s.trim().parse().ok()?;
        Some(Rat::from_integer(n))
    }
}

pub fn rat_to_string(r: &Rat) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Rational-root test plus small-degree factor search; returns a factor
/// description when the monic integer polynomial is reducible.
fn reducible_factor(coeffs: &[BigInt]) -> Option<String> {
    let degree = coeffs.len() - 1;
    if degree == 1 {
        return None;
    }
    if coeffs[0].is_zero() {
        return Some("x".to_string());
    }
    // Monic: rational roots are integer divisors of the constant term.
    for d in divisors(&coeffs[0].abs()) {
        for root in [d.clone(), -d] {
            let mut acc = BigInt::zero();
            for c in coeffs.iter().rev() {
                acc = acc * &root + c;
            }
            if acc.is_zero() {
                return Some(format!("x - ({})", root));
            }
        }
    }
    if degree <= 3 {
        return None;
    }
    // Monic factors of degree 2 (and 3 when degree 6): constant term divides
    // coeffs[0]; middle coefficients bounded by a crude Mignotte-style bound.
    let bound: BigInt = coeffs.iter().map(|c| c.abs()).sum::<BigInt>() * BigInt::from(2);
    let b = bound.to_i64().unwrap_or(1 << 20).min(1 << 20);
    for c0 in divisors(&coeffs[0].abs()) {
        for c0 in [c0.clone(), -c0] {
            for a in -b..=b {
                let factor = [c0.clone(), BigInt::from(a), BigInt::one()];
                if divides_exactly(coeffs, &factor) {
                    return Some(format!("x^2 + {}x + {}", a, c0));
                }
            }
        }
    }
    if degree == 6 {
        for c0 in divisors(&coeffs[0].abs()) {
            for c0 in [c0.clone(), -c0] {
                for a in -b..=b {
                    for bb in -b..=b {
                        let factor =
                            [c0.clone(), BigInt::from(bb), BigInt::from(a), BigInt::one()];
                        if divides_exactly(coeffs, &factor) {
                            return Some(format!("x^3 + {}x^2 + {}x + {}", a, bb, c0));
                        }
                    }
                }
            }
        }
    }
    None
}

fn divides_exactly(p: &[BigInt], f: &[BigInt]) -> bool {
    let pr: Vec<Rat> = p.iter().map(|c| Rat::from_integer(c.clone())).collect();
    let fr: Vec<Rat> = f.iter().map(|c| Rat::from_integer(c.clone())).collect();
    poly::rem(&pr, &fr).is_empty()
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut out = Vec::new();
    if n.is_zero() {
        return out;
    }
    let mut d = BigInt::one();
    while &d * &d <= *n {
        if n.is_multiple_of(&d) {
            out.push(d.clone());
            let q = n / &d;
            if q != d {
                out.push(q);
            }
        }
        d += 1;
    }
    out
}

/// Controlled-precision real value: true value lies in `value ± error_bound`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Approx {
    pub value: f64,
    pub error_bound: f64,
}

impl Approx {
    pub fn exact(value: f64) -> Self {
        Approx {
            value,
            error_bound: 0.0,
        }
    }

    pub fn from_interval(lo: &Rat, hi: &Rat) -> Self {
        let mid = (lo + hi) / Rat::from_integer(BigInt::from(2));
        let value = rat_to_f64(&mid);
        let half = rat_to_f64(&((hi - lo) / Rat::from_integer(BigInt::from(2))));
        // Slack for the rational-to-double conversion itself.
        let conv = value.abs() * 1e-15 + 1e-300;
        Approx {
            value,
            error_bound: half + conv,
        }
    }
}

impl fmt::Display for Approx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.12} ± {:.3e}", self.value, self.error_bound)
    }
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fall back through a scaled conversion for extreme magnitudes.
        let n = r.numer().to_f64().unwrap_or(f64::MAX);
        let d = r.denom().to_f64().unwrap_or(f64::MAX);
        n / d
    })
}

/// Element of the field `Q(beta)` in the power basis, canonical degree < m.
#[derive(Clone)]
pub struct FieldElement {
    coords: Vec<Rat>,
    field: Field,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElement{:?}", self.coords)
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.coords == other.coords
    }
}
impl Eq for FieldElement {}

impl std::hash::Hash for FieldElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coords.hash(state);
    }
}

impl FieldElement {
    pub fn from_coords(field: &Field, coords: Vec<Rat>) -> Self {
        assert_eq!(coords.len(), field.degree());
        FieldElement {
            coords,
            field: field.clone(),
        }
    }

    pub fn from_rational(field: &Field, r: Rat) -> Self {
        let mut coords = vec![Rat::zero(); field.degree()];
        coords[0] = r;
        FieldElement {
            coords,
            field: field.clone(),
        }
    }

    pub fn from_integer(field: &Field, n: i64) -> Self {
        Self::from_rational(field, Rat::from_integer(BigInt::from(n)))
    }

    pub fn zero(field: &Field) -> Self {
        Self::from_rational(field, Rat::zero())
    }

    pub fn one(field: &Field) -> Self {
        Self::from_rational(field, Rat::one())
    }

    pub fn coords(&self) -> &[Rat] {
        &self.coords
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.coords.iter().skip(1).all(|c| c.is_zero())
    }

    pub fn as_rational(&self) -> Option<Rat> {
        if self.is_rational() {
            Some(self.coords[0].clone())
        } else {
            None
        }
    }

    fn check_field(&self, other: &Self) -> Result<(), FieldError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_field(other).expect("field mismatch");
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a + b)
            .collect();
        FieldElement {
            coords,
            field: self.field.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_field(other).expect("field mismatch");
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a - b)
            .collect();
        FieldElement {
            coords,
            field: self.field.clone(),
        }
    }

    pub fn neg(&self) -> Self {
        FieldElement {
            coords: self.coords.iter().map(|c| -c).collect(),
            field: self.field.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_field(other).expect("field mismatch");
        let prod = poly::mul(&poly::trim(self.coords.clone()), &poly::trim(other.coords.clone()));
        self.reduce(prod)
    }

    pub fn mul_rat(&self, s: &Rat) -> Self {
        FieldElement {
            coords: self.coords.iter().map(|c| c * s).collect(),
            field: self.field.clone(),
        }
    }

    fn reduce(&self, p: Vec<Rat>) -> Self {
        let modulus = self.field.rational_coeffs();
        let r = poly::rem(&p, &modulus);
        let mut coords = r;
        coords.resize(self.field.degree(), Rat::zero());
        FieldElement {
            coords,
            field: self.field.clone(),
        }
    }

    pub fn inverse(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        // Extended Euclid in Q[x]: s*self + t*minpoly = gcd = const.
        let modulus = self.field.rational_coeffs();
        let mut r0 = modulus;
        let mut r1 = poly::trim(self.coords.clone());
        let mut s0: Vec<Rat> = Vec::new();
        let mut s1 = vec![Rat::one()];
        while poly::degree(&r1).map_or(false, |d| d > 0) {
            let (q, r) = poly::divmod(&r0, &r1);
            let s = poly::sub(&s0, &poly::mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        // r1 is a nonzero constant (minpoly irreducible).
        let c = r1
            .first()
            .cloned()
            .ok_or(FieldError::DivisionByZero)?;
        let inv = poly::scale(&s1, &(Rat::one() / c));
        Ok(self.reduce(inv))
    }

    pub fn div(&self, other: &Self) -> Result<Self, FieldError> {
        self.check_field(other)?;
        Ok(self.mul(&other.inverse()?))
    }

    pub fn pow(&self, n: i64) -> Self {
        if n < 0 {
            return self.inverse().expect("inverse of zero").pow(-n);
        }
        let mut acc = Self::one(&self.field);
        let mut base = self.clone();
        let mut k = n as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    /// Exact sign: interval refinement with doubling precision, with the
    /// all-zero coordinate vector deciding exact zero.
    pub fn sign(&self) -> Ordering {
        if self.is_zero() {
            return Ordering::Equal;
        }
        let p = poly::trim(self.coords.clone());
        let mut eps = Rat::new(BigInt::one(), BigInt::from(16));
        loop {
            let (lo, hi) = self.field.refine_root(&eps);
            let (vlo, vhi) = poly::eval_interval(&p, &lo, &hi);
            if vlo.is_positive() {
                return Ordering::Greater;
            }
            if vhi.is_negative() {
                return Ordering::Less;
            }
            if lo == hi {
                // Rational root collapsed; evaluate exactly.
                let v = poly::eval(&p, &lo);
                return if v.is_zero() {
                    Ordering::Equal
                } else if v.is_positive() {
                    Ordering::Greater
                } else {
                    Ordering::Less
                };
            }
            eps = &eps * Rat::new(BigInt::one(), BigInt::from(256));
        }
    }

    pub fn cmp_exact(&self, other: &Self) -> Ordering {
        self.sub(other).sign()
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.sign() == Ordering::Less
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Rational interval of width at most `eps` containing the value.
    pub fn refine_interval(&self, eps: &Rat) -> (Rat, Rat) {
        let p = poly::trim(self.coords.clone());
        if p.is_empty() {
            return (Rat::zero(), Rat::zero());
        }
        if p.len() == 1 {
            return (p[0].clone(), p[0].clone());
        }
        let mut root_eps = eps.clone();
        loop {
            let (lo, hi) = self.field.refine_root(&root_eps);
            let (vlo, vhi) = poly::eval_interval(&p, &lo, &hi);
            if &(&vhi - &vlo) <= eps {
                return (vlo, vhi);
            }
            root_eps = &root_eps * Rat::new(BigInt::one(), BigInt::from(16));
        }
    }

    /// Controlled-precision evaluation; `error_bound <= eps`.
    pub fn refine(&self, eps: f64) -> Approx {
        assert!(eps > 0.0);
        let eps_rat = Rat::from_f64(eps / 2.0).unwrap_or_else(|| Rat::new(BigInt::one(), BigInt::from(u64::MAX)));
        let (lo, hi) = self.refine_interval(&eps_rat);
        Approx::from_interval(&lo, &hi)
    }

    pub fn to_f64(&self) -> f64 {
        self.refine(1e-14).value
    }

    /// Largest integer `n` with `n <= x`.
    pub fn floor_int(&self) -> BigInt {
        if let Some(r) = self.as_rational() {
            return r.floor().to_integer();
        }
        let eps = Rat::new(BigInt::one(), BigInt::from(4));
        let (lo, hi) = self.refine_interval(&eps);
        let flo = lo.floor().to_integer();
        let fhi = hi.floor().to_integer();
        if flo == fhi {
            return flo;
        }
        // The interval straddles the integer fhi; decide exactly whether
        // x >= fhi. Irrational values never equal an integer, but the
        // comparison handles the rational-coordinate case too.
        let cand = Self::from_rational(&self.field, Rat::from_integer(fhi.clone()));
        match self.cmp_exact(&cand) {
            Ordering::Less => flo,
            _ => fhi,
        }
    }

    /// Matrix of multiplication by `self` in the power basis.
    fn mul_matrix(&self) -> Vec<Vec<Rat>> {
        let m = self.field.degree();
        let mut cols = Vec::with_capacity(m);
        let mut acc = self.clone();
        cols.push(acc.coords.clone());
        for _ in 1..m {
            acc = acc.mul(&self.field.gen_element());
            cols.push(acc.coords.clone());
        }
        // cols[j] = coords of self * beta^j; matrix rows indexed by basis.
        (0..m)
            .map(|i| (0..m).map(|j| cols[j][i].clone()).collect())
            .collect()
    }

    /// Sum of all conjugates (trace of the multiplication matrix).
    pub fn trace(&self) -> Rat {
        let m = self.mul_matrix();
        let mut t = Rat::zero();
        for (i, row) in m.iter().enumerate() {
            t += row[i].clone();
        }
        t
    }

    /// Product of all conjugates (determinant of the multiplication matrix).
    pub fn norm(&self) -> Rat {
        det_rat(self.mul_matrix())
    }
}

fn det_rat(mut m: Vec<Vec<Rat>>) -> Rat {
    let n = m.len();
    let mut det = Rat::one();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero());
        let pivot = match pivot {
            Some(p) => p,
            None => return Rat::zero(),
        };
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let pval = m[col][col].clone();
        det *= pval.clone();
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &pval;
            for c in col..n {
                let t = &m[col][c] * &factor;
                m[r][c] -= t;
            }
        }
    }
    det
}

/// Well-known fields that keep coming up in practice.
pub mod fields {
    use super::*;

    /// `x^2 - x - 1`, golden ratio.
    pub fn golden() -> Field {
        MinimalPolynomial::new(
            vec![BigInt::from(-1), BigInt::from(-1), BigInt::from(1)],
            Rat::from_integer(BigInt::from(1)),
            Rat::from_integer(BigInt::from(2)),
        )
        .unwrap()
    }

    /// `x^3 - x^2 - x - 1`, tribonacci.
    pub fn tribonacci() -> Field {
        MinimalPolynomial::new(
            vec![
                BigInt::from(-1),
                BigInt::from(-1),
                BigInt::from(-1),
                BigInt::from(1),
            ],
            Rat::from_integer(BigInt::from(1)),
            Rat::from_integer(BigInt::from(2)),
        )
        .unwrap()
    }

    /// `x^3 - x - 1`, plastic number.
    pub fn plastic() -> Field {
        MinimalPolynomial::new(
            vec![
                BigInt::from(-1),
                BigInt::from(-1),
                BigInt::from(0),
                BigInt::from(1),
            ],
            Rat::from_integer(BigInt::from(1)),
            Rat::from_integer(BigInt::from(2)),
        )
        .unwrap()
    }

    /// `x^2 - d` for squarefree d >= 2.
    pub fn sqrt(d: u64) -> Field {
        let mut hi = 1u64;
        while hi * hi < d {
            hi += 1;
        }
        MinimalPolynomial::new(
            vec![BigInt::from(-(d as i64)), BigInt::from(0), BigInt::from(1)],
            Rat::from_integer(BigInt::from(1)),
            Rat::from_integer(BigInt::from(hi.max(2))),
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn golden_defining_relation() {
        let f = fields::golden();
        let beta = f.gen_element();
        let sq = beta.mul(&beta);
        // beta^2 = beta + 1
        assert_eq!(sq.coords(), &[rat(1, 1), rat(1, 1)]);
    }

    #[test]
    fn golden_inverse() {
        let f = fields::golden();
        let beta = f.gen_element();
        let inv = FieldElement::one(&f).div(&beta).unwrap();
        // 1/beta = beta - 1
        assert_eq!(inv.coords(), &[rat(-1, 1), rat(1, 1)]);
    }

    #[test]
    fn tribonacci_sub() {
        let f = fields::tribonacci();
        let beta = f.gen_element();
        let d = beta.mul(&beta).sub(&beta);
        assert_eq!(d.coords(), &[rat(0, 1), rat(-1, 1), rat(1, 1)]);
    }

    #[test]
    fn discriminants() {
        assert_eq!(fields::golden().discriminant(), BigInt::from(5));
        assert_eq!(fields::sqrt(2).discriminant(), BigInt::from(8));
        assert_eq!(fields::tribonacci().discriminant(), BigInt::from(-44));
        assert_eq!(fields::plastic().discriminant(), BigInt::from(-23));
    }

    #[test]
    fn norm_and_trace() {
        let f = fields::golden();
        let one = FieldElement::one(&f);
        assert_eq!(one.norm(), rat(1, 1));
        assert_eq!(one.trace(), rat(2, 1));
        // sqrt5 = 2*beta - 1, N(sqrt5) = -5, so N(1/sqrt5) = -1/5.
        let sqrt5 = f.gen_element().mul_rat(&rat(2, 1)).sub(&one);
        assert_eq!(sqrt5.norm(), rat(-5, 1));
        let inv = sqrt5.inverse().unwrap();
        assert_eq!(inv.norm(), rat(-1, 5));
    }

    #[test]
    fn refine_golden() {
        let f = fields::golden();
        let a = f.gen_element().refine(1e-12);
        assert!((a.value - 1.618033988749895).abs() < 1e-11);
        assert!(a.error_bound <= 1e-11);
    }

    #[test]
    fn refine_tribonacci() {
        let f = fields::tribonacci();
        let a = f.gen_element().refine(1e-12);
        assert!((a.value - 1.839286755214161).abs() < 1e-10);
    }

    #[test]
    fn refine_rational_is_exact() {
        let f = fields::golden();
        let half = FieldElement::from_rational(&f, rat(1, 2));
        let a = half.refine(1e-12);
        assert_eq!(a.value, 0.5);
    }

    #[test]
    fn floor_of_beta() {
        let f = fields::golden();
        assert_eq!(f.gen_element().floor_int(), BigInt::from(1));
        let b2 = f.gen_element().pow(2);
        assert_eq!(b2.floor_int(), BigInt::from(2));
        let neg = f.gen_element().neg();
        assert_eq!(neg.floor_int(), BigInt::from(-2));
    }

    #[test]
    fn reducibility_detected() {
        // x^2 - 1 = (x-1)(x+1)
        let r = MinimalPolynomial::new(
            vec![BigInt::from(-1), BigInt::from(0), BigInt::from(1)],
            rat(1, 2),
            rat(3, 2),
        );
        assert!(matches!(r, Err(FieldError::Reducible(_))));
        // x^4 - x^2 - 2 = (x^2+1)(x^2-2)
        let r = MinimalPolynomial::new(
            vec![
                BigInt::from(-2),
                BigInt::from(0),
                BigInt::from(-1),
                BigInt::from(0),
                BigInt::from(1),
            ],
            rat(1, 1),
            rat(2, 1),
        );
        assert!(matches!(r, Err(FieldError::Reducible(_))));
    }

    #[test]
    fn descriptor_roundtrip() {
        let f = fields::golden();
        let json = serde_json::to_string(&f.descriptor()).unwrap();
        let d: FieldDescriptor = serde_json::from_str(&json).unwrap();
        let g = d.to_field().unwrap();
        assert_eq!(*f, *g);
    }

    #[test]
    fn sign_never_zero_for_nonzero() {
        let f = fields::golden();
        // beta - 1.618... is tiny but nonzero as coordinates.
        let x = f
            .gen_element()
            .sub(&FieldElement::from_rational(&f, rat(1618033988749, 1000000000000)));
        assert_ne!(x.sign(), Ordering::Equal);
    }
}
