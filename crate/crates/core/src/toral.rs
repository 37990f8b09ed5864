//! Arithmetic coding of hyperbolic toral automorphisms: the two-sided
//! expansion compactum, homoclinic points parameterized by trace-dual field
//! elements, evaluation maps and their shift/addition identities, preimage
//! counts, the semiconjugating matrices B_M(n) with their determinant form,
//! and the exhaustive search for a bijective coding.

use crate::beta_core::{expansion_of_one, is_parry_admissible, Beta};
use crate::digits::DigitSeq;
use crate::exactnum::{Approx, Field, FieldElement, FieldError, MinimalPolynomial};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

type Rat = BigRational;

#[derive(Debug, Error)]
pub enum ToralError {
    #[error("matrix must be square and nonempty")]
    BadShape,
    #[error("matrix determinant is {0}, not +-1")]
    NotUnimodular(BigInt),
    #[error("xi fails the trace-integrality test; it does not parameterize a homoclinic point")]
    NotHomoclinic,
    #[error("preimage count {0} is not an integer")]
    NonIntegralCount(String),
    #[error("semiconjugacy identity B M_beta = M B failed")]
    SemiconjugacyFailed,
    #[error("characteristic polynomial is reducible; companion machinery unavailable")]
    ReduciblePolynomial,
    #[error(transparent)]
    Field(#[from] FieldError),
}

pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn int_matrix(rows: &[&[i64]]) -> IntMatrix {
    rows.iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect()
}

fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    let mut out = vec![vec![BigInt::zero(); m]; n];
    for i in 0..n {
        for j in 0..m {
            for l in 0..k {
                out[i][j] += &a[i][l] * &b[l][j];
            }
        }
    }
    out
}

fn mat_vec(a: &IntMatrix, v: &[BigInt]) -> Vec<BigInt> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(c, x)| c * x).sum())
        .collect()
}

/// Determinant by cofactor expansion; fine for the small m used here.
pub fn det(a: &IntMatrix) -> BigInt {
    let n = a.len();
    if n == 1 {
        return a[0][0].clone();
    }
    let mut total = BigInt::zero();
    for j in 0..n {
        if a[0][j].is_zero() {
            continue;
        }
        let minor: IntMatrix = a[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != j)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let term = &a[0][j] * det(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

fn trace(a: &IntMatrix) -> BigInt {
    (0..a.len()).map(|i| a[i][i].clone()).sum()
}

/// Characteristic polynomial (monic, low-to-high coefficients) by the
/// Faddeev-LeVerrier recurrence; all divisions are exact.
pub fn char_poly(m: &IntMatrix) -> Vec<BigInt> {
    let n = m.len();
    let mut coeffs_high = vec![Rat::one()]; // leading 1
    let mut a = m.clone();
    let mut b_prev = Rat::zero();
    for k in 1..=n {
        if k > 1 {
            // A_k = M (A_{k-1} + b_{k-1} I)
            let mut shifted = a.clone();
            let bint = b_prev.to_integer();
            for (i, row) in shifted.iter_mut().enumerate() {
                row[i] += &bint;
            }
            a = mat_mul(m, &shifted);
        }
        let b = -Rat::new(trace(&a), BigInt::from(k));
        coeffs_high.push(b.clone());
        b_prev = b;
    }
    coeffs_high
        .into_iter()
        .rev()
        .map(|c| {
            debug_assert!(c.is_integer());
            c.to_integer()
        })
        .collect()
}

/// k_1..k_m from beta^m = k_1 beta^{m-1} + ... + k_m.
fn recurrence_coeffs(char_low_to_high: &[BigInt]) -> Vec<BigInt> {
    let m = char_low_to_high.len() - 1;
    (0..m)
        .map(|i| -char_low_to_high[m - 1 - i].clone())
        .collect()
}

/// Companion matrix of beta (k_1..k_m across the top row).
pub fn companion_matrix(ks: &[BigInt]) -> IntMatrix {
    let m = ks.len();
    let mut out = vec![vec![BigInt::zero(); m]; m];
    out[0] = ks.to_vec();
    for i in 1..m {
        out[i][i - 1] = BigInt::one();
    }
    out
}

mod cx {
    // minimal complex arithmetic for the root-modulus check
    pub type C = (f64, f64);
    pub fn add(a: C, b: C) -> C {
        (a.0 + b.0, a.1 + b.1)
    }
    pub fn sub(a: C, b: C) -> C {
        (a.0 - b.0, a.1 - b.1)
    }
    pub fn mul(a: C, b: C) -> C {
        (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
    }
    pub fn div(a: C, b: C) -> C {
        let d = b.0 * b.0 + b.1 * b.1;
        ((a.0 * b.0 + a.1 * b.1) / d, (a.1 * b.0 - a.0 * b.1) / d)
    }
    pub fn abs(a: C) -> f64 {
        a.0.hypot(a.1)
    }
}

/// All complex roots of a monic polynomial (low-to-high integer coefficients)
/// by Durand-Kerner iteration.
pub fn numeric_roots(coeffs: &[BigInt]) -> Vec<(f64, f64)> {
    use cx::*;
    let c: Vec<f64> = coeffs.iter().map(|v| v.to_f64().unwrap()).collect();
    let n = c.len() - 1;
    let eval = |z: C| -> C {
        let mut acc = (0.0, 0.0);
        for k in (0..=n).rev() {
            acc = add(mul(acc, z), (c[k], 0.0));
        }
        acc
    };
    let mut roots: Vec<C> = (0..n)
        .map(|k| {
            let theta = 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            (1.3 * theta.cos(), 1.3 * theta.sin())
        })
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let mut denom = (1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom = mul(denom, sub(roots[i], roots[j]));
                }
            }
            let delta = div(eval(roots[i]), denom);
            roots[i] = sub(roots[i], delta);
            moved = moved.max(abs(delta));
        }
        if moved < 1e-14 {
            break;
        }
    }
    roots
}

#[derive(Debug, Clone)]
pub struct ToralAutomorphism {
    pub matrix: IntMatrix,
    pub char_poly: Vec<BigInt>,
    pub det: BigInt,
    /// Some(true/false) when the numeric spectrum clears the margin; None
    /// flags an unverified borderline spectrum.
    pub hyperbolic: Option<bool>,
    pub pisot: bool,
    /// The field of the dominant root when the Pisot condition holds and
    /// the characteristic polynomial is irreducible.
    pub field: Option<Field>,
}

const SPECTRUM_MARGIN: f64 = 1e-6;

impl ToralAutomorphism {
    pub fn new(matrix: IntMatrix) -> Result<ToralAutomorphism, ToralError> {
        let m = matrix.len();
        if m == 0 || matrix.iter().any(|r| r.len() != m) {
            return Err(ToralError::BadShape);
        }
        let d = det(&matrix);
        if d.abs() != BigInt::one() {
            return Err(ToralError::NotUnimodular(d));
        }
        let cp = char_poly(&matrix);
        let roots = numeric_roots(&cp);
        let on_circle = roots
            .iter()
            .any(|&r| (cx::abs(r) - 1.0).abs() < SPECTRUM_MARGIN);
        let hyperbolic = if on_circle {
            None
        } else {
            Some(roots.iter().all(|&r| (cx::abs(r) - 1.0).abs() > SPECTRUM_MARGIN))
        };
        let dominant: Vec<&(f64, f64)> = roots.iter().filter(|&&r| cx::abs(r) > 1.0).collect();
        let pisot_shape = hyperbolic == Some(true)
            && dominant.len() == 1
            && dominant[0].1.abs() < SPECTRUM_MARGIN
            && dominant[0].0 > 1.0;
        let field = if pisot_shape {
            let b = dominant[0].0;
            let lo = Rat::from_float(b - 0.5).unwrap();
            let hi = Rat::from_float(b + 0.5).unwrap();
            MinimalPolynomial::new(cp.clone(), lo, hi).ok()
        } else {
            None
        };
        Ok(ToralAutomorphism {
            matrix,
            char_poly: cp,
            det: d,
            hyperbolic,
            pisot: field.is_some(),
            field,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn recurrence(&self) -> Vec<BigInt> {
        recurrence_coeffs(&self.char_poly)
    }
}

/// Homoclinic points of the companion automorphism correspond to xi with
/// Tr(beta^i xi) integral for the whole power basis.
#[derive(Debug, Clone)]
pub struct HomoclinicPoint {
    pub xi: FieldElement,
}

impl HomoclinicPoint {
    pub fn new(xi: FieldElement) -> Result<HomoclinicPoint, ToralError> {
        let field = xi.field().clone();
        let mut pow = FieldElement::one(&field);
        let beta = field.gen_element();
        for _ in 0..field.degree() {
            if !pow.mul(&xi).trace().is_integer() {
                return Err(ToralError::NotHomoclinic);
            }
            pow = pow.mul(&beta);
        }
        Ok(HomoclinicPoint { xi })
    }
}

/// Two-sided digit window: digit at position `offset + i` is `digits[i]`,
/// zero elsewhere. Position n carries weight beta^{-n}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoSidedSeq {
    pub offset: i64,
    pub digits: Vec<u32>,
}

impl TwoSidedSeq {
    pub fn new(offset: i64, digits: Vec<u32>) -> TwoSidedSeq {
        TwoSidedSeq { offset, digits }
    }

    /// Left shift: (sigma s)_n = s_{n+1}.
    pub fn shift(&self) -> TwoSidedSeq {
        TwoSidedSeq {
            offset: self.offset - 1,
            digits: self.digits.clone(),
        }
    }

    /// Digitwise sum on the common support (alphabet may overflow; the
    /// evaluation map is still additive on such strings).
    pub fn add(&self, other: &TwoSidedSeq) -> TwoSidedSeq {
        let lo = self.offset.min(other.offset);
        let hi = (self.offset + self.digits.len() as i64)
            .max(other.offset + other.digits.len() as i64);
        let mut digits = vec![0u32; (hi - lo) as usize];
        for (i, &d) in self.digits.iter().enumerate() {
            digits[(self.offset - lo) as usize + i] += d;
        }
        for (i, &d) in other.digits.iter().enumerate() {
            digits[(other.offset - lo) as usize + i] += d;
        }
        TwoSidedSeq { offset: lo, digits }
    }
}

/// Every suffix of the window (zeros beyond) must stay strictly below the
/// expansion of one; prepended zeros never hurt, so one admissibility check
/// of the window as a one-sided sequence covers all suffixes.
pub fn two_sided_admissible(s: &TwoSidedSeq, beta: &Beta) -> Result<bool, crate::beta_core::BetaError> {
    let max = beta.greedy_alphabet_max().max(1);
    if s.digits.iter().any(|&d| d > max) {
        return Ok(false);
    }
    let eps = DigitSeq::finite(max, s.digits.clone());
    let parry = expansion_of_one(beta)?;
    Ok(is_parry_admissible(&eps, &parry))
}

/// Exact value sum_n eps_n beta^{-n} over the window.
fn window_value(field: &Field, s: &TwoSidedSeq) -> FieldElement {
    // Horner left to right leaves digit i with weight beta^{len-1-i};
    // one final scaling shifts that to the target beta^{-(offset+i)}.
    let b = field.gen_element();
    let mut acc = FieldElement::zero(field);
    for &d in &s.digits {
        acc = acc.mul(&b).add(&FieldElement::from_integer(field, d as i64));
    }
    if s.digits.is_empty() {
        return acc;
    }
    acc.mul(&b.pow(-(s.offset + s.digits.len() as i64 - 1)))
}

fn fractional(x: &FieldElement) -> FieldElement {
    let f = x.floor_int();
    x.sub(&FieldElement::from_rational(
        x.field(),
        Rat::from_integer(f),
    ))
}

/// Truncation sensitivity of the window evaluation: what admissible digits
/// outside [offset, offset+len) could still contribute, bounded through the
/// contraction rates on both foliations with a safety factor 2.
pub fn truncation_bound(field: &Field, xi: &FieldElement, s: &TwoSidedSeq) -> f64 {
    let roots = numeric_roots(field.coefficients());
    let beta = roots
        .iter()
        .map(|&r| cx::abs(r))
        .fold(0.0f64, f64::max);
    let gamma = roots
        .iter()
        .map(|&r| cx::abs(r))
        .filter(|&m| m < 1.0)
        .fold(0.0f64, f64::max)
        .max(1e-9);
    let dmax = beta.ceil();
    // conjugate magnitudes of xi at the contracting roots
    let xi_conj_max = roots
        .iter()
        .filter(|&&r| cx::abs(r) < 1.0)
        .map(|&r| {
            let mut acc = (0.0, 0.0);
            for c in xi.coords().iter().rev() {
                let cf = c.to_f64().unwrap_or(0.0);
                acc = cx::add(cx::mul(acc, r), (cf, 0.0));
            }
            cx::abs(acc)
        })
        .fold(0.0f64, f64::max)
        .max(1e-300);
    let xi_abs = xi.to_f64().abs().max(1e-300);
    let len = s.digits.len() as i64;
    // right tail: digits at n >= offset+len contribute |xi| beta^{-n}
    let right = dmax * xi_abs * beta.powi(-((s.offset + len) as i32)) / (1.0 - 1.0 / beta);
    // left tail: digits at n < offset contribute ||xi beta^{-n}|| which
    // contracts like gamma^{|n|} in the conjugates
    let left = dmax * xi_conj_max * gamma.powi((1 - s.offset).max(1) as i32) / (1.0 - gamma);
    2.0 * (right + left)
}

/// Exact toral coordinates of the window evaluation (before reduction).
pub fn homoclinic_eval_exact(
    t: &HomoclinicPoint,
    s: &TwoSidedSeq,
    dim: usize,
) -> Vec<FieldElement> {
    let field = t.xi.field();
    let v = window_value(field, s).mul(&t.xi);
    let beta_inv = field.gen_element().inverse().expect("beta nonzero");
    let mut out = Vec::with_capacity(dim);
    let mut cur = v;
    for _ in 0..dim {
        out.push(cur.clone());
        cur = cur.mul(&beta_inv);
    }
    out
}

/// sum_n eps_n T^{-n} t reduced mod Z^m, with the window truncation bound.
pub fn homoclinic_eval(t: &HomoclinicPoint, s: &TwoSidedSeq, dim: usize) -> Vec<Approx> {
    let bound = truncation_bound(t.xi.field(), &t.xi, s);
    homoclinic_eval_exact(t, s, dim)
        .iter()
        .map(|c| Approx {
            value: fractional(c).to_f64(),
            error_bound: bound,
        })
        .collect()
}

/// Exact check that evaluation intertwines the shift with the matrix action:
/// h(sigma s) = M h(s) mod Z^m.
pub fn shift_commutation_check(
    t: &HomoclinicPoint,
    s: &TwoSidedSeq,
    m: &IntMatrix,
) -> Result<bool, ToralError> {
    let dim = m.len();
    let lhs = homoclinic_eval_exact(t, &s.shift(), dim);
    let rhs_raw = homoclinic_eval_exact(t, s, dim);
    for i in 0..dim {
        let mut acc = FieldElement::zero(t.xi.field());
        for (j, item) in rhs_raw.iter().enumerate() {
            acc = acc.add(&item.mul_rat(&Rat::from_integer(m[i][j].clone())));
        }
        let diff = fractional(&lhs[i].sub(&acc));
        if !diff.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exact additivity of the evaluation on finite windows.
pub fn additivity_check(
    t: &HomoclinicPoint,
    s1: &TwoSidedSeq,
    s2: &TwoSidedSeq,
    dim: usize,
) -> bool {
    let sum = homoclinic_eval_exact(t, &s1.add(s2), dim);
    let a = homoclinic_eval_exact(t, s1, dim);
    let b = homoclinic_eval_exact(t, s2, dim);
    (0..dim).all(|i| fractional(&sum[i].sub(&a[i].add(&b[i]))).is_zero())
}

/// K = |D(beta) N(xi)|: the number of preimages of the coding h_xi almost
/// everywhere (companion form).
pub fn preimage_count(t: &HomoclinicPoint) -> Result<BigInt, ToralError> {
    let d = t.xi.field().discriminant();
    let k = Rat::from_integer(d) * t.xi.norm();
    if !k.is_integer() {
        return Err(ToralError::NonIntegralCount(k.to_string()));
    }
    Ok(k.to_integer().abs())
}

/// The semiconjugating matrix B_M(n), written column-wise:
/// (Mn, (M^2-k_1 M)n, ..., k_m n). Postcondition B M_beta = M B is checked.
pub fn b_matrix(m: &IntMatrix, n: &[BigInt]) -> Result<IntMatrix, ToralError> {
    let dim = m.len();
    if n.len() != dim {
        return Err(ToralError::BadShape);
    }
    let ks = recurrence_coeffs(&char_poly(m));
    let mut cols: Vec<Vec<BigInt>> = Vec::with_capacity(dim);
    // A_1 = M, A_j = (A_{j-1} - k_{j-1} I) M
    let mut a = m.clone();
    for j in 1..dim {
        cols.push(mat_vec(&a, n));
        if j < dim - 1 {
            let mut shifted = a.clone();
            for (i, row) in shifted.iter_mut().enumerate() {
                row[i] -= &ks[j - 1];
            }
            a = mat_mul(&shifted, m);
        }
    }
    cols.push(n.iter().map(|x| &ks[dim - 1] * x).collect());
    let b: IntMatrix = (0..dim)
        .map(|i| (0..dim).map(|j| cols[j][i].clone()).collect())
        .collect();
    let companion = companion_matrix(&ks);
    if mat_mul(&b, &companion) != mat_mul(m, &b) {
        return Err(ToralError::SemiconjugacyFailed);
    }
    Ok(b)
}

/// f_M(n) = det B_M(n).
pub fn f_form(m: &IntMatrix, n: &[BigInt]) -> Result<BigInt, ToralError> {
    Ok(det(&b_matrix(m, n)?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum BacResult {
    /// |f_M(n)| = 1: a bijective arithmetic coding exists.
    Found { n: Vec<i64> },
    /// No solution in the box; the minimal nonzero |f| is only a candidate
    /// for the arithmetic minimum, not a proven bound.
    NotFoundWithinBound { min_abs_f: BigInt, at: Vec<i64> },
}

/// Exhaustive scan of ||n||_inf <= bound for f_M(n) = +-1.
pub fn bac_search(m: &IntMatrix, bound: i64) -> Result<BacResult, ToralError> {
    let dim = m.len();
    let mut best: Option<(BigInt, Vec<i64>)> = None;
    let mut n = vec![-bound; dim];
    loop {
        // skip 0 and dedupe +-n by requiring first nonzero coordinate > 0
        if let Some(first) = n.iter().find(|&&v| v != 0) {
            if *first > 0 {
                let nv: Vec<BigInt> = n.iter().map(|&v| BigInt::from(v)).collect();
                let f = f_form(m, &nv)?.abs();
                if f.is_one() {
                    return Ok(BacResult::Found { n: n.clone() });
                }
                if !f.is_zero() && best.as_ref().map_or(true, |(b, _)| f < *b) {
                    best = Some((f, n.clone()));
                }
            }
        }
        let mut i = 0;
        loop {
            if i == dim {
                let (min_abs_f, at) = best.ok_or(ToralError::BadShape)?;
                return Ok(BacResult::NotFoundWithinBound { min_abs_f, at });
            }
            n[i] += 1;
            if n[i] <= bound {
                break;
            }
            n[i] = -bound;
            i += 1;
        }
    }
}

/// Whether x >= 0 has a finite greedy expansion, decided within `depth`
/// orbit steps; None when undecided.
pub fn has_finite_expansion(x: &FieldElement, depth: usize) -> Option<bool> {
    if x.is_negative() {
        return Some(false);
    }
    if x.is_zero() {
        return Some(true);
    }
    let field = x.field().clone();
    let beta = field.gen_element();
    let beta_inv = beta.inverse().ok()?;
    // scale into [0,1)
    let mut y = x.clone();
    let one = FieldElement::one(&field);
    let mut guard = 0;
    while y.cmp_exact(&one) != std::cmp::Ordering::Less {
        y = y.mul(&beta_inv);
        guard += 1;
        if guard > 10_000 {
            return None;
        }
    }
    for _ in 0..depth {
        if y.is_zero() {
            return Some(true);
        }
        let t = y.mul(&beta);
        let d = t.floor_int();
        y = t.sub(&FieldElement::from_rational(&field, Rat::from_integer(d)));
    }
    if y.is_zero() {
        Some(true)
    } else {
        None
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FinitaryReport {
    pub samples: usize,
    pub successes: usize,
    pub unknown: usize,
    pub delta: f64,
    pub search_depth: usize,
}

/// Probes the weak-finitary property: for random x in Z[beta] cap R_+, look
/// for a small finite-expansion f in (0, delta) with x + f finite. Failures
/// at depth are reported Unknown, never as counterexamples.
pub fn finitary_probe(
    field: &Field,
    samples: usize,
    delta: f64,
    search_depth: usize,
    seed: u64,
) -> FinitaryReport {
    let beta = field.gen_element();
    let beta_f = beta.to_f64();
    let m = field.degree();
    let mut state = seed | 1;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    // candidate perturbations: single powers and gapped pairs below delta
    let j0 = (-(delta.ln()) / beta_f.ln()).ceil() as i64 + 1;
    let mut candidates = Vec::new();
    for j in j0..j0 + 4 {
        candidates.push(beta.pow(-j));
        candidates.push(beta.pow(-j).add(&beta.pow(-j - 2)));
    }
    let mut successes = 0;
    let mut unknown = 0;
    for _ in 0..samples {
        let mut x = FieldElement::zero(field);
        loop {
            for i in 0..m {
                let c = (next() % 7) as i64 - 3;
                x = x.add(
                    &beta
                        .pow(i as i64)
                        .mul_rat(&Rat::from_integer(BigInt::from(c))),
                );
            }
            if x.is_positive() {
                break;
            }
            x = FieldElement::zero(field);
        }
        let mut ok = false;
        let mut undecided = false;
        for f in &candidates {
            match has_finite_expansion(&x.add(f), search_depth) {
                Some(true) => {
                    ok = true;
                    break;
                }
                Some(false) => {}
                None => undecided = true,
            }
        }
        if ok {
            successes += 1;
        } else if undecided {
            unknown += 1;
        }
    }
    FinitaryReport {
        samples,
        successes,
        unknown,
        delta,
        search_depth,
    }
}

pub fn expansion_of_one_for(beta: &Beta) -> Result<DigitSeq, crate::beta_core::BetaError> {
    Ok(expansion_of_one(beta)?.a)
}
