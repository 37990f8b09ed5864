//! Dense polynomial helpers over the rationals, used by the number-field
//! layer for reduction, Sturm sequences and resultants.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

/// Coefficients low-to-high with no trailing zeros.
pub fn trim(mut p: Vec<Rat>) -> Vec<Rat> {
    while p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
    p
}

pub fn degree(p: &[Rat]) -> Option<usize> {
    if p.is_empty() {
        None
    } else {
        Some(p.len() - 1)
    }
}

pub fn add(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let n = a.len().max(b.len());
    let mut out = vec![Rat::zero(); n];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] += c;
    }
    trim(out)
}

pub fn neg(a: &[Rat]) -> Vec<Rat> {
    a.iter().map(|c| -c).collect()
}

pub fn sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    add(a, &neg(b))
}

pub fn mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, ca) in a.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        for (j, cb) in b.iter().enumerate() {
            out[i + j] += ca * cb;
        }
    }
    trim(out)
}

pub fn scale(a: &[Rat], s: &Rat) -> Vec<Rat> {
    trim(a.iter().map(|c| c * s).collect())
}

/// Euclidean division; panics if `b` is zero.
pub fn divmod(a: &[Rat], b: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let db = degree(b).expect("division by zero polynomial");
    let lead = b[db].clone();
    let mut rem: Vec<Rat> = a.to_vec();
    let mut quot = vec![Rat::zero(); a.len().saturating_sub(db)];
    while let Some(dr) = degree(&rem) {
        if dr < db {
            break;
        }
        let factor = &rem[dr] / &lead;
        quot[dr - db] = factor.clone();
        for i in 0..=db {
            let t = &b[i] * &factor;
            rem[dr - db + i] -= t;
        }
        rem = trim(rem);
    }
    (trim(quot), rem)
}

pub fn rem(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    divmod(a, b).1
}

pub fn derivative(p: &[Rat]) -> Vec<Rat> {
    if p.len() <= 1 {
        return Vec::new();
    }
    trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * Rat::from_integer(BigInt::from(i)))
            .collect(),
    )
}

pub fn eval(p: &[Rat], x: &Rat) -> Rat {
    let mut acc = Rat::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Horner evaluation over a rational interval [lo, hi].
pub fn eval_interval(p: &[Rat], lo: &Rat, hi: &Rat) -> (Rat, Rat) {
    let mut alo = Rat::zero();
    let mut ahi = Rat::zero();
    for c in p.iter().rev() {
        // [alo, ahi] * [lo, hi]
        let candidates = [&alo * lo, &alo * hi, &ahi * lo, &ahi * hi];
        let mut nlo = candidates[0].clone();
        let mut nhi = candidates[0].clone();
        for c in &candidates[1..] {
            if *c < nlo {
                nlo = c.clone();
            }
            if *c > nhi {
                nhi = c.clone();
            }
        }
        alo = nlo + c;
        ahi = nhi + c;
    }
    (alo, ahi)
}

/// Signed Sturm chain of `p`.
fn sturm_chain(p: &[Rat]) -> Vec<Vec<Rat>> {
    let mut chain = vec![trim(p.to_vec()), derivative(p)];
    loop {
        let n = chain.len();
        if chain[n - 1].is_empty() {
            chain.pop();
            break;
        }
        let r = neg(&rem(&chain[n - 2], &chain[n - 1]));
        let r = trim(r);
        if r.is_empty() {
            break;
        }
        chain.push(r);
    }
    chain
}

fn sign_changes(chain: &[Vec<Rat>], x: &Rat) -> usize {
    let mut changes = 0;
    let mut last: Option<bool> = None;
    for p in chain {
        let v = eval(p, x);
        if v.is_zero() {
            continue;
        }
        let s = v.is_positive();
        if let Some(prev) = last {
            if prev != s {
                changes += 1;
            }
        }
        last = Some(s);
    }
    changes
}

/// Number of distinct real roots of `p` in the half-open interval (lo, hi].
pub fn count_roots(p: &[Rat], lo: &Rat, hi: &Rat) -> usize {
    let chain = sturm_chain(p);
    sign_changes(&chain, lo) - sign_changes(&chain, hi)
}

/// Resultant of two rational polynomials via the Euclidean algorithm.
pub fn resultant(a: &[Rat], b: &[Rat]) -> Rat {
    let da = match degree(a) {
        Some(d) => d,
        None => return Rat::zero(),
    };
    let db = match degree(b) {
        Some(d) => d,
        None => return Rat::zero(),
    };
    if db == 0 {
        return pow_rat(&b[0], da);
    }
    let r = rem(a, b);
    match degree(&r) {
        None => Rat::zero(),
        Some(dr) => {
            let sign = if (da * db) % 2 == 1 {
                -Rat::one()
            } else {
                Rat::one()
            };
            let lead = pow_rat(&b[db], da - dr);
            sign * lead * resultant(b, &r)
        }
    }
}

fn pow_rat(x: &Rat, n: usize) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..n {
        acc *= x;
    }
    acc
}
