//! Truncated q-series with big-integer coefficients and the coefficients
//! `c(n)` of `J(q) = E4(q)^3 / Delta(q) - 744`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// A Laurent series `sum_{n >= lowest} a_n q^n` known for exponents
/// `< truncation_order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSeries {
    lowest_exponent: i64,
    coefficients: Vec<BigInt>,
    truncation_order: i64,
}

impl QSeries {
    /// Builds a series from coefficients starting at `lowest_exponent`.
    /// Entries at or beyond `truncation_order` are discarded.
    pub fn new(lowest_exponent: i64, mut coefficients: Vec<BigInt>, truncation_order: i64) -> Self {
        let keep = (truncation_order - lowest_exponent).max(0) as usize;
        coefficients.truncate(keep);
        coefficients.resize(keep, BigInt::zero());
        QSeries { lowest_exponent, coefficients, truncation_order }
    }

    pub fn from_ints(lowest_exponent: i64, coefficients: &[i64], truncation_order: i64) -> Self {
        Self::new(lowest_exponent, coefficients.iter().map(|&c| BigInt::from(c)).collect(), truncation_order)
    }

    pub fn one(truncation_order: i64) -> Self {
        Self::from_ints(0, &[1], truncation_order)
    }

    pub fn lowest_exponent(&self) -> i64 {
        self.lowest_exponent
    }

    pub fn truncation_order(&self) -> i64 {
        self.truncation_order
    }

    /// Coefficient of `q^n`; `None` when `n` is at or beyond the truncation order.
    pub fn coeff(&self, n: i64) -> Option<BigInt> {
        if n >= self.truncation_order {
            return None;
        }
        if n < self.lowest_exponent {
            return Some(BigInt::zero());
        }
        Some(self.coefficients[(n - self.lowest_exponent) as usize].clone())
    }

    fn at(&self, n: i64) -> &BigInt {
        &self.coefficients[(n - self.lowest_exponent) as usize]
    }

    pub fn add(&self, other: &QSeries) -> QSeries {
        let lo = self.lowest_exponent.min(other.lowest_exponent);
        let order = self.truncation_order.min(other.truncation_order);
        let coeffs = (lo..order)
            .map(|n| self.coeff(n).unwrap() + other.coeff(n).unwrap())
            .collect();
        QSeries::new(lo, coeffs, order)
    }

    pub fn scale(&self, c: &BigInt) -> QSeries {
        QSeries {
            lowest_exponent: self.lowest_exponent,
            coefficients: self.coefficients.iter().map(|a| a * c).collect(),
            truncation_order: self.truncation_order,
        }
    }

    /// Multiplication by `q^k`.
    pub fn shift(&self, k: i64) -> QSeries {
        QSeries {
            lowest_exponent: self.lowest_exponent + k,
            coefficients: self.coefficients.clone(),
            truncation_order: self.truncation_order + k,
        }
    }

    /// Lowest exponent carrying a nonzero coefficient.
    pub fn valuation(&self) -> Option<i64> {
        self.coefficients
            .iter()
            .position(|c| !c.is_zero())
            .map(|i| self.lowest_exponent + i as i64)
    }
}

/// Exact product; the result is valid up to the smaller of the two
/// relative precisions.
pub fn series_mul(a: &QSeries, b: &QSeries) -> QSeries {
    let lo = a.lowest_exponent + b.lowest_exponent;
    let order = (a.lowest_exponent + b.truncation_order).min(b.lowest_exponent + a.truncation_order);
    let len = (order - lo).max(0) as usize;
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in a.coefficients.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (k, y) in b.coefficients.iter().enumerate() {
            if i + k >= len {
                break;
            }
            out[i + k] += x * y;
        }
    }
    QSeries::new(lo, out, order)
}

pub fn series_pow(a: &QSeries, k: u32) -> QSeries {
    if k == 0 {
        return QSeries::one(a.truncation_order - a.lowest_exponent);
    }
    let mut acc: Option<QSeries> = None;
    let mut base = a.clone();
    let mut e = k;
    loop {
        if e & 1 == 1 {
            acc = Some(match acc {
                Some(x) => series_mul(&x, &base),
                None => base.clone(),
            });
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        base = series_mul(&base, &base);
    }
    acc.unwrap()
}

/// Multiplicative inverse. The lowest nonzero coefficient must be `+-1`.
pub fn series_recip(a: &QSeries) -> Result<QSeries> {
    let v = a
        .valuation()
        .ok_or_else(|| Error::NotInvertible("0".into()))?;
    let lead = a.at(v).clone();
    if !(lead.is_one() || (-&lead).is_one()) {
        return Err(Error::NotInvertible(lead.to_string()));
    }
    let rel = a.truncation_order - v;
    let n = rel as usize;
    let src: Vec<&BigInt> = (v..a.truncation_order).map(|e| a.at(e)).collect();
    let mut out: Vec<BigInt> = Vec::with_capacity(n);
    for m in 0..n {
        let mut s = if m == 0 { BigInt::one() } else { BigInt::zero() };
        for i in 1..=m {
            s -= src[i] * &out[m - i];
        }
        // divide by the unit leading coefficient
        let (quot, rem) = s.div_rem(&lead);
        debug_assert!(rem.is_zero());
        out.push(quot);
    }
    Ok(QSeries::new(-v, out, -v + rel))
}

/// Sum of cubes of the divisors of `n`.
pub fn sigma3(n: i64) -> Result<BigInt> {
    if n <= 0 {
        return Err(Error::InvalidArgument(format!("sigma3 needs n >= 1, got {n}")));
    }
    let mut total = BigInt::zero();
    let mut d = 1i64;
    while d * d <= n {
        if n % d == 0 {
            total += BigInt::from(d).pow(3);
            let e = n / d;
            if e != d {
                total += BigInt::from(e).pow(3);
            }
        }
        d += 1;
    }
    Ok(total)
}

/// `E4 = 1 + 240 sum sigma3(n) q^n`, known below `order`.
pub fn eisenstein_e4(order: i64) -> QSeries {
    let coeffs = (0..order.max(0))
        .map(|n| if n == 0 { BigInt::one() } else { BigInt::from(240) * sigma3(n).unwrap() })
        .collect();
    QSeries::new(0, coeffs, order)
}

/// `Delta = q prod_{n >= 1} (1 - q^n)^24`, known below `order`.
pub fn discriminant(order: i64) -> QSeries {
    // the product part needs relative precision order - 1
    let rel = (order - 1).max(0);
    let mut prod = QSeries::one(rel);
    for n in 1..rel.max(1) {
        let mut bin = vec![BigInt::zero(); (n + 1) as usize];
        bin[0] = BigInt::one();
        bin[n as usize] = -BigInt::one();
        let factor = QSeries::new(0, bin, rel);
        for _ in 0..24 {
            prod = series_mul(&prod, &factor);
        }
    }
    prod.shift(1)
}

/// `c(n)` for `-1 <= n <= nmax`, from `J = E4^3 / Delta - 744`.
pub fn j_coefficients(nmax: i64) -> Result<BTreeMap<i64, BigInt>> {
    if nmax < -1 {
        return Err(Error::InvalidArgument(format!("nmax must be >= -1, got {nmax}")));
    }
    let order = nmax + 2;
    let e4 = eisenstein_e4(order);
    let e4_cubed = series_pow(&e4, 3);
    let delta = discriminant(order + 1);
    let j = series_mul(&e4_cubed, &series_recip(&delta)?);
    let mut out = BTreeMap::new();
    for n in -1..=nmax {
        let mut c = j
            .coeff(n)
            .ok_or_else(|| Error::Inconsistent(format!("j series too short at q^{n}")))?;
        if n == 0 {
            c -= BigInt::from(744);
        }
        out.insert(n, c);
    }
    Ok(out)
}

/// Single coefficient `c(n)`.
pub fn c(n: i64) -> Result<BigInt> {
    Ok(j_coefficients(n.max(-1))?.remove(&n).unwrap_or_default())
}

/// `true` when every `c(n)`, `1 <= n <= nmax`, is positive.
pub fn coefficients_positive(nmax: i64) -> Result<bool> {
    Ok(j_coefficients(nmax)?.iter().filter(|(n, _)| **n >= 1).all(|(_, c)| c.is_positive()))
}
