//! Exact checks of approximation guarantees of the form
//! `value ≥ coeff · (1 − 1/e)^a · opt / √k`.
//!
//! The irrational parts are bracketed by rational intervals that shrink until
//! the comparison is decided, so no floating point enters a verdict.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{isqrt, Prize, Rational};

/// A guarantee factor. `value` is certified when `value ≥ factor · opt`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub coeff: BigRational,
    /// Multiply by `1 − 1/e`.
    pub one_minus_inv_e: bool,
    /// Divide by `√k`.
    pub inv_sqrt: Option<u64>,
}

pub fn big(r: Rational) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

fn ratio(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Factor {
    pub fn rational(coeff: BigRational) -> Self {
        Factor {
            coeff,
            one_minus_inv_e: false,
            inv_sqrt: None,
        }
    }

    /// `1 − 1/e`, the greedy guarantee.
    pub fn greedy() -> Self {
        Factor {
            coeff: BigRational::one(),
            one_minus_inv_e: true,
            inv_sqrt: None,
        }
    }

    /// Pre-trim bound of the rooted pipeline: `(1 − 1/e) / (5⌊√B⌋)`.
    pub fn pre_trim(budget: u64) -> Self {
        Factor {
            coeff: ratio(1, 5 * isqrt(budget)),
            one_minus_inv_e: true,
            inv_sqrt: None,
        }
    }

    /// Final rooted submodular bound `(1 − 1/e) ε³ / (1280 √B)`.
    pub fn drso_final(budget: u64, epsilon: Rational) -> Self {
        let e = big(epsilon);
        Factor {
            coeff: &e * &e * &e / BigInt::from(1280),
            one_minus_inv_e: true,
            inv_sqrt: Some(budget),
        }
    }

    /// Final rooted additive bound `(1 − 1/e) ε² / (40 √B)`.
    pub fn drao_final(budget: u64, epsilon: Rational) -> Self {
        let e = big(epsilon);
        Factor {
            coeff: &e * &e / BigInt::from(40),
            one_minus_inv_e: true,
            inv_sqrt: Some(budget),
        }
    }

    /// Unrooted bound `(1 − 1/e) / (5760 √B)`.
    pub fn unrooted_final(budget: u64) -> Self {
        Factor {
            coeff: ratio(1, 5760),
            one_minus_inv_e: true,
            inv_sqrt: Some(budget),
        }
    }

    /// Whether `value ≥ self · opt`, decided exactly.
    pub fn holds(&self, value: Prize, opt: Prize) -> bool {
        let q = &self.coeff * BigInt::from(opt);
        if !q.is_positive() {
            return true;
        }
        if value == 0 {
            return false;
        }
        let v = BigRational::from_integer(BigInt::from(value));
        for round in 1..=64u32 {
            let (sl, sh) = match self.inv_sqrt {
                Some(k) => sqrt_bracket(k, 8 * round),
                None => (BigRational::one(), BigRational::one()),
            };
            let (el, eh) = if self.one_minus_inv_e {
                one_minus_inv_e_bracket(4 * round as usize)
            } else {
                (BigRational::one(), BigRational::one())
            };
            // value·√k against q·(1 − 1/e)
            let (xl, xh) = (&v * &sl, &v * &sh);
            let (yl, yh) = (&q * &el, &q * &eh);
            if xl >= yh {
                return true;
            }
            if xh < yl {
                return false;
            }
        }
        unreachable!("transcendental comparison failed to separate")
    }

    /// The bound `self · opt` as a float, for display only.
    pub fn bound_f64(&self, opt: Prize) -> f64 {
        let mut b = self.coeff.to_f64().unwrap_or(f64::NAN) * opt as f64;
        if self.one_minus_inv_e {
            b *= 1.0 - (-1.0f64).exp();
        }
        if let Some(k) = self.inv_sqrt {
            b /= (k as f64).sqrt();
        }
        b
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coeff)?;
        if self.one_minus_inv_e {
            write!(f, "*(1-1/e)")?;
        }
        if let Some(k) = self.inv_sqrt {
            write!(f, "/sqrt({k})")?;
        }
        Ok(())
    }
}

/// Rational interval containing `√k` of width at most `2^-bits`.
fn sqrt_bracket(k: u64, bits: u32) -> (BigRational, BigRational) {
    let scale = BigUint::one() << bits;
    let scaled = BigUint::from(k) * &scale * &scale;
    let s = scaled.sqrt();
    let den = BigInt::from(scale);
    let lo = BigRational::new(BigInt::from(s.clone()), den.clone());
    if &s * &s == scaled {
        return (lo.clone(), lo);
    }
    let hi = BigRational::new(BigInt::from(s + 1u32), den);
    (lo, hi)
}

/// Interval containing `1 − 1/e` from consecutive partial sums of the
/// alternating series for `1/e`.
fn one_minus_inv_e_bracket(terms: usize) -> (BigRational, BigRational) {
    let mut sum = BigRational::zero();
    let mut fact = BigInt::one();
    let mut prev = BigRational::zero();
    for n in 0..=terms + 1 {
        if n > 0 {
            fact *= BigInt::from(n);
        }
        prev = sum.clone();
        let term = BigRational::new(BigInt::one(), fact.clone());
        if n % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let one = BigRational::one();
    let (a, b) = (&one - &prev, &one - &sum);
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}
