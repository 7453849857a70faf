//! Value types the refinement and averaging operators act on.
//!
//! The operators only ever form averages `(v_1 + ... + v_k) / k`, so a single
//! small trait covers double-precision geometry, exact rational weights and
//! symbolic linear forms alike.

use std::collections::BTreeMap;

use num::rational::BigRational;
use num::{BigInt, Zero};

/// Anything that can be averaged with exact unit-fraction weights.
pub trait Avg: Clone {
    fn zero() -> Self;
    fn add(&self, other: &Self) -> Self;
    /// Division by a small positive integer.
    fn div(&self, k: u32) -> Self;

    /// Unweighted mean of a non-empty slice.
    fn mean(items: &[&Self]) -> Self {
        let mut acc = Self::zero();
        for it in items {
            acc = acc.add(it);
        }
        acc.div(items.len() as u32)
    }
}

impl Avg for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn div(&self, k: u32) -> Self {
        self / k as f64
    }
}

impl Avg for nalgebra::Complex<f64> {
    fn zero() -> Self {
        nalgebra::Complex::new(0.0, 0.0)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn div(&self, k: u32) -> Self {
        self / k as f64
    }
}

impl Avg for BigRational {
    fn zero() -> Self {
        num::Zero::zero()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn div(&self, k: u32) -> Self {
        self / BigRational::from_integer(BigInt::from(k))
    }
}

impl<const D: usize> Avg for [f64; D] {
    fn zero() -> Self {
        [0.0; D]
    }
    fn add(&self, other: &Self) -> Self {
        let mut out = *self;
        for (a, b) in out.iter_mut().zip(other) {
            *a += b;
        }
        out
    }
    fn div(&self, k: u32) -> Self {
        self.map(|a| a / k as f64)
    }
}

/// Sparse exact linear form over an indexed family of inputs.
///
/// Feeding unit forms through a linear operator yields its matrix rows in
/// exact rational arithmetic.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LinForm<K: Ord + Clone> {
    pub terms: BTreeMap<K, BigRational>,
}

impl<K: Ord + Clone> LinForm<K> {
    pub fn unit(key: K) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(key, BigRational::from_integer(BigInt::from(1)));
        LinForm { terms }
    }

    pub fn coeff(&self, key: &K) -> BigRational {
        self.terms.get(key).cloned().unwrap_or_else(num::Zero::zero)
    }

    pub fn sum_of_coeffs(&self) -> BigRational {
        let mut s: BigRational = num::Zero::zero();
        for c in self.terms.values() {
            s += c;
        }
        s
    }
}

impl<K: Ord + Clone> Avg for LinForm<K> {
    fn zero() -> Self {
        LinForm {
            terms: BTreeMap::new(),
        }
    }

    fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (k, c) in &other.terms {
            let e = terms.entry(k.clone()).or_insert_with(num::Zero::zero);
            *e += c;
            if e.is_zero() {
                terms.remove(k);
            }
        }
        LinForm { terms }
    }

    fn div(&self, k: u32) -> Self {
        let d = BigRational::from_integer(BigInt::from(k));
        LinForm {
            terms: self
                .terms
                .iter()
                .map(|(key, c)| (key.clone(), c / &d))
                .collect(),
        }
    }
}

/// A point carrying both a floating-point position and a symbolic form;
/// used to locate symbolic stencils geometrically in oracle computations.
#[derive(Clone, Debug)]
pub struct Tagged<P, S> {
    pub pos: P,
    pub sym: S,
}

impl<P: Avg, S: Avg> Avg for Tagged<P, S> {
    fn zero() -> Self {
        Tagged {
            pos: P::zero(),
            sym: S::zero(),
        }
    }
    fn add(&self, other: &Self) -> Self {
        Tagged {
            pos: self.pos.add(&other.pos),
            sym: self.sym.add(&other.sym),
        }
    }
    fn div(&self, k: u32) -> Self {
        Tagged {
            pos: self.pos.div(k),
            sym: self.sym.div(k),
        }
    }
}

/// `p/q` rendering used by the exact-stencil JSON dump.
pub fn rational_string(r: &BigRational) -> String {
    if r.denom() == &BigInt::from(1) {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_of_units_is_uniform() {
        let a: LinForm<u32> = LinForm::unit(0);
        let b: LinForm<u32> = LinForm::unit(1);
        let m = LinForm::mean(&[&a, &b]);
        assert_eq!(m.coeff(&0), BigRational::new(1.into(), 2.into()));
        assert_eq!(m.sum_of_coeffs(), BigRational::from_integer(1.into()));
    }

    #[test]
    fn linform_cancellation_drops_terms() {
        let a: LinForm<u32> = LinForm::unit(0);
        let neg = a.div(1).terms[&0].clone() * BigRational::from_integer((-1).into());
        let mut b = LinForm::zero();
        b.terms.insert(0, neg);
        assert!(a.add(&b).terms.is_empty());
    }
}
