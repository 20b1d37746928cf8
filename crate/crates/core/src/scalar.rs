//! The arithmetic the recurrence needs, abstracted over exact rationals and
//! quadratic surds so that cycles with irrational values can still be checked
//! exactly.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::ratio::{self, Ratio};
use crate::surd::QuadSurd;

pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    /// Embeds a rational into the same field as `self`.
    fn lift(&self, r: &Ratio) -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn scale(&self, r: &Ratio) -> Self;
    fn divide(&self, other: &Self) -> Option<Self>;
    /// Sign relative to zero.
    fn sign(&self) -> Ordering;
    fn to_f64(&self) -> f64;

    fn is_zero_value(&self) -> bool {
        self.sign() == Ordering::Equal
    }

    /// `|self - other|` as a float, computed exactly before conversion.
    fn distance(&self, other: &Self) -> f64 {
        self.minus(other).to_f64().abs()
    }
}

impl Scalar for Ratio {
    fn lift(&self, r: &Ratio) -> Self {
        r.clone()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, r: &Ratio) -> Self {
        self * r
    }
    fn divide(&self, other: &Self) -> Option<Self> {
        ratio::checked_div(self, other)
    }
    fn sign(&self) -> Ordering {
        if self.is_zero() {
            Ordering::Equal
        } else if self.is_negative() {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
    fn to_f64(&self) -> f64 {
        ratio::to_f64(self)
    }
}

impl Scalar for QuadSurd {
    fn lift(&self, r: &Ratio) -> Self {
        QuadSurd::from_ratio(r.clone())
    }
    fn plus(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn minus(&self, other: &Self) -> Self {
        self.sub(other)
    }
    fn times(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn scale(&self, r: &Ratio) -> Self {
        QuadSurd::scale(self, r)
    }
    fn divide(&self, other: &Self) -> Option<Self> {
        self.checked_div(other)
    }
    fn sign(&self) -> Ordering {
        self.signum()
    }
    fn to_f64(&self) -> f64 {
        QuadSurd::to_f64(self)
    }
}
