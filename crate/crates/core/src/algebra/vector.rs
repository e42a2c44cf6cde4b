//! Grade-1 view: contravariant four-vector components over the `g_mu`
//! basis with Minkowski inner product.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use super::multivector::{Multivector, METRIC};

/// Four-vector `v = v^mu g_mu` stored as contravariant components.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourVector(pub [f64; 4]);

impl FourVector {
    pub fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        FourVector([t, x, y, z])
    }

    pub fn zero() -> Self {
        FourVector([0.0; 4])
    }

    pub fn basis(mu: usize) -> Self {
        assert!(mu < 4);
        let mut v = Self::zero();
        v.0[mu] = 1.0;
        v
    }

    /// Minkowski inner product `a.b = eta_{mu nu} a^mu b^nu`.
    pub fn dot(&self, rhs: &FourVector) -> f64 {
        (0..4).map(|mu| METRIC[mu] * self.0[mu] * rhs.0[mu]).sum()
    }

    /// Minkowski square `v.v`.
    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    /// Covariant component `v_mu = eta_{mu mu} v^mu`.
    pub fn lower(&self, mu: usize) -> f64 {
        METRIC[mu] * self.0[mu]
    }

    pub fn mv(&self) -> Multivector {
        let mut m = Multivector::zero();
        for mu in 0..4 {
            m.coeffs[1 << mu] = self.0[mu];
        }
        m
    }

    /// Grade-1 coefficients of a multivector; other grades are ignored.
    pub fn from_mv(m: &Multivector) -> Self {
        FourVector([
            m.coeffs[0b0001],
            m.coeffs[0b0010],
            m.coeffs[0b0100],
            m.coeffs[0b1000],
        ])
    }

    pub fn scaled(&self, s: f64) -> Self {
        FourVector([self.0[0] * s, self.0[1] * s, self.0[2] * s, self.0[3] * s])
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |acc, c| acc.max(c.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

impl Index<usize> for FourVector {
    type Output = f64;
    fn index(&self, mu: usize) -> &f64 {
        &self.0[mu]
    }
}

impl Add for FourVector {
    type Output = FourVector;
    fn add(self, rhs: FourVector) -> FourVector {
        FourVector([
            self.0[0] + rhs.0[0],
            self.0[1] + rhs.0[1],
            self.0[2] + rhs.0[2],
            self.0[3] + rhs.0[3],
        ])
    }
}

impl Sub for FourVector {
    type Output = FourVector;
    fn sub(self, rhs: FourVector) -> FourVector {
        FourVector([
            self.0[0] - rhs.0[0],
            self.0[1] - rhs.0[1],
            self.0[2] - rhs.0[2],
            self.0[3] - rhs.0[3],
        ])
    }
}

impl Neg for FourVector {
    type Output = FourVector;
    fn neg(self) -> FourVector {
        self.scaled(-1.0)
    }
}

impl Mul<f64> for FourVector {
    type Output = FourVector;
    fn mul(self, rhs: f64) -> FourVector {
        self.scaled(rhs)
    }
}

impl fmt::Display for FourVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.0[0], self.0[1], self.0[2], self.0[3])
    }
}
