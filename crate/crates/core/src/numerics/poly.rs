use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::point::{pair, C64};

/// Relative size below which a leading coefficient produced by cancellation is dropped.
const CANCEL_REL: f64 = 1e-14;

/// Complex polynomial, coefficients in ascending degree. The zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Polynomial {
    coeffs: Vec<C64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == C64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(C64::new(1.0, 0.0))
    }

    /// z − a
    pub fn linear(a: C64) -> Self {
        Self::new(vec![-a, C64::new(1.0, 0.0)])
    }

    /// z^k
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![C64::new(0.0, 0.0); k + 1];
        c[k] = C64::new(1.0, 0.0);
        Self::new(c)
    }

    /// lc · Π (z − r)^m
    pub fn from_roots(lc: C64, roots: &[(C64, usize)]) -> Self {
        let mut p = Self::constant(lc);
        for &(r, m) in roots {
            for _ in 0..m {
                p = &p * &Self::linear(r);
            }
        }
        p
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> C64 {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    /// Largest coefficient modulus.
    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Σ |a_k| |z|^k, the natural scale of rounding error in `eval`.
    pub fn eval_abs(&self, z: C64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Coefficients with each one conjugated (the map p ↦ p*).
    pub fn conj_coeffs(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    /// Drops leading coefficients whose modulus is at most `rel` times the largest one.
    pub fn trimmed(mut self, rel: f64) -> Self {
        let tol = rel * self.norm_inf();
        while self.coeffs.last().is_some_and(|c| c.norm() <= tol) {
            self.coeffs.pop();
        }
        self
    }

    /// Taylor coefficients at `a`: p(z) = Σ t_k (z − a)^k.
    pub fn taylor_shift(&self, a: C64) -> Vec<C64> {
        let mut t = self.coeffs.clone();
        let n = t.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let next = t[j + 1];
                t[j] += a * next;
            }
        }
        t
    }

    /// Quotient and remainder of division by a nonzero polynomial.
    pub fn div_rem(&self, divisor: &Polynomial) -> (Polynomial, Polynomial) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let dd = divisor.degree();
        if self.is_zero() || self.degree() < dd {
            return (Self::zero(), self.clone());
        }
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![C64::new(0.0, 0.0); self.degree() - dd + 1];
        for k in (0..quot.len()).rev() {
            let q = rem[k + dd] / lead;
            quot[k] = q;
            for (j, &dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= q * dc;
            }
            rem[k + dd] = C64::new(0.0, 0.0);
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem).trimmed(CANCEL_REL))
    }

    /// Exact-degree deflation p / (z − a) by synthetic division, discarding the remainder.
    pub fn deflate(&self, a: C64) -> Polynomial {
        let n = self.coeffs.len();
        if n <= 1 {
            return Self::zero();
        }
        let mut out = vec![C64::new(0.0, 0.0); n - 1];
        let mut acc = C64::new(0.0, 0.0);
        for k in (1..n).rev() {
            acc = acc * a + self.coeffs[k];
            out[k - 1] = acc;
        }
        Self::new(out)
    }

    /// Coefficients of p(1/ζ)·ζ^deg, i.e. the reversed coefficient list.
    pub fn reversed(&self) -> Polynomial {
        let mut c = self.coeffs.clone();
        c.reverse();
        Polynomial { coeffs: c }
    }

    pub fn pow(&self, k: usize) -> Polynomial {
        let mut out = Self::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let scale = self.norm_inf().max(rhs.norm_inf());
        let c: Vec<C64> = (0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect();
        let mut p = Polynomial::new(c);
        let tol = CANCEL_REL * scale;
        while p.coeffs.last().is_some_and(|c| c.norm() <= tol) {
            p.coeffs.pop();
        }
        p
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&c| -c).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut c = vec![C64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Polynomial::new(c)
    }
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        pair::vec::serialize(&self.coeffs, serializer)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Ok(Polynomial::new(pair::vec::deserialize(deserializer)?))
    }
}

/// Power-series quotient a/b truncated to `n` terms; requires b[0] ≠ 0.
pub fn series_div(a: &[C64], b: &[C64], n: usize) -> Vec<C64> {
    let b0 = b[0];
    let mut q = vec![C64::new(0.0, 0.0); n];
    for k in 0..n {
        let mut acc = a.get(k).copied().unwrap_or_default();
        for j in 1..=k.min(b.len().saturating_sub(1)) {
            acc -= b[j] * q[k - j];
        }
        q[k] = acc / b0;
    }
    q
}
