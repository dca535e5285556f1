//! Quadrature identities ∫_Ω f dA = Σ c_k f^{(m_k)}(a_k), checked by comparing a boundary
//! integral with the quadrature sum.
//!
//! Cauchy kernel convention: k_w(z) = 1/(z − w).

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::domains::{self, DomainError, DomainSpec};
use crate::numerics::{c64, ExtComplex, Polynomial, QuadratureData, RationalFunction, C64};

#[derive(Debug, Error)]
pub enum QuadError {
    #[error("inadmissible test function {f}: {reason}")]
    InadmissibleTest { f: String, reason: String },
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Clone, Debug)]
pub enum TestFunction {
    /// z^j
    Monomial(usize),
    /// z^{−j}
    InverseMonomial(usize),
    /// k_w(z) = 1/(z − w)
    Cauchy(C64),
    Rational(RationalFunction),
}

impl TestFunction {
    pub fn label(&self) -> String {
        match self {
            TestFunction::Monomial(j) => format!("z^{j}"),
            TestFunction::InverseMonomial(j) => format!("z^-{j}"),
            TestFunction::Cauchy(w) => format!("k_w(w={:.4}{:+.4}i)", w.re, w.im),
            TestFunction::Rational(_) => "rational".into(),
        }
    }

    pub fn to_rational(&self) -> RationalFunction {
        let one = Polynomial::one();
        match self {
            TestFunction::Monomial(j) => RationalFunction::from_poly(Polynomial::monomial(*j)),
            TestFunction::InverseMonomial(j) => RationalFunction::new(one, Polynomial::monomial(*j)).unwrap(),
            TestFunction::Cauchy(w) => RationalFunction::new(one, Polynomial::linear(*w)).unwrap(),
            TestFunction::Rational(f) => f.clone(),
        }
    }
}

/// F(ζ) = f(1/ζ).
fn at_inverse(f: &RationalFunction) -> RationalFunction {
    let (n, d) = (f.num(), f.den());
    let (dn, dd) = (n.degree(), d.degree());
    let mut num = n.reversed();
    let mut den = d.reversed();
    if dd > dn {
        num = &num * &Polynomial::monomial(dd - dn);
    } else if dn > dd {
        den = &den * &Polynomial::monomial(dn - dd);
    }
    RationalFunction::new(num, den).expect("reversed denominator is nonzero")
}

/// Rejects f with a pole in clos Ω, or with f(∞) ≠ 0 when Ω is unbounded.
pub fn admissible(spec: &DomainSpec, f: &TestFunction) -> Result<(), QuadError> {
    let r = f.to_rational();
    let bad = |reason: String| QuadError::InadmissibleTest { f: f.label(), reason };
    let unbounded = spec.is_unbounded();
    if unbounded {
        match r.at_infinity() {
            ExtComplex::Finite(v) if v.norm() <= 1e-14 * r.num().norm_inf().max(1.0) => {}
            _ => return Err(bad("f(∞) ≠ 0 on an unbounded domain".into())),
        }
    }
    let b = domains::boundary(spec, 2048)?;
    let scale = b.all_points().map(|z| z.norm()).fold(1.0, f64::max);
    for &(p, _) in r.poles() {
        let wind: i64 = b.curves.iter().map(|c| domains::winding_number(&c.points, p)).sum();
        let inside = if unbounded { wind == 0 } else { wind == 1 };
        let near = b.all_points().map(|z| (z - p).norm()).fold(f64::INFINITY, f64::min);
        if inside || near <= 1e-9 * scale {
            return Err(bad(format!("pole at {p} lies in the closed domain")));
        }
    }
    Ok(())
}

/// (1/2i)∮_{∂Ω} f z̄ dz with Ω on the left; for unbounded Ω this is the principal value.
fn boundary_integral(spec: &DomainSpec, f: &RationalFunction, n: usize) -> Result<C64, QuadError> {
    let b = domains::boundary(spec, n)?;
    let mut s = c64(0.0, 0.0);
    if let DomainSpec::RasterComplement { .. } = spec {
        for c in &b.curves {
            for k in 0..c.points.len() - 1 {
                let (a, e) = (c.points[k], c.points[k + 1]);
                let m = 0.5 * (a + e);
                s += f.value(m) * m.conj() * (e - a);
            }
        }
    } else {
        let dt = 2.0 * PI / n as f64;
        for c in &b.curves {
            for k in 0..n {
                let z = c.points[k];
                s += f.value(z) * z.conj() * c.tangents[k] * dt;
            }
        }
    }
    Ok(s / c64(0.0, 2.0))
}

/// ∫_Ω f dA via the boundary integral, Richardson-combined over n and 2n nodes.
pub fn lhs_area_integral(spec: &DomainSpec, f: &TestFunction) -> Result<C64, QuadError> {
    lhs_with_nodes(spec, f, domains::BOUNDARY_NODES)
}

pub fn lhs_with_nodes(spec: &DomainSpec, f: &TestFunction, n: usize) -> Result<C64, QuadError> {
    admissible(spec, f)?;
    let r = f.to_rational();
    let a = boundary_integral(spec, &r, n)?;
    let b = boundary_integral(spec, &r, 2 * n)?;
    Ok(b + (b - a) / 3.0)
}

/// Σ c_k f^{(m_k)}(a_k), with F(ζ) = f(1/ζ) differentiated at ζ = 0 for the node at ∞.
pub fn rhs_quadrature(qd: &QuadratureData, f: &TestFunction) -> C64 {
    let r = f.to_rational();
    let inv = at_inverse(&r);
    qd.apply(|at, m| match at {
        ExtComplex::Finite(a) => r.nth_derivative(m).value(a),
        ExtComplex::Infinity => inv.nth_derivative(m).value(c64(0.0, 0.0)),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub domain: String,
    pub battery: Vec<String>,
    pub errors: Vec<f64>,
    pub max_error: f64,
}

/// max |lhs − rhs| over the battery.
pub fn check_identity(spec: &DomainSpec, qd: &QuadratureData, battery: &[TestFunction]) -> Result<IdentityReport, QuadError> {
    let errors = battery
        .par_iter()
        .map(|f| Ok((lhs_area_integral(spec, f)? - rhs_quadrature(qd, f)).norm()))
        .collect::<Result<Vec<f64>, QuadError>>()?;
    Ok(IdentityReport {
        domain: spec.name().to_string(),
        battery: battery.iter().map(|f| f.label()).collect(),
        max_error: errors.iter().copied().fold(0.0, f64::max),
        errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_map_of_kernel() {
        // k_w(1/ζ) = ζ/(1 − wζ)
        let w = c64(0.5, 0.2);
        let f = at_inverse(&TestFunction::Cauchy(w).to_rational());
        let z = c64(0.3, -0.1);
        assert!((f.value(z) - z / (1.0 - w * z)).norm() < 1e-14);
    }
}
