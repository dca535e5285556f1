use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::point::{pair, ExtComplex, C64};
use super::poly::Polynomial;
use super::rational::{PrincipalPart, RationalFunction};
use super::NumericsError;

/// Absolute pole separation (after scaling by the pole modulus) below which poles count as coincident.
pub const POLE_MERGE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureTerm {
    pub m: usize,
    #[serde(with = "pair")]
    pub c: C64,
}

/// One node with all its derivative terms.
///
/// A finite node contributes Σ c·f^{(m)}(a). The node at ∞ acts on F(ζ) = f(1/ζ) at ζ = 0,
/// contributing Σ c·F^{(m)}(0) with m ≥ 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureNode {
    pub at: ExtComplex,
    pub terms: Vec<QuadratureTerm>,
}

impl QuadratureNode {
    pub fn max_order(&self) -> usize {
        self.terms.iter().map(|t| t.m).max().unwrap_or(0)
    }

    /// Order of the pole this node gives the quadrature function.
    pub fn pole_order(&self) -> usize {
        match self.at {
            ExtComplex::Finite(_) => self.max_order() + 1,
            ExtComplex::Infinity => self.max_order().saturating_sub(1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct QuadratureData {
    pub nodes: Vec<QuadratureNode>,
}

impl QuadratureData {
    /// Order d: the degree of the quadrature function.
    pub fn degree(&self) -> usize {
        self.nodes.iter().map(|n| n.pole_order()).sum()
    }

    /// Number of distinct poles of the quadrature function (∞ counts only if it is a pole).
    pub fn node_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.pole_order() > 0).count()
    }

    pub fn finite_nodes(&self) -> impl Iterator<Item = &QuadratureNode> {
        self.nodes.iter().filter(|n| !n.at.is_infinite())
    }

    pub fn infinity_node(&self) -> Option<&QuadratureNode> {
        self.nodes.iter().find(|n| n.at.is_infinite())
    }

    pub fn has_pole_at_infinity(&self) -> bool {
        self.infinity_node().is_some_and(|n| n.pole_order() > 0)
    }

    /// r(z) = (1/π) Σ c m!/(z − a)^{m+1} + polynomial part from the node at ∞.
    pub fn to_rational(&self) -> RationalFunction {
        let mut parts = Vec::new();
        let mut poly = Polynomial::zero();
        for node in &self.nodes {
            match node.at {
                ExtComplex::Finite(a) => {
                    let mut coeffs = vec![C64::new(0.0, 0.0); node.max_order() + 1];
                    for t in &node.terms {
                        coeffs[t.m] += t.c * factorial(t.m) / PI;
                    }
                    parts.push(PrincipalPart { pole: a, coeffs });
                }
                ExtComplex::Infinity => {
                    let mut coeffs = vec![C64::new(0.0, 0.0); node.max_order()];
                    for t in node.terms.iter().filter(|t| t.m >= 1) {
                        coeffs[t.m - 1] -= t.c * factorial(t.m) / PI;
                    }
                    poly = &poly + &Polynomial::new(coeffs);
                }
            }
        }
        RationalFunction::from_parts(&poly, &parts)
    }

    /// Σ c_k f^{(m_k)}(a_k) given a callback for derivatives (F(ζ) = f(1/ζ) at the ∞ node).
    pub fn apply(&self, mut deriv: impl FnMut(ExtComplex, usize) -> C64) -> C64 {
        self.nodes
            .iter()
            .flat_map(|n| n.terms.iter().map(move |t| (n.at, t)))
            .map(|(at, t)| t.c * deriv(at, t.m))
            .sum()
    }

    /// Merges finite nodes closer than `tol`, summing their terms at the first location.
    pub fn merged(&self, tol: f64) -> QuadratureData {
        let mut out: Vec<QuadratureNode> = Vec::new();
        for node in &self.nodes {
            let slot = out.iter_mut().find(|o| match (o.at, node.at) {
                (ExtComplex::Infinity, ExtComplex::Infinity) => true,
                (ExtComplex::Finite(a), ExtComplex::Finite(b)) => (a - b).norm() <= tol,
                _ => false,
            });
            match slot {
                Some(o) => {
                    for t in &node.terms {
                        match o.terms.iter_mut().find(|s| s.m == t.m) {
                            Some(s) => s.c += t.c,
                            None => o.terms.push(*t),
                        }
                    }
                    o.terms.sort_by_key(|t| t.m);
                }
                None => out.push(node.clone()),
            }
        }
        QuadratureData { nodes: out }
    }

    /// Drops terms with |c| below `tol` and nodes left empty.
    pub fn pruned(&self, tol: f64) -> QuadratureData {
        let nodes = self
            .nodes
            .iter()
            .map(|n| QuadratureNode {
                at: n.at,
                terms: n.terms.iter().filter(|t| t.c.norm() > tol).cloned().collect(),
            })
            .filter(|n| !n.terms.is_empty())
            .collect();
        QuadratureData { nodes }
    }
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Recovers (a_k, m_k, c_k) from a quadrature function; a polynomial part becomes the node at ∞.
pub fn partial_fractions(f: &RationalFunction) -> Result<QuadratureData, NumericsError> {
    let poles = f.poles();
    for i in 0..poles.len() {
        for j in i + 1..poles.len() {
            let (a, b) = (poles[i].0, poles[j].0);
            let scale = a.norm().max(b.norm()).max(1.0);
            let sep = (a - b).norm();
            if sep < POLE_MERGE_TOL * scale {
                return Err(NumericsError::NearCoincidentPoles { separation: sep });
            }
        }
    }
    let mut nodes = Vec::new();
    for part in f.principal_parts() {
        let terms = part
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, b)| b.norm() != 0.0)
            .map(|(m, &b)| QuadratureTerm { m, c: b * PI / factorial(m) })
            .collect();
        nodes.push(QuadratureNode { at: ExtComplex::Finite(part.pole), terms });
    }
    let poly = f.polynomial_part();
    if !poly.is_zero() {
        let terms = poly
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, p)| p.norm() != 0.0)
            .map(|(j, &p)| QuadratureTerm { m: j + 1, c: -p * PI / factorial(j + 1) })
            .collect();
        nodes.push(QuadratureNode { at: ExtComplex::Infinity, terms });
    }
    Ok(QuadratureData { nodes })
}
