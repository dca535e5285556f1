use std::f64::consts::PI;

use crate::numerics::{poly_roots, ExtComplex, Polynomial, RationalFunction, C64};

use super::DomainError;

/// A univalent rational map from the unit disc (bounded) or its exterior (unbounded) onto Ω.
#[derive(Clone, Debug)]
pub struct ConformalMap {
    pub phi: RationalFunction,
    pub dphi: RationalFunction,
    /// T(w) = φ*(1/w); the Schwarz function satisfies S(φ(w)) = T(w).
    pub t: RationalFunction,
    pub unbounded: bool,
}

impl ConformalMap {
    pub fn new(phi: RationalFunction, unbounded: bool) -> Result<Self, DomainError> {
        let dphi = phi.derivative();
        let t = reflect(&phi)?;
        Ok(ConformalMap { phi, dphi, t, unbounded })
    }

    pub fn eval(&self, w: C64) -> C64 {
        self.phi.value(w)
    }

    pub fn deriv(&self, w: C64) -> C64 {
        self.dphi.value(w)
    }

    pub fn schwarz_w(&self, w: C64) -> C64 {
        self.t.value(w)
    }

    /// True if w lies in the open reference domain.
    pub fn in_reference(&self, w: C64, margin: f64) -> bool {
        if self.unbounded {
            w.norm() > 1.0 + margin
        } else {
            w.norm() < 1.0 - margin
        }
    }

    /// Parameter point k of n, ordered so that Ω lies to the left.
    pub fn boundary_w(&self, k: usize, n: usize) -> C64 {
        let th = 2.0 * PI * k as f64 / n as f64;
        C64::from_polar(1.0, if self.unbounded { -th } else { th })
    }

    /// Boundary points and dz/dθ, ordered with Ω on the left.
    pub fn boundary(&self, n: usize) -> (Vec<C64>, Vec<C64>) {
        let s = if self.unbounded { -1.0 } else { 1.0 };
        (0..n)
            .map(|k| {
                let w = self.boundary_w(k, n);
                (self.eval(w), self.deriv(w) * C64::new(0.0, s) * w)
            })
            .unzip()
    }

    /// (1/2i)∮ g(z) dz over the image of the unit circle traversed counterclockwise in w,
    /// trapezoid rule with n nodes.
    pub fn circle_integral(&self, n: usize, g: impl Fn(C64) -> C64) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for k in 0..n {
            let w = C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
            let z = self.eval(w);
            s += g(z) * self.deriv(w) * C64::new(0.0, 1.0) * w;
        }
        s * (2.0 * PI / n as f64) / C64::new(0.0, 2.0)
    }

    /// Finite zeros of φ′.
    pub fn critical_points(&self) -> Result<Vec<C64>, DomainError> {
        let num = self.dphi.num().clone().trimmed(1e-14);
        if num.degree() == 0 {
            return Ok(Vec::new());
        }
        Ok(poly_roots(&num)?.into_iter().map(|(z, _)| z).collect())
    }

    /// Poles of T in the open reference domain with their orders; `None` stands for w = ∞.
    pub fn schwarz_poles(&self) -> Result<Vec<(Option<C64>, usize)>, DomainError> {
        let mut out = Vec::new();
        for &(p, k) in self.t.poles() {
            let r = p.norm();
            if (r - 1.0).abs() < 1e-10 {
                return Err(DomainError::PoleOnDisc { pole: p });
            }
            if (r < 1.0) != self.unbounded {
                out.push((Some(p), k));
            }
        }
        if self.unbounded && self.t.at_infinity() == ExtComplex::Infinity {
            out.push((None, self.t.local_degree_at_infinity()));
        }
        Ok(out)
    }
}

/// T(w) = φ*(1/w) as a rational function of w.
pub fn reflect(phi: &RationalFunction) -> Result<RationalFunction, DomainError> {
    let n = phi.num().conj_coeffs();
    let d = phi.den().conj_coeffs();
    let (dn, dd) = (n.degree(), d.degree());
    // N*(1/w)/D*(1/w) = w^{dd−dn} · rev(N)(w) / rev(D)(w)
    let mut num = n.reversed();
    let mut den = d.reversed();
    if dd > dn {
        num = &num * &Polynomial::monomial(dd - dn);
    } else if dn > dd {
        den = &den * &Polynomial::monomial(dn - dd);
    }
    Ok(RationalFunction::new(num, den)?)
}

/// Newton inversion of φ seeded from a fixed table of reference-domain samples.
#[derive(Clone, Debug)]
pub struct Inverter {
    seeds: Vec<(C64, C64)>,
}

pub const SEED_COUNT: usize = 1024;
const NEWTON_CAP: usize = 50;

impl Inverter {
    pub fn new(map: &ConformalMap) -> Self {
        let (na, nr) = (32, SEED_COUNT / 32);
        let mut seeds = Vec::with_capacity(SEED_COUNT);
        for j in 0..nr {
            // Radii from the boundary inward (bounded) or outward (unbounded).
            let s = j as f64 / nr as f64;
            let r = if map.unbounded { 1.0 / (1.0 - 0.95 * s) } else { 1.0 - 0.97 * s };
            for k in 0..na {
                let w = C64::from_polar(r, 2.0 * PI * (k as f64 + 0.5 * (j % 2) as f64) / na as f64);
                let z = map.eval(w);
                if z.is_finite() {
                    seeds.push((w, z));
                }
            }
        }
        Inverter { seeds }
    }

    /// w with φ(w) = z, preferring preimages in the closed reference domain.
    pub fn invert(&self, map: &ConformalMap, z: C64) -> Result<C64, DomainError> {
        let mut order: Vec<usize> = (0..self.seeds.len()).collect();
        order.sort_by(|&a, &b| (self.seeds[a].1 - z).norm().total_cmp(&(self.seeds[b].1 - z).norm()));
        let scale = z.norm().max(1.0);
        let mut fallback = None;
        for &s in order.iter().take(8) {
            let mut w = self.seeds[s].0;
            for _ in 0..NEWTON_CAP {
                let f = map.eval(w) - z;
                if f.norm() <= 1e-14 * scale {
                    break;
                }
                let d = map.deriv(w);
                if d.norm() == 0.0 || !d.is_finite() {
                    break;
                }
                let mut step = f / d;
                // Keep steps local so Newton cannot jump to another preimage branch.
                let lim = 0.25 * w.norm().max(0.25);
                if step.norm() > lim {
                    step *= lim / step.norm();
                }
                w -= step;
            }
            if (map.eval(w) - z).norm() <= 1e-10 * scale {
                if map.in_reference(w, -1e-6) {
                    return Ok(w);
                }
                fallback.get_or_insert(w);
            }
        }
        if let Some(w) = fallback {
            return Ok(w);
        }
        Err(DomainError::InversionFailure { z })
    }
}
