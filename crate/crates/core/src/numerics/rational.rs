use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::point::{ExtComplex, C64};
use super::poly::{series_div, Polynomial};
use super::roots::poly_roots;
use super::NumericsError;

/// Relative residual below which a numerator is taken to vanish at a denominator root.
const COPRIME_TOL: f64 = 1e-9;

/// Laurent principal part at a finite pole: Σ_{j=1}^{k} b[j-1] / (z − a)^j.
#[derive(Clone, Debug, PartialEq)]
pub struct PrincipalPart {
    pub pole: C64,
    pub coeffs: Vec<C64>,
}

impl PrincipalPart {
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }
}

/// num/den with den monic, coprime to num, and its roots cached as `poles`.
#[derive(Clone, Debug)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
    poles: Vec<(C64, usize)>,
}

impl RationalFunction {
    /// Reduces num/den to coprime form by cancelling shared roots.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, NumericsError> {
        if den.is_zero() {
            return Err(NumericsError::ZeroDenominator);
        }
        if den.degree() == 0 || num.is_zero() {
            let lc = den.leading();
            return Ok(RationalFunction {
                num: num.scale(lc.inv()),
                den: Polynomial::one(),
                poles: Vec::new(),
            });
        }
        let roots = poly_roots(&den)?;
        let mut num = num;
        let mut poles = Vec::new();
        for (r, k) in roots {
            let mut k = k;
            while k > 0 && !num.is_zero() && vanishes(&num, r) {
                num = num.deflate(r);
                k -= 1;
            }
            if k > 0 {
                poles.push((r, k));
            }
        }
        let lc = den.leading();
        let den = Polynomial::from_roots(C64::new(1.0, 0.0), &poles);
        Ok(RationalFunction { num: num.scale(lc.inv()), den, poles })
    }

    pub fn from_poly(p: Polynomial) -> Self {
        RationalFunction { num: p, den: Polynomial::one(), poles: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        Self::from_poly(Polynomial::constant(c))
    }

    /// poly + Σ principal parts. Poles must be distinct; zero leading coefficients are dropped.
    pub fn from_parts(poly: &Polynomial, parts: &[PrincipalPart]) -> Self {
        let mut poles = Vec::new();
        let mut trimmed = Vec::new();
        for p in parts {
            let mut c = p.coeffs.clone();
            while c.last().is_some_and(|b| b.norm() == 0.0) {
                c.pop();
            }
            if !c.is_empty() {
                poles.push((p.pole, c.len()));
                trimmed.push(PrincipalPart { pole: p.pole, coeffs: c });
            }
        }
        let den = Polynomial::from_roots(C64::new(1.0, 0.0), &poles);
        let mut num = poly * &den;
        for (i, part) in trimmed.iter().enumerate() {
            let others: Vec<(C64, usize)> = poles
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, &p)| p)
                .collect();
            let rest = Polynomial::from_roots(C64::new(1.0, 0.0), &others);
            let k = part.order();
            for (j, &b) in part.coeffs.iter().enumerate() {
                // b / (z-a)^{j+1} = b (z-a)^{k-j-1} · rest / den
                let term = &Polynomial::linear(part.pole).pow(k - j - 1) * &rest;
                num = &num + &term.scale(b);
            }
        }
        RationalFunction { num, den, poles }
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    /// Distinct finite poles with their orders.
    pub fn poles(&self) -> &[(C64, usize)] {
        &self.poles
    }

    pub fn degree(&self) -> usize {
        if self.num.is_zero() {
            return self.den.degree();
        }
        self.num.degree().max(self.den.degree())
    }

    pub fn is_polynomial(&self) -> bool {
        self.poles.is_empty()
    }

    pub fn eval(&self, z: ExtComplex) -> ExtComplex {
        match z {
            ExtComplex::Finite(z) => self.eval_at(z),
            ExtComplex::Infinity => self.at_infinity(),
        }
    }

    pub fn eval_at(&self, z: C64) -> ExtComplex {
        if self.poles.iter().any(|&(p, _)| p == z) {
            return ExtComplex::Infinity;
        }
        let d = self.den.eval(z);
        if d.norm() == 0.0 {
            return ExtComplex::Infinity;
        }
        ExtComplex::Finite(self.num.eval(z) / d)
    }

    /// Plain complex value; a pole yields a non-finite number. For grid sweeps.
    pub fn value(&self, z: C64) -> C64 {
        self.num.eval(z) / self.den.eval(z)
    }

    pub fn at_infinity(&self) -> ExtComplex {
        let (a, b) = (self.num.degree(), self.den.degree());
        if self.num.is_zero() || a < b {
            ExtComplex::Finite(C64::new(0.0, 0.0))
        } else if a > b {
            ExtComplex::Infinity
        } else {
            ExtComplex::Finite(self.num.leading() / self.den.leading())
        }
    }

    /// Derivative in coprime form. With E = Π(z − p_j) the squarefree pole polynomial,
    /// f′ = (N′E − N Σ k_j E/(z − p_j)) / (D·E) and every pole order rises by one.
    pub fn derivative(&self) -> RationalFunction {
        if self.poles.is_empty() {
            return Self::from_poly(self.num.derivative());
        }
        let simple: Vec<(C64, usize)> = self.poles.iter().map(|&(p, _)| (p, 1)).collect();
        let e = Polynomial::from_roots(C64::new(1.0, 0.0), &simple);
        let mut w = &self.num.derivative() * &e;
        for &(p, k) in &self.poles {
            let ej = e.deflate(p);
            w = &w - &(&self.num * &ej).scale(C64::new(k as f64, 0.0));
        }
        let poles: Vec<(C64, usize)> = self.poles.iter().map(|&(p, k)| (p, k + 1)).collect();
        RationalFunction { num: w, den: &self.den * &e, poles }
    }

    pub fn nth_derivative(&self, n: usize) -> RationalFunction {
        let mut f = self.clone();
        for _ in 0..n {
            f = f.derivative();
        }
        f
    }

    /// Polynomial part (quotient num ÷ den).
    pub fn polynomial_part(&self) -> Polynomial {
        self.num.div_rem(&self.den).0
    }

    /// Principal part at each pole from the Taylor expansion of f·(z − a)^k.
    pub fn principal_parts(&self) -> Vec<PrincipalPart> {
        self.poles
            .iter()
            .enumerate()
            .map(|(i, &(a, k))| {
                let others: Vec<(C64, usize)> = self
                    .poles
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, &p)| p)
                    .collect();
                let rest = Polynomial::from_roots(C64::new(1.0, 0.0), &others);
                let g = series_div(&self.num.taylor_shift(a), &rest.taylor_shift(a), k);
                let coeffs = (1..=k).map(|j| g[k - j]).collect();
                PrincipalPart { pole: a, coeffs }
            })
            .collect()
    }

    /// f*(z) = conj(f(conj z)): coefficients conjugated.
    pub fn conj_coeffs(&self) -> RationalFunction {
        RationalFunction {
            num: self.num.conj_coeffs(),
            den: self.den.conj_coeffs(),
            poles: self.poles.iter().map(|&(p, k)| (p.conj(), k)).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> RationalFunction {
        RationalFunction { num: self.num.scale(s), den: self.den.clone(), poles: self.poles.clone() }
    }

    /// Sum via partial fractions; poles within `1e-12` relative are identified.
    pub fn add(&self, other: &RationalFunction) -> RationalFunction {
        let poly = &self.polynomial_part() + &other.polynomial_part();
        let mut parts = self.principal_parts();
        for q in other.principal_parts() {
            let tol = 1e-12 * q.pole.norm().max(1.0);
            match parts.iter_mut().find(|p| (p.pole - q.pole).norm() <= tol) {
                Some(p) => {
                    if p.coeffs.len() < q.coeffs.len() {
                        p.coeffs.resize(q.coeffs.len(), C64::new(0.0, 0.0));
                    }
                    for (j, b) in q.coeffs.iter().enumerate() {
                        p.coeffs[j] += b;
                    }
                }
                None => parts.push(q),
            }
        }
        Self::from_parts(&poly, &parts)
    }

    /// Critical points of f as a map of the sphere, with multiplicities summing to 2·deg − 2.
    pub fn critical_points(&self) -> Result<Vec<(ExtComplex, usize)>, NumericsError> {
        let deg = self.degree();
        if deg < 2 {
            return Err(NumericsError::DegreeTooLow { degree: deg, required: 2 });
        }
        let mut out = Vec::new();
        let w = self.derivative().num.trimmed(1e-13);
        if w.degree() >= 1 {
            for (z, m) in poly_roots(&w)? {
                out.push((ExtComplex::Finite(z), m));
            }
        }
        for &(p, k) in &self.poles {
            if k >= 2 {
                out.push((ExtComplex::Finite(p), k - 1));
            }
        }
        let local = self.local_degree_at_infinity();
        if local >= 2 {
            out.push((ExtComplex::Infinity, local - 1));
        }
        Ok(out)
    }

    /// Local degree of f at ∞.
    pub fn local_degree_at_infinity(&self) -> usize {
        let (a, b) = (self.num.degree(), self.den.degree());
        if self.num.is_zero() {
            return 0;
        }
        if a != b {
            return a.abs_diff(b);
        }
        let c = self.num.leading() / self.den.leading();
        let diff = (&self.num - &self.den.scale(c)).trimmed(1e-13);
        if diff.is_zero() {
            0
        } else {
            b - diff.degree()
        }
    }
}

fn vanishes(p: &Polynomial, r: C64) -> bool {
    p.eval(r).norm() <= COPRIME_TOL * p.eval_abs(r).max(f64::MIN_POSITIVE)
}

#[derive(Serialize, Deserialize)]
struct RawRational {
    num: Polynomial,
    den: Polynomial,
}

impl Serialize for RationalFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RawRational { num: self.num.clone(), den: self.den.clone() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RationalFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawRational::deserialize(deserializer)?;
        RationalFunction::new(raw.num, raw.den).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn inv_z() -> RationalFunction {
        RationalFunction::new(Polynomial::one(), Polynomial::monomial(1)).unwrap()
    }

    fn cardioid_r() -> RationalFunction {
        RationalFunction::from_parts(
            &Polynomial::zero(),
            &[PrincipalPart { pole: c(0.0), coeffs: vec![c(1.5), c(0.5)] }],
        )
    }

    #[test]
    fn evaluation() {
        assert_eq!(inv_z().eval_at(c(2.0)), ExtComplex::Finite(c(0.5)));
        assert_eq!(inv_z().eval_at(c(0.0)), ExtComplex::Infinity);
        assert_eq!(inv_z().at_infinity(), ExtComplex::Finite(c(0.0)));
        // 3/(2z) + 1/(2z^2) at 1 = 2
        let v = cardioid_r().eval_at(c(1.0)).finite().unwrap();
        assert!((v - 2.0).norm() < 1e-15);
        let z2 = RationalFunction::from_poly(Polynomial::monomial(2));
        assert_eq!(z2.at_infinity(), ExtComplex::Infinity);
    }

    #[test]
    fn cancellation() {
        // (z^2 - 1)/(z - 1) = z + 1
        let f = RationalFunction::new(
            Polynomial::from_real(&[-1.0, 0.0, 1.0]),
            Polynomial::from_real(&[-1.0, 1.0]),
        )
        .unwrap();
        assert!(f.is_polynomial());
        assert_eq!(f.degree(), 1);
        assert!((f.value(c(3.0)) - 4.0).norm() < 1e-12);
    }

    #[test]
    fn derivatives() {
        let d = inv_z().derivative();
        assert_eq!(d.poles(), &[(c(0.0), 2)]);
        assert!((d.value(c(2.0)) + 0.25).norm() < 1e-15);

        let z2 = RationalFunction::from_poly(Polynomial::monomial(2)).derivative();
        assert_eq!(z2.num(), &Polynomial::from_real(&[0.0, 2.0]));

        // d/dz (3/(2z) + 1/(2z^2)) = -3/(2z^2) - 1/z^3
        let d = cardioid_r().derivative();
        let z = C64::new(0.7, -0.3);
        let want = -1.5 / (z * z) - 1.0 / (z * z * z);
        assert!((d.value(z) - want).norm() < 1e-13);
        let parts = d.principal_parts();
        assert_eq!(parts.len(), 1);
        let b = &parts[0].coeffs;
        assert!(b[0].norm() < 1e-14 && (b[1] + 1.5).norm() < 1e-14 && (b[2] + 1.0).norm() < 1e-14);
    }

    #[test]
    fn critical_points_of_square() {
        let z2 = RationalFunction::from_poly(Polynomial::monomial(2));
        let cp = z2.critical_points().unwrap();
        assert_eq!(cp.len(), 2);
        assert!(cp.contains(&(ExtComplex::Finite(c(0.0)), 1)));
        assert!(cp.contains(&(ExtComplex::Infinity, 1)));
    }

    #[test]
    fn critical_points_of_joukowsky() {
        let f = RationalFunction::new(Polynomial::from_real(&[1.0, 0.0, 1.0]), Polynomial::monomial(1))
            .unwrap();
        let cp = f.critical_points().unwrap();
        assert_eq!(cp.iter().map(|x| x.1).sum::<usize>(), 2);
        for target in [1.0, -1.0] {
            assert!(cp.iter().any(|(z, _)| z.finite().is_some_and(|z| (z - target).norm() < 1e-12)));
        }
    }

    #[test]
    fn critical_points_cubic_total() {
        let f = RationalFunction::new(
            Polynomial::from_real(&[1.0, -2.0, 0.0, 3.0]),
            Polynomial::from_real(&[0.5, 1.0, 1.0]),
        )
        .unwrap();
        assert_eq!(f.degree(), 3);
        let total: usize = f.critical_points().unwrap().iter().map(|x| x.1).sum();
        assert_eq!(total, 4);
    }

    #[test]
    fn sum_of_rationals() {
        let f = inv_z().add(&RationalFunction::from_poly(Polynomial::monomial(1)));
        assert!((f.value(c(2.0)) - 2.5).norm() < 1e-15);
        assert_eq!(f.degree(), 2);
    }

    #[test]
    fn json_roundtrip() {
        let f = cardioid_r();
        let s = serde_json::to_string(&f).unwrap();
        let g: RationalFunction = serde_json::from_str(&s).unwrap();
        let z = C64::new(0.3, 0.4);
        assert!((f.value(z) - g.value(z)).norm() < 1e-12);
    }
}
