use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;

use super::modes::{CurrentAlgebra, Mode, Site};
use crate::error::{Error, Result};
use crate::linalg::{C64, ZERO};

/// An element of degree at most 2 of the enveloping algebra of the
/// truncated current algebra, in PBW normal form.
///
/// Quadratic keys `(a, b)` always satisfy `a ≤ b` in the mode order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct UElement {
    pub constant: C64,
    pub linear: BTreeMap<Mode, C64>,
    pub quadratic: BTreeMap<(Mode, Mode), C64>,
}

impl UElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn scalar(value: C64) -> Self {
        UElement {
            constant: value,
            ..Self::default()
        }
    }

    pub fn one() -> Self {
        Self::scalar(C64::new(1.0, 0.0))
    }

    pub fn mode(m: Mode, coef: C64) -> Self {
        let mut e = Self::zero();
        e.linear.insert(m, coef);
        e
    }

    pub fn degree(&self) -> usize {
        if self.quadratic.values().any(|v| *v != ZERO) {
            2
        } else if self.linear.values().any(|v| *v != ZERO) {
            1
        } else {
            0
        }
    }

    pub fn add_constant(&mut self, v: C64) {
        self.constant += v;
    }

    pub fn add_linear(&mut self, m: Mode, v: C64) {
        *self.linear.entry(m).or_insert(ZERO) += v;
    }

    /// Adds `v · a · b`, straightening into normal order.
    pub fn add_product(&mut self, a: Mode, b: Mode, v: C64, alg: &CurrentAlgebra) {
        if a <= b {
            *self.quadratic.entry((a, b)).or_insert(ZERO) += v;
        } else {
            *self.quadratic.entry((b, a)).or_insert(ZERO) += v;
            for (m, s) in alg.bracket(&a, &b) {
                self.add_linear(m, v * s);
            }
        }
    }

    /// Adds `coef · Σ_b Σ_c tensor[b, c] · e_b[p₁]_{s₁} · e_c[p₂]_{s₂}`.
    ///
    /// Terms outside the truncation are dropped.
    pub fn add_tensor(
        &mut self,
        first: (Site, i64),
        second: (Site, i64),
        tensor: &DMatrix<C64>,
        coef: C64,
        alg: &CurrentAlgebra,
    ) {
        if coef == ZERO || !alg.contains(first.0, first.1) || !alg.contains(second.0, second.1) {
            return;
        }
        for b in 0..tensor.nrows() {
            for c in 0..tensor.ncols() {
                let t = tensor[(b, c)];
                if t != ZERO {
                    self.add_product(
                        Mode::new(first.0, first.1, b),
                        Mode::new(second.0, second.1, c),
                        coef * t,
                        alg,
                    );
                }
            }
        }
    }

    /// Adds `coef · X[p]_s` for a vector X, if the mode survives truncation.
    pub fn add_vector(
        &mut self,
        site: Site,
        power: i64,
        x: &nalgebra::DVector<C64>,
        coef: C64,
        alg: &CurrentAlgebra,
    ) {
        if coef == ZERO || !alg.contains(site, power) {
            return;
        }
        for (b, v) in x.iter().enumerate() {
            if *v != ZERO {
                self.add_linear(Mode::new(site, power, b), coef * v);
            }
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        UElement {
            constant: self.constant * s,
            linear: self.linear.iter().map(|(k, v)| (*k, v * s)).collect(),
            quadratic: self.quadratic.iter().map(|(k, v)| (*k, v * s)).collect(),
        }
    }

    pub fn add_assign(&mut self, other: &UElement) {
        self.constant += other.constant;
        for (k, v) in &other.linear {
            *self.linear.entry(*k).or_insert(ZERO) += v;
        }
        for (k, v) in &other.quadratic {
            *self.quadratic.entry(*k).or_insert(ZERO) += v;
        }
    }

    /// Normal-ordered product. The combined degree must not exceed 2.
    pub fn product(&self, other: &UElement, alg: &CurrentAlgebra) -> Result<UElement> {
        let (da, db) = (self.degree(), other.degree());
        if da + db > 2 {
            return Err(Error::Degree(da + db));
        }
        let mut out = UElement::scalar(self.constant * other.constant);
        for (k, v) in &other.linear {
            out.add_linear(*k, self.constant * v);
        }
        for (k, v) in &self.linear {
            out.add_linear(*k, other.constant * v);
        }
        for (k, v) in &other.quadratic {
            *out.quadratic.entry(*k).or_insert(ZERO) += self.constant * v;
        }
        for (k, v) in &self.quadratic {
            *out.quadratic.entry(*k).or_insert(ZERO) += other.constant * v;
        }
        for (a, va) in &self.linear {
            for (b, vb) in &other.linear {
                out.add_product(*a, *b, va * vb, alg);
            }
        }
        out.prune();
        Ok(out)
    }

    /// Drops entries whose coefficient is exactly zero.
    pub fn prune(&mut self) {
        self.linear.retain(|_, v| *v != ZERO);
        self.quadratic.retain(|_, v| *v != ZERO);
    }

    /// Largest coefficient modulus.
    pub fn max_coefficient(&self) -> f64 {
        let mut m = self.constant.norm();
        for v in self.linear.values().chain(self.quadratic.values()) {
            m = m.max(v.norm());
        }
        m
    }

    /// Whether any mode at this site appears.
    pub fn touches(&self, site: Site) -> bool {
        self.linear
            .keys()
            .any(|m| m.site == site && self.linear[m] != ZERO)
            || self
                .quadratic
                .iter()
                .any(|((a, b), v)| *v != ZERO && (a.site == site || b.site == site))
    }

    /// Every mode with a nonzero coefficient.
    pub fn modes(&self) -> Vec<Mode> {
        let mut out: Vec<Mode> = Vec::new();
        for (m, v) in &self.linear {
            if *v != ZERO {
                out.push(*m);
            }
        }
        for ((a, b), v) in &self.quadratic {
            if *v != ZERO {
                out.push(*a);
                out.push(*b);
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

impl Add for &UElement {
    type Output = UElement;
    fn add(self, rhs: &UElement) -> UElement {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }
}

impl Sub for &UElement {
    type Output = UElement;
    fn sub(self, rhs: &UElement) -> UElement {
        let mut out = self.clone();
        out.add_assign(&rhs.scale(C64::new(-1.0, 0.0)));
        out
    }
}

impl Neg for &UElement {
    type Output = UElement;
    fn neg(self) -> UElement {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul<C64> for &UElement {
    type Output = UElement;
    fn mul(self, rhs: C64) -> UElement {
        self.scale(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{Automorphism, Series, SimpleLieAlgebra};
    use crate::linalg::{c, ONE};
    use crate::takiff::Orders;

    fn alg() -> CurrentAlgebra {
        let g = SimpleLieAlgebra::new(Series::A, 1).unwrap();
        let s = Automorphism::identity(&g);
        CurrentAlgebra::new(
            g,
            s,
            vec![c(1.0), c(2.0)],
            Orders {
                n_inf: 2,
                n_sites: vec![2, 1],
                n0: 1,
            },
        )
        .unwrap()
    }

    #[test]
    fn unit_is_neutral() {
        let a = alg();
        let x = UElement::mode(Mode::new(Site::Point(0), 0, 1), c(2.0));
        assert_eq!(x.product(&UElement::one(), &a).unwrap(), x);
        assert_eq!(UElement::one().product(&x, &a).unwrap(), x);
    }

    #[test]
    fn single_swap() {
        let a = alg();
        // F·E = E·F − H at one site, since F > E in the basis order
        let e = Mode::new(Site::Point(0), 0, 1);
        let f = Mode::new(Site::Point(0), 0, 2);
        let p = UElement::mode(f, ONE)
            .product(&UElement::mode(e, ONE), &a)
            .unwrap();
        assert_eq!(p.quadratic[&(e, f)], ONE);
        assert_eq!(p.linear[&Mode::new(Site::Point(0), 0, 0)], c(-1.0));
        // different sites commute
        let e2 = Mode::new(Site::Point(1), 0, 1);
        let q = UElement::mode(e2, ONE)
            .product(&UElement::mode(f, ONE), &a)
            .unwrap();
        assert!(q.linear.is_empty());
        assert_eq!(q.quadratic[&(f, e2)], ONE);
    }

    #[test]
    fn degree_overflow() {
        let a = alg();
        let e = UElement::mode(Mode::new(Site::Point(0), 0, 1), ONE);
        let ee = e.product(&e, &a).unwrap();
        assert!(matches!(ee.product(&e, &a), Err(Error::Degree(3))));
    }

    #[test]
    fn straightening_is_idempotent() {
        let a = alg();
        let h = Mode::new(Site::Point(0), 0, 0);
        let f = Mode::new(Site::Point(0), 1, 2);
        let x = UElement::mode(f, ONE)
            .product(&UElement::mode(h, ONE), &a)
            .unwrap();
        let again = x.product(&UElement::one(), &a).unwrap();
        assert_eq!(x, again);
        // [F[1], H[0]] = 2F[1]
        assert_eq!(x.linear[&f], c(2.0));
    }
}
