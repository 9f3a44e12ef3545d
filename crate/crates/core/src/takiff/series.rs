//! The current `A(u)`, the quadratic Segal–Sugawara element `S(u)` and its
//! partial-fraction decomposition into the Hamiltonians `H_{i,p}`,
//! `H_{0,p}`, `H_{∞,p}`.

use nalgebra::DMatrix;

use super::modes::{CurrentAlgebra, Site};
use super::uelement::UElement;
use crate::error::{Error, Result};
use crate::lie::casimir_tensor;
use crate::linalg::{binom, c, GVec, C64, ONE, ZERO};

/// The linear map applied to `I_a` or `I^a` inside a Casimir sum.
#[derive(Debug, Clone, Copy)]
enum Factor {
    Id,
    Sigma(i64),
    Proj(i64),
}

/// One `(site, power)` block of `A(u)`: the coefficient vector of
/// `X[power]_site` is `matrix · X`.
struct CurrentBlock {
    site: Site,
    power: i64,
    matrix: DMatrix<C64>,
}

impl CurrentAlgebra {
    /// Rejects spectral parameters on `Γz ∪ {0}`.
    pub fn check_regular(&self, u: C64) -> Result<()> {
        let scale = self.points.iter().fold(1.0, |m: f64, z| m.max(z.norm()));
        if u.norm() <= 1e-12 * scale {
            return Err(Error::Pole("u = 0".into()));
        }
        for (i, z) in self.points.iter().enumerate() {
            for k in 0..self.order() as i64 {
                if (u - self.sigma.omega_pow(-k) * z).norm() <= 1e-12 * scale {
                    return Err(Error::Pole(format!("u = ω^{} z[{i}]", -k)));
                }
            }
        }
        Ok(())
    }

    fn current_blocks(&self, u: C64) -> Vec<CurrentBlock> {
        let d = self.g.dim();
        let t = self.t();
        let mut out = Vec::new();
        for n in (0..self.orders.n_inf as i64 - 1).rev() {
            let power = -n - 1;
            out.push(CurrentBlock {
                site: Site::Infinity,
                power,
                matrix: self.sigma.projector(power) * c(t) * u.powi(n as i32),
            });
        }
        for (i, z) in self.points.iter().enumerate() {
            for n in 0..self.orders.n_sites[i] as i64 {
                let mut m = DMatrix::from_element(d, d, ZERO);
                for k in 0..self.order() as i64 {
                    let denom = (u - self.sigma.omega_pow(-k) * z).powi(n as i32 + 1);
                    m += self.sigma.power(k) * (self.sigma.omega_pow(-k * n) / denom);
                }
                out.push(CurrentBlock {
                    site: Site::Point(i),
                    power: n,
                    matrix: m,
                });
            }
        }
        for n in 0..self.orders.n0 as i64 {
            out.push(CurrentBlock {
                site: Site::Origin,
                power: n,
                matrix: self.sigma.projector(n) * (c(t) / u.powi(n as i32 + 1)),
            });
        }
        out
    }

    /// `A(u)` for `X ∈ g`, a degree-1 element.
    pub fn current(&self, x: &GVec, u: C64) -> Result<UElement> {
        self.check_regular(u)?;
        let mut out = UElement::zero();
        for b in self.current_blocks(u) {
            out.add_vector(b.site, b.power, &(&b.matrix * x), ONE, self);
        }
        Ok(out)
    }

    /// `S(u) = ½ Σ_a I_a(u) I^a(u) + F(u)/u + K/u²`.
    pub fn segal_sugawara(&self, u: C64) -> Result<UElement> {
        self.check_regular(u)?;
        let blocks = self.current_blocks(u);
        let mut out = UElement::zero();
        for left in &blocks {
            for right in &blocks {
                let mut tensor = casimir_tensor(&self.g, &left.matrix, &right.matrix);
                chop(&mut tensor);
                out.add_tensor(
                    (left.site, left.power),
                    (right.site, right.power),
                    &tensor,
                    c(0.5),
                    self,
                );
            }
        }
        let f_u = self.current(&self.f, u)?;
        out.add_assign(&f_u.scale(ONE / u));
        out.add_constant(self.k / (u * u));
        Ok(out)
    }

    fn factor_matrix(&self, f: Factor) -> DMatrix<C64> {
        match f {
            Factor::Id => DMatrix::identity(self.g.dim(), self.g.dim()),
            Factor::Sigma(l) => self.sigma.power(l).clone(),
            Factor::Proj(k) => self.sigma.projector(k).clone(),
        }
    }

    /// Adds `coef · Σ_a (M₁ I_a)[p₁]_{s₁} (M₂ I^a)[p₂]_{s₂}`.
    ///
    /// `Σ_a Π_k I_a ⊗ Π_l I^a` vanishes unless `k + l ≡ 0 mod T`; such
    /// terms are skipped so that structural zeros come out exactly zero.
    fn add_casimir(
        &self,
        out: &mut UElement,
        coef: C64,
        first: (Site, i64, Factor),
        second: (Site, i64, Factor),
    ) {
        if coef == ZERO || !self.contains(first.0, first.1) || !self.contains(second.0, second.1) {
            return;
        }
        if let (Factor::Proj(k), Factor::Proj(l)) = (first.2, second.2) {
            if (k + l).rem_euclid(self.order() as i64) != 0 {
                return;
            }
        }
        let mut tensor = self.factor_matrix(first.2)
            * &self.gram_inverse
            * self.factor_matrix(second.2).transpose();
        chop(&mut tensor);
        out.add_tensor(
            (first.0, first.1),
            (second.0, second.1),
            &tensor,
            coef,
            self,
        );
    }

    fn site_order(&self, i: usize) -> i64 {
        self.orders.n_sites[i] as i64
    }

    /// `H_{i,p}` for the marked point `z_i`.
    pub fn h_site(&self, i: usize, p: i64) -> UElement {
        let mut out = UElement::zero();
        let t = self.t();
        let zi = self.points[i];
        let ni = self.site_order(i);
        let here = Site::Point(i);

        // Other marked points.
        for (j, zj) in self.points.iter().enumerate() {
            if j == i {
                continue;
            }
            for l in 0..self.order() as i64 {
                let base = zi - self.sigma.omega_pow(-l) * zj;
                for n in 0..(ni - p).max(0) {
                    for m in 0..self.site_order(j) {
                        let coef = sign(n) * binom(n + m, m) * self.sigma.omega_pow(-l * m)
                            / base.powi((n + m + 1) as i32);
                        self.add_casimir(
                            &mut out,
                            coef,
                            (here, n + p, Factor::Id),
                            (Site::Point(j), m, Factor::Sigma(l)),
                        );
                    }
                }
            }
        }

        // Images of z_i under the nontrivial elements of Γ.
        for l in 1..self.order() as i64 {
            let base = (ONE - self.sigma.omega_pow(-l)) * zi;
            for r in 0..(ni - p).max(0) {
                for m in 0..ni {
                    let coef = self.sigma.omega_pow(-l * m) * sign(r) * binom(r + m, m)
                        / base.powi((r + m + 1) as i32)
                        * 0.5;
                    self.add_casimir(
                        &mut out,
                        coef,
                        (here, r + p, Factor::Id),
                        (here, m, Factor::Sigma(l)),
                    );
                    // other half of the anticommutator; the Casimir tensor is symmetric
                    self.add_casimir(
                        &mut out,
                        coef,
                        (here, m, Factor::Sigma(l)),
                        (here, r + p, Factor::Id),
                    );
                }
            }
        }

        // Same-point quadratic term.
        for n in 0..p {
            self.add_casimir(
                &mut out,
                c(0.5),
                (here, n, Factor::Id),
                (here, p - n - 1, Factor::Id),
            );
        }

        // Origin.
        for n in 0..(ni - p).max(0) {
            for m in 0..self.orders.n0 as i64 {
                let coef = c(t) * sign(n) * binom(n + m, m) / zi.powi((n + m + 1) as i32);
                self.add_casimir(
                    &mut out,
                    coef,
                    (here, n + p, Factor::Id),
                    (Site::Origin, m, Factor::Proj(m)),
                );
            }
        }

        // F.
        for n in 0..(ni - p).max(0) {
            let coef = sign(n) / zi.powi((n + 1) as i32);
            out.add_vector(here, n + p, &self.f, coef, self);
        }

        // Infinity.
        for q in 1..self.orders.n_inf as i64 {
            // q = n + m + 1
            for n in 0..q {
                let m = q - 1 - n;
                if p + m >= ni {
                    continue;
                }
                let coef = c(t) * zi.powi(n as i32) * binom(n + m, m);
                self.add_casimir(
                    &mut out,
                    coef,
                    (Site::Infinity, -q, Factor::Proj(-q)),
                    (here, p + m, Factor::Id),
                );
            }
        }
        out
    }

    /// `H_{0,p}` at the origin.
    pub fn h_origin(&self, p: i64) -> UElement {
        let mut out = UElement::zero();
        let t = self.t();
        let t2 = c(t * t);
        let n0 = self.orders.n0 as i64;

        // Marked points against the origin.
        for (i, zi) in self.points.iter().enumerate() {
            for n in 0..self.site_order(i) {
                for m in 0..(n0 - p).max(0) {
                    let coef = t2 * sign(n + 1) * binom(n + m, n) / zi.powi((n + m + 1) as i32);
                    self.add_casimir(
                        &mut out,
                        coef,
                        (Site::Point(i), n, Factor::Proj(-m - 1)),
                        (Site::Origin, m + p, Factor::Proj(m + p)),
                    );
                }
            }
        }

        // Origin against infinity.
        for n in p..n0 {
            let q = p - n - 1;
            self.add_casimir(
                &mut out,
                t2,
                (Site::Origin, n, Factor::Proj(n)),
                (Site::Infinity, q, Factor::Proj(q)),
            );
        }

        // Origin against itself.
        for n in 0..p {
            self.add_casimir(
                &mut out,
                t2 * 0.5,
                (Site::Origin, n, Factor::Proj(n)),
                (Site::Origin, p - n - 1, Factor::Proj(p - n - 1)),
            );
        }

        if p >= 1 {
            let pf = self.sigma.project(p - 1, &self.f);
            out.add_vector(Site::Origin, p - 1, &pf, c(t), self);
        }
        out
    }

    /// `H_{∞,p}` at infinity.
    pub fn h_infinity(&self, p: i64) -> UElement {
        let mut out = UElement::zero();
        let t = self.t();
        let t2 = c(t * t);
        let ninf = self.orders.n_inf as i64;

        for (i, zi) in self.points.iter().enumerate() {
            for m in 0..ninf - 1 {
                for n in 0..self.site_order(i) {
                    let b = binom(m - 1 - p, n);
                    if b == 0.0 {
                        continue;
                    }
                    let coef = t2 * b * zi.powi((m - n - 1 - p) as i32);
                    self.add_casimir(
                        &mut out,
                        coef,
                        (Site::Infinity, -m - 1, Factor::Proj(-m - 1)),
                        (Site::Point(i), n, Factor::Proj(m - p - 1)),
                    );
                }
            }
        }

        for n in 0..self.orders.n0 as i64 {
            let q = -p - n - 2;
            self.add_casimir(
                &mut out,
                t2,
                (Site::Origin, n, Factor::Proj(n)),
                (Site::Infinity, q, Factor::Proj(q)),
            );
        }

        for n in 0..=p {
            let (a, b) = (-n - 1, -p + n - 1);
            self.add_casimir(
                &mut out,
                t2 * 0.5,
                (Site::Infinity, a, Factor::Proj(a)),
                (Site::Infinity, b, Factor::Proj(b)),
            );
        }

        let pf = self.sigma.project(-p - 2, &self.f);
        out.add_vector(Site::Infinity, -p - 2, &pf, c(t), self);
        out
    }

    /// Largest `p` for which `H_{i,p}` can be nonzero.
    pub fn max_site_power(&self, i: usize) -> i64 {
        2 * self.site_order(i) - 1
    }

    pub fn max_origin_power(&self) -> i64 {
        2 * self.orders.n0 as i64 - 1
    }

    pub fn max_infinity_power(&self) -> i64 {
        (2 * self.orders.n_inf as i64 - 4).max(0)
    }

    /// `K/u² + Σ_{i,k,p} ω^{−kp+k} H_{i,p}/(u − ω^{−k}z_i)^{p+1}
    /// + Σ_{p ≡ 1} H_{0,p}/u^{p+1} + Σ_{p ≡ −2} u^p H_{∞,p}`.
    pub fn partial_fraction_sum(&self, u: C64) -> Result<UElement> {
        self.check_regular(u)?;
        let t = self.order() as i64;
        let mut out = UElement::scalar(self.k / (u * u));
        for (i, zi) in self.points.iter().enumerate() {
            for p in 0..=self.max_site_power(i) {
                let h = self.h_site(i, p);
                let mut weight = ZERO;
                for k in 0..t {
                    weight += self.sigma.omega_pow(-k * p + k)
                        / (u - self.sigma.omega_pow(-k) * zi).powi((p + 1) as i32);
                }
                out.add_assign(&h.scale(weight));
            }
        }
        for p in 0..=self.max_origin_power() {
            if (p - 1).rem_euclid(t) == 0 {
                out.add_assign(&self.h_origin(p).scale(ONE / u.powi((p + 1) as i32)));
            }
        }
        for p in 0..=self.max_infinity_power() {
            if (p + 2).rem_euclid(t) == 0 {
                out.add_assign(&self.h_infinity(p).scale(u.powi(p as i32)));
            }
        }
        Ok(out)
    }

    /// Coefficient-wise `max |S(u) − partial_fraction_sum(u)| / (1 + max |S(u)|)`.
    pub fn surat_residual(&self, u: C64) -> Result<f64> {
        let s = self.segal_sugawara(u)?;
        let pf = self.partial_fraction_sum(u)?;
        let diff = &s - &pf;
        Ok(diff.max_coefficient() / (1.0 + s.max_coefficient().max(pf.max_coefficient())))
    }
}

/// Zeroes entries that are rounding noise relative to the largest entry.
fn chop(m: &mut DMatrix<C64>) {
    let scale = m.iter().fold(0.0, |a: f64, z| a.max(z.norm()));
    for z in m.iter_mut() {
        if z.norm() <= 1e-14 * scale {
            *z = ZERO;
        }
    }
}

fn sign(n: i64) -> C64 {
    if n.rem_euclid(2) == 0 {
        ONE
    } else {
        -ONE
    }
}
