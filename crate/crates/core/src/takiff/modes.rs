use std::fmt;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::{critical_level, element_f, scalar_k, Automorphism, SimpleLieAlgebra};
use crate::linalg::{c, rank, GVec, C64};

/// Where a mode lives. The derived order puts infinity first, then the
/// marked points by index, then the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Site {
    Infinity,
    Point(usize),
    Origin,
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Site::Infinity => write!(f, "inf"),
            Site::Point(i) => write!(f, "z{}", i + 1),
            Site::Origin => write!(f, "0"),
        }
    }
}

/// `e_index[power]` at a site.
///
/// At the origin and at infinity the coefficient vector of a fixed
/// `(site, power)` must lie in `Π_{power mod T} g`; elements built by this
/// crate keep that invariant, so the Cartan–Weyl coordinates are unique.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Mode {
    pub site: Site,
    pub power: i64,
    pub index: usize,
}

impl Mode {
    pub fn new(site: Site, power: i64, index: usize) -> Self {
        Mode { site, power, index }
    }
}

/// Truncation orders `(n_∞, (n_{z_i}), n_0)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Orders {
    pub n_inf: usize,
    pub n_sites: Vec<usize>,
    pub n0: usize,
}

impl Orders {
    /// Orders `(n_∞, (1, …, 1), 1)` for `n` marked points.
    pub fn regular(n_inf: usize, n: usize) -> Self {
        Orders {
            n_inf,
            n_sites: vec![1; n],
            n0: 1,
        }
    }
}

/// The truncated, Γ-equivariant current algebra attached to marked points.
///
/// Also caches the data every series expansion needs: powers of σ, the
/// projectors, the inverse Gram matrix, F and the critical-level K.
#[derive(Debug, Clone)]
pub struct CurrentAlgebra {
    pub g: SimpleLieAlgebra,
    pub sigma: Automorphism,
    pub points: Vec<C64>,
    pub orders: Orders,
    pub f: GVec,
    pub k: C64,
    pub(crate) gram_inverse: DMatrix<C64>,
}

impl CurrentAlgebra {
    pub fn new(
        g: SimpleLieAlgebra,
        sigma: Automorphism,
        points: Vec<C64>,
        orders: Orders,
    ) -> Result<Self> {
        if orders.n_sites.len() != points.len() {
            return Err(Error::config(
                "truncation.n_sites",
                format!(
                    "{} orders for {} points",
                    orders.n_sites.len(),
                    points.len()
                ),
            ));
        }
        if orders.n_inf == 0 || orders.n0 == 0 || orders.n_sites.contains(&0) {
            return Err(Error::config("truncation", "all orders must be at least 1"));
        }
        check_orbits(&sigma, &points)?;
        let f = element_f(&g, &sigma);
        let k = scalar_k(&sigma, critical_level(&g));
        let gram_inverse = g.form_inverse().map(c);
        Ok(CurrentAlgebra {
            g,
            sigma,
            points,
            orders,
            f,
            k,
            gram_inverse,
        })
    }

    pub fn order(&self) -> usize {
        self.sigma.order()
    }

    pub fn t(&self) -> f64 {
        self.sigma.order() as f64
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    /// Whether `X[power]` survives the truncation at this site.
    pub fn contains(&self, site: Site, power: i64) -> bool {
        match site {
            Site::Point(i) => power >= 0 && power < self.orders.n_sites[i] as i64,
            Site::Origin => power >= 0 && power < self.orders.n0 as i64,
            Site::Infinity => power <= -1 && -power < self.orders.n_inf as i64,
        }
    }

    /// Bracket of two modes as a sparse combination of modes.
    ///
    /// Cross-site brackets vanish. At infinity the loop algebra is built on
    /// the opposite Lie algebra, so the bracket is `[Y, X]`.
    pub fn bracket(&self, a: &Mode, b: &Mode) -> Vec<(Mode, f64)> {
        if a.site != b.site {
            return Vec::new();
        }
        let power = a.power + b.power;
        if !self.contains(a.site, power) {
            return Vec::new();
        }
        let sign = if a.site == Site::Infinity { -1.0 } else { 1.0 };
        self.g
            .structure(a.index, b.index)
            .iter()
            .map(|&(idx, v)| (Mode::new(a.site, power, idx), sign * v))
            .collect()
    }

    /// Central cocycle `Ω(a, b)` of the loop algebra, evaluated on two modes.
    ///
    /// Only pairs at one site with opposite powers can contribute; on the
    /// truncated algebra the powers are never opposite and nonzero, so Ω
    /// vanishes there.
    pub fn cocycle(&self, a: &Mode, b: &Mode) -> f64 {
        if a.site != b.site || a.power + b.power != 0 {
            return 0.0;
        }
        let form = self.g.form_matrix()[(a.index, b.index)];
        let t = self.t();
        let pb = b.power as f64;
        match a.site {
            Site::Point(_) => pb * form,
            Site::Origin => pb * form / t,
            Site::Infinity => -pb * form / t,
        }
    }

    /// Dimension of the truncated algebra.
    pub fn dim(&self) -> usize {
        let d = self.g.dim();
        let eig = |k: i64| rank(self.sigma.projector(k), 1e-10);
        let sites: usize = self.orders.n_sites.iter().map(|n| n * d).sum();
        let origin: usize = (0..self.orders.n0 as i64).map(eig).sum();
        let inf: usize = (1..self.orders.n_inf as i64).map(|q| eig(-q)).sum();
        sites + origin + inf
    }

    /// All `(site, power)` blocks of the truncated algebra, in mode order.
    pub fn blocks(&self) -> Vec<(Site, i64)> {
        let mut out = Vec::new();
        for q in (1..self.orders.n_inf as i64).rev() {
            out.push((Site::Infinity, -q));
        }
        for (i, n) in self.orders.n_sites.iter().enumerate() {
            for p in 0..*n as i64 {
                out.push((Site::Point(i), p));
            }
        }
        for p in 0..self.orders.n0 as i64 {
            out.push((Site::Origin, p));
        }
        out
    }

    /// `max` residual of antisymmetry and Jacobi over all basis modes.
    ///
    /// At the origin and infinity the basis of each block is taken from the
    /// projector columns.
    /// Seeded points on an annulus, each at distance at least `0.1·gap` from 0
    /// and from every Γ-translate of a marked point, where `gap` is the
    /// smallest distance among those excluded points.
    pub fn sample_regular_points(&self, count: usize, seed: u64) -> Vec<C64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut forbidden = vec![c(0.0)];
        for z in &self.points {
            for k in 0..self.order() as i64 {
                forbidden.push(self.sigma.omega_pow(-k) * z);
            }
        }
        let mut gap = f64::INFINITY;
        for (i, a) in forbidden.iter().enumerate() {
            for b in &forbidden[i + 1..] {
                gap = gap.min((a - b).norm());
            }
        }
        if !gap.is_finite() {
            gap = 1.0;
        }
        let hi = self.points.iter().fold(1.0, |m: f64, z| m.max(z.norm())) * 1.5;
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let u = C64::from_polar(
                rng.gen_range(0.2..hi),
                rng.gen_range(0.0..std::f64::consts::TAU),
            );
            if forbidden.iter().all(|f| (u - f).norm() >= 0.1 * gap) {
                out.push(u);
            }
        }
        out
    }

    pub fn axiom_residual(&self) -> f64 {
        use std::collections::BTreeMap;
        let d = self.g.dim();
        let mut basis: Vec<BTreeMap<Mode, C64>> = Vec::new();
        for (site, p) in self.blocks() {
            let vectors: Vec<GVec> = match site {
                Site::Point(_) => (0..d).map(|b| self.g.basis_vector(b)).collect(),
                _ => self.sigma.eigenspace_basis(p),
            };
            for v in vectors {
                let mut m = BTreeMap::new();
                for b in 0..d {
                    if v[b] != C64::new(0.0, 0.0) {
                        m.insert(Mode::new(site, p, b), v[b]);
                    }
                }
                basis.push(m);
            }
        }
        let br = |x: &BTreeMap<Mode, C64>, y: &BTreeMap<Mode, C64>| {
            let mut out: BTreeMap<Mode, C64> = BTreeMap::new();
            for (ma, ca) in x {
                for (mb, cb) in y {
                    for (mc, v) in self.bracket(ma, mb) {
                        *out.entry(mc).or_default() += ca * cb * v;
                    }
                }
            }
            out
        };
        let add = |x: &mut BTreeMap<Mode, C64>, y: &BTreeMap<Mode, C64>| {
            for (m, v) in y {
                *x.entry(*m).or_default() += v;
            }
        };
        let size = |x: &BTreeMap<Mode, C64>| x.values().fold(0.0, |m: f64, v| m.max(v.norm()));
        let mut worst: f64 = 0.0;
        for x in &basis {
            for y in &basis {
                let mut anti = br(x, y);
                add(&mut anti, &br(y, x));
                worst = worst.max(size(&anti));
                for z in &basis {
                    let mut jac = br(&br(x, y), z);
                    add(&mut jac, &br(&br(y, z), x));
                    add(&mut jac, &br(&br(z, x), y));
                    worst = worst.max(size(&jac));
                }
            }
        }
        worst
    }
}

/// Rejects zero points and points with intersecting Γ-orbits.
pub(crate) fn check_orbits(sigma: &Automorphism, points: &[C64]) -> Result<()> {
    let scale = points.iter().fold(1.0, |m: f64, z| m.max(z.norm()));
    for (i, z) in points.iter().enumerate() {
        if z.norm() <= 1e-12 * scale {
            return Err(Error::config(
                format!("z[{i}]"),
                "marked points must be nonzero",
            ));
        }
        for (j, w) in points.iter().enumerate().skip(i + 1) {
            for k in 0..sigma.order() as i64 {
                if (z - sigma.omega_pow(k) * w).norm() <= 1e-10 * scale {
                    return Err(Error::config(
                        format!("z[{j}]"),
                        format!("Γ-orbit of z[{j}] meets the Γ-orbit of z[{i}]"),
                    ));
                }
            }
        }
    }
    Ok(())
}
