//! The quadratic Hamiltonians at orders `(2, (1, …, 1), 1)` after the
//! χ-substitution at infinity, their matrices on weight blocks, and the
//! commutativity and invariance checks.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::{casimir_tensor, Automorphism, DualBasisPair, SimpleLieAlgebra, Weight};
use crate::linalg::{c, max_abs, null_space, GVec, MaxNorm, C64, ONE, ZERO};
use crate::rep::{BlockOperator, RealizedElement, State, TensorModule, WeightBlock};
use crate::takiff::{CurrentAlgebra, Mode, Orders, Site, UElement};

/// A twist `χ ∈ h*` with `L_σχ = ωχ`, extended by zero on `n` and `n⁻`.
#[derive(Debug, Clone)]
pub struct ChiForm {
    weight: Weight,
    values: GVec,
}

impl ChiForm {
    pub fn new(g: &SimpleLieAlgebra, sigma: &Automorphism, chi: Weight, tol: f64) -> Result<Self> {
        let resid = sigma.chi_residual(&chi);
        if resid > tol * (1.0 + chi.max_abs()) {
            return Err(Error::config(
                "chi",
                format!("L_σχ ≠ ωχ (residual {resid:.3e})"),
            ));
        }
        let mut values = GVec::zeros(g.dim());
        for i in 0..g.rank() {
            values[g.cartan_index(i)] = g.on_coroot(&chi, i);
        }
        Ok(ChiForm {
            weight: chi,
            values,
        })
    }

    pub fn zero(g: &SimpleLieAlgebra) -> Self {
        ChiForm {
            weight: Weight::zero(g.rank()),
            values: GVec::zeros(g.dim()),
        }
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == ZERO)
    }

    /// `χ(x)` for `x` in Cartan–Weyl coordinates.
    pub fn eval(&self, x: &GVec) -> C64 {
        self.values.dot(x)
    }

    /// `max |χ(Π_k x)|` over basis vectors and `k ≢ −1`; zero for admissible χ.
    pub fn leakage(&self, sigma: &Automorphism) -> f64 {
        let t = sigma.order() as i64;
        let d = self.values.len();
        let mut worst: f64 = 0.0;
        for k in 0..t {
            if (k + 1).rem_euclid(t) == 0 {
                continue;
            }
            for b in 0..d {
                let x = sigma.projector(k).column(b).into_owned();
                worst = worst.max(self.eval(&x).norm());
            }
        }
        worst
    }
}

/// Replaces every `X[−1]_∞` by `χ(X)`.
///
/// Infinity modes sort first, so each quadratic term has them on the left and
/// the substitution is a left multiplication by a scalar.
pub fn chi_substitute(e: &UElement, chi: &ChiForm) -> Result<UElement> {
    let basis = |m: &Mode| -> Result<C64> {
        if m.power != -1 {
            return Err(Error::Unrealizable(format!(
                "χ-substitution needs n_∞ = 2, found power {} at infinity",
                m.power
            )));
        }
        Ok(chi.values[m.index])
    };
    let mut out = UElement::scalar(e.constant);
    for (m, v) in &e.linear {
        if m.site == Site::Infinity {
            out.constant += v * basis(m)?;
        } else {
            out.add_linear(*m, *v);
        }
    }
    for ((a, b), v) in &e.quadratic {
        match (a.site == Site::Infinity, b.site == Site::Infinity) {
            (true, true) => out.constant += v * basis(a)? * basis(b)?,
            (true, false) => out.add_linear(*b, v * basis(a)?),
            (false, true) => out.add_linear(*a, v * basis(b)?),
            (false, false) => *out.quadratic.entry((*a, *b)).or_insert(ZERO) += v,
        }
    }
    out.prune();
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HamiltonianKind {
    Site { point: usize, power: i64 },
    Origin { power: i64 },
    Infinity { power: i64 },
}

#[derive(Debug, Clone)]
pub struct Hamiltonian {
    pub label: String,
    pub kind: HamiltonianKind,
    pub element: UElement,
}

/// `H_{i,0}`, `H_{i,1}`, `H_{0,0}`, `H_{0,1}` and `H_{∞,0}` for a twist χ.
#[derive(Debug, Clone)]
pub struct HamiltonianSet {
    pub algebra: CurrentAlgebra,
    pub chi: ChiForm,
    pub items: Vec<Hamiltonian>,
}

fn chop(m: &mut DMatrix<C64>) {
    let scale = m.max_norm();
    for v in m.iter_mut() {
        if v.norm() <= 1e-14 * scale {
            *v = ZERO;
        }
    }
}

struct Builder<'a> {
    alg: &'a CurrentAlgebra,
    duals: DualBasisPair,
    chi: &'a ChiForm,
}

impl Builder<'_> {
    fn t(&self) -> f64 {
        self.alg.t()
    }

    fn id(&self) -> DMatrix<C64> {
        DMatrix::identity(self.alg.g.dim(), self.alg.g.dim())
    }

    /// `Π_k ⊗ Π_l` applied to the Casimir vanishes unless `k + l ≡ 0`.
    fn structural_zero(&self, k: i64, l: i64) -> bool {
        (k + l).rem_euclid(self.alg.order() as i64) != 0
    }

    fn casimir(
        &self,
        out: &mut UElement,
        coef: C64,
        first: Site,
        m1: &DMatrix<C64>,
        second: Site,
        m2: &DMatrix<C64>,
    ) {
        let mut tensor = casimir_tensor(&self.alg.g, m1, m2);
        chop(&mut tensor);
        out.add_tensor((first, 0), (second, 0), &tensor, coef, self.alg);
    }

    /// `Σ_a χ(A I_a) B I^a`.
    fn chi_contract(&self, a: &DMatrix<C64>, b: &DMatrix<C64>) -> GVec {
        let mut v = GVec::zeros(self.alg.g.dim());
        for (lower, upper) in self.duals.lower.iter().zip(&self.duals.upper) {
            let w = self.chi.eval(&(a * lower));
            if w != ZERO {
                v += b * upper * w;
            }
        }
        v
    }

    fn site_zero(&self, i: usize) -> UElement {
        let alg = self.alg;
        let t = self.t();
        let zi = alg.points[i];
        let mut out = UElement::zero();
        let here = Site::Point(i);
        for (j, zj) in alg.points.iter().enumerate() {
            if j == i {
                continue;
            }
            for l in 0..alg.order() as i64 {
                let coef = ONE / (zi - alg.sigma.omega_pow(-l) * zj);
                self.casimir(
                    &mut out,
                    coef,
                    here,
                    &self.id(),
                    Site::Point(j),
                    alg.sigma.power(l),
                );
            }
        }
        for l in 1..alg.order() as i64 {
            let coef = ONE / ((ONE - alg.sigma.omega_pow(-l)) * zi);
            self.casimir(&mut out, coef, here, alg.sigma.power(l), here, &self.id());
        }
        self.casimir(
            &mut out,
            c(t) / zi,
            here,
            &self.id(),
            Site::Origin,
            alg.sigma.projector(0),
        );
        let v = self.chi_contract(alg.sigma.projector(-1), &self.id());
        out.add_vector(here, 0, &v, c(t), alg);
        out.prune();
        out
    }

    fn site_one(&self, i: usize) -> UElement {
        let mut out = UElement::zero();
        let here = Site::Point(i);
        self.casimir(&mut out, c(0.5), here, &self.id(), here, &self.id());
        out.prune();
        out
    }

    fn origin_zero(&self) -> UElement {
        let alg = self.alg;
        let t2 = self.t() * self.t();
        let mut out = UElement::zero();
        if self.structural_zero(-1, 0) {
            return out;
        }
        for (i, zi) in alg.points.iter().enumerate() {
            self.casimir(
                &mut out,
                c(-t2) / zi,
                Site::Point(i),
                alg.sigma.projector(-1),
                Site::Origin,
                alg.sigma.projector(0),
            );
        }
        let v = self.chi_contract(alg.sigma.projector(-1), alg.sigma.projector(0));
        out.add_vector(Site::Origin, 0, &v, c(t2), alg);
        out.prune();
        out
    }

    fn origin_one(&self) -> UElement {
        let alg = self.alg;
        let t = self.t();
        let mut out = UElement::zero();
        let p0 = alg.sigma.projector(0);
        self.casimir(&mut out, c(0.5 * t * t), Site::Origin, p0, Site::Origin, p0);
        out.add_vector(Site::Origin, 0, &alg.f, c(t), alg);
        out.prune();
        out
    }

    fn infinity_zero(&self) -> UElement {
        let mut out = UElement::zero();
        if self.structural_zero(-1, -1) {
            return out;
        }
        let pm = self.alg.sigma.projector(-1);
        let v = self.chi_contract(pm, pm);
        out.add_constant(self.chi.eval(&v) * (0.5 * self.t() * self.t()));
        out
    }
}

impl HamiltonianSet {
    /// Builds the Hamiltonians from their closed forms. The underlying current
    /// algebra has orders `(2, (1, …, 1), 1)`.
    pub fn build(
        g: &SimpleLieAlgebra,
        sigma: &Automorphism,
        points: Vec<C64>,
        chi: ChiForm,
    ) -> Result<Self> {
        let n = points.len();
        let algebra = CurrentAlgebra::new(g.clone(), sigma.clone(), points, Orders::regular(2, n))?;
        let b = Builder {
            alg: &algebra,
            duals: DualBasisPair::new(g),
            chi: &chi,
        };
        let mut items = Vec::new();
        for i in 0..n {
            items.push(Hamiltonian {
                label: format!("H[{},0]", i + 1),
                kind: HamiltonianKind::Site { point: i, power: 0 },
                element: b.site_zero(i),
            });
        }
        for i in 0..n {
            items.push(Hamiltonian {
                label: format!("H[{},1]", i + 1),
                kind: HamiltonianKind::Site { point: i, power: 1 },
                element: b.site_one(i),
            });
        }
        items.push(Hamiltonian {
            label: "H[0,0]".into(),
            kind: HamiltonianKind::Origin { power: 0 },
            element: b.origin_zero(),
        });
        items.push(Hamiltonian {
            label: "H[0,1]".into(),
            kind: HamiltonianKind::Origin { power: 1 },
            element: b.origin_one(),
        });
        items.push(Hamiltonian {
            label: "H[inf,0]".into(),
            kind: HamiltonianKind::Infinity { power: 0 },
            element: b.infinity_zero(),
        });
        drop(b);
        Ok(HamiltonianSet {
            algebra,
            chi,
            items,
        })
    }

    pub fn get(&self, kind: HamiltonianKind) -> Option<&Hamiltonian> {
        self.items.iter().find(|h| h.kind == kind)
    }

    /// The same Hamiltonian obtained by χ-substituting the general
    /// partial-fraction coefficient of the Segal–Sugawara element.
    pub fn from_series(&self, kind: HamiltonianKind) -> Result<UElement> {
        let e = match kind {
            HamiltonianKind::Site { point, power } => self.algebra.h_site(point, power),
            HamiltonianKind::Origin { power } => self.algebra.h_origin(power),
            HamiltonianKind::Infinity { power } => self.algebra.h_infinity(power),
        };
        chi_substitute(&e, &self.chi)
    }

    /// `max |coefficient difference| / (1 + max coefficient)` between the
    /// closed forms and the χ-substituted series coefficients.
    pub fn cross_check(&self) -> Result<Vec<(String, f64)>> {
        self.items
            .iter()
            .map(|h| {
                let other = self.from_series(h.kind)?;
                let diff = &h.element - &other;
                let scale = 1.0 + h.element.max_coefficient().max(other.max_coefficient());
                Ok((h.label.clone(), diff.max_coefficient() / scale))
            })
            .collect()
    }

    /// Basis of `g^σ_χ = {X ∈ g^σ : χ([X, Y]) = 0 for Y ∈ Π₋₁g}`.
    pub fn centralizer(&self) -> Vec<GVec> {
        let g = &self.algebra.g;
        let sigma = &self.algebra.sigma;
        let fixed: Vec<GVec> = sigma.eigenspace_basis(0);
        let minus: Vec<GVec> = sigma.eigenspace_basis(-1);
        if fixed.is_empty() {
            return Vec::new();
        }
        if minus.is_empty() || self.chi.is_zero() {
            return fixed;
        }
        let m = DMatrix::from_fn(minus.len(), fixed.len(), |r, col| {
            self.chi.eval(&g.bracket(&fixed[col], &minus[r]))
        });
        let b = DMatrix::from_columns(&fixed);
        null_space(&m, 1e-10).into_iter().map(|v| &b * v).collect()
    }
}

/// Matrices of every Hamiltonian on one block.
pub fn block_operators(
    set: &HamiltonianSet,
    module: &TensorModule,
    block: &WeightBlock,
) -> Result<Vec<BlockOperator>> {
    set.items
        .iter()
        .map(|h| module.realize_uelement(&h.element, block))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct PairResidual {
    pub first: String,
    pub second: String,
    pub class: Vec<i64>,
    pub dim: usize,
    pub residual: f64,
}

/// `‖PQ − QP‖ / (1 + ‖P‖‖Q‖)` for every pair and block, max-entry norm.
pub fn check_commutativity(
    set: &HamiltonianSet,
    module: &TensorModule,
    blocks: &[WeightBlock],
) -> Result<Vec<PairResidual>> {
    let per_block: Vec<Result<Vec<PairResidual>>> = blocks
        .par_iter()
        .map(|block| {
            let ops = block_operators(set, module, block)?;
            let mut out = Vec::new();
            for a in 0..ops.len() {
                for b in a + 1..ops.len() {
                    let (p, q) = (&ops[a].matrix, &ops[b].matrix);
                    let comm = p * q - q * p;
                    out.push(PairResidual {
                        first: set.items[a].label.clone(),
                        second: set.items[b].label.clone(),
                        class: block.class.clone(),
                        dim: block.dim(),
                        residual: max_abs(&comm) / (1.0 + max_abs(p) * max_abs(q)),
                    });
                }
            }
            Ok(out)
        })
        .collect();
    let mut out = Vec::new();
    for r in per_block {
        out.extend(r?);
    }
    Ok(out)
}

fn state_norm(s: &State) -> f64 {
    s.values().fold(0.0, |m: f64, v| m.max(v.norm()))
}

fn difference(a: &State, b: &State) -> State {
    let mut out = a.clone();
    for (k, v) in b {
        *out.entry(k.clone()).or_insert(ZERO) -= v;
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct InvarianceResidual {
    pub hamiltonian: String,
    pub generator: usize,
    pub class: Vec<i64>,
    pub residual: f64,
}

/// `max ‖[H, Δ(X)] v‖ / (1 + ‖H Δ(X) v‖ + ‖Δ(X) H v‖)` over basis vectors v
/// of each block, for X in a basis of `g^σ_χ`.
pub fn check_invariance(
    set: &HamiltonianSet,
    module: &TensorModule,
    blocks: &[WeightBlock],
) -> Result<Vec<InvarianceResidual>> {
    let generators = set.centralizer();
    let realized: Vec<RealizedElement> = set
        .items
        .iter()
        .map(|h| module.realize(&h.element))
        .collect::<Result<_>>()?;
    let mut jobs: Vec<(usize, usize, usize)> = Vec::new();
    for b in 0..blocks.len() {
        for h in 0..realized.len() {
            for x in 0..generators.len() {
                jobs.push((b, h, x));
            }
        }
    }
    jobs.par_iter()
        .map(|&(b, h, x)| {
            let block = &blocks[b];
            let mut worst: f64 = 0.0;
            for key in &block.keys {
                let mut s = State::new();
                s.insert(key.clone(), ONE);
                let hx = module
                    .apply_realized(&realized[h], &module.apply_diagonal(&generators[x], &s)?);
                let xh = module
                    .apply_diagonal(&generators[x], &module.apply_realized(&realized[h], &s))?;
                let r =
                    state_norm(&difference(&hx, &xh)) / (1.0 + state_norm(&hx) + state_norm(&xh));
                worst = worst.max(r);
            }
            Ok(InvarianceResidual {
                hamiltonian: set.items[h].label.clone(),
                generator: x,
                class: block.class.clone(),
                residual: worst,
            })
        })
        .collect()
}
