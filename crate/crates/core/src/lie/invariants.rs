//! Quantities derived from an algebra together with an automorphism:
//! dual bases, the element F, the scalar K and the weight Λ₀.

use nalgebra::DMatrix;

use super::algebra::{SimpleLieAlgebra, Weight};
use super::automorphism::Automorphism;
use crate::linalg::{c, GVec, C64, ONE, ZERO};

/// Dual bases `(I_a, I^a)` with `⟨I_a, I^b⟩ = δ_a^b`.
///
/// `I_a` is the a-th Cartan–Weyl basis vector and `I^a` the a-th column of the
/// inverse Gram matrix.
#[derive(Debug, Clone)]
pub struct DualBasisPair {
    pub lower: Vec<GVec>,
    pub upper: Vec<GVec>,
}

impl DualBasisPair {
    pub fn new(g: &SimpleLieAlgebra) -> Self {
        let dim = g.dim();
        let inv = g.form_inverse();
        DualBasisPair {
            lower: (0..dim).map(|a| g.basis_vector(a)).collect(),
            upper: (0..dim)
                .map(|a| GVec::from_fn(dim, |b, _| c(inv[(b, a)])))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    /// `max |⟨I_a, I^b⟩ − δ_ab|`.
    pub fn pairing_residual(&self, g: &SimpleLieAlgebra) -> f64 {
        let mut worst: f64 = 0.0;
        for (a, x) in self.lower.iter().enumerate() {
            for (b, y) in self.upper.iter().enumerate() {
                let expect = if a == b { ONE } else { ZERO };
                worst = worst.max((g.form(x, y) - expect).norm());
            }
        }
        worst
    }
}

/// Coefficient matrix of `Σ_a (M₁ I_a) ⊗ (M₂ I^a)` in the basis `e_b ⊗ e_c`.
pub fn casimir_tensor(
    g: &SimpleLieAlgebra,
    left: &DMatrix<C64>,
    right: &DMatrix<C64>,
) -> DMatrix<C64> {
    let inv = g.form_inverse().map(c);
    left * inv * right.transpose()
}

/// `F = ½ Σ_{p=1}^{T−1} ω^p [σ^p I^a, I_a] / (ω^p − 1)`.
pub fn element_f(g: &SimpleLieAlgebra, s: &Automorphism) -> GVec {
    let dim = g.dim();
    let duals = DualBasisPair::new(g);
    let mut out = GVec::from_element(dim, ZERO);
    for p in 1..s.order() as i64 {
        let w = s.omega_pow(p);
        let coef = w / (w - ONE) * 0.5;
        for a in 0..dim {
            let lhs = s.apply_power(p, &duals.upper[a]);
            out += g.bracket(&lhs, &duals.lower[a]) * coef;
        }
    }
    out
}

/// `K = ½ Σ_{p=1}^{T−1} ω^p ⟨σ^p I^a, I_a⟩ k / (ω^p − 1)²`.
///
/// `⟨σ^p I^a, I_a⟩` summed over a is the trace of `σ^p`.
pub fn scalar_k(s: &Automorphism, level: f64) -> C64 {
    let mut acc = ZERO;
    for p in 1..s.order() as i64 {
        let w = s.omega_pow(p);
        acc += w * s.power(p).trace() * level / ((w - ONE) * (w - ONE));
    }
    acc * 0.5
}

/// The critical level `−h∨`.
pub fn critical_level(g: &SimpleLieAlgebra) -> f64 {
    -g.dual_coxeter()
}

/// Λ₀ from traces: `Λ₀(h) = Σ_{r=1}^{T−1} tr_n(σ^{−r} ad_h) / (1 − ω^r)`.
pub fn lambda0_trace(g: &SimpleLieAlgebra, s: &Automorphism) -> Weight {
    let r = g.rank();
    let mut values = vec![ZERO; r];
    for (i, value) in values.iter_mut().enumerate() {
        let mut acc = ZERO;
        for k in 1..s.order() as i64 {
            let inv = s.power(-k);
            // ad_{H_i} is diagonal on root vectors, so tr_n(σ^{−k} ad_{H_i}) only sees diagonal entries.
            let mut tr = ZERO;
            for a in 0..g.num_positive_roots() {
                let e = g.e_index(a);
                let alpha_h: i64 = (0..r)
                    .map(|j| g.positive_roots()[a][j] * g.cartan()[i][j])
                    .sum();
                tr += inv[(e, e)] * alpha_h as f64;
            }
            acc += tr / (ONE - s.omega_pow(k));
        }
        *value = acc;
    }
    g.from_fundamental(&values).expect("rank matches")
}

/// Λ₀ from σ-fixed roots:
/// `Σ_{r=1}^{T−1} (1 − ω^r)⁻¹ Σ_{σ^r α = α} (Π_{p<r} τ_{σ^p α})⁻¹ α`.
pub fn lambda0_roots(g: &SimpleLieAlgebra, s: &Automorphism) -> Weight {
    let mut acc = Weight::zero(g.rank());
    for r in 1..s.order() {
        let prefactor = ONE / (ONE - s.omega_pow(r as i64));
        for a in 0..g.num_positive_roots() {
            let mut image = a;
            let mut prod = ONE;
            for _ in 0..r {
                prod *= s.tau()[image];
                image = s.root_perm()[image];
            }
            if image == a {
                acc = acc.add(&g.root_weight(a).scale(prefactor / prod));
            }
        }
    }
    acc
}
