use nalgebra::{DMatrix, DVector};

use super::algebra::{SimpleLieAlgebra, Weight};
use crate::error::{Error, Result};
use crate::linalg::{c, max_abs, GVec, MaxNorm, C64, ONE, ZERO};

/// Tolerance used to decide membership of `⟨ω⟩` and proportionality of root vectors.
const ROOT_TOL: f64 = 1e-10;

/// A finite-order automorphism of a simple Lie algebra that preserves the
/// chosen triangular decomposition.
///
/// On simple generators,
/// `σE_i = τ_i E_{π(i)}`, `σF_i = τ_i⁻¹ F_{π(i)}`, `σH_i = H_{π(i)}`,
/// and on the remaining root vectors σ is propagated through brackets.
#[derive(Debug, Clone)]
pub struct Automorphism {
    order: usize,
    omega: C64,
    perm: Vec<usize>,
    root_perm: Vec<usize>,
    tau: Vec<C64>,
    powers: Vec<DMatrix<C64>>,
    projectors: Vec<DMatrix<C64>>,
    dual_powers: Vec<DMatrix<C64>>,
}

/// The default primitive root `exp(2πi/T)`.
pub fn default_omega(order: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI / order as f64)
}

impl Automorphism {
    /// The identity automorphism with `T = 1`.
    pub fn identity(g: &SimpleLieAlgebra) -> Self {
        Self::new(
            g,
            &(0..g.rank()).collect::<Vec<_>>(),
            &vec![ONE; g.rank()],
            1,
            None,
        )
        .expect("identity is an automorphism")
    }

    /// Builds σ from a diagram permutation and the simple-root parameters `τ_i`.
    ///
    /// `omega` defaults to `exp(2πi/T)`; an override must be a primitive
    /// `T`-th root of unity. Every `τ_i` must be a power of ω.
    pub fn new(
        g: &SimpleLieAlgebra,
        perm: &[usize],
        tau_simple: &[C64],
        order: usize,
        omega: Option<C64>,
    ) -> Result<Self> {
        let r = g.rank();
        if order == 0 {
            return Err(Error::Automorphism("order T must be at least 1".into()));
        }
        if perm.len() != r || tau_simple.len() != r {
            return Err(Error::Automorphism(format!(
                "expected {r} entries for the diagram permutation and τ"
            )));
        }
        let mut seen = vec![false; r];
        for &p in perm {
            if p >= r || seen[p] {
                return Err(Error::Automorphism(format!(
                    "{perm:?} is not a permutation"
                )));
            }
            seen[p] = true;
        }
        let cartan = g.cartan();
        for i in 0..r {
            for j in 0..r {
                if cartan[perm[i]][perm[j]] != cartan[i][j] {
                    return Err(Error::Automorphism(format!(
                        "{perm:?} is not a Dynkin diagram symmetry"
                    )));
                }
            }
        }
        let omega = omega.unwrap_or_else(|| default_omega(order));
        if !is_primitive_root(omega, order) {
            return Err(Error::Automorphism(format!(
                "ω = {omega} is not a primitive root of unity of order {order}"
            )));
        }
        for (i, t) in tau_simple.iter().enumerate() {
            if omega_exponent(omega, order, *t).is_none() {
                return Err(Error::Automorphism(format!(
                    "τ for simple root {} is {t}, which is not a power of ω",
                    i + 1
                )));
            }
        }

        // Action on positive roots by the diagram permutation.
        let roots = g.positive_roots();
        let root_perm: Vec<usize> = roots
            .iter()
            .map(|root| {
                let mut image = vec![0; r];
                for i in 0..r {
                    image[perm[i]] += root[i];
                }
                g.root_index(&image)
                    .expect("diagram symmetries permute positive roots")
            })
            .collect();

        let dim = g.dim();
        let mut sigma = DMatrix::from_element(dim, dim, ZERO);
        for i in 0..r {
            sigma[(perm[i], i)] = ONE;
        }
        let mut images_e: Vec<GVec> = Vec::with_capacity(roots.len());
        let mut images_f: Vec<GVec> = Vec::with_capacity(roots.len());
        let mut tau = vec![ZERO; roots.len()];
        for (a, root) in roots.iter().enumerate() {
            let (img_e, img_f) = if g.height(a) == 1 {
                let i = root.iter().position(|&x| x == 1).unwrap();
                let t = tau_simple[i];
                let target = g.simple_root_index(perm[i]);
                (
                    g.basis_vector(g.e_index(target)) * t,
                    g.basis_vector(g.f_index(target)) * t.inv(),
                )
            } else {
                // α = β + α_i with β positive; [E_β, E_i] = N E_α.
                let (beta, i) = (0..r)
                    .find_map(|i| {
                        let mut b = root.clone();
                        b[i] -= 1;
                        g.root_index(&b).map(|beta| (beta, i))
                    })
                    .expect("non-simple positive roots decompose");
                let si = g.simple_root_index(i);
                let n_e = coefficient(g.structure(g.e_index(beta), g.e_index(si)), g.e_index(a));
                let n_f = coefficient(g.structure(g.f_index(beta), g.f_index(si)), g.f_index(a));
                (
                    g.bracket(&images_e[beta], &images_e[si]) / c(n_e),
                    g.bracket(&images_f[beta], &images_f[si]) / c(n_f),
                )
            };
            let target = root_perm[a];
            let t_e = proportionality(&img_e, g.e_index(target)).ok_or_else(|| {
                Error::Automorphism(format!(
                    "image of {} is not a multiple of a root vector",
                    g.basis_label(g.e_index(a))
                ))
            })?;
            let t_f = proportionality(&img_f, g.f_index(target)).ok_or_else(|| {
                Error::Automorphism(format!(
                    "image of {} is not a multiple of a root vector",
                    g.basis_label(g.f_index(a))
                ))
            })?;
            if (t_e * t_f - ONE).norm() > ROOT_TOL {
                return Err(Error::Automorphism(format!(
                    "inconsistent τ on root {}",
                    g.basis_label(g.e_index(a))
                )));
            }
            tau[a] = t_e;
            sigma[(g.e_index(target), g.e_index(a))] = t_e;
            sigma[(g.f_index(target), g.f_index(a))] = t_f;
            images_e.push(img_e);
            images_f.push(img_f);
        }

        let mut powers = vec![DMatrix::identity(dim, dim)];
        for m in 1..=order {
            let next = &sigma * &powers[m - 1];
            powers.push(next);
        }
        let id_residual = max_abs(&(powers[order].clone() - DMatrix::identity(dim, dim)));
        if id_residual > ROOT_TOL {
            return Err(Error::Automorphism(format!(
                "σ^{order} differs from the identity by {id_residual:.3e}; the order does not divide T"
            )));
        }
        powers.truncate(order);

        let projectors = (0..order)
            .map(|k| {
                let mut p = DMatrix::from_element(dim, dim, ZERO);
                for (m, s) in powers.iter().enumerate() {
                    p += s * omega.powi(-((m * k) as i32));
                }
                p / c(order as f64)
            })
            .collect();

        let auto = Automorphism {
            order,
            omega,
            perm: perm.to_vec(),
            root_perm,
            tau,
            dual_powers: Vec::new(),
            powers,
            projectors,
        };
        let auto = Automorphism {
            dual_powers: auto.build_dual_powers(g),
            ..auto
        };

        let hom = auto.homomorphism_residual(g);
        if hom > 1e-10 {
            return Err(Error::Automorphism(format!(
                "extension is not a Lie algebra automorphism (residual {hom:.3e})"
            )));
        }
        Ok(auto)
    }

    /// Matrices of `L_σ^m` on h* in simple-root coordinates.
    fn build_dual_powers(&self, g: &SimpleLieAlgebra) -> Vec<DMatrix<C64>> {
        let r = g.rank();
        // σ|_h in the coroot basis, and the change of basis h* coordinates → values on coroots.
        let s = self.matrix().view((0, 0), (r, r)).into_owned();
        let a = DMatrix::from_fn(r, r, |i, j| c(g.cartan()[i][j] as f64));
        let a_inv = a
            .clone()
            .try_inverse()
            .expect("Cartan matrix is invertible");
        let s_inv = s.try_inverse().expect("σ is invertible on h");
        // (L_σ η)(H_i) = η(σ⁻¹ H_i) = Σ_k (σ⁻¹)_{k i} η(H_k).
        let l = &a_inv * s_inv.transpose() * &a;
        let mut out = vec![DMatrix::identity(r, r)];
        for m in 1..self.order {
            out.push(&l * &out[m - 1]);
        }
        out
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn omega(&self) -> C64 {
        self.omega
    }

    /// `ω^k` for any integer k.
    pub fn omega_pow(&self, k: i64) -> C64 {
        let t = self.order as i64;
        self.omega.powi(k.rem_euclid(t) as i32)
    }

    pub fn diagram_perm(&self) -> &[usize] {
        &self.perm
    }

    /// Image of each positive root under the diagram symmetry.
    pub fn root_perm(&self) -> &[usize] {
        &self.root_perm
    }

    /// `τ_α` for every positive root, `σE_α = τ_α E_{σα}`.
    pub fn tau(&self) -> &[C64] {
        &self.tau
    }

    /// Matrix of σ on g.
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.powers[1 % self.order]
    }

    /// Matrix of `σ^m` for any integer m.
    pub fn power(&self, m: i64) -> &DMatrix<C64> {
        &self.powers[m.rem_euclid(self.order as i64) as usize]
    }

    /// `Π_k = (1/T) Σ_m ω^{-mk} σ^m`, projector onto the `ω^k`-eigenspace.
    pub fn projector(&self, k: i64) -> &DMatrix<C64> {
        &self.projectors[k.rem_euclid(self.order as i64) as usize]
    }

    pub fn apply(&self, x: &GVec) -> GVec {
        self.matrix() * x
    }

    pub fn apply_power(&self, m: i64, x: &GVec) -> GVec {
        self.power(m) * x
    }

    pub fn project(&self, k: i64, x: &GVec) -> GVec {
        self.projector(k) * x
    }

    /// `L_σ η = η ∘ σ⁻¹`.
    pub fn sigma_dual(&self, eta: &Weight) -> Weight {
        self.sigma_dual_pow(1, eta)
    }

    /// `L_σ^m η`.
    pub fn sigma_dual_pow(&self, m: i64, eta: &Weight) -> Weight {
        let l = &self.dual_powers[m.rem_euclid(self.order as i64) as usize];
        let v = l * DVector::from_column_slice(&eta.0);
        Weight(v.iter().cloned().collect())
    }

    /// `Π₀` on h*: the average of `L_σ^m` over the group.
    pub fn project_weight(&self, eta: &Weight) -> Weight {
        let mut acc = Weight::zero(eta.0.len());
        for m in 0..self.order as i64 {
            acc = acc.add(&self.sigma_dual_pow(m, eta));
        }
        acc.scale(c(1.0 / self.order as f64))
    }

    pub fn is_fixed_weight(&self, eta: &Weight, tol: f64) -> bool {
        self.sigma_dual(eta).distance(eta) <= tol * (1.0 + eta.max_abs())
    }

    /// `‖L_σχ − ωχ‖`, the admissibility residual of a twist χ.
    pub fn chi_residual(&self, chi: &Weight) -> f64 {
        self.sigma_dual(chi).distance(&chi.scale(self.omega))
    }

    /// `‖σx − x‖`.
    pub fn fixed_residual(&self, x: &GVec) -> f64 {
        (self.apply(x) - x).max_norm()
    }

    /// `max ‖σ[x,y] − [σx,σy]‖ / (1 + ‖[x,y]‖)` over basis pairs.
    pub fn homomorphism_residual(&self, g: &SimpleLieAlgebra) -> f64 {
        let dim = g.dim();
        let s = self.matrix();
        let cols: Vec<GVec> = (0..dim).map(|b| s.column(b).into_owned()).collect();
        let mut worst: f64 = 0.0;
        for a in 0..dim {
            for b in 0..dim {
                let xy = g.bracket(&g.basis_vector(a), &g.basis_vector(b));
                let lhs = s * &xy;
                let rhs = g.bracket(&cols[a], &cols[b]);
                worst = worst.max((lhs - rhs).max_norm() / (1.0 + xy.max_norm()));
            }
        }
        worst
    }

    /// `‖σ^T − id‖`.
    pub fn order_residual(&self) -> f64 {
        let dim = self.matrix().nrows();
        max_abs(&(self.matrix() * self.power(self.order as i64 - 1) - DMatrix::identity(dim, dim)))
    }

    /// `max |⟨σx, σy⟩ − ⟨x, y⟩|` over basis pairs.
    pub fn form_residual(&self, g: &SimpleLieAlgebra) -> f64 {
        let form = g.form_matrix().map(c);
        let s = self.matrix();
        max_abs(&(s.transpose() * &form * s - form))
    }

    /// `max(‖Π_kΠ_l − δ_{kl}Π_k‖, ‖Σ_k Π_k − id‖, ‖σΠ_k − ω^kΠ_k‖)`.
    pub fn projector_residual(&self) -> f64 {
        let dim = self.matrix().nrows();
        let t = self.order as i64;
        let mut worst: f64 = 0.0;
        let mut sum = DMatrix::from_element(dim, dim, ZERO);
        for k in 0..t {
            let pk = self.projector(k);
            sum += pk;
            for l in 0..t {
                let prod = pk * self.projector(l);
                let expect = if k == l {
                    pk.clone()
                } else {
                    DMatrix::from_element(dim, dim, ZERO)
                };
                worst = worst.max(max_abs(&(prod - expect)));
            }
            worst = worst.max(max_abs(&(self.matrix() * pk - pk * self.omega_pow(k))));
        }
        worst.max(max_abs(&(sum - DMatrix::identity(dim, dim))))
    }

    /// Basis of `Π_k g` extracted from the projector columns.
    pub fn eigenspace_basis(&self, k: i64) -> Vec<GVec> {
        column_basis(self.projector(k))
    }
}

/// Linearly independent columns of a projector, chosen greedily in basis order.
pub(crate) fn column_basis(p: &DMatrix<C64>) -> Vec<GVec> {
    let mut chosen: Vec<GVec> = Vec::new();
    for col in 0..p.ncols() {
        let v = p.column(col).into_owned();
        if v.max_norm() < 1e-12 {
            continue;
        }
        let mut trial = chosen.clone();
        trial.push(v.clone());
        let m = DMatrix::from_columns(&trial);
        if crate::linalg::rank(&m, 1e-10) == trial.len() {
            chosen.push(v);
        }
    }
    chosen
}

fn coefficient(terms: &[(usize, f64)], index: usize) -> f64 {
    terms
        .iter()
        .find(|(i, _)| *i == index)
        .map(|(_, v)| *v)
        .expect("root vectors of a sum bracket to a nonzero multiple")
}

/// If `v` is a multiple of the basis vector `index`, return the multiple.
fn proportionality(v: &GVec, index: usize) -> Option<C64> {
    let coef = v[index];
    let mut rest = v.clone();
    rest[index] = ZERO;
    if rest.max_norm() > ROOT_TOL || coef.norm() < ROOT_TOL {
        None
    } else {
        Some(coef)
    }
}

pub fn is_primitive_root(omega: C64, order: usize) -> bool {
    if (omega.powi(order as i32) - ONE).norm() > ROOT_TOL {
        return false;
    }
    (1..order).all(|k| (omega.powi(k as i32) - ONE).norm() > ROOT_TOL)
}

/// The exponent `k` with `ω^k = z`, if any.
pub fn omega_exponent(omega: C64, order: usize, z: C64) -> Option<usize> {
    (0..order).find(|&k| (omega.powi(k as i32) - z).norm() <= ROOT_TOL)
}
