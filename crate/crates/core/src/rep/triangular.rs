use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::lie::{Automorphism, BasisKind, SimpleLieAlgebra, Weight};
use crate::linalg::{c, left_pseudo_inverse, rank, GVec, MaxNorm, C64, ZERO};

/// Position of a basis vector in the triangular decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Cartan(usize),
    Raising(usize),
    Lowering(usize),
}

/// A Lie algebra with a basis adapted to a triangular decomposition
/// `n⁻ ⊕ h ⊕ n`, given as vectors inside an ambient simple Lie algebra.
///
/// Used both for g itself (the Cartan–Weyl basis) and for the fixed-point
/// subalgebra `g^σ` with basis `Π₀H_i`, `Π₀E_α`, `Π₀F_α` (one root per σ-orbit).
#[derive(Debug, Clone)]
pub struct TriangularAlgebra {
    rank: usize,
    basis: Vec<GVec>,
    roles: Vec<Role>,
    lowering: Vec<usize>,
    structure: Vec<Vec<Vec<(usize, C64)>>>,
    /// Root-lattice depth (simple-root coordinates) added by each lowering element.
    lowering_depth: Vec<Vec<i64>>,
    /// Maps ambient coordinates to coordinates in `basis`.
    coordinates: DMatrix<C64>,
}

impl TriangularAlgebra {
    /// g with its Cartan–Weyl basis.
    pub fn full(g: &SimpleLieAlgebra) -> Self {
        let dim = g.dim();
        let basis: Vec<GVec> = (0..dim).map(|b| g.basis_vector(b)).collect();
        let roles: Vec<Role> = (0..dim)
            .map(|b| match g.kind(b) {
                BasisKind::Cartan(i) => Role::Cartan(i),
                BasisKind::Raising(a) => Role::Raising(a),
                BasisKind::Lowering(a) => Role::Lowering(a),
            })
            .collect();
        let lowering_depth = g.positive_roots().to_vec();
        let structure = (0..dim)
            .map(|a| {
                (0..dim)
                    .map(|b| g.structure(a, b).iter().map(|&(k, v)| (k, c(v))).collect())
                    .collect()
            })
            .collect();
        let lowering = (0..g.num_positive_roots()).map(|a| g.f_index(a)).collect();
        TriangularAlgebra {
            rank: g.rank(),
            basis,
            roles,
            lowering,
            structure,
            lowering_depth,
            coordinates: DMatrix::identity(dim, dim),
        }
    }

    /// The fixed-point subalgebra `g^σ`.
    pub fn fixed(g: &SimpleLieAlgebra, sigma: &Automorphism) -> Result<Self> {
        let p0 = sigma.projector(0);
        let mut basis: Vec<GVec> = Vec::new();
        let mut roles: Vec<Role> = Vec::new();

        // Cartan part: independent images of the coroots.
        let mut cartan: Vec<GVec> = Vec::new();
        for i in 0..g.rank() {
            let v = p0 * g.basis_vector(i);
            let mut trial = cartan.clone();
            trial.push(v.clone());
            if rank(&DMatrix::from_columns(&trial), 1e-10) == trial.len() {
                cartan.push(v);
            }
        }
        for (k, v) in cartan.into_iter().enumerate() {
            basis.push(v);
            roles.push(Role::Cartan(k));
        }

        // One root per σ-orbit, keeping those whose projection survives.
        let mut seen = vec![false; g.num_positive_roots()];
        let mut reps: Vec<usize> = Vec::new();
        for a in 0..g.num_positive_roots() {
            if seen[a] {
                continue;
            }
            let mut b = a;
            loop {
                seen[b] = true;
                b = sigma.root_perm()[b];
                if b == a {
                    break;
                }
            }
            let e = p0 * g.basis_vector(g.e_index(a));
            if e.max_norm() > 1e-12 {
                reps.push(a);
            }
        }
        for (k, &a) in reps.iter().enumerate() {
            basis.push(p0 * g.basis_vector(g.e_index(a)));
            roles.push(Role::Raising(k));
        }
        let mut lowering = Vec::new();
        let mut lowering_depth = Vec::new();
        for (k, &a) in reps.iter().enumerate() {
            lowering.push(basis.len());
            lowering_depth.push(g.positive_roots()[a].clone());
            basis.push(p0 * g.basis_vector(g.f_index(a)));
            roles.push(Role::Lowering(k));
        }

        let b = DMatrix::from_columns(&basis);
        let coordinates = left_pseudo_inverse(&b)
            .ok_or_else(|| Error::Internal("fixed-point basis is degenerate".into()))?;
        let n = basis.len();
        let mut structure = vec![vec![Vec::new(); n]; n];
        for x in 0..n {
            for y in 0..n {
                let br = g.bracket(&basis[x], &basis[y]);
                let coords = &coordinates * &br;
                let back = &b * &coords;
                let resid = (back - &br).max_norm();
                if resid > 1e-10 {
                    return Err(Error::Internal(format!(
                        "fixed-point subalgebra is not closed (residual {resid:.3e})"
                    )));
                }
                structure[x][y] = coords
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| v.norm() > 1e-14)
                    .map(|(k, v)| (k, *v))
                    .collect();
            }
        }
        Ok(TriangularAlgebra {
            rank: g.rank(),
            basis,
            roles,
            lowering,
            structure,
            lowering_depth,
            coordinates,
        })
    }

    /// Rank of the ambient algebra, the length of every depth vector.
    pub fn ambient_rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn role(&self, x: usize) -> Role {
        self.roles[x]
    }

    pub fn basis(&self) -> &[GVec] {
        &self.basis
    }

    pub fn num_lowering(&self) -> usize {
        self.lowering.len()
    }

    /// Basis index of the j-th lowering element.
    pub fn lowering_index(&self, j: usize) -> usize {
        self.lowering[j]
    }

    pub fn lowering_depth(&self, j: usize) -> &[i64] {
        &self.lowering_depth[j]
    }

    pub fn raising(&self) -> Vec<usize> {
        (0..self.dim())
            .filter(|&x| matches!(self.roles[x], Role::Raising(_)))
            .collect()
    }

    pub fn structure(&self, x: usize, y: usize) -> &[(usize, C64)] {
        &self.structure[x][y]
    }

    /// Columns are the basis vectors in ambient coordinates.
    pub fn basis_matrix(&self) -> DMatrix<C64> {
        DMatrix::from_columns(&self.basis)
    }

    /// Left inverse of [`Self::basis_matrix`].
    pub fn coordinate_matrix(&self) -> &DMatrix<C64> {
        &self.coordinates
    }

    /// Coordinates of an ambient vector, failing if it is not in the span.
    pub fn coordinates_of(&self, v: &GVec) -> Result<GVec> {
        let coords = &self.coordinates * v;
        let back = DMatrix::from_columns(&self.basis) * &coords;
        let resid = (back - v).max_norm();
        if resid > 1e-9 * (1.0 + v.max_norm()) {
            return Err(Error::NotInFixedSubalgebra(resid));
        }
        Ok(coords)
    }

    /// Values of a weight on the Cartan basis elements.
    pub fn highest_weight_values(&self, g: &SimpleLieAlgebra, lambda: &Weight) -> Vec<C64> {
        self.roles
            .iter()
            .zip(&self.basis)
            .filter(|(r, _)| matches!(r, Role::Cartan(_)))
            .map(|(_, v)| g.evaluate(lambda, v))
            .collect()
    }

    /// `max |[x,[y,z]] + cyclic|` over basis triples.
    pub fn jacobi_residual(&self) -> f64 {
        let n = self.dim();
        let br = |u: &[(usize, C64)], v: usize| {
            let mut out = vec![ZERO; n];
            for &(k, s) in u {
                for &(l, t) in &self.structure[k][v] {
                    out[l] += s * t;
                }
            }
            out
        };
        let mut worst: f64 = 0.0;
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let a = br(&self.structure[x][y], z);
                    let b = br(&self.structure[y][z], x);
                    let d = br(&self.structure[z][x], y);
                    for k in 0..n {
                        worst = worst.max((a[k] + b[k] + d[k]).norm());
                    }
                }
            }
        }
        worst
    }
}
