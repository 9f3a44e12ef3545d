use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{GVec, MaxNorm, C64, ZERO};

/// Dynkin series. Only type A is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Series {
    A,
}

impl FromStr for Series {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Series::A),
            other => Err(Error::Unsupported {
                series: other.to_string(),
                rank: 0,
            }),
        }
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Series::A => write!(f, "A"),
        }
    }
}

/// Which part of the triangular decomposition a basis vector belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    Cartan(usize),
    Raising(usize),
    Lowering(usize),
}

/// A simple Lie algebra with a Cartan–Weyl basis.
///
/// Basis layout, `r = rank`, `P = |Δ⁺|`:
///
/// * `0..r`: coroots `H_i = [E_{α_i}, F_{α_i}]`,
/// * `r..r+P`: `E_α` in positive-root order,
/// * `r+P..r+2P`: `F_α` in the same order.
///
/// Positive roots are ordered by height, then lexicographically by their
/// simple-root coordinates. The invariant form is normalized so that long
/// roots have square length 2.
///
/// Sign convention: for `sl(n+1)` the basis is realized by matrix units,
/// `E_α = e_{ij}` and `F_α = e_{ji}` for `α = α_i + … + α_{j-1}`. All
/// sign-sensitive identities downstream are checked against this same table.
#[derive(Debug, Clone)]
pub struct SimpleLieAlgebra {
    series: Series,
    rank: usize,
    cartan: Vec<Vec<i64>>,
    roots: Vec<Vec<i64>>,
    structure: Vec<Vec<Vec<(usize, f64)>>>,
    form: DMatrix<f64>,
    form_inverse: DMatrix<f64>,
    root_form: DMatrix<f64>,
    dual_coxeter: f64,
}

impl SimpleLieAlgebra {
    /// Builds the algebra of the given series and rank.
    pub fn new(series: Series, rank: usize) -> Result<Self> {
        match series {
            Series::A if (1..=4).contains(&rank) => Ok(Self::type_a(rank)),
            _ => Err(Error::Unsupported {
                series: series.to_string(),
                rank,
            }),
        }
    }

    fn type_a(rank: usize) -> Self {
        let n = rank + 1;
        let mut cartan = vec![vec![0i64; rank]; rank];
        for i in 0..rank {
            cartan[i][i] = 2;
            if i + 1 < rank {
                cartan[i][i + 1] = -1;
                cartan[i + 1][i] = -1;
            }
        }
        let roots = positive_roots(&cartan);

        // Matrix unit attached to each positive root α_i + … + α_{j-1}.
        let units: Vec<(usize, usize)> = roots
            .iter()
            .map(|r| {
                let i = r.iter().position(|&x| x != 0).unwrap();
                let len = r.iter().filter(|&&x| x != 0).count();
                (i, i + len)
            })
            .collect();
        let p = roots.len();
        let dim = rank + 2 * p;

        let basis_matrix = |b: usize| -> DMatrix<f64> {
            let mut m = DMatrix::zeros(n, n);
            if b < rank {
                m[(b, b)] = 1.0;
                m[(b + 1, b + 1)] = -1.0;
            } else if b < rank + p {
                let (i, j) = units[b - rank];
                m[(i, j)] = 1.0;
            } else {
                let (i, j) = units[b - rank - p];
                m[(j, i)] = 1.0;
            }
            m
        };
        let decompose = |m: &DMatrix<f64>| -> Vec<(usize, f64)> {
            let mut out = Vec::new();
            let mut running = 0.0;
            for k in 0..rank {
                running += m[(k, k)];
                if running.abs() > 1e-12 {
                    out.push((k, running));
                }
            }
            for (a, &(i, j)) in units.iter().enumerate() {
                if m[(i, j)].abs() > 1e-12 {
                    out.push((rank + a, m[(i, j)]));
                }
                if m[(j, i)].abs() > 1e-12 {
                    out.push((rank + p + a, m[(j, i)]));
                }
            }
            out
        };

        let mats: Vec<DMatrix<f64>> = (0..dim).map(basis_matrix).collect();
        let structure: Vec<Vec<Vec<(usize, f64)>>> = (0..dim)
            .map(|a| {
                (0..dim)
                    .map(|b| decompose(&(&mats[a] * &mats[b] - &mats[b] * &mats[a])))
                    .collect()
            })
            .collect();

        let mut alg = SimpleLieAlgebra {
            series: Series::A,
            rank,
            cartan,
            roots,
            structure,
            form: DMatrix::zeros(dim, dim),
            form_inverse: DMatrix::zeros(dim, dim),
            root_form: DMatrix::zeros(rank, rank),
            dual_coxeter: 0.0,
        };
        alg.normalize_form();
        alg
    }

    /// Computes the Killing form from the structure constants and rescales
    /// it so that the longest roots have square length 2.
    fn normalize_form(&mut self) {
        let dim = self.dim();
        let ad: Vec<DMatrix<f64>> = (0..dim).map(|a| self.ad_real(a)).collect();
        let killing = DMatrix::from_fn(dim, dim, |a, b| (&ad[a] * &ad[b]).trace());
        let killing_roots = self.induced_root_form(&killing);
        let longest = self
            .roots
            .iter()
            .map(|r| quad(&killing_roots, r))
            .fold(0.0, f64::max);
        // ⟨·,·⟩ = c·κ on g scales the induced form on h* by 1/c.
        let c = longest / 2.0;
        self.form = killing * c;
        self.form_inverse = self
            .form
            .clone()
            .try_inverse()
            .expect("invariant form of a simple Lie algebra is nondegenerate");
        self.root_form = self.induced_root_form(&self.form);
        self.dual_coxeter = 1.0 / longest;
    }

    fn ad_real(&self, a: usize) -> DMatrix<f64> {
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for b in 0..dim {
            for &(c, v) in &self.structure[a][b] {
                m[(c, b)] += v;
            }
        }
        m
    }

    /// `⟨α_i, α_j⟩` for the form on h* dual to the restriction of `form` to h.
    fn induced_root_form(&self, form: &DMatrix<f64>) -> DMatrix<f64> {
        let r = self.rank;
        let gram = form.view((0, 0), (r, r)).into_owned();
        let gram_inv = gram
            .try_inverse()
            .expect("form restricted to h is nondegenerate");
        // Column j: α_j evaluated on the coroots.
        let a = DMatrix::from_fn(r, r, |k, j| self.cartan[k][j] as f64);
        // t_{α_j} = Σ_l x_l H_l with x = G⁻¹ a_{·j}; ⟨α_i, α_j⟩ = α_i(t_{α_j}).
        a.transpose() * gram_inv * a
    }

    pub fn series(&self) -> Series {
        self.series
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.rank + 2 * self.roots.len()
    }

    pub fn num_positive_roots(&self) -> usize {
        self.roots.len()
    }

    /// `cartan()[i][j] = α_j(H_i)`.
    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    /// Positive roots in simple-root coordinates.
    pub fn positive_roots(&self) -> &[Vec<i64>] {
        &self.roots
    }

    pub fn root_index(&self, root: &[i64]) -> Option<usize> {
        self.roots.iter().position(|r| r.as_slice() == root)
    }

    pub fn height(&self, root: usize) -> i64 {
        self.roots[root].iter().sum()
    }

    pub fn simple_root_index(&self, i: usize) -> usize {
        let mut r = vec![0; self.rank];
        r[i] = 1;
        self.root_index(&r)
            .expect("simple roots are positive roots")
    }

    pub fn highest_root(&self) -> &[i64] {
        self.roots.last().expect("at least one positive root")
    }

    pub fn cartan_index(&self, i: usize) -> usize {
        i
    }

    pub fn e_index(&self, root: usize) -> usize {
        self.rank + root
    }

    pub fn f_index(&self, root: usize) -> usize {
        self.rank + self.roots.len() + root
    }

    pub fn kind(&self, b: usize) -> BasisKind {
        let p = self.roots.len();
        if b < self.rank {
            BasisKind::Cartan(b)
        } else if b < self.rank + p {
            BasisKind::Raising(b - self.rank)
        } else {
            BasisKind::Lowering(b - self.rank - p)
        }
    }

    /// Root-lattice weight of a basis vector (zero for the Cartan part).
    pub fn basis_weight(&self, b: usize) -> Vec<i64> {
        match self.kind(b) {
            BasisKind::Cartan(_) => vec![0; self.rank],
            BasisKind::Raising(a) => self.roots[a].clone(),
            BasisKind::Lowering(a) => self.roots[a].iter().map(|x| -x).collect(),
        }
    }

    pub fn basis_label(&self, b: usize) -> String {
        let fmt_root = |r: &[i64]| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("");
        match self.kind(b) {
            BasisKind::Cartan(i) => format!("H{}", i + 1),
            BasisKind::Raising(a) => format!("E{}", fmt_root(&self.roots[a])),
            BasisKind::Lowering(a) => format!("F{}", fmt_root(&self.roots[a])),
        }
    }

    /// `[e_a, e_b]` as a sparse combination of basis vectors.
    pub fn structure(&self, a: usize, b: usize) -> &[(usize, f64)] {
        &self.structure[a][b]
    }

    pub fn basis_vector(&self, b: usize) -> GVec {
        let mut v = DVector::from_element(self.dim(), ZERO);
        v[b] = C64::new(1.0, 0.0);
        v
    }

    pub fn bracket(&self, x: &GVec, y: &GVec) -> GVec {
        let dim = self.dim();
        let mut out = DVector::from_element(dim, ZERO);
        for a in 0..dim {
            if x[a] == ZERO {
                continue;
            }
            for b in 0..dim {
                if y[b] == ZERO {
                    continue;
                }
                let xy = x[a] * y[b];
                for &(c, v) in &self.structure[a][b] {
                    out[c] += xy * v;
                }
            }
        }
        out
    }

    /// Matrix of `ad_x` in the basis.
    pub fn ad(&self, x: &GVec) -> DMatrix<C64> {
        let dim = self.dim();
        let mut m = DMatrix::from_element(dim, dim, ZERO);
        for a in 0..dim {
            if x[a] == ZERO {
                continue;
            }
            for b in 0..dim {
                for &(c, v) in &self.structure[a][b] {
                    m[(c, b)] += x[a] * v;
                }
            }
        }
        m
    }

    /// Gram matrix of the invariant form in the basis.
    pub fn form_matrix(&self) -> &DMatrix<f64> {
        &self.form
    }

    /// Inverse Gram matrix; entry `(b, c)` is the coefficient of `e_b ⊗ e_c`
    /// in the Casimir tensor `Σ_a I_a ⊗ I^a`.
    pub fn form_inverse(&self) -> &DMatrix<f64> {
        &self.form_inverse
    }

    pub fn form(&self, x: &GVec, y: &GVec) -> C64 {
        let dim = self.dim();
        let mut acc = ZERO;
        for a in 0..dim {
            if x[a] == ZERO {
                continue;
            }
            for b in 0..dim {
                let g = self.form[(a, b)];
                if g != 0.0 {
                    acc += x[a] * y[b] * g;
                }
            }
        }
        acc
    }

    /// `⟨α_i, α_j⟩` on h*.
    pub fn root_form(&self) -> &DMatrix<f64> {
        &self.root_form
    }

    pub fn dual_coxeter(&self) -> f64 {
        self.dual_coxeter
    }

    /// Half the sum of the positive roots, in simple-root coordinates.
    pub fn rho(&self) -> Weight {
        let mut w = vec![0.0; self.rank];
        for r in &self.roots {
            for (i, x) in r.iter().enumerate() {
                w[i] += *x as f64 / 2.0;
            }
        }
        Weight::real(&w)
    }

    /// Bilinear pairing of two weights.
    pub fn pair(&self, a: &Weight, b: &Weight) -> C64 {
        let mut acc = ZERO;
        for i in 0..self.rank {
            for j in 0..self.rank {
                acc += a.0[i] * b.0[j] * self.root_form[(i, j)];
            }
        }
        acc
    }

    /// `λ(H_i)` for a weight in simple-root coordinates.
    pub fn on_coroot(&self, w: &Weight, i: usize) -> C64 {
        (0..self.rank)
            .map(|j| w.0[j] * self.cartan[i][j] as f64)
            .sum()
    }

    /// Evaluates a weight on a Cartan element given in basis coordinates.
    pub fn evaluate(&self, w: &Weight, x: &GVec) -> C64 {
        (0..self.rank).map(|i| x[i] * self.on_coroot(w, i)).sum()
    }

    /// Converts fundamental-weight coordinates to simple-root coordinates.
    pub fn from_fundamental(&self, coords: &[C64]) -> Result<Weight> {
        if coords.len() != self.rank {
            return Err(Error::config(
                "weight",
                format!("expected {} coordinates, got {}", self.rank, coords.len()),
            ));
        }
        let a = DMatrix::from_fn(self.rank, self.rank, |i, j| {
            C64::new(self.cartan[i][j] as f64, 0.0)
        });
        let inv = a.try_inverse().expect("Cartan matrix is invertible");
        let v = DVector::from_column_slice(coords);
        Ok(Weight((inv * v).iter().cloned().collect()))
    }

    /// Weight as fundamental-weight coordinates `λ(H_i)`.
    pub fn to_fundamental(&self, w: &Weight) -> Vec<C64> {
        (0..self.rank).map(|i| self.on_coroot(w, i)).collect()
    }

    /// The simple root `α_i` as a weight.
    pub fn simple_root(&self, i: usize) -> Weight {
        let mut w = vec![0.0; self.rank];
        w[i] = 1.0;
        Weight::real(&w)
    }

    pub fn root_weight(&self, root: usize) -> Weight {
        Weight::integral(&self.roots[root])
    }

    /// Jacobi identity residual over all basis triples.
    pub fn jacobi_residual(&self) -> f64 {
        let dim = self.dim();
        let mut worst: f64 = 0.0;
        let e: Vec<GVec> = (0..dim).map(|b| self.basis_vector(b)).collect();
        for a in 0..dim {
            for b in 0..dim {
                let ab = self.bracket(&e[a], &e[b]);
                for c in 0..dim {
                    let bc = self.bracket(&e[b], &e[c]);
                    let ca = self.bracket(&e[c], &e[a]);
                    let total = self.bracket(&ab, &e[c])
                        + self.bracket(&bc, &e[a])
                        + self.bracket(&ca, &e[b]);
                    worst = worst.max(total.max_norm());
                }
            }
        }
        worst
    }

    /// `max |⟨[x,y],z⟩ + ⟨y,[x,z]⟩|` over basis triples.
    pub fn invariance_residual(&self) -> f64 {
        let dim = self.dim();
        let e: Vec<GVec> = (0..dim).map(|b| self.basis_vector(b)).collect();
        let mut worst: f64 = 0.0;
        for x in &e {
            for y in &e {
                let xy = self.bracket(x, y);
                for z in &e {
                    let xz = self.bracket(x, z);
                    worst = worst.max((self.form(&xy, z) + self.form(y, &xz)).norm());
                }
            }
        }
        worst
    }
}

fn quad(m: &DMatrix<f64>, r: &[i64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..r.len() {
        for j in 0..r.len() {
            acc += r[i] as f64 * r[j] as f64 * m[(i, j)];
        }
    }
    acc
}

/// Positive roots by closure under root strings, from the Cartan matrix alone.
pub(crate) fn positive_roots(cartan: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let rank = cartan.len();
    let mut roots: Vec<Vec<i64>> = (0..rank)
        .map(|i| {
            let mut r = vec![0; rank];
            r[i] = 1;
            r
        })
        .collect();
    let mut layer = roots.clone();
    while !layer.is_empty() {
        let mut next: Vec<Vec<i64>> = Vec::new();
        for beta in &layer {
            for i in 0..rank {
                // p: how far the α_i-string extends downwards from β.
                let mut p = 0;
                let mut down = beta.clone();
                loop {
                    down[i] -= 1;
                    if roots.contains(&down) {
                        p += 1;
                    } else {
                        break;
                    }
                }
                let pairing: i64 = (0..rank).map(|j| beta[j] * cartan[i][j]).sum();
                let q = p - pairing;
                if q > 0 {
                    let mut up = beta.clone();
                    up[i] += 1;
                    if !roots.contains(&up) && !next.contains(&up) {
                        next.push(up);
                    }
                }
            }
        }
        roots.extend(next.iter().cloned());
        layer = next;
    }
    roots.sort_by(|a, b| {
        let ha: i64 = a.iter().sum();
        let hb: i64 = b.iter().sum();
        ha.cmp(&hb).then_with(|| b.cmp(a))
    });
    roots
}

/// An element of h* in simple-root coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weight(pub Vec<C64>);

impl Weight {
    pub fn zero(rank: usize) -> Self {
        Weight(vec![ZERO; rank])
    }

    pub fn real(coords: &[f64]) -> Self {
        Weight(coords.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn integral(coords: &[i64]) -> Self {
        Weight(coords.iter().map(|&x| C64::new(x as f64, 0.0)).collect())
    }

    pub fn coords(&self) -> &[C64] {
        &self.0
    }

    pub fn add(&self, other: &Weight) -> Weight {
        Weight(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Weight) -> Weight {
        Weight(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, s: C64) -> Weight {
        Weight(self.0.iter().map(|a| a * s).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn distance(&self, other: &Weight) -> f64 {
        self.sub(other).max_abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sl(rank: usize) -> SimpleLieAlgebra {
        SimpleLieAlgebra::new(Series::A, rank).unwrap()
    }

    #[test]
    fn sl2_basics() {
        let g = sl(1);
        assert_eq!(g.positive_roots(), &[vec![1]]);
        assert!((g.root_form()[(0, 0)] - 2.0).abs() < 1e-14);
        assert!((g.dual_coxeter() - 2.0).abs() < 1e-14);
        // [E, F] = H
        assert_eq!(g.structure(g.e_index(0), g.f_index(0)), &[(0, 1.0)]);
    }

    #[test]
    fn sl3_roots() {
        let g = sl(2);
        assert_eq!(g.num_positive_roots(), 3);
        assert_eq!(g.highest_root(), &[1, 1]);
        assert!((g.dual_coxeter() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn closure_agrees_with_matrix_units() {
        for rank in 1..=4 {
            let g = sl(rank);
            assert_eq!(g.num_positive_roots(), rank * (rank + 1) / 2);
            // Every [E_α, E_β] lands on the root vector of α + β.
            for a in 0..g.num_positive_roots() {
                for b in 0..g.num_positive_roots() {
                    let sum: Vec<i64> = g.positive_roots()[a]
                        .iter()
                        .zip(&g.positive_roots()[b])
                        .map(|(x, y)| x + y)
                        .collect();
                    let br = g.structure(g.e_index(a), g.e_index(b));
                    match g.root_index(&sum) {
                        Some(c) => {
                            assert_eq!(br.len(), 1);
                            assert_eq!(br[0].0, g.e_index(c));
                        }
                        None => assert!(br.is_empty()),
                    }
                }
            }
        }
    }

    #[test]
    fn ef_gives_coroot() {
        let g = sl(3);
        for a in 0..g.num_positive_roots() {
            let h = g.bracket(&g.basis_vector(g.e_index(a)), &g.basis_vector(g.f_index(a)));
            // H_α = Σ_i k_i H_i for α = Σ k_i α_i in simply-laced type.
            for i in 0..g.rank() {
                assert!((h[i].re - g.positive_roots()[a][i] as f64).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn axioms_hold() {
        for rank in 1..=3 {
            let g = sl(rank);
            assert!(g.jacobi_residual() < 1e-12);
            assert!(g.invariance_residual() < 1e-12);
            for r in 0..g.num_positive_roots() {
                let w = g.root_weight(r);
                assert!((g.pair(&w, &w).re - 2.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn unsupported_rank() {
        assert!(matches!(
            SimpleLieAlgebra::new(Series::A, 7),
            Err(Error::Unsupported { .. })
        ));
        assert!("D".parse::<Series>().is_err());
    }

    #[test]
    fn fundamental_round_trip() {
        let g = sl(2);
        let w = g
            .from_fundamental(&[C64::new(1.0, 0.5), C64::new(-2.0, 0.0)])
            .unwrap();
        let back = g.to_fundamental(&w);
        assert!((back[0] - C64::new(1.0, 0.5)).norm() < 1e-14);
        assert!((back[1] - C64::new(-2.0, 0.0)).norm() < 1e-14);
    }
}
