use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use super::triangular::{Role, TriangularAlgebra};
use crate::lie::{SimpleLieAlgebra, Weight};
use crate::linalg::{C64, ZERO};

/// Exponents of the PBW monomial `f_0^{m_0} f_1^{m_1} ··· v`, indexed by the
/// lowering elements in their fixed order.
pub type Monomial = Vec<u16>;

/// Sparse vector of a single module.
pub type Sparse = Vec<(Monomial, C64)>;

/// Verma module over a [`TriangularAlgebra`], realized on PBW monomials.
///
/// The action is computed by commuting the acting element past the lowering
/// factors, using the structure constants of the algebra; results are cached.
#[derive(Debug)]
pub struct VermaModule {
    algebra: Arc<TriangularAlgebra>,
    highest: Vec<C64>,
    cache: Mutex<HashMap<(usize, Monomial), Arc<Sparse>>>,
}

impl VermaModule {
    /// `highest[k]` is the eigenvalue of the k-th Cartan basis element on `v`.
    pub fn new(algebra: Arc<TriangularAlgebra>, highest: Vec<C64>) -> Self {
        VermaModule {
            algebra,
            highest,
            cache: Mutex::new(HashMap::new()),
        }
    }

    /// `M_λ` over an algebra embedded in g, with λ given on h.
    pub fn with_weight(
        algebra: Arc<TriangularAlgebra>,
        g: &SimpleLieAlgebra,
        lambda: &Weight,
    ) -> Self {
        let highest = algebra.highest_weight_values(g, lambda);
        Self::new(algebra, highest)
    }

    pub fn algebra(&self) -> &TriangularAlgebra {
        &self.algebra
    }

    pub fn highest_vector(&self) -> Monomial {
        vec![0; self.algebra.num_lowering()]
    }

    /// Simple-root coordinates of the depth `λ − weight(m)`.
    pub fn depth(&self, m: &Monomial) -> Vec<i64> {
        let r = self.algebra.ambient_rank();
        let mut out = vec![0; r];
        for (j, &e) in m.iter().enumerate() {
            for (o, d) in out.iter_mut().zip(self.algebra.lowering_depth(j)) {
                *o += e as i64 * d;
            }
        }
        out
    }

    pub fn height(&self, m: &Monomial) -> i64 {
        self.depth(m).iter().sum()
    }

    /// All monomials of height at most `cap`, in lexicographic exponent order.
    pub fn basis(&self, cap: i64) -> Vec<Monomial> {
        let n = self.algebra.num_lowering();
        let heights: Vec<i64> = (0..n)
            .map(|j| self.algebra.lowering_depth(j).iter().sum())
            .collect();
        let mut out = Vec::new();
        let mut current = vec![0u16; n];
        fn rec(
            j: usize,
            left: i64,
            heights: &[i64],
            current: &mut Monomial,
            out: &mut Vec<Monomial>,
        ) {
            if j == heights.len() {
                out.push(current.clone());
                return;
            }
            let mut e = 0;
            while e as i64 * heights[j] <= left {
                current[j] = e;
                rec(j + 1, left - e as i64 * heights[j], heights, current, out);
                e += 1;
            }
            current[j] = 0;
        }
        if n == 0 {
            return if cap >= 0 { vec![current] } else { out };
        }
        rec(0, cap, &heights, &mut current, &mut out);
        out.sort();
        out
    }

    /// `x · m` for a basis element `x` of the algebra.
    pub fn act(&self, x: usize, m: &Monomial) -> Arc<Sparse> {
        let key = (x, m.clone());
        if let Some(hit) = self.cache.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let result = Arc::new(self.compute(x, m));
        self.cache.lock().unwrap().insert(key, result.clone());
        result
    }

    fn compute(&self, x: usize, m: &Monomial) -> Sparse {
        let first = m.iter().position(|&e| e > 0);
        let role = self.algebra.role(x);
        if let Role::Lowering(jx) = role {
            if first.is_none_or(|j| jx <= j) {
                let mut out = m.clone();
                out[jx] += 1;
                return vec![(out, C64::new(1.0, 0.0))];
            }
        }
        let Some(j) = first else {
            return match role {
                Role::Cartan(k) => vec![(m.clone(), self.highest[k])],
                _ => Vec::new(),
            };
        };
        let mut rest = m.clone();
        rest[j] -= 1;
        let fj = self.algebra.lowering_index(j);
        let mut acc: BTreeMap<Monomial, C64> = BTreeMap::new();
        // x f_j rest = f_j (x rest) + [x, f_j] rest
        for (mm, c1) in self.act(x, &rest).iter() {
            for (m2, c2) in self.act(fj, mm).iter() {
                *acc.entry(m2.clone()).or_insert(ZERO) += c1 * c2;
            }
        }
        for &(y, s) in self.algebra.structure(x, fj) {
            for (m2, c2) in self.act(y, &rest).iter() {
                *acc.entry(m2.clone()).or_insert(ZERO) += s * c2;
            }
        }
        acc.into_iter().filter(|(_, v)| *v != ZERO).collect()
    }

    /// `Σ_x coords[x] · x` applied to a sparse vector.
    pub fn apply(&self, coords: &[(usize, C64)], v: &Sparse) -> Sparse {
        let mut acc: BTreeMap<Monomial, C64> = BTreeMap::new();
        for (m, c) in v {
            for &(x, s) in coords {
                for (m2, c2) in self.act(x, m).iter() {
                    *acc.entry(m2.clone()).or_insert(ZERO) += c * s * c2;
                }
            }
        }
        acc.into_iter().filter(|(_, v)| *v != ZERO).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{Automorphism, DualBasisPair, Series};
    use crate::linalg::{c, ONE};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sl(rank: usize, lambda: &[f64]) -> (SimpleLieAlgebra, VermaModule) {
        let g = SimpleLieAlgebra::new(Series::A, rank).unwrap();
        let fund: Vec<C64> = lambda.iter().map(|&x| c(x)).collect();
        let w = g.from_fundamental(&fund).unwrap();
        let m = VermaModule::with_weight(Arc::new(TriangularAlgebra::full(&g)), &g, &w);
        (g, m)
    }

    fn to_map(v: &Sparse) -> BTreeMap<Monomial, C64> {
        v.iter().cloned().collect()
    }

    fn distance(a: &Sparse, b: &Sparse) -> f64 {
        let mut d = to_map(a);
        for (m, v) in b {
            *d.entry(m.clone()).or_insert(ZERO) -= v;
        }
        d.values().fold(0.0, |w, v| w.max(v.norm()))
    }

    #[test]
    fn sl2_small_basis() {
        let (_, m) = sl(1, &[1.0]);
        let b = m.basis(2);
        assert_eq!(b, vec![vec![0], vec![1], vec![2]]);
        assert_eq!(m.depth(&b[2]), vec![2]);
    }

    #[test]
    fn sl3_height_one() {
        let (_, m) = sl(2, &[1.0, 0.0]);
        assert_eq!(m.basis(1).len(), 3);
        // F_θ has height 2
        assert_eq!(m.basis(2).len(), 1 + 2 + 4);
    }

    #[test]
    fn ef_on_highest() {
        let (g, m) = sl(1, &[3.0]);
        let v = vec![(m.highest_vector(), ONE)];
        let fv = m.apply(&[(g.f_index(0), ONE)], &v);
        let efv = m.apply(&[(g.e_index(0), ONE)], &fv);
        assert!(distance(&efv, &vec![(vec![0], c(3.0))]) < 1e-15);
        let ev = m.apply(&[(g.e_index(0), ONE)], &v);
        assert!(ev.is_empty());
    }

    fn kostant(roots: &[Vec<i64>], target: &[i64]) -> usize {
        if target.iter().all(|&t| t == 0) {
            return 1;
        }
        let Some((first, rest)) = roots.split_first() else {
            return 0;
        };
        let mut total = 0;
        let mut t = target.to_vec();
        loop {
            total += kostant(rest, &t);
            for (x, r) in t.iter_mut().zip(first) {
                *x -= r;
            }
            if t.iter().any(|&x| x < 0) {
                return total;
            }
        }
    }

    #[test]
    fn weight_multiplicities_are_partition_counts() {
        for rank in [2, 3] {
            let (g, m) = sl(rank, &vec![1.0; rank]);
            let basis = m.basis(4);
            let mut counts: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
            for b in &basis {
                *counts.entry(m.depth(b)).or_insert(0) += 1;
            }
            for (depth, n) in counts {
                if depth.iter().sum::<i64>() <= 4 {
                    assert_eq!(n, kostant(g.positive_roots(), &depth), "depth {depth:?}");
                }
            }
        }
    }

    #[test]
    fn module_axioms_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for rank in [1, 2, 3] {
            let (g, m) = sl(rank, &[0.7, -1.3, 2.0][..rank]);
            let alg = TriangularAlgebra::full(&g);
            let basis = m.basis(3);
            for _ in 0..60 {
                let x = rng.gen_range(0..g.dim());
                let y = rng.gen_range(0..g.dim());
                let v = vec![(basis[rng.gen_range(0..basis.len())].clone(), ONE)];
                let xy = m.apply(&[(x, ONE)], &m.apply(&[(y, ONE)], &v));
                let yx = m.apply(&[(y, ONE)], &m.apply(&[(x, ONE)], &v));
                let br = m.apply(alg.structure(x, y), &v);
                let mut lhs = to_map(&xy);
                for (k, val) in yx {
                    *lhs.entry(k).or_insert(ZERO) -= val;
                }
                let lhs: Sparse = lhs.into_iter().collect();
                assert!(distance(&lhs, &br) < 1e-10, "rank {rank}, [{x},{y}]");
            }
        }
    }

    #[test]
    fn casimir_scalar() {
        let (g, m) = sl(1, &[1.0]);
        let duals = DualBasisPair::new(&g);
        for start in m.basis(2) {
            let v = vec![(start.clone(), ONE)];
            let mut acc: BTreeMap<Monomial, C64> = BTreeMap::new();
            for a in 0..duals.len() {
                let lower: Vec<(usize, C64)> = duals.lower[a].iter().cloned().enumerate().collect();
                let upper: Vec<(usize, C64)> = duals.upper[a].iter().cloned().enumerate().collect();
                for (k, val) in m.apply(&upper, &m.apply(&lower, &v)) {
                    *acc.entry(k).or_insert(ZERO) += val * 0.5;
                }
            }
            let out: Sparse = acc.into_iter().collect();
            assert!(distance(&out, &vec![(start, c(0.75))]) < 1e-12);
        }
    }

    #[test]
    fn sigma_verma_modules() {
        let g = SimpleLieAlgebra::new(Series::A, 1).unwrap();
        let s = Automorphism::new(&g, &[0], &[c(-1.0)], 2, None).unwrap();
        let fixed = Arc::new(TriangularAlgebra::fixed(&g, &s).unwrap());
        let m = VermaModule::with_weight(fixed, &g, &Weight::real(&[0.5]));
        assert_eq!(m.basis(5).len(), 1);

        let g = SimpleLieAlgebra::new(Series::A, 2).unwrap();
        let s = Automorphism::new(&g, &[1, 0], &[ONE, ONE], 2, None).unwrap();
        let fixed = Arc::new(TriangularAlgebra::fixed(&g, &s).unwrap());
        let lambda0 = g.from_fundamental(&[c(1.5), c(1.5)]).unwrap();
        let m = VermaModule::with_weight(fixed.clone(), &g, &lambda0);
        assert_eq!(m.basis(4).len(), 5);
        let h = 0;
        let hv = m.apply(&[(h, ONE)], &vec![(m.highest_vector(), ONE)]);
        let expected = g.evaluate(&lambda0, &fixed.basis()[h]);
        assert!((hv[0].1 - expected).norm() < 1e-14);
        for x in fixed.raising() {
            assert!(m
                .apply(&[(x, ONE)], &vec![(m.highest_vector(), ONE)])
                .is_empty());
        }
    }
}
