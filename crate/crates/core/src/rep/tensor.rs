use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::triangular::TriangularAlgebra;
use super::verma::{Monomial, Sparse, VermaModule};
use crate::error::{Error, Result};
use crate::lie::{Automorphism, SimpleLieAlgebra, Weight};
use crate::linalg::{GVec, MaxNorm, C64, ONE, ZERO};
use crate::takiff::{Mode, Site, UElement};

/// One PBW monomial per tensor factor: the marked points in order, then the origin.
pub type Key = Vec<Monomial>;

/// Sparse vector in the tensor product.
pub type State = BTreeMap<Key, C64>;

/// `⊗_i M_{λ_i} ⊗ M^σ_{λ₀}`.
///
/// Π₀-weights below the top are recorded as a class vector: for each σ-orbit
/// of simple roots, the sum of the simple-root coordinates of the depth over
/// that orbit. Π₀ is injective on these, so a class labels a weight block.
#[derive(Debug)]
pub struct TensorModule {
    g: SimpleLieAlgebra,
    factors: Vec<VermaModule>,
    orbit_of: Vec<usize>,
    num_orbits: usize,
    lowering_classes: Vec<Vec<Vec<i64>>>,
    top: Weight,
}

/// Ordered basis of one Π₀-weight space.
#[derive(Debug, Clone)]
pub struct WeightBlock {
    pub class: Vec<i64>,
    pub keys: Vec<Key>,
    index: HashMap<Key, usize>,
}

impl WeightBlock {
    pub fn dim(&self) -> usize {
        self.keys.len()
    }

    pub fn position(&self, key: &Key) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn vector(&self, state: &State) -> Result<DVector<C64>> {
        let mut v = DVector::from_element(self.dim(), ZERO);
        for (k, c) in state {
            match self.position(k) {
                Some(p) => v[p] += c,
                None if c.norm() <= 1e-300 => {}
                None => return Err(Error::OffBlock(format!("{k:?}"))),
            }
        }
        Ok(v)
    }

    pub fn state(&self, v: &DVector<C64>) -> State {
        self.keys
            .iter()
            .zip(v.iter())
            .filter(|(_, c)| **c != ZERO)
            .map(|(k, c)| (k.clone(), *c))
            .collect()
    }
}

/// Matrix of an operator between two weight blocks.
#[derive(Debug, Clone)]
pub struct BlockOperator {
    pub source: Vec<i64>,
    pub target: Vec<i64>,
    pub matrix: DMatrix<C64>,
}

/// Sparse coordinates in a factor's algebra basis.
pub type Coords = Vec<(usize, C64)>;

/// A degree-≤2 element rewritten as operators on individual factors.
/// `coords` are in the factor's own algebra basis.
#[derive(Debug, Clone, Default)]
pub struct RealizedElement {
    pub constant: C64,
    pub linear: Vec<(usize, Coords)>,
    /// `(f₁, x, f₂, y)` stands for `x^{(f₁)} y^{(f₂)}`; `y` acts first.
    pub quadratic: Vec<(usize, Coords, usize, Coords)>,
}

fn nonzero(v: &GVec) -> Vec<(usize, C64)> {
    v.iter()
        .enumerate()
        .filter(|(_, c)| **c != ZERO)
        .map(|(i, c)| (i, *c))
        .collect()
}

impl TensorModule {
    pub fn new(
        g: &SimpleLieAlgebra,
        sigma: &Automorphism,
        lambdas: &[Weight],
        lambda0: &Weight,
    ) -> Result<Self> {
        let full = Arc::new(TriangularAlgebra::full(g));
        let fixed = Arc::new(TriangularAlgebra::fixed(g, sigma)?);
        let mut factors: Vec<VermaModule> = lambdas
            .iter()
            .map(|l| VermaModule::with_weight(full.clone(), g, l))
            .collect();
        factors.push(VermaModule::with_weight(fixed, g, lambda0));

        let perm = sigma.diagram_perm();
        let mut orbit_of = vec![usize::MAX; g.rank()];
        let mut num_orbits = 0;
        for i in 0..g.rank() {
            if orbit_of[i] != usize::MAX {
                continue;
            }
            let mut j = i;
            while orbit_of[j] == usize::MAX {
                orbit_of[j] = num_orbits;
                j = perm[j];
            }
            num_orbits += 1;
        }
        let mut module = TensorModule {
            g: g.clone(),
            factors,
            orbit_of,
            num_orbits,
            lowering_classes: Vec::new(),
            top: Weight::zero(g.rank()),
        };
        module.lowering_classes = module
            .factors
            .iter()
            .map(|f| {
                (0..f.algebra().num_lowering())
                    .map(|j| module.class_of(f.algebra().lowering_depth(j)))
                    .collect()
            })
            .collect();
        let mut top = sigma.project_weight(lambda0);
        for l in lambdas {
            top = top.add(&sigma.project_weight(l));
        }
        module.top = top;
        Ok(module)
    }

    pub fn num_points(&self) -> usize {
        self.factors.len() - 1
    }

    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn factor(&self, f: usize) -> &VermaModule {
        &self.factors[f]
    }

    pub fn origin(&self) -> usize {
        self.factors.len() - 1
    }

    fn factor_of(&self, site: Site) -> Result<usize> {
        match site {
            Site::Point(i) if i < self.num_points() => Ok(i),
            Site::Origin => Ok(self.origin()),
            other => Err(Error::Unrealizable(format!("site {other}"))),
        }
    }

    pub fn num_classes(&self) -> usize {
        self.num_orbits
    }

    /// Orbit sums of a depth vector.
    pub fn class_of(&self, depth: &[i64]) -> Vec<i64> {
        let mut out = vec![0; self.num_orbits];
        for (i, d) in depth.iter().enumerate() {
            out[self.orbit_of[i]] += d;
        }
        out
    }

    /// `Π₀(Σ_i λ_i + λ₀)`, the weight of the highest vector.
    pub fn top_weight(&self) -> &Weight {
        &self.top
    }

    /// Π₀-weight of the block with the given class.
    pub fn class_weight(&self, class: &[i64]) -> Weight {
        let r = self.g.rank();
        let mut sizes = vec![0usize; self.num_orbits];
        for &o in &self.orbit_of {
            sizes[o] += 1;
        }
        let depth: Vec<f64> = (0..r)
            .map(|i| class[self.orbit_of[i]] as f64 / sizes[self.orbit_of[i]] as f64)
            .collect();
        self.top.sub(&Weight::real(&depth))
    }

    /// Class of a Π₀-weight, or a configuration error if it is not below the top.
    pub fn class_for_weight(&self, mu: &Weight) -> Result<Vec<i64>> {
        let diff = self.top.sub(mu);
        let mut class = vec![0i64; self.num_orbits];
        let mut seen = vec![false; self.num_orbits];
        for (i, x) in diff.0.iter().enumerate() {
            let o = self.orbit_of[i];
            let size = self.orbit_of.iter().filter(|&&p| p == o).count() as f64;
            let v = x * size;
            let rounded = v.re.round();
            let bad = (v - rounded).norm() > 1e-9 || rounded < 0.0;
            if bad || (seen[o] && class[o] != rounded as i64) {
                return Err(Error::config(
                    "weight",
                    "not a Π₀-weight of the tensor product",
                ));
            }
            class[o] = rounded as i64;
            seen[o] = true;
        }
        Ok(class)
    }

    pub fn highest_key(&self) -> Key {
        self.factors.iter().map(|f| f.highest_vector()).collect()
    }

    pub fn key_class(&self, key: &Key) -> Vec<i64> {
        let mut out = vec![0; self.num_orbits];
        for (f, m) in key.iter().enumerate() {
            for (j, &e) in m.iter().enumerate() {
                for (o, c) in out.iter_mut().zip(&self.lowering_classes[f][j]) {
                    *o += e as i64 * c;
                }
            }
        }
        out
    }

    /// Every class vector with nonnegative entries summing to at most `height`.
    pub fn classes_up_to(&self, height: i64) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        let mut cur = vec![0; self.num_orbits];
        fn rec(o: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
            if o == cur.len() {
                out.push(cur.clone());
                return;
            }
            for v in 0..=left {
                cur[o] = v;
                rec(o + 1, left - v, cur, out);
            }
            cur[o] = 0;
        }
        rec(0, height, &mut cur, &mut out);
        out.sort_by_key(|c| (c.iter().sum::<i64>(), c.clone()));
        out
    }

    /// Monomials of factor `f` whose class is bounded by `class`, with their classes.
    fn factor_monomials(&self, f: usize, class: &[i64]) -> Vec<(Monomial, Vec<i64>)> {
        let lc = &self.lowering_classes[f];
        let mut out = Vec::new();
        let mut cur = vec![0u16; lc.len()];
        let mut acc = vec![0i64; class.len()];
        fn rec(
            j: usize,
            lc: &[Vec<i64>],
            bound: &[i64],
            cur: &mut Monomial,
            acc: &mut Vec<i64>,
            out: &mut Vec<(Monomial, Vec<i64>)>,
        ) {
            if j == lc.len() {
                out.push((cur.clone(), acc.clone()));
                return;
            }
            let start = acc.clone();
            let mut e = 0u16;
            loop {
                if acc.iter().zip(bound).any(|(a, b)| a > b) {
                    break;
                }
                cur[j] = e;
                rec(j + 1, lc, bound, cur, acc, out);
                for (a, c) in acc.iter_mut().zip(&lc[j]) {
                    *a += c;
                }
                e += 1;
            }
            cur[j] = 0;
            acc.copy_from_slice(&start);
        }
        rec(0, lc, class, &mut cur, &mut acc, &mut out);
        out
    }

    /// Enumerates the weight block of the given class.
    pub fn block(&self, class: &[i64], cap: usize) -> Result<WeightBlock> {
        if class.len() != self.num_orbits || class.iter().any(|&c| c < 0) {
            return Err(Error::config("block", format!("invalid class {class:?}")));
        }
        let per_factor: Vec<Vec<(Monomial, Vec<i64>)>> = (0..self.num_factors())
            .map(|f| self.factor_monomials(f, class))
            .collect();
        let mut keys: Vec<Key> = Vec::new();
        let mut cur: Key = Vec::new();
        fn rec(
            f: usize,
            per_factor: &[Vec<(Monomial, Vec<i64>)>],
            left: &[i64],
            cur: &mut Key,
            keys: &mut Vec<Key>,
            cap: usize,
        ) -> Result<()> {
            if f == per_factor.len() {
                if left.iter().all(|&x| x == 0) {
                    if keys.len() >= cap {
                        return Err(Error::BlockTooLarge { cap });
                    }
                    keys.push(cur.clone());
                }
                return Ok(());
            }
            for (m, c) in &per_factor[f] {
                if c.iter().zip(left).all(|(a, b)| a <= b) {
                    let rest: Vec<i64> = left.iter().zip(c).map(|(a, b)| a - b).collect();
                    cur.push(m.clone());
                    rec(f + 1, per_factor, &rest, cur, keys, cap)?;
                    cur.pop();
                }
            }
            Ok(())
        }
        rec(0, &per_factor, class, &mut cur, &mut keys, cap)?;
        keys.sort();
        let index = keys
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, k)| (k, i))
            .collect();
        Ok(WeightBlock {
            class: class.to_vec(),
            keys,
            index,
        })
    }

    /// Coordinates of `x ∈ g` in the algebra acting on factor `f`.
    pub fn factor_coordinates(&self, f: usize, x: &GVec) -> Result<Vec<(usize, C64)>> {
        if f == self.origin() {
            Ok(nonzero(&self.factors[f].algebra().coordinates_of(x)?))
        } else {
            Ok(nonzero(x))
        }
    }

    /// Applies an element given in factor coordinates to factor `f`.
    pub fn apply_factor(&self, f: usize, coords: &[(usize, C64)], state: &State) -> State {
        let mut out = State::new();
        if coords.is_empty() {
            return out;
        }
        for (key, c) in state {
            let single: Sparse = vec![(key[f].clone(), *c)];
            for (m, v) in self.factors[f].apply(coords, &single) {
                let mut k = key.clone();
                k[f] = m;
                *out.entry(k).or_insert(ZERO) += v;
            }
        }
        out.retain(|_, v| *v != ZERO);
        out
    }

    /// `X^{(site)}` applied to a state.
    pub fn apply_site(&self, site: Site, x: &GVec, state: &State) -> Result<State> {
        let f = self.factor_of(site)?;
        let coords = self.factor_coordinates(f, x)?;
        Ok(self.apply_factor(f, &coords, state))
    }

    /// `Δ(X) = Σ_i X^{(i)} + X^{(0)}`.
    pub fn apply_diagonal(&self, x: &GVec, state: &State) -> Result<State> {
        let mut out = State::new();
        for f in 0..self.num_factors() {
            let coords = self.factor_coordinates(f, x)?;
            for (k, v) in self.apply_factor(f, &coords, state) {
                *out.entry(k).or_insert(ZERO) += v;
            }
        }
        out.retain(|_, v| *v != ZERO);
        Ok(out)
    }

    /// Rewrites a UElement as factor operators. Only modes of power 0 at the
    /// marked points and the origin can be realized.
    pub fn realize(&self, e: &UElement) -> Result<RealizedElement> {
        let d = self.g.dim();
        let check = |m: &Mode| -> Result<usize> {
            if m.power != 0 || m.site == Site::Infinity {
                return Err(Error::Unrealizable(format!(
                    "{}[{}]_{}",
                    self.g.basis_label(m.index),
                    m.power,
                    m.site
                )));
            }
            self.factor_of(m.site)
        };
        let origin = self.origin();
        let mut out = RealizedElement {
            constant: e.constant,
            ..Default::default()
        };
        let mut linear: Vec<GVec> = vec![GVec::zeros(d); self.num_factors()];
        for (m, v) in &e.linear {
            let f = check(m)?;
            linear[f][m.index] += v;
        }
        let mut origin_sym = DMatrix::from_element(d, d, ZERO);
        let mut with_origin: BTreeMap<(usize, usize), GVec> = BTreeMap::new();
        for ((a, b), v) in &e.quadratic {
            if *v == ZERO {
                continue;
            }
            let (fa, fb) = (check(a)?, check(b)?);
            if fa == origin && fb == origin {
                if a.index == b.index {
                    origin_sym[(a.index, a.index)] += v;
                } else {
                    origin_sym[(a.index, b.index)] += v * 0.5;
                    origin_sym[(b.index, a.index)] += v * 0.5;
                    let br = self.g.structure(a.index, b.index);
                    for &(k, s) in br {
                        linear[origin][k] += v * 0.5 * s;
                    }
                }
            } else if fb == origin {
                with_origin
                    .entry((fa, a.index))
                    .or_insert_with(|| GVec::zeros(d))[b.index] += v;
            } else if fa == origin {
                with_origin
                    .entry((fb, b.index))
                    .or_insert_with(|| GVec::zeros(d))[a.index] += v;
            } else {
                out.quadratic
                    .push((fa, vec![(a.index, ONE)], fb, vec![(b.index, *v)]));
            }
        }
        for ((f, idx), vec) in with_origin {
            let coords = self.factor_coordinates(origin, &vec)?;
            out.quadratic.push((f, vec![(idx, ONE)], origin, coords));
        }
        if origin_sym.max_norm() > 0.0 {
            let alg = self.factors[origin].algebra();
            let p = alg.coordinate_matrix();
            let sym = p * &origin_sym * p.transpose();
            let b = alg.basis_matrix();
            let back = &b * &sym * b.transpose();
            let resid = (back - &origin_sym).max_norm();
            if resid > 1e-9 * (1.0 + origin_sym.max_norm()) {
                return Err(Error::NotInFixedSubalgebra(resid));
            }
            for y in 0..sym.ncols() {
                let col: Vec<(usize, C64)> = (0..sym.nrows())
                    .filter(|&x| sym[(x, y)].norm() > 1e-15)
                    .map(|x| (x, sym[(x, y)]))
                    .collect();
                if !col.is_empty() {
                    out.quadratic.push((origin, col, origin, vec![(y, ONE)]));
                }
            }
        }
        for (f, v) in linear.iter().enumerate() {
            let coords = self.factor_coordinates(f, v)?;
            if !coords.is_empty() {
                out.linear.push((f, coords));
            }
        }
        Ok(out)
    }

    pub fn apply_realized(&self, r: &RealizedElement, state: &State) -> State {
        let mut out: State = state
            .iter()
            .map(|(k, v)| (k.clone(), v * r.constant))
            .collect();
        for (f, coords) in &r.linear {
            for (k, v) in self.apply_factor(*f, coords, state) {
                *out.entry(k).or_insert(ZERO) += v;
            }
        }
        for (fx, x, fy, y) in &r.quadratic {
            let mid = self.apply_factor(*fy, y, state);
            for (k, v) in self.apply_factor(*fx, x, &mid) {
                *out.entry(k).or_insert(ZERO) += v;
            }
        }
        out.retain(|_, v| *v != ZERO);
        out
    }

    pub fn apply_uelement(&self, e: &UElement, state: &State) -> Result<State> {
        Ok(self.apply_realized(&self.realize(e)?, state))
    }

    /// Matrix of a weight-preserving realized element on one block.
    pub fn block_matrix(&self, r: &RealizedElement, block: &WeightBlock) -> Result<BlockOperator> {
        let n = block.dim();
        let mut m = DMatrix::from_element(n, n, ZERO);
        for (col, key) in block.keys.iter().enumerate() {
            let mut s = State::new();
            s.insert(key.clone(), ONE);
            for (k, v) in self.apply_realized(r, &s) {
                match block.position(&k) {
                    Some(row) => m[(row, col)] += v,
                    None => {
                        return Err(Error::OffBlock(format!(
                            "{k:?} from {key:?} in block {:?}",
                            block.class
                        )))
                    }
                }
            }
        }
        Ok(BlockOperator {
            source: block.class.clone(),
            target: block.class.clone(),
            matrix: m,
        })
    }

    pub fn realize_uelement(&self, e: &UElement, block: &WeightBlock) -> Result<BlockOperator> {
        self.block_matrix(&self.realize(e)?, block)
    }

    /// `X^{(site)}` on a block; X must preserve Π₀-weights.
    pub fn site_operator(
        &self,
        x: &GVec,
        site: Site,
        block: &WeightBlock,
    ) -> Result<BlockOperator> {
        let f = self.factor_of(site)?;
        let r = RealizedElement {
            linear: vec![(f, self.factor_coordinates(f, x)?)],
            ..Default::default()
        };
        self.block_matrix(&r, block)
    }
}
