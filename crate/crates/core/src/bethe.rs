//! Cyclotomic Bethe equations, their solution by multistart Newton, the
//! recursive weight function and the eigenvector and singular-vector checks.
//!
//! The origin weight enters the equations and the eigenvalues as
//! `Tλ₀ + Λ₀` and the twist as `Tχ`. These are the combinations that
//! `H_{i,0}` produces on highest-weight vectors with the closed forms of
//! [`crate::hamiltonians`].

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonians::{HamiltonianKind, HamiltonianSet};
use crate::lie::{lambda0_roots, Automorphism, SimpleLieAlgebra, Weight};
use crate::linalg::{c, GVec, C64, ONE, ZERO};
use crate::rep::{State, TensorModule, TriangularAlgebra};
use crate::takiff::Site;

/// Data of a Bethe ansatz problem.
#[derive(Debug, Clone)]
pub struct BetheProblem {
    pub g: SimpleLieAlgebra,
    pub sigma: Automorphism,
    pub points: Vec<C64>,
    pub lambdas: Vec<Weight>,
    pub lambda0: Weight,
    pub chi: Weight,
    pub colors: Vec<usize>,
    /// Λ₀.
    pub shift: Weight,
    // ⟨α_c, L^r α_d⟩ indexed [r][c][d]
    root_pairs: Vec<Vec<Vec<C64>>>,
    // ⟨α_c, L^r λ_i⟩ indexed [r][c][i]
    site_pairs: Vec<Vec<Vec<C64>>>,
    // ⟨α_c, Tλ₀ + Λ₀⟩ − ½ Σ_{r≥1} ⟨α_c, L^r α_c⟩
    origin_pairs: Vec<C64>,
    // T⟨α_c, χ⟩
    chi_pairs: Vec<C64>,
}

/// Converged roots from one start.
#[derive(Debug, Clone, Serialize)]
pub struct BetheSolution {
    pub roots: Vec<C64>,
    pub residual: f64,
    pub iterations: usize,
    pub start: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub starts: usize,
    pub max_iterations: usize,
    pub max_halvings: usize,
    pub tolerance: f64,
    pub dedup: f64,
    /// Solutions with a root this close (relative) to a pole are discarded.
    pub separation: f64,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            starts: 200,
            max_iterations: 100,
            max_halvings: 40,
            tolerance: 1e-10,
            dedup: 1e-7,
            separation: 1e-5,
            seed: 0,
        }
    }
}

fn norm_inf(v: &DVector<C64>) -> f64 {
    v.iter().fold(0.0, |m: f64, x| m.max(x.norm()))
}

fn norm2(s: &State) -> f64 {
    s.values().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

impl BetheProblem {
    pub fn new(
        g: &SimpleLieAlgebra,
        sigma: &Automorphism,
        points: Vec<C64>,
        lambdas: Vec<Weight>,
        lambda0: Weight,
        chi: Weight,
        colors: Vec<usize>,
    ) -> Result<Self> {
        if lambdas.len() != points.len() {
            return Err(Error::config(
                "lambda",
                "one weight per marked point is required",
            ));
        }
        if let Some(&bad) = colors.iter().find(|&&col| col >= g.rank()) {
            return Err(Error::config(
                "colors",
                format!("colour {bad} is not a simple root index"),
            ));
        }
        let t = sigma.order();
        let shift = lambda0_roots(g, sigma);
        let alpha: Vec<Weight> = (0..g.rank()).map(|i| g.simple_root(i)).collect();
        let root_pairs = (0..t as i64)
            .map(|r| {
                alpha
                    .iter()
                    .map(|a| {
                        alpha
                            .iter()
                            .map(|b| g.pair(a, &sigma.sigma_dual_pow(r, b)))
                            .collect()
                    })
                    .collect()
            })
            .collect::<Vec<Vec<Vec<C64>>>>();
        let site_pairs = (0..t as i64)
            .map(|r| {
                alpha
                    .iter()
                    .map(|a| {
                        lambdas
                            .iter()
                            .map(|l| g.pair(a, &sigma.sigma_dual_pow(r, l)))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let origin = lambda0.scale(c(t as f64)).add(&shift);
        let origin_pairs = (0..g.rank())
            .map(|k| {
                let self_term: C64 = (1..t).map(|r| root_pairs[r][k][k]).sum();
                g.pair(&alpha[k], &origin) - self_term * 0.5
            })
            .collect();
        let chi_pairs = alpha.iter().map(|a| g.pair(a, &chi) * t as f64).collect();
        Ok(BetheProblem {
            g: g.clone(),
            sigma: sigma.clone(),
            points,
            lambdas,
            lambda0,
            chi,
            colors,
            shift,
            root_pairs,
            site_pairs,
            origin_pairs,
            chi_pairs,
        })
    }

    pub fn m(&self) -> usize {
        self.colors.len()
    }

    fn order(&self) -> i64 {
        self.sigma.order() as i64
    }

    /// `λ_∞ = λ₀ + Σ_i Π₀λ_i − Σ_j Π₀α_{c(j)}`.
    pub fn lambda_infinity(&self) -> Weight {
        let mut out = self.lambda0.clone();
        for l in &self.lambdas {
            out = out.add(&self.sigma.project_weight(l));
        }
        for &col in &self.colors {
            out = out.sub(&self.sigma.project_weight(&self.g.simple_root(col)));
        }
        out
    }

    /// Errors if some root meets `0`, a Γ-translate of a marked point or of another root.
    pub fn check_roots(&self, w: &[C64]) -> Result<()> {
        self.check_separation(w, 1e-9)
    }

    /// Like [`check_roots`](Self::check_roots) with a relative separation `rel`.
    pub fn check_separation(&self, w: &[C64], rel: f64) -> Result<()> {
        if w.len() != self.m() {
            return Err(Error::config(
                "roots",
                format!("expected {} roots, got {}", self.m(), w.len()),
            ));
        }
        let scale = self
            .points
            .iter()
            .chain(w)
            .fold(1.0, |m: f64, z| m.max(z.norm()));
        let tol = rel * scale;
        for (j, wj) in w.iter().enumerate() {
            if wj.norm() <= tol {
                return Err(Error::Pole(format!("w[{j}] = 0")));
            }
            for r in 0..self.order() {
                let om = self.sigma.omega_pow(r);
                for (i, z) in self.points.iter().enumerate() {
                    if (wj - om * z).norm() <= tol {
                        return Err(Error::Pole(format!("w[{j}] on the orbit of z[{i}]")));
                    }
                }
                for (k, wk) in w.iter().enumerate().skip(j + 1) {
                    if (wj - om * wk).norm() <= tol {
                        return Err(Error::Pole(format!("w[{j}] on the orbit of w[{k}]")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn residual(&self, w: &[C64]) -> Result<DVector<C64>> {
        self.check_roots(w)?;
        let m = self.m();
        let mut out = DVector::from_element(m, ZERO);
        for j in 0..m {
            let cj = self.colors[j];
            let mut acc = ZERO;
            for r in 0..self.order() {
                let om = self.sigma.omega_pow(r);
                for (i, z) in self.points.iter().enumerate() {
                    acc += self.site_pairs[r as usize][cj][i] / (w[j] - om * z);
                }
                for k in 0..m {
                    if k != j {
                        acc -= self.root_pairs[r as usize][cj][self.colors[k]] / (w[j] - om * w[k]);
                    }
                }
            }
            acc += self.origin_pairs[cj] / w[j] + self.chi_pairs[cj];
            out[j] = acc;
        }
        Ok(out)
    }

    pub fn jacobian(&self, w: &[C64]) -> Result<DMatrix<C64>> {
        self.check_roots(w)?;
        let m = self.m();
        let mut jac = DMatrix::from_element(m, m, ZERO);
        for j in 0..m {
            let cj = self.colors[j];
            let mut diag = ZERO;
            for r in 0..self.order() {
                let om = self.sigma.omega_pow(r);
                for (i, z) in self.points.iter().enumerate() {
                    diag -= self.site_pairs[r as usize][cj][i] / (w[j] - om * z).powi(2);
                }
                for k in 0..m {
                    if k != j {
                        let a = self.root_pairs[r as usize][cj][self.colors[k]];
                        let d = (w[j] - om * w[k]).powi(2);
                        diag += a / d;
                        jac[(j, k)] -= a * om / d;
                    }
                }
            }
            diag -= self.origin_pairs[cj] / (w[j] * w[j]);
            jac[(j, j)] = diag;
        }
        Ok(jac)
    }

    /// `w_j R_j(w)`, which shares the finite zeros of the residual but does
    /// not decay as roots run off to infinity.
    fn scaled(&self, w: &[C64]) -> Result<(DVector<C64>, DVector<C64>)> {
        let r = self.residual(w)?;
        let f = DVector::from_fn(w.len(), |j, _| w[j] * r[j]);
        Ok((r, f))
    }

    fn newton(&self, start: Vec<C64>, opts: &SolverOptions) -> Option<(Vec<C64>, f64, usize)> {
        let mut w = start;
        let (mut r, mut f) = self.scaled(&w).ok()?;
        let mut fnorm = norm_inf(&f);
        for it in 0..=opts.max_iterations {
            let rn = norm_inf(&r);
            if rn <= opts.tolerance && fnorm <= opts.tolerance {
                return Some((w, rn, it));
            }
            if it == opts.max_iterations {
                break;
            }
            let mut jac = self.jacobian(&w).ok()?;
            for j in 0..w.len() {
                for k in 0..w.len() {
                    jac[(j, k)] *= w[j];
                }
                jac[(j, j)] += r[j];
            }
            let step = jac.lu().solve(&f)?;
            let mut scale = 1.0;
            let mut accepted = false;
            for _ in 0..=opts.max_halvings {
                let trial: Vec<C64> = w
                    .iter()
                    .zip(step.iter())
                    .map(|(a, s)| a - s * scale)
                    .collect();
                if let Ok((tr, tf)) = self.scaled(&trial) {
                    let tn = norm_inf(&tf);
                    if tn < fnorm {
                        w = trial;
                        r = tr;
                        f = tf;
                        fnorm = tn;
                        accepted = true;
                        break;
                    }
                }
                scale *= 0.5;
            }
            if !accepted {
                return None;
            }
        }
        None
    }

    /// Roots grouped by colour and sorted, for comparing solutions up to
    /// permutations of equal colours.
    fn canonical(&self, w: &[C64]) -> Vec<C64> {
        let mut idx: Vec<usize> = (0..w.len()).collect();
        idx.sort_by(|&a, &b| {
            (self.colors[a], w[a].re, w[a].im)
                .partial_cmp(&(self.colors[b], w[b].re, w[b].im))
                .unwrap()
        });
        idx.into_iter().map(|i| w[i]).collect()
    }

    /// Multistart damped Newton. Starts are drawn on an annulus spanning the
    /// moduli of the marked points; results are deterministic in the seed.
    pub fn solve(&self, opts: &SolverOptions) -> Vec<BetheSolution> {
        let m = self.m();
        if m == 0 {
            return Vec::new();
        }
        let (lo, hi) = if self.points.is_empty() {
            (0.5, 1.5)
        } else {
            let moduli = self.points.iter().map(|z| z.norm());
            let lo = moduli.clone().fold(f64::INFINITY, f64::min);
            let hi = moduli.fold(0.0, f64::max);
            (0.5 * lo, 1.5 * hi)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let starts: Vec<Vec<C64>> = (0..opts.starts)
            .map(|_| {
                (0..m)
                    .map(|_| {
                        let r = rng.gen_range(lo..hi);
                        let phi = rng.gen_range(0.0..std::f64::consts::TAU);
                        C64::from_polar(r, phi)
                    })
                    .collect()
            })
            .collect();
        let runs: Vec<Option<(Vec<C64>, f64, usize)>> = starts
            .into_par_iter()
            .map(|s| self.newton(s, opts))
            .collect();
        let mut out: Vec<BetheSolution> = Vec::new();
        for (start, run) in runs.into_iter().enumerate() {
            let Some((w, residual, iterations)) = run else {
                continue;
            };
            if self.check_separation(&w, opts.separation).is_err() {
                continue;
            }
            let canon = self.canonical(&w);
            let dup = out.iter().any(|s| {
                s.roots
                    .iter()
                    .zip(&canon)
                    .all(|(a, b)| (a - b).norm() <= opts.dedup * (1.0 + b.norm()))
            });
            if !dup {
                out.push(BetheSolution {
                    roots: canon,
                    residual,
                    iterations,
                    start,
                });
            }
        }
        out
    }

    /// Eigenvalue of `H_{i,0}` on the weight function.
    pub fn eigenvalue(&self, w: &[C64], i: usize) -> C64 {
        let g = &self.g;
        let li = &self.lambdas[i];
        let zi = self.points[i];
        let t = self.order();
        let mut acc = ZERO;
        for s in 0..t {
            let om = self.sigma.omega_pow(s);
            for (j, (zj, lj)) in self.points.iter().zip(&self.lambdas).enumerate() {
                if j != i {
                    acc += g.pair(li, &self.sigma.sigma_dual_pow(s, lj)) / (zi - om * zj);
                }
            }
            for (wj, &col) in w.iter().zip(&self.colors) {
                acc -=
                    g.pair(li, &self.sigma.sigma_dual_pow(s, &g.simple_root(col))) / (zi - om * wj);
            }
        }
        let origin = self.lambda0.scale(c(t as f64)).add(&self.shift);
        let self_term: C64 = (1..t)
            .map(|s| g.pair(li, &self.sigma.sigma_dual_pow(s, li)))
            .sum();
        acc += (g.pair(li, &origin) + self_term * 0.5) / zi;
        acc + g.pair(li, &self.chi) * t as f64
    }

    /// `ν(t)` evaluated at a point, in simple-root coordinates.
    pub fn nu(&self, w: &[C64], t: C64) -> Weight {
        let mut acc = self.chi.clone();
        for r in 0..self.order() {
            let om = self.sigma.omega_pow(r);
            for (z, l) in self.points.iter().zip(&self.lambdas) {
                acc = acc.add(&self.sigma.sigma_dual_pow(r, l).scale(ONE / (t - om * z)));
            }
            for (wj, &col) in w.iter().zip(&self.colors) {
                let a = self.sigma.sigma_dual_pow(r, &self.g.simple_root(col));
                acc = acc.sub(&a.scale(ONE / (t - om * wj)));
            }
        }
        let origin = self.lambda0.scale(c(self.order() as f64)).add(&self.shift);
        acc.add(&origin.scale(ONE / t))
    }

    /// `⟨ν_j⁰, α_{c(j)}⟩` with `ν_j⁰` the constant term of `ν` at `w_j`.
    pub fn nu_pairing(&self, w: &[C64], j: usize) -> C64 {
        let alpha = self.g.simple_root(self.colors[j]);
        let mut acc = self.chi.clone();
        for r in 0..self.order() {
            let om = self.sigma.omega_pow(r);
            for (z, l) in self.points.iter().zip(&self.lambdas) {
                acc = acc.add(&self.sigma.sigma_dual_pow(r, l).scale(ONE / (w[j] - om * z)));
            }
            for (k, (wk, &col)) in w.iter().zip(&self.colors).enumerate() {
                if k == j && r == 0 {
                    continue;
                }
                let a = self.sigma.sigma_dual_pow(r, &self.g.simple_root(col));
                acc = acc.sub(&a.scale(ONE / (w[j] - om * wk)));
            }
        }
        let origin = self.lambda0.scale(c(self.order() as f64)).add(&self.shift);
        acc = acc.add(&origin.scale(ONE / w[j]));
        self.g.pair(&acc, &alpha)
    }
}

/// One summand `x ⊗ y₁ ⊗ … ⊗ y_s` of the recursion.
struct Term {
    state: State,
    ys: Vec<GVec>,
}

/// The weight function `ψ`, built by applying `θ_m`, then `θ_{m−1}`, down to `θ_1`.
pub fn weight_function(problem: &BetheProblem, module: &TensorModule, w: &[C64]) -> Result<State> {
    problem.check_roots(w)?;
    let g = &problem.g;
    let sigma = &problem.sigma;
    let t = problem.order();
    let mut top = State::new();
    top.insert(module.highest_key(), ONE);
    let ys: Vec<GVec> = problem
        .colors
        .iter()
        .map(|&col| g.basis_vector(g.f_index(g.simple_root_index(col))))
        .collect();
    let mut terms = vec![Term { state: top, ys }];
    for s in (0..problem.m()).rev() {
        let ws = w[s];
        let mut next: Vec<Term> = Vec::new();
        for term in &terms {
            let ys = &term.ys;
            let y = &ys[s];
            let rest: Vec<GVec> = ys[..s].to_vec();
            let origin = sigma.project(0, y) * c(t as f64);
            let st = module.apply_site(Site::Origin, &origin, &term.state)?;
            push(&mut next, scale_state(st, ONE / ws), rest.clone());
            for j in 0..t {
                let yj = sigma.apply_power(j, y);
                let om = sigma.omega_pow(-j);
                for (i, z) in problem.points.iter().enumerate() {
                    let st = module.apply_site(Site::Point(i), &yj, &term.state)?;
                    push(
                        &mut next,
                        scale_state(st, ONE / (ws - om * z)),
                        rest.clone(),
                    );
                }
                for i in 0..s {
                    let br = g.bracket(&yj, &ys[i]);
                    if br.iter().all(|v| *v == ZERO) {
                        continue;
                    }
                    let mut replaced = rest.clone();
                    replaced[i] = br;
                    push(
                        &mut next,
                        scale_state(term.state.clone(), ONE / (ws - om * w[i])),
                        replaced,
                    );
                }
            }
        }
        terms = next;
    }
    let sign = if problem.m().is_multiple_of(2) {
        ONE
    } else {
        -ONE
    };
    let mut psi = State::new();
    for term in terms {
        for (k, v) in term.state {
            *psi.entry(k).or_insert(ZERO) += v * sign;
        }
    }
    psi.retain(|_, v| *v != ZERO);
    Ok(psi)
}

fn scale_state(mut s: State, f: C64) -> State {
    for v in s.values_mut() {
        *v *= f;
    }
    s
}

fn push(out: &mut Vec<Term>, state: State, ys: Vec<GVec>) {
    if !state.is_empty() {
        out.push(Term { state, ys });
    }
}

/// Class of the block that contains the weight function.
pub fn expected_class(problem: &BetheProblem, module: &TensorModule) -> Vec<i64> {
    let mut depth = vec![0i64; problem.g.rank()];
    for &col in &problem.colors {
        depth[col] += 1;
    }
    module.class_of(&depth)
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenCheck {
    pub hamiltonian: String,
    pub eigenvalue: C64,
    /// Whether `eigenvalue` is the closed form (true) or a Rayleigh quotient.
    pub predicted: bool,
    pub residual: f64,
    /// Sine of the angle between `Hψ` and `ψ`.
    pub sine: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenReport {
    pub norm: f64,
    pub inconclusive: bool,
    pub checks: Vec<EigenCheck>,
}

fn inner(a: &State, b: &State) -> C64 {
    a.iter()
        .map(|(k, v)| v.conj() * b.get(k).copied().unwrap_or(ZERO))
        .sum()
}

/// `‖Hψ − Eψ‖/‖ψ‖` for every Hamiltonian, with E the closed form for
/// `H_{i,0}` and the Rayleigh quotient otherwise.
pub fn verify_eigenvector(
    problem: &BetheProblem,
    module: &TensorModule,
    set: &HamiltonianSet,
    psi: &State,
    w: &[C64],
) -> Result<EigenReport> {
    let norm = norm2(psi);
    let scale = psi.len().max(1) as f64;
    if norm <= 1e-13 * scale {
        return Ok(EigenReport {
            norm,
            inconclusive: true,
            checks: Vec::new(),
        });
    }
    let checks = set
        .items
        .iter()
        .map(|h| {
            let hpsi = module.apply_uelement(&h.element, psi)?;
            let (e, predicted) = match h.kind {
                HamiltonianKind::Site { point, power: 0 } => (problem.eigenvalue(w, point), true),
                _ => (inner(psi, &hpsi) / (norm * norm), false),
            };
            let mut diff = hpsi.clone();
            for (k, v) in psi {
                *diff.entry(k.clone()).or_insert(ZERO) -= v * e;
            }
            let residual = norm2(&diff) / norm;
            let hn = norm2(&hpsi);
            let rq = inner(psi, &hpsi) / (norm * norm);
            let mut perp = hpsi;
            for (k, v) in psi {
                *perp.entry(k.clone()).or_insert(ZERO) -= v * rq;
            }
            let sine = if hn > 0.0 { norm2(&perp) / hn } else { 0.0 };
            Ok(EigenCheck {
                hamiltonian: h.label.clone(),
                eigenvalue: e,
                predicted,
                residual,
                sine,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EigenReport {
        norm,
        inconclusive: false,
        checks,
    })
}

/// `max_X ‖Δ(X)ψ‖/‖ψ‖` over the raising basis of `g^σ`.
pub fn verify_singular(problem: &BetheProblem, module: &TensorModule, psi: &State) -> Result<f64> {
    let fixed = TriangularAlgebra::fixed(&problem.g, &problem.sigma)?;
    let norm = norm2(psi);
    let mut worst: f64 = 0.0;
    for x in fixed.raising() {
        let out = module.apply_diagonal(&fixed.basis()[x], psi)?;
        worst = worst.max(norm2(&out) / norm);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::ChiForm;
    use crate::lie::Series;

    fn sl2_closed_form() -> (BetheProblem, TensorModule, HamiltonianSet) {
        let g = SimpleLieAlgebra::new(Series::A, 1).unwrap();
        let s = Automorphism::identity(&g);
        let l1 = g.from_fundamental(&[c(2.0)]).unwrap();
        let l0 = g.from_fundamental(&[c(2.0)]).unwrap();
        let p = BetheProblem::new(
            &g,
            &s,
            vec![c(1.0)],
            vec![l1.clone()],
            l0.clone(),
            Weight::zero(1),
            vec![0],
        )
        .unwrap();
        let module = TensorModule::new(&g, &s, &[l1], &l0).unwrap();
        let set = HamiltonianSet::build(&g, &s, vec![c(1.0)], ChiForm::zero(&g)).unwrap();
        (p, module, set)
    }

    #[test]
    fn closed_form_root() {
        let (p, module, set) = sl2_closed_form();
        let r = p.residual(&[c(0.5)]).unwrap();
        assert!(r[0].norm() < 1e-14);
        let sols = p.solve(&SolverOptions::default());
        assert_eq!(sols.len(), 1);
        assert!((sols[0].roots[0] - c(0.5)).norm() < 1e-10);
        assert!((p.eigenvalue(&sols[0].roots, 0) - c(-2.0)).norm() < 1e-10);
        let psi = weight_function(&p, &module, &sols[0].roots).unwrap();
        let rep = verify_eigenvector(&p, &module, &set, &psi, &sols[0].roots).unwrap();
        for ch in &rep.checks {
            assert!(ch.residual < 1e-8, "{ch:?}");
        }
        assert!(verify_singular(&p, &module, &psi).unwrap() < 1e-9);
    }

    #[test]
    fn one_root_unrolled() {
        // ψ = −F^{(0)}v/w − F^{(1)}v/(w − z)
        let (p, module, _) = sl2_closed_form();
        let w = C64::new(0.3, 0.4);
        let psi = weight_function(&p, &module, &[w]).unwrap();
        let at_site = vec![vec![1u16], vec![0u16]];
        let at_origin = vec![vec![0u16], vec![1u16]];
        assert!((psi[&at_site] + ONE / (w - c(1.0))).norm() < 1e-14);
        assert!((psi[&at_origin] + ONE / w).norm() < 1e-14);
    }

    #[test]
    fn jacobian_matches_differences() {
        let g = SimpleLieAlgebra::new(Series::A, 2).unwrap();
        let s = Automorphism::new(&g, &[1, 0], &[ONE, ONE], 2, None).unwrap();
        let l = g.from_fundamental(&[c(1.0), c(2.0)]).unwrap();
        let l0 = g.from_fundamental(&[c(0.5), c(0.5)]).unwrap();
        let chi = g.from_fundamental(&[c(0.3), c(-0.3)]).unwrap();
        let p = BetheProblem::new(
            &g,
            &s,
            vec![c(1.0), C64::new(0.2, 1.3)],
            vec![l.clone(), l],
            l0,
            chi,
            vec![0, 1, 0],
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let w: Vec<C64> = (0..3)
                .map(|_| C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                .collect();
            let jac = p.jacobian(&w).unwrap();
            let h = 1e-6;
            for k in 0..3 {
                let mut wp = w.clone();
                let mut wm = w.clone();
                wp[k] += h;
                wm[k] -= h;
                let fd = (p.residual(&wp).unwrap() - p.residual(&wm).unwrap()) / c(2.0 * h);
                let col = jac.column(k);
                let scale = col.iter().fold(1.0, |m: f64, x| m.max(x.norm()));
                for j in 0..3 {
                    assert!((fd[j] - col[j]).norm() <= 1e-6 * scale);
                }
            }
        }
    }

    #[test]
    fn empty_root_set_gives_highest_vector() {
        let g = SimpleLieAlgebra::new(Series::A, 2).unwrap();
        let s = Automorphism::new(&g, &[1, 0], &[ONE, ONE], 2, None).unwrap();
        let l = g.from_fundamental(&[c(1.0), c(0.0)]).unwrap();
        let l0 = g.from_fundamental(&[c(0.7), c(0.7)]).unwrap();
        let chi = g.from_fundamental(&[c(0.4), c(-0.4)]).unwrap();
        let pts = vec![c(1.0), C64::new(-0.4, 0.9)];
        let p = BetheProblem::new(
            &g,
            &s,
            pts.clone(),
            vec![l.clone(), l.clone()],
            l0.clone(),
            chi.clone(),
            vec![],
        )
        .unwrap();
        let module = TensorModule::new(&g, &s, &[l.clone(), l], &l0).unwrap();
        let chi = ChiForm::new(&g, &s, chi, 1e-12).unwrap();
        let set = HamiltonianSet::build(&g, &s, pts, chi).unwrap();
        let psi = weight_function(&p, &module, &[]).unwrap();
        assert_eq!(psi.len(), 1);
        let rep = verify_eigenvector(&p, &module, &set, &psi, &[]).unwrap();
        for ch in rep.checks {
            assert!(ch.residual < 1e-12, "{ch:?}");
        }
    }

    #[test]
    fn nu_equivariance() {
        let g = SimpleLieAlgebra::new(Series::A, 2).unwrap();
        let s = Automorphism::new(&g, &[1, 0], &[ONE, ONE], 2, None).unwrap();
        let l = g.from_fundamental(&[c(1.0), c(2.0)]).unwrap();
        let l0 = g.from_fundamental(&[c(0.5), c(0.5)]).unwrap();
        let chi = g.from_fundamental(&[c(0.3), c(-0.3)]).unwrap();
        let p = BetheProblem::new(&g, &s, vec![c(1.0)], vec![l], l0, chi, vec![0]).unwrap();
        let w = [C64::new(0.4, 0.7)];
        let t = C64::new(-0.3, 1.7);
        let lhs = p.nu(&w, s.omega() * t);
        let rhs = s.sigma_dual(&p.nu(&w, t)).scale(ONE / s.omega());
        assert!(lhs.distance(&rhs) < 1e-13);
    }
}
