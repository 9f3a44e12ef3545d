//! Residue bookkeeping for rational functions given by their principal parts.
//!
//! For `f` with poles at `x_i`, the residues at the finite poles and the
//! residue at infinity (taken in the local coordinate `t⁻¹` after
//! multiplying by `t²`) cancel.

use crate::linalg::{binom, C64, ZERO};

/// `f(t) = Σ_i Σ_k c_{ik} / (t − x_i)^{k+1} + Σ_n q_n t^n`.
#[derive(Debug, Clone, Default)]
pub struct RationalFunction {
    pub poles: Vec<(C64, Vec<C64>)>,
    pub polynomial: Vec<C64>,
}

impl RationalFunction {
    pub fn eval(&self, t: C64) -> C64 {
        let mut acc = ZERO;
        for (x, coefs) in &self.poles {
            for (k, c) in coefs.iter().enumerate() {
                acc += c / (t - x).powi(k as i32 + 1);
            }
        }
        for (n, q) in self.polynomial.iter().enumerate() {
            acc += q * t.powi(n as i32);
        }
        acc
    }

    /// Residue at the pole `x_i` by trapezoidal integration on a small circle.
    pub fn local_residue(&self, i: usize) -> C64 {
        let x = self.poles[i].0;
        let gap = self
            .poles
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, (y, _))| (x - y).norm())
            .fold(f64::INFINITY, f64::min);
        let radius = if gap.is_finite() { 0.5 * gap } else { 1.0 };
        let samples = 512;
        let mut acc = ZERO;
        for s in 0..samples {
            let e = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * s as f64 / samples as f64);
            // dt = i r e dθ, and the 2πi in the denominator cancels the i.
            acc += self.eval(x + e * radius) * e * radius;
        }
        acc / samples as f64
    }

    /// Coefficient of `t^{−j}` (`j ≥ 1`) in the expansion of `f` about infinity.
    pub fn coefficient_at_infinity(&self, j: i64) -> C64 {
        let mut acc = ZERO;
        for (x, coefs) in &self.poles {
            // 1/(t−x)^{k+1} = Σ_{j>k} C(j−1, k) x^{j−1−k} t^{−j}
            for (k, c) in coefs.iter().enumerate() {
                let k = k as i64;
                if j > k {
                    acc += c * binom(j - 1, k) * x.powi((j - 1 - k) as i32);
                }
            }
        }
        acc
    }

    /// `res_{t⁻¹} t² ι_{t⁻¹} f`: in `s = 1/t` this is the `s⁻¹` coefficient of
    /// `s⁻² f(1/s)`, which is the `t⁻¹` coefficient of f.
    pub fn residue_at_infinity(&self) -> C64 {
        self.coefficient_at_infinity(1)
    }

    /// `|−res_∞ + Σ_i res_{x_i}|`.
    pub fn residue_sum(&self) -> f64 {
        let mut total = -self.residue_at_infinity();
        for i in 0..self.poles.len() {
            total += self.local_residue(i);
        }
        total.norm()
    }

    /// Size of the data, used to scale tolerances.
    pub fn scale(&self) -> f64 {
        self.poles
            .iter()
            .flat_map(|(_, c)| c.iter())
            .chain(self.polynomial.iter())
            .fold(1.0, |m: f64, z| m.max(z.norm()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, ONE};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn simple_pole() {
        let f = RationalFunction {
            poles: vec![(c(1.0), vec![ONE])],
            polynomial: vec![],
        };
        assert!((f.local_residue(0) - ONE).norm() < 1e-13);
        assert!((f.residue_at_infinity() - ONE).norm() < 1e-15);
        assert!(f.residue_sum() < 1e-13);
    }

    #[test]
    fn pole_of_order_three() {
        let f = RationalFunction {
            poles: vec![(ZERO, vec![ONE]), (c(2.0), vec![ZERO, ZERO, ONE])],
            polynomial: vec![],
        };
        assert!(f.residue_sum() < 1e-13);
        assert!(f.local_residue(1).norm() < 1e-13);
        // 1/(t−2)³ = t⁻³ + 6t⁻⁴ + …
        assert!((f.coefficient_at_infinity(3) - ONE).norm() < 1e-15);
        assert!((f.coefficient_at_infinity(4) - c(6.0)).norm() < 1e-15);
    }

    #[test]
    fn random_five_poles() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let mut poles: Vec<(C64, Vec<C64>)> = Vec::new();
            while poles.len() < 5 {
                let x = C64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
                if poles.iter().all(|(y, _)| (x - y).norm() > 0.3) {
                    let order = rng.gen_range(1..=3);
                    let coefs = (0..order)
                        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                        .collect();
                    poles.push((x, coefs));
                }
            }
            let f = RationalFunction {
                poles,
                polynomial: vec![c(0.5), C64::new(0.0, 1.0)],
            };
            assert!(f.residue_sum() <= 1e-12 * f.scale());
        }
    }
}
