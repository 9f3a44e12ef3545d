use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::hamiltonians::ChiForm;
use crate::lie::{Automorphism, Series, SimpleLieAlgebra, Weight};
use crate::linalg::C64;
use crate::takiff::{CurrentAlgebra, Orders};

/// A real number or an `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(f64),
    Complex([f64; 2]),
}

impl Scalar {
    pub fn value(self) -> C64 {
        match self {
            Scalar::Real(x) => C64::new(x, 0.0),
            Scalar::Complex([re, im]) => C64::new(re, im),
        }
    }
}

/// `τ` for a simple root, either as an exponent `k` (`τ = ω^k`) or as an
/// explicit `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Tau {
    Exponent(i64),
    Complex([f64; 2]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub series: String,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomorphismSpec {
    pub diagram_perm: Vec<usize>,
    pub tau_simple: Vec<Tau>,
    #[serde(rename = "T")]
    pub order: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Truncation {
    pub n_inf: usize,
    pub n_sites: Vec<usize>,
    pub n0: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub identity: f64,
    pub commute: f64,
    pub eigen: f64,
    pub singular: f64,
    pub solver: f64,
    pub chi: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            identity: 1e-8,
            commute: 1e-9,
            eigen: 1e-8,
            singular: 1e-9,
            solver: 1e-10,
            chi: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Blocks {
    /// Largest total height of the Π₀-weight blocks checked by `commute`.
    pub max_height: i64,
    /// Safety cap on the dimension of a single block.
    pub cap: usize,
}

impl Default for Blocks {
    fn default() -> Self {
        Blocks {
            max_height: 6,
            cap: 200_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Solver {
    pub starts: usize,
    pub max_iterations: usize,
    pub max_halvings: usize,
    pub dedup: f64,
    pub separation: f64,
}

impl Default for Solver {
    fn default() -> Self {
        let d = crate::bethe::SolverOptions::default();
        Solver {
            starts: d.starts,
            max_iterations: d.max_iterations,
            max_halvings: d.max_halvings,
            dedup: d.dedup,
            separation: d.separation,
        }
    }
}

fn default_samples() -> usize {
    8
}

/// Everything a run needs, as read from a JSON file.
///
/// Weights (`lambda`, `lambda0`, `chi`) are in fundamental-weight coordinates.
/// `colors` are 0-based simple-root indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub algebra: AlgebraSpec,
    pub automorphism: AutomorphismSpec,
    #[serde(default)]
    pub omega: Option<[f64; 2]>,
    pub points: Vec<[f64; 2]>,
    pub lambda: Vec<Vec<Scalar>>,
    pub lambda0: Vec<Scalar>,
    #[serde(default)]
    pub chi: Option<Vec<Scalar>>,
    #[serde(default)]
    pub colors: Vec<usize>,
    #[serde(default)]
    pub truncation: Option<Truncation>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub blocks: Blocks,
    #[serde(default)]
    pub solver: Solver,
    #[serde(default = "default_samples")]
    pub surat_samples: usize,
}

/// A validated configuration with the algebraic objects built.
#[derive(Debug, Clone)]
pub struct Model {
    pub config: RunConfig,
    pub g: SimpleLieAlgebra,
    pub sigma: Automorphism,
    pub points: Vec<C64>,
    pub lambdas: Vec<Weight>,
    pub lambda0: Weight,
    pub chi: Weight,
    pub chi_form: ChiForm,
    pub orders: Orders,
}

fn values(v: &[Scalar]) -> Vec<C64> {
    v.iter().map(|s| s.value()).collect()
}

fn weight(g: &SimpleLieAlgebra, field: &str, v: &[Scalar]) -> Result<Weight> {
    if v.len() != g.rank() {
        return Err(Error::config(
            field,
            format!(
                "expected {} fundamental coordinates, got {}",
                g.rank(),
                v.len()
            ),
        ));
    }
    g.from_fundamental(&values(v))
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::config("config", e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("config", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// SHA-256 of the canonical JSON serialization.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("configs serialize");
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Checks every precondition and builds the model.
    pub fn validate(&self) -> Result<Model> {
        let series: Series = self.algebra.series.parse().map_err(|_| {
            Error::config(
                "algebra.series",
                format!("unsupported series {:?}", self.algebra.series),
            )
        })?;
        let g = SimpleLieAlgebra::new(series, self.algebra.rank)
            .map_err(|e| Error::config("algebra.rank", e.to_string()))?;
        let a = &self.automorphism;
        if a.order == 0 {
            return Err(Error::config("automorphism.T", "must be at least 1"));
        }
        let omega = match self.omega {
            Some([re, im]) => C64::new(re, im),
            None => crate::lie::default_omega(a.order),
        };
        let tau: Vec<C64> = a
            .tau_simple
            .iter()
            .map(|t| match *t {
                Tau::Exponent(k) => omega.powi(k.rem_euclid(a.order as i64) as i32),
                Tau::Complex([re, im]) => C64::new(re, im),
            })
            .collect();
        let sigma = Automorphism::new(
            &g,
            &a.diagram_perm,
            &tau,
            a.order,
            self.omega.map(|[re, im]| C64::new(re, im)),
        )
        .map_err(|e| Error::config("automorphism", e.to_string()))?;
        let rem = sigma.order_residual();
        if rem > 1e-10 {
            return Err(Error::config(
                "automorphism.T",
                format!("σ^T ≠ 1 (residual {rem:.3e}); T must be a multiple of the order of σ"),
            ));
        }

        let points: Vec<C64> = self
            .points
            .iter()
            .map(|&[re, im]| C64::new(re, im))
            .collect();
        if self.lambda.len() != points.len() {
            return Err(Error::config(
                "lambda",
                format!("{} weights for {} points", self.lambda.len(), points.len()),
            ));
        }
        let lambdas = self
            .lambda
            .iter()
            .enumerate()
            .map(|(i, v)| weight(&g, &format!("lambda[{i}]"), v))
            .collect::<Result<Vec<_>>>()?;
        let lambda0 = weight(&g, "lambda0", &self.lambda0)?;
        if !sigma.is_fixed_weight(&lambda0, 1e-10) {
            return Err(Error::config("lambda0", "must be fixed by σ"));
        }
        let chi = match &self.chi {
            Some(v) => weight(&g, "chi", v)?,
            None => Weight::zero(g.rank()),
        };
        let chi_form = ChiForm::new(&g, &sigma, chi.clone(), self.tolerances.chi)?;
        if let Some(&bad) = self.colors.iter().find(|&&c| c >= g.rank()) {
            return Err(Error::config(
                "colors",
                format!("color {bad} is not a simple root index below {}", g.rank()),
            ));
        }
        let orders = match &self.truncation {
            Some(t) => Orders {
                n_inf: t.n_inf,
                n_sites: t.n_sites.clone(),
                n0: t.n0,
            },
            None => Orders::regular(2, points.len()),
        };
        // Orbit disjointness and order checks.
        CurrentAlgebra::new(g.clone(), sigma.clone(), points.clone(), orders.clone())?;
        if self.blocks.max_height < 0 {
            return Err(Error::config("blocks.max_height", "must be nonnegative"));
        }
        if self.solver.starts == 0 {
            return Err(Error::config("solver.starts", "must be positive"));
        }
        Ok(Model {
            config: self.clone(),
            g,
            sigma,
            points,
            lambdas,
            lambda0,
            chi,
            chi_form,
            orders,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "algebra": {"series": "A", "rank": 1},
        "automorphism": {"diagram_perm": [0], "tau_simple": [0], "T": 1},
        "points": [[1, 0]],
        "lambda": [[2]],
        "lambda0": [2]
    }"#;

    #[test]
    fn minimal_config_parses() {
        let cfg = RunConfig::from_json(MINIMAL).unwrap();
        let m = cfg.validate().unwrap();
        assert_eq!(m.orders, Orders::regular(2, 1));
        assert_eq!(cfg.surat_samples, 8);
        assert_eq!(cfg.hash().len(), 64);
    }

    #[test]
    fn colliding_orbits_rejected() {
        let text = r#"{
            "algebra": {"series": "A", "rank": 1},
            "automorphism": {"diagram_perm": [0], "tau_simple": [1], "T": 2},
            "points": [[1, 0], [-1, 0]],
            "lambda": [[1], [1]],
            "lambda0": [1]
        }"#;
        let err = RunConfig::from_json(text).unwrap().validate().unwrap_err();
        assert!(
            matches!(err, Error::Config { ref field, .. } if field == "z[1]"),
            "{err}"
        );
    }

    #[test]
    fn inadmissible_chi_reports_residual() {
        let text = r#"{
            "algebra": {"series": "A", "rank": 2},
            "automorphism": {"diagram_perm": [1, 0], "tau_simple": [0, 0], "T": 2},
            "points": [[1, 0]],
            "lambda": [[1, 0]],
            "lambda0": [1, 1],
            "chi": [1, 1]
        }"#;
        let err = RunConfig::from_json(text).unwrap().validate().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("chi") && msg.contains("residual"), "{msg}");
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = MINIMAL.replace("\"lambda0\"", "\"lambda_0\"");
        assert!(RunConfig::from_json(&text).is_err());
    }

    #[test]
    fn tau_forms_agree() {
        let a = RunConfig::from_json(
            &MINIMAL
                .replace("\"T\": 1", "\"T\": 2")
                .replace("[0], \"T\"", "[1], \"T\""),
        )
        .unwrap()
        .validate()
        .unwrap();
        let b = RunConfig::from_json(
            &MINIMAL
                .replace("\"T\": 1", "\"T\": 2")
                .replace("[0], \"T\"", "[[-1, 0]], \"T\""),
        )
        .unwrap()
        .validate()
        .unwrap();
        assert!((a.sigma.matrix() - b.sigma.matrix())
            .iter()
            .all(|z| z.norm() < 1e-14));
    }
}
