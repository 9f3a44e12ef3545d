use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::bethe::{
    expected_class, verify_eigenvector, verify_singular, weight_function, BetheProblem,
    BetheSolution, EigenReport, SolverOptions,
};
use crate::error::{Error, Result};
use crate::hamiltonians::{block_operators, check_commutativity, check_invariance, HamiltonianSet};
use crate::lie::{lambda0_roots, lambda0_trace};
use crate::linalg::C64;
use crate::rep::TensorModule;
use crate::takiff::CurrentAlgebra;

use super::config::{Model, RunConfig};
use super::report::{Check, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Info,
    Commute,
    Surat,
    BetheSolve,
    BetheVerify,
    Singular,
    All,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Info,
        Command::Commute,
        Command::Surat,
        Command::BetheSolve,
        Command::BetheVerify,
        Command::Singular,
        Command::All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Info => "info",
            Command::Commute => "commute",
            Command::Surat => "surat",
            Command::BetheSolve => "bethe-solve",
            Command::BetheVerify => "bethe-verify",
            Command::Singular => "singular",
            Command::All => "all",
        }
    }

    /// Accepts `bethe-solve` as well as the two words `bethe solve`.
    pub fn from_words(words: &[String]) -> Option<Command> {
        match words {
            [one] => one.parse().ok(),
            [a, b] if a == "bethe" => format!("bethe-{b}").parse().ok(),
            _ => None,
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::config("command", format!("unknown command {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub dump_matrices: bool,
    pub dump_algebra: bool,
}

/// Everything the commands share, built once per run.
pub struct Runner {
    pub model: Model,
    pub hash: String,
    pub seed: u64,
    pub options: RunOptions,
    solutions: Option<Vec<BetheSolution>>,
}

#[derive(Serialize)]
struct SolutionRow {
    roots: Vec<C64>,
    residual: f64,
    iterations: usize,
    start: usize,
    eigenvalues: Vec<C64>,
    bethe_residuals: Vec<C64>,
    nu_pairings: Vec<C64>,
    /// `nu_pairings − bethe_residuals`; diagnostic only.
    nu_minus_residual: Vec<C64>,
}

#[derive(Serialize)]
struct VerifyRow {
    roots: Vec<C64>,
    class: Vec<i64>,
    expected_class: Vec<i64>,
    lambda_infinity_class: Vec<i64>,
    terms: usize,
    eigen: EigenReport,
}

impl Runner {
    /// Validates the config; every error here is a configuration error.
    pub fn new(config: &RunConfig, options: RunOptions) -> Result<Self> {
        let mut config = config.clone();
        if let Some(seed) = options.seed {
            config.seed = seed;
        }
        let model = config.validate()?;
        Ok(Runner {
            hash: config.hash(),
            seed: config.seed,
            model,
            options,
            solutions: None,
        })
    }

    fn report(&self, cmd: Command) -> Report {
        Report::new(cmd.name(), &self.hash, self.seed)
    }

    pub fn run(&mut self, cmd: Command) -> Report {
        let mut r = self.report(cmd);
        let out = match cmd {
            Command::Info => self.info(&mut r),
            Command::Commute => self.commute(&mut r),
            Command::Surat => self.surat(&mut r),
            Command::BetheSolve => self.bethe_solve(&mut r),
            Command::BetheVerify => self.bethe_verify(&mut r),
            Command::Singular => self.singular(&mut r),
            Command::All => {
                for sub in &Command::ALL[..6] {
                    let s = self.run(*sub);
                    r.section(s);
                }
                Ok(())
            }
        };
        if let Err(e) = out {
            r.fail(e.to_string());
        }
        r
    }

    fn problem(&self) -> Result<BetheProblem> {
        let m = &self.model;
        BetheProblem::new(
            &m.g,
            &m.sigma,
            m.points.clone(),
            m.lambdas.clone(),
            m.lambda0.clone(),
            m.chi.clone(),
            m.config.colors.clone(),
        )
    }

    fn module(&self) -> Result<TensorModule> {
        TensorModule::new(
            &self.model.g,
            &self.model.sigma,
            &self.model.lambdas,
            &self.model.lambda0,
        )
    }

    fn hamiltonians(&self) -> Result<HamiltonianSet> {
        let m = &self.model;
        HamiltonianSet::build(&m.g, &m.sigma, m.points.clone(), m.chi_form.clone())
    }

    fn solver_options(&self) -> SolverOptions {
        let s = &self.model.config.solver;
        SolverOptions {
            starts: s.starts,
            max_iterations: s.max_iterations,
            max_halvings: s.max_halvings,
            tolerance: self.model.config.tolerances.solver,
            dedup: s.dedup,
            separation: s.separation,
            seed: self.seed,
        }
    }

    /// Bethe solutions, computed once. With no roots the empty set is the
    /// only solution.
    fn solutions(&mut self, problem: &BetheProblem) -> Vec<BetheSolution> {
        if self.solutions.is_none() {
            let sols = if problem.m() == 0 {
                vec![BetheSolution {
                    roots: Vec::new(),
                    residual: 0.0,
                    iterations: 0,
                    start: 0,
                }]
            } else {
                problem.solve(&self.solver_options())
            };
            self.solutions = Some(sols);
        }
        self.solutions.clone().unwrap()
    }

    fn info(&self, r: &mut Report) -> Result<()> {
        let m = &self.model;
        let g = &m.g;
        let s = &m.sigma;
        r.detail("algebra", format!("{}{}", g.series(), g.rank()));
        r.detail("dim", g.dim());
        r.detail("positive_roots", g.positive_roots());
        r.detail("T", s.order());
        r.detail("omega", s.omega());
        r.detail("diagram_perm", s.diagram_perm());
        r.detail("tau", s.tau());
        r.detail("fixed_dim", s.eigenspace_basis(0).len());
        let lt = lambda0_trace(g, s);
        let lr = lambda0_roots(g, s);
        r.detail("Lambda0", g.to_fundamental(&lr));
        r.check(Check::at_most("jacobi", g.jacobi_residual(), 1e-10));
        r.check(Check::at_most(
            "ad_invariance",
            g.invariance_residual(),
            1e-10,
        ));
        r.check(Check::at_most(
            "sigma_homomorphism",
            s.homomorphism_residual(g),
            1e-10,
        ));
        r.check(Check::at_most("sigma_order", s.order_residual(), 1e-10));
        r.check(Check::at_most("sigma_form", s.form_residual(g), 1e-10));
        r.check(Check::at_most("projectors", s.projector_residual(), 1e-10));
        r.check(Check::at_most("Lambda0_two_ways", lt.distance(&lr), 1e-12));
        r.check(Check::at_most(
            "chi_leakage",
            m.chi_form.leakage(s),
            m.config.tolerances.chi,
        ));
        let set = self.hamiltonians()?;
        let labels: Vec<&str> = set.items.iter().map(|h| h.label.as_str()).collect();
        r.detail("hamiltonians", labels);
        let worst = set
            .cross_check()?
            .iter()
            .fold(0.0, |a: f64, (_, d)| a.max(*d));
        r.check(Check::at_most(
            "closed_forms_vs_series",
            worst,
            m.config.tolerances.identity,
        ));
        if self.options.dump_algebra {
            r.detail("dump", algebra_dump(m));
        }
        Ok(())
    }

    fn commute(&self, r: &mut Report) -> Result<()> {
        let cfg = &self.model.config;
        let set = self.hamiltonians()?;
        let module = self.module()?;
        let blocks = module
            .classes_up_to(cfg.blocks.max_height)
            .iter()
            .map(|cl| module.block(cl, cfg.blocks.cap))
            .collect::<Result<Vec<_>>>()?;
        r.detail(
            "block_dims",
            blocks
                .iter()
                .map(|b| (b.class.clone(), b.dim()))
                .collect::<Vec<_>>(),
        );
        let pairs = check_commutativity(&set, &module, &blocks)?;
        let worst = pairs.iter().fold(0.0, |a: f64, p| a.max(p.residual));
        r.check(Check::at_most("commutators", worst, cfg.tolerances.commute));
        let inv = check_invariance(&set, &module, &blocks)?;
        let worst = inv.iter().fold(0.0, |a: f64, p| a.max(p.residual));
        r.check(Check::at_most(
            "g_sigma_chi_invariance",
            worst,
            cfg.tolerances.commute,
        ));
        r.detail("pairs", pairs);
        r.detail("invariance", inv);
        if self.options.dump_matrices {
            let mut dump = Vec::new();
            for b in &blocks {
                let ops = block_operators(&set, &module, b)?;
                for (h, op) in set.items.iter().zip(ops) {
                    let rows: Vec<Vec<C64>> = op
                        .matrix
                        .row_iter()
                        .map(|row| row.iter().copied().collect())
                        .collect();
                    dump.push(serde_json::json!({
                        "hamiltonian": h.label,
                        "class": b.class,
                        "basis": b.keys,
                        "matrix": rows,
                    }));
                }
            }
            r.detail("matrices", dump);
        }
        Ok(())
    }

    fn surat(&self, r: &mut Report) -> Result<()> {
        let m = &self.model;
        let alg = CurrentAlgebra::new(
            m.g.clone(),
            m.sigma.clone(),
            m.points.clone(),
            m.orders.clone(),
        )?;
        r.detail("orders", &alg.orders);
        let samples = alg.sample_regular_points(m.config.surat_samples, self.seed);
        let residuals = samples
            .iter()
            .map(|&u| alg.surat_residual(u))
            .collect::<Result<Vec<_>>>()?;
        let worst = residuals.iter().fold(0.0, |a: f64, x| a.max(*x));
        r.detail("samples", &samples);
        r.detail("residuals", &residuals);
        r.check(Check::at_most("surat", worst, m.config.tolerances.identity));
        Ok(())
    }

    fn bethe_solve(&mut self, r: &mut Report) -> Result<()> {
        let problem = self.problem()?;
        let sols = self.solutions(&problem);
        let mut rows = Vec::new();
        for s in &sols {
            let res = problem.residual(&s.roots)?;
            let nu: Vec<C64> = (0..problem.m())
                .map(|j| problem.nu_pairing(&s.roots, j))
                .collect();
            rows.push(SolutionRow {
                roots: s.roots.clone(),
                residual: s.residual,
                iterations: s.iterations,
                start: s.start,
                eigenvalues: (0..m_points(&problem))
                    .map(|i| problem.eigenvalue(&s.roots, i))
                    .collect(),
                bethe_residuals: res.iter().copied().collect(),
                nu_minus_residual: nu.iter().zip(res.iter()).map(|(a, b)| a - b).collect(),
                nu_pairings: nu,
            });
        }
        r.detail("m", problem.m());
        r.detail("colors", &problem.colors);
        r.detail(
            "lambda_infinity",
            self.model.g.to_fundamental(&problem.lambda_infinity()),
        );
        r.detail("solutions", rows);
        r.check(Check::at_least("solutions_found", sols.len() as f64, 1.0));
        let worst = sols.iter().fold(0.0, |a: f64, s| a.max(s.residual));
        r.check(Check::at_most(
            "bethe_residual",
            worst,
            self.model.config.tolerances.solver,
        ));
        Ok(())
    }

    fn bethe_verify(&mut self, r: &mut Report) -> Result<()> {
        let problem = self.problem()?;
        let module = self.module()?;
        let set = self.hamiltonians()?;
        let sols = self.solutions(&problem);
        r.check(Check::at_least("solutions_found", sols.len() as f64, 1.0));
        let expected = expected_class(&problem, &module);
        let linf = module.class_for_weight(&problem.lambda_infinity())?;
        let mut rows = Vec::new();
        let (mut eig, mut sine, mut classes_ok, mut conclusive) = (0.0f64, 0.0f64, true, true);
        for s in &sols {
            let psi = weight_function(&problem, &module, &s.roots)?;
            let mut class = expected.clone();
            for k in psi.keys() {
                let c = module.key_class(k);
                if c != expected {
                    classes_ok = false;
                    class = c;
                }
            }
            classes_ok &= linf == expected;
            let rep = verify_eigenvector(&problem, &module, &set, &psi, &s.roots)?;
            conclusive &= !rep.inconclusive;
            for ch in &rep.checks {
                if ch.predicted {
                    eig = eig.max(ch.residual);
                }
                sine = sine.max(ch.sine);
            }
            rows.push(VerifyRow {
                roots: s.roots.clone(),
                class,
                expected_class: expected.clone(),
                lambda_infinity_class: linf.clone(),
                terms: psi.len(),
                eigen: rep,
            });
        }
        let tol = self.model.config.tolerances.eigen;
        r.check(Check::holds("weight_is_lambda_infinity", classes_ok));
        r.check(Check::holds("psi_nonzero", conclusive));
        r.check(Check::at_most("eigen_residual", eig, tol));
        r.check(Check::at_most("rayleigh_sine", sine, tol));
        r.detail("solutions", rows);
        Ok(())
    }

    fn singular(&mut self, r: &mut Report) -> Result<()> {
        let problem = self.problem()?;
        let module = self.module()?;
        let sols = self.solutions(&problem);
        let mut residuals = Vec::new();
        for s in &sols {
            let psi = weight_function(&problem, &module, &s.roots)?;
            residuals.push(verify_singular(&problem, &module, &psi)?);
        }
        let worst = residuals.iter().fold(0.0, |a: f64, x| a.max(*x));
        let chi_zero = self.model.chi_form.is_zero();
        r.detail("chi_zero", chi_zero);
        r.detail("residuals", &residuals);
        if chi_zero {
            r.check(Check::at_least("solutions_found", sols.len() as f64, 1.0));
            r.check(Check::at_most(
                "singular_residual",
                worst,
                self.model.config.tolerances.singular,
            ));
        }
        Ok(())
    }
}

fn m_points(p: &BetheProblem) -> usize {
    p.points.len()
}

fn algebra_dump(m: &Model) -> serde_json::Value {
    let g = &m.g;
    let labels: Vec<String> = (0..g.dim()).map(|b| g.basis_label(b)).collect();
    let mut triples = Vec::new();
    for a in 0..g.dim() {
        for b in 0..g.dim() {
            for &(c, v) in g.structure(a, b) {
                triples.push((a, b, c, v));
            }
        }
    }
    let sigma: Vec<Vec<C64>> = m
        .sigma
        .matrix()
        .row_iter()
        .map(|row| row.iter().copied().collect())
        .collect();
    serde_json::json!({
        "basis": labels,
        "structure_constants": triples,
        "sigma": sigma,
    })
}
