//! Built-in study designs comparing exact, simulated and asymptotic
//! expected functionals across a grid of true parameters and sample sizes.

use std::fmt::Write as _;

use crate::criteria::g_star;
use crate::exact::{
    exact_apvc_binomial_uniform, exact_apvc_poisson_gamma, exact_g_normal, oracle_expbeta, NormalNormal, ORACLE_NODES,
};
use crate::models::{Functional, LikelihoodFamily, Prior};
use crate::montecarlo::{simulate_functionals, SimulationSpec};
use crate::Result;

pub const SAMPLE_SIZES: [u64; 4] = [10, 30, 50, 100];
pub const DEFAULT_SEED: u64 = 20_060_301;
pub const DEFAULT_REPLICATES: usize = 1000;
pub const TABLE_ALPHA: f64 = 0.05;
pub const EXP_PRIOR: (f64, f64) = (1.5, 1.5);

pub const CSV_HEADER: &str = "criterion,model,params,theta0,n,g_hat,g_hat_se,g_exact,g_star";

/// Normal rows as (θ₀, μ₀, σ², τ²).
pub const NORMAL_ROWS: [(f64, f64, f64, f64); 3] =
    [(0.5, 0.25, 0.2, 0.3), (5.0, 3.5, 2.5, 3.0), (25.0, 20.0, 18.0, 15.0)];
/// Poisson rows as (θ₀, prior rate, prior shape).
pub const POISSON_ROWS: [(f64, f64, f64); 3] = [(0.5, 2.5, 3.5), (1.6, 8.0, 7.5), (1.5, 10.0, 12.0)];
pub const BERNOULLI_ROWS: [f64; 3] = [0.2, 0.5, 0.75];
pub const EXP_THETAS: [f64; 3] = [0.25, 0.5, 0.75];

/// One cell of a comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub label: String,
    pub criterion: String,
    pub model: String,
    /// `key=value` pairs joined by `;`, beginning with `label=…`.
    pub params: String,
    pub theta0: f64,
    pub n: u64,
    pub g_hat: Option<f64>,
    pub g_hat_se: Option<f64>,
    pub g_exact: Option<f64>,
    pub g_star: f64,
}

fn eta(i: usize) -> String {
    format!("eta{}", i + 1)
}

/// Exact vs asymptotic for the Normal–Normal model: APVC, the expected
/// lower 0.05 quantile and ACC with l = θ₀/10.
pub fn table1() -> Result<Vec<TableRow>> {
    let mut rows = Vec::new();
    for (i, &(t0, mu0, s2, tau2)) in NORMAL_ROWS.iter().enumerate() {
        let model = NormalNormal::new(s2, mu0, tau2)?;
        let family = LikelihoodFamily::normal(s2)?;
        let fs = [
            Functional::Variance,
            Functional::Quantile { alpha: TABLE_ALPHA },
            Functional::CenteredMass { len: t0 / 10.0 },
        ];
        for &n in &SAMPLE_SIZES {
            for f in &fs {
                rows.push(TableRow {
                    label: eta(i),
                    criterion: f.label().to_string(),
                    model: "normal-normal".into(),
                    params: format!("label={};mu0={mu0};sigma2={s2};tau2={tau2}", eta(i)),
                    theta0: t0,
                    n,
                    g_hat: None,
                    g_hat_se: None,
                    g_exact: Some(exact_g_normal(f, &model, t0, n)?.value),
                    g_star: g_star(f, &family, t0, n)?,
                });
            }
        }
    }
    Ok(rows)
}

/// Exact vs asymptotic APVC for Poisson–Gamma and Bernoulli–uniform.
pub fn table2() -> Result<Vec<TableRow>> {
    let mut rows = Vec::new();
    for (i, &(t0, a, b)) in POISSON_ROWS.iter().enumerate() {
        for &n in &SAMPLE_SIZES {
            rows.push(TableRow {
                label: eta(i),
                criterion: "apvc".into(),
                model: "poisson-gamma".into(),
                params: format!("label={};a={a};b={b}", eta(i)),
                theta0: t0,
                n,
                g_hat: None,
                g_hat_se: None,
                g_exact: Some(exact_apvc_poisson_gamma(a, b, t0, n)?.value),
                g_star: g_star(&Functional::Variance, &LikelihoodFamily::Poisson, t0, n)?,
            });
        }
    }
    for (i, &t0) in BERNOULLI_ROWS.iter().enumerate() {
        for &n in &SAMPLE_SIZES {
            rows.push(TableRow {
                label: eta(i),
                criterion: "apvc".into(),
                model: "binomial-uniform".into(),
                params: format!("label={}", eta(i)),
                theta0: t0,
                n,
                g_hat: None,
                g_hat_se: None,
                g_exact: Some(exact_apvc_binomial_uniform(t0, n)?.value),
                g_star: g_star(&Functional::Variance, &LikelihoodFamily::Bernoulli, t0, n)?,
            });
        }
    }
    Ok(rows)
}

/// Functionals reported for the exponential/Beta study.
pub fn table3_functionals() -> [Functional; 4] {
    [
        Functional::Variance,
        Functional::HpdLower { level: 1.0 - TABLE_ALPHA },
        Functional::HpdUpper { level: 1.0 - TABLE_ALPHA },
        Functional::IntervalLength { alpha: TABLE_ALPHA },
    ]
}

/// Simulated, quadrature and asymptotic values for exponential data with a
/// Beta(3/2, 3/2) prior on the rate.
pub fn table3(m: usize, seed: u64) -> Result<Vec<TableRow>> {
    let fs = table3_functionals();
    let family = LikelihoodFamily::ExponentialRate;
    let prior = Prior::Beta { a: EXP_PRIOR.0, b: EXP_PRIOR.1 };
    let mut rows = Vec::new();
    for (i, &t0) in EXP_THETAS.iter().enumerate() {
        for &n in &SAMPLE_SIZES {
            let spec = SimulationSpec { family, prior, theta0: t0, n, m, seed };
            let sims = simulate_functionals(&spec, &fs)?;
            let oracle = oracle_expbeta(&fs, EXP_PRIOR, t0, n, ORACLE_NODES)?;
            for ((f, sim), exact) in fs.iter().zip(&sims).zip(&oracle) {
                rows.push(TableRow {
                    label: format!("theta{}", i + 1),
                    criterion: f.label().to_string(),
                    model: "exp-beta".into(),
                    params: format!("label=theta{};a={};b={};m={m};seed={seed}", i + 1, EXP_PRIOR.0, EXP_PRIOR.1),
                    theta0: t0,
                    n,
                    g_hat: Some(sim.mean),
                    g_hat_se: Some(sim.std_err),
                    g_exact: Some(exact.value),
                    g_star: g_star(f, &family, t0, n)?,
                });
            }
        }
    }
    Ok(rows)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl TableRow {
    /// CSV record matching [`CSV_HEADER`]; floats use the shortest
    /// representation that parses back to the same value.
    pub fn to_csv_record(&self) -> Vec<String> {
        vec![
            self.criterion.clone(),
            self.model.clone(),
            self.params.clone(),
            self.theta0.to_string(),
            self.n.to_string(),
            opt(self.g_hat),
            opt(self.g_hat_se),
            opt(self.g_exact),
            self.g_star.to_string(),
        ]
    }
}

/// Fixed-width text rendering with 4 decimals.
pub fn render_text(rows: &[TableRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<14} {:<16} {:<7} {:>8} {:>5} {:>10} {:>10} {:>10} {:>10}",
        "criterion", "model", "label", "theta0", "n", "g_hat", "se", "g_exact", "g_star"
    );
    let cell = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into());
    for r in rows {
        let _ = writeln!(
            out,
            "{:<14} {:<16} {:<7} {:>8} {:>5} {:>10} {:>10} {:>10} {:>10.4}",
            r.criterion,
            r.model,
            r.label,
            r.theta0,
            r.n,
            cell(r.g_hat),
            cell(r.g_hat_se),
            cell(r.g_exact),
            r.g_star
        );
    }
    out
}
