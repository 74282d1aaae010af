//! Exact expected posterior functionals E_θ₀ F(W(·|Xⁿ)).
//!
//! Conjugate Normal models have closed forms because the posterior mean is
//! itself normal under the sampling distribution. For the exponential
//! likelihood with a Beta prior the expectation is a one-dimensional
//! integral over the sufficient statistic Sₙ = ΣXᵢ ~ Gamma(n, rate θ₀),
//! evaluated by composite Simpson with a halved-grid error estimate.

use rayon::prelude::*;

use crate::models::{evaluate_all, ExpBetaKernel, Functional, Posterior, GRID_NODES};
use crate::quad::simpson_weights;
use crate::specfun::{gamma_quantile, ln_gamma_pos, norm_cdf, norm_quantile};
use crate::{Error, Result};

/// Default number of Simpson nodes over the sufficient statistic.
pub const ORACLE_NODES: usize = 2001;

/// Largest relative quadrature error the oracle accepts.
pub const ORACLE_TOLERANCE: f64 = 1e-5;

const TAIL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    ClosedForm,
    /// Simpson over Sₙ; `error_estimate` is |S_N − S_{N/2}|/15 relative to
    /// the value.
    SuffstatQuadrature { error_estimate: f64, nodes: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactEval {
    pub value: f64,
    pub method: Method,
}

impl ExactEval {
    fn closed(value: f64) -> Self {
        Self { value, method: Method::ClosedForm }
    }
}

/// Normal likelihood with known variance `sigma2` and a N(`mu0`, `tau2`)
/// prior on the mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalNormal {
    pub sigma2: f64,
    pub mu0: f64,
    pub tau2: f64,
}

impl NormalNormal {
    pub fn new(sigma2: f64, mu0: f64, tau2: f64) -> Result<Self> {
        if !(sigma2 > 0.0 && tau2 > 0.0) || !sigma2.is_finite() || !tau2.is_finite() || !mu0.is_finite() {
            return Err(Error::Domain(format!(
                "normal model needs sigma2, tau2 > 0 and finite mu0, got ({sigma2}, {mu0}, {tau2})"
            )));
        }
        Ok(Self { sigma2, mu0, tau2 })
    }

    /// Shrinkage weight c = 1/(1 + σ²/(nτ²)) on the sample mean.
    pub fn shrinkage(&self, n: u64) -> f64 {
        1.0 / (1.0 + self.sigma2 / (n as f64 * self.tau2))
    }

    /// σₙ² = σ²τ²/(nτ² + σ²), the same for every dataset.
    pub fn posterior_variance(&self, n: u64) -> f64 {
        self.sigma2 * self.tau2 / (n as f64 * self.tau2 + self.sigma2)
    }

    /// E_θ₀ θₙ, where θₙ = c·X̄ + (1 − c)μ₀.
    pub fn expected_posterior_mean(&self, theta0: f64, n: u64) -> f64 {
        let c = self.shrinkage(n);
        c * theta0 + c * self.sigma2 * self.mu0 / (n as f64 * self.tau2)
    }

    /// Sampling variance of θₙ, c²σ²/n.
    pub fn posterior_mean_variance(&self, n: u64) -> f64 {
        let c = self.shrinkage(n);
        c * c * self.sigma2 / n as f64
    }
}

/// Closed-form expected functional under the Normal–Normal model.
pub fn exact_g_normal(functional: &Functional, model: &NormalNormal, theta0: f64, n: u64) -> Result<ExactEval> {
    functional.validate()?;
    NormalNormal::new(model.sigma2, model.mu0, model.tau2)?;
    if n == 0 {
        return Err(Error::Domain("sample size must be positive".into()));
    }
    if !theta0.is_finite() {
        return Err(Error::Domain(format!("theta0 must be finite, got {theta0}")));
    }
    let var = model.posterior_variance(n);
    let sd = var.sqrt();
    let centre = model.expected_posterior_mean(theta0, n);
    let value = match *functional {
        Functional::Variance => var,
        Functional::Quantile { alpha } => centre + sd * norm_quantile(alpha),
        Functional::IntervalLength { alpha } => 2.0 * sd * norm_quantile(1.0 - 0.5 * alpha),
        Functional::HpdLower { level } => centre - sd * norm_quantile(0.5 + 0.5 * level),
        Functional::HpdUpper { level } => centre + sd * norm_quantile(0.5 + 0.5 * level),
        Functional::CenteredMass { len } => 2.0 * norm_cdf(len / (2.0 * sd)) - 1.0,
        Functional::ProbAbove { theta1 } => {
            // E Φ((θₙ − θ₁)/σₙ) with θₙ normal
            let spread = (var + model.posterior_mean_variance(n)).sqrt();
            norm_cdf((centre - theta1) / spread)
        }
    };
    Ok(ExactEval::closed(value))
}

/// E Var(θ | Xⁿ) for Poisson data and a Gamma prior with rate `a` and
/// shape `b`: (b + nθ₀)/(a + n)².
pub fn exact_apvc_poisson_gamma(a: f64, b: f64, theta0: f64, n: u64) -> Result<ExactEval> {
    if !(a > 0.0 && b > 0.0 && theta0 > 0.0) || !(a + b + theta0).is_finite() {
        return Err(Error::Domain(format!("need a, b, theta0 > 0, got ({a}, {b}, {theta0})")));
    }
    let n = n as f64;
    Ok(ExactEval::closed((b + n * theta0) / ((a + n) * (a + n))))
}

/// E Var(θ | Xⁿ) for Bernoulli data and a uniform prior.
pub fn exact_apvc_binomial_uniform(theta0: f64, n: u64) -> Result<ExactEval> {
    if !(theta0 > 0.0 && theta0 < 1.0) {
        return Err(Error::Domain(format!("theta0 must lie in (0, 1), got {theta0}")));
    }
    let n = n as f64;
    let num = n * n * theta0 - n * theta0 - n * (n - 1.0) * theta0 * theta0 + n + 1.0;
    Ok(ExactEval::closed(num / ((n + 2.0) * (n + 2.0) * (n + 3.0))))
}

/// Expected functionals for exponential data with rate θ₀ and a Beta(a, b)
/// prior on the rate, each posterior evaluated on the standard grid.
///
/// All functionals share one grid posterior per quadrature node. `nodes`
/// must be odd and at least 5.
pub fn oracle_expbeta(
    functionals: &[Functional],
    prior: (f64, f64),
    theta0: f64,
    n: u64,
    nodes: usize,
) -> Result<Vec<ExactEval>> {
    if !(theta0 > 0.0 && theta0.is_finite()) {
        return Err(Error::Domain(format!("theta0 must be positive, got {theta0}")));
    }
    if n == 0 {
        return Err(Error::Domain("sample size must be positive".into()));
    }
    if nodes < 5 || nodes.is_multiple_of(2) {
        return Err(Error::Config(format!("Simpson needs an odd node count of at least 5, got {nodes}")));
    }
    for f in functionals {
        f.validate()?;
    }
    let kernel = ExpBetaKernel::new(prior.0, prior.1, GRID_NODES)?;

    let shape = n as f64;
    let lo = gamma_quantile(shape, TAIL)? / theta0;
    let hi = gamma_quantile(shape, 1.0 - TAIL)? / theta0;
    let h = (hi - lo) / (nodes - 1) as f64;
    let log_norm = shape * theta0.ln() - ln_gamma_pos(shape);
    let sampling_density = |s: f64| (log_norm + (shape - 1.0) * s.ln() - theta0 * s).exp();

    let rows: Vec<Vec<f64>> = (0..nodes)
        .into_par_iter()
        .map(|i| {
            let s = lo + h * i as f64;
            let post = Posterior::Grid(kernel.posterior(n, s)?);
            evaluate_all(functionals, &post)
        })
        .collect::<Result<_>>()?;
    let dens: Vec<f64> = (0..nodes).map(|i| sampling_density(lo + h * i as f64)).collect();

    let integrate = |stride: usize, col: Option<usize>| -> f64 {
        let count = (nodes - 1) / stride + 1;
        let w = simpson_weights(count, h * stride as f64);
        (0..count)
            .map(|k| {
                let i = k * stride;
                w[k] * dens[i] * col.map_or(1.0, |c| rows[i][c])
            })
            .sum()
    };
    let coarse_ok = (nodes - 1).is_multiple_of(4);
    let mass = integrate(1, None);
    let mass_coarse = if coarse_ok { integrate(2, None) } else { mass };

    functionals
        .iter()
        .enumerate()
        .map(|(c, f)| {
            let value = integrate(1, Some(c)) / mass;
            let coarse = if coarse_ok { integrate(2, Some(c)) / mass_coarse } else { value };
            let error_estimate = (value - coarse).abs() / 15.0 / value.abs().max(1e-12);
            if !value.is_finite() || error_estimate > ORACLE_TOLERANCE {
                return Err(Error::Accuracy(format!(
                    "{} oracle at theta0 = {theta0}, n = {n}: relative error estimate {error_estimate:e}",
                    f.label()
                )));
            }
            Ok(ExactEval { value, method: Method::SuffstatQuadrature { error_estimate, nodes } })
        })
        .collect()
}

/// Single-functional form of [`oracle_expbeta`] with the default node budget.
pub fn oracle_expbeta_single(functional: Functional, prior: (f64, f64), theta0: f64, n: u64) -> Result<ExactEval> {
    Ok(oracle_expbeta(&[functional], prior, theta0, n, ORACLE_NODES)?[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eta1() -> (NormalNormal, f64) {
        (NormalNormal::new(0.2, 0.25, 0.3).unwrap(), 0.5)
    }

    #[test]
    fn normal_table_values() {
        let (m, t0) = eta1();
        let apvc = exact_g_normal(&Functional::Variance, &m, t0, 10).unwrap().value;
        assert!((apvc - 0.0187).abs() < 1e-4);
        let m2 = NormalNormal::new(2.5, 3.5, 3.0).unwrap();
        let q = exact_g_normal(&Functional::Quantile { alpha: 0.05 }, &m2, 5.0, 30).unwrap().value;
        assert!((q - 4.4911).abs() < 1e-4);
        let acc = exact_g_normal(&Functional::CenteredMass { len: 0.05 }, &m, t0, 10).unwrap().value;
        assert!((acc - 0.1449).abs() < 2e-4);
    }

    #[test]
    fn normal_interval_identities() {
        let (m, t0) = eta1();
        let lo = exact_g_normal(&Functional::HpdLower { level: 0.95 }, &m, t0, 40).unwrap().value;
        let hi = exact_g_normal(&Functional::HpdUpper { level: 0.95 }, &m, t0, 40).unwrap().value;
        let len = exact_g_normal(&Functional::IntervalLength { alpha: 0.05 }, &m, t0, 40).unwrap().value;
        assert!((hi - lo - len).abs() < 1e-14);
        let ql = exact_g_normal(&Functional::Quantile { alpha: 0.025 }, &m, t0, 40).unwrap().value;
        assert!((ql - lo).abs() < 1e-12);
    }

    #[test]
    fn normal_effect_size_centre() {
        // at θ₁ equal to the expected posterior mean the expected tail mass is 1/2
        let (m, t0) = eta1();
        let centre = m.expected_posterior_mean(t0, 25);
        let v = exact_g_normal(&Functional::ProbAbove { theta1: centre }, &m, t0, 25).unwrap().value;
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn conjugate_apvc_values() {
        assert!((exact_apvc_poisson_gamma(2.5, 3.5, 0.5, 100).unwrap().value - 0.0051).abs() < 1e-4);
        assert!((exact_apvc_poisson_gamma(8.0, 7.5, 1.6, 30).unwrap().value - 0.0384).abs() < 1e-4);
        assert!((exact_apvc_binomial_uniform(0.5, 100).unwrap().value - 0.0024).abs() < 1e-4);
        assert!((exact_apvc_binomial_uniform(0.75, 50).unwrap().value - 0.0036).abs() < 1e-4);
        let big = 10_000_000;
        let v = exact_apvc_poisson_gamma(2.5, 3.5, 0.5, big).unwrap().value;
        assert!((v * big as f64 - 0.5).abs() < 1e-5);
        let v = exact_apvc_binomial_uniform(0.5, big).unwrap().value;
        assert!((v * big as f64 - 0.25).abs() < 1e-5);
        assert!(exact_apvc_binomial_uniform(1.0, 10).is_err());
    }

    #[test]
    fn binomial_formula_matches_direct_sum() {
        // E Var over S ~ Bin(n, θ₀) with Beta(1 + S, 1 + n − S) posteriors
        let (n, t0) = (12u64, 0.3f64);
        let nf = n as f64;
        let mut acc = 0.0;
        for s in 0..=n {
            let sf = s as f64;
            let ln_choose = ln_gamma_pos(nf + 1.0) - ln_gamma_pos(sf + 1.0) - ln_gamma_pos(nf - sf + 1.0);
            let p = (ln_choose + sf * t0.ln() + (nf - sf) * (1.0 - t0).ln()).exp();
            let (a, b) = (1.0 + sf, 1.0 + nf - sf);
            acc += p * a * b / ((a + b) * (a + b) * (a + b + 1.0));
        }
        assert!((exact_apvc_binomial_uniform(t0, n).unwrap().value - acc).abs() < 1e-15);
    }

    #[test]
    fn expbeta_oracle_reports_quadrature() {
        let v = oracle_expbeta(&[Functional::Variance], (1.5, 1.5), 0.5, 30, ORACLE_NODES).unwrap()[0];
        match v.method {
            Method::SuffstatQuadrature { error_estimate, nodes } => {
                assert!(error_estimate <= 1e-6);
                assert_eq!(nodes, ORACLE_NODES);
            }
            _ => panic!("expected quadrature"),
        }
        assert!(oracle_expbeta(&[Functional::Variance], (1.5, 1.5), 0.5, 30, 2000).is_err());
    }

    #[test]
    fn expbeta_oracle_node_budget_stable() {
        let fs = [
            Functional::Variance,
            Functional::IntervalLength { alpha: 0.05 },
            Functional::HpdLower { level: 0.95 },
        ];
        let a = oracle_expbeta(&fs, (1.5, 1.5), 0.25, 50, 2001).unwrap();
        let b = oracle_expbeta(&fs, (1.5, 1.5), 0.25, 50, 4001).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.value - y.value).abs() <= 1e-6 * y.value.abs(), "{x:?} {y:?}");
        }
    }
}
