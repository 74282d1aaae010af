//! Leading terms of the expected posterior moments, quantiles, density and
//! density derivatives as n → ∞.
//!
//! Every value here depends on the model only through the Fisher
//! information at the true parameter. Higher-order corrections need
//! third-derivative and prior-slope information and are not provided.

use std::f64::consts::PI;

use crate::criteria::g_star;
use crate::models::{Functional, LikelihoodFamily};
use crate::specfun::{expect_half_variance, hermite_poly, lambda_rr, Polynomial};
use crate::{Error, Result};

/// One term c·n^(k/2) of an asymptotic expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionTerm {
    pub value: f64,
    /// Twice the power of n carried by the term, so −3 means n^(−3/2).
    pub order_twice: i32,
    pub description: String,
}

impl ExpansionTerm {
    pub fn order(&self) -> f64 {
        0.5 * self.order_twice as f64
    }
}

fn positive_n(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("sample size must be positive".into()));
    }
    Ok(n as f64)
}

/// I(θ₀)^(−r/2) λ_rr n^(−r/2), the leading term of E_θ₀ of the r-th
/// central posterior moment.
pub fn expected_posterior_moment(family: &LikelihoodFamily, theta0: f64, n: u64, r: u32) -> Result<f64> {
    Ok(expected_posterior_moment_term(family, theta0, n, r)?.value)
}

pub fn expected_posterior_moment_term(
    family: &LikelihoodFamily,
    theta0: f64,
    n: u64,
    r: u32,
) -> Result<ExpansionTerm> {
    let nf = positive_n(n)?;
    let info = family.fisher_info(theta0)?;
    let lambda = lambda_rr(r)?;
    let value = lambda * (nf * info).powf(-0.5 * r as f64);
    let description = if r.is_multiple_of(2) {
        format!("expected {r}-th central posterior moment, leading term")
    } else {
        // the Gaussian limit has vanishing odd central moments, so the
        // closed-form coefficient is reported as is but may not be the
        // true leading behaviour
        format!("expected {r}-th central posterior moment, odd order: coefficient ambiguous")
    };
    Ok(ExpansionTerm { value, order_twice: -(r as i32), description })
}

/// θ₀ + Φ⁻¹(α)/√(n I(θ₀)).
pub fn expected_posterior_quantile(family: &LikelihoodFamily, theta0: f64, n: u64, alpha: f64) -> Result<f64> {
    g_star(&Functional::Quantile { alpha }, family, theta0, n)
}

fn check_det(info_det: f64, d: u32) -> Result<()> {
    if d == 0 {
        return Err(Error::Domain("dimension must be at least 1".into()));
    }
    if !(info_det > 0.0) || !info_det.is_finite() {
        return Err(Error::Domain(format!("information determinant must be positive, got {info_det}")));
    }
    Ok(())
}

/// n^(d/2) |I|^(1/2) / (4π)^(d/2): leading term of E_θ₀ w(θ₀ | Xⁿ).
pub fn expected_posterior_density_det(info_det: f64, n: u64, d: u32) -> Result<f64> {
    let nf = positive_n(n)?;
    check_det(info_det, d)?;
    Ok((nf / (4.0 * PI)).powf(0.5 * d as f64) * info_det.sqrt())
}

pub fn expected_posterior_density(family: &LikelihoodFamily, theta0: f64, n: u64) -> Result<f64> {
    expected_posterior_density_det(family.fisher_info(theta0)?, n, 1)
}

/// n^d |I| / (3^(d/2) (2π)^d): leading term of E_θ₀ w(θ₀ | Xⁿ)².
pub fn expected_posterior_density_sq_det(info_det: f64, n: u64, d: u32) -> Result<f64> {
    let nf = positive_n(n)?;
    check_det(info_det, d)?;
    let d = d as f64;
    Ok(nf.powf(d) * info_det / (3f64.powf(0.5 * d) * (2.0 * PI).powf(d)))
}

pub fn expected_posterior_density_sq(family: &LikelihoodFamily, theta0: f64, n: u64) -> Result<f64> {
    expected_posterior_density_sq_det(family.fisher_info(theta0)?, n, 1)
}

/// Leading term of E_θ₀ of the r-th derivative of the posterior CDF at θ₀:
/// n^(r/2) I^(1/2) (4π)^(−1/2) E H_{r−1}(V) with V ~ N(0, 1/(2I)).
pub fn expected_cdf_derivative_leading(
    family: &LikelihoodFamily,
    theta0: f64,
    n: u64,
    r: u32,
) -> Result<ExpansionTerm> {
    if r == 0 {
        return Err(Error::Domain("derivative order must be at least 1".into()));
    }
    let nf = positive_n(n)?;
    let info = family.fisher_info(theta0)?;
    let h = hermite_poly(r - 1, info)?;
    // rescale v → v/√I so the half-variance expectation runs at variance 1/(2I)
    let scaled = Polynomial::new(
        h.coefficients()
            .iter()
            .enumerate()
            .map(|(k, c)| c * info.powf(-0.5 * k as f64))
            .collect(),
    );
    let value = nf.powf(0.5 * r as f64) * info.sqrt() / (4.0 * PI).sqrt() * expect_half_variance(&scaled);
    Ok(ExpansionTerm {
        value,
        order_twice: r as i32,
        description: format!("expected posterior CDF derivative of order {r}, leading term"),
    })
}
