//! Seeded Monte Carlo estimation of expected posterior functionals.
//!
//! Each replicate j draws from its own ChaCha8 stream keyed by
//! `(seed, j)`, so the estimate does not depend on how replicates are
//! scheduled across threads. Reduction always runs in replicate order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::models::{
    check_pair, evaluate_all, posterior, sample_suffstat, ExpBetaKernel, Functional, LikelihoodFamily, Posterior,
    Prior, SufficientStat, GRID_NODES,
};
use crate::{Error, Result};

/// Deterministic pseudo-random stream.
#[derive(Debug, Clone)]
pub struct SeededGenerator {
    rng: ChaCha8Rng,
    seed: u64,
    stream_id: u64,
    spare_normal: Option<f64>,
}

impl SeededGenerator {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self { rng, seed, stream_id, spare_normal: None }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform on [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform on (0, 1].
    pub fn uniform_open_low(&mut self) -> f64 {
        1.0 - self.uniform()
    }
}

/// Standard normal deviate by the Box–Muller pair transform; the second
/// member of each pair is kept for the next call.
pub fn normal_deviate(rng: &mut SeededGenerator) -> f64 {
    if let Some(z) = rng.spare_normal.take() {
        return z;
    }
    let r = (-2.0 * rng.uniform_open_low().ln()).sqrt();
    let angle = std::f64::consts::TAU * rng.uniform();
    rng.spare_normal = Some(r * angle.sin());
    r * angle.cos()
}

/// Exponential deviate by inversion of a given uniform u ∈ (0, 1].
pub fn exponential_from_uniform(u: f64, rate: f64) -> f64 {
    -u.ln() / rate
}

pub fn exponential_deviate(rng: &mut SeededGenerator, rate: f64) -> Result<f64> {
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(Error::Domain(format!("exponential rate must be positive, got {rate}")));
    }
    Ok(exponential_from_uniform(rng.uniform_open_low(), rate))
}

pub fn bernoulli_deviate(rng: &mut SeededGenerator, p: f64) -> Result<u8> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("bernoulli p must lie in [0, 1], got {p}")));
    }
    Ok(u8::from(rng.uniform() < p))
}

/// Poisson deviate by chop-down inversion; means above 500 underflow
/// e^{−mean} and are rejected.
pub fn poisson_deviate(rng: &mut SeededGenerator, mean: f64) -> Result<u64> {
    if !(mean >= 0.0) || mean > 500.0 {
        return Err(Error::Domain(format!("poisson mean must lie in [0, 500], got {mean}")));
    }
    let mut u = rng.uniform();
    let mut k = 0u64;
    let mut p = (-mean).exp();
    while u > p {
        u -= p;
        k += 1;
        p *= mean / k as f64;
        if p == 0.0 {
            break;
        }
    }
    Ok(k)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    /// Sample standard deviation / √m.
    pub std_err: f64,
    pub m: usize,
    pub seed: u64,
}

/// Everything that determines a simulation, apart from the functional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationSpec {
    pub family: LikelihoodFamily,
    pub prior: Prior,
    pub theta0: f64,
    pub n: u64,
    pub m: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

enum Builder {
    ExpBeta(ExpBetaKernel),
    Direct,
}

impl Builder {
    fn new(spec: &SimulationSpec) -> Result<Self> {
        match (spec.family, spec.prior) {
            (LikelihoodFamily::ExponentialRate, Prior::Beta { a, b }) => {
                Ok(Self::ExpBeta(ExpBetaKernel::new(a, b, GRID_NODES)?))
            }
            _ => Ok(Self::Direct),
        }
    }

    fn build(&self, spec: &SimulationSpec, stat: &SufficientStat) -> Result<Posterior> {
        match self {
            Self::ExpBeta(k) => Ok(Posterior::Grid(k.posterior(stat.n, stat.s)?)),
            Self::Direct => posterior(&spec.family, &spec.prior, stat),
        }
    }
}

/// Ĝ = (1/m) Σ F(W(·|Xⁿⱼ)) for one functional.
pub fn simulate_g(spec: &SimulationSpec, functional: Functional) -> Result<MonteCarloEstimate> {
    Ok(simulate_functionals(spec, &[functional])?[0])
}

/// Several functionals evaluated on the same m replicate datasets.
pub fn simulate_functionals(spec: &SimulationSpec, functionals: &[Functional]) -> Result<Vec<MonteCarloEstimate>> {
    simulate_functionals_with(spec, functionals, Execution::Parallel)
}

pub fn simulate_functionals_with(
    spec: &SimulationSpec,
    functionals: &[Functional],
    execution: Execution,
) -> Result<Vec<MonteCarloEstimate>> {
    if spec.m < 2 {
        return Err(Error::Domain(format!("need at least two replicates, got m = {}", spec.m)));
    }
    if spec.n == 0 {
        return Err(Error::Domain("sample size must be positive".into()));
    }
    spec.family.check_theta(spec.theta0)?;
    spec.prior.validate()?;
    for f in functionals {
        f.validate()?;
    }
    check_pair(&spec.family, &spec.prior)?;
    let builder = Builder::new(spec)?;

    let replicate = |j: usize| -> Result<Vec<f64>> {
        let mut rng = SeededGenerator::new(spec.seed, j as u64);
        let stat = sample_suffstat(&spec.family, spec.theta0, spec.n, &mut rng)?;
        let post = builder.build(spec, &stat)?;
        evaluate_all(functionals, &post)
    };
    let wrap = |j: usize| replicate(j).map_err(|e| Error::Replicate { index: j, source: Box::new(e) });

    let rows: Vec<Result<Vec<f64>>> = match execution {
        Execution::Sequential => (0..spec.m).map(wrap).collect(),
        Execution::Parallel => (0..spec.m).into_par_iter().map(wrap).collect(),
    };
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;

    let m = spec.m as f64;
    Ok((0..functionals.len())
        .map(|i| {
            let mean = rows.iter().map(|r| r[i]).sum::<f64>() / m;
            let ss = rows.iter().map(|r| (r[i] - mean) * (r[i] - mean)).sum::<f64>();
            MonteCarloEstimate { mean, std_err: (ss / (m - 1.0)).sqrt() / m.sqrt(), m: spec.m, seed: spec.seed }
        })
        .collect())
}
