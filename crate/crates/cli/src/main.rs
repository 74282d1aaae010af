mod args;

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::Parser;
use ssd_core::criteria::{g_star, min_sample_size, Criterion, CriterionKind, ParamRange};
use ssd_core::exact::{
    exact_apvc_binomial_uniform, exact_apvc_poisson_gamma, exact_g_normal, oracle_expbeta_single, NormalNormal,
};
use ssd_core::montecarlo::{simulate_g, SimulationSpec};
use ssd_core::tables::{self, TableRow, CSV_HEADER};
use ssd_core::{Error, Functional, LikelihoodFamily, Prior};

use args::{Cli, Command, CriterionName, Format, Model, Opts};

type Outcome = std::result::Result<String, Error>;

fn main() -> ExitCode {
    let argv = match args::expand_config(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let opts = match &cli.command {
        Command::Size(o) | Command::Eval(o) | Command::Simulate(o) => o,
        Command::Table { opts, .. } => opts,
    };
    let result = match &cli.command {
        Command::Size(o) => cmd_size(o),
        Command::Eval(o) => cmd_eval(o),
        Command::Simulate(o) => cmd_simulate(o),
        Command::Table { which, opts } => cmd_table(*which, opts),
    };
    match result {
        Ok(text) => match &opts.out {
            Some(path) => match std::fs::write(path, text) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    ExitCode::from(1)
                }
            },
            None => {
                print!("{text}");
                ExitCode::SUCCESS
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Domain(_) | Error::Config(_) => 1,
        Error::Unsatisfiable { .. } => 2,
        Error::Accuracy(_) | Error::UnsupportedShape(_) => 3,
        Error::Replicate { source, .. } => exit_code(source),
    }
}

fn required<T>(v: Option<T>, flag: &str, why: &str) -> Result<T, Error> {
    v.ok_or_else(|| Error::Domain(format!("--{flag} is required {why}")))
}

fn family(o: &Opts) -> Result<LikelihoodFamily, Error> {
    Ok(match o.model {
        Model::Normal => LikelihoodFamily::normal(required(o.sigma2, "sigma2", "for the normal model")?)?,
        Model::Poisson => LikelihoodFamily::Poisson,
        Model::Bernoulli => LikelihoodFamily::Bernoulli,
        Model::Exp => LikelihoodFamily::ExponentialRate,
    })
}

/// Prior implied by the flags, or None when the model needs prior flags
/// that were not given.
fn prior(o: &Opts) -> Result<Option<Prior>, Error> {
    let p = match o.model {
        Model::Normal => match (o.mu0, o.tau2) {
            (Some(mu0), Some(tau2)) => Some(Prior::Normal { mu0, tau2 }),
            _ => None,
        },
        Model::Poisson => match (o.a, o.b) {
            (Some(a), Some(b)) => Some(Prior::Gamma { a, b }),
            _ => None,
        },
        Model::Bernoulli => Some(Prior::Beta { a: o.a.unwrap_or(1.0), b: o.b.unwrap_or(1.0) }),
        Model::Exp => Some(Prior::Beta { a: o.a.unwrap_or(tables::EXP_PRIOR.0), b: o.b.unwrap_or(tables::EXP_PRIOR.1) }),
    };
    if let Some(p) = &p {
        p.validate()?;
    }
    Ok(p)
}

fn functional(o: &Opts) -> Result<Functional, Error> {
    let f = match o.criterion {
        CriterionName::Apvc => Functional::Variance,
        CriterionName::Acc => Functional::CenteredMass { len: required(o.len, "len", "for acc")? },
        CriterionName::Alc => Functional::IntervalLength { alpha: o.alpha },
        CriterionName::AlcQuantile => Functional::Quantile { alpha: o.alpha },
        CriterionName::Es => Functional::ProbAbove { theta1: required(o.theta1, "theta1", "for es")? },
    };
    f.validate()?;
    Ok(f)
}

fn model_name(o: &Opts) -> &'static str {
    match o.model {
        Model::Normal => "normal",
        Model::Poisson => "poisson",
        Model::Bernoulli => "bernoulli",
        Model::Exp => "exp",
    }
}

fn params(o: &Opts, prior: Option<&Prior>) -> String {
    let mut parts = Vec::new();
    if let Some(s2) = o.sigma2.filter(|_| o.model == Model::Normal) {
        parts.push(format!("sigma2={s2}"));
    }
    match prior {
        Some(Prior::Normal { mu0, tau2 }) => parts.push(format!("mu0={mu0};tau2={tau2}")),
        Some(Prior::Gamma { a, b }) | Some(Prior::Beta { a, b }) => parts.push(format!("a={a};b={b}")),
        None => {}
    }
    match o.criterion {
        CriterionName::Apvc => {}
        CriterionName::Acc => parts.push(format!("len={}", o.len.unwrap_or(f64::NAN))),
        CriterionName::Alc | CriterionName::AlcQuantile => parts.push(format!("alpha={}", o.alpha)),
        CriterionName::Es => parts.push(format!("theta1={}", o.theta1.unwrap_or(f64::NAN))),
    }
    parts.join(";")
}

fn seed(o: &Opts) -> u64 {
    if o.fresh_seed {
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_nanos() as u64)
            .unwrap_or(o.seed)
    } else {
        o.seed
    }
}

fn cmd_size(o: &Opts) -> Outcome {
    let fam = family(o)?;
    let (lo, hi) = required(o.range, "range", "for size")?;
    let kind = match o.criterion {
        CriterionName::Apvc => CriterionKind::Apvc { eps: required(o.eps, "eps", "for apvc")? },
        CriterionName::Acc => CriterionKind::Acc { len: required(o.len, "len", "for acc")?, alpha: o.alpha },
        CriterionName::Alc => CriterionKind::Alc { len: required(o.len, "len", "for alc")?, alpha: o.alpha },
        CriterionName::Es => CriterionKind::EffectSize { theta1: required(o.theta1, "theta1", "for es")?, alpha: o.alpha },
        CriterionName::AlcQuantile => {
            return Err(Error::Domain("alc-quantile has no sample size rule; use --criterion alc".into()))
        }
    };
    let criterion = Criterion::new(kind, ParamRange::new(lo, hi)?)?;
    let r = min_sample_size(&criterion, &fam)?;
    let mut out = String::new();
    match o.format {
        Format::Text => {
            let _ = writeln!(out, "n_min    {}", r.n_min);
            let _ = writeln!(out, "n_real   {}", r.n_real);
            let _ = writeln!(out, "inf_info {}", r.inf_info);
            let _ = writeln!(out, "argmin   {}", r.argmin);
        }
        Format::Csv => {
            let _ = writeln!(out, "criterion,model,n_min,n_real,inf_info,argmin");
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                criterion.label(),
                model_name(o),
                r.n_min,
                r.n_real,
                r.inf_info,
                r.argmin
            );
        }
    }
    Ok(out)
}

fn exact_value(o: &Opts, f: &Functional, prior: Option<&Prior>, theta0: f64, n: u64) -> Result<Option<f64>, Error> {
    Ok(match (o.model, prior) {
        (Model::Normal, Some(&Prior::Normal { mu0, tau2 })) => {
            let model = NormalNormal::new(required(o.sigma2, "sigma2", "for the normal model")?, mu0, tau2)?;
            Some(exact_g_normal(f, &model, theta0, n)?.value)
        }
        (Model::Poisson, Some(&Prior::Gamma { a, b })) if *f == Functional::Variance => {
            Some(exact_apvc_poisson_gamma(a, b, theta0, n)?.value)
        }
        (Model::Bernoulli, Some(&Prior::Beta { a, b })) if *f == Functional::Variance && a == 1.0 && b == 1.0 => {
            Some(exact_apvc_binomial_uniform(theta0, n)?.value)
        }
        (Model::Exp, Some(&Prior::Beta { a, b })) => Some(oracle_expbeta_single(*f, (a, b), theta0, n)?.value),
        _ => None,
    })
}

fn render_rows(rows: &[TableRow], format: Format) -> Outcome {
    match format {
        Format::Text => Ok(tables::render_text(rows)),
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
            let io = |e: csv::Error| Error::Config(format!("csv output: {e}"));
            w.write_record(CSV_HEADER.split(',')).map_err(io)?;
            for r in rows {
                w.write_record(r.to_csv_record()).map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Config(format!("csv output: {e}")))?;
            String::from_utf8(bytes).map_err(|e| Error::Config(format!("csv output: {e}")))
        }
    }
}

fn cmd_eval(o: &Opts) -> Outcome {
    let fam = family(o)?;
    let f = functional(o)?;
    let theta0 = required(o.theta0, "theta0", "for eval")?;
    let n = required(o.n, "n", "for eval")?;
    fam.check_theta(theta0)?;
    let prior = prior(o)?;
    let gs = g_star(&f, &fam, theta0, n)?;
    let exact = exact_value(o, &f, prior.as_ref(), theta0, n)?;
    match o.format {
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "g_star     {gs}");
            if let Some(e) = exact {
                let _ = writeln!(out, "g_exact    {e}");
                let _ = writeln!(out, "difference {}", e - gs);
            }
            Ok(out)
        }
        Format::Csv => render_rows(
            &[TableRow {
                label: String::new(),
                criterion: f.label().into(),
                model: model_name(o).into(),
                params: params(o, prior.as_ref()),
                theta0,
                n,
                g_hat: None,
                g_hat_se: None,
                g_exact: exact,
                g_star: gs,
            }],
            Format::Csv,
        ),
    }
}

fn cmd_simulate(o: &Opts) -> Outcome {
    let fam = family(o)?;
    let f = functional(o)?;
    let theta0 = required(o.theta0, "theta0", "for simulate")?;
    let n = required(o.n, "n", "for simulate")?;
    let prior = prior(o)?.ok_or_else(|| {
        Error::Domain(match o.model {
            Model::Normal => "simulate needs --mu0 and --tau2 for the normal prior".into(),
            _ => "simulate needs --a and --b for the gamma prior".into(),
        })
    })?;
    let spec = SimulationSpec { family: fam, prior, theta0, n, m: o.m, seed: seed(o) };
    let est = simulate_g(&spec, f)?;
    match o.format {
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "mean    {}", est.mean);
            let _ = writeln!(out, "std_err {}", est.std_err);
            let _ = writeln!(out, "m       {}", est.m);
            let _ = writeln!(out, "seed    {}", est.seed);
            Ok(out)
        }
        Format::Csv => render_rows(
            &[TableRow {
                label: String::new(),
                criterion: f.label().into(),
                model: model_name(o).into(),
                params: format!("{};m={};seed={}", params(o, Some(&prior)), est.m, est.seed),
                theta0,
                n,
                g_hat: Some(est.mean),
                g_hat_se: Some(est.std_err),
                g_exact: None,
                g_star: g_star(&f, &fam, theta0, n)?,
            }],
            Format::Csv,
        ),
    }
}

fn cmd_table(which: u8, o: &Opts) -> Outcome {
    let rows = match which {
        1 => tables::table1()?,
        2 => tables::table2()?,
        3 => tables::table3(o.m, seed(o))?,
        other => return Err(Error::Domain(format!("unknown table {other}"))),
    };
    render_rows(&rows, o.format)
}
