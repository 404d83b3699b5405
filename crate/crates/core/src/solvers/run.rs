use std::fmt::Write as _;
use std::path::Path;

use super::{
    accel_step, linear_rate_step, vu_step, AccelSchedule, CertValue, FejerCertificate, FixedParams,
    GeometricCertificate, IterateState, LinearRateParams, PrimalDualProblem, PrimalDualSolution,
    StrongMonotonicityCert,
};
use crate::error::{Error, Result};
use crate::vecops::dist_sq;

/// Which iteration to run, with its (validated) parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    Vu(FixedParams),
    Accel(AccelSchedule),
    Linear(LinearRateParams),
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Vu(_) => "vu",
            Method::Accel(_) => "accel",
            Method::Linear(_) => "linear",
        }
    }

    fn num_sigma(&self) -> usize {
        match self {
            Method::Vu(p) => p.sigma.len(),
            Method::Accel(s) => s.sigma.len(),
            Method::Linear(p) => p.sigma.len(),
        }
    }

    fn tau(&self) -> f64 {
        match self {
            Method::Vu(p) => p.tau,
            Method::Accel(s) => s.tau,
            Method::Linear(p) => p.tau,
        }
    }
}

/// Method selector without parameters, as named on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Vu,
    Accel,
    Linear,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Vu => "vu",
            Algorithm::Accel => "accel",
            Algorithm::Linear => "linear",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vu" => Ok(Algorithm::Vu),
            "accel" => Ok(Algorithm::Accel),
            "linear" => Ok(Algorithm::Linear),
            other => Err(Error::Config(format!(
                "unknown algorithm '{other}' (expected vu, accel or linear)"
            ))),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceMetric {
    /// `‖x − ref‖`
    #[default]
    Euclidean,
    /// `√(‖x − ref‖²/k)`
    Rmse,
}

impl DistanceMetric {
    pub fn eval(self, x: &[f64], reference: &[f64]) -> f64 {
        let d2 = dist_sq(x, reference);
        match self {
            DistanceMetric::Euclidean => d2.sqrt(),
            DistanceMetric::Rmse => (d2 / x.len() as f64).sqrt(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct StopRule {
    pub max_iters: usize,
    pub reference: Option<Vec<f64>>,
    /// Stop as soon as the distance to `reference` is at most `tol`.
    pub tol: Option<f64>,
    pub metric: DistanceMetric,
}

impl StopRule {
    pub fn iterations(max_iters: usize) -> Self {
        Self {
            max_iters,
            ..Self::default()
        }
    }
}

/// Optional per-iteration callbacks.
#[derive(Default)]
pub struct RunHooks<'a> {
    #[allow(clippy::type_complexity)]
    pub objective: Option<&'a dyn Fn(&[f64]) -> f64>,
    /// Known primal-dual solution and constants for the convergence inequality
    /// of the chosen method (accelerated or linear-rate only).
    pub certificate: Option<(PrimalDualSolution, StrongMonotonicityCert)>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticRecord {
    pub n: usize,
    pub tau_n: f64,
    pub n_tau_n: f64,
    pub dist_to_ref: Option<f64>,
    pub objective: Option<f64>,
    pub cert: Option<CertValue>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunDiagnostics {
    pub records: Vec<DiagnosticRecord>,
    pub seed: Option<u64>,
}

fn fmt_float(out: &mut String, v: Option<f64>) {
    if let Some(v) = v {
        let _ = write!(out, "{v:.16e}");
    }
}

impl RunDiagnostics {
    pub const CSV_HEADER: &'static str = "n,tau_n,n_tau_n,dist_to_ref,objective,cert_lhs,cert_rhs";

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&DiagnosticRecord> {
        self.records.last()
    }

    /// CSV with 17 significant digits; missing values are empty fields.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.records.len() + 1));
        out.push_str(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = write!(out, "{},", r.n);
            fmt_float(&mut out, Some(r.tau_n));
            out.push(',');
            fmt_float(&mut out, Some(r.n_tau_n));
            out.push(',');
            fmt_float(&mut out, r.dist_to_ref);
            out.push(',');
            fmt_float(&mut out, r.objective);
            out.push(',');
            fmt_float(&mut out, r.cert.map(|c| c.lhs));
            out.push(',');
            fmt_float(&mut out, r.cert.map(|c| c.rhs));
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

pub struct RunOutcome {
    pub state: IterateState,
    /// The method with its final parameters (the accelerated schedule is advanced).
    pub method: Method,
    pub diagnostics: RunDiagnostics,
    /// Iteration count at which the distance first reached `tol`.
    pub reached_tol_at: Option<usize>,
}

enum Certifier {
    None,
    Fejer(Option<FejerCertificate>),
    Geometric(Option<GeometricCertificate>),
}

/// Runs `method` from `init` until `stop.max_iters` iterations (or the distance
/// threshold), recording diagnostics after every iteration.
pub fn run(
    problem: &PrimalDualProblem,
    method: Method,
    init: IterateState,
    stop: &StopRule,
    hooks: RunHooks<'_>,
) -> Result<RunOutcome> {
    problem.validate()?;
    init.check_shapes(problem)?;
    if method.num_sigma() != problem.num_blocks() {
        return Err(Error::Config(format!(
            "{} parameters carry {} dual steps for {} blocks",
            method.name(),
            method.num_sigma(),
            problem.num_blocks()
        )));
    }
    if let Some(r) = &stop.reference {
        crate::error::check_dim(problem.primal_dim(), r.len())?;
    }
    if stop.tol.is_some() && stop.reference.is_none() {
        return Err(Error::Config(
            "a distance tolerance needs a reference solution".into(),
        ));
    }

    let (solution, cert) = match hooks.certificate {
        Some((s, c)) => (Some(s), Some(c)),
        None => (None, None),
    };
    let mut certifier = match (&method, &solution) {
        (_, None) => Certifier::None,
        (Method::Vu(_), Some(_)) => {
            return Err(Error::Config(
                "no convergence certificate exists for the baseline iteration".into(),
            ))
        }
        (Method::Accel(_), Some(_)) => Certifier::Fejer(None),
        (Method::Linear(_), Some(_)) => {
            if cert.as_ref().and_then(|c| c.delta.as_ref()).is_none() {
                return Err(Error::Config(
                    "linear-rate certificate needs delta_i".into(),
                ));
            }
            Certifier::Geometric(None)
        }
    };

    let mut diagnostics = RunDiagnostics {
        records: Vec::with_capacity(stop.max_iters.min(1 << 20)),
        seed: hooks.seed,
    };
    let initial = init.clone();
    let mut state = init;
    let mut method = method;
    let mut reached_tol_at = None;

    for k in 0..stop.max_iters {
        let (next, next_method) = match &method {
            Method::Vu(p) => (vu_step(&state, problem, p), None),
            Method::Accel(s) => {
                let (st, sch) = accel_step(&state, s, problem);
                (st, Some(Method::Accel(sch)))
            }
            Method::Linear(p) => (linear_rate_step(&state, problem, p), None),
        };

        let cert_value = match (&mut certifier, solution.as_ref()) {
            (Certifier::Fejer(slot), Some(sol)) => {
                if slot.is_none() {
                    let Method::Accel(s0) = &method else {
                        unreachable!()
                    };
                    *slot = Some(FejerCertificate::new(
                        problem,
                        s0,
                        &initial,
                        &next,
                        sol.clone(),
                    ));
                }
                let Some(Method::Accel(s_next)) = &next_method else {
                    unreachable!()
                };
                slot.as_ref().map(|c| c.evaluate(&state, &next, s_next))
            }
            (Certifier::Geometric(slot), Some(sol)) => {
                if slot.is_none() {
                    let Method::Linear(p) = &method else {
                        unreachable!()
                    };
                    let c = cert.as_ref().expect("checked above");
                    *slot = Some(GeometricCertificate::new(
                        problem,
                        p,
                        c,
                        &initial,
                        &next,
                        sol.clone(),
                    )?);
                }
                slot.as_ref().map(|c| c.evaluate(k, &state, &next))
            }
            _ => None,
        };

        if let Some(m) = next_method {
            method = m;
        }
        state = next;

        let n = k + 1;
        let tau_n = method.tau();
        let dist = stop
            .reference
            .as_ref()
            .map(|r| stop.metric.eval(&state.x, r));
        diagnostics.records.push(DiagnosticRecord {
            n,
            tau_n,
            n_tau_n: n as f64 * tau_n,
            dist_to_ref: dist,
            objective: hooks.objective.map(|f| f(&state.x)),
            cert: cert_value,
        });

        if let (Some(d), Some(tol)) = (dist, stop.tol) {
            if d <= tol {
                reached_tol_at = Some(n);
                break;
            }
        }
    }

    Ok(RunOutcome {
        state,
        method,
        diagnostics,
        reached_tol_at,
    })
}
