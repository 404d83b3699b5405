//! Step-size rules and their feasibility conditions.

use crate::error::{Error, Result, Violation};

/// Relative slack allowed when an inequality is checked at its boundary
/// (e.g. `τ₀` taken exactly at the bound returned by [`default_tau0`]).
const BOUNDARY_RTOL: f64 = 1e-12;

/// Caller-asserted strong monotonicity constants: `γ` for `A + C`, and `δ_i`
/// for `B_i⁻¹ + D_i⁻¹` when the linear-rate method is used.
#[derive(Debug, Clone, PartialEq)]
pub struct StrongMonotonicityCert {
    pub gamma: f64,
    pub delta: Option<Vec<f64>>,
}

impl StrongMonotonicityCert {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::param(format!("gamma must be positive, got {gamma}")));
        }
        Ok(Self { gamma, delta: None })
    }

    pub fn with_delta(mut self, delta: Vec<f64>) -> Result<Self> {
        if let Some(d) = delta.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
            return Err(Error::param(format!(
                "every delta must be positive, got {d}"
            )));
        }
        self.delta = Some(delta);
        Ok(self)
    }
}

/// One named inequality and how far it is from being violated (positive means satisfied).
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintCheck {
    pub name: &'static str,
    pub margin: f64,
    pub satisfied: bool,
}

impl ConstraintCheck {
    fn strict(name: &'static str, margin: f64) -> Self {
        Self {
            name,
            margin,
            satisfied: margin > 0.0,
        }
    }

    fn non_strict(name: &'static str, margin: f64, scale: f64) -> Self {
        Self {
            name,
            margin,
            satisfied: margin >= -BOUNDARY_RTOL * scale.abs().max(1.0),
        }
    }
}

fn violations(checks: &[ConstraintCheck]) -> Vec<Violation> {
    checks
        .iter()
        .filter(|c| !c.satisfied)
        .map(|c| Violation {
            constraint: c.name,
            margin: c.margin,
        })
        .collect()
}

fn weighted_norm_sum(sigma: &[f64], norms_sq: &[f64]) -> f64 {
    sigma.iter().zip(norms_sq).map(|(s, n)| s * n).sum()
}

fn check_lengths(sigma: &[f64], norms_sq: &[f64]) -> Result<()> {
    crate::error::check_dim(norms_sq.len(), sigma.len())?;
    if sigma.is_empty() {
        return Err(Error::param("at least one dual block is required"));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Baseline
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct FixedParams {
    pub tau: f64,
    pub sigma: Vec<f64>,
}

impl FixedParams {
    pub fn new(tau: f64, sigma: Vec<f64>) -> Result<Self> {
        if !(tau > 0.0) || sigma.iter().any(|s| !(*s > 0.0)) {
            return Err(Error::param("tau and every sigma must be positive"));
        }
        Ok(Self { tau, sigma })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VuFeasibility {
    pub feasible: bool,
    /// Left-hand side of the step-size condition minus 1.
    pub margin: f64,
}

/// Step-size condition of the baseline iteration:
///
/// `2·min{1/τ, 1/σ_i}·min{β, ν_i}·(1 − √(τ Σ σ_i‖L_i‖²)) > 1`,
///
/// where `β` is the cocoercivity constant of `C` and `ν_i` the strong
/// monotonicity constants of the `D_i`. Pass `f64::INFINITY` for an absent
/// operator (`C ≡ 0` or `D_i⁻¹ ≡ 0`).
pub fn validate_vu_params(
    tau: f64,
    sigma: &[f64],
    cocoercivity: f64,
    nu: &[f64],
    norms_sq: &[f64],
) -> Result<VuFeasibility> {
    check_lengths(sigma, norms_sq)?;
    crate::error::check_dim(sigma.len(), nu.len())?;
    if !(tau > 0.0) || sigma.iter().any(|s| !(*s > 0.0)) {
        return Err(Error::param("tau and every sigma must be positive"));
    }
    if !(cocoercivity > 0.0) || nu.iter().any(|n| !(*n > 0.0)) {
        return Err(Error::param(
            "cocoercivity and strong monotonicity constants must be positive",
        ));
    }

    let inv_min = sigma.iter().fold(1.0 / tau, |m, s| m.min(1.0 / s));
    let mono_min = nu.iter().fold(cocoercivity, |m, n| m.min(*n));
    let factor = 1.0 - (tau * weighted_norm_sum(sigma, norms_sq)).sqrt();

    let lhs = if factor > 0.0 {
        2.0 * inv_min * mono_min * factor
    } else if factor == 0.0 {
        0.0
    } else {
        // negative root factor: the product is ≤ 0 whatever the other terms are
        2.0 * inv_min * mono_min.min(f64::MAX) * factor
    };
    let margin = lhs - 1.0;
    Ok(VuFeasibility {
        feasible: margin > 0.0,
        margin,
    })
}

/// Validated baseline parameters; fails with the named step-size condition.
pub fn vu_init(
    tau: f64,
    sigma: &[f64],
    cocoercivity: f64,
    nu: &[f64],
    norms_sq: &[f64],
) -> Result<FixedParams> {
    let r = validate_vu_params(tau, sigma, cocoercivity, nu, norms_sq)?;
    if !r.feasible {
        return Err(Error::Infeasible(vec![Violation {
            constraint: VU_CONDITION,
            margin: r.margin,
        }]));
    }
    FixedParams::new(tau, sigma.to_vec())
}

pub const VU_CONDITION: &str =
    "2*min(1/tau, 1/sigma_i)*min(beta, nu_i)*(1 - sqrt(tau*sum(sigma_i*|L_i|^2))) > 1";

// ---------------------------------------------------------------------------
// Accelerated (O(1/n)) schedule
// ---------------------------------------------------------------------------

/// Step state of the accelerated method: `τ_n`, `σ_{i,n}`, `θ_n`, `λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct AccelSchedule {
    pub tau: f64,
    pub sigma: Vec<f64>,
    pub theta: f64,
    pub lambda: f64,
    pub n: usize,
    pub gamma: f64,
    pub eta: f64,
    pub tau0: f64,
    pub sigma0: Vec<f64>,
    pub norms_sq: Vec<f64>,
}

impl AccelSchedule {
    /// `θ = 1/√(1 + τ(2γ − ητ)/λ)`; with `η = 0` this is the `h ≡ 0` rule `1/√(1 + 2τγ/λ)`.
    pub fn theta_for(&self, tau: f64, eta: f64) -> f64 {
        1.0 / (1.0 + tau * (2.0 * self.gamma - eta * tau) / self.lambda).sqrt()
    }

    /// `τ₁ = θ₀ τ₀`.
    pub fn tau1(&self) -> f64 {
        self.theta_for(self.tau0, self.eta) * self.tau0
    }

    /// Advances `τ → θ → σ` in that order:
    /// `τ_{n+1} = θ_n τ_n`, `θ_{n+1}` from `τ_{n+1}`, `σ_{i,n+1} = σ_{i,n}/θ_{n+1}`.
    pub(crate) fn advance(&mut self, eta: f64) {
        self.tau *= self.theta;
        self.theta = self.theta_for(self.tau, eta);
        for s in &mut self.sigma {
            *s /= self.theta;
        }
        self.n += 1;
    }

    /// Largest relative deviation of `τ_{n+1}·σ_{i,n} = τ_n θ_n σ_{i,n}` from `τ₁ σ_{i,0}`.
    ///
    /// Written in schedule terms: `τ_{n}·θ_{n}·σ_{i,n}` (which equals `τ_{n+1}σ_{i,n}`)
    /// is invariant along the iteration.
    pub fn product_drift(&self) -> f64 {
        let tau1 = self.tau1();
        self.sigma
            .iter()
            .zip(&self.sigma0)
            .map(|(s, s0)| {
                let want = tau1 * s0;
                ((self.tau * self.theta * s) - want).abs() / want
            })
            .fold(0.0, f64::max)
    }
}

/// Every initialization constraint of the accelerated method with its margin.
/// With `eta = 0` the `h ≡ 0` variant applies (`λ ≥ 1`, no bound on `τ₀` from `η`).
pub fn accel_feasibility(
    tau0: f64,
    sigma0: &[f64],
    lambda: f64,
    cert: &StrongMonotonicityCert,
    eta: f64,
    norms_sq: &[f64],
) -> Result<Vec<ConstraintCheck>> {
    check_lengths(sigma0, norms_sq)?;
    if !(eta >= 0.0) {
        return Err(Error::param("eta must be nonnegative"));
    }
    let gamma = cert.gamma;
    let mut checks = vec![
        ConstraintCheck::strict("tau0 > 0", tau0),
        ConstraintCheck::strict(
            "sigma0_i > 0",
            sigma0.iter().copied().fold(f64::INFINITY, f64::min),
        ),
    ];
    if eta > 0.0 {
        checks.push(ConstraintCheck::strict(
            "tau0 < 2*gamma/eta",
            2.0 * gamma / eta - tau0,
        ));
        checks.push(ConstraintCheck::non_strict(
            "lambda >= eta + 1",
            lambda - (eta + 1.0),
            lambda,
        ));
    } else {
        checks.push(ConstraintCheck::non_strict(
            "lambda >= 1",
            lambda - 1.0,
            lambda,
        ));
    }
    let lhs = tau0 * weighted_norm_sum(sigma0, norms_sq);
    let rhs = (1.0 + tau0 * (2.0 * gamma - eta * tau0) / lambda).sqrt();
    let name = if eta > 0.0 {
        "tau0*sum(sigma0_i*|L_i|^2) <= sqrt(1 + tau0*(2*gamma - eta*tau0)/lambda)"
    } else {
        "tau0*sum(sigma0_i*|L_i|^2) <= sqrt(1 + 2*tau0*gamma/lambda)"
    };
    checks.push(ConstraintCheck::non_strict(name, rhs - lhs, rhs));
    Ok(checks)
}

/// Validates the initialization and returns the schedule at `n = 0` with `θ₀` precomputed.
pub fn accel_init(
    tau0: f64,
    sigma0: &[f64],
    lambda: f64,
    cert: &StrongMonotonicityCert,
    eta: f64,
    norms_sq: &[f64],
) -> Result<AccelSchedule> {
    let checks = accel_feasibility(tau0, sigma0, lambda, cert, eta, norms_sq)?;
    let bad = violations(&checks);
    if !bad.is_empty() {
        return Err(Error::Infeasible(bad));
    }
    let mut schedule = AccelSchedule {
        tau: tau0,
        sigma: sigma0.to_vec(),
        theta: 0.0,
        lambda,
        n: 0,
        gamma: cert.gamma,
        eta,
        tau0,
        sigma0: sigma0.to_vec(),
        norms_sq: norms_sq.to_vec(),
    };
    schedule.theta = schedule.theta_for(tau0, eta);
    Ok(schedule)
}

/// Largest `τ₀` satisfying the coupled initialization inequality for the given `σ_{i,0}`:
///
/// `(γ/λ + √(γ²/λ² + S² + η/λ)) / (S² + η/λ)` with `S = Σ σ_{i,0}‖L_i‖²`,
///
/// capped at `0.99·2γ/η` when `η > 0` so that the strict bound `τ₀ < 2γ/η` also holds.
pub fn default_tau0(
    sigma0: &[f64],
    norms_sq: &[f64],
    cert: &StrongMonotonicityCert,
    eta: f64,
    lambda: f64,
) -> Result<f64> {
    check_lengths(sigma0, norms_sq)?;
    let g = cert.gamma / lambda;
    let s = weighted_norm_sum(sigma0, norms_sq);
    let denom = s * s + eta / lambda;
    if !(denom > 0.0) {
        return Err(Error::param("sum of sigma0_i*|L_i|^2 must be positive"));
    }
    let bound = (g + (g * g + denom).sqrt()) / denom;
    Ok(if eta > 0.0 {
        bound.min(0.99 * 2.0 * cert.gamma / eta)
    } else {
        bound
    })
}

// ---------------------------------------------------------------------------
// Linear-rate parameters
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct LinearRateParams {
    pub mu: f64,
    pub tau: f64,
    pub sigma: Vec<f64>,
    pub theta: f64,
    pub omega: f64,
}

impl LinearRateParams {
    pub fn theta_min(mu: f64) -> f64 {
        2.0 / (2.0 + mu)
    }
}

/// Constraint report for the linear-rate method (used by feasibility reports).
pub fn linear_rate_feasibility(
    cert: &StrongMonotonicityCert,
    eta: f64,
    nu: &[f64],
    norms_sq: &[f64],
    theta_choice: Option<f64>,
) -> Result<(LinearRateParams, Vec<ConstraintCheck>)> {
    let delta = cert.delta.as_ref().ok_or_else(|| {
        Error::Config("linear-rate method needs delta_i in the certificate".into())
    })?;
    crate::error::check_dim(norms_sq.len(), delta.len())?;
    crate::error::check_dim(norms_sq.len(), nu.len())?;
    if delta.is_empty() {
        return Err(Error::param("at least one dual block is required"));
    }
    if !(eta >= 0.0) || nu.iter().any(|n| !(*n >= 0.0)) {
        return Err(Error::param("Lipschitz constants must be nonnegative"));
    }
    let gamma = cert.gamma;

    // Terms whose Lipschitz constant is 0 are +∞ and drop out of the min.
    let mut mu = (gamma / norms_sq.iter().zip(delta).map(|(l, d)| l / d).sum::<f64>()).sqrt();
    if eta > 0.0 {
        mu = mu.min(gamma * gamma / (eta * eta));
    }
    for (d, n) in delta.iter().zip(nu) {
        if *n > 0.0 {
            mu = mu.min(d * d / (n * n));
        }
    }

    let theta_lo = LinearRateParams::theta_min(mu);
    let theta = theta_choice.unwrap_or(theta_lo);
    let checks = vec![
        ConstraintCheck::strict("mu > 0", mu),
        ConstraintCheck::non_strict("theta >= 2/(2+mu)", theta - theta_lo, 1.0),
        ConstraintCheck::non_strict("theta <= 1", 1.0 - theta, 1.0),
    ];
    let params = LinearRateParams {
        mu,
        tau: mu / (2.0 * gamma),
        sigma: delta.iter().map(|d| mu / (2.0 * d)).collect(),
        theta,
        omega: 2.0 * (1.0 + theta) / (4.0 + mu),
    };
    Ok((params, checks))
}

/// Derives `μ` (at equality with its upper bound), `τ = μ/(2γ)`, `σ_i = μ/(2δ_i)`,
/// `θ` (default `2/(2+μ)`) and the rate `ω = 2(1+θ)/(4+μ)`.
pub fn linear_rate_init(
    cert: &StrongMonotonicityCert,
    eta: f64,
    nu: &[f64],
    norms_sq: &[f64],
    theta_choice: Option<f64>,
) -> Result<LinearRateParams> {
    let (params, checks) = linear_rate_feasibility(cert, eta, nu, norms_sq, theta_choice)?;
    let bad = violations(&checks);
    if !bad.is_empty() {
        return Err(Error::Infeasible(bad));
    }
    Ok(params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cert(gamma: f64) -> StrongMonotonicityCert {
        StrongMonotonicityCert::new(gamma).unwrap()
    }

    #[test]
    fn vu_condition_examples() {
        let r = validate_vu_params(0.1, &[0.1], 1.0, &[f64::INFINITY], &[8.0]).unwrap();
        let expected = 2.0 * 10.0 * (1.0 - 0.08_f64.sqrt()) - 1.0;
        assert!(r.feasible);
        assert!((r.margin - expected).abs() < 1e-12);
        assert!((r.margin + 1.0 - 14.343).abs() < 1e-3);

        let r = validate_vu_params(1.0, &[1.0], 1.0, &[f64::INFINITY], &[8.0]).unwrap();
        assert!(!r.feasible && r.margin <= 0.0);

        // baseline defaults used for denoising: root factor ≈ 0.2493
        let s = 0.35 * (0.2 * 8.0 + 0.01 * 1.0);
        assert!((s - 0.5635_f64).abs() < 1e-12);
        assert!((1.0 - s.sqrt() - 0.2493).abs() < 1e-4);
        let r = validate_vu_params(
            0.35,
            &[0.2, 0.01],
            f64::INFINITY,
            &[f64::INFINITY, f64::INFINITY],
            &[8.0, 1.0],
        )
        .unwrap();
        assert!(r.feasible);
    }

    #[test]
    fn vu_condition_boundary_is_infeasible() {
        let r = validate_vu_params(1.0, &[1.0], f64::INFINITY, &[f64::INFINITY], &[1.0]).unwrap();
        assert!(!r.feasible);
        assert!(r.margin <= 0.0);
    }

    #[test]
    fn accel_init_examples() {
        let s = accel_init(1.0, &[0.15], 2.0, &cert(1.0), 1.0, &[8.0]).unwrap();
        assert!((s.theta - 1.0 / 1.5_f64.sqrt()).abs() < 1e-15);

        let err = accel_init(2.0, &[0.15], 2.0, &cert(1.0), 1.0, &[8.0]).unwrap_err();
        match err {
            Error::Infeasible(v) => assert!(v.iter().any(|x| x.constraint == "tau0 < 2*gamma/eta")),
            other => panic!("unexpected {other:?}"),
        }

        let s = accel_init(1.0, &[1.7], 1.0, &cert(1.0), 0.0, &[1.0]).unwrap();
        assert!((s.theta - 1.0 / 3.0_f64.sqrt()).abs() < 1e-15);
        assert!(accel_init(1.0, &[1.8], 1.0, &cert(1.0), 0.0, &[1.0]).is_err());
    }

    #[test]
    fn accel_init_requires_lambda_bound() {
        let err = accel_init(0.5, &[0.1], 1.5, &cert(1.0), 1.0, &[1.0]).unwrap_err();
        match err {
            Error::Infeasible(v) => assert_eq!(v[0].constraint, "lambda >= eta + 1"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn default_tau0_example() {
        let t = default_tau0(&[1.0], &[1.0], &cert(1.0), 1.0, 2.0).unwrap();
        assert!((t - (0.5 + 1.75_f64.sqrt()) / 1.5).abs() < 1e-14);
        assert!((t - 1.2153).abs() < 1e-4);
        accel_init(t, &[1.0], 2.0, &cert(1.0), 1.0, &[1.0]).unwrap();

        let t = default_tau0(&[100.0], &[1.0], &cert(1.0), 1.0, 2.0).unwrap();
        assert!(t > 0.0 && t < 0.02);
        accel_init(t, &[100.0], 2.0, &cert(1.0), 1.0, &[1.0]).unwrap();
    }

    #[test]
    fn linear_rate_examples() {
        let c = cert(1.0).with_delta(vec![1.0]).unwrap();
        let p = linear_rate_init(&c, 1.0, &[1.0], &[1.0], None).unwrap();
        assert_eq!(p.mu, 1.0);
        assert_eq!((p.tau, p.sigma[0]), (0.5, 0.5));
        assert!((p.theta - 2.0 / 3.0).abs() < 1e-15);
        assert!((p.omega - 2.0 / 3.0).abs() < 1e-15);

        let p = linear_rate_init(&c, 0.0, &[0.0], &[1.0], None).unwrap();
        assert_eq!(p.mu, 1.0);

        let p = linear_rate_init(&c, 0.0, &[0.0], &[1.0], Some(1.0)).unwrap();
        assert!((p.omega - 0.8).abs() < 1e-15);

        let err = linear_rate_init(&c, 0.0, &[0.0], &[1.0], Some(0.5)).unwrap_err();
        assert!(matches!(err, Error::Infeasible(ref v) if v[0].constraint == "theta >= 2/(2+mu)"));
        assert!(linear_rate_init(&cert(1.0), 0.0, &[0.0], &[1.0], None).is_err());
    }

    #[test]
    fn schedule_advances_in_order() {
        let mut s = accel_init(1.0, &[1.0], 1.0, &cert(1.0), 0.0, &[1.0]).unwrap();
        let theta0 = s.theta;
        s.advance(0.0);
        assert!((s.tau - theta0).abs() < 1e-15);
        let theta1 = 1.0 / (1.0 + 2.0 * s.tau).sqrt();
        assert!((s.theta - theta1).abs() < 1e-15);
        assert!((s.sigma[0] - 1.0 / theta1).abs() < 1e-14);
        assert!(s.product_drift() < 1e-14);
    }
}
