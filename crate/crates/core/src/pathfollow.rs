//! Local primal-dual path-following driver.
//!
//! Each iteration takes a tangential step with fraction-to-boundary
//! backtracking, shrinks the barrier parameter, and recenters with a Newton
//! step at the new barrier value.

use log::{debug, info, warn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{residual_phi1, residual_xi_identity, Iterate, Problem};
use crate::newton::{solve_centering, solve_tangential, Direction};
use crate::scaling::{make_scaling, z_max_norm, ScalingKind};
use crate::symcore::{is_pd, min_eig};

/// Barrier values at or above this are clamped in the step-length rule.
pub const MU_CLAMP: f64 = 0.95;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub xi: f64,
    pub xi_prime: f64,
    pub tau: f64,
    pub scaling: ScalingKind,
    pub tol: f64,
    pub max_iters: usize,
    pub max_backtracks: usize,
    pub mu_floor: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            beta: 0.5,
            gamma: 1.0,
            xi: 0.5,
            xi_prime: 1.0 / 3.0,
            tau: 10.0,
            scaling: ScalingKind::Hkm,
            tol: 1e-10,
            max_iters: 100,
            max_backtracks: 60,
            mu_floor: 1e-14,
        }
    }
}

impl SolverConfig {
    /// Open interval `(ξ/2, (ξ−α)/(1+α))` that `ξ′` must lie in.
    pub fn xi_prime_bounds(alpha: f64, xi: f64) -> (f64, f64) {
        (xi / 2.0, (xi - alpha) / (1.0 + alpha))
    }

    /// `1/3` when admissible for `(α, ξ)`, otherwise the midpoint of the admissible interval.
    pub fn default_xi_prime(alpha: f64, xi: f64) -> f64 {
        let (lo, hi) = Self::xi_prime_bounds(alpha, xi);
        let third = 1.0 / 3.0;
        if lo < third && third < hi {
            third
        } else {
            0.5 * (lo + hi)
        }
    }

    /// Rejects inadmissible constants and returns warnings for admissible
    /// but unsupported combinations.
    pub fn validate(&self) -> Result<Vec<String>> {
        let open_unit = |name: &str, v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must lie in (0, 1), got {v}")))
            }
        };
        open_unit("alpha", self.alpha)?;
        open_unit("beta", self.beta)?;
        open_unit("xi", self.xi)?;
        for (name, v) in [("gamma", self.gamma), ("tau", self.tau), ("tol", self.tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.mu_floor >= 0.0) {
            return Err(Error::Config(format!(
                "mu_floor must be nonnegative, got {}",
                self.mu_floor
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be at least 1".into()));
        }
        let (a, x, xp) = (self.alpha, self.xi, self.xi_prime);
        let (lo, hi) = Self::xi_prime_bounds(a, x);
        if !(hi > xp && xp > lo) {
            return Err(Error::Config(format!(
                "violated (xi - alpha)/(1 + alpha) > xi' > xi/2: (xi - alpha)/(1 + alpha) = {hi}, xi' = {xp}, xi/2 = {lo}"
            )));
        }
        let amax = x / (x + 2.0);
        if !(a < amax) {
            return Err(Error::Config(format!(
                "violated 0 < alpha < xi/(xi + 2): alpha = {a}, xi/(xi + 2) = {amax}"
            )));
        }
        let mut warnings = Vec::new();
        if !self.scaling.xi_is_admissible(x) {
            let (l, h) = self.scaling.admissible_xi();
            warnings.push(format!(
                "xi = {x} is outside [{l}, {h}) for the {} scaling; local convergence is not guaranteed",
                self.scaling
            ));
        }
        Ok(warnings)
    }

    /// Neighborhood radius `τ μ^{1+e}`.
    pub fn radius(&self, mu: f64, exponent: f64) -> f64 {
        self.tau * mu.powf(1.0 + exponent)
    }
}

/// One iteration `w^k → w^{k+1/2} → w^{k+1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub k: usize,
    /// `μ_k`
    pub mu: f64,
    /// `μ_{k+1}`
    pub mu_next: f64,
    pub s_t: f64,
    pub s_c: f64,
    pub bt_t: usize,
    pub bt_c: usize,
    /// `‖Φ¹_{μ_k}(w^k)‖`
    pub phi1_start: f64,
    /// `‖Φ¹_{μ_{k+1}}(w^{k+1/2})‖`
    pub phi1_half: f64,
    /// `‖Φ¹_{μ_{k+1}}(w^{k+1})‖`
    pub phi1: f64,
    /// `‖Ξ⁰_I(w^{k+1})‖`
    pub xi0: f64,
    pub min_eig_g: f64,
    pub min_eig_y: f64,
    /// `max_i ‖Zᵢ‖_F` at `w^{k+1}` and `μ_{k+1}`.
    pub zmax: f64,
    pub rcond_t: f64,
    pub rcond_c: f64,
    pub cross_check_t: f64,
    pub cross_check_c: f64,
    pub order_estimate_running: Option<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct Trace {
    pub mu0: f64,
    pub records: Vec<Record>,
    /// `w^0, w^1, …`
    pub iterates: Vec<Iterate>,
    /// `w^{1/2}, w^{3/2}, …`
    pub halves: Vec<Iterate>,
}

impl Trace {
    pub fn mus(&self) -> Vec<f64> {
        let mut out = vec![self.mu0];
        out.extend(self.records.iter().map(|r| r.mu_next));
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Converged,
    MaxIters,
    Failed(String),
}

impl Status {
    pub fn label(&self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::MaxIters => "max-iters",
            Status::Failed(_) => "failed",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub w: Iterate,
    pub trace: Trace,
    pub status: Status,
}

/// `μ₀ = γ ‖Ξ⁰_I(w⁰)‖`
pub fn initial_mu(p: &dyn Problem, w0: &Iterate, gamma: f64) -> Result<f64> {
    w0.ensure_interior(p)?;
    Ok(gamma * residual_xi_identity(p, w0, 0.0)?.norm)
}

/// Smallest `count` such that `w + β^count·s_init·d` has `G ≻ 0` and `Y ≻ 0`.
pub fn backtrack_pd(
    p: &dyn Problem,
    w: &Iterate,
    d: &Direction,
    s_init: f64,
    beta: f64,
    max_bt: usize,
) -> Result<(f64, usize)> {
    let mut s = s_init;
    for count in 0..=max_bt {
        let trial = w.advance(d, s);
        if is_pd(&p.g(&trial.x)) && is_pd(&trial.y) {
            return Ok((s, count));
        }
        s *= beta;
    }
    Err(Error::BacktrackExhausted { count: max_bt })
}

/// Tangential step data.
#[derive(Debug, Clone)]
pub struct TangentialOutcome {
    pub w_half: Iterate,
    pub mu_next: f64,
    pub s_t: f64,
    pub backtracks: usize,
    pub rcond: f64,
    pub cross_check: f64,
}

/// Step `s_t = β^ℓ (1 − min(0.95, μ)^α)` and update `μ₊ = (1 − s_t) μ`.
pub fn tangential_phase(p: &dyn Problem, w: &Iterate, mu: f64, cfg: &SolverConfig) -> Result<TangentialOutcome> {
    let sc = make_scaling(cfg.scaling, p, w)?;
    let step = solve_tangential(p, w, mu, &sc)?;
    let c = mu.min(MU_CLAMP);
    let c_alpha = c.powf(cfg.alpha);
    let (s_t, backtracks) = backtrack_pd(p, w, &step.dir, 1.0 - c_alpha, cfg.beta, cfg.max_backtracks)?;
    let mu_next = if backtracks == 0 && mu < MU_CLAMP {
        // Same value as (1 − s_t)·μ without the cancellation in 1 − s_t.
        mu.powf(1.0 + cfg.alpha)
    } else {
        let bl = cfg.beta.powi(backtracks as i32);
        ((1.0 - bl) + bl * c_alpha) * mu
    };
    Ok(TangentialOutcome {
        w_half: w.advance(&step.dir, s_t),
        mu_next,
        s_t,
        backtracks,
        rcond: step.rcond,
        cross_check: step.scaled_residual,
    })
}

#[derive(Debug, Clone)]
pub struct CenteringOutcome {
    pub w_next: Iterate,
    pub s_c: f64,
    pub backtracks: usize,
    pub rcond: f64,
    pub cross_check: f64,
}

/// Newton step toward the central path at `mu_next`, backtracked from 1.
pub fn centering_phase(
    p: &dyn Problem,
    w_half: &Iterate,
    mu_next: f64,
    cfg: &SolverConfig,
) -> Result<CenteringOutcome> {
    let sc = make_scaling(cfg.scaling, p, w_half)?;
    let step = solve_centering(p, w_half, mu_next, &sc)?;
    let (s_c, backtracks) = backtrack_pd(p, w_half, &step.dir, 1.0, cfg.beta, cfg.max_backtracks)?;
    Ok(CenteringOutcome {
        w_next: w_half.advance(&step.dir, s_c),
        s_c,
        backtracks,
        rcond: step.rcond,
        cross_check: step.scaled_residual,
    })
}

pub fn run(p: &dyn Problem, w0: &Iterate, cfg: &SolverConfig) -> Result<RunOutcome> {
    run_with_reference(p, w0, cfg, None)
}

/// Like [`run`], additionally recording a running order estimate against `w_star`.
pub fn run_with_reference(
    p: &dyn Problem,
    w0: &Iterate,
    cfg: &SolverConfig,
    w_star: Option<&Iterate>,
) -> Result<RunOutcome> {
    for msg in cfg.validate()? {
        warn!("{msg}");
    }
    w0.check_dims(p)?;
    let mut trace = Trace {
        mu0: initial_mu(p, w0, cfg.gamma)?,
        records: Vec::new(),
        iterates: vec![w0.clone()],
        halves: Vec::new(),
    };
    let mut w = w0.clone();
    let mut mu = trace.mu0;
    let mut xi0 = trace.mu0 / cfg.gamma;
    info!("mu0 = {mu:.6e} with {} scaling", cfg.scaling);
    let status = loop {
        if xi0 <= cfg.tol {
            break Status::Converged;
        }
        let k = trace.records.len();
        if k >= cfg.max_iters {
            break Status::MaxIters;
        }
        if mu <= cfg.mu_floor {
            break Status::Failed(format!(
                "barrier parameter {mu:.3e} reached the floor {:.3e} before the residual tolerance",
                cfg.mu_floor
            ));
        }
        match iterate_once(p, &w, mu, k, cfg) {
            Ok((rec, half, next)) => {
                debug!(
                    "k={k} mu={:.6e} s_t={:.6e} s_c={:.3e} bt=({}, {}) phi1={:.3e} xi0={:.3e}",
                    rec.mu, rec.s_t, rec.s_c, rec.bt_t, rec.bt_c, rec.phi1, rec.xi0
                );
                mu = rec.mu_next;
                xi0 = rec.xi0;
                w = next;
                trace.records.push(rec);
                trace.halves.push(half);
                trace.iterates.push(w.clone());
                if let Some(ws) = w_star {
                    let errs: Vec<f64> = trace.iterates.iter().map(|v| v.dist(ws)).collect();
                    trace.records.last_mut().unwrap().order_estimate_running = estimate_order(&errs).ok();
                }
            }
            Err(e) => break Status::Failed(e.to_string()),
        }
    };
    info!(
        "{} after {} iterations, residual {xi0:.3e}",
        status.label(),
        trace.records.len()
    );
    Ok(RunOutcome { w, trace, status })
}

fn iterate_once(
    p: &dyn Problem,
    w: &Iterate,
    mu: f64,
    k: usize,
    cfg: &SolverConfig,
) -> Result<(Record, Iterate, Iterate)> {
    let phi1_start = residual_phi1(p, w, mu).norm;
    let t = tangential_phase(p, w, mu, cfg)?;
    let c = centering_phase(p, &t.w_half, t.mu_next, cfg)?;
    let next = c.w_next;
    let sc = make_scaling(cfg.scaling, p, &next)?;
    let rec = Record {
        k,
        mu,
        mu_next: t.mu_next,
        s_t: t.s_t,
        s_c: c.s_c,
        bt_t: t.backtracks,
        bt_c: c.backtracks,
        phi1_start,
        phi1_half: residual_phi1(p, &t.w_half, t.mu_next).norm,
        phi1: residual_phi1(p, &next, t.mu_next).norm,
        xi0: residual_xi_identity(p, &next, 0.0)?.norm,
        min_eig_g: min_eig(&p.g(&next.x)),
        min_eig_y: min_eig(&next.y),
        zmax: z_max_norm(&sc, t.mu_next),
        rcond_t: t.rcond,
        rcond_c: c.rcond,
        cross_check_t: t.cross_check,
        cross_check_c: c.cross_check,
        order_estimate_running: None,
    };
    Ok((rec, t.w_half, next))
}

/// Errors at or below this are treated as rounding noise.
pub const ORDER_NOISE_FLOOR: f64 = 1e2 * f64::EPSILON;
/// Number of trailing `(e_k, e_{k+1})` pairs used by [`estimate_order`].
pub const ORDER_WINDOW: usize = 5;

/// Least-squares slope of `log e_{k+1}` against `log e_k` over the last
/// usable pairs of the error sequence.
pub fn estimate_order(errors: &[f64]) -> Result<f64> {
    let usable: Vec<f64> = errors
        .iter()
        .copied()
        .take_while(|e| e.is_finite() && *e > ORDER_NOISE_FLOOR)
        .collect();
    if usable.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "{} usable errors, need at least 4",
            usable.len()
        )));
    }
    let pairs: Vec<(f64, f64)> = usable.windows(2).map(|p| (p[0].ln(), p[1].ln())).collect();
    let tail = &pairs[pairs.len().saturating_sub(ORDER_WINDOW)..];
    if tail.iter().any(|(a, b)| b >= a) {
        return Err(Error::InsufficientData("errors are not strictly decreasing".into()));
    }
    let n = tail.len() as f64;
    let mx = tail.iter().map(|p| p.0).sum::<f64>() / n;
    let my = tail.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = tail.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = tail.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::InsufficientData("errors do not vary".into()));
    }
    Ok(sxy / sxx)
}

/// Order estimate for a finished run against `w_star`.
pub fn estimate_order_trace(trace: &Trace, w_star: &Iterate) -> Result<f64> {
    let errs: Vec<f64> = trace.iterates.iter().map(|v| v.dist(w_star)).collect();
    estimate_order(&errs)
}
