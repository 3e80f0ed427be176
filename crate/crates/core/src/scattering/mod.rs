//! Radial scattering problem `-Delta_+ u - s(n-s) u = 0` on a model filling.
//!
//! The regular interior solution is integrated outward and matched at
//! `tau = T` against the two boundary branches `U1 ~ r^{n-s}`, `U2 ~ r^s`;
//! `S(s)1 = c2/c1` and `Q = 2/(n - 2 gamma) d_gamma S(s)1`.

pub mod frobenius;
pub mod ode;
mod profile;

use serde::Serialize;

pub use frobenius::{
    branch_raw, frobenius_branch, frobenius_coefficients, FrobeniusBranch, MAX_SERIES_ORDER,
};
pub use profile::{ProfilePoint, RadialProfile, RhoJet, Tail};

use crate::error::{Error, Result};
use crate::model_geometry::ModelSpace;
use crate::special_fn::{d_gamma, sphere_q_oracle, QCurvParams};

/// Condition estimate above which matching is refused.
pub const MAX_CONDITION: f64 = 1e12;
/// Node spacing cap, keeps the quintic interpolant accurate.
const MAX_STEP: f64 = 0.1;
/// Target ratio `e^{-2 gamma T}` of the two branches at the matching point.
const BRANCH_CONTRAST: f64 = 1e-3;
const MIN_MATCH: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    /// Relative tolerance of the interior integration.
    pub ode_tol: f64,
    /// Upper bound for the matching point.
    pub t_max: f64,
    /// Highest power kept in the Frobenius branches.
    pub order: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            ode_tol: 1e-8,
            t_max: 18.0,
            order: MAX_SERIES_ORDER,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1e-13..=1e-3).contains(&self.ode_tol) {
            return Err(Error::Config(format!(
                "ode_tol = {} outside [1e-13, 1e-3]",
                self.ode_tol
            )));
        }
        if !(self.t_max >= MIN_MATCH && self.t_max <= 40.0) {
            return Err(Error::Config(format!(
                "matching bound T = {} outside [{MIN_MATCH}, 40]",
                self.t_max
            )));
        }
        if !self.order.is_multiple_of(2) || self.order < 8 || self.order > MAX_SERIES_ORDER {
            return Err(Error::Config(format!(
                "series order {} must be even in [8, {MAX_SERIES_ORDER}]",
                self.order
            )));
        }
        Ok(())
    }

    /// Matching point: where the branch contrast reaches `BRANCH_CONTRAST`,
    /// kept inside `[MIN_MATCH, t_max]`.
    pub fn matching_point(&self, gamma: f64) -> f64 {
        ((1.0 / BRANCH_CONTRAST).ln() / (2.0 * gamma)).clamp(MIN_MATCH, self.t_max)
    }

    /// The extraction amplifies interior errors by about `e^{2 gamma T}`;
    /// the integration tolerance is tightened by that factor.
    pub fn interior_tol(&self, gamma: f64, t_match: f64) -> f64 {
        (self.ode_tol * (-2.0 * gamma * t_match).exp()).max(1e-14)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatteringResult {
    pub params: QCurvParams,
    pub t_match: f64,
    pub c1: f64,
    pub c2: f64,
    /// `S(s)1 = c2 / c1`.
    pub scattering_value: f64,
    pub q_value: f64,
    pub condition_estimate: f64,
    /// Relative change of `S(s)1` when matching at a second point.
    pub consistency_gap: f64,
    /// Relative size of the last retained Frobenius term at the match.
    pub truncation: f64,
}

impl ScatteringResult {
    pub fn oracle(&self) -> f64 {
        sphere_q_oracle(&self.params)
    }

    pub fn rel_err(&self) -> f64 {
        let o = self.oracle();
        (self.q_value - o).abs() / o.abs().max(1.0)
    }
}

/// Regular solution of `u'' + n coth(tau) u' + s(n-s) u = 0` with `u(0) = 1`
/// on `[0, tau_end]`, for any `s` (including the Lee value `n + 1`).
pub fn solve_radial(n: u32, s: f64, tol: f64, tau_end: f64) -> Result<RadialProfile> {
    if !(tol >= 1e-14) {
        return Err(Error::Domain(format!("tolerance {tol} below 1e-14")));
    }
    let nf = f64::from(n);
    let lambda = s * (nf - s);
    let traj = ode::integrate(n, lambda, tol, tau_end, MAX_STEP)?;
    Ok(RadialProfile::numeric(n, 1.0, lambda, nf - s, traj))
}

/// Interior profile for the scattering problem `p` up to `tau_end`.
pub fn solve_interior(p: &QCurvParams, tol: f64, tau_end: f64) -> Result<RadialProfile> {
    let mut prof = solve_radial(p.n, p.s(), tol, tau_end)?;
    prof.k = p.k;
    prof.check_positive()?;
    Ok(prof)
}

struct Match {
    c1: f64,
    c2: f64,
    condition: f64,
    truncation: f64,
}

fn match_at(
    prof: &RadialProfile,
    dirichlet: &FrobeniusBranch,
    neumann: &FrobeniusBranch,
    t: f64,
) -> Result<Match> {
    let pt = prof.point(t)?;
    let r = prof.r_of_tau(t);
    let d1 = dirichlet.log_theta(r);
    let d2 = neumann.log_theta(r);
    // theta = -d/dtau, so theta u = -u'.
    let combo = pt.du + d1 * pt.u;
    let condition = (pt.du.abs() + d1.abs() * pt.u.abs()) / combo.abs();
    if !(condition <= MAX_CONDITION) {
        return Err(Error::MatchingFailure {
            t_match: t,
            condition,
        });
    }
    let y = combo / (d1 - d2);
    let x = pt.u - y;
    let truncation = dirichlet
        .truncation_estimate(r)
        .max(neumann.truncation_estimate(r));
    Ok(Match {
        c1: x / dirichlet.value(r),
        c2: y / neumann.value(r),
        condition,
        truncation,
    })
}

/// Match the interior profile at `tau = t_match` and at a second point two
/// units further in, and extract `Q`.
pub fn match_and_q(
    profile: &RadialProfile,
    p: &QCurvParams,
    t_match: f64,
    order: usize,
) -> Result<ScatteringResult> {
    let last = *profile.tau.last().expect("non-empty grid");
    if !(t_match > 1.0 && t_match <= last) {
        return Err(Error::Domain(format!(
            "matching point {t_match} outside (1, {last}]"
        )));
    }
    let dirichlet = frobenius_branch(p, p.dirichlet_exponent(), order)?;
    let neumann = frobenius_branch(p, p.s(), order)?;
    let main = match_at(profile, &dirichlet, &neumann, t_match)?;
    if main.truncation > 1e-13 {
        return Err(Error::Series(format!(
            "Frobenius truncation {:.3e} at T = {t_match} is not negligible",
            main.truncation
        )));
    }
    let t_alt = if t_match - 2.0 >= 2.0 {
        t_match - 2.0
    } else {
        0.5 * t_match
    };
    let alt = match_at(profile, &dirichlet, &neumann, t_alt)?;
    let s_main = main.c2 / main.c1;
    let s_alt = alt.c2 / alt.c1;
    let d = d_gamma(p.gamma)?;
    Ok(ScatteringResult {
        params: *p,
        t_match,
        c1: main.c1,
        c2: main.c2,
        scattering_value: s_main,
        q_value: 2.0 / (p.nf() - 2.0 * p.gamma) * d * s_main,
        condition_estimate: main.condition,
        consistency_gap: (s_main - s_alt).abs() / s_main.abs(),
        truncation: main.truncation,
    })
}

/// A solved scattering problem: the extracted data and the normalized
/// profile (`r^{s-n} u -> 1` at the boundary) on the whole filling.
#[derive(Debug, Clone)]
pub struct Scattering {
    pub result: ScatteringResult,
    pub profile: RadialProfile,
}

pub fn scatter(p: &QCurvParams, cfg: &SolverConfig) -> Result<Scattering> {
    cfg.validate()?;
    let t_match = cfg.matching_point(p.gamma);
    let tol = cfg.interior_tol(p.gamma, t_match);
    let raw = solve_interior(p, tol, t_match)?;
    let result = match_and_q(&raw, p, t_match, cfg.order)?;
    let tail = Tail {
        t_match,
        dirichlet: frobenius_branch(p, p.dirichlet_exponent(), cfg.order)?,
        neumann: frobenius_branch(p, p.s(), cfg.order)?,
        scattering_value: result.scattering_value,
    };
    let profile = raw.with_tail(result.c1, tail)?;
    Ok(Scattering { result, profile })
}

/// `Q_{2 gamma}` of the boundary sphere from the scattering pipeline.
pub fn q_curvature(p: &QCurvParams, cfg: &SolverConfig) -> Result<ScatteringResult> {
    Ok(scatter(p, cfg)?.result)
}

/// The Lee potential `V = f' = r^{-1}(1 + k r^2/4)`, exact.
pub fn lee_potential_exact(m: &ModelSpace) -> RadialProfile {
    RadialProfile::lee(m.n, m.k, 20.0, 201)
}
