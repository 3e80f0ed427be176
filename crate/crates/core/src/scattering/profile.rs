//! Radial profiles `u(tau)` on the whole filling.
//!
//! Three regions: the Taylor polynomial on `[0, TAU_START]`, quintic Hermite
//! interpolation of the integrator nodes up to the matching point, and the
//! matched Frobenius sum `r^m (A + S r^{2 gamma} B)` beyond it. Derivatives
//! above the first always come from the equation, never from differencing.

use serde::Serialize;

use super::frobenius::FrobeniusBranch;
use super::ode::{self, TAU_START, TAYLOR_TERMS};
use crate::error::{Error, Result};

/// `u` and its first three `tau`-derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfilePoint {
    pub tau: f64,
    pub u: f64,
    pub du: f64,
    pub d2u: f64,
    pub d3u: f64,
}

/// The defining function `rho = u^{1/m}` through its logarithmic derivatives
/// `L = rho'/rho`, `L'`, `L''`, plus two combinations that cancel badly near
/// the boundary if formed naively: `1 - L^2` and `L + coth(tau)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhoJet {
    pub tau: f64,
    pub rho: f64,
    pub l: f64,
    pub dl: f64,
    pub d2l: f64,
    pub one_minus_g: f64,
    pub l_plus_c: f64,
}

/// Matched boundary behavior: `u = r^m (A(r) + S r^{2 gamma} B(r))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tail {
    pub t_match: f64,
    pub dirichlet: FrobeniusBranch,
    pub neumann: FrobeniusBranch,
    pub scattering_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum Source {
    Numeric {
        taylor: [f64; TAYLOR_TERMS],
        /// Multiplies the Taylor polynomial (the interior solution starts at 1).
        scale: f64,
        tail: Option<Tail>,
    },
    /// `u = f' = sqrt(k) cosh(tau)`, the exact Lee potential.
    Lee,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub n: u32,
    pub k: f64,
    /// `s (n - s)`.
    pub lambda: f64,
    /// `rho = u^{1/exponent}`; `n - s` for scattering profiles, `-1` for Lee.
    pub exponent: f64,
    pub tau: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    source: Source,
}

impl RadialProfile {
    pub(crate) fn numeric(n: u32, k: f64, lambda: f64, exponent: f64, traj: ode::Trajectory) -> Self {
        Self {
            n,
            k,
            lambda,
            exponent,
            tau: traj.tau,
            u: traj.u,
            du: traj.du,
            source: Source::Numeric {
                taylor: ode::taylor_coefficients(n, lambda),
                scale: 1.0,
                tail: None,
            },
        }
    }

    pub(crate) fn lee(n: u32, k: f64, tau_end: f64, count: usize) -> Self {
        let nf = f64::from(n);
        let sk = k.sqrt();
        let tau: Vec<f64> = (0..count)
            .map(|i| tau_end * i as f64 / (count - 1) as f64)
            .collect();
        let u = tau.iter().map(|t| sk * t.cosh()).collect();
        let du = tau.iter().map(|t| sk * t.sinh()).collect();
        Self {
            n,
            k,
            lambda: -(nf + 1.0),
            exponent: -1.0,
            tau,
            u,
            du,
            source: Source::Lee,
        }
    }

    pub fn is_lee(&self) -> bool {
        matches!(self.source, Source::Lee)
    }

    pub fn tail(&self) -> Option<&Tail> {
        match &self.source {
            Source::Numeric { tail, .. } => tail.as_ref(),
            Source::Lee => None,
        }
    }

    /// True when the profile can be evaluated on the whole half line.
    pub fn is_complete(&self) -> bool {
        self.is_lee() || self.tail().is_some()
    }

    pub fn r_of_tau(&self, tau: f64) -> f64 {
        2.0 / self.k.sqrt() * (-tau).exp()
    }

    /// Normalize by `1/c1` and attach the boundary series beyond `tail.t_match`.
    pub(crate) fn with_tail(mut self, c1: f64, tail: Tail) -> Result<Self> {
        let Source::Numeric {
            scale, tail: slot, ..
        } = &mut self.source
        else {
            return Err(Error::Domain("the Lee profile is already exact".into()));
        };
        if !(c1.is_finite() && c1 != 0.0) {
            return Err(Error::Consistency(format!(
                "invalid branch coefficient c1 = {c1}"
            )));
        }
        *scale /= c1;
        let keep = self.tau.partition_point(|t| *t <= tail.t_match);
        self.tau.truncate(keep);
        self.u.truncate(keep);
        self.du.truncate(keep);
        for v in self.u.iter_mut().chain(self.du.iter_mut()) {
            *v /= c1;
        }
        *slot = Some(tail);
        Ok(self)
    }

    /// Check positivity of `u` at every stored node.
    pub fn check_positive(&self) -> Result<()> {
        for (t, u) in self.tau.iter().zip(&self.u) {
            if !(*u > 0.0) {
                return Err(Error::NonPositive { tau: *t, value: *u });
            }
        }
        Ok(())
    }

    pub fn point(&self, tau: f64) -> Result<ProfilePoint> {
        if !(tau >= 0.0) || !tau.is_finite() {
            return Err(Error::Domain(format!("profile: tau = {tau} must be >= 0")));
        }
        let (taylor, scale, tail) = match &self.source {
            Source::Lee => {
                let sk = self.k.sqrt();
                let (c, s) = (tau.cosh(), tau.sinh());
                return Ok(ProfilePoint {
                    tau,
                    u: sk * c,
                    du: sk * s,
                    d2u: sk * c,
                    d3u: sk * s,
                });
            }
            Source::Numeric { taylor, scale, tail } => (taylor, *scale, tail),
        };
        if tau <= TAU_START {
            let v = ode::taylor_eval(taylor, tau);
            return Ok(ProfilePoint {
                tau,
                u: scale * v[0],
                du: scale * v[1],
                d2u: scale * v[2],
                d3u: scale * v[3],
            });
        }
        if let Some(tail) = tail {
            if tau > tail.t_match {
                return Ok(self.tail_point(tail, tau));
            }
        }
        let last = *self.tau.last().expect("non-empty grid");
        if tau > last {
            return Err(Error::Domain(format!(
                "profile: tau = {tau} beyond the integrated range {last}"
            )));
        }
        let (u, du) = self.interpolate(tau);
        Ok(ProfilePoint {
            tau,
            u,
            du,
            d2u: ode::closure(self.n, self.lambda, tau, u, du),
            d3u: ode::closure_third(self.n, self.lambda, tau, u, du),
        })
    }

    fn interpolate(&self, tau: f64) -> (f64, f64) {
        let i = self.tau.partition_point(|t| *t < tau);
        if i < self.tau.len() && self.tau[i] == tau {
            return (self.u[i], self.du[i]);
        }
        let i = i.clamp(1, self.tau.len() - 1);
        let (t0, t1) = (self.tau[i - 1], self.tau[i]);
        let node = |j: usize, t: f64| {
            [
                self.u[j],
                self.du[j],
                ode::closure(self.n, self.lambda, t, self.u[j], self.du[j]),
            ]
        };
        ode::hermite5(t0, t1, node(i - 1, t0), node(i, t1), tau)
    }

    /// `theta^q W / W` for `q = 1..=3` and `W` itself, where
    /// `u = r^m W`, `W = A + S r^{2 gamma} B`.
    fn tail_w(&self, tail: &Tail, r: f64) -> (f64, [f64; 3]) {
        let a = tail.dirichlet.theta_moments(r);
        let b = tail.neumann.theta_moments(r);
        let g2 = tail.neumann.mu - tail.dirichlet.mu;
        let amp = tail.scattering_value * r.powf(g2);
        // (g2 + e)^q expanded binomially over the moments of B.
        let shifted = [
            b[0],
            g2 * b[0] + b[1],
            g2 * g2 * b[0] + 2.0 * g2 * b[1] + b[2],
            g2.powi(3) * b[0] + 3.0 * g2 * g2 * b[1] + 3.0 * g2 * b[2] + b[3],
        ];
        let w = a[0] + amp * shifted[0];
        let mut out = [0.0; 3];
        for q in 1..=3 {
            out[q - 1] = (a[q] + amp * shifted[q]) / w;
        }
        (w, out)
    }

    fn tail_point(&self, tail: &Tail, tau: f64) -> ProfilePoint {
        let r = self.r_of_tau(tau);
        let m = tail.dirichlet.mu;
        let (w, th) = self.tail_w(tail, r);
        let u = r.powf(m) * w;
        // theta^q (r^m W) / u = sum_i C(q,i) m^{q-i} (theta^i W / W)
        let t1 = m + th[0];
        let t2 = m * m + 2.0 * m * th[0] + th[1];
        let t3 = m.powi(3) + 3.0 * m * m * th[0] + 3.0 * m * th[1] + th[2];
        ProfilePoint {
            tau,
            u,
            du: -t1 * u,
            d2u: t2 * u,
            d3u: -t3 * u,
        }
    }

    pub fn rho_jet(&self, tau: f64) -> Result<RhoJet> {
        if self.is_lee() {
            let (th, ch) = (tau.tanh(), tau.cosh());
            let sech2 = 1.0 / (ch * ch);
            return Ok(RhoJet {
                tau,
                rho: 1.0 / (self.k.sqrt() * ch),
                l: -th,
                dl: -sech2,
                d2l: 2.0 * sech2 * th,
                one_minus_g: sech2,
                l_plus_c: 2.0 / (2.0 * tau).sinh(),
            });
        }
        if let Some(tail) = self.tail() {
            if tau > tail.t_match {
                return Ok(self.tail_rho(tail, tau));
            }
        }
        let p = self.point(tau)?;
        if !(p.u > 0.0) {
            return Err(Error::NonPositive { tau, value: p.u });
        }
        let m = self.exponent;
        let (a, b, c) = (p.du / p.u, p.d2u / p.u, p.d3u / p.u);
        let l = a / m;
        Ok(RhoJet {
            tau,
            rho: p.u.powf(1.0 / m),
            l,
            dl: (b - a * a) / m,
            d2l: (c - 3.0 * a * b + 2.0 * a * a * a) / m,
            one_minus_g: 1.0 - l * l,
            l_plus_c: l + 1.0 / tau.tanh(),
        })
    }

    fn tail_rho(&self, tail: &Tail, tau: f64) -> RhoJet {
        let r = self.r_of_tau(tau);
        let m = self.exponent;
        let (w, th) = self.tail_w(tail, r);
        let eps = th[0] / m;
        let theta_eps = (th[1] - th[0] * th[0]) / m;
        let theta2_eps = (th[2] - 3.0 * th[0] * th[1] + 2.0 * th[0].powi(3)) / m;
        let x = 0.25 * self.k * r * r;
        RhoJet {
            tau,
            rho: r * w.powf(1.0 / m),
            l: -(1.0 + eps),
            dl: theta_eps,
            d2l: -theta2_eps,
            one_minus_g: -eps * (2.0 + eps),
            l_plus_c: -eps + 2.0 * x / (1.0 - x),
        }
    }

    /// Largest relative residual of `u'' + n coth u' + lambda u = 0` at the
    /// stored nodes, with `u''` taken from the interpolant's neighbors.
    pub fn closure_residual(&self) -> f64 {
        let nf = f64::from(self.n);
        let mut worst: f64 = 0.0;
        for i in 1..self.tau.len().saturating_sub(1) {
            let t = self.tau[i];
            let Ok(p) = self.point(t) else { continue };
            let res = p.d2u + nf / t.tanh() * p.du + self.lambda * p.u;
            let scale = p.d2u.abs() + (nf / t.tanh() * p.du).abs() + (self.lambda * p.u).abs();
            worst = worst.max(res.abs() / scale);
        }
        worst
    }
}
