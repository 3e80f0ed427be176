//! Interior radial equation `u'' + n coth(tau) u' + lambda u = 0`.
//!
//! A short even Taylor series carries the solution off the singular point,
//! then Dormand-Prince 5(4) with embedded error control integrates outward.

use crate::error::{Error, Result};

/// Start of the numerical integration; the `coth` singularity is never
/// evaluated below this point.
pub const TAU_START: f64 = 1e-3;
/// Number of even Taylor coefficients `b_0..b_5`.
pub const TAYLOR_TERMS: usize = 6;

// Even coefficients of tau coth(tau).
const TAU_COTH: [f64; 5] = [1.0, 1.0 / 3.0, -1.0 / 45.0, 2.0 / 945.0, -1.0 / 4725.0];

/// Regular solution `u = sum b_m tau^{2m}` with `u(0) = 1`.
pub fn taylor_coefficients(n: u32, lambda: f64) -> [f64; TAYLOR_TERMS] {
    let nf = f64::from(n);
    let mut b = [0.0; TAYLOR_TERMS];
    b[0] = 1.0;
    for m in 0..TAYLOR_TERMS - 1 {
        let mut sum = lambda * b[m];
        for j in 1..=m {
            sum += nf * 2.0 * j as f64 * TAU_COTH[m + 1 - j] * b[j];
        }
        let mf = m as f64;
        b[m + 1] = -sum / ((2.0 * mf + 2.0) * (2.0 * mf + 1.0 + nf));
    }
    b
}

/// `(u, u', u'', u''')` of the Taylor polynomial at `tau`.
pub fn taylor_eval(b: &[f64; TAYLOR_TERMS], tau: f64) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (m, c) in b.iter().enumerate() {
        let p = 2 * m as i32;
        let pf = f64::from(p);
        out[0] += c * tau.powi(p);
        if p >= 1 {
            out[1] += c * pf * tau.powi(p - 1);
        }
        if p >= 2 {
            out[2] += c * pf * (pf - 1.0) * tau.powi(p - 2);
        }
        if p >= 3 {
            out[3] += c * pf * (pf - 1.0) * (pf - 2.0) * tau.powi(p - 3);
        }
    }
    out
}

/// `u''` from the equation.
pub fn closure(n: u32, lambda: f64, tau: f64, u: f64, du: f64) -> f64 {
    -f64::from(n) / tau.tanh() * du - lambda * u
}

/// `u'''` from differentiating the equation once.
pub fn closure_third(n: u32, lambda: f64, tau: f64, u: f64, du: f64) -> f64 {
    let nf = f64::from(n);
    let d2u = closure(n, lambda, tau, u, du);
    let csch2 = 1.0 / tau.sinh().powi(2);
    nf * csch2 * du - nf / tau.tanh() * d2u - lambda * du
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub tau: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub steps_rejected: usize,
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrate from the Taylor start to `tau_end` with relative tolerance
/// `rtol` on the joint size `|u| + |u'|`. The last node lands exactly on
/// `tau_end`; `max_step` bounds the node spacing for later interpolation.
pub fn integrate(n: u32, lambda: f64, rtol: f64, tau_end: f64, max_step: f64) -> Result<Trajectory> {
    if !(tau_end > TAU_START) {
        return Err(Error::Domain(format!(
            "integration end {tau_end} must exceed the start {TAU_START}"
        )));
    }
    let b = taylor_coefficients(n, lambda);
    let start = taylor_eval(&b, TAU_START);
    let rhs = |tau: f64, y: [f64; 2]| [y[1], closure(n, lambda, tau, y[0], y[1])];

    let mut tau = TAU_START;
    let mut y = [start[0], start[1]];
    let mut traj = Trajectory {
        tau: vec![tau],
        u: vec![y[0]],
        du: vec![y[1]],
        steps_rejected: 0,
    };
    let mut h = (rtol.powf(0.2) * 0.1).min(max_step);
    let mut k = [[0.0; 2]; 7];
    k[0] = rhs(tau, y);
    while tau < tau_end {
        let last = tau + h >= tau_end;
        if last {
            h = tau_end - tau;
        }
        // FSAL: the last stage is evaluated at the proposed solution.
        let mut y_new = y;
        for stage in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(stage) {
                ys[0] += h * A[stage][j] * kj[0];
                ys[1] += h * A[stage][j] * kj[1];
            }
            k[stage] = rhs(tau + C[stage] * h, ys);
            y_new = ys;
        }
        let mut err = [0.0; 2];
        for (j, kj) in k.iter().enumerate() {
            err[0] += h * E[j] * kj[0];
            err[1] += h * E[j] * kj[1];
        }
        let scale =
            rtol * (y[0].abs().max(y_new[0].abs()) + y[1].abs().max(y_new[1].abs())) + f64::MIN_POSITIVE;
        let norm = (0.5 * ((err[0] / scale).powi(2) + (err[1] / scale).powi(2))).sqrt();
        if norm <= 1.0 {
            tau = if last { tau_end } else { tau + h };
            y = y_new;
            traj.tau.push(tau);
            traj.u.push(y[0]);
            traj.du.push(y[1]);
            k[0] = k[6];
        } else {
            traj.steps_rejected += 1;
        }
        let factor = if norm == 0.0 {
            5.0
        } else {
            (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
        };
        h = (h * factor).min(max_step);
        if h < 1e-12 * tau.max(1.0) {
            return Err(Error::IntegrationFailure { tau, step: h });
        }
    }
    Ok(traj)
}

/// Quintic Hermite interpolation on `[t0, t1]` from value, first and second
/// derivative at both ends. Returns `(p, p')` at `t`.
pub fn hermite5(t0: f64, t1: f64, y0: [f64; 3], y1: [f64; 3], t: f64) -> (f64, f64) {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let (s2, s3) = (s * s, s * s * s);
    let (s4, s5) = (s3 * s, s3 * s2);
    let h00 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
    let h10 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
    let h20 = 0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5);
    let h01 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
    let h11 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
    let h21 = 0.5 * (s3 - 2.0 * s4 + s5);
    let d00 = -30.0 * s2 + 60.0 * s3 - 30.0 * s4;
    let d10 = 1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4;
    let d20 = 0.5 * (2.0 * s - 9.0 * s2 + 12.0 * s3 - 5.0 * s4);
    let d01 = 30.0 * s2 - 60.0 * s3 + 30.0 * s4;
    let d11 = -12.0 * s2 + 28.0 * s3 - 15.0 * s4;
    let d21 = 0.5 * (3.0 * s2 - 8.0 * s3 + 5.0 * s4);
    let p = h00 * y0[0]
        + h * h10 * y0[1]
        + h * h * h20 * y0[2]
        + h01 * y1[0]
        + h * h11 * y1[1]
        + h * h * h21 * y1[2];
    let dp = (d00 * y0[0]
        + h * d10 * y0[1]
        + h * h * d20 * y0[2]
        + d01 * y1[0]
        + h * d11 * y1[1]
        + h * h * d21 * y1[2])
        / h;
    (p, dp)
}
