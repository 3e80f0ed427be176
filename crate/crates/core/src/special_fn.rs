//! Gamma function, the scattering normalization constants, and the
//! closed-form Q-curvature of round spheres.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lower edge of the admissible fractional order.
pub const GAMMA_MIN: f64 = 0.05;
/// Upper edge of the admissible fractional order. Keeps `1 - gamma` away from
/// the resonance at `gamma = 1`.
pub const GAMMA_MAX: f64 = 0.95;

const LANCZOS_G: f64 = 607.0 / 128.0;

// Godfrey's coefficients for g = 607/128.
const LANCZOS_COEFFS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    4.652_362_892_704_858e-5,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_64e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];

/// sin(pi x) with argument reduction so that large |x| keeps full accuracy.
fn sin_pi(x: f64) -> f64 {
    let reduced = x - 2.0 * (x / 2.0).round();
    (PI * reduced).sin()
}

/// The Gamma function on the real line.
///
/// Lanczos approximation for `x >= 0.5`, reflection below.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("gamma_fn: non-finite argument {x}")));
    }
    if x <= 0.0 && x == x.round() {
        return Err(Error::Domain(format!("gamma_fn: pole at {x}")));
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return PI / (sin_pi(x) * gamma_unchecked(1.0 - x));
    }
    let z = x - 1.0;
    let series = LANCZOS_COEFFS[1..]
        .iter()
        .enumerate()
        .fold(LANCZOS_COEFFS[0], |acc, (i, c)| acc + c / (z + (i + 1) as f64));
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * series
}

/// `d_gamma = 2^{2 gamma} Gamma(gamma) / Gamma(-gamma)`; negative on (0, 1).
pub fn d_gamma(gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Domain(format!("d_gamma: gamma = {gamma} not in (0, 1)")));
    }
    Ok(2f64.powf(2.0 * gamma) * gamma_fn(gamma)? / gamma_fn(-gamma)?)
}

/// The constant in front of the volume integral of the fractional
/// Heintze-Karcher inequality,
/// `C(n, gamma) = (n + 2 gamma)^2 / (4 gamma (n + 1)) * (-4 gamma / d_gamma)^{(1 - gamma)/gamma}`.
pub fn hk_constant(n: u32, gamma: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::Domain(format!("hk_constant: n = {n} < 3")));
    }
    let d = d_gamma(gamma)?;
    let nf = f64::from(n);
    let kappa = (1.0 - gamma) / gamma;
    Ok((nf + 2.0 * gamma).powi(2) / (4.0 * gamma * (nf + 1.0)) * (-4.0 * gamma / d).powf(kappa))
}

/// Volume of the unit round sphere `S^n`.
pub fn unit_sphere_volume(n: u32) -> f64 {
    let h = 0.5 * f64::from(n + 1);
    2.0 * PI.powf(h) / gamma_unchecked(h)
}

/// Parameters of one fractional Q-curvature problem on a model space.
///
/// The boundary representative is the round sphere of radius `k^{-1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QCurvParams {
    pub n: u32,
    pub gamma: f64,
    pub k: f64,
}

impl QCurvParams {
    pub fn new(n: u32, gamma: f64, k: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::Domain(format!("dimension n = {n} must be at least 3")));
        }
        if !(GAMMA_MIN..=GAMMA_MAX).contains(&gamma) {
            return Err(Error::Domain(format!(
                "gamma = {gamma} outside [{GAMMA_MIN}, {GAMMA_MAX}]"
            )));
        }
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::Domain(format!("k = {k} must be positive")));
        }
        Ok(Self { n, gamma, k })
    }

    pub fn nf(&self) -> f64 {
        f64::from(self.n)
    }

    /// `s = n/2 + gamma`.
    pub fn s(&self) -> f64 {
        0.5 * self.nf() + self.gamma
    }

    /// The spectral parameter `s (n - s) = n^2/4 - gamma^2`.
    pub fn spectral(&self) -> f64 {
        let s = self.s();
        s * (self.nf() - s)
    }

    /// Leading exponent `n - s` of the Dirichlet branch.
    pub fn dirichlet_exponent(&self) -> f64 {
        self.nf() - self.s()
    }

    /// Boundary `J` of the round sphere with `Ric = (n-1) k g`.
    pub fn boundary_j(&self) -> f64 {
        0.5 * self.nf() * self.k
    }
}

/// Closed-form `Q_{2 gamma}` of the round sphere of radius `k^{-1/2}` seen as
/// conformal infinity of hyperbolic space. Valid for any `0 < gamma < n/2`.
pub fn sphere_q_value(n: u32, gamma: f64, k: f64) -> Result<f64> {
    let nf = f64::from(n);
    if !(gamma > 0.0 && gamma < 0.5 * nf) {
        return Err(Error::Domain(format!(
            "sphere_q_value: gamma = {gamma} not in (0, n/2)"
        )));
    }
    let ratio = gamma_fn(0.5 * nf + gamma)? / gamma_fn(0.5 * nf - gamma)?;
    Ok(k.powf(gamma) * 2.0 / (nf - 2.0 * gamma) * ratio)
}

/// Independent oracle for the scattering pipeline.
pub fn sphere_q_oracle(p: &QCurvParams) -> f64 {
    // Parameters were validated on construction, so the gamma ratio is finite.
    sphere_q_value(p.n, p.gamma, p.k).expect("validated parameters")
}
