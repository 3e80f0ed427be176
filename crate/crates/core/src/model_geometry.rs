//! Rotationally symmetric Einstein fillings of round spheres.
//!
//! `g_+ = dt^2 + f(t)^2 g_hat` with `f = (e^t - k e^{-t})/2`, where `g_hat` is
//! the round metric with `Ric = (n-1) k g_hat`. Most of the code works in the
//! shifted distance `tau = t - t0` from the center, in which
//! `f = sqrt(k) sinh(tau)` and `f'/f = coth(tau)` for every `k`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::special_fn::unit_sphere_volume;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelSpace {
    pub n: u32,
    pub k: f64,
}

/// Pointwise data at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Frame {
    pub t: f64,
    pub tau: f64,
    pub f: f64,
    pub df: f64,
    pub r: f64,
    pub phi: f64,
    pub dphi: f64,
    pub area_density: f64,
    pub volume_density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelReport {
    pub n: u32,
    pub k: f64,
    pub samples: usize,
    /// `max |f''/f - 1|`.
    pub radial: f64,
    /// `max |f f'' + (n-1)(f'^2 - k) - n f^2|`, relative to `n max(f^2, k)`.
    pub spherical: f64,
    pub pass: bool,
}

impl ModelSpace {
    pub fn new(n: u32, k: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::Domain(format!(
                "model dimension n = {n} must be at least 3"
            )));
        }
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::Domain(format!("model parameter k = {k} must be positive")));
        }
        Ok(Self { n, k })
    }

    pub fn nf(&self) -> f64 {
        f64::from(self.n)
    }

    /// Center of the filling in the boundary-distance coordinate.
    pub fn t0(&self) -> f64 {
        0.5 * self.k.ln()
    }

    /// Radius at which `r = 2 e^{-t}` reaches the center.
    pub fn r_center(&self) -> f64 {
        2.0 / self.k.sqrt()
    }

    pub fn tau_of_r(&self, r: f64) -> f64 {
        (self.r_center() / r).ln()
    }

    pub fn r_of_tau(&self, tau: f64) -> f64 {
        self.r_center() * (-tau).exp()
    }

    /// `f` as a function of `tau`.
    pub fn warp(&self, tau: f64) -> f64 {
        self.k.sqrt() * tau.sinh()
    }

    pub fn dwarp(&self, tau: f64) -> f64 {
        self.k.sqrt() * tau.cosh()
    }

    /// Volume of the boundary `(M, g_hat)`, a sphere of radius `k^{-1/2}`.
    pub fn boundary_volume(&self) -> f64 {
        self.k.powf(-0.5 * self.nf()) * unit_sphere_volume(self.n)
    }

    /// `J_hat = n k / 2`.
    pub fn boundary_j(&self) -> f64 {
        0.5 * self.nf() * self.k
    }

    /// `|A_hat|^2 = n k^2 / 4`.
    pub fn boundary_a2(&self) -> f64 {
        0.25 * self.nf() * self.k * self.k
    }
}

pub fn frame(m: &ModelSpace, t: f64) -> Result<Frame> {
    let t0 = m.t0();
    if !(t > t0) || !t.is_finite() {
        return Err(Error::Domain(format!("frame: t = {t} must exceed t0 = {t0}")));
    }
    let tau = t - t0;
    let f = m.warp(tau);
    let df = m.dwarp(tau);
    let r = 2.0 * (-t).exp();
    let phi = 1.0 - 0.25 * m.k * r * r;
    let density = f.powi(m.n as i32);
    Ok(Frame {
        t,
        tau,
        f,
        df,
        r,
        phi,
        dphi: -0.5 * m.k * r,
        area_density: density,
        volume_density: density,
    })
}

/// Einstein residuals of `dt^2 + f^2 g_hat` at `sample_count` points spread
/// over `t0 < t <= t0 + 12`. Uses the exponential form of `f`, not `sinh`.
pub fn model_validate(m: &ModelSpace, sample_count: usize) -> ModelReport {
    let nf = m.nf();
    let k = m.k;
    let t0 = m.t0();
    let mut radial: f64 = 0.0;
    let mut spherical: f64 = 0.0;
    for i in 0..sample_count {
        let t = t0 + 12.0 * (i as f64 + 0.5) / sample_count as f64;
        let (ep, em) = (t.exp(), k * (-t).exp());
        let f = 0.5 * (ep - em);
        let df = 0.5 * (ep + em);
        let ddf = 0.5 * (ep - em);
        radial = radial.max((ddf / f - 1.0).abs());
        let res = f * ddf + (nf - 1.0) * (df * df - k) - nf * f * f;
        spherical = spherical.max(res.abs() / (nf * (f * f).max(k)));
    }
    ModelReport {
        n: m.n,
        k,
        samples: sample_count,
        radial,
        spherical,
        pass: radial <= 1e-12 && spherical <= 1e-12,
    }
}

/// Mean curvature of the level set `{r}` for `g_+`,
/// `n (1 - r phi'/phi) = n (1 + x)/(1 - x)` with `x = k r^2 / 4`.
pub fn mean_curvature_exact(m: &ModelSpace, r: f64) -> Result<f64> {
    if !(r > 0.0 && r < m.r_center()) {
        return Err(Error::Domain(format!(
            "mean_curvature_exact: r = {r} outside (0, {})",
            m.r_center()
        )));
    }
    let x = 0.25 * m.k * r * r;
    Ok(m.nf() * (1.0 + x) / (1.0 - x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn einstein_residuals_vanish() {
        for (n, k) in [(4, 1.0), (4, 4.0), (7, 1.0), (5, 0.5)] {
            let rep = model_validate(&ModelSpace::new(n, k).unwrap(), 200);
            assert!(rep.pass, "{rep:?}");
        }
    }

    #[test]
    fn frame_examples() {
        let m = ModelSpace::new(4, 1.0).unwrap();
        let fr = frame(&m, m.t0() + 1.0).unwrap();
        assert_relative_eq!(fr.f, 1.175_201_2, max_relative = 1e-7);
        let far = frame(&m, 30.0).unwrap();
        assert_relative_eq!(far.r * far.f, 1.0, max_relative = 1e-12);

        let m4 = ModelSpace::new(4, 4.0).unwrap();
        assert_relative_eq!(m4.t0(), 2f64.ln(), max_relative = 1e-15);
        assert_relative_eq!(m4.r_of_tau(0.0), 1.0, max_relative = 1e-15);
        assert!(frame(&m4, m4.t0()).is_err());
    }

    #[test]
    fn frame_density_and_phi() {
        let m = ModelSpace::new(5, 2.0).unwrap();
        let fr = frame(&m, 1.3).unwrap();
        assert_relative_eq!(fr.phi / fr.r, fr.f, max_relative = 1e-13);
        assert_relative_eq!(fr.area_density, fr.f.powi(5), max_relative = 1e-15);
    }

    #[test]
    fn mean_curvature_examples() {
        let m = ModelSpace::new(4, 1.0).unwrap();
        let h = mean_curvature_exact(&m, 0.1).unwrap();
        assert!((h - 4.020_050_1).abs() < 1e-7);
        assert!((h - 4.020_05).abs() <= 3e-7);
        assert_relative_eq!(mean_curvature_exact(&m, 1e-8).unwrap(), 4.0, max_relative = 1e-14);
        assert!(mean_curvature_exact(&m, 2.0).is_err());
        assert!(mean_curvature_exact(&m, 0.0).is_err());
    }

    #[test]
    fn mean_curvature_matches_frame() {
        let m = ModelSpace::new(6, 0.5).unwrap();
        for tau in [0.2, 1.0, 3.0] {
            let r = m.r_of_tau(tau);
            let h = mean_curvature_exact(&m, r).unwrap();
            assert_relative_eq!(h, 6.0 * m.dwarp(tau) / m.warp(tau), max_relative = 1e-12);
        }
    }

    #[test]
    fn bad_parameters() {
        assert!(ModelSpace::new(2, 1.0).is_err());
        assert!(ModelSpace::new(4, 0.0).is_err());
        assert!(ModelSpace::new(4, f64::NAN).is_err());
    }
}
