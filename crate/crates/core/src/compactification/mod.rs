//! Adapted and Lee compactifications `g_bar = rho^2 g_+ = alpha^2 dt^2 + b^2 g_hat`
//! with `alpha = rho`, `b = rho f`, and the pointwise identities they satisfy.
//!
//! Everything is expressed through `L = rho'/rho` (derivatives in `t`), so
//! for a radial function `F`
//! `Lap F = rho^{-2} (F'' + ((n-1) L + n coth) F')`, `|grad F|^2 = F'^2/rho^2`.

pub mod boundary;

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model_geometry::ModelSpace;
use crate::scattering::{lee_potential_exact, RadialProfile, RhoJet, Scattering, ScatteringResult};
use crate::special_fn::d_gamma;

pub use boundary::{correction_exponents, richardson, Extrapolation};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Kind {
    Adapted { gamma: f64 },
    Lee,
}

/// Eigenvalues of `Hess rho` in a unit frame: one radial, `n` equal spherical.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HessianSplit {
    pub lambda_rad: f64,
    pub lambda_sph: f64,
    pub laplacian: f64,
    pub tracefree_sq: f64,
}

impl HessianSplit {
    pub fn from_eigenvalues(n: u32, lambda_rad: f64, lambda_sph: f64) -> Self {
        let nf = f64::from(n);
        Self {
            lambda_rad,
            lambda_sph,
            laplacian: lambda_rad + nf * lambda_sph,
            tracefree_sq: nf / (nf + 1.0) * (lambda_rad - lambda_sph).powi(2),
        }
    }
}

/// Everything the identities need at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometryPoint {
    pub tau: f64,
    pub r: f64,
    pub jet: RhoJet,
    pub hessian: HessianSplit,
    /// `(alpha b^n)^{-1} (b^n rho'/alpha)'` from raw `rho, rho', rho''`.
    pub lap_rho_direct: f64,
    /// `T_s` (adapted) or `J_bar_L` (Lee).
    pub scalar: f64,
    pub dscalar: f64,
    pub lap_scalar: f64,
    /// `<grad rho, grad scalar>`.
    pub grad_dot: f64,
    pub grad_scalar_sq: f64,
    /// `J_bar` from `(2s - n - 1)/2 (1 - |grad rho|^2)/rho^2`.
    pub jbar: f64,
    /// `J_bar = R_bar / (2n)` from the warped-product curvature.
    pub jbar_curvature: f64,
}

#[derive(Debug, Clone)]
pub struct CompactifiedGeometry {
    pub kind: Kind,
    pub base: ModelSpace,
    pub rho: RadialProfile,
    pub scattering: Option<ScatteringResult>,
}

/// Weighted sup norm of one identity over the interior window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Residual {
    pub name: String,
    pub value: f64,
    pub worst_tau: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Minimum of `rho` and of `T_s` / `J_bar_L` over the positivity grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Positivity {
    pub points: usize,
    pub min_rho: f64,
    pub min_scalar: f64,
    pub worst_tau: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualSuite {
    pub kind: Kind,
    pub n: u32,
    pub k: f64,
    pub window: (f64, f64),
    pub samples: usize,
    pub residuals: Vec<Residual>,
}

impl ResidualSuite {
    pub fn passed(&self) -> bool {
        self.residuals.iter().all(|r| r.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Residual> {
        self.residuals.iter().find(|r| r.name == name)
    }
}

pub fn build_adapted(m: &ModelSpace, sc: &Scattering) -> Result<CompactifiedGeometry> {
    let p = &sc.result.params;
    if p.n != m.n || (p.k - m.k).abs() > 1e-14 * m.k {
        return Err(Error::Domain(format!(
            "scattering data (n = {}, k = {}) does not belong to the model (n = {}, k = {})",
            p.n, p.k, m.n, m.k
        )));
    }
    if !sc.profile.is_complete() {
        return Err(Error::Domain("profile lacks the matched boundary tail".into()));
    }
    sc.profile.check_positive()?;
    Ok(CompactifiedGeometry {
        kind: Kind::Adapted { gamma: p.gamma },
        base: *m,
        rho: sc.profile.clone(),
        scattering: Some(sc.result.clone()),
    })
}

pub fn build_lee(m: &ModelSpace) -> CompactifiedGeometry {
    CompactifiedGeometry {
        kind: Kind::Lee,
        base: *m,
        rho: lee_potential_exact(m),
        scattering: None,
    }
}

impl CompactifiedGeometry {
    pub fn nf(&self) -> f64 {
        self.base.nf()
    }

    /// The scattering parameter: `n/2 + gamma`, or `n + 1` for Lee.
    pub fn s(&self) -> f64 {
        match self.kind {
            Kind::Adapted { gamma } => 0.5 * self.nf() + gamma,
            Kind::Lee => self.nf() + 1.0,
        }
    }

    /// `(prefactor, p)` with scalar = prefactor `(1 - |grad rho|^2) rho^{-p}`.
    fn scalar_shape(&self) -> (f64, f64) {
        match self.kind {
            Kind::Adapted { gamma } => (1.0, 2.0 * gamma),
            Kind::Lee => (0.5 * (self.nf() + 1.0), 2.0),
        }
    }

    pub fn q_value(&self) -> Option<f64> {
        self.scattering.as_ref().map(|s| s.q_value)
    }

    pub fn point(&self, tau: f64) -> Result<GeometryPoint> {
        let n = self.base.n;
        let nf = self.nf();
        let j = self.rho.rho_jet(tau)?;
        let (rho, l, dl, d2l) = (j.rho, j.l, j.dl, j.d2l);
        let y = j.one_minus_g;
        let coth = 1.0 / tau.tanh();
        let hessian = HessianSplit::from_eigenvalues(n, dl / rho, l * j.l_plus_c / rho);

        let (d1, d2) = (l * rho, (dl + l * l) * rho);
        let lap_rho_direct =
            (nf - 1.0) * d1 * d1 / rho.powi(3) + nf * coth * d1 / (rho * rho) + d2 / (rho * rho);

        let (pre, p) = self.scalar_shape();
        let dy = -2.0 * l * dl;
        let d2y = -2.0 * (dl * dl + l * d2l);
        let w = pre * rho.powf(-p);
        let scalar = w * y;
        let dscalar = w * (dy - p * l * y);
        let d2scalar = w * (d2y - p * dl * y - 2.0 * p * l * dy + p * p * l * l * y);
        let drift = nf * j.l_plus_c - l;
        let rho2 = rho * rho;

        let jbar = 0.5 * (2.0 * self.s() - nf - 1.0) * y / rho2;
        let csch2 = coth * coth - 1.0;
        let radial = coth * j.l_plus_c + dl - csch2;
        let spherical = csch2 - j.l_plus_c * j.l_plus_c;
        let rbar = (-2.0 * nf * radial + nf * (nf - 1.0) * spherical) / rho2;

        Ok(GeometryPoint {
            tau,
            r: self.base.r_of_tau(tau),
            jet: j,
            hessian,
            lap_rho_direct,
            scalar,
            dscalar,
            lap_scalar: (d2scalar + drift * dscalar) / rho2,
            grad_dot: l * dscalar / rho,
            grad_scalar_sq: dscalar * dscalar / rho2,
            jbar,
            jbar_curvature: rbar / (2.0 * nf),
        })
    }

    pub fn hessian_split(&self, tau: f64) -> Result<HessianSplit> {
        let pt = self.point(tau)?;
        let lap = pt.hessian.laplacian;
        if lap.abs() > 1e-6 && (lap - pt.lap_rho_direct).abs() > 1e-6 * lap.abs() {
            return Err(Error::Consistency(format!(
                "Hessian trace {lap} differs from the radial Laplacian {} at tau = {tau}",
                pt.lap_rho_direct
            )));
        }
        Ok(pt.hessian)
    }

    /// `tau` range of the interior window `0.05 <= r <= 0.9 r_center`.
    pub fn interior_window(&self) -> (f64, f64) {
        let m = &self.base;
        (m.tau_of_r(0.9 * m.r_center()), m.tau_of_r(0.05))
    }

    /// Nodes where positivity is asserted: the integrator grid plus a sweep of
    /// the boundary tail.
    pub fn positivity_grid(&self) -> Vec<f64> {
        let mut taus: Vec<f64> = self.rho.tau.iter().copied().filter(|t| *t > 0.0).collect();
        let start = match self.rho.tail() {
            Some(t) => t.t_match,
            None => *taus.last().unwrap_or(&0.0),
        };
        taus.extend((1..=200).map(|i| start + 0.25 * f64::from(i)));
        taus
    }

    pub fn positivity(&self) -> Result<Positivity> {
        let grid = self.positivity_grid();
        let mut out = Positivity {
            points: grid.len(),
            min_rho: f64::INFINITY,
            min_scalar: f64::INFINITY,
            worst_tau: 0.0,
            passed: true,
        };
        for tau in grid {
            let pt = self.point(tau)?;
            out.min_rho = out.min_rho.min(pt.jet.rho);
            if pt.scalar < out.min_scalar || pt.scalar.is_nan() {
                out.min_scalar = pt.scalar;
                out.worst_tau = tau;
            }
        }
        out.passed = out.min_rho > 0.0 && out.min_scalar > 0.0;
        Ok(out)
    }

    /// Identity residuals on `samples` points of the interior window.
    pub fn residual_suite(&self, samples: usize, tol: f64) -> Result<ResidualSuite> {
        let (lo, hi) = self.interior_window();
        let nf = self.nf();
        let names: &[&str] = match self.kind {
            Kind::Adapted { .. } => &["res_rho", "res_T", "jbar_crosscheck", "hessian_trace"],
            Kind::Lee => &["res_rho", "res_J", "jbar_crosscheck", "hessian_trace"],
        };
        let mut worst = vec![(0.0f64, lo); names.len()];
        for i in 0..samples {
            let tau = lo + (hi - lo) * i as f64 / (samples - 1).max(1) as f64;
            let pt = self.point(tau)?;
            let rho = pt.jet.rho;
            let l = pt.jet.l;
            let tf = pt.hessian.tracefree_sq;
            let vals = match self.kind {
                Kind::Adapted { gamma } => {
                    let s = self.s();
                    let g2 = 2.0 * gamma;
                    let c = nf * (nf + g2) * (g2 - 1.0) / (2.0 * (nf + 1.0));
                    let rhs_rho = -s * pt.jet.one_minus_g / rho;
                    let t_lhs = [pt.lap_scalar, (g2 - 1.0) * pt.grad_dot / rho];
                    let t_rhs = [
                        -2.0 * rho.powf(-g2) * tf,
                        c * pt.scalar * pt.scalar * rho.powf(g2 - 2.0),
                    ];
                    [
                        weighted(&[pt.hessian.lambda_rad, nf * pt.hessian.lambda_sph], &[rhs_rho]),
                        weighted(&t_lhs, &t_rhs),
                        weighted(&[pt.jbar], &[pt.jbar_curvature]),
                        weighted(&[pt.hessian.laplacian], &[pt.lap_rho_direct]),
                    ]
                }
                Kind::Lee => {
                    let rhs_rho = -2.0 * rho * pt.scalar;
                    let j_lhs = [pt.lap_scalar, -(nf - 1.0) * l * pt.dscalar / (rho * rho)];
                    let j_rhs = [-(nf + 1.0) * tf / (rho * rho)];
                    [
                        weighted(&[pt.hessian.lambda_rad, nf * pt.hessian.lambda_sph], &[rhs_rho]),
                        weighted(&j_lhs, &j_rhs),
                        weighted(&[pt.jbar], &[pt.jbar_curvature]),
                        weighted(&[pt.hessian.laplacian], &[pt.lap_rho_direct]),
                    ]
                }
            };
            for (w, v) in worst.iter_mut().zip(vals) {
                if v > w.0 || v.is_nan() {
                    *w = (v, tau);
                }
            }
        }
        let residuals = names
            .iter()
            .zip(worst)
            .map(|(name, (value, worst_tau))| Residual {
                name: name.to_string(),
                value,
                worst_tau,
                tol,
                pass: value <= tol,
            })
            .collect();
        Ok(ResidualSuite {
            kind: self.kind,
            n: self.base.n,
            k: self.base.k,
            window: (lo, hi),
            samples,
            residuals,
        })
    }

    /// Limit of `T_s` (adapted) or `J_bar_L` (Lee) at the boundary.
    pub fn scalar_boundary(&self) -> Result<Extrapolation> {
        let gamma = match self.kind {
            Kind::Adapted { gamma } => gamma,
            Kind::Lee => 1.0,
        };
        let r0 = 0.05 / self.base.k.sqrt();
        let exps = correction_exponents(gamma, 8);
        richardson(|r| Ok(self.point(self.base.tau_of_r(r))?.scalar), r0, &exps)
    }

    /// The value `T_s` must take at the boundary, `-(4 gamma/d_gamma) Q`, or
    /// `(n+1)/n J_hat` for Lee.
    pub fn scalar_boundary_expected(&self) -> Result<f64> {
        match self.kind {
            Kind::Adapted { gamma } => {
                let q = self.q_value().expect("adapted builds carry scattering data");
                Ok(-4.0 * gamma / d_gamma(gamma)? * q)
            }
            Kind::Lee => Ok((self.nf() + 1.0) / self.nf() * self.base.boundary_j()),
        }
    }

    /// Boundary mean curvature `H_bar = n (L + coth)/rho` of `g_bar`; only
    /// finite for `gamma = 1/2`, where it equals `n Q_1`.
    pub fn mean_curvature_boundary(&self) -> Result<Extrapolation> {
        if !matches!(self.kind, Kind::Adapted { gamma } if (gamma - 0.5).abs() < 1e-12) {
            return Err(Error::Domain(
                "H_bar has a finite limit only for gamma = 1/2".into(),
            ));
        }
        let nf = self.nf();
        let r0 = 0.05 / self.base.k.sqrt();
        richardson(
            |r| {
                let j = self.rho.rho_jet(self.base.tau_of_r(r))?;
                Ok(nf * j.l_plus_c / j.rho)
            },
            r0,
            &correction_exponents(0.5, 8),
        )
    }

    /// Profile dump: `t, r, rho, drho, grad_sq, T_or_J, res_rho, res_T_or_J`.
    pub fn write_profile_csv(&self, out: &mut impl Write, samples: usize) -> Result<()> {
        writeln!(out, "t,r,rho,drho,grad_sq,T_or_J,res_rho,res_T_or_J")?;
        let (lo, hi) = self.interior_window();
        let t0 = self.base.t0();
        for i in 0..samples {
            let tau = lo + (hi - lo) * i as f64 / (samples - 1).max(1) as f64;
            let pt = self.point(tau)?;
            let single = ResidualPoint::new(self, &pt);
            writeln!(
                out,
                "{:.14e},{:.14e},{:.14e},{:.14e},{:.14e},{:.14e},{:.14e},{:.14e}",
                tau + t0,
                pt.r,
                pt.jet.rho,
                pt.jet.l * pt.jet.rho,
                pt.jet.l * pt.jet.l,
                pt.scalar,
                single.rho,
                single.scalar
            )?;
        }
        Ok(())
    }
}

struct ResidualPoint {
    rho: f64,
    scalar: f64,
}

impl ResidualPoint {
    fn new(g: &CompactifiedGeometry, pt: &GeometryPoint) -> Self {
        let nf = g.nf();
        let rho = pt.jet.rho;
        let tf = pt.hessian.tracefree_sq;
        match g.kind {
            Kind::Adapted { gamma } => {
                let g2 = 2.0 * gamma;
                let c = nf * (nf + g2) * (g2 - 1.0) / (2.0 * (nf + 1.0));
                Self {
                    rho: weighted(&[pt.hessian.laplacian], &[-g.s() * pt.jet.one_minus_g / rho]),
                    scalar: weighted(
                        &[pt.lap_scalar, (g2 - 1.0) * pt.grad_dot / rho],
                        &[
                            -2.0 * rho.powf(-g2) * tf,
                            c * pt.scalar * pt.scalar * rho.powf(g2 - 2.0),
                        ],
                    ),
                }
            }
            Kind::Lee => Self {
                rho: weighted(&[pt.hessian.laplacian], &[-2.0 * rho * pt.scalar]),
                scalar: weighted(
                    &[pt.lap_scalar, -(nf - 1.0) * pt.jet.l * pt.dscalar / (rho * rho)],
                    &[-(nf + 1.0) * tf / (rho * rho)],
                ),
            },
        }
    }
}

/// `|sum lhs - sum rhs| / max(sum |terms|, 1)`.
fn weighted(lhs: &[f64], rhs: &[f64]) -> f64 {
    let diff: f64 = lhs.iter().sum::<f64>() - rhs.iter().sum::<f64>();
    let scale: f64 = lhs.iter().chain(rhs).map(|v| v.abs()).sum();
    diff.abs() / scale.max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::{scatter, SolverConfig};
    use crate::special_fn::QCurvParams;
    use approx::assert_relative_eq;

    fn adapted(n: u32, gamma: f64, k: f64) -> CompactifiedGeometry {
        let m = ModelSpace::new(n, k).unwrap();
        let p = QCurvParams::new(n, gamma, k).unwrap();
        let sc = scatter(&p, &SolverConfig::default()).unwrap();
        build_adapted(&m, &sc).unwrap()
    }

    #[test]
    fn tracefree_norm_of_diagonal() {
        let h = HessianSplit::from_eigenvalues(4, 3.0, 1.0);
        assert_relative_eq!(h.tracefree_sq, 3.2, max_relative = 1e-15);
        assert_relative_eq!(h.laplacian, 7.0, max_relative = 1e-15);
    }

    #[test]
    fn flat_ball_case() {
        let g = adapted(4, 0.5, 1.0);
        for tau in [0.05, 0.5, 2.0, 5.0, 12.0] {
            let pt = g.point(tau).unwrap();
            assert!((pt.scalar - 2.0).abs() < 1e-6, "T = {}", pt.scalar);
            assert!(pt.hessian.tracefree_sq < 1e-9);
        }
        let t = g.scalar_boundary().unwrap();
        assert!((t.value - 2.0).abs() < 1e-6);
        let h = g.mean_curvature_boundary().unwrap();
        assert!((h.value - 4.0).abs() < 1e-6, "{h:?}");
        let suite = g.residual_suite(200, 1e-6).unwrap();
        assert!(suite.passed(), "{suite:?}");
    }

    #[test]
    fn lee_hemisphere() {
        for k in [0.5, 1.0, 4.0] {
            let g = build_lee(&ModelSpace::new(4, k).unwrap());
            for tau in [0.1, 1.0, 4.0, 20.0] {
                let pt = g.point(tau).unwrap();
                assert_relative_eq!(pt.scalar, 2.5 * k, max_relative = 1e-10);
                assert!(pt.hessian.tracefree_sq <= 1e-9 * k);
                assert_relative_eq!(pt.grad_scalar_sq.sqrt() + 1.0, 1.0, epsilon = 1e-8);
            }
            let suite = g.residual_suite(300, 1e-9).unwrap();
            assert!(suite.passed(), "{suite:?}");
            let jb = g.scalar_boundary().unwrap();
            assert_relative_eq!(
                jb.value,
                g.scalar_boundary_expected().unwrap(),
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn nontrivial_profile_identities() {
        let g = adapted(4, 0.25, 1.0);
        let suite = g.residual_suite(400, 1e-5).unwrap();
        assert!(suite.passed(), "{suite:?}");
        let t = g.scalar_boundary().unwrap();
        let expect = g.scalar_boundary_expected().unwrap();
        assert!((t.value - expect).abs() <= 1e-4 * expect, "{t:?} vs {expect}");
    }

    #[test]
    fn scalar_stays_positive() {
        for g in [
            adapted(6, 0.25, 0.5),
            adapted(4, 0.75, 4.0),
            build_lee(&ModelSpace::new(5, 2.0).unwrap()),
        ] {
            let p = g.positivity().unwrap();
            assert!(p.passed && p.points > 200, "{p:?}");
        }
    }

    #[test]
    fn hessian_trace_identity() {
        let g = adapted(5, 0.75, 2.0);
        let (lo, hi) = g.interior_window();
        for i in 0..20 {
            let tau = lo + (hi - lo) * f64::from(i) / 19.0;
            g.hessian_split(tau).unwrap();
        }
    }

    #[test]
    fn mismatched_scattering_rejected() {
        let p = QCurvParams::new(4, 0.5, 2.0).unwrap();
        let sc = scatter(&p, &SolverConfig::default()).unwrap();
        assert!(build_adapted(&ModelSpace::new(4, 1.0).unwrap(), &sc).is_err());
        assert!(build_adapted(&ModelSpace::new(5, 2.0).unwrap(), &sc).is_err());
    }

    #[test]
    fn csv_dump_shape() {
        let g = build_lee(&ModelSpace::new(4, 1.0).unwrap());
        let mut buf = Vec::new();
        g.write_profile_csv(&mut buf, 11).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 12);
        assert!(text.starts_with("t,r,rho,drho,grad_sq,T_or_J,res_rho,res_T_or_J"));
    }
}
