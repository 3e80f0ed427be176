//! Composite Gauss-Legendre quadrature on the half line `tau >= 0`.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights on `[-1, 1]` by Newton iteration on `P_m`.
    pub fn new(m: usize) -> Self {
        assert!(m >= 1, "need at least one node");
        let mut nodes = vec![0.0; m];
        let mut weights = vec![0.0; m];
        let mf = m as f64;
        for i in 0..m.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(m, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(m, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[m - 1 - i] = x;
            weights[i] = w;
            weights[m - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn integrate<const D: usize>(
        &self,
        a: f64,
        b: f64,
        f: &impl Fn(f64) -> Result<[f64; D]>,
    ) -> Result<[f64; D]> {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = [0.0; D];
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let v = f(mid + half * x)?;
            for d in 0..D {
                acc[d] += w * half * v[d];
            }
        }
        Ok(acc)
    }
}

/// `(P_m(x), P_m'(x))` by the three-term recurrence.
fn legendre(m: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for j in 2..=m {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let mf = m as f64;
    (p1, mf * (x * p1 - p0) / (x * x - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadConfig {
    /// Gauss points per panel for the reported value.
    pub points: usize,
    pub panel_width: f64,
    /// Hard stop for half-line integrals; kept below the `sinh` overflow.
    pub tau_limit: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            points: 20,
            panel_width: 0.5,
            tau_limit: 600.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate<const D: usize> {
    #[serde(with = "array_serde")]
    pub value: [f64; D],
    /// `|I_N - I_{N/2}|` plus a rounding floor, per component.
    #[serde(with = "array_serde")]
    pub error: [f64; D],
    pub panels: usize,
    pub tau_end: f64,
}

mod array_serde {
    use serde::Serializer;
    pub fn serialize<S: Serializer, const D: usize>(v: &[f64; D], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter())
    }
}

/// Integrate over `[breaks[0], breaks.last()]`, splitting each gap between
/// consecutive breakpoints into panels of at most `panel_width`. When
/// `to_infinity` is set, panels of growing width (factor 1.5, capped at 16)
/// continue past the last breakpoint until every component's contribution is
/// negligible for three panels in a row. Slow exponential tails such as
/// `exp(-0.1 tau)` are still resolved since Gauss rules are exact enough on
/// `exp(-a tau)` whenever `a w` stays moderate.
pub fn integrate_panels<const D: usize>(
    f: impl Fn(f64) -> Result<[f64; D]>,
    breaks: &[f64],
    to_infinity: bool,
    cfg: &QuadConfig,
) -> Result<Estimate<D>> {
    if breaks.len() < 2 && !to_infinity {
        return Err(Error::Domain("quadrature needs an interval".into()));
    }
    let fine = GaussLegendre::new(cfg.points);
    let coarse = GaussLegendre::new(cfg.points / 2);
    let mut value = [0.0; D];
    let mut coarse_value = [0.0; D];
    let mut magnitude = [0.0; D];
    let mut panels = 0;
    let mut add = |a: f64, b: f64, magnitude: &mut [f64; D]| -> Result<[f64; D]> {
        let v = fine.integrate(a, b, &f)?;
        let c = coarse.integrate(a, b, &f)?;
        for d in 0..D {
            value[d] += v[d];
            coarse_value[d] += c[d];
            magnitude[d] += v[d].abs();
        }
        panels += 1;
        Ok(v)
    };
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let count = ((b - a) / cfg.panel_width).ceil().max(1.0) as usize;
        let h = (b - a) / count as f64;
        for i in 0..count {
            add(a + h * i as f64, a + h * (i + 1) as f64, &mut magnitude)?;
        }
    }
    let mut tau_end = *breaks.last().unwrap_or(&0.0);
    if to_infinity {
        let mut quiet = 0;
        let mut width = 2.0 * cfg.panel_width;
        while quiet < 3 {
            if tau_end >= cfg.tau_limit {
                return Err(Error::Consistency(format!(
                    "integrand has not decayed by tau = {}",
                    cfg.tau_limit
                )));
            }
            let b = (tau_end + width).min(cfg.tau_limit);
            width = (1.5 * width).min(16.0);
            let v = add(tau_end, b, &mut magnitude)?;
            tau_end = b;
            let negligible = (0..D).all(|d| v[d].abs() <= 1e-17 * magnitude[d].max(1e-300));
            quiet = if negligible { quiet + 1 } else { 0 };
        }
    }
    let mut error = [0.0; D];
    for d in 0..D {
        error[d] = (value[d] - coarse_value[d]).abs() + 4.0 * f64::EPSILON * magnitude[d];
    }
    Ok(Estimate {
        value,
        error,
        panels,
        tau_end,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn nodes_and_weights() {
        let g = GaussLegendre::new(5);
        assert_relative_eq!(g.weights.iter().sum::<f64>(), 2.0, max_relative = 1e-15);
        assert_relative_eq!(g.nodes[4], 0.906_179_845_938_664, max_relative = 1e-14);
        assert_relative_eq!(g.weights[2], 128.0 / 225.0, max_relative = 1e-14);
        let g = GaussLegendre::new(20);
        // exact for degree 39
        let v = g.integrate(0.0, 1.0, &|x| Ok([x.powi(39)])).unwrap();
        assert_relative_eq!(v[0], 1.0 / 40.0, max_relative = 1e-13);
    }

    #[test]
    fn half_line_exponential() {
        let est = integrate_panels(
            |t| Ok([(-t).exp(), t * (-2.0 * t).exp()]),
            &[0.0, 1.0],
            true,
            &QuadConfig::default(),
        )
        .unwrap();
        assert_relative_eq!(est.value[0], 1.0, max_relative = 1e-14);
        assert_relative_eq!(est.value[1], 0.25, max_relative = 1e-14);
        assert!(est.error[0] < 1e-13);
        assert!(est.tau_end < 120.0);
    }

    #[test]
    fn slow_tail() {
        let est = integrate_panels(
            |t| Ok([(-0.1 * t).exp()]),
            &[0.0, 1.0],
            true,
            &QuadConfig::default(),
        )
        .unwrap();
        assert_relative_eq!(est.value[0], 10.0, max_relative = 1e-13);
    }

    #[test]
    fn refinement_within_estimate() {
        let f = |t: f64| Ok([(t.sinh().powi(4)) / t.cosh().powi(7)]);
        let a = integrate_panels(f, &[0.0, 3.0], true, &QuadConfig::default()).unwrap();
        let cfg = QuadConfig {
            points: 40,
            ..QuadConfig::default()
        };
        let b = integrate_panels(f, &[0.0, 3.0], true, &cfg).unwrap();
        assert!((a.value[0] - b.value[0]).abs() <= a.error[0]);
    }

    #[test]
    fn non_decaying_integrand_is_reported() {
        let cfg = QuadConfig {
            tau_limit: 10.0,
            ..QuadConfig::default()
        };
        assert!(integrate_panels(|_| Ok([1.0]), &[0.0, 1.0], true, &cfg).is_err());
    }
}
