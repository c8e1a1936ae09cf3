//! The isometric map U from L2 on the half line onto the two-channel model
//! space, its inverse, and the Parseval diagnostic.
//!
//! With v(eta) = e^{eta/2} x(e^eta), the two channels are
//!
//!   (Ux)_+(mu) = (2*pi)^{-1/2} * int v(eta) e^{+i mu eta} d eta,
//!   (Ux)_-(mu) = (2*pi)^{-1/2} * int v(eta) e^{-i mu eta} d eta,
//!
//! i.e. the restrictions of one full-line Fourier transform u(nu) to nu > 0
//! and nu < 0. This is the Mellin transform on the critical line, split into
//! a pair of functions of mu > 0. The integrals are evaluated as direct
//! trapezoid sums at the requested mu nodes (the grids are uniform, so the
//! sums are exact oscillatory quadratures; no interpolation between bins).

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::halfline::{norm_sq, HalfLineFunction, LogGrid, MuGrid};

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// An element of the model space: a pair of complex channels sampled on a
/// shared mu grid.
#[derive(Debug, Clone)]
pub struct ModelElement {
    mu_grid: Arc<MuGrid>,
    plus: Vec<Complex64>,
    minus: Vec<Complex64>,
}

impl ModelElement {
    pub fn new(mu_grid: Arc<MuGrid>, plus: Vec<Complex64>, minus: Vec<Complex64>) -> Result<Self> {
        if plus.len() != mu_grid.len() || minus.len() != mu_grid.len() {
            return Err(Error::GridMismatch(format!(
                "channel lengths {}/{} on a {}-node mu grid",
                plus.len(),
                minus.len(),
                mu_grid.len()
            )));
        }
        for (ch, name) in [(&plus, "plus"), (&minus, "minus")] {
            if let Some(k) = ch.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "non-finite {name}-channel sample at node {k}"
                )));
            }
        }
        Ok(Self {
            mu_grid,
            plus,
            minus,
        })
    }

    pub fn zero(mu_grid: Arc<MuGrid>) -> Self {
        let m = mu_grid.len();
        Self {
            mu_grid,
            plus: vec![Complex64::new(0.0, 0.0); m],
            minus: vec![Complex64::new(0.0, 0.0); m],
        }
    }

    pub fn mu_grid(&self) -> &Arc<MuGrid> {
        &self.mu_grid
    }

    pub fn plus(&self) -> &[Complex64] {
        &self.plus
    }

    pub fn minus(&self) -> &[Complex64] {
        &self.minus
    }

    /// Squared model-space norm: trapezoid integral of |plus|^2 + |minus|^2
    /// over the mu grid.
    pub fn norm_sq(&self) -> f64 {
        let mut acc = 0.0;
        for j in 0..self.mu_grid.len() {
            acc += (self.plus[j].norm_sqr() + self.minus[j].norm_sqr()) * self.mu_grid.weight(j);
        }
        acc
    }

    /// Model-space distance between two elements on the same grid.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        if !self.mu_grid.same_layout(&other.mu_grid) {
            return Err(Error::GridMismatch("model elements on different mu grids".into()));
        }
        let mut acc = 0.0;
        for j in 0..self.mu_grid.len() {
            acc += ((self.plus[j] - other.plus[j]).norm_sqr()
                + (self.minus[j] - other.minus[j]).norm_sqr())
                * self.mu_grid.weight(j);
        }
        Ok(acc.sqrt())
    }
}

/// Trapezoid-weighted samples of v(eta) = e^{eta/2} x(e^eta).
fn weighted_v(x: &HalfLineFunction) -> Vec<Complex64> {
    let grid = x.grid();
    let h = grid.step();
    let n = grid.len();
    let mut vw: Vec<Complex64> = grid
        .eta()
        .iter()
        .zip(x.values())
        .map(|(&eta, &val)| val * (eta / 2.0).exp() * h)
        .collect();
    vw[0] *= 0.5;
    vw[n - 1] *= 0.5;
    vw
}

/// Forward map: both channels of U x on the requested mu grid.
pub fn forward_u(x: &HalfLineFunction, mu_grid: &Arc<MuGrid>) -> ModelElement {
    let vw = weighted_v(x);
    let eta = x.grid().eta();
    let pairs: Vec<(Complex64, Complex64)> = mu_grid
        .nodes()
        .par_iter()
        .map(|&mu| {
            // e^{+i mu eta} drives the plus channel; the minus channel is the
            // same sum against the conjugate phase
            let mut p = Complex64::new(0.0, 0.0);
            let mut q = Complex64::new(0.0, 0.0);
            for (&e, &w) in eta.iter().zip(&vw) {
                let ph = Complex64::from_polar(1.0, mu * e);
                p += w * ph;
                q += w * ph.conj();
            }
            (p / SQRT_2PI, q / SQRT_2PI)
        })
        .collect();
    let plus = pairs.iter().map(|t| t.0).collect();
    let minus = pairs.iter().map(|t| t.1).collect();
    ModelElement {
        mu_grid: mu_grid.clone(),
        plus,
        minus,
    }
}

/// Inverse map: glue the full-line transform u(nu) from the two channels
/// (plus on nu > 0, minus mirrored onto nu < 0), invert it with the conjugate
/// kernel, and pull back to the half line via x(xi) = xi^{-1/2} v(ln xi).
pub fn inverse_u(phi: &ModelElement, target: &Arc<LogGrid>) -> HalfLineFunction {
    let mg = phi.mu_grid();
    let m = mg.len();
    let hm = mg.step();
    // glued nu nodes: -mu_max..0..mu_max sharing the mu=0 node once
    let total = if m > 1 { 2 * m - 1 } else { 1 };
    let mut nu = Vec::with_capacity(total);
    let mut uw = Vec::with_capacity(total);
    for j in (1..m).rev() {
        nu.push(-mg.nodes()[j]);
        uw.push(phi.minus()[j]);
    }
    nu.push(0.0);
    // shared node: the glued function is single-valued at nu = 0 for elements
    // in the range of U; average the two channel samples
    uw.push(0.5 * (phi.plus()[0] + phi.minus()[0]));
    for j in 1..m {
        nu.push(mg.nodes()[j]);
        uw.push(phi.plus()[j]);
    }
    // trapezoid weights over [-mu_max, mu_max]
    let w_end = 0.5 * hm;
    for (k, val) in uw.iter_mut().enumerate() {
        let w = if total == 1 {
            1.0
        } else if k == 0 || k == total - 1 {
            w_end
        } else {
            hm
        };
        *val *= w;
    }

    let values: Vec<Complex64> = target
        .eta()
        .par_iter()
        .map(|&e| {
            let mut v = Complex64::new(0.0, 0.0);
            for (&n_, &u_) in nu.iter().zip(&uw) {
                let ph = Complex64::from_polar(1.0, -n_ * e);
                v += u_ * ph;
            }
            v / SQRT_2PI * (-e / 2.0).exp()
        })
        .collect();
    HalfLineFunction::new(target.clone(), values).expect("finite reconstruction")
}

/// Relative Parseval defect | ||Ux||^2 - ||x||^2 | / ||x||^2 (zero for x = 0).
pub fn parseval_defect(x: &HalfLineFunction, mu_grid: &Arc<MuGrid>) -> f64 {
    let nx = norm_sq(x);
    if nx == 0.0 {
        return 0.0;
    }
    let phi = forward_u(x, mu_grid);
    (phi.norm_sq() - nx).abs() / nx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::halfline::{exp_fn, DEFAULT_ETA_MAX, DEFAULT_ETA_MIN};
    use crate::specialfn::lanczos_log_gamma;

    #[test]
    fn forward_of_zero_is_zero() {
        let g = LogGrid::default_verification();
        let mg = MuGrid::default_verification();
        let phi = forward_u(&HalfLineFunction::zero(g), &mg);
        assert!(phi.plus().iter().all(|v| v.norm() == 0.0));
        assert!(phi.minus().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn forward_of_exponential_matches_gamma_closed_form() {
        // U e_a at mu: (1/sqrt(2pi)) a^{-1/2 -+ i mu} Gamma(1/2 +- i mu)
        let g = LogGrid::default_verification();
        let mg = MuGrid::default_verification();
        let e1 = exp_fn(1.0, &g).unwrap();
        let phi = forward_u(&e1, &mg);
        let mut worst = 0.0f64;
        for (j, &mu) in mg.nodes().iter().enumerate() {
            if mu > 10.0 {
                break;
            }
            let gp = lanczos_log_gamma(Complex64::new(0.5, mu)).exp() / SQRT_2PI;
            let gm = lanczos_log_gamma(Complex64::new(0.5, -mu)).exp() / SQRT_2PI;
            worst = worst.max((phi.plus()[j] - gp).norm());
            worst = worst.max((phi.minus()[j] - gm).norm());
        }
        assert!(worst <= 1e-6, "max abs deviation {worst:.3e}");
    }

    #[test]
    fn forward_of_exp2_at_mu_zero() {
        // both channels at mu=0: (1/sqrt(2pi)) a^{-1/2} sqrt(pi) for a=2
        let g = LogGrid::default_verification();
        let mg = Arc::new(MuGrid::new(1.0, 3).unwrap());
        let e2 = exp_fn(2.0, &g).unwrap();
        let phi = forward_u(&e2, &mg);
        let expect = (std::f64::consts::PI / 2.0).sqrt() / SQRT_2PI;
        assert!((phi.plus()[0].re - expect).abs() <= 1e-7);
        assert!((phi.minus()[0].re - expect).abs() <= 1e-7);
        assert!(phi.plus()[0].im.abs() <= 1e-9);
    }

    #[test]
    fn channel_symmetry_for_real_input() {
        let g = LogGrid::default_verification();
        let mg = MuGrid::default_verification();
        let e1 = exp_fn(1.0, &g).unwrap();
        let phi = forward_u(&e1, &mg);
        let scale = phi.plus().iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (p, q) in phi.plus().iter().zip(phi.minus()) {
            assert!((q - p.conj()).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn parseval_zero_and_exponentials() {
        let g = LogGrid::default_verification();
        let mg = MuGrid::default_verification();
        assert_eq!(parseval_defect(&HalfLineFunction::zero(g.clone()), &mg), 0.0);
        for a in [0.5, 1.0, 2.0] {
            let x = exp_fn(a, &g).unwrap();
            let d = parseval_defect(&x, &mg);
            assert!(d <= 1e-6, "a={a}: defect {d:.3e}");
        }
    }

    #[test]
    fn parseval_gaussian_bumps() {
        let g = LogGrid::default_verification();
        let mg = MuGrid::default_verification();
        for (c0, w0) in [(0.0, 1.0), (1.0, 0.7)] {
            let x = HalfLineFunction::from_fn(g.clone(), |xi| {
                let eta = xi.ln();
                Complex64::new((-eta / 2.0).exp() * (-((eta - c0) / w0).powi(2)).exp(), 0.0)
            })
            .unwrap();
            let d = parseval_defect(&x, &mg);
            assert!(d <= 1e-6, "bump ({c0},{w0}): defect {d:.3e}");
        }
    }

    #[test]
    fn parseval_defect_collapses_under_refinement() {
        // at n=128 the mu window is beyond the eta sampling limit and the
        // defect is O(1); one doubling restores the transform
        let mg = MuGrid::default_verification();
        let mut defects = Vec::new();
        for n in [128usize, 256] {
            let g = Arc::new(LogGrid::new(DEFAULT_ETA_MIN, DEFAULT_ETA_MAX, n).unwrap());
            let x = exp_fn(1.0, &g).unwrap();
            defects.push(parseval_defect(&x, &mg));
        }
        assert!(
            defects[1] <= defects[0] / 4.0,
            "defect table {defects:?} lacks the 4x collapse"
        );
    }

    #[test]
    fn roundtrip_exponentials() {
        let g = LogGrid::default_verification();
        let mg = MuGrid::default_verification();
        for a in [0.5, 1.0, 2.0] {
            let x = exp_fn(a, &g).unwrap();
            let xr = inverse_u(&forward_u(&x, &mg), &g);
            let mut num = 0.0;
            for ((r, v), w) in xr.values().iter().zip(x.values()).zip(g.weights()) {
                num += (r - v).norm_sqr() * w;
            }
            let rel = (num / norm_sq(&x)).sqrt();
            assert!(rel <= 1e-8, "a={a}: roundtrip rel {rel:.3e}");
        }
    }

    #[test]
    fn roundtrip_pointwise_window() {
        let g = LogGrid::default_verification();
        let mg = MuGrid::default_verification();
        let x = exp_fn(1.0, &g).unwrap();
        let xr = inverse_u(&forward_u(&x, &mg), &g);
        let mut worst = 0.0f64;
        for ((r, v), &xi) in xr.values().iter().zip(x.values()).zip(g.xi()) {
            if (0.01..=10.0).contains(&xi) {
                worst = worst.max((r - v).norm());
            }
        }
        assert!(worst <= 1e-8, "max pointwise {worst:.3e}");
    }

    #[test]
    fn inverse_of_zero_and_conjugate_symmetry() {
        let g = LogGrid::default_verification();
        let mg = MuGrid::default_verification();
        let z = inverse_u(&ModelElement::zero(mg.clone()), &g);
        assert!(z.values().iter().all(|v| v.norm() == 0.0));

        // plus = conj(minus) pointwise forces a real-valued reconstruction
        let m = mg.len();
        let minus: Vec<Complex64> = mg
            .nodes()
            .iter()
            .map(|&mu| Complex64::new((-mu).exp(), 0.3 * (-mu * 0.7).exp()))
            .collect();
        let plus: Vec<Complex64> = minus.iter().map(|v| v.conj()).collect();
        let phi = ModelElement::new(mg.clone(), plus, minus).unwrap();
        let x = inverse_u(&phi, &g);
        let scale = x.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(m > 2 && scale > 0.0);
        for v in x.values() {
            assert!(v.im.abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn surjectivity_witness_band_limited() {
        use rand::{Rng, SeedableRng};
        let g = LogGrid::default_verification();
        let mg = MuGrid::default_verification();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for trial in 0..3 {
            // random trigonometric polynomial under a Gaussian envelope that
            // vanishes to high order at mu = 0 (the channel glue point)
            let coef: Vec<(Complex64, Complex64)> = (0..6)
                .map(|_| {
                    (
                        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    )
                })
                .collect();
            let channel = |mu: f64, which: usize| -> Complex64 {
                let env = (1.0 - (-(mu / 1.5).powi(2)).exp()).powi(3)
                    * (-((mu - 4.0) / 4.0).powi(2)).exp();
                let mut s = Complex64::new(0.0, 0.0);
                for (k, &(cp, cm)) in coef.iter().enumerate() {
                    let c = if which == 0 { cp } else { cm };
                    s += c * Complex64::from_polar(1.0, 0.45 * k as f64 * mu);
                }
                env * s
            };
            let plus: Vec<Complex64> = mg.nodes().iter().map(|&mu| channel(mu, 0)).collect();
            let minus: Vec<Complex64> = mg.nodes().iter().map(|&mu| channel(mu, 1)).collect();
            let phi = ModelElement::new(mg.clone(), plus, minus).unwrap();
            let back = forward_u(&inverse_u(&phi, &g), &mg);
            let rel = phi.distance(&back).unwrap() / phi.norm_sq().sqrt();
            assert!(rel <= 1e-6, "trial {trial}: defect {rel:.3e}");
        }
    }
}
