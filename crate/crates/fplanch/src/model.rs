//! The 2x2 model matrix F(mu) and the multiplication operator it generates.
//!
//! F(mu) is off-diagonal with entries
//!
//!   F_{+-}(mu) = (2*pi)^{-1/2} e^{i pi/4} e^{-pi mu/2} Gamma(1/2 + i mu),
//!   F_{-+}(mu) = (2*pi)^{-1/2} e^{i pi/4} e^{+pi mu/2} Gamma(1/2 - i mu),
//!
//! assembled in log space so that the huge e^{pi mu/2} factor and the tiny
//! Gamma value recombine without overflow for large mu. Acting node-wise on
//! model elements it realizes the truncated Fourier operator on the model
//! space side.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{Error, Result};
use crate::halfline::{norm_sq, HalfLineFunction, MuGrid};
use crate::operator::apply_trunc_fourier;
use crate::specialfn::lanczos_log_gamma;
use crate::unitary::{forward_u, ModelElement};
use std::sync::Arc;

const LOG_SQRT_2PI: f64 = 0.918_938_533_204_672_74;

/// The model matrix at one mu: off-diagonal entries only (the diagonal is
/// identically zero).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelMatrix {
    mu: f64,
    f_plus_minus: Complex64,
    f_minus_plus: Complex64,
}

impl ModelMatrix {
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Entry mapping the minus channel into the plus channel.
    pub fn f_plus_minus(&self) -> Complex64 {
        self.f_plus_minus
    }

    /// Entry mapping the plus channel into the minus channel.
    pub fn f_minus_plus(&self) -> Complex64 {
        self.f_minus_plus
    }
}

/// Assemble F(mu). Errors on negative or non-finite mu.
pub fn model_matrix(mu: f64) -> Result<ModelMatrix> {
    if !mu.is_finite() || mu < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "model matrix parameter must be finite and non-negative, got {mu}"
        )));
    }
    let phase = Complex64::from_polar(1.0, FRAC_PI_4);
    let lg_plus = lanczos_log_gamma(Complex64::new(0.5, mu));
    let lg_minus = lanczos_log_gamma(Complex64::new(0.5, -mu));
    // log-space recombination: |Gamma(1/2 +- i mu)| ~ e^{-pi mu/2}, so the
    // exponents nearly cancel in both entries
    let f_plus_minus = phase * (lg_plus - Complex64::new(LOG_SQRT_2PI + PI * mu / 2.0, 0.0)).exp();
    let f_minus_plus = phase * (lg_minus + Complex64::new(PI * mu / 2.0 - LOG_SQRT_2PI, 0.0)).exp();
    Ok(ModelMatrix {
        mu,
        f_plus_minus,
        f_minus_plus,
    })
}

/// |F_{+-}(mu)| = 1/sqrt(1 + e^{2 pi mu}), evaluated through decaying
/// exponentials only.
pub fn f_plus_minus_abs_closed(mu: f64) -> f64 {
    let e = (-2.0 * PI * mu).exp();
    (-PI * mu).exp() / (1.0 + e).sqrt()
}

/// |F_{-+}(mu)| = 1/sqrt(1 + e^{-2 pi mu}).
pub fn f_minus_plus_abs_closed(mu: f64) -> f64 {
    1.0 / (1.0 + (-2.0 * PI * mu).exp()).sqrt()
}

/// Operator norm of F(mu): the larger entry modulus, 1/sqrt(1 + e^{-2 pi mu}),
/// increasing from 1/sqrt(2) at mu = 0 toward 1.
pub fn matrix_norm(mu: f64) -> f64 {
    f_minus_plus_abs_closed(mu)
}

/// Node-wise action of the multiplication operator: the channels swap,
/// output_+ = F_{+-} phi_- and output_- = F_{-+} phi_+.
pub fn apply_model(phi: &ModelElement) -> ModelElement {
    let mg = phi.mu_grid();
    let mut plus = Vec::with_capacity(mg.len());
    let mut minus = Vec::with_capacity(mg.len());
    for (j, &mu) in mg.nodes().iter().enumerate() {
        let f = model_matrix(mu).expect("grid nodes are valid parameters");
        plus.push(f.f_plus_minus() * phi.minus()[j]);
        minus.push(f.f_minus_plus() * phi.plus()[j]);
    }
    ModelElement::new(mg.clone(), plus, minus).expect("finite entries")
}

/// Norm of the multiplication operator over the sampled mu range: the max of
/// the node norms. Converges to the supremum 1 as mu_max grows.
pub fn mult_operator_norm(mu_grid: &MuGrid) -> f64 {
    mu_grid
        .nodes()
        .iter()
        .map(|&mu| matrix_norm(mu))
        .fold(0.0, f64::max)
}

/// Numerical defect of the intertwining identity U F = M_F U, measured in the
/// model space norm relative to ||x||.
///
/// The truncated-Fourier application is the O(n^2) quadrature sum, whose
/// accuracy (not the model identities) dominates this number; see the
/// operator module on the resolution bound of the log grid.
pub fn model_identity_defect(x: &HalfLineFunction, mu_grid: &Arc<MuGrid>) -> f64 {
    let nx = norm_sq(x).sqrt();
    if nx == 0.0 {
        return 0.0;
    }
    let fx = apply_trunc_fourier(x);
    let left = forward_u(&fx, mu_grid);
    let right = apply_model(&forward_u(x, mu_grid));
    left.distance(&right).expect("shared mu grid") / nx
}
