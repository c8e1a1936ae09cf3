//! Spectrum and resolvent calculus.
//!
//! The spectrum of the truncated Fourier operator is the straight segment
//! from -e^{i pi/4}/sqrt(2) to e^{i pi/4}/sqrt(2). Eigenvalue curves of the
//! model matrix, the characteristic determinant, distance geometry around the
//! segment, the closed-form 2x2 singular values, and the lower/upper resolvent
//! estimates all live here.

use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};

use crate::error::{Error, Result};
use crate::halfline::MuGrid;
use crate::model::model_matrix;

/// The spectrum segment with endpoints +- e^{i pi/4}/sqrt(2).
#[derive(Debug, Clone, Copy, Default)]
pub struct SpectrumSegment;

impl SpectrumSegment {
    pub fn endpoint_plus(&self) -> Complex64 {
        Complex64::from_polar(FRAC_1_SQRT_2, FRAC_PI_4)
    }

    pub fn endpoint_minus(&self) -> Complex64 {
        -self.endpoint_plus()
    }

    /// Euclidean distance from z to the segment.
    pub fn distance_to(&self, z: Complex64) -> f64 {
        // coordinates along/across the segment direction e^{i pi/4}
        let rot = z * Complex64::from_polar(1.0, -FRAC_PI_4);
        let along = rot.re.clamp(-FRAC_1_SQRT_2, FRAC_1_SQRT_2);
        (rot - Complex64::new(along, 0.0)).norm()
    }
}

/// Eigenvalue pair of the model matrix:
/// zeta_{+-}(mu) = +- e^{i pi/4} / sqrt(2 cosh(pi mu)).
pub fn eigenvalues(mu: f64) -> Result<(Complex64, Complex64)> {
    if !mu.is_finite() || mu < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "eigenvalue parameter must be finite and non-negative, got {mu}"
        )));
    }
    // 1/sqrt(2 cosh pi mu) through decaying exponentials
    let e = (-PI * mu).exp();
    let modulus = e.sqrt() / (1.0 + e * e).sqrt();
    let plus = Complex64::from_polar(modulus, FRAC_PI_4);
    Ok((plus, -plus))
}

/// Characteristic determinant D(z, mu) = z^2 - i/(2 cosh(pi mu)).
pub fn determinant(z: Complex64, mu: f64) -> Complex64 {
    let e = (-PI * mu).exp();
    let root = e / (1.0 + e * e);
    z * z - Complex64::new(0.0, root)
}

/// Distance from z^2 to the segment [0, i/2] swept by the determinant roots.
pub fn dist_z2_to_segment(z: Complex64) -> f64 {
    let w = z * z;
    let along = w.im.clamp(0.0, 0.5);
    (w - Complex64::new(0.0, along)).norm()
}

fn check_on_segment(zeta: Complex64) -> Result<f64> {
    let dev = SpectrumSegment.distance_to(zeta);
    if dev > 1e-12 {
        return Err(Error::OffSegment { dev });
    }
    Ok(zeta.norm())
}

/// Point on the normal to the spectrum segment at zeta:
/// z = zeta + side * delta * e^{i 3 pi/4}.
pub fn normal_point(zeta: Complex64, delta: f64, side: f64) -> Result<Complex64> {
    check_on_segment(zeta)?;
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "normal offset must be non-negative, got {delta}"
        )));
    }
    if side != 1.0 && side != -1.0 {
        return Err(Error::InvalidArgument(format!("side must be +-1, got {side}")));
    }
    Ok(zeta + Complex64::from_polar(delta, 3.0 * FRAC_PI_4) * side)
}

/// dist(z^2, [0, i/2]) for z on the normal at zeta, in closed form:
/// 2 |zeta| delta while delta <= |zeta|, and |zeta|^2 + delta^2 = |z|^2 beyond.
pub fn dist_on_normal(zeta: Complex64, delta: f64) -> Result<f64> {
    let r = check_on_segment(zeta)?;
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "normal offset must be non-negative, got {delta}"
        )));
    }
    Ok(if delta <= r {
        2.0 * r * delta
    } else {
        r * r + delta * delta
    })
}

/// A 2x2 complex matrix, plain fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2c {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
}

impl Mat2c {
    pub fn det(&self) -> Complex64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    /// trace(M* M) = sum of squared entry moduli.
    pub fn trace_gram(&self) -> f64 {
        self.m11.norm_sqr() + self.m12.norm_sqr() + self.m21.norm_sqr() + self.m22.norm_sqr()
    }

    pub fn shifted_from_model(z: Complex64, mu: f64) -> Result<Self> {
        let f = model_matrix(mu)?;
        Ok(Self {
            m11: z,
            m12: -f.f_plus_minus(),
            m21: -f.f_minus_plus(),
            m22: z,
        })
    }
}

/// Exact 2x2 singular values from the closed form
/// s^2 = (T +- sqrt(T^2 - 4 Delta^2)) / 2, T = trace(M*M), Delta = |det M|.
#[derive(Debug, Clone, Copy)]
pub struct TwoByTwoNorm {
    /// Largest singular value.
    pub norm: f64,
    /// 1/s_min when the matrix is invertible (|det| above 1e-300).
    pub inv_norm: Option<f64>,
}

pub fn two_by_two_norm(m: &Mat2c) -> TwoByTwoNorm {
    let t = m.trace_gram();
    let delta = m.det().norm();
    let disc = (t * t - 4.0 * delta * delta).max(0.0).sqrt();
    let s0 = ((t + disc) / 2.0).sqrt();
    // s_min = Delta / s0 avoids cancellation in the small root
    let inv_norm = if delta > 1e-300 { Some(s0 / delta) } else { None };
    TwoByTwoNorm { norm: s0, inv_norm }
}

/// Singular-value pair from the scalars (T, Delta) alone; the phases never
/// enter, which also covers the mu -> infinity limit matrix.
fn inv_norm_from_scalars(t: f64, delta: f64) -> Option<f64> {
    if delta > 1e-300 {
        let disc = (t * t - 4.0 * delta * delta).max(0.0).sqrt();
        Some(((t + disc) / 2.0).sqrt() / delta)
    } else {
        None
    }
}

/// Lower/upper analytic bounds plus an optional numeric oracle value for the
/// resolvent norm at a complex point.
#[derive(Debug, Clone, Copy)]
pub struct ResolventBounds {
    pub z: Complex64,
    pub lower: f64,
    pub upper: f64,
    pub numeric: Option<f64>,
}

/// Bounds for the single-matrix resolvent (zI - F(mu))^{-1}:
/// T/|D|^2 - 2/T <= ||.||^2 <= T/|D|^2 with T = 2|z|^2 + 1, plus the exact
/// 2x2 value as the numeric entry.
pub fn resolvent_bounds_matrix(z: Complex64, mu: f64) -> Result<ResolventBounds> {
    let d = determinant(z, mu).norm();
    if !(d > 1e-300) {
        return Err(Error::OnSpectrum { dist: d });
    }
    let t = 2.0 * z.norm_sqr() + 1.0;
    let upper_sq = t / (d * d);
    let lower_sq = (upper_sq - 2.0 / t).max(0.0);
    let m = Mat2c::shifted_from_model(z, mu)?;
    Ok(ResolventBounds {
        z,
        lower: lower_sq.sqrt(),
        upper: upper_sq.sqrt(),
        numeric: two_by_two_norm(&m).inv_norm,
    })
}

/// The mu value whose determinant root i/(2 cosh(pi mu)) is closest to z^2,
/// i.e. where the per-matrix resolvent norm over mu attains its supremum.
/// Returns None when the closest segment point is the mu -> infinity limit 0.
pub fn attaining_mu(z: Complex64) -> Option<f64> {
    let y = (z * z).im;
    if y <= 0.0 {
        return None;
    }
    let y = y.min(0.5);
    // 1/(2 cosh pi mu) = y  =>  mu = acosh(1/(2y)) / pi
    Some((1.0 / (2.0 * y)).acosh() / PI)
}

/// Supremum over the mu grid of the per-matrix inverse norms, with the grid
/// refined by the analytically attaining node and the mu -> infinity limit.
fn mu_sup_inverse_norm(z: Complex64, mu_grid: &MuGrid) -> f64 {
    let t = 2.0 * z.norm_sqr() + 1.0;
    let mut best: f64 = 0.0;
    for &mu in mu_grid.nodes() {
        let delta = determinant(z, mu).norm();
        if let Some(v) = inv_norm_from_scalars(t, delta) {
            best = best.max(v);
        }
    }
    if let Some(mu_star) = attaining_mu(z) {
        let delta = determinant(z, mu_star).norm();
        if let Some(v) = inv_norm_from_scalars(t, delta) {
            best = best.max(v);
        }
    }
    // limit node: D -> z^2
    if let Some(v) = inv_norm_from_scalars(t, z.norm_sqr()) {
        best = best.max(v);
    }
    best
}

/// Operator-level resolvent bounds in terms of d = dist(z^2, [0, i/2]):
/// upper = sqrt(T)/d, lower = sqrt(T)/d - 2d/T^{3/2}, and the numeric oracle
/// as the mu-grid supremum of exact 2x2 inverse norms.
pub fn resolvent_bounds_operator(z: Complex64, mu_grid: &MuGrid) -> Result<ResolventBounds> {
    let d = dist_z2_to_segment(z);
    if !(d > 0.0) {
        return Err(Error::OnSpectrum { dist: d });
    }
    let t = 2.0 * z.norm_sqr() + 1.0;
    let upper = t.sqrt() / d;
    let lower = (upper - 2.0 * d / t.powf(1.5)).max(0.0);
    Ok(ResolventBounds {
        z,
        lower,
        upper,
        numeric: Some(mu_sup_inverse_norm(z, mu_grid)),
    })
}

/// Resolvent bounds along the normal at a spectrum point zeta:
/// with A(z) = sqrt(2|z|^2+1)/2 and B(z) = 4/(2|z|^2+1)^{3/2},
///   zeta != 0: upper = A/(|zeta| delta), lower = upper - B |zeta| delta
///              (the lower estimate needs delta <= |zeta|);
///   zeta == 0: upper = 2A/|z|^2, lower = 2A/|z|^2 - B.
pub fn resolvent_bounds_on_normal(
    zeta: Complex64,
    delta: f64,
    side: f64,
    mu_grid: &MuGrid,
) -> Result<ResolventBounds> {
    let r = check_on_segment(zeta)?;
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "normal offset must be positive for resolvent bounds, got {delta}"
        )));
    }
    if r > 0.0 && delta > r {
        return Err(Error::InvalidArgument(format!(
            "lower estimate on the normal needs delta <= |zeta| ({delta} > {r})"
        )));
    }
    let z = normal_point(zeta, delta, side)?;
    let t = 2.0 * z.norm_sqr() + 1.0;
    let a = t.sqrt() / 2.0;
    let b = 4.0 / t.powf(1.5);
    let (upper, lower) = if r > 0.0 {
        let u = a / (r * delta);
        (u, (u - b * r * delta).max(0.0))
    } else {
        let u = 2.0 * a / z.norm_sqr();
        (u, (u - b).max(0.0))
    };
    Ok(ResolventBounds {
        z,
        lower,
        upper,
        numeric: Some(mu_sup_inverse_norm(z, mu_grid)),
    })
}

/// One row of the non-normality table: z = delta e^{i 3 pi/4} sits on the
/// normal at 0, at distance delta from the spectrum, and the product
/// delta * ||R(z)|| grows like 1/delta instead of staying bounded.
#[derive(Debug, Clone, Copy)]
pub struct WitnessRow {
    pub delta: f64,
    pub dist: f64,
    pub resolvent: f64,
    pub product: f64,
}

pub fn non_normality_witness(deltas: &[f64], mu_grid: &MuGrid) -> Result<Vec<WitnessRow>> {
    if deltas.is_empty() {
        return Err(Error::InvalidArgument("empty delta list".into()));
    }
    for pair in deltas.windows(2) {
        if pair[1] >= pair[0] {
            return Err(Error::InvalidArgument(
                "witness deltas must be strictly decreasing".into(),
            ));
        }
    }
    deltas
        .iter()
        .map(|&delta| {
            if !(delta > 0.0) || !delta.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "witness deltas must be positive, got {delta}"
                )));
            }
            let z = Complex64::from_polar(delta, 3.0 * FRAC_PI_4);
            let dist = SpectrumSegment.distance_to(z);
            let resolvent = mu_sup_inverse_norm(z, mu_grid);
            Ok(WitnessRow {
                delta,
                dist,
                resolvent,
                product: delta * resolvent,
            })
        })
        .collect()
}

/// Least-squares slope of log(resolvent) against log(delta); None with fewer
/// than two rows.
pub fn fit_loglog_slope(rows: &[WitnessRow]) -> Option<f64> {
    if rows.len() < 2 {
        return None;
    }
    let n = rows.len() as f64;
    let xs: Vec<f64> = rows.iter().map(|r| r.delta.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.resolvent.ln()).collect();
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    Some(sxy / sxx)
}
