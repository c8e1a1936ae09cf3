//! The verification suite behind `fplanch verify`: every analytic identity of
//! the model turned into a named, tolerance-bearing check.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use fplanch::halfline::{exp_fn, norm_sq, HalfLineFunction, LogGrid, MuGrid};
use fplanch::model::{
    f_minus_plus_abs_closed, f_plus_minus_abs_closed, matrix_norm, model_identity_defect,
    model_matrix,
};
use fplanch::operator::{
    apply_trunc_fourier, build_dense, operator_norm_estimate, spectral_radius_estimate,
    trunc_fourier_exp_closed, u_exp_closed, u_trunc_fourier_exp_closed, COMPARE_ETA_MAX,
    COMPARE_ETA_MIN, DENSE_ETA_MAX, DENSE_ETA_MIN,
};
use fplanch::specialfn::{abs_gamma_sq, gamma_critical, log_cosh, ChannelSign, CriticalLinePoint};
use fplanch::spectral::{
    eigenvalues, fit_loglog_slope, non_normality_witness, resolvent_bounds_on_normal,
    resolvent_bounds_operator, two_by_two_norm, Mat2c, SpectrumSegment,
};
use fplanch::unitary::{forward_u, inverse_u, parseval_defect, ModelElement};

use crate::config::RunConfig;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Default, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
    pub all_pass: bool,
}

impl VerifyReport {
    fn push(&mut self, check: &str, value: f64, tolerance: f64, pass: bool) {
        self.checks.push(CheckResult {
            check: check.to_string(),
            value,
            tolerance,
            pass,
        });
    }

    /// value <= tolerance semantics, the default for residual checks.
    fn bounded(&mut self, cfg: &RunConfig, check: &str, value: f64, default_tol: f64) {
        let tol = cfg.tolerance(check, default_tol);
        self.push(check, value, tol, value <= tol);
    }

    pub fn first_failure(&self) -> Option<&CheckResult> {
        self.checks.iter().find(|c| !c.pass)
    }
}

/// Deterministic pseudo-random stream for the randomized checks.
struct Lcg(u64);

impl Lcg {
    fn next_f64(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((self.0 >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }

    fn next_c64(&mut self) -> Complex64 {
        Complex64::new(self.next_f64(), self.next_f64())
    }
}

pub fn run_verify(cfg: &RunConfig, slow: bool) -> VerifyReport {
    let mut rep = VerifyReport::default();
    let grid = cfg.log_grid();
    let mu_grid = cfg.mu_grid();

    special_function_checks(&mut rep, cfg);
    quadrature_checks(&mut rep, cfg);
    parseval_checks(&mut rep, cfg, &grid, &mu_grid);
    roundtrip_checks(&mut rep, cfg, &grid, &mu_grid);
    model_identity_checks(&mut rep, cfg, &grid, &mu_grid);
    matrix_entry_checks(&mut rep, cfg);
    operator_checks(&mut rep, cfg);
    spectrum_checks(&mut rep, cfg, &mu_grid);
    emme_checks(&mut rep, cfg);
    resolvent_checks(&mut rep, cfg, &mu_grid);
    witness_checks(&mut rep, cfg, &mu_grid);
    if slow {
        dense_spectral_checks(&mut rep, cfg);
    }

    rep.all_pass = rep.checks.iter().all(|c| c.pass);
    rep
}

fn special_function_checks(rep: &mut VerifyReport, cfg: &RunConfig) {
    let mut reflection: f64 = 0.0;
    let mut conjugacy: f64 = 0.0;
    let mut consistency: f64 = 0.0;
    for k in 0..=300 {
        let mu = 30.0 * k as f64 / 300.0;
        let p = CriticalLinePoint::new(mu).expect("valid mu");
        let gp = gamma_critical(p, ChannelSign::Plus);
        let gm = gamma_critical(p, ChannelSign::Minus);
        // log-space residual of Gamma(1/2+i mu) Gamma(1/2-i mu) = pi/cosh(pi mu)
        let lg = fplanch::log_gamma(Complex64::new(0.5, mu)).expect("off the poles")
            + fplanch::log_gamma(Complex64::new(0.5, -mu)).expect("off the poles");
        let log_rhs = PI.ln() - log_cosh(PI * mu);
        reflection = reflection.max(((lg - log_rhs).exp() - 1.0).norm());
        conjugacy = conjugacy.max((gm - gp.conj()).norm() / gp.norm());
        let via_lg = (2.0 * fplanch::log_gamma(Complex64::new(0.5, mu)).unwrap().re).exp();
        let closed = abs_gamma_sq(p);
        consistency = consistency.max((via_lg - closed).abs() / closed);
    }
    rep.bounded(cfg, "reflection_identity", reflection, 1e-12);
    rep.bounded(cfg, "gamma_conjugacy", conjugacy, 1e-14);
    rep.bounded(cfg, "gamma_consistency", consistency, 1e-12);
}

fn quadrature_checks(rep: &mut VerifyReport, cfg: &RunConfig) {
    // norm_sq(e_1) against 1/(2a) on a coarse doubling chain: the error must
    // drop at least 4x per doubling while above the truncation floor
    let mut errs = Vec::new();
    for n in [24usize, 48, 96] {
        let g = Arc::new(LogGrid::new(cfg.eta_min, cfg.eta_max, n).expect("validated window"));
        let x = exp_fn(1.0, &g).expect("valid rate");
        errs.push((norm_sq(&x) - 0.5).abs());
    }
    let worst_ratio = (errs[1] / errs[0]).max(errs[2] / errs[1]);
    rep.bounded(cfg, "quadrature_convergence", worst_ratio, 0.25);
}

fn parseval_checks(
    rep: &mut VerifyReport,
    cfg: &RunConfig,
    grid: &Arc<LogGrid>,
    mu_grid: &Arc<MuGrid>,
) {
    let mut worst: f64 = 0.0;
    for &a in &cfg.amplitudes {
        worst = worst.max(parseval_defect(&exp_fn(a, grid).expect("valid rate"), mu_grid));
    }
    rep.bounded(cfg, "parseval_exponentials", worst, 1e-6);

    let mut worst_g: f64 = 0.0;
    for (c0, w0) in [(0.0, 1.0), (1.0, 0.7)] {
        let x = HalfLineFunction::from_fn(grid.clone(), |xi| {
            let eta = xi.ln();
            Complex64::new((-eta / 2.0).exp() * (-((eta - c0) / w0).powi(2)).exp(), 0.0)
        })
        .expect("finite samples");
        worst_g = worst_g.max(parseval_defect(&x, mu_grid));
    }
    rep.bounded(cfg, "parseval_gaussians", worst_g, 1e-6);

    // refinement collapse at the coarse doubling where the mu window crosses
    // the sampling limit
    let mut defects = Vec::new();
    for n in [128usize, 256] {
        let g = Arc::new(LogGrid::new(cfg.eta_min, cfg.eta_max, n).expect("validated window"));
        defects.push(parseval_defect(&exp_fn(1.0, &g).expect("valid rate"), mu_grid));
    }
    rep.bounded(cfg, "parseval_refinement", defects[1] / defects[0], 0.25);
}

fn roundtrip_checks(
    rep: &mut VerifyReport,
    cfg: &RunConfig,
    grid: &Arc<LogGrid>,
    mu_grid: &Arc<MuGrid>,
) {
    let mut worst: f64 = 0.0;
    for &a in &cfg.amplitudes {
        let x = exp_fn(a, grid).expect("valid rate");
        let back = inverse_u(&forward_u(&x, mu_grid), grid);
        let mut num = 0.0;
        for ((r, v), w) in back.values().iter().zip(x.values()).zip(grid.weights()) {
            num += (r - v).norm_sqr() * w;
        }
        worst = worst.max((num / norm_sq(&x)).sqrt());
    }
    rep.bounded(cfg, "roundtrip", worst, 1e-8);

    // channel symmetry of the forward map on real input
    let x = exp_fn(1.0, grid).expect("valid rate");
    let phi = forward_u(&x, mu_grid);
    let scale = phi.plus().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut sym: f64 = 0.0;
    for (p, q) in phi.plus().iter().zip(phi.minus()) {
        sym = sym.max((q - p.conj()).norm() / scale);
    }
    rep.bounded(cfg, "channel_symmetry", sym, 1e-12);

    // range witness: band-limited elements come back after inverse + forward
    let mut rng = Lcg(0x5eed5eed);
    let mut worst_s: f64 = 0.0;
    for _ in 0..3 {
        let coef: Vec<(Complex64, Complex64)> =
            (0..6).map(|_| (rng.next_c64(), rng.next_c64())).collect();
        let channel = |mu: f64, which: usize| -> Complex64 {
            let env =
                (1.0 - (-(mu / 1.5).powi(2)).exp()).powi(3) * (-((mu - 4.0) / 4.0).powi(2)).exp();
            let mut s = Complex64::new(0.0, 0.0);
            for (k, &(cp, cm)) in coef.iter().enumerate() {
                s += if which == 0 { cp } else { cm }
                    * Complex64::from_polar(1.0, 0.45 * k as f64 * mu);
            }
            env * s
        };
        let plus: Vec<Complex64> = mu_grid.nodes().iter().map(|&mu| channel(mu, 0)).collect();
        let minus: Vec<Complex64> = mu_grid.nodes().iter().map(|&mu| channel(mu, 1)).collect();
        let phi = ModelElement::new(mu_grid.clone(), plus, minus).expect("finite channels");
        let back = forward_u(&inverse_u(&phi, grid), mu_grid);
        worst_s = worst_s.max(phi.distance(&back).expect("same grid") / phi.norm_sq().sqrt());
    }
    rep.bounded(cfg, "surjectivity", worst_s, 1e-6);
}

fn model_identity_checks(
    rep: &mut VerifyReport,
    cfg: &RunConfig,
    grid: &Arc<LogGrid>,
    mu_grid: &Arc<MuGrid>,
) {
    // closed-form route: the matrix times the channel image of e_a equals the
    // channel image of the transformed exponential, exactly in mu
    let mut worst: f64 = 0.0;
    for &a in &cfg.amplitudes {
        for k in 0..=500 {
            let mu = 10.0 * k as f64 / 500.0;
            let f = model_matrix(mu).expect("valid mu");
            let zp = u_trunc_fourier_exp_closed(a, mu, ChannelSign::Plus).expect("valid args");
            let zm = u_trunc_fourier_exp_closed(a, mu, ChannelSign::Minus).expect("valid args");
            let yp = u_exp_closed(a, mu, ChannelSign::Plus).expect("valid args");
            let ym = u_exp_closed(a, mu, ChannelSign::Minus).expect("valid args");
            worst = worst.max((zp - f.f_plus_minus() * ym).norm() / zp.norm());
            worst = worst.max((zm - f.f_minus_plus() * yp).norm() / zm.norm());
        }
    }
    rep.bounded(cfg, "model_identity_closed", worst, 1e-10);

    // numeric route: limited by the oscillatory quadrature of the O(n^2)
    // operator application on the wide grid, far above the stated tolerance;
    // reported honestly (see README on the resolution barrier)
    let x = exp_fn(1.0, grid).expect("valid rate");
    let defect = model_identity_defect(&x, mu_grid);
    rep.bounded(cfg, "model_identity_numeric", defect, 1e-3);
}

fn matrix_entry_checks(rep: &mut VerifyReport, cfg: &RunConfig) {
    let mut moduli: f64 = 0.0;
    let mut pythagoras: f64 = 0.0;
    let mut product: f64 = 0.0;
    let mut norm_svd: f64 = 0.0;
    for k in 0..=300 {
        let mu = 30.0 * k as f64 / 300.0;
        let f = model_matrix(mu).expect("valid mu");
        let apm = f_plus_minus_abs_closed(mu);
        let amp = f_minus_plus_abs_closed(mu);
        moduli = moduli.max((f.f_plus_minus().norm() - apm).abs() / apm);
        moduli = moduli.max((f.f_minus_plus().norm() - amp).abs() / amp);
        pythagoras = pythagoras
            .max((f.f_plus_minus().norm_sqr() + f.f_minus_plus().norm_sqr() - 1.0).abs());
        let prod = f.f_plus_minus() * f.f_minus_plus();
        let expect = Complex64::new(0.0, (-PI * mu).exp() / (1.0 + (-2.0 * PI * mu).exp()));
        product = product.max((prod - expect).norm() / expect.norm());
        let m = Mat2c {
            m11: Complex64::new(0.0, 0.0),
            m12: f.f_plus_minus(),
            m21: f.f_minus_plus(),
            m22: Complex64::new(0.0, 0.0),
        };
        norm_svd = norm_svd.max((two_by_two_norm(&m).norm - matrix_norm(mu)).abs());
    }
    rep.bounded(cfg, "entry_moduli", moduli, 1e-12);
    rep.bounded(cfg, "entry_pythagoras", pythagoras, 1e-12);
    rep.bounded(cfg, "entry_product", product, 1e-12);
    rep.bounded(cfg, "norm_vs_svd", norm_svd, 1e-12);
}

fn operator_checks(rep: &mut VerifyReport, cfg: &RunConfig) {
    // resolved comparison window; see the operator module on why the wide
    // verification grid cannot host these
    let g = Arc::new(LogGrid::new(COMPARE_ETA_MIN, COMPARE_ETA_MAX, 4096).expect("fixed window"));

    let mut contraction: f64 = 0.0;
    for &a in &cfg.amplitudes {
        let x = exp_fn(a, &g).expect("valid rate");
        let fx = apply_trunc_fourier(&x);
        contraction = contraction.max((norm_sq(&fx) / norm_sq(&x)).sqrt());
    }
    rep.bounded(cfg, "strict_contraction", contraction, 0.999_999);

    // frozen resolution-limited tolerances per (a, t-cap)
    let mut agreement: f64 = 0.0;
    for (a, t_cap, tol) in [
        (0.5, 40.0, 2e-5),
        (1.0, 40.0, 2e-5),
        (2.0, 40.0, 2e-5),
        (1.0, 60.0, 1e-5),
        (2.0, 60.0, 1e-5),
        (2.0, 100.0, 2e-5),
    ] {
        let x = exp_fn(a, &g).expect("valid rate");
        let fx = apply_trunc_fourier(&x);
        let mut worst: f64 = 0.0;
        for (v, &t) in fx.values().iter().zip(g.xi()) {
            if t <= t_cap {
                let exact = trunc_fourier_exp_closed(a, t).expect("valid rate");
                worst = worst.max((v - exact).norm() / exact.norm());
            }
        }
        agreement = agreement.max(worst / tol);
    }
    rep.bounded(cfg, "closed_form_agreement", agreement, 1.0);

    // dense matrix and direct sum agree on shared inputs
    let gd = Arc::new(LogGrid::new(DENSE_ETA_MIN, DENSE_ETA_MAX, 256).expect("fixed window"));
    let op = build_dense(&gd).expect("within cap");
    let x = exp_fn(1.0, &gd).expect("valid rate");
    let coeffs = op.to_coefficients(&x).expect("same grid");
    let dense_out = op.apply(&coeffs);
    let direct = op
        .to_coefficients(&apply_trunc_fourier(&x))
        .expect("same grid");
    let scale = direct.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
    let mut consistency: f64 = 0.0;
    for (d, e) in dense_out.iter().zip(&direct) {
        consistency = consistency.max((d - e).norm() / scale);
    }
    rep.bounded(cfg, "nystrom_consistency", consistency, 1e-12);
}

fn spectrum_checks(rep: &mut VerifyReport, cfg: &RunConfig, mu_grid: &Arc<MuGrid>) {
    let seg = SpectrumSegment;
    let mut transverse: f64 = 0.0;
    let mut max_gap: f64 = 0.0;
    let mut monotone_violations = 0usize;
    let mut prev_r = f64::INFINITY;
    let mut last_r = FRAC_1_SQRT_2;
    for &mu in mu_grid.nodes() {
        let (p, m) = eigenvalues(mu).expect("valid mu");
        transverse = transverse.max(seg.distance_to(p)).max(seg.distance_to(m));
        let r = p.norm();
        if r >= prev_r {
            monotone_violations += 1;
        }
        max_gap = max_gap.max(last_r - r);
        last_r = r;
        prev_r = r;
    }
    max_gap = max_gap.max(last_r); // closing gap to the appended limit point 0
    rep.bounded(cfg, "spectrum_on_segment", transverse, 1e-12);
    rep.bounded(cfg, "spectrum_hausdorff_fill", max_gap / 2.0, 2e-3);
    rep.bounded(cfg, "spectrum_monotone_motion", monotone_violations as f64, 0.5);
}

fn emme_checks(rep: &mut VerifyReport, cfg: &RunConfig) {
    let mut rng = Lcg(0xabcdef12345);
    let mut violation: f64 = 0.0;
    for _ in 0..1000 {
        let m = Mat2c {
            m11: rng.next_c64(),
            m12: rng.next_c64(),
            m21: rng.next_c64(),
            m22: rng.next_c64(),
        };
        let t = m.trace_gram();
        let sv = two_by_two_norm(&m);
        let s0sq = sv.norm * sv.norm;
        violation = violation.max(t / 2.0 - s0sq).max(s0sq - t);
        if let Some(inv) = sv.inv_norm {
            let delta = m.det().norm();
            let hi = t / (delta * delta);
            let lo = hi - 2.0 / t;
            let inv_sq = inv * inv;
            let scale = hi.max(1.0);
            violation = violation
                .max((lo - inv_sq) / scale)
                .max((inv_sq - hi) / scale);
        }
    }
    rep.bounded(cfg, "emme_inequalities", violation.max(0.0), 1e-12);

    // trace identity on random shifted matrices
    let mut trace_dev: f64 = 0.0;
    for _ in 0..64 {
        let z = rng.next_c64() * 2.0;
        let mu = (rng.next_f64() + 1.0) * 7.5;
        let m = Mat2c::shifted_from_model(z, mu).expect("valid mu");
        let expect = 2.0 * z.norm_sqr() + 1.0;
        trace_dev = trace_dev.max((m.trace_gram() - expect).abs() / expect);
    }
    rep.bounded(cfg, "trace_identity", trace_dev, 1e-12);
}

fn resolvent_checks(rep: &mut VerifyReport, cfg: &RunConfig, mu_grid: &Arc<MuGrid>) {
    // sandwich on the z grid, avoiding a 0.02 tube around the segment
    let seg = SpectrumSegment;
    let zg = &cfg.z_grid;
    let mut violation: f64 = 0.0;
    for i in 0..zg.steps {
        for j in 0..zg.steps {
            let re = zg.re_min + (zg.re_max - zg.re_min) * i as f64 / (zg.steps - 1) as f64;
            let im = zg.im_min + (zg.im_max - zg.im_min) * j as f64 / (zg.steps - 1) as f64;
            let z = Complex64::new(re, im);
            if seg.distance_to(z) < 0.02 {
                continue;
            }
            let b = resolvent_bounds_operator(z, mu_grid).expect("off the segment");
            let numeric = b.numeric.expect("oracle attached");
            let scale = numeric.max(1e-300);
            violation = violation
                .max((b.lower - numeric) / scale)
                .max((numeric - b.upper) / scale);
        }
    }
    rep.bounded(cfg, "resolvent_sandwich", violation.max(0.0), 1e-9);

    // normal-line brackets and the delta*||R|| -> A(zeta)/|zeta| extrapolation
    let mut bracket: f64 = 0.0;
    let mut extrapolation: f64 = 0.0;
    for r in [0.1, 0.3, 0.5] {
        let zeta = Complex64::from_polar(r, FRAC_PI_4);
        for frac in [0.5, 0.2, 0.1, 0.05] {
            let delta = frac * r;
            for side in [1.0, -1.0] {
                let b = resolvent_bounds_on_normal(zeta, delta, side, mu_grid)
                    .expect("valid normal point");
                let numeric = b.numeric.expect("oracle attached");
                let scale = numeric.max(1e-300);
                bracket = bracket
                    .max((b.lower - numeric) / scale)
                    .max((numeric - b.upper) / scale);
            }
        }
        let delta = 0.05 * r;
        let b = resolvent_bounds_on_normal(zeta, delta, 1.0, mu_grid).expect("valid normal point");
        let target = (2.0 * r * r + 1.0).sqrt() / (2.0 * r);
        extrapolation = extrapolation.max((delta * b.numeric.unwrap() - target).abs() / target);
    }
    rep.bounded(cfg, "normal_line_bracket", bracket.max(0.0), 1e-9);
    rep.bounded(cfg, "normal_line_extrapolation", extrapolation, 0.02);
}

fn witness_checks(rep: &mut VerifyReport, cfg: &RunConfig, mu_grid: &Arc<MuGrid>) {
    let rows = non_normality_witness(&cfg.deltas, mu_grid).expect("validated deltas");
    let mut monotone_violations = 0usize;
    for p in rows.windows(2) {
        if p[1].product <= p[0].product {
            monotone_violations += 1;
        }
    }
    rep.bounded(cfg, "witness_product_monotone", monotone_violations as f64, 0.5);
    if let Some(slope) = fit_loglog_slope(&rows) {
        rep.bounded(cfg, "witness_slope", (slope + 2.0).abs(), 0.05);
    }
}

fn dense_spectral_checks(rep: &mut VerifyReport, cfg: &RunConfig) {
    // resolved dense windows; the estimate climbs with the window and stays
    // below the limiting value 1/sqrt(2)
    let table = [(-9.7, 2.3, 512usize), (-10.0, 2.65, 1024), (DENSE_ETA_MIN, DENSE_ETA_MAX, 2048)];
    let mut estimates = Vec::new();
    for &(em, ex, n) in &table {
        let g = Arc::new(LogGrid::new(em, ex, n).expect("fixed window"));
        let op = build_dense(&g).expect("within cap");
        estimates.push(spectral_radius_estimate(&op).expect("power iteration converges"));
    }
    let monotone = estimates.windows(2).all(|p| p[1] > p[0]);
    eprintln!("spectral radius estimates (n = 512, 1024, 2048): {estimates:?}");
    rep.bounded(
        cfg,
        "spectral_radius_convergence",
        if monotone { 0.0 } else { 1.0 },
        0.5,
    );
    // the paper-value interval at n = 2048; out of reach for any resolved
    // window at this size (see README), reported honestly
    let r2048 = estimates[2];
    rep.bounded(cfg, "spectral_radius", (r2048 - FRAC_1_SQRT_2).abs(), 0.02);

    let g = Arc::new(LogGrid::new(DENSE_ETA_MIN, DENSE_ETA_MAX, 2048).expect("fixed window"));
    let op = build_dense(&g).expect("within cap");
    let sigma = operator_norm_estimate(&op).expect("power iteration converges");
    let tol = cfg.tolerance("operator_norm", 1.0001);
    rep.push("operator_norm", sigma, tol, (0.95..=tol).contains(&sigma));
}
