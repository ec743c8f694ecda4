//! Experiment harness: slope fitting on log-log series, verification of the
//! predicted linear decay rates against radial quadrature, lifespan sweeps
//! in the blow-up region, and numerical checks of the auxiliary estimates
//! (oscillating-kernel L^r scaling, small-frequency integrals, fractional
//! Gagliardo-Nirenberg interpolation on the L^2 scale).

use crate::model::{
    blowup_condition, decay_prediction, derive_constants, lifespan_exponent, ratio_f64,
    Corollary, DecayPrediction, ModelError, ModelParams, Rational,
};
use crate::propagator::{radial_norm, sphere_area, PropagatorError, RadialData, RadialProfile};
use crate::quad::{self, QuadSpec};
use crate::semilinear::{
    default_threshold, integrate, CouplingKind, SemilinearError, SimOptions, SystemState,
};
use crate::spectral::{
    lr_norm, sobolev_norm, LpExponent, SpectralError, SpectralField, SpectralGrid,
    MAX_POINTS_PER_AXIS,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("need at least 8 samples inside the fit window, found {0}")]
    InsufficientData(usize),
    #[error("norm values must be positive for log fitting (value {value:e} at t = {t})")]
    NonPositiveNorm { t: f64, value: f64 },
    #[error("no blow-up observed for eps = {eps} before t = {horizon} (raise the horizon or lower the threshold)")]
    NoBlowupObserved { eps: f64, horizon: f64 },
    #[error("interpolation parameter theta = {theta} lies outside [{lo}, 1]")]
    ThetaOutOfRange { theta: f64, lo: f64 },
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("sweep configuration: {0}")]
    BadSweep(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Propagator(#[from] PropagatorError),
    #[error(transparent)]
    Semilinear(#[from] SemilinearError),
}

/// Geometric grid of `count` points from `lo` to `hi` inclusive.
pub fn geomspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && count >= 2);
    (0..count)
        .map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64))
        .collect()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
    pub n_points: usize,
}

fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    if ys.iter().all(|&y| y == ys[0]) {
        return (0.0, ys[0], 1.0);
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let r2 = if ss_tot == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    (slope, intercept, r2)
}

/// Least squares for log(norm) against log(1+t), restricted to the window.
pub fn fit_decay(
    times: &[f64],
    norms: &[f64],
    window: (f64, f64),
) -> Result<SlopeFit, AnalysisError> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, &v) in times.iter().zip(norms.iter()) {
        if t < window.0 || t > window.1 {
            continue;
        }
        if v.is_nan() || v <= 0.0 {
            return Err(AnalysisError::NonPositiveNorm { t, value: v });
        }
        xs.push((1.0 + t).ln());
        ys.push(v.ln());
    }
    if xs.len() < 8 {
        return Err(AnalysisError::InsufficientData(xs.len()));
    }
    let (slope, intercept, r_squared) = ols(&xs, &ys);
    Ok(SlopeFit {
        slope,
        intercept,
        r_squared,
        window,
        n_points: xs.len(),
    })
}

/// The sharpest estimate branch available for the given integrability:
/// the L^m-improved rates when the dimension restriction n > m0 k- allows
/// them (always at m = 2, where the branch degenerates to plain L^2-L^2),
/// otherwise the dimension-free variant.
pub fn choose_corollary(params: &ModelParams) -> Corollary {
    let c = derive_constants(params);
    match c.m0 {
        None => Corollary::C22,
        Some(m0) => {
            if params.n_rat() > m0 * c.k_minus {
                Corollary::C22
            } else {
                Corollary::C21
            }
        }
    }
}

/// Predicted slope for a concrete datum: the w0 exponent if only w0 is
/// present, the w1 exponent if only w1 is, the slower of the two otherwise.
pub fn predicted_slope(pred: &DecayPrediction, data: &RadialData) -> f64 {
    let e0 = ratio_f64(pred.exponent_data0 + pred.loss);
    let e1 = ratio_f64(pred.exponent_data1 + pred.loss);
    match (data.w0.is_zero(), data.w1.is_zero()) {
        (false, true) => e0,
        (true, false) => e1,
        _ => e0.max(e1),
    }
}

/// Evolve radial data with the exact kernels and fit the norm decay,
/// comparing against the predicted exponent.  Returns (fit, prediction,
/// pass with |slope - predicted| <= tol).
pub fn verify_linear_decay(
    params: &ModelParams,
    data: &RadialData,
    j: u8,
    a: Rational,
    window: (f64, f64),
    tol: f64,
) -> Result<(SlopeFit, DecayPrediction, bool), AnalysisError> {
    let pred = decay_prediction(params, j, a, choose_corollary(params))?;
    let ts = geomspace(window.0, window.1, 17);
    let spec = QuadSpec::default();
    let af = ratio_f64(a);
    let norms: Vec<f64> = ts
        .par_iter()
        .map(|&t| radial_norm(data, t, j, af, params, &spec))
        .collect::<Result<_, _>>()?;
    let fit = fit_decay(&ts, &norms, window)?;
    let predicted = predicted_slope(&pred, data);
    let pass = (fit.slope - predicted).abs() <= tol;
    Ok((fit, pred, pass))
}

/// One row of the linear-decay verification matrix.
#[derive(Debug, Clone)]
pub struct DecayCase {
    pub id: &'static str,
    pub sigma: Rational,
    pub delta: Rational,
    pub n: u32,
    pub m: Rational,
    pub j: u8,
    pub a: Rational,
    pub data: RadialData,
}

impl DecayCase {
    pub fn params(&self) -> Result<ModelParams, ModelError> {
        ModelParams::new(
            self.sigma,
            self.delta,
            self.n,
            Rational::from_integer(2),
            Rational::from_integer(2),
            self.m,
        )
    }
}

fn gaussian() -> RadialProfile {
    RadialProfile::Gaussian { amplitude: 1.0 }
}

/// Spectra sitting just inside L^2 realize the plain L^2-L^2 rates; the
/// 0.02 offset keeps the norm finite and shifts the slope well below the
/// pass tolerance.
fn l2_edge(n: u32) -> RadialProfile {
    RadialProfile::PowerGaussian {
        amplitude: 1.0,
        power: -(n as f64) / 2.0 + 0.02,
    }
}

const ZERO_P: RadialProfile = RadialProfile::Zero;

/// Verification matrix spanning the three damping regimes, both time
/// derivative orders, a in {0, k+}, m in {1, 2}, and n in 1..=4.
pub fn builtin_decay_matrix() -> Vec<DecayCase> {
    let r = |n, d| Rational::new(n, d);
    let one = Rational::from_integer(1);
    let two = Rational::from_integer(2);
    let mk = |id, delta: Rational, n, m, j, a: Rational, w0, w1| DecayCase {
        id,
        sigma: one,
        delta,
        n,
        m,
        j,
        a,
        data: RadialData { w0, w1 },
    };
    vec![
        mk("half-n3-data1-a0", r(1, 2), 3, one, 0, r(0, 1), ZERO_P, gaussian()),
        mk("half-n3-data1-a1", r(1, 2), 3, one, 0, one, ZERO_P, gaussian()),
        mk("below-n2-data0-a0", r(1, 4), 2, one, 0, r(0, 1), gaussian(), ZERO_P),
        mk("below-n2-data1-a0", r(1, 4), 2, one, 0, r(0, 1), ZERO_P, gaussian()),
        mk("below-n2-data0-j1", r(1, 4), 2, one, 1, r(0, 1), gaussian(), ZERO_P),
        mk("above-n3-data0-a0", r(3, 4), 3, one, 0, r(0, 1), gaussian(), ZERO_P),
        mk("above-n3-data1-a0", r(3, 4), 3, one, 0, r(0, 1), ZERO_P, gaussian()),
        mk("above-n3-data1-j1", r(3, 4), 3, one, 1, r(0, 1), ZERO_P, gaussian()),
        mk("half-n4-data0-j1", r(1, 2), 4, one, 1, r(0, 1), gaussian(), ZERO_P),
        mk("half-n1-data1-dimfree", r(1, 2), 1, one, 0, r(0, 1), ZERO_P, gaussian()),
        mk("half-n2-m2-data0-j1", r(1, 2), 2, two, 1, r(0, 1), l2_edge(2), ZERO_P),
        mk("half-n2-m2-data1-a1", r(1, 2), 2, two, 0, one, ZERO_P, l2_edge(2)),
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseReport {
    pub case_id: String,
    pub predicted: f64,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Run the full verification matrix in parallel.
pub fn run_decay_matrix(window: (f64, f64), tol: f64) -> Result<Vec<CaseReport>, AnalysisError> {
    builtin_decay_matrix()
        .par_iter()
        .map(|case| {
            let params = case.params()?;
            let (fit, pred, pass) =
                verify_linear_decay(&params, &case.data, case.j, case.a, window, tol)?;
            Ok(CaseReport {
                case_id: case.id.to_string(),
                predicted: predicted_slope(&pred, &case.data),
                measured: fit.slope,
                tolerance: tol,
                pass,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct LifespanCurve {
    pub eps_values: Vec<f64>,
    pub t_detect: Vec<f64>,
    pub fitted_slope: f64,
    pub predicted_slope: f64,
}

/// Frozen sweep geometry: a wide, nearly uniform positive bump keeps the
/// box dynamics in the mean-dominated regime where the lifespan scaling of
/// the whole-space theory is visible.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub half_length: f64,
    pub points: usize,
    pub bump_width: f64,
    pub dt: f64,
    pub horizon: f64,
    pub threshold_factor: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            half_length: 10.0,
            points: 256,
            bump_width: 8.0,
            dt: 0.01,
            horizon: 1e5,
            threshold_factor: 1e6,
        }
    }
}

/// Blow-up time as a function of data size: runs the integrator for each
/// eps and fits log t_detect against log eps.
pub fn lifespan_sweep(
    params: &ModelParams,
    kind: CouplingKind,
    eps_values: &[f64],
    cfg: &SweepConfig,
) -> Result<LifespanCurve, AnalysisError> {
    let verdict = blowup_condition(params)?;
    if !verdict.admissible {
        return Err(AnalysisError::BadSweep(format!(
            "(p, q) = ({}, {}) is outside the blow-up region for these orders",
            params.p, params.q
        )));
    }
    if params.n != 1 {
        return Err(AnalysisError::BadSweep(
            "lifespan sweeps are implemented on 1-D grids only".into(),
        ));
    }
    if eps_values.len() < 5 {
        return Err(AnalysisError::BadSweep(format!(
            "need at least 5 eps values, got {}",
            eps_values.len()
        )));
    }
    let lo = eps_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = eps_values.iter().cloned().fold(0.0f64, f64::max);
    if lo.is_nan() || lo <= 0.0 || hi / lo < 10.0 * (1.0 - 1e-9) {
        return Err(AnalysisError::BadSweep(
            "eps values must be positive and span at least one decade".into(),
        ));
    }
    let predicted = ratio_f64(lifespan_exponent(params)?);

    let grid = SpectralGrid::new(1, cfg.points, cfg.half_length)?;
    let xs = grid.axis_coords();
    let t_detect: Vec<f64> = eps_values
        .par_iter()
        .map(|&eps| {
            let bump: Vec<f64> = xs
                .iter()
                .map(|&x| {
                    let w = x / cfg.bump_width;
                    eps * (-w * w).exp()
                })
                .collect();
            let b = SpectralField::from_real(&grid, &bump)?;
            let zero = SpectralField::zero(&grid);
            let initial = SystemState::new(b.clone(), zero.clone(), b, zero)?;
            let threshold = cfg.threshold_factor / 1e6 * default_threshold(&initial);
            let opts = SimOptions::new(cfg.horizon, cfg.dt, threshold);
            let (_, report) = integrate(&initial, kind, params, &opts, &[(0, 0.0)])?;
            match report.t_detect {
                Some(t) if report.blew_up => Ok(t),
                _ => Err(AnalysisError::NoBlowupObserved {
                    eps,
                    horizon: cfg.horizon,
                }),
            }
        })
        .collect::<Result<_, _>>()?;

    let lx: Vec<f64> = eps_values.iter().map(|e| e.ln()).collect();
    let ly: Vec<f64> = t_detect.iter().map(|t| t.ln()).collect();
    let (fitted_slope, _, _) = ols(&lx, &ly);
    Ok(LifespanCurve {
        eps_values: eps_values.to_vec(),
        t_detect,
        fitted_slope,
        predicted_slope: predicted,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrigKind {
    Cos,
    Sin,
}

impl TrigKind {
    fn eval(self, x: f64) -> f64 {
        match self {
            TrigKind::Cos => x.cos(),
            TrigKind::Sin => x.sin(),
        }
    }
}

/// Decay exponent claimed for || F^{-1}(|xi|^a e^{-c1 |xi|^alpha t} trig(c2 |xi|^alpha t)) ||_{L^r}.
pub fn lr_scaling_prediction(a: f64, alpha: f64, r: LpExponent, n: u32) -> f64 {
    let inv_r = match r {
        LpExponent::Infinity => 0.0,
        LpExponent::Finite(r) => 1.0 / r,
    };
    -a / alpha - (n as f64 / alpha) * (1.0 - inv_r)
}

/// Radius beyond which e^{-c rho^alpha t} is below 1e-26.
fn decay_cutoff(c: f64, alpha: f64, t: f64) -> f64 {
    (60.0 / (c * t)).powf(1.0 / alpha)
}

/// Dyadic panel seeds from `hi` down to `lo`: wide panels can hide a
/// concentrated integrand between two Kronrod nodes, so no initial panel may
/// span more than one octave above the concentration scale.
fn octave_breaks(lo: f64, hi: f64) -> Vec<f64> {
    let mut v = Vec::new();
    let mut x = hi;
    while x > lo {
        x *= 0.5;
        v.push(x);
    }
    v
}

fn converge(
    f: impl Fn(f64) -> f64,
    hi: f64,
    breaks: &[f64],
    spec: &QuadSpec,
) -> Result<f64, AnalysisError> {
    let q = quad::integrate(&f, 0.0, hi, breaks, spec);
    if !q.converged {
        return Err(AnalysisError::Propagator(
            PropagatorError::QuadratureFailure {
                error: q.abs_error,
                intervals: q.intervals,
            },
        ));
    }
    Ok(q.value)
}

/// Measure the L^r norm decay of the oscillating kernel family.
///
/// Three evaluation routes: Plancherel radial quadrature for r = 2; the
/// exact nonnegative-symbol identity ||F^{-1} m||_inf = (2 pi)^{-n} Int m
/// for r = infinity with c2 = 0 and cosine; a periodic grid surrogate for
/// other exponents (1-D/2-D).
#[allow(clippy::too_many_arguments)]
pub fn kernel_lr_scaling(
    a: f64,
    alpha: f64,
    r: LpExponent,
    c1: f64,
    c2: f64,
    trig: TrigKind,
    n: u32,
    t_samples: &[f64],
) -> Result<SlopeFit, AnalysisError> {
    if !(a >= 0.0 && alpha > 0.0 && c1 > 0.0) {
        return Err(AnalysisError::Unsupported(
            "need a >= 0, alpha > 0, c1 > 0".into(),
        ));
    }
    if t_samples.len() < 8 {
        return Err(AnalysisError::InsufficientData(t_samples.len()));
    }
    let spec = QuadSpec::default();
    let nf = n as f64;
    let window = (
        t_samples.iter().cloned().fold(f64::INFINITY, f64::min),
        t_samples.iter().cloned().fold(0.0f64, f64::max),
    );

    let plancherel = |t: f64| -> Result<f64, AnalysisError> {
        let hi = decay_cutoff(2.0 * c1, alpha, t);
        let rc = (1.0 / (c1 * t)).powf(1.0 / alpha);
        let f = |rho: f64| {
            let arg = rho.powf(alpha) * t;
            let tv = trig.eval(c2 * arg);
            rho.powf(nf - 1.0 + 2.0 * a) * (-2.0 * c1 * arg).exp() * tv * tv
        };
        let v = converge(f, hi, &octave_breaks(0.25 * rc, hi), &spec)?;
        Ok(((2.0 * PI).powf(-nf) * sphere_area(n) * v).sqrt())
    };
    let exact_sup = |t: f64| -> Result<f64, AnalysisError> {
        let hi = decay_cutoff(c1, alpha, t);
        let rc = (1.0 / (c1 * t)).powf(1.0 / alpha);
        let f = |rho: f64| rho.powf(nf - 1.0 + a) * (-c1 * rho.powf(alpha) * t).exp();
        let v = converge(f, hi, &octave_breaks(0.25 * rc, hi), &spec)?;
        Ok((2.0 * PI).powf(-nf) * sphere_area(n) * v)
    };

    // float patterns are deprecated syntax, so the guard form stays
    #[allow(clippy::redundant_guards)]
    let values: Vec<f64> = match r {
        LpExponent::Finite(rf) if rf == 2.0 => t_samples
            .iter()
            .map(|&t| plancherel(t))
            .collect::<Result<_, _>>()?,
        LpExponent::Infinity if c2 == 0.0 && trig == TrigKind::Cos => t_samples
            .iter()
            .map(|&t| exact_sup(t))
            .collect::<Result<_, _>>()?,
        _ => {
            // periodic surrogate: sample the symbol on a box large enough to
            // hold the spreading kernel and resolve its shrinking spectrum
            if n > 2 {
                return Err(AnalysisError::Unsupported(
                    "grid route supports 1-D and 2-D only".into(),
                ));
            }
            let half_length = 8.0 * PI * (c1 * window.1).powf(1.0 / alpha);
            let rho_max = decay_cutoff(c1, alpha, window.0);
            let need = (2.0 * half_length * rho_max / PI).ceil() as usize;
            let size = need.next_power_of_two().max(16);
            if size > MAX_POINTS_PER_AXIS[(n - 1) as usize] {
                return Err(AnalysisError::Unsupported(format!(
                    "t range needs {size} points per axis, over the grid cap"
                )));
            }
            let grid = SpectralGrid::new(n as usize, size, half_length)?;
            let scale = 1.0 / grid.volume();
            let mut out = Vec::with_capacity(t_samples.len());
            for &t in t_samples {
                let coeffs: Vec<Complex64> = grid
                    .xi_mag()
                    .iter()
                    .map(|&rho| {
                        let head = if rho == 0.0 {
                            if a == 0.0 {
                                1.0
                            } else {
                                0.0
                            }
                        } else {
                            rho.powf(a)
                        };
                        let arg = rho.powf(alpha) * t;
                        Complex64::new(
                            scale * head * (-c1 * arg).exp() * trig.eval(c2 * arg),
                            0.0,
                        )
                    })
                    .collect();
                let field = SpectralField::from_coeffs(&grid, coeffs)?;
                out.push(lr_norm(&field, r)?);
            }
            out
        }
    };
    fit_decay(t_samples, &values, window)
}

/// Fitted decay of Int_{|xi| <= 1} |xi|^beta e^{-c |xi|^alpha t} d xi.
pub fn small_freq_integral(
    beta: f64,
    alpha: f64,
    c: f64,
    n: u32,
    t_samples: &[f64],
) -> Result<SlopeFit, AnalysisError> {
    let nf = n as f64;
    if !(nf + beta > 0.0 && alpha > 0.0 && c > 0.0) {
        return Err(AnalysisError::Unsupported(
            "need n + beta > 0, alpha > 0, c > 0".into(),
        ));
    }
    if t_samples.len() < 8 {
        return Err(AnalysisError::InsufficientData(t_samples.len()));
    }
    let spec = QuadSpec::default();
    let area = sphere_area(n);
    // for n + beta < 1 the weight rho^{n-1+beta} is singular at the origin;
    // rho = u^{1/(n+beta)} flattens it to a smooth integrand on [0, 1]
    let gamma = if nf + beta < 1.0 {
        1.0 / (nf + beta)
    } else {
        1.0
    };
    let values: Vec<f64> = t_samples
        .iter()
        .map(|&t| {
            let rc = (1.0 / (c * t)).powf(1.0 / alpha).min(0.5).powf(1.0 / gamma);
            let f = |u: f64| {
                gamma
                    * u.powf(gamma * (nf + beta) - 1.0)
                    * (-c * u.powf(gamma * alpha) * t).exp()
            };
            converge(f, 1.0, &octave_breaks(0.25 * rc, 1.0), &spec).map(|v| area * v)
        })
        .collect::<Result<_, _>>()?;
    let window = (
        t_samples.iter().cloned().fold(f64::INFINITY, f64::min),
        t_samples.iter().cloned().fold(0.0f64, f64::max),
    );
    fit_decay(t_samples, &values, window)
}

/// One auxiliary-estimate verification case with its pass semantics:
/// two-sided cases must match the predicted slope, one-sided cases must
/// not decay slower than predicted (the estimates are upper bounds).
struct LemmaCase {
    id: &'static str,
    predicted: f64,
    tolerance: f64,
    two_sided: bool,
    run: Box<dyn Fn() -> Result<SlopeFit, AnalysisError> + Sync + Send>,
}

fn builtin_lemma_cases() -> Vec<LemmaCase> {
    let mut cases: Vec<LemmaCase> = Vec::new();
    cases.push(LemmaCase {
        id: "kernel-cos-r2",
        predicted: lr_scaling_prediction(0.0, 1.0, LpExponent::Finite(2.0), 1),
        tolerance: 0.05,
        two_sided: true,
        run: Box::new(|| {
            kernel_lr_scaling(
                0.0,
                1.0,
                LpExponent::Finite(2.0),
                1.0,
                1.0,
                TrigKind::Cos,
                1,
                &geomspace(1e2, 1e4, 17),
            )
        }),
    });
    cases.push(LemmaCase {
        id: "kernel-sin-a1-r2",
        predicted: lr_scaling_prediction(1.0, 2.0, LpExponent::Finite(2.0), 1),
        tolerance: 0.05,
        two_sided: false,
        run: Box::new(|| {
            kernel_lr_scaling(
                1.0,
                2.0,
                LpExponent::Finite(2.0),
                1.0,
                1.0,
                TrigKind::Sin,
                1,
                &geomspace(1e2, 1e4, 17),
            )
        }),
    });
    cases.push(LemmaCase {
        id: "kernel-exact-rinf",
        predicted: lr_scaling_prediction(0.0, 2.0, LpExponent::Infinity, 1),
        tolerance: 1e-3,
        two_sided: true,
        run: Box::new(|| {
            kernel_lr_scaling(
                0.0,
                2.0,
                LpExponent::Infinity,
                1.0,
                0.0,
                TrigKind::Cos,
                1,
                &geomspace(1e3, 1e6, 17),
            )
        }),
    });
    cases.push(LemmaCase {
        id: "kernel-grid-r1",
        predicted: lr_scaling_prediction(0.0, 2.0, LpExponent::Finite(1.0), 1),
        tolerance: 0.05,
        two_sided: false,
        run: Box::new(|| {
            kernel_lr_scaling(
                0.0,
                2.0,
                LpExponent::Finite(1.0),
                1.0,
                0.5,
                TrigKind::Cos,
                1,
                &geomspace(10.0, 300.0, 12),
            )
        }),
    });
    let sf = [
        ("smallfreq-n1-b0", 0.0, 2.0, 1.0, 1u32, -0.5),
        ("smallfreq-n1-bneg", -0.5, 1.0, 1.0, 1, -0.5),
        ("smallfreq-n2-b1", 1.0, 2.0, 2.0, 2, -1.5),
        ("smallfreq-n3-b0", 0.0, 1.0, 1.0, 3, -3.0),
    ];
    for (id, beta, alpha, c, n, predicted) in sf {
        cases.push(LemmaCase {
            id,
            predicted,
            tolerance: 0.02,
            two_sided: true,
            run: Box::new(move || {
                small_freq_integral(beta, alpha, c, n, &geomspace(1e2, 1e5, 17))
            }),
        });
    }
    cases
}

/// Run all auxiliary-estimate checks in parallel.
pub fn run_lemma_checks() -> Result<Vec<CaseReport>, AnalysisError> {
    builtin_lemma_cases()
        .par_iter()
        .map(|case| {
            let fit = (case.run)()?;
            let pass = if case.two_sided {
                (fit.slope - case.predicted).abs() <= case.tolerance
            } else {
                fit.slope <= case.predicted + case.tolerance
            };
            Ok(CaseReport {
                case_id: case.id.to_string(),
                predicted: case.predicted,
                measured: fit.slope,
                tolerance: case.tolerance,
                pass,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct GnCheckReport {
    pub theta: f64,
    pub worst_ratio: f64,
    pub samples: usize,
}

/// Interpolation-inequality check on the L^2 scale, where
/// ||u||_{H-dot^s} <= ||u||_{L^2}^{1-theta} ||u||_{H-dot^sigma}^theta with
/// theta = s/sigma holds with constant exactly 1 by Hoelder in frequency.
/// Returns the worst ratio over random band-limited real fields.
#[allow(clippy::too_many_arguments)]
pub fn gn_check(
    p_out: f64,
    p0: f64,
    p1: f64,
    s: f64,
    sigma_reg: f64,
    n: u32,
    samples: usize,
    seed: u64,
) -> Result<GnCheckReport, AnalysisError> {
    if sigma_reg.is_nan() || sigma_reg <= 0.0 || s < 0.0 {
        return Err(AnalysisError::Unsupported(
            "need 0 <= s and 0 < sigma".into(),
        ));
    }
    let nf = n as f64;
    let denom = 1.0 / p0 - 1.0 / p1 + sigma_reg / nf;
    let theta = (1.0 / p0 - 1.0 / p_out + s / nf) / denom;
    let lo = s / sigma_reg;
    if !(theta >= lo - 1e-12 && theta <= 1.0 + 1e-12) {
        return Err(AnalysisError::ThetaOutOfRange { theta, lo });
    }
    if p_out != 2.0 || p0 != 2.0 || p1 != 2.0 {
        return Err(AnalysisError::Unsupported(
            "norms are evaluated on the p = p0 = p1 = 2 scale only".into(),
        ));
    }
    let size = match n {
        1 => 128,
        2 => 32,
        3 => 16,
        _ => {
            return Err(AnalysisError::Unsupported(format!(
                "dimension {n} not supported"
            )))
        }
    };
    let grid = SpectralGrid::new(n as usize, size, PI)?;
    let keep = grid.dealias_mask();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut gauss = move || {
        let u1: f64 = rng.random::<f64>().max(1e-16);
        let u2: f64 = rng.random::<f64>();
        (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
    };
    let mut worst = 0.0f64;
    let mut done = 0usize;
    while done < samples {
        let noise: Vec<f64> = (0..grid.len()).map(|_| gauss()).collect();
        let mut f = SpectralField::from_real(&grid, &noise)?;
        for (c, &k) in f.coeffs_mut().iter_mut().zip(keep.iter()) {
            if !k {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        let l2 = sobolev_norm(&f, 0.0, true);
        let hsig = sobolev_norm(&f, sigma_reg, true);
        if !(l2 > 0.0 && hsig > 0.0) {
            continue;
        }
        let hs = sobolev_norm(&f, s, true);
        let ratio = hs / (l2.powf(1.0 - theta) * hsig.powf(theta));
        if !ratio.is_finite() {
            return Err(AnalysisError::Unsupported(
                "non-finite interpolation ratio".into(),
            ));
        }
        worst = worst.max(ratio);
        done += 1;
    }
    Ok(GnCheckReport {
        theta,
        worst_ratio: worst,
        samples: done,
    })
}
