//! Exact mode-wise propagator for the linear equation
//! w_tt + (-Delta)^sigma w + (-Delta)^delta w_t = 0.
//!
//! At frequency xi with rho = |xi| the modal ODE has characteristic roots
//! lambda^2 + rho^{2 delta} lambda + rho^{2 sigma} = 0, and the solution is
//! w-hat(t) = K0(t, rho) w0-hat + K1(t, rho) w1-hat with
//!
//!   K0 = (lambda1 e^{lambda2 t} - lambda2 e^{lambda1 t}) / (lambda1 - lambda2),
//!   K1 = (e^{lambda1 t} - e^{lambda2 t}) / (lambda1 - lambda2).
//!
//! Time derivatives follow algebraically from the ODE and Vieta:
//! dK0/dt = -rho^{2 sigma} K1 and dK1/dt = K0 - rho^{2 delta} K1, which we
//! use verbatim instead of differentiating the quotient forms.

use crate::model::{ratio_f64, ModelParams};
use crate::quad::{self, QuadSpec};
use crate::spectral::{SpectralError, SpectralField};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PropagatorError {
    #[error(transparent)]
    Grid(#[from] SpectralError),
    #[error(
        "radial quadrature did not converge: error estimate {error:.3e} after {intervals} panels"
    )]
    QuadratureFailure { error: f64, intervals: usize },
}

/// Roots of lambda^2 + rho^{2 delta} lambda + rho^{2 sigma} = 0.
/// `lambda1` carries the +sqrt branch (the slower-decaying root when the
/// discriminant is positive); both real parts are always <= 0.
#[derive(Debug, Clone, Copy)]
pub struct RootPair {
    pub lambda1: Complex64,
    pub lambda2: Complex64,
    /// rho^{4 delta} - 4 rho^{2 sigma}, kept in real arithmetic.
    pub discriminant: f64,
    pub degenerate: bool,
}

fn symbols(xi_mag: f64, params: &ModelParams) -> (f64, f64) {
    let sigma = ratio_f64(params.sigma);
    let delta = ratio_f64(params.delta);
    (xi_mag.powf(2.0 * delta), xi_mag.powf(2.0 * sigma))
}

/// Relative width of the near-double-root band around discriminant zero.
const DEGENERACY_REL: f64 = 1e-12;

fn roots_from_symbols(damp: f64, elastic: f64) -> RootPair {
    let disc = damp * damp - 4.0 * elastic;
    let scale = (damp * damp).max(4.0 * elastic);
    if disc.abs() <= DEGENERACY_REL * scale {
        let lam = Complex64::new(-0.5 * damp, 0.0);
        return RootPair {
            lambda1: lam,
            lambda2: lam,
            discriminant: disc,
            degenerate: true,
        };
    }
    if disc > 0.0 {
        // -damp + sqrt(disc) cancels badly when damp^2 >> 4 elastic, so take
        // the large root by same-sign addition and recover the small one from
        // the product lambda1 lambda2 = elastic.
        let r = disc.sqrt();
        let big = -0.5 * (damp + r);
        RootPair {
            lambda1: Complex64::new(elastic / big, 0.0),
            lambda2: Complex64::new(big, 0.0),
            discriminant: disc,
            degenerate: false,
        }
    } else {
        let r = (-disc).sqrt();
        RootPair {
            lambda1: Complex64::new(-0.5 * damp, 0.5 * r),
            lambda2: Complex64::new(-0.5 * damp, -0.5 * r),
            discriminant: disc,
            degenerate: false,
        }
    }
}

pub fn char_roots(xi_mag: f64, params: &ModelParams) -> RootPair {
    let (damp, elastic) = symbols(xi_mag, params);
    roots_from_symbols(damp, elastic)
}

/// Fundamental kernel values and their time derivatives at one frequency.
/// The kernels are real for real data; the complex type only carries the
/// intermediate arithmetic, so imaginary parts are roundoff-sized.
#[derive(Debug, Clone, Copy)]
pub struct KernelValues {
    pub k0: Complex64,
    pub k1: Complex64,
    pub dt_k0: Complex64,
    pub dt_k1: Complex64,
}

/// Below |lambda1 - lambda2| t = SERIES_CUT the quotient forms lose digits
/// to cancellation and a 3-term sinh(z)/z series is exact to machine eps.
const SERIES_CUT: f64 = 1e-6;

fn kernels_from_symbols(t: f64, damp: f64, elastic: f64) -> KernelValues {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    if t == 0.0 {
        return KernelValues {
            k0: one,
            k1: zero,
            dt_k0: zero,
            dt_k1: one,
        };
    }
    let roots = roots_from_symbols(damp, elastic);
    let (k0, k1);
    if roots.degenerate {
        let lam = roots.lambda1;
        let e = (lam * t).exp();
        k1 = e * t;
        k0 = e * (one - lam * t);
    } else {
        let l1 = roots.lambda1;
        let l2 = roots.lambda2;
        let diff = l1 - l2;
        if diff.norm() * t < SERIES_CUT {
            let mean = (l1 + l2) * 0.5;
            let z = diff * (0.5 * t);
            let z2 = z * z;
            let sinhc = one + z2 / 6.0 + z2 * z2 / 120.0;
            let coshz = one + z2 / 2.0 + z2 * z2 / 24.0;
            let e = (mean * t).exp();
            k1 = e * t * sinhc;
            k0 = e * (coshz - mean * t * sinhc);
        } else {
            let e1 = (l1 * t).exp();
            let e2 = (l2 * t).exp();
            k1 = (e1 - e2) / diff;
            k0 = (l1 * e2 - l2 * e1) / diff;
        }
    }
    KernelValues {
        k0,
        k1,
        dt_k0: -k1 * elastic,
        dt_k1: k0 - k1 * damp,
    }
}

pub fn kernels(t: f64, xi_mag: f64, params: &ModelParams) -> KernelValues {
    let (damp, elastic) = symbols(xi_mag, params);
    kernels_from_symbols(t, damp, elastic)
}

/// Apply the exact linear flow for time `t` to initial data (w0, w1).
/// Returns (w(t), w_t(t)).  Kernel values enter through their real parts,
/// which keeps Hermitian symmetry of the coefficients exact.
pub fn evolve_linear(
    w0: &SpectralField,
    w1: &SpectralField,
    t: f64,
    params: &ModelParams,
) -> Result<(SpectralField, SpectralField), PropagatorError> {
    if !w0.grid().compatible(w1.grid()) {
        return Err(SpectralError::GridMismatch.into());
    }
    let grid = w0.grid();
    let sigma = ratio_f64(params.sigma);
    let delta = ratio_f64(params.delta);
    let pairs: Vec<(Complex64, Complex64)> = grid
        .xi_mag()
        .par_iter()
        .zip(w0.coeffs().par_iter().zip(w1.coeffs().par_iter()))
        .map(|(&rho, (&c0, &c1))| {
            let damp = rho.powf(2.0 * delta);
            let elastic = rho.powf(2.0 * sigma);
            let k = kernels_from_symbols(t, damp, elastic);
            (
                c0 * k.k0.re + c1 * k.k1.re,
                c0 * k.dt_k0.re + c1 * k.dt_k1.re,
            )
        })
        .collect();
    let mut w = SpectralField::zero(grid);
    let mut wt = SpectralField::zero(grid);
    for (i, (a, b)) in pairs.into_iter().enumerate() {
        w.coeffs_mut()[i] = a;
        wt.coeffs_mut()[i] = b;
    }
    Ok((w, wt))
}

/// Radial spectral profile of initial data, given directly in frequency
/// space as a function of rho = |xi|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialProfile {
    Zero,
    /// amplitude * exp(-rho^2); nonzero at rho = 0, modeling data with mass.
    Gaussian { amplitude: f64 },
    /// amplitude * rho^power * exp(-rho^2); power > 0 models oscillating-mean
    /// data, negative powers concentrate spectrum at small frequencies.
    PowerGaussian { amplitude: f64, power: f64 },
}

impl RadialProfile {
    pub fn eval(&self, rho: f64) -> f64 {
        match *self {
            RadialProfile::Zero => 0.0,
            RadialProfile::Gaussian { amplitude } => amplitude * (-rho * rho).exp(),
            RadialProfile::PowerGaussian { amplitude, power } => {
                amplitude * rho.powf(power) * (-rho * rho).exp()
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, RadialProfile::Zero)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RadialData {
    pub w0: RadialProfile,
    pub w1: RadialProfile,
}

/// Surface measure of the unit sphere S^{n-1}.
pub(crate) fn sphere_area(n: u32) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half_integer(n)
}

/// Gamma(n/2) for integer n >= 1 by the recurrence from Gamma(1/2), Gamma(1).
fn gamma_half_integer(n: u32) -> f64 {
    let mut x = if n % 2 == 1 { 0.5 } else { 1.0 };
    let mut g = if n % 2 == 1 { PI.sqrt() } else { 1.0 };
    while 2.0 * x < n as f64 {
        g *= x;
        x += 1.0;
    }
    g
}

/// Radius where the discriminant changes sign, if any: rho^{4 delta - 2 sigma} = 4.
fn degenerate_radius(params: &ModelParams) -> Option<f64> {
    let expo = 4.0 * ratio_f64(params.delta) - 2.0 * ratio_f64(params.sigma);
    if expo == 0.0 {
        None
    } else {
        Some(4.0f64.powf(1.0 / expo))
    }
}

/// Spectrum beyond this radius is negligible for the Gaussian-type profiles.
const RADIAL_CUTOFF: f64 = 30.0;

/// L^2-type norm of the evolved radial solution:
///   || |D|^a d_t^j w(t) ||^2
///     = (2 pi)^{-n} omega_{n-1} Int_0^inf rho^{n-1+2a} |d_t^j w-hat(t,rho)|^2 drho,
/// with omega_{n-1} the sphere area.  Data profiles decay like exp(-rho^2),
/// so truncation at RADIAL_CUTOFF is far below the quadrature tolerance.
pub fn radial_norm(
    data: &RadialData,
    t: f64,
    j: u8,
    a: f64,
    params: &ModelParams,
    spec: &QuadSpec,
) -> Result<f64, PropagatorError> {
    let n = params.n as f64;
    let sigma = ratio_f64(params.sigma);
    let delta = ratio_f64(params.delta);
    let k_plus = (2.0 * delta).max(sigma);
    let integrand = |rho: f64| {
        let damp = rho.powf(2.0 * delta);
        let elastic = rho.powf(2.0 * sigma);
        let k = kernels_from_symbols(t, damp, elastic);
        let w0 = data.w0.eval(rho);
        let w1 = data.w1.eval(rho);
        let amp = if j == 0 {
            k.k0.re * w0 + k.k1.re * w1
        } else {
            k.dt_k0.re * w0 + k.dt_k1.re * w1
        };
        rho.powf(n - 1.0 + 2.0 * a) * amp * amp
    };
    // Seed the subdivision at the structure scales: the real/complex root
    // crossover, rho = 1, and the time-dependent concentration radii
    // (1+t)^{-1/alpha} for each decay scale alpha.
    let mut breaks = vec![1.0];
    if let Some(rd) = degenerate_radius(params) {
        breaks.push(rd);
    }
    let mut lo = 1.0f64;
    for alpha in [2.0 * (k_plus - delta), 2.0 * delta, sigma] {
        if alpha > 0.0 {
            let rc = (1.0 + t).powf(-1.0 / alpha);
            breaks.push(rc);
            lo = lo.min(rc);
        }
    }
    // Octave ladder down to the smallest concentration radius: a panel many
    // octaves wide can hold the whole surviving spectrum between two Kronrod
    // nodes and alias to zero without tripping the error estimate.
    let mut x = RADIAL_CUTOFF;
    while x > lo {
        x *= 0.5;
        breaks.push(x);
    }
    let q = quad::integrate(integrand, 0.0, RADIAL_CUTOFF, &breaks, spec);
    if !q.converged {
        return Err(PropagatorError::QuadratureFailure {
            error: q.abs_error,
            intervals: q.intervals,
        });
    }
    let norm_sq = (2.0 * PI).powf(-n) * sphere_area(params.n) * q.value;
    Ok(norm_sq.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rat;
    use crate::spectral::SpectralGrid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn params(sigma: (i64, i64), delta: (i64, i64), n: u32) -> ModelParams {
        ModelParams::new(
            rat(sigma.0, sigma.1),
            rat(delta.0, delta.1),
            n,
            rat(2, 1),
            rat(2, 1),
            rat(1, 1),
        )
        .unwrap()
    }

    #[test]
    fn root_branches_and_vieta() {
        let pr = params((1, 1), (1, 4), 1);
        // below the crossover radius 1/4: real distinct roots
        let r = char_roots(0.125, &pr);
        assert!(!r.degenerate && r.discriminant > 0.0);
        assert!(r.lambda1.im == 0.0 && r.lambda2.im == 0.0);
        assert!(r.lambda2.re < r.lambda1.re && r.lambda1.re < 0.0);
        // above: conjugate pair
        let c = char_roots(1.0, &pr);
        assert!(!c.degenerate && c.discriminant < 0.0);
        assert!((c.lambda1.conj() - c.lambda2).norm() < 1e-15);
        // at the crossover: double root -rho^{2 delta}/2 = -1/4
        let d = char_roots(0.25, &pr);
        assert!(d.degenerate);
        assert!((d.lambda1.re + 0.25).abs() < 1e-13 && d.lambda1.im == 0.0);
        // Vieta on all three branches
        for rho in [0.05, 0.125, 0.25, 0.7, 1.0, 3.0] {
            let r = char_roots(rho, &pr);
            let sum = r.lambda1 + r.lambda2;
            let prod = r.lambda1 * r.lambda2;
            let damp = rho.powf(0.5);
            let elastic = rho * rho;
            let tol = if r.degenerate { 1e-10 } else { 1e-12 };
            assert!((sum.re + damp).abs() <= tol * damp.max(1.0), "rho {rho}");
            assert!(sum.im.abs() <= tol);
            assert!((prod.re - elastic).abs() <= tol * elastic.max(1.0));
            assert!(prod.im.abs() <= tol * elastic.max(1.0));
        }
        // real parts never positive
        for rho in [0.0, 1e-6, 0.2, 1.0, 10.0] {
            let r = char_roots(rho, &params((3, 2), (1, 8), 1));
            assert!(r.lambda1.re <= 0.0 && r.lambda2.re <= 0.0);
        }
    }

    #[test]
    fn kernel_values_at_origin_and_time_zero() {
        let pr = params((1, 1), (1, 2), 1);
        let k = kernels(0.0, 2.7, &pr);
        assert_eq!((k.k0.re, k.k1.re, k.dt_k0.re, k.dt_k1.re), (1.0, 0.0, 0.0, 1.0));
        let k = kernels(5.0, 0.0, &pr);
        assert_eq!((k.k0.re, k.k1.re, k.dt_k0.re, k.dt_k1.re), (1.0, 5.0, 0.0, 1.0));
    }

    #[test]
    #[allow(clippy::excessive_precision)] // frozen reference digits
    fn kernel_oscillatory_golden_values() {
        // sigma = 1, delta = 1/2, rho = 1, t = 1: conjugate roots
        // (-1 +- i sqrt(3))/2; closed form gives these reference values.
        let pr = params((1, 1), (1, 2), 1);
        let k = kernels(1.0, 1.0, &pr);
        assert!((k.k1.re - 0.53350719511469298).abs() < 1e-14);
        assert!((k.k0.re - 0.65970015339170166).abs() < 1e-14);
        assert!((k.dt_k1.re - 0.12619295827700868).abs() < 1e-14);
        assert!((k.dt_k0.re + 0.53350719511469298).abs() < 1e-14);
        assert!(k.k0.im.abs() < 1e-15 && k.k1.im.abs() < 1e-15);
    }

    #[test]
    #[allow(clippy::excessive_precision)] // frozen reference digits
    fn kernel_degenerate_golden_values() {
        // sigma = 1, delta = 1/4, rho = 1/4 is exactly the double root
        // lambda = -1/4: K1 = t e^{lambda t}, K0 = (1 - lambda t) e^{lambda t}.
        let pr = params((1, 1), (1, 4), 1);
        let k = kernels(1.0, 0.25, &pr);
        let e = (-0.25f64).exp();
        assert!((k.k1.re - e).abs() < 1e-14);
        assert!((k.k0.re - 1.25 * e).abs() < 1e-14);
        assert!((k.k1.re - 0.77880078307140487).abs() < 1e-14);
    }

    #[test]
    fn half_delta_closed_form_matches_generic() {
        // delta = sigma/2: lambda = rho^sigma(-1 +- i sqrt(3))/2 for rho > 0, so
        //   K0 = e^{-rho^sigma t/2} (cos(w) + sin(w)/sqrt(3)),  w = sqrt(3) rho^sigma t / 2
        //   K1 = 2 e^{-rho^sigma t/2} sin(w) / (sqrt(3) rho^sigma)
        for (s_num, s_den) in [(1i64, 1i64), (3, 2), (2, 1)] {
            let pr = params((s_num, s_den), (s_num, 2 * s_den), 1);
            let sf = s_num as f64 / s_den as f64;
            for rho in [0.1, 0.5, 1.0, 2.0, 5.0] {
                for t in [0.3, 1.0, 7.0] {
                    let k = kernels(t, rho, &pr);
                    let rs = rho.powf(sf);
                    let w = 3.0f64.sqrt() * rs * t / 2.0;
                    let damp = (-rs * t / 2.0).exp();
                    let k0_ref = damp * (w.cos() + w.sin() / 3.0f64.sqrt());
                    let k1_ref = 2.0 * damp * w.sin() / (3.0f64.sqrt() * rs);
                    let scale = k0_ref.abs().max(k1_ref.abs()).max(1e-3);
                    assert!((k.k0.re - k0_ref).abs() <= 1e-12 * scale, "rho {rho} t {t}");
                    assert!((k.k1.re - k1_ref).abs() <= 1e-12 * scale, "rho {rho} t {t}");
                }
            }
        }
    }

    #[test]
    fn kernels_continuous_across_degeneracy() {
        let pr = params((1, 1), (1, 4), 1);
        let rd = degenerate_radius(&pr).unwrap();
        assert!((rd - 0.25).abs() < 1e-15);
        for t in [0.5, 1.0, 4.0] {
            let lo = kernels(t, rd * (1.0 - 1e-9), &pr);
            let mid = kernels(t, rd, &pr);
            let hi = kernels(t, rd * (1.0 + 1e-9), &pr);
            for (a, b) in [(lo.k0, mid.k0), (mid.k0, hi.k0), (lo.k1, mid.k1), (mid.k1, hi.k1)] {
                assert!((a - b).norm() < 1e-8, "t {t}");
            }
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let pr = params((3, 2), (1, 8), 2);
        let h = 1e-6;
        for rho in [0.3, 1.0, 2.7] {
            for t in [0.5, 2.0] {
                let k = kernels(t, rho, &pr);
                let kp = kernels(t + h, rho, &pr);
                let km = kernels(t - h, rho, &pr);
                let fd0 = (kp.k0.re - km.k0.re) / (2.0 * h);
                let fd1 = (kp.k1.re - km.k1.re) / (2.0 * h);
                let s0 = k.dt_k0.re.abs().max(1e-3);
                let s1 = k.dt_k1.re.abs().max(1e-3);
                assert!((fd0 - k.dt_k0.re).abs() <= 1e-5 * s0, "rho {rho} t {t}");
                assert!((fd1 - k.dt_k1.re).abs() <= 1e-5 * s1, "rho {rho} t {t}");
            }
        }
    }

    #[test]
    fn kernels_stay_bounded() {
        for (s, d) in [((1, 1), (1, 4)), ((1, 1), (1, 2)), ((1, 1), (3, 4)), ((2, 1), (1, 1))] {
            let pr = params(s, d, 1);
            let sf = s.0 as f64 / s.1 as f64;
            for i in 0..40 {
                let rho = 1e-3 * (10.0f64 / 1e-3).powf(i as f64 / 39.0);
                for t in [0.0, 0.1, 1.0, 5.0] {
                    let k = kernels(t, rho, &pr);
                    assert!(k.k0.norm() <= 10.0, "k0 at rho {rho} t {t}");
                    assert!(rho.powf(sf) * k.k1.norm() <= 10.0, "k1 at rho {rho} t {t}");
                }
            }
        }
    }

    #[test]
    fn evolve_linear_semigroup_property() {
        let pr = params((1, 1), (1, 4), 1);
        let grid = SpectralGrid::new(1, 64, 10.0).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let s0: Vec<f64> = (0..grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let s1: Vec<f64> = (0..grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let w0 = SpectralField::from_real(&grid, &s0).unwrap();
        let w1 = SpectralField::from_real(&grid, &s1).unwrap();
        let (a, at) = evolve_linear(&w0, &w1, 0.7, &pr).unwrap();
        let (b, bt) = evolve_linear(&a, &at, 1.3, &pr).unwrap();
        let (c, ct) = evolve_linear(&w0, &w1, 2.0, &pr).unwrap();
        let scale: f64 = c.coeffs().iter().map(|v| v.norm()).fold(0.0, f64::max);
        for i in 0..grid.len() {
            assert!((b.coeffs()[i] - c.coeffs()[i]).norm() <= 1e-9 * scale.max(1.0));
            assert!((bt.coeffs()[i] - ct.coeffs()[i]).norm() <= 1e-9 * scale.max(1.0));
        }
        let mismatched = SpectralField::zero(&SpectralGrid::new(1, 32, 10.0).unwrap());
        assert!(matches!(
            evolve_linear(&w0, &mismatched, 1.0, &pr),
            Err(PropagatorError::Grid(SpectralError::GridMismatch))
        ));
    }

    #[test]
    fn radial_norm_gaussian_at_time_zero() {
        // n = 1, a = 0, j = 0, w-hat = e^{-rho^2}:
        // norm^2 = (2 pi)^{-1} * 2 * Int e^{-2 rho^2} = 1/(2 sqrt(2 pi... )),
        // frozen reference 0.4466219208690012.
        let pr = params((1, 1), (1, 2), 1);
        let data = RadialData {
            w0: RadialProfile::Gaussian { amplitude: 1.0 },
            w1: RadialProfile::Zero,
        };
        let v = radial_norm(&data, 0.0, 0, 0.0, &pr, &QuadSpec::default()).unwrap();
        assert!((v - 0.4466219208690012).abs() < 1e-10);
    }

    #[test]
    fn radial_norm_decays_at_expected_rate() {
        // sigma = 1, delta = 1/2, n = 3, data1 Gaussian: L^2 decay (1+t)^{-1/2}.
        let pr = params((1, 1), (1, 2), 3);
        let data = RadialData {
            w0: RadialProfile::Zero,
            w1: RadialProfile::Gaussian { amplitude: 1.0 },
        };
        let spec = QuadSpec::default();
        let t0 = 100.0;
        let t1 = 1000.0;
        let n0 = radial_norm(&data, t0, 0, 0.0, &pr, &spec).unwrap();
        let n1 = radial_norm(&data, t1, 0, 0.0, &pr, &spec).unwrap();
        let slope = (n1 / n0).ln() / ((1.0 + t1) / (1.0 + t0)).ln();
        assert!((slope + 0.5).abs() < 0.05, "slope {slope}");
    }

    #[test]
    fn radial_norm_reports_quadrature_failure() {
        let pr = params((1, 1), (1, 2), 1);
        let data = RadialData {
            w0: RadialProfile::Gaussian { amplitude: 1.0 },
            w1: RadialProfile::Zero,
        };
        let starved = QuadSpec {
            rel_tol: 1e-14,
            abs_tol: 0.0,
            max_intervals: 2,
        };
        assert!(matches!(
            radial_norm(&data, 10.0, 0, 0.0, &pr, &starved),
            Err(PropagatorError::QuadratureFailure { .. })
        ));
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(1) - 2.0).abs() < 1e-14);
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
    }
}
