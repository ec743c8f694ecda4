//! Periodic pseudospectral discretization on the box [-L, L)^n.
//!
//! Fields are stored as canonical Fourier coefficients c_k with respect to
//! the modes e^{i xi_k . x}, xi_k = (pi/L) ktilde, where ktilde runs over
//! {0, ..., N/2-1, -N/2, ..., -1} per axis in standard FFT order.  With the
//! grid points x_j = -L + 2Lj/N the relation to the unnormalized DFT is
//!
//!   c_k = (1/N^n) (-1)^{sum_a k_a} DFT(f)_k,
//!
//! valid because N is even, so (-1)^{ktilde} = (-1)^{array index}.  All
//! norm routines below are exact for trigonometric polynomials on the grid.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;
use thiserror::Error;

pub mod io;

/// Largest supported points-per-axis for each dimension (memory guard).
pub const MAX_POINTS_PER_AXIS: [usize; 3] = [4096, 512, 128];

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("grid dimension must be 1, 2 or 3, got {0}")]
    BadDimension(usize),
    #[error("points per axis must be an even integer in [2, {max}], got {got}")]
    BadSize { got: usize, max: usize },
    #[error("half length must be positive and finite, got {0}")]
    BadHalfLength(f64),
    #[error("buffer length {got} does not match grid volume {want}")]
    LengthMismatch { got: usize, want: usize },
    #[error("operands live on different grids")]
    GridMismatch,
    #[error("L^r exponent must satisfy r >= 1, got {0}")]
    BadLpExponent(f64),
}

/// Shared discretization: geometry, frequency tables and cached FFT plans.
pub struct SpectralGrid {
    dim: usize,
    size: usize,
    half_length: f64,
    len: usize,
    xi_axis: Vec<f64>,
    xi_mag: Vec<f64>,
    sign: Vec<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralGrid")
            .field("dim", &self.dim)
            .field("size", &self.size)
            .field("half_length", &self.half_length)
            .finish()
    }
}

impl SpectralGrid {
    pub fn new(dim: usize, size: usize, half_length: f64) -> Result<Arc<Self>, SpectralError> {
        if !(1..=3).contains(&dim) {
            return Err(SpectralError::BadDimension(dim));
        }
        let max = MAX_POINTS_PER_AXIS[dim - 1];
        if size < 2 || !size.is_multiple_of(2) || size > max {
            return Err(SpectralError::BadSize { got: size, max });
        }
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(SpectralError::BadHalfLength(half_length));
        }
        let len = size.pow(dim as u32);
        let base = std::f64::consts::PI / half_length;
        let xi_axis: Vec<f64> = (0..size)
            .map(|k| {
                let kt = if k < size / 2 {
                    k as i64
                } else {
                    k as i64 - size as i64
                };
                base * kt as f64
            })
            .collect();
        let mut xi_mag = vec![0.0; len];
        let mut sign = vec![1.0; len];
        for (flat, (mag, sgn)) in xi_mag.iter_mut().zip(sign.iter_mut()).enumerate() {
            let mut rest = flat;
            let mut sum_sq = 0.0;
            let mut parity = 0usize;
            for _ in 0..dim {
                let k = rest % size;
                rest /= size;
                sum_sq += xi_axis[k] * xi_axis[k];
                parity += k;
            }
            *mag = sum_sq.sqrt();
            if parity % 2 == 1 {
                *sgn = -1.0;
            }
        }
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(size);
        let inv = planner.plan_fft_inverse(size);
        Ok(Arc::new(SpectralGrid {
            dim,
            size,
            half_length,
            len,
            xi_axis,
            xi_mag,
            sign,
            fwd,
            inv,
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    /// Total number of grid points, size^dim.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Signed frequency (pi/L) ktilde for one axis position.
    pub fn xi_axis(&self) -> &[f64] {
        &self.xi_axis
    }

    /// |xi| per flat coefficient index.
    pub fn xi_mag(&self) -> &[f64] {
        &self.xi_mag
    }

    /// Physical volume (2L)^n of the box.
    pub fn volume(&self) -> f64 {
        (2.0 * self.half_length).powi(self.dim as i32)
    }

    /// Volume of one grid cell, (2L/N)^n.
    pub fn cell_volume(&self) -> f64 {
        (2.0 * self.half_length / self.size as f64).powi(self.dim as i32)
    }

    /// Grid coordinates along one axis, x_j = -L + 2Lj/N.
    pub fn axis_coords(&self) -> Vec<f64> {
        let h = 2.0 * self.half_length / self.size as f64;
        (0..self.size).map(|j| -self.half_length + h * j as f64).collect()
    }

    pub fn compatible(&self, other: &SpectralGrid) -> bool {
        self.dim == other.dim
            && self.size == other.size
            && self.half_length == other.half_length
    }

    /// 2/3-rule mask: true where every axis satisfies 3 |ktilde| <= N.
    pub fn dealias_mask(&self) -> Vec<bool> {
        let half = self.size / 2;
        (0..self.len)
            .map(|flat| {
                let mut rest = flat;
                for _ in 0..self.dim {
                    let k = rest % self.size;
                    rest /= self.size;
                    let kt = if k < half { k } else { self.size - k };
                    if 3 * kt > self.size {
                        return false;
                    }
                }
                true
            })
            .collect()
    }

    fn run_fft(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let size = self.size;
        let mut line = vec![Complex64::new(0.0, 0.0); size];
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        for axis in 0..self.dim {
            let stride = size.pow((self.dim - 1 - axis) as u32);
            let block = stride * size;
            for outer in 0..self.len / block {
                for inner in 0..stride {
                    let base = outer * block + inner;
                    for (k, slot) in line.iter_mut().enumerate() {
                        *slot = data[base + k * stride];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for (k, slot) in line.iter().enumerate() {
                        data[base + k * stride] = *slot;
                    }
                }
            }
        }
    }
}

/// Fractional symbol |xi|^order on the grid.  The zero mode maps to 1 when
/// order = 0 (so the order-0 weight is the identity and the homogeneous
/// H^0 norm coincides with L^2) and to 0 for any other order.
pub fn frac_symbol(grid: &SpectralGrid, order: f64) -> Vec<f64> {
    grid.xi_mag
        .iter()
        .map(|&m| {
            if m == 0.0 {
                if order == 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                m.powf(order)
            }
        })
        .collect()
}

/// Lebesgue exponent for grid norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LpExponent {
    Finite(f64),
    Infinity,
}

/// A field stored by its Fourier coefficients on a shared grid.
#[derive(Clone)]
pub struct SpectralField {
    grid: Arc<SpectralGrid>,
    coeffs: Vec<Complex64>,
}

impl std::fmt::Debug for SpectralField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralField")
            .field("grid", &self.grid)
            .finish()
    }
}

impl SpectralField {
    pub fn zero(grid: &Arc<SpectralGrid>) -> Self {
        SpectralField {
            grid: Arc::clone(grid),
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len],
        }
    }

    pub fn from_coeffs(
        grid: &Arc<SpectralGrid>,
        coeffs: Vec<Complex64>,
    ) -> Result<Self, SpectralError> {
        if coeffs.len() != grid.len {
            return Err(SpectralError::LengthMismatch {
                got: coeffs.len(),
                want: grid.len,
            });
        }
        Ok(SpectralField {
            grid: Arc::clone(grid),
            coeffs,
        })
    }

    /// Transform grid samples into coefficients.
    pub fn from_real(grid: &Arc<SpectralGrid>, samples: &[f64]) -> Result<Self, SpectralError> {
        if samples.len() != grid.len {
            return Err(SpectralError::LengthMismatch {
                got: samples.len(),
                want: grid.len,
            });
        }
        let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        grid.run_fft(&mut buf, &grid.fwd);
        let scale = 1.0 / grid.len as f64;
        for (c, &s) in buf.iter_mut().zip(grid.sign.iter()) {
            *c *= s * scale;
        }
        Ok(SpectralField {
            grid: Arc::clone(grid),
            coeffs: buf,
        })
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Evaluate on the grid; imaginary parts are discarded.
    pub fn to_real(&self) -> Vec<f64> {
        self.to_complex_samples().iter().map(|c| c.re).collect()
    }

    pub fn to_complex_samples(&self) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = self
            .coeffs
            .iter()
            .zip(self.grid.sign.iter())
            .map(|(&c, &s)| c * s)
            .collect();
        self.grid.run_fft(&mut buf, &self.grid.inv);
        buf
    }

    /// Largest deviation from conjugate symmetry c_{-k} = conj(c_k),
    /// relative to the largest coefficient magnitude (0 for the zero field).
    pub fn hermitian_defect(&self) -> f64 {
        let size = self.grid.size;
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for (flat, &c) in self.coeffs.iter().enumerate() {
            scale = scale.max(c.norm());
            let mut rest = flat;
            let mut mirror = 0usize;
            let mut mult = 1usize;
            for _ in 0..self.grid.dim {
                let k = rest % size;
                rest /= size;
                mirror += ((size - k) % size) * mult;
                mult *= size;
            }
            let defect = (self.coeffs[mirror] - c.conj()).norm();
            worst = worst.max(defect);
        }
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }

    /// Multiply coefficients by a real symbol table.
    pub fn apply_symbol(&self, symbol: &[f64]) -> Result<SpectralField, SpectralError> {
        if symbol.len() != self.coeffs.len() {
            return Err(SpectralError::LengthMismatch {
                got: symbol.len(),
                want: self.coeffs.len(),
            });
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(symbol.iter())
            .map(|(&c, &s)| c * s)
            .collect();
        Ok(SpectralField {
            grid: Arc::clone(&self.grid),
            coeffs,
        })
    }

    /// self += scale * other, coefficientwise.
    pub fn add_scaled(&mut self, other: &SpectralField, scale: f64) -> Result<(), SpectralError> {
        if !self.grid.compatible(&other.grid) {
            return Err(SpectralError::GridMismatch);
        }
        for (a, &b) in self.coeffs.iter_mut().zip(other.coeffs.iter()) {
            *a += b * scale;
        }
        Ok(())
    }
}

/// Sobolev norm of order `a`.  Homogeneous: weight |xi|^{2a} with the
/// zero-mode convention of `frac_symbol`; inhomogeneous: (1 + |xi|^2)^a.
/// Normalized so that the order-0 norm equals the L^2 norm on the box:
/// ||f||^2 = (2L)^n sum_k w_k |c_k|^2.
pub fn sobolev_norm(field: &SpectralField, a: f64, homogeneous: bool) -> f64 {
    let grid = field.grid();
    let mut sum = 0.0;
    for (&c, &m) in field.coeffs.iter().zip(grid.xi_mag.iter()) {
        let w = if homogeneous {
            if m == 0.0 {
                if a == 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                m.powf(2.0 * a)
            }
        } else {
            (1.0 + m * m).powf(a)
        };
        sum += w * c.norm_sqr();
    }
    (grid.volume() * sum).sqrt()
}

/// L^r norm of the real-space samples by the rectangle rule (exact for
/// r = 2 on trigonometric polynomials); r = infinity takes the max.
pub fn lr_norm(field: &SpectralField, r: LpExponent) -> Result<f64, SpectralError> {
    let samples = field.to_real();
    match r {
        LpExponent::Infinity => Ok(samples.iter().fold(0.0f64, |m, &v| m.max(v.abs()))),
        LpExponent::Finite(r) => {
            if !(r.is_finite() && r >= 1.0) {
                return Err(SpectralError::BadLpExponent(r));
            }
            let cell = field.grid.cell_volume();
            let sum: f64 = samples.iter().map(|&v| v.abs().powf(r)).sum();
            Ok((cell * sum).powf(1.0 / r))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b.iter())
            .fold(0.0f64, |m, (&x, &y)| m.max((x - y).abs()))
    }

    #[test]
    fn grid_validation() {
        assert!(matches!(
            SpectralGrid::new(0, 8, 1.0),
            Err(SpectralError::BadDimension(0))
        ));
        assert!(matches!(
            SpectralGrid::new(4, 8, 1.0),
            Err(SpectralError::BadDimension(4))
        ));
        assert!(matches!(
            SpectralGrid::new(1, 7, 1.0),
            Err(SpectralError::BadSize { .. })
        ));
        assert!(matches!(
            SpectralGrid::new(1, 8192, 1.0),
            Err(SpectralError::BadSize { .. })
        ));
        assert!(matches!(
            SpectralGrid::new(3, 256, 1.0),
            Err(SpectralError::BadSize { .. })
        ));
        assert!(matches!(
            SpectralGrid::new(1, 8, 0.0),
            Err(SpectralError::BadHalfLength(_))
        ));
        assert!(SpectralGrid::new(3, 32, 2.0).is_ok());
    }

    #[test]
    fn frequency_layout() {
        let g = SpectralGrid::new(1, 8, std::f64::consts::PI).unwrap();
        // L = pi makes xi = ktilde exactly.
        let want = [0.0, 1.0, 2.0, 3.0, -4.0, -3.0, -2.0, -1.0];
        for (a, b) in g.xi_axis().iter().zip(want.iter()) {
            assert_eq!(a, b);
        }
        assert_eq!(g.xi_mag()[0], 0.0);
        assert_eq!(g.xi_mag()[5], 3.0);
    }

    #[test]
    fn round_trip_random_field() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for (dim, size) in [(1usize, 64usize), (2, 16), (3, 8)] {
            let g = SpectralGrid::new(dim, size, 1.7).unwrap();
            let samples: Vec<f64> = (0..g.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let f = SpectralField::from_real(&g, &samples).unwrap();
            let back = f.to_real();
            assert!(sup_diff(&samples, &back) < 1e-12, "dim {dim}");
            assert!(f.hermitian_defect() < 1e-12);
        }
    }

    #[test]
    fn single_cosine_hits_expected_modes() {
        let l = std::f64::consts::PI;
        let g = SpectralGrid::new(1, 32, l).unwrap();
        let xs = g.axis_coords();
        let samples: Vec<f64> = xs.iter().map(|&x| (3.0 * x).cos()).collect();
        let f = SpectralField::from_real(&g, &samples).unwrap();
        for (k, &c) in f.coeffs().iter().enumerate() {
            let expected = if k == 3 || k == 32 - 3 { 0.5 } else { 0.0 };
            assert!(
                (c.re - expected).abs() < 1e-13 && c.im.abs() < 1e-13,
                "mode {k}: {c}"
            );
        }
    }

    #[test]
    fn plancherel_matches_rectangle_rule() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let g = SpectralGrid::new(2, 32, 2.5).unwrap();
        let samples: Vec<f64> = (0..g.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let f = SpectralField::from_real(&g, &samples).unwrap();
        let l2_spectral = sobolev_norm(&f, 0.0, true);
        let l2_grid = lr_norm(&f, LpExponent::Finite(2.0)).unwrap();
        assert!((l2_spectral - l2_grid).abs() <= 1e-10 * l2_grid.max(1.0));
    }

    #[test]
    fn frac_symbol_zero_mode_and_values() {
        let g = SpectralGrid::new(1, 16, std::f64::consts::PI).unwrap();
        let s0 = frac_symbol(&g, 0.0);
        assert!(s0.iter().all(|&v| v == 1.0));
        let s3 = frac_symbol(&g, 3.0);
        assert_eq!(s3[0], 0.0);
        assert!((s3[2] - 8.0).abs() < 1e-12);
        // additivity away from the zero mode
        let s1 = frac_symbol(&g, 1.25);
        let s2 = frac_symbol(&g, 1.75);
        for k in 1..16 {
            assert!((s1[k] * s2[k] - s3[k]).abs() <= 1e-12 * s3[k]);
        }
    }

    #[test]
    fn sobolev_single_mode_scaling() {
        let l = std::f64::consts::PI;
        let g = SpectralGrid::new(1, 16, l).unwrap();
        let mut f = SpectralField::zero(&g);
        f.coeffs_mut()[2] = Complex64::new(0.7, -0.1); // |xi| = 2
        let base = sobolev_norm(&f, 0.0, true);
        assert!((sobolev_norm(&f, 1.0, true) - 2.0 * base).abs() < 1e-12 * base);
        assert!((sobolev_norm(&f, 1.5, true) - 2.0f64.powf(1.5) * base).abs() < 1e-12 * base);
        let inhom = sobolev_norm(&f, 1.0, false);
        assert!((inhom - 5.0f64.sqrt() * base).abs() < 1e-12 * base);
    }

    #[test]
    fn sobolev_monotone_for_high_frequency_field() {
        let g = SpectralGrid::new(1, 32, std::f64::consts::PI).unwrap();
        let mut f = SpectralField::zero(&g);
        f.coeffs_mut()[1] = Complex64::new(0.3, 0.0); // |xi| = 1
        f.coeffs_mut()[5] = Complex64::new(0.2, 0.4); // |xi| = 5
        let mut prev = 0.0;
        for a in [0.0, 0.5, 1.0, 2.0] {
            let v = sobolev_norm(&f, a, true);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn lr_norms_on_constant_field() {
        let g = SpectralGrid::new(2, 16, 1.5).unwrap();
        let samples = vec![-0.4; g.len()];
        let f = SpectralField::from_real(&g, &samples).unwrap();
        let vol = g.volume();
        let l1 = lr_norm(&f, LpExponent::Finite(1.0)).unwrap();
        let linf = lr_norm(&f, LpExponent::Infinity).unwrap();
        assert!((l1 - 0.4 * vol).abs() < 1e-12 * vol);
        assert!((linf - 0.4).abs() < 1e-12);
        assert!(matches!(
            lr_norm(&f, LpExponent::Finite(0.5)),
            Err(SpectralError::BadLpExponent(_))
        ));
    }

    #[test]
    fn hoelder_between_lr_norms() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let g = SpectralGrid::new(1, 64, 2.0).unwrap();
        let samples: Vec<f64> = (0..g.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let f = SpectralField::from_real(&g, &samples).unwrap();
        let vol = g.volume();
        for r in [1.5, 2.0, 3.0, 6.0] {
            let l1 = lr_norm(&f, LpExponent::Finite(1.0)).unwrap();
            let lr = lr_norm(&f, LpExponent::Finite(r)).unwrap();
            assert!(l1 <= lr * vol.powf(1.0 - 1.0 / r) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn dealias_mask_thirds() {
        let g = SpectralGrid::new(1, 12, 1.0).unwrap();
        let mask = g.dealias_mask();
        // ktilde: 0 1 2 3 4 5 -6 -5 -4 -3 -2 -1; keep 3|kt| <= 12 => |kt| <= 4
        let want = [
            true, true, true, true, true, false, false, false, true, true, true, true,
        ];
        assert_eq!(mask, want.to_vec());
    }

    #[test]
    fn grid_mismatch_detected() {
        let g1 = SpectralGrid::new(1, 16, 1.0).unwrap();
        let g2 = SpectralGrid::new(1, 16, 2.0).unwrap();
        let mut a = SpectralField::zero(&g1);
        let b = SpectralField::zero(&g2);
        assert!(matches!(
            a.add_scaled(&b, 1.0),
            Err(SpectralError::GridMismatch)
        ));
    }
}
