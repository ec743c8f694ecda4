//! Numerical laboratory for weakly coupled systems of semi-linear
//! sigma-evolution equations with structural damping,
//!
//! ```text
//! u_tt + (-Lap)^sigma u + (-Lap)^delta u_t = F(v, v_t)
//! v_tt + (-Lap)^sigma v + (-Lap)^delta v_t = G(u, u_t)
//! ```
//!
//! with `sigma >= 1` and `0 < delta < sigma`. The right-hand sides are the
//! power couplings `|v|^p` / `|u|^q` or their time-derivative variants.
//!
//! The crate splits into:
//!
//! - [`model`]: exact rational arithmetic for every closed-form exponent
//!   (admissible regions, decay rates, loss of decay, blow-up and lifespan).
//! - [`spectral`]: periodic grids, FFT-based transforms, fractional symbols
//!   and norms.
//! - [`propagator`]: characteristic roots, the fundamental kernels K0/K1 and
//!   the exact linear solver built on them, plus radial quadrature for
//!   whole-space norms.
//! - [`semilinear`]: kernel-based exponential predictor-corrector integrator
//!   with blow-up detection.
//! - [`analysis`]: decay-rate fitting and the verification harness that
//!   compares measured slopes against predicted ones.
//! - [`quad`]: adaptive Gauss-Kronrod quadrature used by the radial norms.

pub mod analysis;
pub mod model;
pub mod propagator;
pub mod quad;
pub mod semilinear;
pub mod spectral;
