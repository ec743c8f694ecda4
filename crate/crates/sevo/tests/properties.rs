//! Randomized invariants: transform round-trips, root/kernel identities,
//! exact-rational structure of the decay exponents, and region consistency.

use num_complex::Complex64;
use proptest::prelude::*;
use sevo::model::{
    blowup_condition, check_region, critical_exponent, decay_prediction, derive_constants,
    parse_rational, rat, Corollary, ModelParams, Rational, Theorem,
};
use sevo::propagator::{char_roots, kernels};
use sevo::spectral::{frac_symbol, lr_norm, sobolev_norm, LpExponent, SpectralField, SpectralGrid};

fn params(sigma: Rational, delta: Rational, n: u32, m: Rational) -> ModelParams {
    ModelParams::new(sigma, delta, n, rat(2, 1), rat(2, 1), m).unwrap()
}

/// sigma = 1 + a/b in [1, 3]; delta = sigma * num/den in (0, sigma).
fn order_strategy() -> impl Strategy<Value = (Rational, Rational)> {
    (0i64..=4, 1i64..=2, 1i64..=7, 2i64..=8)
        .prop_filter("delta fraction", |(_, _, num, den)| num < den)
        .prop_map(|(a, b, num, den)| {
            let sigma = rat(1, 1) + rat(a, b);
            (sigma, sigma * rat(num, den))
        })
}

fn m_strategy() -> impl Strategy<Value = Rational> {
    (0i64..=4, 1i64..=4)
        .prop_filter("m in [1,2]", |(a, b)| a <= b)
        .prop_map(|(a, b)| rat(1, 1) + rat(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fft_round_trip_and_hermitian(
        size_pow in 3u32..=5,
        seed_vals in proptest::collection::vec(-5.0f64..5.0, 32),
    ) {
        let size = 1usize << size_pow;
        let grid = SpectralGrid::new(1, size, 2.0).unwrap();
        let samples: Vec<f64> = (0..size).map(|i| seed_vals[i % seed_vals.len()]).collect();
        let f = SpectralField::from_real(&grid, &samples).unwrap();
        prop_assert!(f.hermitian_defect() < 1e-12);
        let back = f.to_real();
        for (x, y) in samples.iter().zip(back.iter()) {
            prop_assert!((x - y).abs() < 1e-10, "{x} vs {y}");
        }
    }

    #[test]
    fn plancherel_matches_grid_l2(
        seed_vals in proptest::collection::vec(-3.0f64..3.0, 16),
    ) {
        let grid = SpectralGrid::new(1, 16, 1.5).unwrap();
        let f = SpectralField::from_real(&grid, &seed_vals).unwrap();
        let a = lr_norm(&f, LpExponent::Finite(2.0)).unwrap();
        let b = sobolev_norm(&f, 0.0, true);
        prop_assert!((a - b).abs() <= 1e-8 * (1.0 + a.abs()), "{a} vs {b}");
    }

    #[test]
    fn holder_l2_between_l1_linf(
        seed_vals in proptest::collection::vec(-3.0f64..3.0, 16),
    ) {
        let grid = SpectralGrid::new(1, 16, 2.0).unwrap();
        let f = SpectralField::from_real(&grid, &seed_vals).unwrap();
        let l1 = lr_norm(&f, LpExponent::Finite(1.0)).unwrap();
        let l2 = lr_norm(&f, LpExponent::Finite(2.0)).unwrap();
        let linf = lr_norm(&f, LpExponent::Infinity).unwrap();
        prop_assert!(l2 * l2 <= l1 * linf * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn frac_symbol_is_additive(
        (sigma, delta) in order_strategy(),
        size_pow in 3u32..=5,
    ) {
        let a = sevo::model::ratio_f64(delta);
        let b = sevo::model::ratio_f64(sigma);
        let grid = SpectralGrid::new(1, 1usize << size_pow, 2.5).unwrap();
        let sa = frac_symbol(&grid, a);
        let sb = frac_symbol(&grid, b);
        let sab = frac_symbol(&grid, a + b);
        for i in 0..grid.len() {
            let prod = sa[i] * sb[i];
            prop_assert!(
                (prod - sab[i]).abs() <= 1e-12 * (1.0 + sab[i].abs()),
                "mode {i}: {prod} vs {}", sab[i]
            );
        }
    }

    #[test]
    fn characteristic_roots_satisfy_vieta(
        (sigma, delta) in order_strategy(),
        rho in 1e-3f64..10.0,
    ) {
        let p = params(sigma, delta, 3, rat(1, 1));
        let roots = char_roots(rho, &p);
        let sum = roots.lambda1 + roots.lambda2;
        let prod = roots.lambda1 * roots.lambda2;
        let damp = rho.powf(2.0 * sevo::model::ratio_f64(delta));
        let elastic = rho.powf(2.0 * sevo::model::ratio_f64(sigma));
        prop_assert!((sum + Complex64::new(damp, 0.0)).norm() <= 1e-10 * damp.max(1.0));
        prop_assert!((prod - Complex64::new(elastic, 0.0)).norm() <= 1e-10 * elastic.max(1.0));
    }

    #[test]
    fn kernels_start_from_identity_data(
        (sigma, delta) in order_strategy(),
        rho in 1e-3f64..10.0,
    ) {
        let p = params(sigma, delta, 3, rat(1, 1));
        let k = kernels(0.0, rho, &p);
        prop_assert_eq!(k.k0, Complex64::new(1.0, 0.0));
        prop_assert_eq!(k.k1, Complex64::new(0.0, 0.0));
        prop_assert_eq!(k.dt_k0, Complex64::new(0.0, 0.0));
        prop_assert_eq!(k.dt_k1, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn kernel_derivatives_match_finite_differences(
        (sigma, delta) in order_strategy(),
        rho in 0.05f64..2.0,
        t in 0.2f64..3.0,
    ) {
        let p = params(sigma, delta, 3, rat(1, 1));
        let h = 1e-4;
        let plus = kernels(t + h, rho, &p);
        let minus = kernels(t - h, rho, &p);
        let mid = kernels(t, rho, &p);
        let fd0 = (plus.k0 - minus.k0) / (2.0 * h);
        let fd1 = (plus.k1 - minus.k1) / (2.0 * h);
        let scale = 1.0 + mid.dt_k0.norm().max(mid.dt_k1.norm());
        prop_assert!((fd0 - mid.dt_k0).norm() <= 1e-5 * scale);
        prop_assert!((fd1 - mid.dt_k1).norm() <= 1e-5 * scale);
    }

    #[test]
    fn critical_exponent_decreases_with_dimension(
        (sigma, delta) in order_strategy(),
        m in m_strategy(),
        n1 in 1u32..=6,
        dn in 1u32..=4,
    ) {
        let n2 = n1 + dn;
        let p1 = params(sigma, delta, n1, m);
        let p2 = params(sigma, delta, n2, m);
        let (Ok(c1), Ok(c2)) = (critical_exponent(&p1), critical_exponent(&p2)) else {
            // n <= m k-: the exponent is undefined in the lower dimension
            return Ok(());
        };
        prop_assert!(c1 > c2, "{c1} vs {c2}");
        prop_assert!(c2 > Rational::from_integer(1));
    }

    #[test]
    fn decay_exponent_shift_structure(
        (sigma, delta) in order_strategy(),
        m in m_strategy(),
        n in 1u32..=6,
        a_num in 0i64..=3,
    ) {
        let p = params(sigma, delta, n, m);
        let c = derive_constants(&p);
        let gap = rat(2, 1) * (c.k_plus - p.delta);
        let a = rat(a_num, 2);
        for corollary in [Corollary::C21, Corollary::C22] {
            let Ok(base) = decay_prediction(&p, 0, a, corollary) else { continue };
            // data-1 estimates gain a fixed increment over data-0 ones
            let want_gap = match corollary {
                Corollary::C22 => c.k_minus / gap,
                Corollary::C21 => Rational::from_integer(1),
            };
            prop_assert_eq!(base.exponent_data1 - base.exponent_data0, want_gap);
            // one time derivative costs (2 sigma - k-)/gap (C22) or k-/gap (C21)
            if let Ok(dj) = decay_prediction(&p, 1, a, corollary) {
                let jump = match corollary {
                    Corollary::C22 => (rat(2, 1) * p.sigma - c.k_minus) / gap,
                    Corollary::C21 => c.k_minus / gap,
                };
                prop_assert_eq!(dj.exponent_data0, base.exponent_data0 - jump);
            }
            // one more smoothness order costs 1/gap
            if let Ok(da) = decay_prediction(&p, 0, a + rat(1, 1), corollary) {
                prop_assert_eq!(da.exponent_data0, base.exponent_data0 - rat(1, 1) / gap);
            }
        }
    }

    #[test]
    fn half_regime_collapses_to_single_scale(
        sig_num in 2i64..=6,
        m in m_strategy(),
        n in 1u32..=6,
        j in 0u8..=1,
        a_num in 0i64..=3,
    ) {
        let sigma = rat(sig_num, 2);
        let p = params(sigma, sigma / rat(2, 1), n, m);
        let a = rat(a_num, 2);
        if let Ok(pred) = decay_prediction(&p, j, a, Corollary::C22) {
            let inv_m = rat(1, 1) / p.m;
            let want = -(p.n_rat() / sigma) * (inv_m - rat(1, 2))
                - a / sigma
                - rat(j as i64, 1);
            prop_assert_eq!(pred.exponent_data0, want);
        }
    }

    #[test]
    fn strict_blowup_excludes_small_data_global_existence(
        sig in 2i64..=3,
        del in 1i64..=2,
        n in 1u32..=8,
        p_num in 21i64..=60,
        q_num in 21i64..=60,
    ) {
        prop_assume!(del < sig);
        let pm = ModelParams::new(
            rat(sig, 1),
            rat(del, 1),
            n,
            rat(p_num, 20),
            rat(q_num, 20),
            rat(1, 1),
        )
        .unwrap();
        let bu = blowup_condition(&pm).unwrap();
        let c = derive_constants(&pm);
        let rhs = c.k_minus
            + rat(2, 1) * pm.sigma * (rat(1, 1) + pm.p.max(pm.q)) / (pm.p * pm.q - rat(1, 1));
        if pm.n_rat() < rhs {
            prop_assert!(bu.admissible);
            if let Ok(v) = check_region(&pm, Theorem::T1B) {
                prop_assert!(!v.admissible, "global existence inside strict blow-up region");
            }
        }
    }

    #[test]
    fn rational_parser_round_trips(num in -500i64..=500, den in 1i64..=120) {
        let r = rat(num, den);
        let parsed = parse_rational(&format!("{}/{}", num, den)).unwrap();
        prop_assert_eq!(parsed, r);
        let parsed = parse_rational(&format!("{}", r)).unwrap();
        prop_assert_eq!(parsed, r);
    }

    #[test]
    fn dealias_mask_is_symmetric(size_pow in 2u32..=6) {
        let size = 1usize << size_pow;
        let grid = SpectralGrid::new(1, size, 1.0).unwrap();
        let mask = grid.dealias_mask();
        // mode k and mode size - k carry opposite signed frequencies
        for k in 1..size {
            prop_assert_eq!(mask[k], mask[size - k], "k = {}", k);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn symmetric_coupling_preserves_swapped_states(
        seed_vals in proptest::collection::vec(-0.2f64..0.2, 8),
    ) {
        use sevo::semilinear::{CouplingKind, Stepper, SystemState};
        let pm = params(rat(1, 1), rat(1, 2), 1, rat(1, 1));
        let grid = SpectralGrid::new(1, 8, std::f64::consts::PI).unwrap();
        let f = SpectralField::from_real(&grid, &seed_vals).unwrap();
        let g_vals: Vec<f64> = seed_vals.iter().map(|x| 0.1 - x).collect();
        let g = SpectralField::from_real(&grid, &g_vals).unwrap();

        let fwd = SystemState::new(f.clone(), g.clone(), f.clone(), g.clone()).unwrap();
        let mut stepper = Stepper::new(pm.clone(), CouplingKind::UU);
        let mut state = fwd;
        for _ in 0..3 {
            state = stepper.step(&state, 0.01).unwrap();
        }
        // with identical components u and v stay bitwise equal forever
        for (a, b) in state.u.coeffs().iter().zip(state.v.coeffs()) {
            prop_assert_eq!(a, b);
        }
        for (a, b) in state.ut.coeffs().iter().zip(state.vt.coeffs()) {
            prop_assert_eq!(a, b);
        }
    }
}
