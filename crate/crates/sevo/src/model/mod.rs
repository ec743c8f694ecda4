//! Parameters, derived constants, and every closed-form exponent of the
//! theory: admissible regions, decay rates, loss of decay, blow-up condition,
//! lifespan exponent.
//!
//! Everything here is exact rational arithmetic so that threshold comparisons
//! (strict vs non-strict) classify boundary points correctly. Conversion to
//! floating point happens only at the simulation boundary.

mod region;

pub use region::{
    blowup_condition, check_region, phase_rows, PhaseRow, RegionVerdict, Theorem, Violation,
};

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = Ratio<i64>;

/// Shorthand for `Ratio::new`; panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Ratio::new(num, den)
}

/// Lossy conversion for the simulation boundary.
pub fn ratio_f64(x: Rational) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ModelError {
    #[error("cannot parse `{0}` as a rational (expected `a/b`, integer, or decimal)")]
    Parse(String),
    #[error("invalid `{field}`: {msg}")]
    Invalid { field: &'static str, msg: String },
    #[error("out of domain: {0}")]
    Domain(String),
    #[error("out of scope: {0}")]
    Scope(String),
    #[error("theorem {0} needs regularity orders s1/s2 but they are not set")]
    MissingRegularity(&'static str),
}

/// Parses "3/2", "1.5", "-0.25", or "2" into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, ModelError> {
    let bad = || ModelError::Parse(s.to_string());
    let t = s.trim();
    let (neg, t) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    if t.is_empty() {
        return Err(bad());
    }
    let value = if let Some((num, den)) = t.split_once('/') {
        let num: i64 = num.trim().parse().map_err(|_| bad())?;
        let den: i64 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        Ratio::new(num, den)
    } else if let Some((int, frac)) = t.split_once('.') {
        if !frac.is_empty() && !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        if frac.len() > 18 {
            return Err(bad());
        }
        let int: i64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let scale = 10_i64.checked_pow(frac.len() as u32).ok_or_else(bad)?;
        let frac: i64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad())?
        };
        let num = int.checked_mul(scale).and_then(|v| v.checked_add(frac));
        Ratio::new(num.ok_or_else(bad)?, scale)
    } else {
        let int: i64 = t.parse().map_err(|_| bad())?;
        Ratio::from_integer(int)
    };
    Ok(if neg { -value } else { value })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// delta < sigma/2: oscillatory small frequencies, k- = 2 delta.
    BelowHalf,
    /// delta = sigma/2: k- = k+ = sigma, single-regime rates.
    Half,
    /// delta > sigma/2: k- = sigma, k+ = 2 delta.
    AboveHalf,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::BelowHalf => "below-half",
            Regime::Half => "half",
            Regime::AboveHalf => "above-half",
        }
    }
}

/// k- = min{sigma, 2 delta}, k+ = max{sigma, 2 delta}, m0 = 2m/(2-m).
/// `m0` is `None` at the endpoint m = 2 (the limit is +infinity and the
/// L^m-improved estimates degenerate to plain L^2-L^2 ones).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedConstants {
    pub k_minus: Rational,
    pub k_plus: Rational,
    pub m0: Option<Rational>,
    pub regime: Regime,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub sigma: Rational,
    pub delta: Rational,
    pub n: u32,
    pub p: Rational,
    pub q: Rational,
    pub m: Rational,
    pub s1: Option<Rational>,
    pub s2: Option<Rational>,
}

impl ModelParams {
    /// Validates sigma >= 1, 0 < delta < sigma, n >= 1, p,q > 1, m in [1,2].
    ///
    /// m = 2 is accepted at construction: the L^2-L^2 decay branch is
    /// meaningful there, and region checks report the m < 2 requirement as an
    /// ordinary violation.
    pub fn new(
        sigma: Rational,
        delta: Rational,
        n: u32,
        p: Rational,
        q: Rational,
        m: Rational,
    ) -> Result<Self, ModelError> {
        let inv = |field, msg: String| Err(ModelError::Invalid { field, msg });
        if sigma < Rational::one() {
            return inv("sigma", format!("need sigma >= 1, got {sigma}"));
        }
        if delta <= Rational::zero() || delta >= sigma {
            return inv("delta", format!("need 0 < delta < sigma, got {delta}"));
        }
        if n == 0 {
            return inv("n", "need n >= 1".into());
        }
        if p <= Rational::one() {
            return inv("p", format!("need p > 1, got {p}"));
        }
        if q <= Rational::one() {
            return inv("q", format!("need q > 1, got {q}"));
        }
        if m < Rational::one() || m > rat(2, 1) {
            return inv("m", format!("need m in [1,2], got {m}"));
        }
        Ok(Self {
            sigma,
            delta,
            n,
            p,
            q,
            m,
            s1: None,
            s2: None,
        })
    }

    pub fn with_regularity(mut self, s1: Rational, s2: Rational) -> Result<Self, ModelError> {
        if s1.is_negative() || s2.is_negative() {
            return Err(ModelError::Invalid {
                field: "s1/s2",
                msg: format!("regularity orders must be >= 0, got ({s1}, {s2})"),
            });
        }
        self.s1 = Some(s1);
        self.s2 = Some(s2);
        Ok(self)
    }

    pub fn n_rat(&self) -> Rational {
        Rational::from_integer(self.n as i64)
    }

    pub fn constants(&self) -> DerivedConstants {
        derive_constants(self)
    }
}

pub fn derive_constants(params: &ModelParams) -> DerivedConstants {
    let two_delta = rat(2, 1) * params.delta;
    let (k_minus, k_plus) = if two_delta <= params.sigma {
        (two_delta, params.sigma)
    } else {
        (params.sigma, two_delta)
    };
    let m0 = if params.m == rat(2, 1) {
        None
    } else {
        Some(rat(2, 1) * params.m / (rat(2, 1) - params.m))
    };
    let regime = match two_delta.cmp(&params.sigma) {
        std::cmp::Ordering::Less => Regime::BelowHalf,
        std::cmp::Ordering::Equal => Regime::Half,
        std::cmp::Ordering::Greater => Regime::AboveHalf,
    };
    DerivedConstants {
        k_minus,
        k_plus,
        m0,
        regime,
    }
}

/// 1 + m(k+ + sigma)/(n - m k-), the threshold separating the loss-of-decay
/// regime from the full-decay regime for min{p,q}.
pub fn critical_exponent(params: &ModelParams) -> Result<Rational, ModelError> {
    let c = derive_constants(params);
    let den = params.n_rat() - params.m * c.k_minus;
    if den <= Rational::zero() {
        return Err(ModelError::Domain(format!(
            "critical exponent needs n > m k^- = {}, got n = {}",
            params.m * c.k_minus,
            params.n
        )));
    }
    Ok(Rational::one() + params.m * (c.k_plus + params.sigma) / den)
}

/// Loss of decay [eps(r)]^+ with
/// eps(r) = 1 - n(r-1)/(2m(k+ - delta)) + r k-/(2(k+ - delta)) + slack.
///
/// The theory only asks for "a sufficiently small positive" slack; the
/// reproducible default is 1/1000.
pub const EPS_SLACK_DEFAULT: Rational = Ratio::new_raw(1, 1000);

pub fn loss_of_decay(params: &ModelParams, exponent: Rational, eps_slack: Rational) -> Rational {
    let c = derive_constants(params);
    let kd = c.k_plus - params.delta;
    let eps = Rational::one() - params.n_rat() * (exponent - Rational::one())
        / (rat(2, 1) * params.m * kd)
        + exponent * c.k_minus / (rat(2, 1) * kd)
        + eps_slack;
    eps.max(Rational::zero())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Corollary {
    /// Valid in every dimension; data-1 exponent sits exactly 1 above data-0.
    C21,
    /// Sharper rates; for m < 2 requires n > m0 k-. At m = 2 this is the
    /// plain L^2-L^2 estimate and carries no dimension restriction.
    C22,
}

/// Predicted time exponents for ||d_t^j |D|^a w(t)||_{L^2} in terms of the
/// two data norms, together with the required data regularity.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayPrediction {
    pub j: u8,
    pub a: Rational,
    pub corollary: Corollary,
    /// Exponent multiplying the w0 norm contribution.
    pub exponent_data0: Rational,
    /// Exponent multiplying the w1 norm contribution.
    pub exponent_data1: Rational,
    /// Loss of decay; zero unless explicitly attached by the caller.
    pub loss: Rational,
    /// Required Sobolev order of w0: a + j(2 sigma - k+).
    pub regularity_data0: Rational,
    /// Required Sobolev order of w1: [a + (j-1) k+]^+.
    pub regularity_data1: Rational,
}

impl DecayPrediction {
    pub fn with_loss(mut self, loss: Rational) -> Self {
        self.loss = loss;
        self
    }
}

pub fn decay_prediction(
    params: &ModelParams,
    j: u8,
    a: Rational,
    corollary: Corollary,
) -> Result<DecayPrediction, ModelError> {
    if j > 1 {
        return Err(ModelError::Invalid {
            field: "j",
            msg: format!("time-derivative order must be 0 or 1, got {j}"),
        });
    }
    if a.is_negative() {
        return Err(ModelError::Invalid {
            field: "a",
            msg: format!("derivative order must be >= 0, got {a}"),
        });
    }
    let c = derive_constants(params);
    let jr = Rational::from_integer(j as i64);
    let two = rat(2, 1);
    let tkd = two * (c.k_plus - params.delta);
    let m_gain = -params.n_rat() / tkd * (params.m.recip() - rat(1, 2));

    let (e0, e1) = match corollary {
        Corollary::C22 => {
            if let Some(m0) = c.m0 {
                let bound = m0 * c.k_minus;
                if params.n_rat() <= bound {
                    return Err(ModelError::Domain(format!(
                        "the improved decay estimates need n > m0 k^- = {bound}, got n = {}",
                        params.n
                    )));
                }
            }
            let e0 = m_gain - (a + jr * (two * params.sigma - c.k_minus)) / tkd;
            (e0, e0 + c.k_minus / tkd)
        }
        Corollary::C21 => {
            let e0 = m_gain - (a + jr * c.k_minus) / tkd;
            (e0, e0 + Rational::one())
        }
    };

    let reg0 = a + jr * (two * params.sigma - c.k_plus);
    let reg1 = (a + (jr - Rational::one()) * c.k_plus).max(Rational::zero());
    Ok(DecayPrediction {
        j,
        a,
        corollary,
        exponent_data0: e0,
        exponent_data1: e1,
        loss: Rational::zero(),
        regularity_data0: reg0,
        regularity_data1: reg1,
    })
}

/// Blow-up statement scope: both orders must be positive integers.
pub(crate) fn blowup_scope(params: &ModelParams) -> Result<(), ModelError> {
    if !params.sigma.is_integer() || !params.delta.is_integer() {
        return Err(ModelError::Scope(format!(
            "the blow-up result covers integer orders only, got sigma = {}, delta = {}",
            params.sigma, params.delta
        )));
    }
    Ok(())
}

/// Lifespan exponent: T_eps <= C eps^E with
/// E = -(2 sigma - k-)/(k- + 2 sigma (qbar + 1)/(p q) - n), qbar = max{p,q}.
pub fn lifespan_exponent(params: &ModelParams) -> Result<Rational, ModelError> {
    blowup_scope(params)?;
    let c = derive_constants(params);
    let qbar = params.p.max(params.q);
    let den = c.k_minus + rat(2, 1) * params.sigma * (qbar + Rational::one())
        / (params.p * params.q)
        - params.n_rat();
    if den <= Rational::zero() {
        return Err(ModelError::Domain(format!(
            "no power-law lifespan: k^- + 2 sigma (max{{p,q}}+1)/(pq) - n = {den} <= 0"
        )));
    }
    Ok(-(rat(2, 1) * params.sigma - c.k_minus) / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(
        sigma: (i64, i64),
        delta: (i64, i64),
        n: u32,
        p: (i64, i64),
        q: (i64, i64),
        m: (i64, i64),
    ) -> ModelParams {
        ModelParams::new(
            rat(sigma.0, sigma.1),
            rat(delta.0, delta.1),
            n,
            rat(p.0, p.1),
            rat(q.0, q.1),
            rat(m.0, m.1),
        )
        .unwrap()
    }

    /// The running example family: sigma = 3/2, delta = 1/8, m = 5/4.
    fn example_params(n: u32, p: (i64, i64), q: (i64, i64)) -> ModelParams {
        params((3, 2), (1, 8), n, p, q, (5, 4))
    }

    #[test]
    fn parse_rational_forms() {
        assert_eq!(parse_rational("3/2").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("10/4").unwrap(), rat(5, 2));
        assert_eq!(parse_rational("1.5").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("-0.25").unwrap(), rat(-1, 4));
        assert_eq!(parse_rational("2").unwrap(), rat(2, 1));
        assert_eq!(parse_rational(" .5 ").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-3/4").unwrap(), rat(-3, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1.2.3").is_err());
    }

    #[test]
    fn constants_running_example() {
        let c = derive_constants(&example_params(3, (2, 1), (4, 1)));
        assert_eq!(c.k_minus, rat(1, 4));
        assert_eq!(c.k_plus, rat(3, 2));
        assert_eq!(c.m0, Some(rat(10, 3)));
        assert_eq!(c.regime, Regime::BelowHalf);
    }

    #[test]
    fn constants_half_and_above() {
        let c = derive_constants(&params((1, 1), (1, 2), 3, (2, 1), (2, 1), (1, 1)));
        assert_eq!((c.k_minus, c.k_plus), (rat(1, 1), rat(1, 1)));
        assert_eq!(c.m0, Some(rat(2, 1)));
        assert_eq!(c.regime, Regime::Half);

        let c = derive_constants(&params((2, 1), (3, 2), 3, (2, 1), (2, 1), (1, 1)));
        assert_eq!((c.k_minus, c.k_plus), (rat(2, 1), rat(3, 1)));
        assert_eq!(c.regime, Regime::AboveHalf);
    }

    #[test]
    fn m0_endpoint_is_none() {
        let c = derive_constants(&params((1, 1), (1, 2), 3, (2, 1), (2, 1), (2, 1)));
        assert_eq!(c.m0, None);
    }

    #[test]
    fn critical_exponent_golden() {
        assert_eq!(
            critical_exponent(&example_params(3, (2, 1), (4, 1))).unwrap(),
            rat(103, 43)
        );
        assert_eq!(
            critical_exponent(&example_params(1, (2, 1), (4, 1))).unwrap(),
            rat(71, 11)
        );
        // sigma=1, delta=1/2, m=1, n=2: 1 + 2/(2-1) = 3
        assert_eq!(
            critical_exponent(&params((1, 1), (1, 2), 2, (2, 1), (2, 1), (1, 1))).unwrap(),
            rat(3, 1)
        );
    }

    #[test]
    fn critical_exponent_needs_positive_denominator() {
        // sigma=2, delta=3/2, m=1: k- = 2, n = 2 hits the boundary n = m k-
        let p = params((2, 1), (3, 2), 2, (2, 1), (2, 1), (1, 1));
        assert!(matches!(
            critical_exponent(&p),
            Err(ModelError::Domain(_))
        ));
    }

    #[test]
    fn loss_of_decay_golden() {
        // clamped to zero: eps(4) = 1 - 9 + 4 + 1/1000 < 0
        let p1 = params((1, 1), (1, 2), 3, (4, 1), (4, 1), (1, 1));
        assert_eq!(
            loss_of_decay(&p1, rat(4, 1), EPS_SLACK_DEFAULT),
            Rational::zero()
        );
        // positive branch: 17/55 + 1/1000
        let p2 = example_params(3, (2, 1), (3, 1));
        assert_eq!(
            loss_of_decay(&p2, rat(2, 1), EPS_SLACK_DEFAULT),
            rat(17, 55) + rat(1, 1000)
        );
    }

    #[test]
    fn decay_prediction_golden() {
        // sigma=1, delta=1/2, m=1, n=3, j=0, a=0: (-3/2, -1/2)
        let p = params((1, 1), (1, 2), 3, (2, 1), (2, 1), (1, 1));
        let d = decay_prediction(&p, 0, Rational::zero(), Corollary::C22).unwrap();
        assert_eq!(d.exponent_data0, rat(-3, 2));
        assert_eq!(d.exponent_data1, rat(-1, 2));
        assert_eq!(d.regularity_data0, Rational::zero());
        assert_eq!(d.regularity_data1, Rational::zero());

        // same but m=2: L^2-L^2 branch, growth permitted for the data-1 norm
        let p = params((1, 1), (1, 2), 3, (2, 1), (2, 1), (2, 1));
        let d = decay_prediction(&p, 0, Rational::zero(), Corollary::C22).unwrap();
        assert_eq!(d.exponent_data0, Rational::zero());
        assert_eq!(d.exponent_data1, Rational::one());
    }

    #[test]
    fn decay_prediction_dimension_guard() {
        // sigma=2, delta=1, m=1: m0 k- = 4, n=1 fails for C22 but C21 is fine
        let p = params((2, 1), (1, 1), 1, (2, 1), (2, 1), (1, 1));
        assert!(matches!(
            decay_prediction(&p, 1, Rational::zero(), Corollary::C22),
            Err(ModelError::Domain(_))
        ));
        let d = decay_prediction(&p, 1, Rational::zero(), Corollary::C21).unwrap();
        assert_eq!(d.exponent_data1 - d.exponent_data0, Rational::one());
    }

    #[test]
    fn decay_prediction_regularity_orders() {
        // j=1 data-0 order: a + 2 sigma - k+; data-1 order: a
        let p = example_params(3, (2, 1), (4, 1));
        let d = decay_prediction(&p, 1, rat(1, 2), Corollary::C22).unwrap();
        assert_eq!(d.regularity_data0, rat(1, 2) + rat(3, 1) - rat(3, 2));
        assert_eq!(d.regularity_data1, rat(1, 2));
        // j=0: data-1 order clamps at zero
        let d = decay_prediction(&p, 0, rat(1, 2), Corollary::C22).unwrap();
        assert_eq!(d.regularity_data1, Rational::zero());
    }

    #[test]
    fn lifespan_exponent_golden() {
        let p = params((2, 1), (1, 1), 1, (2, 1), (2, 1), (1, 1));
        assert_eq!(lifespan_exponent(&p).unwrap(), rat(-1, 2));

        let p = params((2, 1), (1, 1), 1, (2, 1), (3, 1), (1, 1));
        assert_eq!(lifespan_exponent(&p).unwrap(), rat(-6, 11));

        let p = params((2, 1), (1, 1), 6, (2, 1), (2, 1), (1, 1));
        assert!(matches!(lifespan_exponent(&p), Err(ModelError::Domain(_))));

        // large-exponent limit heads towards -2
        let p = params((2, 1), (1, 1), 1, (100, 1), (100, 1), (1, 1));
        let e = lifespan_exponent(&p).unwrap();
        let f = *e.numer() as f64 / *e.denom() as f64;
        assert!((f + 1.9225).abs() < 5e-4, "got {f}");
    }

    #[test]
    fn lifespan_needs_integer_orders() {
        let p = params((1, 1), (1, 2), 1, (2, 1), (2, 1), (1, 1));
        assert!(matches!(lifespan_exponent(&p), Err(ModelError::Scope(_))));
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(rat(1, 2), rat(1, 4), 1, rat(2, 1), rat(2, 1), rat(1, 1)).is_err());
        assert!(ModelParams::new(rat(1, 1), rat(1, 1), 1, rat(2, 1), rat(2, 1), rat(1, 1)).is_err());
        assert!(ModelParams::new(rat(1, 1), rat(1, 2), 0, rat(2, 1), rat(2, 1), rat(1, 1)).is_err());
        assert!(ModelParams::new(rat(1, 1), rat(1, 2), 1, rat(1, 1), rat(2, 1), rat(1, 1)).is_err());
        assert!(ModelParams::new(rat(1, 1), rat(1, 2), 1, rat(2, 1), rat(2, 1), rat(5, 2)).is_err());
        assert!(ModelParams::new(rat(1, 1), rat(1, 2), 1, rat(2, 1), rat(2, 1), rat(2, 1)).is_ok());
        let p = params((1, 1), (1, 2), 1, (2, 1), (2, 1), (1, 1));
        assert!(p.clone().with_regularity(rat(-1, 2), rat(1, 1)).is_err());
        assert!(p.with_regularity(rat(1, 2), rat(1, 1)).is_ok());
    }
}
