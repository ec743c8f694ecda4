//! Admissible-region verdicts.
//!
//! Each theorem's hypotheses are evaluated literally, strict and non-strict
//! inequalities exactly as stated, in rational arithmetic. All constraints
//! are checked (no short-circuit) so phase diagrams can report every failing
//! condition at a grid point.

use super::{blowup_scope, derive_constants, rat, DerivedConstants, ModelError, ModelParams, Rational};
use num_traits::{One, Zero};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Theorem {
    /// Energy solutions with loss of decay: min{p,q} at or below the critical
    /// exponent, max above it.
    T1A,
    /// Energy solutions, both exponents above critical, full decay.
    T1B,
    /// Low-regularity Sobolev solutions (0 < s1 <= s2 < k+), loss of decay.
    T2A,
    /// Low-regularity Sobolev solutions, both exponents above critical.
    T2B,
    /// Energy solutions with higher regularity (k+ < s1 <= s2 <= n/2 + k+).
    T3,
    /// Large regular solutions, s1 > n/2 + k+ (embedding into L^infinity).
    T4,
    /// Large regular solutions of the derivative-coupled system, single s.
    T5,
    /// Large regular solutions of the mixed coupling, s1 >= s2 > n/2 + k+.
    T6,
    /// Finite-time blow-up region (test function method).
    Blowup,
}

impl Theorem {
    pub const ALL: [Theorem; 9] = [
        Theorem::T1A,
        Theorem::T1B,
        Theorem::T2A,
        Theorem::T2B,
        Theorem::T3,
        Theorem::T4,
        Theorem::T5,
        Theorem::T6,
        Theorem::Blowup,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::T1A => "T1A",
            Theorem::T1B => "T1B",
            Theorem::T2A => "T2A",
            Theorem::T2B => "T2B",
            Theorem::T3 => "T3",
            Theorem::T4 => "T4",
            Theorem::T5 => "T5",
            Theorem::T6 => "T6",
            Theorem::Blowup => "Blowup",
        }
    }

    pub fn needs_regularity(self) -> bool {
        matches!(
            self,
            Theorem::T2A | Theorem::T2B | Theorem::T3 | Theorem::T4 | Theorem::T5 | Theorem::T6
        )
    }
}

impl std::str::FromStr for Theorem {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        match key.as_str() {
            "t1a" | "1a" => Ok(Theorem::T1A),
            "t1b" | "1b" => Ok(Theorem::T1B),
            "t2a" | "2a" => Ok(Theorem::T2A),
            "t2b" | "2b" => Ok(Theorem::T2B),
            "t3" | "3" => Ok(Theorem::T3),
            "t4" | "4" => Ok(Theorem::T4),
            "t5" | "5" => Ok(Theorem::T5),
            "t6" | "6" => Ok(Theorem::T6),
            "blowup" => Ok(Theorem::Blowup),
            _ => Err(ModelError::Invalid {
                field: "theorem",
                msg: format!("unknown theorem `{s}`"),
            }),
        }
    }
}

/// One failed constraint with both sides evaluated.
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub id: &'static str,
    pub constraint: String,
    pub lhs: f64,
    pub rhs: f64,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: `{}` fails with lhs = {}, rhs = {}",
            self.id, self.constraint, self.lhs, self.rhs
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RegionVerdict {
    pub theorem: Theorem,
    pub admissible: bool,
    pub violated: Vec<Violation>,
}

fn to_f(x: Rational) -> f64 {
    super::ratio_f64(x)
}

struct Checks {
    theorem: Theorem,
    violated: Vec<Violation>,
}

impl Checks {
    fn new(theorem: Theorem) -> Self {
        Self {
            theorem,
            violated: Vec::new(),
        }
    }

    fn push(&mut self, id: &'static str, constraint: &str, lhs: Rational, rhs: Rational) {
        self.violated.push(Violation {
            id,
            constraint: constraint.to_string(),
            lhs: to_f(lhs),
            rhs: to_f(rhs),
        });
    }

    fn lt(&mut self, id: &'static str, constraint: &str, lhs: Rational, rhs: Rational) {
        if !(lhs < rhs) {
            self.push(id, constraint, lhs, rhs);
        }
    }

    fn le(&mut self, id: &'static str, constraint: &str, lhs: Rational, rhs: Rational) {
        if !(lhs <= rhs) {
            self.push(id, constraint, lhs, rhs);
        }
    }

    fn gt(&mut self, id: &'static str, constraint: &str, lhs: Rational, rhs: Rational) {
        if !(lhs > rhs) {
            self.push(id, constraint, lhs, rhs);
        }
    }

    fn ge(&mut self, id: &'static str, constraint: &str, lhs: Rational, rhs: Rational) {
        if !(lhs >= rhs) {
            self.push(id, constraint, lhs, rhs);
        }
    }

    fn eq(&mut self, id: &'static str, constraint: &str, lhs: Rational, rhs: Rational) {
        if lhs != rhs {
            self.push(id, constraint, lhs, rhs);
        }
    }

    fn verdict(self) -> RegionVerdict {
        RegionVerdict {
            theorem: self.theorem,
            admissible: self.violated.is_empty(),
            violated: self.violated,
        }
    }
}

fn reg_pair(params: &ModelParams, th: Theorem) -> Result<(Rational, Rational), ModelError> {
    match (params.s1, params.s2) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(ModelError::MissingRegularity(th.name())),
    }
}

/// Shared hypotheses of the global-existence theorems: m strictly below 2 and
/// the dimension restriction n > m0 k-.
fn common_scope(ck: &mut Checks, params: &ModelParams, c: &DerivedConstants) {
    ck.lt("m_range", "m < 2", params.m, rat(2, 1));
    if let Some(m0) = c.m0 {
        ck.gt("dimension", "n > m0 k^-", params.n_rat(), m0 * c.k_minus);
    }
}

/// Critical exponent if defined, else records the failed precondition.
fn critical_checked(
    ck: &mut Checks,
    params: &ModelParams,
    c: &DerivedConstants,
) -> Option<Rational> {
    let den = params.n_rat() - params.m * c.k_minus;
    if den <= Rational::zero() {
        ck.gt(
            "critical_defined",
            "n > m k^- (critical exponent defined)",
            params.n_rat(),
            params.m * c.k_minus,
        );
        return None;
    }
    Some(Rational::one() + params.m * (c.k_plus + params.sigma) / den)
}

/// Gagliardo-Nirenberg window for the energy-space theorems: exponents in
/// [2/m, inf) for n <= 2k+, in [2/m, n/(n - 2k+)] for n in (2k+, 4k+/(2-m)].
fn gn_energy(ck: &mut Checks, params: &ModelParams, c: &DerivedConstants) {
    let n = params.n_rat();
    let lower = rat(2, 1) / params.m;
    let two_kp = rat(2, 1) * c.k_plus;
    let cap = (params.m < rat(2, 1)).then(|| rat(4, 1) * c.k_plus / (rat(2, 1) - params.m));
    let within_cap = cap.is_none_or(|cp| n <= cp);
    if n <= two_kp {
        ck.ge("gn_lower_p", "2/m <= p", params.p, lower);
        ck.ge("gn_lower_q", "2/m <= q", params.q, lower);
    } else if within_cap {
        ck.ge("gn_lower_p", "2/m <= p", params.p, lower);
        ck.ge("gn_lower_q", "2/m <= q", params.q, lower);
        let upper = n / (n - two_kp);
        ck.le("gn_upper_p", "p <= n/(n - 2 k^+)", params.p, upper);
        ck.le("gn_upper_q", "q <= n/(n - 2 k^+)", params.q, upper);
    } else {
        ck.le("gn_dimension", "n <= 4 k^+/(2 - m)", n, cap.unwrap());
    }
}

/// Gagliardo-Nirenberg window below the energy regularity
/// (0 < s1 <= s2 < k+), with component-wise caps.
fn gn_sobolev(
    ck: &mut Checks,
    params: &ModelParams,
    s1: Rational,
    s2: Rational,
) {
    let n = params.n_rat();
    let lower = rat(2, 1) / params.m;
    let cap = (params.m < rat(2, 1)).then(|| rat(4, 1) * s1 / (rat(2, 1) - params.m));
    let within_cap = cap.is_none_or(|cp| n <= cp);
    ck.ge("gn_lower_p", "2/m <= p", params.p, lower);
    ck.ge("gn_lower_q", "2/m <= q", params.q, lower);
    if n <= rat(2, 1) * s1 {
        // no caps
    } else if n <= rat(2, 1) * s2 && within_cap {
        ck.le(
            "gn_upper_q",
            "q <= n/(n - 2 s1)",
            params.q,
            n / (n - rat(2, 1) * s1),
        );
    } else if n > rat(2, 1) * s2 && within_cap {
        ck.le(
            "gn_upper_p",
            "p <= n/(n - 2 s2)",
            params.p,
            n / (n - rat(2, 1) * s2),
        );
        ck.le(
            "gn_upper_q",
            "q <= n/(n - 2 s1)",
            params.q,
            n / (n - rat(2, 1) * s1),
        );
    } else {
        ck.le("gn_dimension", "n <= 4 s1/(2 - m)", n, cap.unwrap());
    }
}

/// Fractional-embedding window above the energy regularity
/// (k+ < s1 <= s2): strict integer-gap lower bounds, caps from n - 2s.
fn gn_embedding(
    ck: &mut Checks,
    params: &ModelParams,
    c: &DerivedConstants,
    s1: Rational,
    s2: Rational,
) {
    let n = params.n_rat();
    let one = Rational::one();
    ck.gt(
        "gn_lower_p",
        "p > 1 + ceil(s1 - k^+)",
        params.p,
        one + (s1 - c.k_plus).ceil(),
    );
    ck.gt(
        "gn_lower_q",
        "q > 1 + ceil(s2 - k^+)",
        params.q,
        one + (s2 - c.k_plus).ceil(),
    );
    let two_kp = rat(2, 1) * c.k_plus;
    if n <= rat(2, 1) * s1 {
        // no caps
    } else if n <= rat(2, 1) * s2 {
        ck.le(
            "gn_upper_q",
            "q <= 1 + 2 k^+/(n - 2 s1)",
            params.q,
            one + two_kp / (n - rat(2, 1) * s1),
        );
    } else {
        ck.le(
            "gn_upper_p",
            "p <= 1 + 2 k^+/(n - 2 s2)",
            params.p,
            one + two_kp / (n - rat(2, 1) * s2),
        );
        ck.le(
            "gn_upper_q",
            "q <= 1 + 2 k^+/(n - 2 s1)",
            params.q,
            one + two_kp / (n - rat(2, 1) * s1),
        );
    }
}

/// Loss-of-decay exponent block: the dimension-coupled condition plus the
/// split min{p,q} <= critical < max{p,q}.
fn exponent_split(ck: &mut Checks, params: &ModelParams, c: &DerivedConstants) {
    let pmin = params.p.min(params.q);
    let pmax = params.p.max(params.q);
    let lhs = params.m
        * (c.k_minus
            + (c.k_plus + params.sigma) * (Rational::one() + pmax) / (params.p * params.q - Rational::one()));
    ck.lt(
        "exponent_dim",
        "m(k^- + (k^+ + sigma)(1 + max{p,q})/(pq - 1)) < n",
        lhs,
        params.n_rat(),
    );
    if let Some(pc) = critical_checked(ck, params, c) {
        ck.le(
            "min_below_critical",
            "min{p,q} <= 1 + m(k^+ + sigma)/(n - m k^-)",
            pmin,
            pc,
        );
        ck.lt(
            "critical_below_max",
            "1 + m(k^+ + sigma)/(n - m k^-) < max{p,q}",
            pc,
            pmax,
        );
    }
}

/// Full-decay exponent block: both exponents strictly above critical.
fn exponent_above(ck: &mut Checks, params: &ModelParams, c: &DerivedConstants) {
    if let Some(pc) = critical_checked(ck, params, c) {
        ck.gt(
            "min_above_critical",
            "min{p,q} > 1 + m(k^+ + sigma)/(n - m k^-)",
            params.p.min(params.q),
            pc,
        );
    }
}

/// p >= 1 + m s1/(n - m k^-) and q >= 1 + m s2/(n - m k^-).
fn regularity_power_bounds(
    ck: &mut Checks,
    params: &ModelParams,
    c: &DerivedConstants,
    s1: Rational,
    s2: Rational,
) {
    let den = params.n_rat() - params.m * c.k_minus;
    if den <= Rational::zero() {
        return; // critical_checked already recorded the failed precondition
    }
    let one = Rational::one();
    ck.ge(
        "exponent_p",
        "p >= 1 + m s1/(n - m k^-)",
        params.p,
        one + params.m * s1 / den,
    );
    ck.ge(
        "exponent_q",
        "q >= 1 + m s2/(n - m k^-)",
        params.q,
        one + params.m * s2 / den,
    );
}

/// Denominator of the derivative-coupling bounds: n + 2m(k+ - 2 delta),
/// always positive since k+ >= 2 delta.
fn derivative_gain_den(params: &ModelParams, c: &DerivedConstants) -> Rational {
    params.n_rat() + rat(2, 1) * params.m * (c.k_plus - rat(2, 1) * params.delta)
}

pub fn check_region(params: &ModelParams, theorem: Theorem) -> Result<RegionVerdict, ModelError> {
    if theorem == Theorem::Blowup {
        return blowup_condition(params);
    }
    let c = derive_constants(params);
    let one = Rational::one();
    let half = rat(1, 2);
    let mut ck = Checks::new(theorem);
    common_scope(&mut ck, params, &c);

    match theorem {
        Theorem::T1A => {
            gn_energy(&mut ck, params, &c);
            exponent_split(&mut ck, params, &c);
        }
        Theorem::T1B => {
            gn_energy(&mut ck, params, &c);
            exponent_above(&mut ck, params, &c);
        }
        Theorem::T2A | Theorem::T2B => {
            let (s1, s2) = reg_pair(params, theorem)?;
            ck.gt("reg_positive", "0 < s1", s1, Rational::zero());
            ck.ge("reg_order", "s1 <= s2", s2, s1);
            ck.lt("reg_below_energy", "s2 < k^+", s2, c.k_plus);
            gn_sobolev(&mut ck, params, s1, s2);
            if theorem == Theorem::T2A {
                exponent_split(&mut ck, params, &c);
            } else {
                exponent_above(&mut ck, params, &c);
            }
        }
        Theorem::T3 => {
            let (s1, s2) = reg_pair(params, theorem)?;
            ck.gt("reg_above_energy", "k^+ < s1", s1, c.k_plus);
            ck.ge("reg_order", "s1 <= s2", s2, s1);
            ck.le(
                "reg_cap",
                "s2 <= n/2 + k^+",
                s2,
                half * params.n_rat() + c.k_plus,
            );
            ck.lt("reg_gap", "s2 - s1 < k^+", s2 - s1, c.k_plus);
            gn_embedding(&mut ck, params, &c, s1, s2);
            exponent_above(&mut ck, params, &c);
            regularity_power_bounds(&mut ck, params, &c, s1, s2);
        }
        Theorem::T4 => {
            let (s1, s2) = reg_pair(params, theorem)?;
            ck.gt(
                "reg_above_embedding",
                "s1 > n/2 + k^+",
                s1,
                half * params.n_rat() + c.k_plus,
            );
            ck.ge("reg_order", "s1 <= s2", s2, s1);
            ck.le("reg_gap", "s2 - s1 <= k^+", s2 - s1, c.k_plus);
            ck.gt(
                "exponent_p_lower",
                "p > 1 + max{s1 - k^+, 1}",
                params.p,
                one + (s1 - c.k_plus).max(one),
            );
            ck.gt(
                "exponent_q_lower",
                "q > 1 + max{s2 - k^+, 1}",
                params.q,
                one + (s2 - c.k_plus).max(one),
            );
            exponent_above(&mut ck, params, &c);
            regularity_power_bounds(&mut ck, params, &c, s1, s2);
        }
        Theorem::T5 => {
            let s = params
                .s1
                .ok_or(ModelError::MissingRegularity(theorem.name()))?;
            if let Some(s2) = params.s2 {
                ck.eq("reg_single", "s1 = s2 (single regularity order)", s2, s);
            }
            ck.gt(
                "reg_above_embedding",
                "s > n/2 + k^+",
                s,
                half * params.n_rat() + c.k_plus,
            );
            let pmin = params.p.min(params.q);
            let lower = (rat(2, 1) * params.m * params.delta / params.n_rat())
                .max(s - c.k_plus)
                .max(one);
            ck.gt(
                "exponent_min_lower",
                "min{p,q} > 1 + max{2 m delta/n, s - k^+, 1}",
                pmin,
                one + lower,
            );
            ck.ge(
                "exponent_min_gain",
                "min{p,q} >= 1 + m(s + k^- - 2 sigma)/(n + 2m(k^+ - 2 delta))",
                pmin,
                one + params.m * (s + c.k_minus - rat(2, 1) * params.sigma)
                    / derivative_gain_den(params, &c),
            );
        }
        Theorem::T6 => {
            let (s1, s2) = reg_pair(params, theorem)?;
            ck.gt(
                "reg_above_embedding",
                "s2 > n/2 + k^+",
                s2,
                half * params.n_rat() + c.k_plus,
            );
            ck.ge("reg_order", "s2 <= s1", s1, s2);
            ck.le("reg_gap", "s1 - s2 <= k^+", s1 - s2, c.k_plus);
            if let Some(pc) = critical_checked(&mut ck, params, &c) {
                ck.gt(
                    "exponent_p_lower",
                    "p > 1 + max{m(k^+ + sigma)/(n - m k^-), s1 - k^+, 1}",
                    params.p,
                    pc.max(one + (s1 - c.k_plus).max(one)),
                );
                ck.ge(
                    "exponent_p",
                    "p >= 1 + m s1/(n - m k^-)",
                    params.p,
                    one + params.m * s1 / (params.n_rat() - params.m * c.k_minus),
                );
            }
            ck.gt(
                "exponent_q_lower",
                "q > 1 + max{2 m delta/n, s2 - k^+, 1}",
                params.q,
                one + (rat(2, 1) * params.m * params.delta / params.n_rat())
                    .max(s2 - c.k_plus)
                    .max(one),
            );
            ck.ge(
                "exponent_q",
                "q >= 1 + m(s2 + k^- - 2 sigma)/(n + 2m(k^+ - 2 delta))",
                params.q,
                one + params.m * (s2 + c.k_minus - rat(2, 1) * params.sigma)
                    / derivative_gain_den(params, &c),
            );
        }
        Theorem::Blowup => unreachable!(),
    }
    Ok(ck.verdict())
}

/// Blow-up verdict from the test-function argument: requires integer orders
/// and asserts blow-up (for sign-positive data) when
/// n <= k^- + 2 sigma (1 + max{p,q})/(pq - 1).
pub fn blowup_condition(params: &ModelParams) -> Result<RegionVerdict, ModelError> {
    blowup_scope(params)?;
    let c = derive_constants(params);
    let mut ck = Checks::new(Theorem::Blowup);
    let rhs = c.k_minus
        + rat(2, 1) * params.sigma * (Rational::one() + params.p.max(params.q))
            / (params.p * params.q - Rational::one());
    ck.le(
        "dimension_cap",
        "n <= k^- + 2 sigma (1 + max{p,q})/(pq - 1)",
        params.n_rat(),
        rhs,
    );
    Ok(ck.verdict())
}

#[derive(Debug, Clone)]
pub struct PhaseRow {
    pub p: Rational,
    pub q: Rational,
    pub theorem: Theorem,
    pub admissible: bool,
    pub first_violated: Option<&'static str>,
}

/// Evaluates every requested theorem on a (p, q) grid. Theorems that error
/// for the base parameters (missing regularity, out-of-scope orders) are
/// skipped entirely; errors cannot depend on p or q.
pub fn phase_rows(
    base: &ModelParams,
    ps: &[Rational],
    qs: &[Rational],
    theorems: &[Theorem],
) -> Vec<PhaseRow> {
    let mut rows = Vec::new();
    for &p in ps {
        for &q in qs {
            let mut pm = base.clone();
            pm.p = p;
            pm.q = q;
            for &t in theorems {
                if let Ok(v) = check_region(&pm, t) {
                    rows.push(PhaseRow {
                        p,
                        q,
                        theorem: t,
                        admissible: v.admissible,
                        first_violated: v.violated.first().map(|w| w.id),
                    });
                }
            }
        }
    }
    rows
}
