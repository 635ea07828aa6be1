//! A ranking of lotteries that stays sensitive to rare catastrophes.
//!
//! Lotteries are step functions `f` on the real line. The ranking blends an
//! ordinary expectation against a density `φ₁` with the limit of `f` at 0,
//! which plays the role of a purely finitely additive measure concentrated on
//! every neighbourhood of 0:
//!
//! ```text
//! W(f) = λ·∫ f(x) φ₁(x) dx + (1 - λ)·lim_{x→0} f(x)
//! ```
//!
//! With `λ = 1` this is plain expected utility. For the pill deal with linear
//! preferences it has the closed form [`w_lambda`], whose `p → 0` limit
//! `λl + r` stays below `l` whenever `λ < (l - r)/l`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the total mass of a [`StepDensity`].
pub const DENSITY_MASS_TOL: f64 = 1e-12;

/// A piecewise-constant function on ℝ.
///
/// `values[i]` holds on `[breakpoints[i-1], breakpoints[i])`, with the first
/// piece extending to `-∞` and the last to `+∞`. A breakpoint belongs to the
/// piece on its right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != breakpoints.len() + 1 {
            return Err(Error::InvalidStep(format!(
                "{} breakpoints need {} values, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                values.len()
            )));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidStep("breakpoints and values must be finite".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidStep("breakpoints must be strictly increasing".into()));
        }
        Ok(Self { breakpoints, values })
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::new(vec![], vec![c])
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Index of the piece containing `x`.
    fn piece_index(&self, x: f64) -> usize {
        self.breakpoints.partition_point(|&b| b <= x)
    }

    pub fn value_at(&self, x: f64) -> f64 {
        self.values[self.piece_index(x)]
    }

    /// Essential supremum of `|f|`.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `α·f + β·g` on the union of both breakpoint sets.
    pub fn linear_combination(alpha: f64, f: &StepFunction, beta: f64, g: &StepFunction) -> Result<StepFunction> {
        let breakpoints = merge_breakpoints(&f.breakpoints, &g.breakpoints);
        let mut values = Vec::with_capacity(breakpoints.len() + 1);
        let first = breakpoints.first().map_or(0.0, |b| b - 1.0);
        values.push(alpha * f.value_at(first) + beta * g.value_at(first));
        for &b in &breakpoints {
            values.push(alpha * f.value_at(b) + beta * g.value_at(b));
        }
        StepFunction::new(breakpoints, values)
    }
}

fn merge_breakpoints(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) if x <= y => {
                i += 1;
                if x == y {
                    j += 1;
                }
                x
            }
            (Some(_), Some(&y)) => {
                j += 1;
                y
            }
            (Some(&x), None) => {
                i += 1;
                x
            }
            (None, Some(&y)) => {
                j += 1;
                y
            }
            (None, None) => unreachable!(),
        };
        out.push(next);
    }
    out
}

/// A piecewise-constant probability density with bounded support.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct StepDensity(StepFunction);

impl StepDensity {
    pub fn new(f: StepFunction) -> Result<Self> {
        if f.values.iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidStep("density values must be >= 0".into()));
        }
        if f.values[0] != 0.0 || f.values[f.values.len() - 1] != 0.0 {
            return Err(Error::InvalidStep("density must vanish outside a bounded interval".into()));
        }
        let mass: f64 = f
            .breakpoints
            .windows(2)
            .zip(&f.values[1..])
            .map(|(w, v)| v * (w[1] - w[0]))
            .sum();
        if (mass - 1.0).abs() > DENSITY_MASS_TOL {
            return Err(Error::InvalidStep(format!("density integrates to {mass}, not 1")));
        }
        Ok(Self(f))
    }

    pub fn as_step(&self) -> &StepFunction {
        &self.0
    }

    /// Largest density value.
    pub fn max_value(&self) -> f64 {
        self.0.sup_norm()
    }

    /// `[first breakpoint, last breakpoint]`.
    pub fn support(&self) -> (f64, f64) {
        let b = &self.0.breakpoints;
        (b[0], b[b.len() - 1])
    }

    pub fn value_at(&self, x: f64) -> f64 {
        self.0.value_at(x)
    }
}

/// Uniform density `p` on `[0, 1/p]`: the pile of `1/p` pills, one of them on `[0, 1)`.
pub fn pill_density(p: f64) -> Result<StepDensity> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidInput(format!("probability must lie in (0, 1), got {p}")));
    }
    StepDensity::new(StepFunction::new(vec![0.0, 1.0 / p], vec![0.0, p, 0.0])?)
}

/// The linear-preference pill lottery: `r` for `x < 1`, `l + r` for `x ≥ 1`.
pub fn pill_step_lottery(l: f64, r: f64) -> Result<StepFunction> {
    if !(l > 0.0 && r > 0.0) {
        return Err(Error::InvalidInput(format!("l and r must be > 0, got l = {l}, r = {r}")));
    }
    StepFunction::new(vec![1.0], vec![r, l + r])
}

/// `∫ f(x) φ₁(x) dx`, exact for step functions.
pub fn lebesgue_part(f: &StepFunction, density: &StepDensity) -> f64 {
    let phi = density.as_step();
    let (lo, hi) = density.support();
    let mut cuts: Vec<f64> = merge_breakpoints(&f.breakpoints, &phi.breakpoints)
        .into_iter()
        .filter(|&b| b >= lo && b <= hi)
        .collect();
    cuts.dedup();
    cuts.windows(2)
        .map(|w| {
            let phi_v = phi.value_at(w[0]);
            if phi_v == 0.0 {
                0.0
            } else {
                f.value_at(w[0]) * phi_v * (w[1] - w[0])
            }
        })
        .sum()
}

/// `lim_{x→0} f(x)`, defined when `f` is constant on a punctured neighbourhood of 0.
pub fn limit_at_zero(f: &StepFunction) -> Result<f64> {
    let idx = f.piece_index(0.0);
    if idx > 0 && f.breakpoints[idx - 1] == 0.0 {
        let (left, right) = (f.values[idx - 1], f.values[idx]);
        if left != right {
            return Err(Error::NoLimit { left, right });
        }
    }
    Ok(f.values[idx])
}

/// Weight `λ` on the expectation against a density; `1 - λ` goes to the limit at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct CatastropheRanking {
    lambda: f64,
    density: StepDensity,
}

impl CatastropheRanking {
    /// `λ = 1` is pure expected utility, `λ = 0` looks only at the catastrophe.
    pub fn new(lambda: f64, density: StepDensity) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(Self { lambda, density })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn density(&self) -> &StepDensity {
        &self.density
    }

    /// `W(f) = λ·∫ f φ₁ + (1 - λ)·lim_{x→0} f(x)`.
    pub fn rank_value(&self, f: &StepFunction) -> Result<f64> {
        let tail = limit_at_zero(f)?;
        Ok(self.lambda * lebesgue_part(f, &self.density) + (1.0 - self.lambda) * tail)
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("lambda must lie in [0, 1], got {lambda}")))
    }
}

/// `W_λ(p) = λ[p·r + (1-p)(l+r)] + (1-λ)·r`.
pub fn w_lambda(l: f64, r: f64, p: f64, lambda: f64) -> f64 {
    lambda * (p * r + (1.0 - p) * (l + r)) + (1.0 - lambda) * r
}

/// `lim_{p→0} W_λ(p) = λl + r`.
pub fn w_lambda_limit(l: f64, r: f64, lambda: f64) -> f64 {
    lambda * l + r
}

/// `λ₀ = (l - r)/l`: below it the deal is refused at every `p`.
pub fn lambda_threshold(l: f64, r: f64) -> Result<f64> {
    if !(r > 0.0 && l > r && l.is_finite()) {
        return Err(Error::InvalidThreshold { l, r });
    }
    Ok((l - r) / l)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum AgentClass {
    /// `λl + r ≤ l`: no probability is small enough.
    #[serde(rename = "never")]
    NeverAccepts,
    /// Accepts for every `p < p_star`; `p_star < 1` since `W_λ(1) = r < l`.
    AcceptsBelow { p_star: f64 },
}

/// Classifies an agent with weight `λ` facing the pill deal.
///
/// At `λ = λ₀` the limit equals `l` but `W_λ(p) < l` for all `p > 0`, so the
/// agent never accepts. Above it `p* = ((λ-1)l + r)/(λl)` solves `W_λ(p*) = l`.
pub fn classify_agent(l: f64, r: f64, lambda: f64) -> Result<AgentClass> {
    check_lambda(lambda)?;
    let lambda0 = lambda_threshold(l, r)?;
    if lambda <= lambda0 {
        return Ok(AgentClass::NeverAccepts);
    }
    let p_star = ((lambda - 1.0) * l + r) / (lambda * l);
    Ok(AgentClass::AcceptsBelow { p_star })
}

/// JSON record for a classification: `{"lambda", "lambda0", "class", "p_star"}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub lambda: f64,
    pub lambda0: f64,
    #[serde(flatten)]
    pub class: AgentClass,
}

pub fn classification_record(l: f64, r: f64, lambda: f64) -> Result<Classification> {
    Ok(Classification { lambda, lambda0: lambda_threshold(l, r)?, class: classify_agent(l, r, lambda)? })
}

/// `f` with the value on `[-eps, eps)` replaced by `new_value`.
///
/// Models a catastrophe of vanishing probability mass near 0.
pub fn modify_near_zero(f: &StepFunction, new_value: f64, eps: f64) -> Result<StepFunction> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidEps { eps, reason: "must be positive and finite".into() });
    }
    if !new_value.is_finite() {
        return Err(Error::InvalidStep(format!("patch value {new_value} is not finite")));
    }
    let idx = f.piece_index(0.0);
    if idx > 0 && f.breakpoints[idx - 1] == 0.0 {
        return Err(Error::InvalidEps { eps, reason: "0 is a breakpoint of f".into() });
    }
    let left = if idx > 0 { f.breakpoints[idx - 1] } else { f64::NEG_INFINITY };
    let right = f.breakpoints.get(idx).copied().unwrap_or(f64::INFINITY);
    if -eps <= left || eps >= right {
        return Err(Error::InvalidEps { eps, reason: format!("reaches a breakpoint of f in ({left}, {right})") });
    }
    let mut breakpoints = f.breakpoints.clone();
    let mut values = f.values.clone();
    let v = values[idx];
    breakpoints.splice(idx..idx, [-eps, eps]);
    values.splice(idx..=idx, [v, new_value, v]);
    StepFunction::new(breakpoints, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const L: f64 = 3e6;
    const R: f64 = 2.2e5;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn step_validation() {
        assert!(StepFunction::new(vec![1.0], vec![1.0]).is_err());
        assert!(StepFunction::new(vec![1.0, 1.0], vec![0.0, 1.0, 2.0]).is_err());
        assert!(StepFunction::new(vec![2.0, 1.0], vec![0.0, 1.0, 2.0]).is_err());
        assert!(StepFunction::new(vec![f64::INFINITY], vec![0.0, 1.0]).is_err());
        let bad_mass = StepFunction::new(vec![0.0, 1.0], vec![0.0, 0.5, 0.0]).unwrap();
        assert!(StepDensity::new(bad_mass).is_err());
        let unbounded = StepFunction::new(vec![0.0], vec![0.0, 1.0]).unwrap();
        assert!(StepDensity::new(unbounded).is_err());
        let negative = StepFunction::new(vec![0.0, 1.0, 2.0], vec![0.0, 2.0, -1.0, 0.0]).unwrap();
        assert!(StepDensity::new(negative).is_err());
    }

    #[test]
    fn breakpoints_belong_to_the_right() {
        let f = pill_step_lottery(L, R).unwrap();
        assert_eq!(f.value_at(1.0), L + R);
        assert_eq!(f.value_at(1.0 - 1e-12), R);
        assert_eq!(f.value_at(-5.0), R);
    }

    #[test]
    fn lebesgue_examples() {
        let c = StepFunction::constant(4.5).unwrap();
        for p in [0.5, 1e-3, 1e-9] {
            assert!(rel(lebesgue_part(&c, &pill_density(p).unwrap()), 4.5) < 1e-12);
        }
        let f = pill_step_lottery(L, R).unwrap();
        let v = lebesgue_part(&f, &pill_density(1e-9).unwrap());
        assert!(rel(v, 3_219_999.997) < 1e-12, "{v}");
        let window = StepFunction::new(vec![0.0, 1.0], vec![0.0, 1.0, 0.0]).unwrap();
        assert!(rel(lebesgue_part(&window, &pill_density(0.5).unwrap()), 0.5) < 1e-15);
    }

    #[test]
    fn limit_examples() {
        assert_eq!(limit_at_zero(&pill_step_lottery(L, R).unwrap()).unwrap(), R);
        assert_eq!(limit_at_zero(&StepFunction::constant(7.0).unwrap()).unwrap(), 7.0);
        let jump = StepFunction::new(vec![0.0], vec![0.0, 1.0]).unwrap();
        assert_eq!(limit_at_zero(&jump).unwrap_err(), Error::NoLimit { left: 0.0, right: 1.0 });
        // a breakpoint at 0 without a jump still has a limit
        let flat = StepFunction::new(vec![0.0], vec![2.0, 2.0]).unwrap();
        assert_eq!(limit_at_zero(&flat).unwrap(), 2.0);
    }

    #[test]
    fn rank_value_examples() {
        let f = pill_step_lottery(L, R).unwrap();
        let d = pill_density(1e-9).unwrap();
        let one = CatastropheRanking::new(1.0, d.clone()).unwrap();
        assert_eq!(one.rank_value(&f).unwrap(), lebesgue_part(&f, &d));
        let zero = CatastropheRanking::new(0.0, d.clone()).unwrap();
        assert_eq!(zero.rank_value(&f).unwrap(), R);
        let w = CatastropheRanking::new(0.95, d.clone()).unwrap().rank_value(&f).unwrap();
        assert!(rel(w, 3_069_999.997_15) < 1e-12, "{w}");
        assert!(rel(w, w_lambda(L, R, 1e-9, 0.95)) < 1e-12);
        let jump = StepFunction::new(vec![0.0], vec![0.0, 1.0]).unwrap();
        assert!(matches!(one.rank_value(&jump), Err(Error::NoLimit { .. })));
        assert!(CatastropheRanking::new(1.5, d).is_err());
    }

    #[test]
    fn pill_density_examples() {
        let d = pill_density(0.5).unwrap();
        assert_eq!(d.support(), (0.0, 2.0));
        assert_eq!(d.value_at(1.0), 0.5);
        let d = pill_density(1e-9).unwrap();
        assert_eq!(d.support().0, 0.0);
        assert!((d.support().1 - 1e9).abs() <= 1e9 * f64::EPSILON);
        assert_eq!(d.value_at(0.5), 1e-9);
        let one = StepFunction::constant(1.0).unwrap();
        for p in [0.5, 0.3, 1e-4, 1e-9, 1e-13] {
            assert!((lebesgue_part(&one, &pill_density(p).unwrap()) - 1.0).abs() <= 1e-12);
        }
        assert!(pill_density(0.0).is_err());
        assert!(pill_density(1.0).is_err());
    }

    #[test]
    fn pill_lottery_examples() {
        let f = pill_step_lottery(L, R).unwrap();
        assert_eq!(f.breakpoints(), &[1.0]);
        assert_eq!(f.values(), &[2.2e5, 3.22e6]);
        assert_eq!(limit_at_zero(&f).unwrap(), R);
        let f = pill_step_lottery(0.0001, 1.0).unwrap();
        assert_eq!(f.values(), &[1.0, 1.0001]);
        assert!(pill_step_lottery(-1.0, 1.0).is_err());
    }

    #[test]
    fn w_lambda_examples() {
        let mean = L + R - 1e-9 * L;
        assert!(rel(w_lambda(L, R, 1e-9, 1.0), mean) < 1e-15);
        assert!(rel(w_lambda(L, R, 1e-9, 0.95), 3_069_999.997_15) < 1e-14);
        let tiny = w_lambda(L, R, 1e-18, 0.9);
        assert!(rel(tiny, 2.92e6) < 1e-15 && tiny < L);
    }

    #[test]
    fn limit_and_threshold_examples() {
        assert_eq!(w_lambda_limit(L, R, 1.0), L + R);
        assert_eq!(w_lambda_limit(L, R, 0.5), 1.72e6);
        let l0 = lambda_threshold(L, R).unwrap();
        assert!((l0 - 0.926_666_666_666_666_7).abs() < 1e-15);
        assert!((l0 - 0.926).abs() <= 0.001);
        assert!(rel(w_lambda_limit(L, R, l0), L) < 1e-15);
        assert_eq!(lambda_threshold(2.0, 1.0).unwrap(), 0.5);
        assert!(matches!(lambda_threshold(R, R), Err(Error::InvalidThreshold { .. })));
        assert!(matches!(lambda_threshold(1e5, R), Err(Error::InvalidThreshold { .. })));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_agent(L, R, 0.9).unwrap(), AgentClass::NeverAccepts);
        let mut p = 1e-1;
        while p >= 1e-18 {
            assert!(w_lambda(L, R, p, 0.9) < L);
            p /= 10.0;
        }
        match classify_agent(2e6, R, 1.0).unwrap() {
            AgentClass::AcceptsBelow { p_star } => assert!((p_star - 0.11).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
        match classify_agent(L, R, 0.95).unwrap() {
            AgentClass::AcceptsBelow { p_star } => {
                assert!((p_star - 0.024_561_403_508_771_93).abs() < 1e-15);
                assert!(rel(w_lambda(L, R, p_star, 0.95), L) <= 1e-12);
            }
            other => panic!("{other:?}"),
        }
        let l0 = lambda_threshold(L, R).unwrap();
        assert_eq!(classify_agent(L, R, l0).unwrap(), AgentClass::NeverAccepts);
        assert!(classify_agent(L, R, 1.1).is_err());
    }

    #[test]
    fn classification_json() {
        let rec = classification_record(L, R, 0.95).unwrap();
        let v: serde_json::Value = serde_json::to_value(rec).unwrap();
        assert_eq!(v["class"], "accepts_below");
        assert_eq!(v["lambda"], 0.95);
        assert!(v["p_star"].as_f64().unwrap() > 0.0);
        let v: serde_json::Value = serde_json::to_value(classification_record(L, R, 0.9).unwrap()).unwrap();
        assert_eq!(v["class"], "never");
        assert!(v.get("p_star").is_none());
    }

    #[test]
    fn modify_near_zero_examples() {
        let f = pill_step_lottery(L, R).unwrap();
        let g = modify_near_zero(&f, 0.0, 1e-6).unwrap();
        assert_eq!(g.breakpoints(), &[-1e-6, 1e-6, 1.0]);
        assert_eq!(g.values(), &[R, 0.0, R, L + R]);
        assert_eq!(limit_at_zero(&g).unwrap(), 0.0);
        for eps in [0.5, 1e-3, 1e-12] {
            assert_eq!(limit_at_zero(&modify_near_zero(&f, -3.0, eps).unwrap()).unwrap(), -3.0);
        }
        let d = pill_density(0.25).unwrap();
        let eps = 1e-3;
        let diff = (lebesgue_part(&g, &d) - lebesgue_part(&f, &d)).abs();
        let g = modify_near_zero(&f, 0.0, eps).unwrap();
        let diff_eps = (lebesgue_part(&g, &d) - lebesgue_part(&f, &d)).abs();
        assert!(diff <= 2.0 * 1e-6 * d.max_value() * R * (1.0 + 1e-9));
        assert!(diff_eps <= 2.0 * eps * d.max_value() * R * (1.0 + 1e-9));
    }

    #[test]
    fn modify_near_zero_errors() {
        let f = pill_step_lottery(L, R).unwrap();
        assert!(matches!(modify_near_zero(&f, 0.0, 1.0), Err(Error::InvalidEps { .. })));
        assert!(matches!(modify_near_zero(&f, 0.0, 0.0), Err(Error::InvalidEps { .. })));
        let left = StepFunction::new(vec![-0.1, 1.0], vec![0.0, 1.0, 2.0]).unwrap();
        assert!(matches!(modify_near_zero(&left, 0.0, 0.2), Err(Error::InvalidEps { .. })));
        let at_zero = StepFunction::new(vec![0.0], vec![1.0, 1.0]).unwrap();
        assert!(matches!(modify_near_zero(&at_zero, 0.0, 0.1), Err(Error::InvalidEps { .. })));
    }

    #[test]
    fn linear_combination_pointwise() {
        let f = StepFunction::new(vec![-1.0, 2.0], vec![1.0, 2.0, 3.0]).unwrap();
        let g = StepFunction::new(vec![0.5, 2.0, 4.0], vec![10.0, 20.0, 30.0, 40.0]).unwrap();
        let h = StepFunction::linear_combination(2.0, &f, -1.0, &g).unwrap();
        assert_eq!(h.breakpoints(), &[-1.0, 0.5, 2.0, 4.0]);
        for x in [-3.0, -1.0, 0.0, 0.5, 1.9, 2.0, 3.0, 4.0, 9.0] {
            assert_eq!(h.value_at(x), 2.0 * f.value_at(x) - g.value_at(x), "at {x}");
        }
    }

    #[test]
    fn eq8_convergence_grid() {
        for &l in &[1e5, 3e6, 7e6] {
            for &lambda in &[0.0, 0.3, 0.9, 1.0] {
                let mut p = 0.5;
                while p > 1e-18 {
                    let gap = w_lambda_limit(l, R, lambda) - w_lambda(l, R, p, lambda);
                    assert!((gap - lambda * p * l).abs() <= 1e-15 * (l + R) * 4.0, "{l} {lambda} {p}");
                    p /= 7.0;
                }
            }
        }
    }

    proptest! {
        #[test]
        fn closed_form_matches_integral(
            l in 1e3f64..1e8,
            r in 1e2f64..1e6,
            log_p in -12.0f64..-0.01,
            lambda in 0.0f64..=1.0,
        ) {
            let p = 10f64.powf(log_p);
            let ranking = CatastropheRanking::new(lambda, pill_density(p).unwrap()).unwrap();
            let w = ranking.rank_value(&pill_step_lottery(l, r).unwrap()).unwrap();
            prop_assert!(rel(w, w_lambda(l, r, p, lambda)) <= 1e-12);
        }

        #[test]
        fn ranking_is_linear(
            alpha in -5.0f64..5.0,
            beta in -5.0f64..5.0,
            lambda in 0.0f64..=1.0,
            fv in prop::collection::vec(1.0f64..100.0, 4),
            gv in prop::collection::vec(1.0f64..100.0, 3),
        ) {
            let f = StepFunction::new(vec![-2.0, 1.0, 3.0], fv).unwrap();
            let g = StepFunction::new(vec![0.5, 2.5], gv).unwrap();
            let ranking = CatastropheRanking::new(lambda, pill_density(0.2).unwrap()).unwrap();
            let h = StepFunction::linear_combination(alpha, &f, beta, &g).unwrap();
            let lhs = ranking.rank_value(&h).unwrap();
            let rhs = alpha * ranking.rank_value(&f).unwrap() + beta * ranking.rank_value(&g).unwrap();
            let scale = (alpha.abs() + beta.abs()) * 100.0;
            prop_assert!((lhs - rhs).abs() <= 1e-10 * scale);
        }

        #[test]
        fn threshold_consistency(l in 1e4f64..1e8, ratio in 0.001f64..0.9, t in 0.0f64..1.0) {
            let r = ratio * l;
            let l0 = lambda_threshold(l, r).unwrap();
            // below the threshold: the supremum over p is the p → 0 limit
            let below = l0 * t;
            prop_assert!(w_lambda_limit(l, r, below) < l || t == 1.0);
            prop_assert_eq!(classify_agent(l, r, below).unwrap(), AgentClass::NeverAccepts);
            let above = l0 + (1.0 - l0) * (0.01 + 0.99 * t);
            match classify_agent(l, r, above).unwrap() {
                AgentClass::AcceptsBelow { p_star } => {
                    prop_assert!(p_star > 0.0 && p_star < 1.0);
                    prop_assert!(rel(w_lambda(l, r, p_star, above), l) <= 1e-12);
                }
                AgentClass::NeverAccepts => prop_assert!(false, "λ above λ₀ classified as never"),
            }
        }
    }
}
