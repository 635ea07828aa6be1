//! The pill deal under expected utility.
//!
//! A subject with value of life `l` is paid `r` to swallow one pill out of a
//! pile where a fraction `p` is deadly: wealth `r` with probability `p`,
//! `l + r` otherwise. Refusing keeps `l`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lottery::{certainty_equivalent, log_neg_expected_utility, DiscreteLottery, Outcome};
use crate::numeric::{try_find_root, Bracket, RootOptions};
use crate::utility::{FamilyKind, Money, UtilityFamily};

/// `log10 γ` search interval for the CARA calibration.
pub const CARA_LOG10_GAMMA_BRACKET: (f64, f64) = (-12.0, 3.0);
/// `γ` search interval for the power calibration.
pub const POWER_GAMMA_BRACKET: (f64, f64) = (0.01, 100.0);
/// `log10 p` search interval for the acceptance threshold.
pub const LOG10_P_BRACKET: (f64, f64) = (-18.0, -0.0001);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PillDeal {
    /// Value of life.
    pub l: Money,
    /// Reward for swallowing a pill.
    pub r: Money,
    /// Probability the pill is deadly.
    pub p: f64,
}

impl PillDeal {
    pub fn new(l: f64, r: f64, p: f64) -> Result<Self> {
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::InvalidDeal(format!("value of life must be > 0, got {l}")));
        }
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidDeal(format!("reward must be > 0, got {r}")));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidDeal(format!("probability must lie in (0, 1), got {p}")));
        }
        Ok(Self { l: Money(l), r: Money(r), p })
    }

    pub fn with_l(self, l: f64) -> Result<Self> {
        Self::new(l, self.r.0, self.p)
    }

    pub fn with_p(self, p: f64) -> Result<Self> {
        Self::new(self.l.0, self.r.0, p)
    }

    /// `{(r, p), (l + r, 1 - p)}`.
    pub fn as_lottery(&self) -> DiscreteLottery {
        DiscreteLottery::new(vec![
            Outcome { wealth: self.r, prob: self.p },
            Outcome { wealth: Money(self.l.0 + self.r.0), prob: 1.0 - self.p },
        ])
        .expect("a valid deal always yields a valid lottery")
    }

    /// `p·r + (1-p)(l+r)`, evaluated as `l + r - p·l`.
    pub fn mean_gain(&self) -> Money {
        Money(self.l.0 + self.r.0 - self.p * self.l.0)
    }
}

/// `r / p`: the value of life above which a risk-neutral subject refuses.
pub fn naive_life_bound(r: Money, p: f64) -> Money {
    Money(r.0 / p)
}

/// `p·u(r) + (1-p)·u(l+r) - u(l)`: positive when the deal beats refusing.
pub fn indifference_residual(u: &UtilityFamily, deal: &PillDeal) -> Result<f64> {
    match *u {
        UtilityFamily::Linear { a, .. } => Ok(a * (deal.r.0 - deal.p * deal.l.0)),
        _ => {
            let log_eu = log_neg_expected_utility(u, &deal.as_lottery())?;
            let log_refuse = u.log_disutility(deal.l)?.expect("non-linear family");
            // e^{c} - e^{L} = -e^{c}·expm1(L - c)
            Ok(-log_refuse.exp() * (log_eu - log_refuse).exp_m1())
        }
    }
}

/// Certainty equivalent of the deal: the "value of the deal".
pub fn deal_value(u: &UtilityFamily, deal: &PillDeal) -> Result<Money> {
    certainty_equivalent(u, &deal.as_lottery())
}

/// Strictly `deal_value > l`.
pub fn is_acceptable(u: &UtilityFamily, deal: &PillDeal) -> Result<bool> {
    Ok(deal_value(u, deal)?.0 > deal.l.0)
}

/// The value of life at which a subject with utility `u` is indifferent.
///
/// Solved on `deal_value - l`, which has the sign of the indifference
/// residual but stays well scaled where the utilities themselves underflow.
/// The bracket starts at `[max(r, 1), 10·r/p]` and its upper end grows
/// tenfold up to `1000·r/p`.
pub fn implied_life(u: &UtilityFamily, r: Money, p: f64) -> Result<Money> {
    let template = PillDeal::new(1.0, r.0, p)?;
    if let UtilityFamily::Linear { .. } = u {
        return Ok(naive_life_bound(r, p));
    }
    let gap = |l: f64| -> Result<f64> { Ok(deal_value(u, &template.with_l(l)?)?.0 - l) };

    let lo = r.0.max(1.0);
    let anchor = naive_life_bound(r, p).0;
    let mut hi = 10.0 * anchor;
    let cap = 1e3 * anchor;
    let g_lo = gap(lo)?;
    if g_lo <= 0.0 {
        return Err(Error::NoSolution(format!(
            "{u}: deal is already refused at l = {lo} (gap {g_lo})"
        )));
    }
    loop {
        let g_hi = gap(hi)?;
        if g_hi < 0.0 {
            break;
        }
        if hi >= cap {
            return Err(Error::NoSolution(format!(
                "{u}: deal still accepted at l = {hi:e}; no implied value of life below {cap:e}"
            )));
        }
        hi = (hi * 10.0).min(cap);
    }
    let l = try_find_root(gap, Bracket::new(lo, hi)?, RootOptions::default())?;
    Ok(Money(l))
}

/// The risk-aversion parameter whose implied value of life is `l_target`.
///
/// CARA searches `log10 γ` on [`CARA_LOG10_GAMMA_BRACKET`]; the power family
/// searches `γ` directly on [`POWER_GAMMA_BRACKET`]. The residual is the
/// deal's certainty equivalent minus `l_target`, which is zero exactly when
/// `implied_life` returns `l_target` and falls as `γ` grows.
pub fn calibrate_gamma(kind: FamilyKind, l_target: Money, r: Money, p: f64) -> Result<f64> {
    let deal = PillDeal::new(l_target.0, r.0, p)?;
    if l_target.0 <= r.0 {
        return Err(Error::InvalidDeal(format!("target value of life {} must exceed the reward {}", l_target.0, r.0)));
    }
    let residual = |gamma: f64| -> Result<f64> { Ok(deal_value(&kind.with_gamma(gamma)?, &deal)?.0 - l_target.0) };
    let no_solution = |e: Error| match e {
        Error::NoSignChange { lo, hi, f_lo, f_hi } => Error::NoSolution(format!(
            "{} utility cannot imply l = {} on [{lo}, {hi}] (residuals {f_lo:e}, {f_hi:e})",
            kind.name(),
            l_target.0
        )),
        other => other,
    };
    match kind {
        FamilyKind::Linear => Err(Error::InvalidParameter("the linear family has no gamma to calibrate".into())),
        FamilyKind::Cara => {
            let (lo, hi) = CARA_LOG10_GAMMA_BRACKET;
            let exponent = try_find_root(|x| residual(10f64.powf(x)), Bracket::new(lo, hi)?, RootOptions::default())
                .map_err(no_solution)?;
            Ok(10f64.powf(exponent))
        }
        FamilyKind::Power => {
            let (lo, hi) = POWER_GAMMA_BRACKET;
            try_find_root(residual, Bracket::new(lo, hi)?, RootOptions::default()).map_err(no_solution)
        }
    }
}

/// The deadly-pill probability `p*` below which the deal is acceptable.
///
/// For the linear family this is `r / l` exactly. Otherwise it is the root
/// of `deal_value(p) - l` over `log10 p` on [`LOG10_P_BRACKET`].
pub fn acceptance_probability_threshold(u: &UtilityFamily, l: Money, r: Money) -> Result<f64> {
    let template = PillDeal::new(l.0, r.0, 0.5)?;
    if let UtilityFamily::Linear { .. } = u {
        let p_star = r.0 / l.0;
        if p_star >= 1.0 {
            return Err(Error::NoSolution(format!("reward {} is not below l = {}; every p is acceptable", r.0, l.0)));
        }
        return Ok(p_star);
    }
    let gap = |log_p: f64| -> Result<f64> { Ok(deal_value(u, &template.with_p(10f64.powf(log_p))?)?.0 - l.0) };
    let (lo, hi) = LOG10_P_BRACKET;
    let at_floor = gap(lo)?;
    if at_floor <= 0.0 {
        return Err(Error::NoSolution(format!(
            "{u}: deal value stays at or below l = {} even at p = 1e{lo} (gap {at_floor:e})",
            l.0
        )));
    }
    let at_top = gap(hi)?;
    if at_top > 0.0 {
        return Err(Error::NoSolution(format!("{u}: deal is acceptable for every p in (0, 1)")));
    }
    let log_p = try_find_root(gap, Bracket::new(lo, hi)?, RootOptions::default())?;
    Ok(10f64.powf(log_p))
}

/// One point of a deal-value sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub inv_p: f64,
    pub value: f64,
}

/// Deal value at each `1/p` of `inv_p_grid`.
pub fn sweep_deal_value(u: &UtilityFamily, l: Money, r: Money, inv_p_grid: &[f64]) -> Result<Vec<SweepPoint>> {
    inv_p_grid
        .iter()
        .map(|&inv_p| {
            if !(inv_p > 1.0) {
                return Err(Error::InvalidDeal(format!("1/p grid entries must exceed 1, got {inv_p}")));
            }
            let deal = PillDeal::new(l.0, r.0, 1.0 / inv_p)?;
            Ok(SweepPoint { inv_p, value: deal_value(u, &deal)?.0 })
        })
        .collect()
}

/// `points` values spaced evenly in `log10` between `from` and `to` inclusive.
pub fn log_grid(from: f64, to: f64, points: usize) -> Result<Vec<f64>> {
    if !(from > 0.0 && to > 0.0 && from.is_finite() && to.is_finite()) || points == 0 {
        return Err(Error::InvalidInput(format!("log grid needs positive bounds and points > 0, got {from}..{to} x{points}")));
    }
    if points == 1 {
        return Ok(vec![from]);
    }
    let (a, b) = (from.log10(), to.log10());
    Ok((0..points)
        .map(|i| {
            if i == points - 1 {
                to
            } else {
                10f64.powf(a + (b - a) * i as f64 / (points - 1) as f64)
            }
        })
        .collect())
}
