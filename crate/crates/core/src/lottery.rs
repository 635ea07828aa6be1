//! Finite lotteries over wealth and their valuation under a utility family.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::log_sum_exp;
use crate::utility::{FamilyKind, Money, UtilValue, UtilityFamily};

/// Probabilities must sum to one within this tolerance; nothing is renormalized.
pub const PROB_SUM_TOL: f64 = 1e-12;

/// Relative band on the utility scale inside which [`prefers`] reports indifference.
pub const INDIFFERENCE_BAND: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub wealth: Money,
    pub prob: f64,
}

/// A finite list of `(wealth, probability)` outcomes summing to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct DiscreteLottery {
    outcomes: Vec<Outcome>,
}

impl DiscreteLottery {
    pub fn new(outcomes: Vec<Outcome>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::InvalidLottery("a lottery needs at least one outcome".into()));
        }
        for o in &outcomes {
            if !o.wealth.0.is_finite() {
                return Err(Error::InvalidLottery(format!("wealth {} is not finite", o.wealth.0)));
            }
            if !(o.prob.is_finite() && o.prob >= 0.0) {
                return Err(Error::InvalidLottery(format!("probability {} is not in [0, 1]", o.prob)));
            }
        }
        let total: f64 = outcomes.iter().map(|o| o.prob).sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidLottery(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self { outcomes })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(w, p)| Outcome { wealth: Money(w), prob: p }).collect())
    }

    /// The sure thing: `wealth` with probability one.
    pub fn degenerate(wealth: Money) -> Result<Self> {
        Self::new(vec![Outcome { wealth, prob: 1.0 }])
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    /// Expected wealth `Σ pᵢ·xᵢ`.
    pub fn mean(&self) -> Money {
        Money(self.outcomes.iter().map(|o| o.prob * o.wealth.0).sum())
    }

    /// True when all probability mass sits on a single wealth level.
    pub fn is_degenerate(&self) -> bool {
        let mut support = self.outcomes.iter().filter(|o| o.prob > 0.0).map(|o| o.wealth.0);
        match support.next() {
            Some(first) => support.all(|w| w == first),
            None => true,
        }
    }
}

impl<'de> Deserialize<'de> for DiscreteLottery {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let outcomes = Vec::<Outcome>::deserialize(de)?;
        DiscreteLottery::new(outcomes).map_err(serde::de::Error::custom)
    }
}

/// Inline syntax `wealth:prob,wealth:prob`.
impl FromStr for DiscreteLottery {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut outcomes = Vec::new();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (w, p) = item
                .split_once(':')
                .ok_or_else(|| Error::InvalidLottery(format!("expected wealth:prob, got '{item}'")))?;
            let parse = |t: &str| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidLottery(format!("cannot parse number '{}'", t.trim())))
            };
            outcomes.push(Outcome { wealth: Money(parse(w)?), prob: parse(p)? });
        }
        DiscreteLottery::new(outcomes)
    }
}

impl fmt::Display for DiscreteLottery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, o) in self.outcomes.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}:{}", o.wealth.0, o.prob)?;
        }
        Ok(())
    }
}

/// `ln(-EU)` for the negative-valued families, via log-sum-exp over `(pᵢ, ln(-u(xᵢ)))`.
pub(crate) fn log_neg_expected_utility(u: &UtilityFamily, lot: &DiscreteLottery) -> Result<f64> {
    let mut terms = Vec::with_capacity(lot.outcomes.len());
    for o in &lot.outcomes {
        let e = u
            .log_disutility(o.wealth)?
            .ok_or_else(|| Error::InvalidParameter("linear utility has no log domain".into()))?;
        terms.push((o.prob, e));
    }
    log_sum_exp(&terms)
}

/// `Σ pᵢ·u(xᵢ)`.
///
/// For CARA and power utilities the sum is formed as `-exp(log_sum_exp(...))`,
/// so it is exact in log space even when the returned value underflows.
pub fn expected_utility(u: &UtilityFamily, lot: &DiscreteLottery) -> Result<UtilValue> {
    match u.kind() {
        FamilyKind::Linear => {
            let mut sum = 0.0;
            for o in &lot.outcomes {
                sum += o.prob * u.eval(o.wealth)?.0;
            }
            Ok(UtilValue(sum))
        }
        _ => Ok(UtilValue(-log_neg_expected_utility(u, lot)?.exp())),
    }
}

/// The sure wealth the agent values exactly as much as the lottery.
pub fn certainty_equivalent(u: &UtilityFamily, lot: &DiscreteLottery) -> Result<Money> {
    match u.kind() {
        FamilyKind::Linear => u.inverse(expected_utility(u, lot)?),
        _ => u.inverse_log_disutility(log_neg_expected_utility(u, lot)?),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preference {
    LotteryPreferred,
    Indifferent,
    SurePreferred,
}

/// Compares the lottery's expected utility with the utility of `sure`.
///
/// Differences within [`INDIFFERENCE_BAND`] (relative, on the utility scale)
/// count as indifference. The negative-valued families compare in log space,
/// where a relative utility gap is an absolute gap of the logs.
pub fn prefers(u: &UtilityFamily, lot: &DiscreteLottery, sure: Money) -> Result<Preference> {
    let gap = match u.kind() {
        FamilyKind::Linear => {
            let eu = expected_utility(u, lot)?.0;
            let us = u.eval(sure)?.0;
            let scale = eu.abs().max(us.abs());
            if (eu - us).abs() <= INDIFFERENCE_BAND * scale {
                0.0
            } else {
                eu - us
            }
        }
        _ => {
            let log_eu = log_neg_expected_utility(u, lot)?;
            let log_sure = u.log_disutility(sure)?.expect("non-linear family");
            // larger disutility means lower utility
            let d = log_sure - log_eu;
            if d.abs() <= INDIFFERENCE_BAND {
                0.0
            } else {
                d
            }
        }
    };
    Ok(if gap > 0.0 {
        Preference::LotteryPreferred
    } else if gap < 0.0 {
        Preference::SurePreferred
    } else {
        Preference::Indifferent
    })
}
