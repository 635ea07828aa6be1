//! Monte Carlo population facing the pill deal.
//!
//! Each respondent is either an expected-utility agent with a CARA utility or
//! an agent using the catastrophe-sensitive ranking. Draws for agent `i` come
//! from a ChaCha stream keyed by `(seed, i)`, so results do not depend on the
//! order or thread in which agents are evaluated.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catastrophic::{classify_agent, w_lambda, AgentClass};
use crate::error::{Error, Result};
use crate::pill::{deal_value, PillDeal};
use crate::utility::UtilityFamily;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationSpec {
    pub n_agents: usize,
    /// Share of expected-utility agents; the rest use the catastrophe ranking.
    pub eu_fraction: f64,
    /// Values of life are log-uniform on `[l_min, l_max]`.
    pub l_min: f64,
    pub l_max: f64,
    /// CARA `γ = 10^e` with `e` uniform on `[gamma_exp_lo, gamma_exp_hi]`.
    pub gamma_exp_lo: f64,
    pub gamma_exp_hi: f64,
    /// `λ` uniform on `[lambda_lo, lambda_hi]`.
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    pub seed: u64,
}

impl Default for PopulationSpec {
    /// Value-of-life band of $1.7M-$7M, γ exponents spanning the calibrated
    /// CARA range, and λ straddling the threshold `(l - r)/l` for that band.
    fn default() -> Self {
        Self {
            n_agents: 1000,
            eu_fraction: 0.5,
            l_min: 1.7e6,
            l_max: 7.0e6,
            gamma_exp_lo: -5.53,
            gamma_exp_hi: -4.86,
            lambda_lo: 0.85,
            lambda_hi: 0.99,
            seed: 1998,
        }
    }
}

impl PopulationSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if self.n_agents == 0 {
            return bad("n_agents must be > 0".into());
        }
        if !(0.0..=1.0).contains(&self.eu_fraction) {
            return bad(format!("eu_fraction must lie in [0, 1], got {}", self.eu_fraction));
        }
        if !(self.l_min > 0.0 && self.l_min <= self.l_max && self.l_max.is_finite()) {
            return bad(format!("need 0 < l_min <= l_max, got [{}, {}]", self.l_min, self.l_max));
        }
        if !(self.gamma_exp_lo <= self.gamma_exp_hi && self.gamma_exp_lo.is_finite() && self.gamma_exp_hi.is_finite()) {
            return bad(format!("gamma exponent bounds out of order: [{}, {}]", self.gamma_exp_lo, self.gamma_exp_hi));
        }
        if !(0.0 <= self.lambda_lo && self.lambda_lo <= self.lambda_hi && self.lambda_hi <= 1.0) {
            return bad(format!("need 0 <= lambda_lo <= lambda_hi <= 1, got [{}, {}]", self.lambda_lo, self.lambda_hi));
        }
        Ok(())
    }

    /// Draws agent `index` from its own stream.
    pub fn draw_agent(&self, index: usize) -> Agent {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        let eu = rng.gen::<f64>() < self.eu_fraction;
        let l = uniform(&mut rng, self.l_min.ln(), self.l_max.ln()).exp();
        let kind = if eu {
            AgentKind::ExpectedUtility { gamma: 10f64.powf(uniform(&mut rng, self.gamma_exp_lo, self.gamma_exp_hi)) }
        } else {
            AgentKind::Catastrophe { lambda: uniform(&mut rng, self.lambda_lo, self.lambda_hi) }
        };
        Agent { index, l, kind }
    }
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        lo
    } else {
        lo + (hi - lo) * rng.gen::<f64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AgentKind {
    ExpectedUtility { gamma: f64 },
    Catastrophe { lambda: f64 },
}

impl AgentKind {
    pub fn label(&self) -> &'static str {
        match self {
            AgentKind::ExpectedUtility { .. } => "eu",
            AgentKind::Catastrophe { .. } => "cat",
        }
    }

    /// `γ` for EU agents, `λ` for catastrophe agents.
    pub fn parameter(&self) -> f64 {
        match *self {
            AgentKind::ExpectedUtility { gamma } => gamma,
            AgentKind::Catastrophe { lambda } => lambda,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Agent {
    pub index: usize,
    /// The agent's own value of life.
    pub l: f64,
    pub kind: AgentKind,
}

impl Agent {
    /// Whether the agent takes the deal, judged against its own `l`.
    pub fn accepts(&self, r: f64, p: f64) -> Result<bool> {
        match self.kind {
            AgentKind::ExpectedUtility { gamma } => {
                let deal = PillDeal::new(self.l, r, p)?;
                Ok(deal_value(&UtilityFamily::cara(gamma)?, &deal)?.0 > self.l)
            }
            AgentKind::Catastrophe { lambda } => Ok(w_lambda(self.l, r, p, lambda) > self.l),
        }
    }

    /// Refuses at every `p`. Never true for expected-utility agents.
    pub fn never_takes(&self, r: f64) -> Result<bool> {
        match self.kind {
            AgentKind::ExpectedUtility { .. } => Ok(false),
            AgentKind::Catastrophe { lambda } => {
                if self.l <= r {
                    return Ok(false);
                }
                Ok(classify_agent(self.l, r, lambda)? == AgentClass::NeverAccepts)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentRecord {
    pub agent: Agent,
    pub accepted: bool,
    pub never_taker: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutcome {
    pub accept_count: usize,
    pub reject_count: usize,
    /// Rejecters who would refuse at any probability.
    pub never_count: usize,
    /// Sorted by agent index.
    pub records: Vec<AgentRecord>,
}

/// Runs every agent of `spec` against `deal`; the deal's own `l` is replaced
/// by each agent's value of life.
pub fn simulate(spec: &PopulationSpec, deal: &PillDeal) -> Result<ExperimentOutcome> {
    spec.validate()?;
    let (r, p) = (deal.r.0, deal.p);
    let records = (0..spec.n_agents)
        .into_par_iter()
        .map(|i| {
            let agent = spec.draw_agent(i);
            Ok(AgentRecord { agent, accepted: agent.accepts(r, p)?, never_taker: agent.never_takes(r)? })
        })
        .collect::<Result<Vec<_>>>()?;
    let accept_count = records.iter().filter(|rec| rec.accepted).count();
    let never_count = records.iter().filter(|rec| rec.never_taker).count();
    Ok(ExperimentOutcome { accept_count, reject_count: records.len() - accept_count, never_count, records })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quartiles {
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
}

/// Nearest-rank quantile: the `⌈q·n⌉`-th smallest value (the smallest when `q = 0`).
pub fn nearest_rank(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let rank = (q * sorted.len() as f64).ceil() as usize;
    Some(sorted[rank.clamp(1, sorted.len()) - 1])
}

fn quartiles(mut xs: Vec<f64>) -> Option<Quartiles> {
    xs.sort_by(f64::total_cmp);
    Some(Quartiles { q25: nearest_rank(&xs, 0.25)?, median: nearest_rank(&xs, 0.5)?, q75: nearest_rank(&xs, 0.75)? })
}

/// Parameter quartiles for one decision group; `None` where the group is empty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupQuartiles {
    pub count: usize,
    pub l: Option<Quartiles>,
    pub gamma: Option<Quartiles>,
    pub lambda: Option<Quartiles>,
}

fn group_quartiles<'a>(records: impl Iterator<Item = &'a AgentRecord> + Clone) -> GroupQuartiles {
    let pick = |want_eu: bool| {
        quartiles(
            records
                .clone()
                .filter(|rec| matches!(rec.agent.kind, AgentKind::ExpectedUtility { .. }) == want_eu)
                .map(|rec| rec.agent.kind.parameter())
                .collect(),
        )
    };
    GroupQuartiles {
        count: records.clone().count(),
        l: quartiles(records.clone().map(|rec| rec.agent.l).collect()),
        gamma: pick(true),
        lambda: pick(false),
    }
}

/// Shares of takers, refusers who would take a safer pill, and never-takers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n_agents: usize,
    pub accept_fraction: f64,
    pub conditional_reject_fraction: f64,
    pub never_fraction: f64,
    pub reject_fraction: f64,
    pub accepted: GroupQuartiles,
    pub rejected: GroupQuartiles,
    pub never: GroupQuartiles,
}

/// Summarizes an outcome. The three disjoint shares sum to one.
pub fn summarize(outcome: &ExperimentOutcome) -> Summary {
    let n = outcome.accept_count + outcome.reject_count;
    let frac = |k: usize| if n == 0 { 0.0 } else { k as f64 / n as f64 };
    let accept_fraction = frac(outcome.accept_count);
    let never_fraction = frac(outcome.never_count);
    let recs = outcome.records.iter();
    Summary {
        n_agents: n,
        accept_fraction,
        never_fraction,
        conditional_reject_fraction: 1.0 - accept_fraction - never_fraction,
        reject_fraction: frac(outcome.reject_count),
        accepted: group_quartiles(recs.clone().filter(|r| r.accepted)),
        rejected: group_quartiles(recs.clone().filter(|r| !r.accepted)),
        never: group_quartiles(recs.filter(|r| r.never_taker)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catastrophic::lambda_threshold;

    fn deal() -> PillDeal {
        PillDeal::new(3e6, 2.2e5, 1e-9).unwrap()
    }

    #[test]
    fn spec_validation() {
        let ok = PopulationSpec::default();
        assert!(ok.validate().is_ok());
        for bad in [
            PopulationSpec { n_agents: 0, ..ok },
            PopulationSpec { eu_fraction: 1.5, ..ok },
            PopulationSpec { l_min: 0.0, ..ok },
            PopulationSpec { l_min: 8e6, ..ok },
            PopulationSpec { gamma_exp_lo: -4.0, ..ok },
            PopulationSpec { lambda_hi: 1.2, ..ok },
            PopulationSpec { lambda_lo: 0.995, ..ok },
        ] {
            assert!(matches!(simulate(&bad, &deal()), Err(Error::InvalidSpec(_))), "{bad:?}");
        }
    }

    #[test]
    fn near_linear_agents_all_accept() {
        let spec = PopulationSpec {
            n_agents: 200,
            eu_fraction: 1.0,
            gamma_exp_lo: -12.0,
            gamma_exp_hi: -12.0,
            l_max: 2e6,
            ..PopulationSpec::default()
        };
        let out = simulate(&spec, &deal()).unwrap();
        assert_eq!(out.accept_count, 200);
        assert_eq!(out.never_count, 0);
    }

    #[test]
    fn low_lambda_agents_never_take() {
        let r = deal().r.0;
        let spec = PopulationSpec {
            n_agents: 300,
            eu_fraction: 0.0,
            lambda_lo: 0.5,
            lambda_hi: lambda_threshold(1.7e6, r).unwrap() - 1e-3,
            ..PopulationSpec::default()
        };
        let out = simulate(&spec, &deal()).unwrap();
        assert_eq!(out.never_count, 300);
        assert_eq!(out.reject_count, 300);
        for rec in &out.records {
            assert_eq!(classify_agent(rec.agent.l, r, rec.agent.kind.parameter()).unwrap(), AgentClass::NeverAccepts);
        }
    }

    #[test]
    fn default_population_splits() {
        let out = simulate(&PopulationSpec::default(), &deal()).unwrap();
        let s = summarize(&out);
        assert!(s.accept_fraction > 0.2 && s.accept_fraction < 0.8, "{s:?}");
        assert!(out.never_count > 0);
    }

    #[test]
    fn deterministic_and_order_free() {
        let spec = PopulationSpec { n_agents: 400, ..PopulationSpec::default() };
        let a = simulate(&spec, &deal()).unwrap();
        let b = simulate(&spec, &deal()).unwrap();
        assert_eq!(a, b);
        // drawing agents serially in reverse gives the same population
        for i in (0..spec.n_agents).rev() {
            assert_eq!(spec.draw_agent(i), a.records[i].agent);
        }
        let other = simulate(&PopulationSpec { seed: 7, ..spec }, &deal()).unwrap();
        assert_ne!(a.records, other.records);
    }

    #[test]
    fn counts_are_conserved() {
        let out = simulate(&PopulationSpec::default(), &deal()).unwrap();
        assert_eq!(out.accept_count + out.reject_count, 1000);
        assert!(out.never_count <= out.reject_count);
        assert!(out.records.iter().filter(|r| r.never_taker).all(|r| !r.accepted));
        assert!(out.records.windows(2).all(|w| w[0].agent.index + 1 == w[1].agent.index));
    }

    #[test]
    fn lowering_p_never_turns_takers_away() {
        let spec = PopulationSpec { n_agents: 300, ..PopulationSpec::default() };
        let ps = [1e-3, 1e-6, 1e-9, 1e-12, 1e-15];
        let outcomes: Vec<_> = ps.iter().map(|&p| simulate(&spec, &deal().with_p(p).unwrap()).unwrap()).collect();
        for pair in outcomes.windows(2) {
            for (before, after) in pair[0].records.iter().zip(&pair[1].records) {
                assert!(!before.accepted || after.accepted, "agent {} flipped", before.agent.index);
            }
        }
    }

    #[test]
    fn never_takers_refuse_down_to_the_floor() {
        let out = simulate(&PopulationSpec::default(), &deal()).unwrap();
        let mut p = 1e-1;
        while p >= 1e-18 {
            for rec in out.records.iter().filter(|r| r.never_taker) {
                assert!(!rec.agent.accepts(2.2e5, p).unwrap());
            }
            p /= 10.0;
        }
    }

    #[test]
    fn summary_fractions() {
        let out = ExperimentOutcome { accept_count: 500, reject_count: 500, never_count: 100, records: vec![] };
        let s = summarize(&out);
        assert_eq!((s.accept_fraction, s.conditional_reject_fraction, s.never_fraction), (0.5, 0.4, 0.1));
        let out = ExperimentOutcome { accept_count: 3, reject_count: 1, never_count: 0, records: vec![] };
        assert_eq!(summarize(&out).never_fraction, 0.0);
    }

    #[test]
    fn summary_matches_records() {
        let out = simulate(&PopulationSpec::default(), &deal()).unwrap();
        let s = summarize(&out);
        let n = out.records.len() as f64;
        let accepted = out.records.iter().filter(|r| r.accepted).count() as f64;
        let never = out.records.iter().filter(|r| r.never_taker).count() as f64;
        assert!((s.accept_fraction - accepted / n).abs() < 1e-15);
        assert!((s.never_fraction - never / n).abs() < 1e-15);
        assert!((s.accept_fraction + s.conditional_reject_fraction + s.never_fraction - 1.0).abs() < 1e-12);
        assert_eq!(s.accepted.count + s.rejected.count, out.records.len());
    }

    #[test]
    fn nearest_rank_quantiles() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(nearest_rank(&xs, 0.0), Some(1.0));
        assert_eq!(nearest_rank(&xs, 0.25), Some(1.0));
        assert_eq!(nearest_rank(&xs, 0.5), Some(2.0));
        assert_eq!(nearest_rank(&xs, 0.51), Some(3.0));
        assert_eq!(nearest_rank(&xs, 1.0), Some(4.0));
        assert_eq!(nearest_rank(&[], 0.5), None);
    }
}
