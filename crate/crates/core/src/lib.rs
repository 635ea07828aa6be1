//! Choice under catastrophic risk.
//!
//! Values the deadly-pill lottery three ways: by its mean (linear
//! preferences), by its certainty equivalent under a concave utility, and by
//! a ranking that adds weight on the limit of the lottery at a catastrophe.
//!
//! - [`numeric`]: bracketed root finding and log-sum-exp.
//! - [`utility`]: linear, CARA and negative-power utility families.
//! - [`lottery`]: discrete lotteries, expected utility, certainty equivalents.
//! - [`pill`]: implied value of life, γ calibration, deal values, thresholds.
//! - [`catastrophic`]: step-function lotteries and the catastrophe-sensitive ranking.
//! - [`population`]: Monte Carlo respondents facing the deal.
//! - [`report`]: the calibration tables, recomputed against their printed values.

pub mod catastrophic;
pub mod error;
pub mod lottery;
pub mod numeric;
pub mod pill;
pub mod population;
pub mod report;
pub mod utility;

pub use catastrophic::{
    classification_record, classify_agent, lambda_threshold, lebesgue_part, limit_at_zero, modify_near_zero, pill_density,
    pill_step_lottery, w_lambda, w_lambda_limit, AgentClass, CatastropheRanking, Classification, StepDensity,
    StepFunction,
};
pub use error::{Error, Result};
pub use lottery::{certainty_equivalent, expected_utility, prefers, DiscreteLottery, Outcome, Preference};
pub use numeric::{find_root, log_sum_exp, try_find_root, Bracket, RootOptions};
pub use pill::{
    acceptance_probability_threshold, calibrate_gamma, deal_value, implied_life, indifference_residual,
    naive_life_bound, sweep_deal_value, PillDeal, SweepPoint,
};
pub use population::{simulate, summarize, ExperimentOutcome, PopulationSpec, Summary};
pub use report::{emit_tables_report, TablesReport};
pub use utility::{parse_gamma, FamilyKind, Money, UtilValue, UtilityFamily};
