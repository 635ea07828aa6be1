//! Recomputes the published calibration tables and compares each cell with
//! the printed value at a tolerance matching its rounding.

use serde::Serialize;

use crate::catastrophic::lambda_threshold;
use crate::error::Result;
use crate::lottery::{certainty_equivalent, DiscreteLottery};
use crate::pill::{calibrate_gamma, deal_value, implied_life, PillDeal};
use crate::utility::{FamilyKind, Money, UtilityFamily};

pub const PILL_REWARD: f64 = 220_000.0;
pub const PILL_PROBABILITY: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "width", rename_all = "snake_case")]
pub enum Tolerance {
    /// `|computed - expected| ≤ width`.
    Absolute(f64),
    /// `|computed - expected| ≤ width·|expected|`.
    Relative(f64),
    /// `|log10 computed - log10 expected| ≤ width`.
    Log10(f64),
}

impl Tolerance {
    pub fn accepts(&self, computed: f64, expected: f64) -> bool {
        match *self {
            Tolerance::Absolute(w) => (computed - expected).abs() <= w,
            Tolerance::Relative(w) => (computed - expected).abs() <= w * expected.abs(),
            Tolerance::Log10(w) => computed > 0.0 && (computed.log10() - expected.log10()).abs() <= w,
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            Tolerance::Absolute(w) => format!("±{w}"),
            Tolerance::Relative(w) => format!("±{}%", w * 100.0),
            Tolerance::Log10(w) => format!("±{w} in log10"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub table: &'static str,
    pub label: String,
    pub computed: Option<f64>,
    pub expected: f64,
    pub tolerance: Tolerance,
    pub pass: bool,
    /// Solver or domain error that prevented computing the cell.
    pub error: Option<String>,
}

impl Cell {
    fn new(table: &'static str, label: impl Into<String>, computed: Result<f64>, expected: f64, tolerance: Tolerance) -> Self {
        let (computed, error) = match computed {
            Ok(v) => (Some(v), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let pass = computed.is_some_and(|v| tolerance.accepts(v, expected));
        Self { table, label: label.into(), computed, expected, tolerance, pass, error }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TablesReport {
    pub cells: Vec<Cell>,
}

impl TablesReport {
    pub fn all_pass(&self) -> bool {
        self.cells.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(|c| !c.pass)
    }
}

fn cara10(exp10: f64) -> Result<UtilityFamily> {
    UtilityFamily::cara(10f64.powf(exp10))
}

/// Value of life implied by each utility, and the γ that implies each bound.
pub fn value_of_life_cells() -> Vec<Cell> {
    let (r, p) = (Money(PILL_REWARD), PILL_PROBABILITY);
    let implied = |u: Result<UtilityFamily>| u.and_then(|u| implied_life(&u, r, p)).map(Money::get);
    let mut cells = vec![Cell::new(
        "value of life",
        "linear: l = r/p",
        implied(Ok(UtilityFamily::linear())),
        2.2e14,
        Tolerance::Relative(0.0),
    )];
    for (label, u, l) in [
        ("cara gamma=10^-5.53", cara10(-5.53), 7.0e6),
        ("cara gamma=10^-4.86", cara10(-4.86), 1.7e6),
        ("power gamma=5.3", UtilityFamily::power(5.3), 7.0e6),
        ("power gamma=10", UtilityFamily::power(10.0), 1.7e6),
    ] {
        cells.push(Cell::new("value of life", format!("implied l, {label}"), implied(u), l, Tolerance::Relative(0.05)));
    }
    for (kind, l, gamma, tol) in [
        (FamilyKind::Cara, 7.0e6, 10f64.powf(-5.53), Tolerance::Log10(0.05)),
        (FamilyKind::Cara, 1.7e6, 10f64.powf(-4.86), Tolerance::Log10(0.05)),
        (FamilyKind::Power, 7.0e6, 5.3, Tolerance::Relative(0.10)),
        (FamilyKind::Power, 1.7e6, 10.0, Tolerance::Relative(0.10)),
    ] {
        cells.push(Cell::new(
            "value of life",
            format!("calibrated gamma, {} l={l:e}", kind.name()),
            calibrate_gamma(kind, Money(l), r, p),
            gamma,
            tol,
        ));
    }
    cells
}

/// Certainty equivalents of the 100/200 coin flip.
pub fn head_or_tails_cells() -> Vec<Cell> {
    let coin = DiscreteLottery::from_pairs(&[(100.0, 0.5), (200.0, 0.5)]).expect("valid coin flip");
    let ce = |u: Result<UtilityFamily>| u.and_then(|u| certainty_equivalent(&u, &coin)).map(Money::get);
    vec![
        Cell::new("head or tails", "linear", ce(Ok(UtilityFamily::linear())), 150.0, Tolerance::Absolute(0.0)),
        Cell::new("head or tails", "cara gamma=1e-5", ce(UtilityFamily::cara(1e-5)), 149.98, Tolerance::Absolute(0.005)),
        Cell::new("head or tails", "power gamma=7", ce(UtilityFamily::power(7.0)), 110.3, Tolerance::Absolute(0.05)),
    ]
}

/// CARA pill-deal values with `l = $2M`.
pub fn pill_deal_cells() -> Vec<Cell> {
    [(-5.0, 1e-9, 2.18e6), (-4.9, 1e-10, 2.04e6), (-4.8, 1e-13, 2.10e6)]
        .into_iter()
        .map(|(e, p, v)| {
            let value = cara10(e)
                .and_then(|u| deal_value(&u, &PillDeal::new(2e6, PILL_REWARD, p)?))
                .map(Money::get);
            Cell::new("pill deal", format!("cara gamma=10^{e}, p={p:e}"), value, v, Tolerance::Relative(0.01))
        })
        .collect()
}

/// `λ₀ = (l - r)/l` at `l = $3M`.
pub fn lambda_threshold_cells() -> Vec<Cell> {
    let l0 = lambda_threshold(3e6, PILL_REWARD);
    vec![
        Cell::new("lambda threshold", "exact (l-r)/l", l0.clone(), 0.926_666_666_666_666_7, Tolerance::Absolute(1e-6)),
        Cell::new("lambda threshold", "printed 0.926", l0, 0.926, Tolerance::Absolute(0.001)),
    ]
}

pub fn emit_tables_report() -> TablesReport {
    let mut cells = value_of_life_cells();
    cells.extend(head_or_tails_cells());
    cells.extend(pill_deal_cells());
    cells.extend(lambda_threshold_cells());
    TablesReport { cells }
}
