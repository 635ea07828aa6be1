//! Shared numerical kernels: a bracketed root finder for monotone residuals
//! and a shifted log-sum-exp for utilities that live far below `f64::MIN_POSITIVE`.

use crate::error::{Error, Result};

pub const DEFAULT_REL_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 200;

/// Closed interval `[lo, hi]` handed to [`find_root`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    lo: f64,
    hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(Error::InvalidInput(format!("bracket needs finite lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Stopping rule for [`find_root`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    /// Stop once the bracket is narrower than `rel_tol * max(1, |x|)`.
    pub rel_tol: f64,
    pub max_iter: usize,
    /// Try a false-position step whenever the previous step at least halved the bracket.
    pub secant: bool,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self { rel_tol: DEFAULT_REL_TOL, max_iter: DEFAULT_MAX_ITER, secant: true }
    }
}

impl RootOptions {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn bisection_only(mut self) -> Self {
        self.secant = false;
        self
    }
}

/// Finds a root of `f` inside `bracket`, where `f` changes sign across it.
///
/// Bisection with a false-position step attempted while it keeps shrinking the
/// bracket by at least half; any step that fails to do so forces the next one
/// to bisect, so convergence is never worse than plain bisection.
pub fn find_root<F>(mut f: F, bracket: Bracket, opts: RootOptions) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    try_find_root(|x| Ok(f(x)), bracket, opts)
}

/// [`find_root`] for residuals that can themselves fail.
pub fn try_find_root<F>(mut f: F, bracket: Bracket, opts: RootOptions) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(opts.rel_tol > 0.0) {
        return Err(Error::InvalidInput(format!("rel_tol must be positive, got {}", opts.rel_tol)));
    }
    let (mut lo, mut hi) = (bracket.lo, bracket.hi);
    let mut f_lo = eval_finite(&mut f, lo)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    let mut f_hi = eval_finite(&mut f, hi)?;
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoSignChange { lo, hi, f_lo, f_hi });
    }

    let mut use_secant = opts.secant;
    for _ in 0..opts.max_iter {
        let mid = 0.5 * (lo + hi);
        let width = hi - lo;
        if width <= opts.rel_tol * mid.abs().max(1.0) || mid <= lo || mid >= hi {
            return Ok(mid);
        }

        let mut x = mid;
        if use_secant {
            let candidate = lo - f_lo * width / (f_hi - f_lo);
            if candidate > lo && candidate < hi {
                x = candidate;
            }
        }

        let fx = eval_finite(&mut f, x)?;
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == f_lo.signum() {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
            f_hi = fx;
        }
        use_secant = opts.secant && (hi - lo) <= 0.5 * width;
    }
    Err(Error::MaxIterations { max_iter: opts.max_iter, lo, hi })
}

fn eval_finite<F>(f: &mut F, x: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let fx = f(x)?;
    if fx.is_nan() {
        return Err(Error::InvalidInput(format!("residual is NaN at x = {x}")));
    }
    Ok(fx)
}

/// `ln(Σ wᵢ·exp(eᵢ))` over `(weight, exponent)` pairs.
///
/// Terms are shifted by the largest `ln wᵢ + eᵢ` and the remainder is added
/// through `ln_1p`, so a dominant term is reproduced exactly and tiny
/// contributions (a 1e-13 death probability next to an `e^-35` survival
/// utility) are not lost to cancellation.
pub fn log_sum_exp(terms: &[(f64, f64)]) -> Result<f64> {
    let mut logs = Vec::with_capacity(terms.len());
    for &(w, e) in terms {
        if !(w.is_finite() && w >= 0.0) {
            return Err(Error::InvalidInput(format!("log-sum-exp weight must be finite and >= 0, got {w}")));
        }
        if !e.is_finite() {
            return Err(Error::InvalidInput(format!("log-sum-exp exponent must be finite, got {e}")));
        }
        if w > 0.0 {
            logs.push(w.ln() + e);
        }
    }
    log_sum_exp_of_logs(&logs)
}

/// `ln(Σ exp(aᵢ))` for already-combined log terms; `-inf` entries are skipped.
pub fn log_sum_exp_of_logs(logs: &[f64]) -> Result<f64> {
    let (argmax, max) = logs
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, a)| *a > f64::NEG_INFINITY)
        .fold(None, |best: Option<(usize, f64)>, (i, a)| match best {
            Some((_, m)) if m >= a => best,
            _ => Some((i, a)),
        })
        .ok_or(Error::EmptyInput)?;
    let rest: f64 = logs
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != argmax)
        .map(|(_, &a)| (a - max).exp())
        .sum();
    Ok(max + rest.ln_1p())
}
