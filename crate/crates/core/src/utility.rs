//! The three parametric utility families: linear, constant absolute risk
//! aversion (`-e^{-γx}`) and the negative power `-x^{-γ}` whose absolute risk
//! aversion `(1+γ)/x` falls with wealth.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};

/// An amount of wealth in US dollars.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Money(pub f64);

impl Money {
    pub fn get(self) -> f64 {
        self.0
    }
}

impl From<f64> for Money {
    fn from(v: f64) -> Self {
        Money(v)
    }
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// A utility level, in utils.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UtilValue(pub f64);

impl UtilValue {
    pub fn get(self) -> f64 {
        self.0
    }
}

/// Which concave family a calibration searches over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Linear,
    Cara,
    Power,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Linear => "linear",
            FamilyKind::Cara => "cara",
            FamilyKind::Power => "power",
        }
    }

    pub fn with_gamma(self, gamma: f64) -> Result<UtilityFamily> {
        match self {
            FamilyKind::Linear => Ok(UtilityFamily::linear()),
            FamilyKind::Cara => UtilityFamily::cara(gamma),
            FamilyKind::Power => UtilityFamily::power(gamma),
        }
    }
}

impl std::str::FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(FamilyKind::Linear),
            "cara" | "exp" | "exponential" => Ok(FamilyKind::Cara),
            "power" | "powerneg" => Ok(FamilyKind::Power),
            other => Err(Error::InvalidParameter(format!(
                "unknown utility family '{other}' (expected linear, cara or power)"
            ))),
        }
    }
}

/// A strictly increasing utility of money.
///
/// Serialized as `{"family": "linear", "a": 1, "b": 0}`,
/// `{"family": "cara", "gamma": 1e-5}` or `{"family": "power", "gamma": 7}`.
/// `gamma` may also be given as a string such as `"10^-5.53"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum UtilityFamily {
    /// `u(x) = a·x + b`.
    Linear {
        #[serde(default = "one")]
        a: f64,
        #[serde(default)]
        b: f64,
    },
    /// `u(x) = -e^{-γx}`.
    #[serde(rename = "cara")]
    CaraExp {
        #[serde(deserialize_with = "gamma_from_json")]
        gamma: f64,
    },
    /// `u(x) = -x^{-γ}` on `x > 0`.
    #[serde(rename = "power")]
    PowerNeg {
        #[serde(deserialize_with = "gamma_from_json")]
        gamma: f64,
    },
}

fn one() -> f64 {
    1.0
}

fn gamma_from_json<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }
    match Raw::deserialize(de)? {
        Raw::Num(v) => Ok(v),
        Raw::Text(s) => parse_gamma(&s).map_err(serde::de::Error::custom),
    }
}

impl Default for UtilityFamily {
    fn default() -> Self {
        UtilityFamily::linear()
    }
}

impl UtilityFamily {
    /// `u(x) = x`.
    pub fn linear() -> Self {
        UtilityFamily::Linear { a: 1.0, b: 0.0 }
    }

    pub fn linear_affine(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) || !b.is_finite() {
            return Err(Error::InvalidParameter(format!("linear utility needs a > 0 and finite b, got a = {a}, b = {b}")));
        }
        Ok(UtilityFamily::Linear { a, b })
    }

    pub fn cara(gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(UtilityFamily::CaraExp { gamma })
    }

    pub fn power(gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(UtilityFamily::PowerNeg { gamma })
    }

    /// Re-checks the parameter invariants; needed after deserialization.
    pub fn validate(self) -> Result<Self> {
        match self {
            UtilityFamily::Linear { a, b } => Self::linear_affine(a, b),
            UtilityFamily::CaraExp { gamma } => Self::cara(gamma),
            UtilityFamily::PowerNeg { gamma } => Self::power(gamma),
        }
    }

    pub fn kind(&self) -> FamilyKind {
        match self {
            UtilityFamily::Linear { .. } => FamilyKind::Linear,
            UtilityFamily::CaraExp { .. } => FamilyKind::Cara,
            UtilityFamily::PowerNeg { .. } => FamilyKind::Power,
        }
    }

    pub fn name(&self) -> &'static str {
        self.kind().name()
    }

    pub fn gamma(&self) -> Option<f64> {
        match *self {
            UtilityFamily::Linear { .. } => None,
            UtilityFamily::CaraExp { gamma } | UtilityFamily::PowerNeg { gamma } => Some(gamma),
        }
    }

    pub fn check_domain(&self, x: Money) -> Result<()> {
        let ok = match self {
            UtilityFamily::PowerNeg { .. } => x.0 > 0.0 && x.0.is_finite(),
            _ => x.0.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain { family: self.name(), value: x.0 })
        }
    }

    /// `u(x)`.
    ///
    /// The CARA family underflows to `-0.0` once `γx` passes roughly 745;
    /// expected utilities and certainty equivalents go through [`Self::log_disutility`]
    /// instead and never see that.
    pub fn eval(&self, x: Money) -> Result<UtilValue> {
        self.check_domain(x)?;
        let v = match *self {
            UtilityFamily::Linear { a, b } => a * x.0 + b,
            UtilityFamily::CaraExp { gamma } => -(-gamma * x.0).exp(),
            UtilityFamily::PowerNeg { gamma } => -x.0.powf(-gamma),
        };
        Ok(UtilValue(v))
    }

    /// `ln(-u(x))` for the two negative-valued families: `-γx` or `-γ·ln x`.
    /// `None` for the linear family.
    pub fn log_disutility(&self, x: Money) -> Result<Option<f64>> {
        self.check_domain(x)?;
        Ok(match *self {
            UtilityFamily::Linear { .. } => None,
            UtilityFamily::CaraExp { gamma } => Some(-gamma * x.0),
            UtilityFamily::PowerNeg { gamma } => Some(-gamma * x.0.ln()),
        })
    }

    /// Wealth whose log-disutility is `log_neg`, i.e. `u⁻¹(-e^{log_neg})`.
    pub fn inverse_log_disutility(&self, log_neg: f64) -> Result<Money> {
        match *self {
            UtilityFamily::Linear { .. } => Err(Error::InvalidParameter(
                "the linear utility has no log-domain representation".into(),
            )),
            UtilityFamily::CaraExp { gamma } => Ok(Money(-log_neg / gamma)),
            UtilityFamily::PowerNeg { gamma } => Ok(Money((-log_neg / gamma).exp())),
        }
    }

    /// `u⁻¹(v)`.
    pub fn inverse(&self, v: UtilValue) -> Result<Money> {
        if !v.0.is_finite() {
            return Err(Error::Range { family: self.name(), value: v.0 });
        }
        match *self {
            UtilityFamily::Linear { a, b } => Ok(Money((v.0 - b) / a)),
            UtilityFamily::CaraExp { .. } | UtilityFamily::PowerNeg { .. } => {
                if v.0 >= 0.0 {
                    return Err(Error::Range { family: self.name(), value: v.0 });
                }
                self.inverse_log_disutility((-v.0).ln())
            }
        }
    }

    /// `u'(x)`.
    pub fn derivative(&self, x: Money) -> Result<f64> {
        self.check_domain(x)?;
        Ok(match *self {
            UtilityFamily::Linear { a, .. } => a,
            UtilityFamily::CaraExp { gamma } => gamma * (-gamma * x.0).exp(),
            UtilityFamily::PowerNeg { gamma } => gamma * x.0.powf(-gamma - 1.0),
        })
    }

    /// `u''(x)`.
    pub fn second_derivative(&self, x: Money) -> Result<f64> {
        self.check_domain(x)?;
        Ok(match *self {
            UtilityFamily::Linear { .. } => 0.0,
            UtilityFamily::CaraExp { gamma } => -gamma * gamma * (-gamma * x.0).exp(),
            UtilityFamily::PowerNeg { gamma } => -gamma * (gamma + 1.0) * x.0.powf(-gamma - 2.0),
        })
    }

    /// Arrow-Pratt absolute risk aversion `-u''(x)/u'(x)`, per dollar.
    pub fn ara(&self, x: Money) -> Result<f64> {
        self.check_domain(x)?;
        Ok(match *self {
            UtilityFamily::Linear { .. } => 0.0,
            UtilityFamily::CaraExp { gamma } => gamma,
            UtilityFamily::PowerNeg { gamma } => (1.0 + gamma) / x.0,
        })
    }
}

impl fmt::Display for UtilityFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            UtilityFamily::Linear { a, b } if a == 1.0 && b == 0.0 => write!(f, "u(x) = x"),
            UtilityFamily::Linear { a, b } => write!(f, "u(x) = {a}x + {b}"),
            UtilityFamily::CaraExp { gamma } => write!(f, "u(x) = -exp(-{gamma:e} x)"),
            UtilityFamily::PowerNeg { gamma } => write!(f, "u(x) = -x^-{gamma}"),
        }
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("gamma must be finite and > 0, got {gamma}")))
    }
}

/// Parses a positive risk-aversion parameter.
///
/// Accepts ordinary floats (`1e-5`, `5.3`), explicit powers of ten
/// (`10^-5.53`, `10^(-4.86)`), and the shorthand `1e-5.53` with a fractional
/// exponent, read as `10^-5.53`.
pub fn parse_gamma(text: &str) -> Result<f64> {
    let s = text.trim();
    let bad = || Error::InvalidParameter(format!("cannot parse gamma '{text}'"));
    let value = if let Ok(v) = s.parse::<f64>() {
        v
    } else if let Some(exp) = s.strip_prefix("10^") {
        let exp = exp.trim().trim_start_matches('(').trim_end_matches(')');
        10f64.powf(exp.trim().parse::<f64>().map_err(|_| bad())?)
    } else if let Some(exp) = s.strip_prefix("1e").or_else(|| s.strip_prefix("1E")) {
        10f64.powf(exp.parse::<f64>().map_err(|_| bad())?)
    } else {
        return Err(bad());
    };
    check_gamma(value)?;
    Ok(value)
}
