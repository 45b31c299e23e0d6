//! Catalog of metric-generating functions and kernel evaluation.
//!
//! Every entry is an operator monotone function `f: (0,∞) → (0,∞)` with
//! `f(t) = t·f(1/t)` and `f(1) = 1`. The catalog:
//!
//! | id           | f(t)                                  | f(0)      |
//! |--------------|---------------------------------------|-----------|
//! | `wyd:<p>`    | `p(1−p)(t−1)²/((t^p−1)(t^{1−p}−1))`   | `p(1−p)` for `0<p<1`, else `0` |
//! | `kubo`       | `(t−1)/log t`                         | `0`       |
//! | `harmonic`   | `2t/(t+1)`                            | `0`       |
//! | `bures`      | `(1+t)/2`                             | `1/2`     |
//!
//! `wyd:<p>` accepts `p ∈ [−1,2] \ {0,1}`. The formula is invariant under
//! `p ↔ 1−p`, so the `p ∈ [−1,0)` branch coincides with `1−p ∈ (1,2]` and
//! is non-regular; `f(0) > 0` holds exactly for `0 < p < 1`. `kubo` is the
//! common `p → 0` / `p → 1` limit and `harmonic` equals `wyd:2` = `wyd:-1`,
//! the generator of the minimal monotone metric. `bures` (the largest
//! function, generating the minimal *metric constant* 1/2) is included as
//! a well-known regular entry for breadth.
//!
//! A metric is *regular* when `f(0) > 0`; only regular metrics extend to
//! rank-deficient states.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// Default eigenvalue floor below which non-regular kernels refuse to
/// evaluate instead of silently returning huge values.
pub const EIGENVALUE_FLOOR: f64 = 1e-12;

/// Identifier of a catalog entry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MetricId {
    /// Wigner-Yanase-Dyson family, `p ∈ [−1,2] \ {0,1}`.
    Wyd(f64),
    /// `(t−1)/log t`, generating the Kubo (Bogoliubov) metric.
    Kubo,
    /// `2t/(t+1)`, generating the minimal monotone metric.
    Harmonic,
    /// `(1+t)/2`, the SLD/Bures generator.
    Bures,
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricId::Wyd(p) => write!(f, "wyd:{p}"),
            MetricId::Kubo => write!(f, "kubo"),
            MetricId::Harmonic => write!(f, "harmonic"),
            MetricId::Bures => write!(f, "bures"),
        }
    }
}

impl FromStr for MetricId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kubo" => Ok(MetricId::Kubo),
            "harmonic" => Ok(MetricId::Harmonic),
            "bures" => Ok(MetricId::Bures),
            _ => {
                if let Some(p) = s.strip_prefix("wyd:") {
                    let p: f64 = p
                        .parse()
                        .map_err(|_| Error::InvalidArgument(format!("bad metric id {s:?}")))?;
                    Ok(MetricId::Wyd(p))
                } else {
                    Err(Error::InvalidArgument(format!("unknown metric id {s:?}")))
                }
            }
        }
    }
}

impl Serialize for MetricId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MetricId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Regularity of a catalog entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regularity {
    Regular,
    NonRegular,
}

/// A validated catalog entry: the generating function together with its
/// limit at zero and regularity classification.
#[derive(Clone, Copy, Debug)]
pub struct MonotoneFunction {
    id: MetricId,
    f_at_zero: f64,
}

impl MonotoneFunction {
    pub fn new(id: MetricId) -> Result<Self> {
        if let MetricId::Wyd(p) = id {
            if !p.is_finite() || !(-1.0..=2.0).contains(&p) {
                return Err(Error::UnsupportedParameter(format!(
                    "wyd exponent must lie in [-1, 2], got {p}"
                )));
            }
            if p == 0.0 || p == 1.0 {
                return Err(Error::UnsupportedParameter(
                    "wyd exponent 0 and 1 are served by the kubo entry".into(),
                ));
            }
        }
        let f_at_zero = match id {
            MetricId::Wyd(p) if p > 0.0 && p < 1.0 => p * (1.0 - p),
            MetricId::Wyd(_) => 0.0,
            MetricId::Kubo | MetricId::Harmonic => 0.0,
            MetricId::Bures => 0.5,
        };
        Ok(Self { id, f_at_zero })
    }

    /// Parse an id string such as `wyd:0.5` into a catalog entry.
    pub fn parse(id: &str) -> Result<Self> {
        Self::new(id.parse()?)
    }

    pub fn id(&self) -> MetricId {
        self.id
    }

    /// The continuous extension `f(0) = lim_{t→0} f(t)`.
    pub fn f_at_zero(&self) -> f64 {
        self.f_at_zero
    }

    pub fn is_regular(&self) -> bool {
        self.f_at_zero > 0.0
    }

    pub fn regularity(&self) -> Regularity {
        if self.is_regular() {
            Regularity::Regular
        } else {
            Regularity::NonRegular
        }
    }

    /// The metric constant `m(c) = f(0)`, defined for regular entries.
    pub fn metric_constant(&self) -> Option<f64> {
        self.is_regular().then_some(self.f_at_zero)
    }

    /// Evaluate `f(t)` for `t > 0`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !t.is_finite() || t <= 0.0 {
            return Err(Error::Domain(format!("f is defined for t > 0, got {t}")));
        }
        Ok(match self.id {
            MetricId::Wyd(p) => {
                if t == 1.0 {
                    1.0
                } else {
                    let s = t - 1.0;
                    p * (1.0 - p) * s * s / (pow_m1(t, p) * pow_m1(t, 1.0 - p))
                }
            }
            MetricId::Kubo => {
                if t == 1.0 {
                    1.0
                } else if t > 0.5 && t < 2.0 {
                    // t−1 is exact here (Sterbenz), ln_1p keeps it accurate.
                    let s = t - 1.0;
                    s / s.ln_1p()
                } else {
                    (t - 1.0) / t.ln()
                }
            }
            MetricId::Harmonic => 2.0 * t / (t + 1.0),
            MetricId::Bures => 0.5 * (1.0 + t),
        })
    }
}

/// `t^p − 1`, stable for `t` near 1 and for small `p·log t`.
///
/// Inside `|t−1| < 1e-4` the direct power loses all significant digits to
/// cancellation, so a second-order expansion in `s = t−1` is used:
/// `p·s·(1 + (p−1)s/2 + (p−1)(p−2)s²/6)`, with relative truncation error
/// `O(s³)`. Elsewhere `expm1(p·log t)` avoids the subtraction entirely.
pub(crate) fn pow_m1(t: f64, p: f64) -> f64 {
    let s = t - 1.0;
    if s.abs() < 1e-4 {
        p * s * (1.0 + (p - 1.0) * s / 2.0 + (p - 1.0) * (p - 2.0) * s * s / 6.0)
    } else {
        (p * t.ln()).exp_m1()
    }
}

/// Kernel evaluation for one catalog entry.
///
/// `c(x,y) = 1/(y·f(x/y))` is the Morozova-Chentsov function, and
/// `ĉ(x,y) = (x−y)²·c(x,y)` its diagonal-vanishing transform. For regular
/// entries `ĉ` extends continuously to the boundary by `ĉ(x,0) = x/f(0)`
/// and `ĉ(0,0) = 0` (from `y·f(x/y) = x·f(y/x) → x·f(0)`). Non-regular
/// entries reject arguments below [`MetricKernel::floor`].
#[derive(Clone, Copy, Debug)]
pub struct MetricKernel {
    f: MonotoneFunction,
    floor: f64,
}

impl MetricKernel {
    pub fn new(f: MonotoneFunction) -> Self {
        Self { f, floor: EIGENVALUE_FLOOR }
    }

    pub fn with_floor(f: MonotoneFunction, floor: f64) -> Self {
        Self { f, floor }
    }

    pub fn function(&self) -> &MonotoneFunction {
        &self.f
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    /// `c(x,y) = 1/(y·f(x/y))` for `x, y > 0`.
    pub fn c(&self, x: f64, y: f64) -> Result<f64> {
        if !(x > 0.0 && y > 0.0) {
            return Err(Error::Domain(format!("c requires positive arguments, got ({x}, {y})")));
        }
        Ok(1.0 / (y * self.f.eval(x / y)?))
    }

    /// `ĉ(x,y) = (x−y)²·c(x,y)` with exact diagonal zero and, for regular
    /// entries, the boundary rules `ĉ(x,0) = x/f(0)`, `ĉ(0,0) = 0`.
    pub fn c_hat(&self, x: f64, y: f64) -> Result<f64> {
        if !(x >= 0.0 && y >= 0.0) {
            return Err(Error::Domain(format!("c_hat requires nonnegative arguments, got ({x}, {y})")));
        }
        if !self.f.is_regular() && (x < self.floor || y < self.floor) {
            return Err(Error::SingularMetric(format!(
                "non-regular metric {} needs spectrum above {:.1e}, got ({x:.3e}, {y:.3e})",
                self.f.id(),
                self.floor
            )));
        }
        if x == y {
            return Ok(0.0);
        }
        if x == 0.0 {
            return Ok(y / self.f.f_at_zero());
        }
        if y == 0.0 {
            return Ok(x / self.f.f_at_zero());
        }
        let d = x - y;
        Ok(d * d * self.c(x, y)?)
    }

    /// `h(t) = (t−1)²/f(t)`, the generator whose perspective is `ĉ`.
    pub fn h(&self, t: f64) -> Result<f64> {
        if !t.is_finite() || t <= 0.0 {
            return Err(Error::Domain(format!("h is defined for t > 0, got {t}")));
        }
        if t == 1.0 {
            return Ok(0.0);
        }
        let s = t - 1.0;
        Ok(s * s / self.f.eval(t)?)
    }
}
