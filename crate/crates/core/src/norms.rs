//! Admissible norms `N` on pairs of component distances.
//!
//! `N` is admissible when `N(1, 1) = 1` and `(a + b) / 2 <= N(a, b)`; the
//! constant `C_N` bounds it from above by `C_N * (a + b) / 2`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::scalar::BigScalar;

pub const DEFAULT_GRID: usize = 4096;
const UNIT_TOL: f64 = 1e-12;

type Evaluator = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum NormFamily {
    /// `((a^r + b^r) / 2)^(1/r)`; `r = inf` gives `max(a, b)`.
    NormalizedLr(f64),
    Custom {
        name: String,
        eval: Evaluator,
    },
}

impl fmt::Debug for NormFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormFamily::NormalizedLr(r) => write!(f, "NormalizedLr({r})"),
            NormFamily::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AdmissibleNorm {
    family: NormFamily,
    c_n: BigScalar,
}

impl AdmissibleNorm {
    pub fn l1() -> Self {
        AdmissibleNorm {
            family: NormFamily::NormalizedLr(1.0),
            c_n: BigScalar::one(),
        }
    }

    /// Normalized `l_r`, `r >= 1` (`f64::INFINITY` allowed). The declared
    /// constant is 1 for `r = 1` and 2 otherwise.
    pub fn lr(r: f64) -> Result<Self> {
        if r.is_nan() || r < 1.0 {
            return Err(GeomError::Precondition(format!("norm exponent r = {r} must be >= 1")));
        }
        let c_n = if r == 1.0 {
            BigScalar::one()
        } else {
            BigScalar::from_int(2)
        };
        Ok(AdmissibleNorm {
            family: NormFamily::NormalizedLr(r),
            c_n,
        })
    }

    pub fn custom(
        name: impl Into<String>,
        c_n: BigScalar,
        eval: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        AdmissibleNorm {
            family: NormFamily::Custom {
                name: name.into(),
                eval: Arc::new(eval),
            },
            c_n,
        }
    }

    /// Replaces the declared `C_N`.
    pub fn with_c_n(mut self, c_n: BigScalar) -> Self {
        self.c_n = c_n;
        self
    }

    pub fn family(&self) -> &NormFamily {
        &self.family
    }

    pub fn c_n(&self) -> &BigScalar {
        &self.c_n
    }

    pub fn is_l1(&self) -> bool {
        matches!(self.family, NormFamily::NormalizedLr(r) if r == 1.0)
    }

    pub fn evaluate(&self, a: f64, b: f64) -> Result<f64> {
        if a < 0.0 || b < 0.0 {
            return Err(GeomError::NegativeNormInput(a, b));
        }
        Ok(self.raw(a, b))
    }

    /// Evaluation on arguments already known to be nonnegative.
    pub(crate) fn raw(&self, a: f64, b: f64) -> f64 {
        match &self.family {
            NormFamily::NormalizedLr(r) => lr_value(*r, a, b),
            NormFamily::Custom { eval, .. } => eval(a, b),
        }
    }

    /// Checks normalization and both admissibility inequalities on `grid + 1`
    /// points of the segment `a + b = 2`.
    pub fn certify_admissible(&self, grid: usize) -> Result<AdmissibilityReport> {
        if grid < 16 {
            return Err(GeomError::Precondition(format!("grid resolution {grid} < 16")));
        }
        let unit_value = self.raw(1.0, 1.0);
        let mut lower_ok = true;
        let mut measured = f64::NEG_INFINITY;
        let mut worst = (0.0, 2.0);
        for i in 0..=grid {
            let a = 2.0 * i as f64 / grid as f64;
            let b = 2.0 - a;
            let v = self.raw(a, b);
            if v < 1.0 - UNIT_TOL {
                lower_ok = false;
            }
            if v > measured {
                measured = v;
                worst = (a, b);
            }
        }
        let declared = self.c_n.to_f64();
        let unit_ok = (unit_value - 1.0).abs() <= UNIT_TOL;
        Ok(AdmissibilityReport {
            passes: unit_ok && lower_ok && measured <= declared + UNIT_TOL,
            unit_value,
            lower_bound_ok: lower_ok,
            measured_c_n: measured,
            declared_c_n: declared,
            worst_ratio_point: worst,
        })
    }

    /// `sum N(d_p, d_q)` over the steps.
    pub fn path_length(&self, steps: &[(f64, f64)]) -> Result<f64> {
        steps.iter().map(|&(a, b)| self.evaluate(a, b)).sum()
    }

    pub fn name(&self) -> String {
        match &self.family {
            NormFamily::NormalizedLr(r) if r.is_infinite() => "linf".into(),
            NormFamily::NormalizedLr(r) => format!("l{r}"),
            NormFamily::Custom { name, .. } => name.clone(),
        }
    }
}

impl Default for AdmissibleNorm {
    fn default() -> Self {
        AdmissibleNorm::l1()
    }
}

fn lr_value(r: f64, a: f64, b: f64) -> f64 {
    if r.is_infinite() {
        return a.max(b);
    }
    if r == 1.0 {
        return (a + b) / 2.0;
    }
    let m = a.max(b);
    if m == 0.0 {
        return 0.0;
    }
    let (sa, sb) = (a / m, b / m);
    m * ((sa.powf(r) + sb.powf(r)) / 2.0).powf(1.0 / r)
}

impl fmt::Display for AdmissibleNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Parses `l<r>` with `r >= 1` or `linf`.
impl FromStr for AdmissibleNorm {
    type Err = GeomError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || GeomError::Precondition(format!("unknown norm `{s}` (expected l<r> with r >= 1, or linf)"));
        let rest = s.strip_prefix('l').ok_or_else(bad)?;
        if rest == "inf" {
            return AdmissibleNorm::lr(f64::INFINITY);
        }
        let r: f64 = rest.parse().map_err(|_| bad())?;
        if !r.is_finite() {
            return Err(bad());
        }
        AdmissibleNorm::lr(r)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub passes: bool,
    pub unit_value: f64,
    pub lower_bound_ok: bool,
    pub measured_c_n: f64,
    pub declared_c_n: f64,
    pub worst_ratio_point: (f64, f64),
}
