//! The constants ledger: hyperbolicity constant, norm constant and the
//! derived product constant `C0 = (2853 * delta * c_norm + 2^851)^2`, with
//! every named multiple used by the product estimates.

use std::fmt;
use std::str::FromStr;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{GeomError, Result};
use crate::scalar::BigScalar;

/// `(2853 * delta * c_norm + 2^851)^2`, exactly.
pub fn compute_c0(delta: &BigScalar, c_norm: &BigScalar) -> Result<BigScalar> {
    check_at_least_one("delta", delta)?;
    check_at_least_one("c_norm", c_norm)?;
    let base = &(&(delta * c_norm) * 2853) + &BigScalar::pow2(851);
    Ok(&base * &base)
}

fn check_at_least_one(name: &'static str, v: &BigScalar) -> Result<()> {
    if *v < BigScalar::one() {
        return Err(GeomError::InvalidConstant {
            name,
            value: v.to_string(),
        });
    }
    Ok(())
}

/// Named multiples of the ledger constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThresholdId {
    C0x4,
    C0x7,
    C0x13,
    C0x15,
    C0x16,
    C0x17,
    C0x22,
    C0x196Cn,
    DeltaX24,
    DeltaX54,
    DeltaX96,
    DeltaX144,
    DeltaX200,
    DeltaX288,
    DeltaX768,
    DeltaX1152Cn,
    DeltaX1700,
}

impl ThresholdId {
    pub const ALL: [ThresholdId; 17] = [
        ThresholdId::C0x4,
        ThresholdId::C0x7,
        ThresholdId::C0x13,
        ThresholdId::C0x15,
        ThresholdId::C0x16,
        ThresholdId::C0x17,
        ThresholdId::C0x22,
        ThresholdId::C0x196Cn,
        ThresholdId::DeltaX24,
        ThresholdId::DeltaX54,
        ThresholdId::DeltaX96,
        ThresholdId::DeltaX144,
        ThresholdId::DeltaX200,
        ThresholdId::DeltaX288,
        ThresholdId::DeltaX768,
        ThresholdId::DeltaX1152Cn,
        ThresholdId::DeltaX1700,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ThresholdId::C0x4 => "C0_x4",
            ThresholdId::C0x7 => "C0_x7",
            ThresholdId::C0x13 => "C0_x13",
            ThresholdId::C0x15 => "C0_x15",
            ThresholdId::C0x16 => "C0_x16",
            ThresholdId::C0x17 => "C0_x17",
            ThresholdId::C0x22 => "C0_x22",
            ThresholdId::C0x196Cn => "C0_x196_CN",
            ThresholdId::DeltaX24 => "DELTA_x24",
            ThresholdId::DeltaX54 => "DELTA_x54",
            ThresholdId::DeltaX96 => "DELTA_x96",
            ThresholdId::DeltaX144 => "DELTA_x144",
            ThresholdId::DeltaX200 => "DELTA_x200",
            ThresholdId::DeltaX288 => "DELTA_x288",
            ThresholdId::DeltaX768 => "DELTA_x768",
            ThresholdId::DeltaX1152Cn => "DELTA_x1152_CN",
            ThresholdId::DeltaX1700 => "DELTA_x1700",
        }
    }

    /// `(base, multiplier, scaled by c_norm)`.
    fn shape(self) -> (Base, i64, bool) {
        use ThresholdId::*;
        match self {
            C0x4 => (Base::C0, 4, false),
            C0x7 => (Base::C0, 7, false),
            C0x13 => (Base::C0, 13, false),
            C0x15 => (Base::C0, 15, false),
            C0x16 => (Base::C0, 16, false),
            C0x17 => (Base::C0, 17, false),
            C0x22 => (Base::C0, 22, false),
            C0x196Cn => (Base::C0, 196, true),
            DeltaX24 => (Base::Delta, 24, false),
            DeltaX54 => (Base::Delta, 54, false),
            DeltaX96 => (Base::Delta, 96, false),
            DeltaX144 => (Base::Delta, 144, false),
            DeltaX200 => (Base::Delta, 200, false),
            DeltaX288 => (Base::Delta, 288, false),
            DeltaX768 => (Base::Delta, 768, false),
            DeltaX1152Cn => (Base::Delta, 1152, true),
            DeltaX1700 => (Base::Delta, 1700, false),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Base {
    C0,
    Delta,
}

impl fmt::Display for ThresholdId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ThresholdId {
    type Err = GeomError;

    fn from_str(s: &str) -> Result<Self> {
        ThresholdId::ALL
            .iter()
            .copied()
            .find(|t| t.name() == s)
            .ok_or_else(|| GeomError::UnknownThreshold {
                name: s.to_string(),
                valid: ThresholdId::ALL.iter().map(|t| t.name()).collect::<Vec<_>>().join(", "),
            })
    }
}

/// Exact home of `delta`, `c_norm` and `c0`. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantsLedger {
    delta: BigScalar,
    c_norm: BigScalar,
    c0: BigScalar,
}

impl ConstantsLedger {
    pub fn new(delta: BigScalar, c_norm: BigScalar) -> Result<Self> {
        let c0 = compute_c0(&delta, &c_norm)?;
        Ok(ConstantsLedger { delta, c_norm, c0 })
    }

    /// `delta = 1`, `c_norm = 1`.
    pub fn unit() -> Self {
        ConstantsLedger::new(BigScalar::one(), BigScalar::one()).expect("unit constants are valid")
    }

    pub fn delta(&self) -> &BigScalar {
        &self.delta
    }

    pub fn c_norm(&self) -> &BigScalar {
        &self.c_norm
    }

    pub fn c0(&self) -> &BigScalar {
        &self.c0
    }

    pub fn threshold(&self, id: ThresholdId) -> BigScalar {
        let (base, k, with_norm) = id.shape();
        let b = match base {
            Base::C0 => &self.c0,
            Base::Delta => &self.delta,
        };
        let v = b * k;
        if with_norm {
            &v * &self.c_norm
        } else {
            v
        }
    }

    pub fn threshold_by_name(&self, name: &str) -> Result<BigScalar> {
        Ok(self.threshold(name.parse()?))
    }

    /// Slack `26 * C0 + 8 * K` for the component projections of a
    /// `K`-coarsely monotone product geodesic.
    pub fn projection_slack(&self, coarseness: &BigScalar) -> BigScalar {
        &(&self.c0 * 26) + &(coarseness * 8)
    }

    /// Additive gap `30 * (5706 * delta + 2^851)^2` between the l_r and the
    /// l_1 product metrics.
    pub fn lr_comparison_bound(&self) -> BigScalar {
        let base = &(&self.delta * 5706) + &BigScalar::pow2(851);
        &(&base * &base) * 30
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("ledger serializes")
    }
}

impl Serialize for ConstantsLedger {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ConstantsLedger", 3)?;
        st.serialize_field("delta", &self.delta.to_string())?;
        st.serialize_field("c_norm", &self.c_norm.to_string())?;
        st.serialize_field("c0_log2", &self.c0.log2_approx())?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c0_unit() -> BigScalar {
        let b = &BigScalar::from_int(2853) + &BigScalar::pow2(851);
        &b * &b
    }

    #[test]
    fn c0_matches_closed_form() {
        let c0 = compute_c0(&BigScalar::one(), &BigScalar::one()).unwrap();
        assert_eq!(c0, c0_unit());
        assert!((c0.log2_approx() - 1702.0).abs() < 1e-6);
    }

    #[test]
    fn c0_rejects_small_constants() {
        assert!(compute_c0(&BigScalar::from_ratio(1, 2), &BigScalar::one()).is_err());
        assert!(compute_c0(&BigScalar::one(), &BigScalar::from_ratio(99, 100)).is_err());
    }

    #[test]
    fn c0_is_monotone_in_delta() {
        let a = compute_c0(&BigScalar::one(), &BigScalar::one()).unwrap();
        let b = compute_c0(&BigScalar::from_int(2), &BigScalar::one()).unwrap();
        assert!(b > a);
    }

    #[test]
    fn thresholds() {
        let l = ConstantsLedger::unit();
        assert_eq!(l.threshold(ThresholdId::DeltaX96), BigScalar::from_int(96));
        assert_eq!(l.threshold(ThresholdId::C0x15), &c0_unit() * 15);
        let l2 = ConstantsLedger::new(BigScalar::one(), BigScalar::from_int(2)).unwrap();
        assert_eq!(l2.threshold(ThresholdId::DeltaX1152Cn), BigScalar::from_int(2304));
    }

    #[test]
    fn unknown_threshold_lists_names() {
        let err = ConstantsLedger::unit().threshold_by_name("C0_x99").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("C0_x99") && msg.contains("DELTA_x288") && msg.contains("C0_x196_CN"));
    }

    #[test]
    fn json_shape() {
        let l = ConstantsLedger::new(BigScalar::from_ratio(3, 2), BigScalar::from_int(2)).unwrap();
        let v = l.to_json();
        assert_eq!(v["delta"], "3/2");
        assert_eq!(v["c_norm"], "2/1");
        assert!((v["c0_log2"].as_f64().unwrap() - 1702.0).abs() < 1e-6);
        assert!(l.c0() > ConstantsLedger::unit().c0());
    }
}
