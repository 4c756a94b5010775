//! Fuzzy operators for the Gödel, Product and Łukasiewicz semantics.
//!
//! Every operator is total on `[0, 1]`. The `f64` entry points on
//! [`Semantics`] are what the columnar evaluator uses; the free functions
//! work on [`FuzzyValue`] and are the checked public surface.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("membership degree {0} is outside [0, 1]")]
pub struct OutOfRange(pub f64);

/// A membership degree in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize)]
#[serde(transparent)]
#[repr(transparent)]
pub struct FuzzyValue(f64);

impl FuzzyValue {
    pub const ZERO: FuzzyValue = FuzzyValue(0.0);
    pub const ONE: FuzzyValue = FuzzyValue(1.0);

    /// Rejects NaN and anything outside `[0, 1]`; nothing is clamped.
    pub fn new(value: f64) -> Result<Self, OutOfRange> {
        if (0.0..=1.0).contains(&value) {
            Ok(FuzzyValue(value))
        } else {
            Err(OutOfRange(value))
        }
    }

    /// Wraps an operator result. Rounding in `a + b - a*b` and friends can
    /// land one ulp outside the unit interval, so this saturates.
    #[inline]
    pub(crate) fn saturating(value: f64) -> Self {
        FuzzyValue(value.clamp(0.0, 1.0))
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for FuzzyValue {
    type Error = OutOfRange;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        FuzzyValue::new(value)
    }
}

impl From<FuzzyValue> for f64 {
    fn from(v: FuzzyValue) -> f64 {
        v.0
    }
}

impl<'de> Deserialize<'de> for FuzzyValue {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = f64::deserialize(deserializer)?;
        FuzzyValue::new(raw).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for FuzzyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Semantics {
    Goedel,
    Product,
    Lukasiewicz,
}

impl Semantics {
    pub const ALL: [Semantics; 3] = [Semantics::Goedel, Semantics::Product, Semantics::Lukasiewicz];

    /// Two-letter suffix used in rendered operator names.
    pub fn suffix(self) -> &'static str {
        match self {
            Semantics::Goedel => "gd",
            Semantics::Product => "pr",
            Semantics::Lukasiewicz => "lk",
        }
    }

    pub fn from_suffix(s: &str) -> Option<Self> {
        match s {
            "gd" => Some(Semantics::Goedel),
            "pr" => Some(Semantics::Product),
            "lk" => Some(Semantics::Lukasiewicz),
            _ => None,
        }
    }

    #[inline]
    pub fn tnorm(self, a: f64, b: f64) -> f64 {
        let v = match self {
            Semantics::Goedel => a.min(b),
            Semantics::Product => a * b,
            Semantics::Lukasiewicz => (a + b - 1.0).max(0.0),
        };
        v.clamp(0.0, 1.0)
    }

    #[inline]
    pub fn tconorm(self, a: f64, b: f64) -> f64 {
        let v = match self {
            Semantics::Goedel => a.max(b),
            Semantics::Product => 1.0 - (1.0 - a) * (1.0 - b),
            Semantics::Lukasiewicz => (a + b).min(1.0),
        };
        v.clamp(0.0, 1.0)
    }

    #[inline]
    pub fn s_implication(self, a: f64, c: f64) -> f64 {
        let v = match self {
            Semantics::Goedel => (1.0 - a).max(c),
            Semantics::Product => 1.0 - a * (1.0 - c),
            Semantics::Lukasiewicz => (1.0 - a + c).min(1.0),
        };
        v.clamp(0.0, 1.0)
    }

    #[inline]
    pub fn r_implication(self, a: f64, c: f64) -> f64 {
        let v = match self {
            Semantics::Goedel => {
                if a <= c {
                    1.0
                } else {
                    c
                }
            }
            // a > c >= 0 in the second branch, so the division is safe.
            Semantics::Product => {
                if a <= c {
                    1.0
                } else {
                    c / a
                }
            }
            Semantics::Lukasiewicz => (1.0 - a + c).min(1.0),
        };
        v.clamp(0.0, 1.0)
    }
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Semantics::Goedel => "Goedel",
            Semantics::Product => "Product",
            Semantics::Lukasiewicz => "Lukasiewicz",
        };
        f.write_str(name)
    }
}

/// Strong negation `1 - a`.
#[inline]
pub fn neg(a: FuzzyValue) -> FuzzyValue {
    FuzzyValue(1.0 - a.0)
}

#[inline]
pub fn tnorm(s: Semantics, a: FuzzyValue, b: FuzzyValue) -> FuzzyValue {
    FuzzyValue::saturating(s.tnorm(a.0, b.0))
}

#[inline]
pub fn tconorm(s: Semantics, a: FuzzyValue, b: FuzzyValue) -> FuzzyValue {
    FuzzyValue::saturating(s.tconorm(a.0, b.0))
}

/// `S(N(a), c)`: the implication generalizing `¬a ∨ c`.
#[inline]
pub fn s_implication(s: Semantics, a: FuzzyValue, c: FuzzyValue) -> FuzzyValue {
    FuzzyValue::saturating(s.s_implication(a.0, c.0))
}

/// Residuated implication. Not part of any search library.
#[inline]
pub fn r_implication(s: Semantics, a: FuzzyValue, c: FuzzyValue) -> FuzzyValue {
    FuzzyValue::saturating(s.r_implication(a.0, c.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TOL: f64 = 1e-12;

    fn fv(x: f64) -> FuzzyValue {
        FuzzyValue::new(x).unwrap()
    }

    fn close(a: FuzzyValue, b: f64) -> bool {
        (a.get() - b).abs() <= TOL
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(FuzzyValue::new(-0.01).is_err());
        assert!(FuzzyValue::new(1.0 + 1e-9).is_err());
        assert!(FuzzyValue::new(f64::NAN).is_err());
        assert!(FuzzyValue::new(0.0).is_ok());
        assert!(FuzzyValue::new(1.0).is_ok());
        assert!(serde_json::from_str::<FuzzyValue>("1.5").is_err());
        assert_eq!(serde_json::from_str::<FuzzyValue>("0.25").unwrap().get(), 0.25);
    }

    #[test]
    fn negation_examples() {
        assert!(close(neg(fv(0.3)), 0.7));
        assert_eq!(neg(fv(0.0)).get(), 1.0);
        assert_eq!(neg(fv(0.5)).get(), 0.5);
    }

    #[test]
    fn tnorm_examples() {
        assert!(close(tnorm(Semantics::Lukasiewicz, fv(0.6), fv(0.7)), 0.3));
        assert!(close(tnorm(Semantics::Goedel, fv(0.2), fv(0.9)), 0.2));
        assert!(close(tnorm(Semantics::Product, fv(0.5), fv(0.5)), 0.25));
        for s in Semantics::ALL {
            assert!(close(tnorm(s, fv(0.37), FuzzyValue::ONE), 0.37));
        }
    }

    #[test]
    fn tconorm_examples() {
        assert!(close(tconorm(Semantics::Lukasiewicz, fv(0.6), fv(0.7)), 1.0));
        assert!(close(tconorm(Semantics::Product, fv(0.5), fv(0.5)), 0.75));
        for s in Semantics::ALL {
            assert!(close(tconorm(s, fv(0.37), FuzzyValue::ZERO), 0.37));
        }
    }

    #[test]
    fn implication_examples() {
        assert!(close(s_implication(Semantics::Goedel, fv(0.8), fv(0.3)), 0.3));
        assert!(close(s_implication(Semantics::Product, fv(0.8), fv(0.5)), 0.6));
        assert!(close(s_implication(Semantics::Lukasiewicz, fv(0.8), fv(0.5)), 0.7));
        for s in Semantics::ALL {
            assert_eq!(s_implication(s, FuzzyValue::ZERO, fv(0.42)).get(), 1.0);
        }
        assert!(close(r_implication(Semantics::Product, fv(0.8), fv(0.4)), 0.5));
        assert_eq!(r_implication(Semantics::Goedel, fv(0.3), fv(0.7)).get(), 1.0);
        assert!(close(r_implication(Semantics::Lukasiewicz, fv(0.8), fv(0.5)), 0.7));
        assert!(close(r_implication(Semantics::Goedel, fv(0.8), fv(0.5)), 0.5));
    }

    #[test]
    fn suffix_round_trip() {
        for s in Semantics::ALL {
            assert_eq!(Semantics::from_suffix(s.suffix()), Some(s));
        }
        assert_eq!(Semantics::from_suffix("xx"), None);
    }

    fn unit() -> impl Strategy<Value = FuzzyValue> {
        prop_oneof![
            1 => Just(FuzzyValue::ZERO),
            1 => Just(FuzzyValue::ONE),
            8 => (0.0f64..=1.0).prop_map(fv),
        ]
    }

    fn semantics() -> impl Strategy<Value = Semantics> {
        prop::sample::select(Semantics::ALL.to_vec())
    }

    proptest! {
        #[test]
        fn outputs_stay_in_unit_interval(s in semantics(), a in unit(), b in unit()) {
            for v in [tnorm(s, a, b), tconorm(s, a, b), s_implication(s, a, b), r_implication(s, a, b), neg(a)] {
                prop_assert!((0.0..=1.0).contains(&v.get()));
            }
        }

        #[test]
        fn de_morgan_duality(s in semantics(), a in unit(), b in unit()) {
            let lhs = tconorm(s, a, b).get();
            let rhs = neg(tnorm(s, neg(a), neg(b))).get();
            prop_assert!((lhs - rhs).abs() <= TOL);
        }

        #[test]
        fn monotone_in_first_argument(s in semantics(), a in unit(), a2 in unit(), b in unit()) {
            let (lo, hi) = if a <= a2 { (a, a2) } else { (a2, a) };
            prop_assert!(tnorm(s, lo, b) <= tnorm(s, hi, b));
            prop_assert!(tconorm(s, lo, b) <= tconorm(s, hi, b));
        }
    }
}
