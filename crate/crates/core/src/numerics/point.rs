use std::fmt;

use num_complex::Complex64;
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeTuple, Serializer};
use serde::{Deserialize, Serialize};

pub type C64 = Complex64;

/// A point of the Riemann sphere. Infinity is a flag, never a large float.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtComplex {
    Finite(C64),
    Infinity,
}

impl ExtComplex {
    pub fn finite(self) -> Option<C64> {
        match self {
            ExtComplex::Finite(z) => Some(z),
            ExtComplex::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtComplex::Infinity)
    }

    pub fn conj(self) -> Self {
        match self {
            ExtComplex::Finite(z) => ExtComplex::Finite(z.conj()),
            ExtComplex::Infinity => ExtComplex::Infinity,
        }
    }

    /// Chordal distance on the unit sphere (bounded by 2).
    pub fn chordal_distance(self, other: ExtComplex) -> f64 {
        match (self, other) {
            (ExtComplex::Infinity, ExtComplex::Infinity) => 0.0,
            (ExtComplex::Finite(z), ExtComplex::Infinity)
            | (ExtComplex::Infinity, ExtComplex::Finite(z)) => 2.0 / (1.0 + z.norm_sqr()).sqrt(),
            (ExtComplex::Finite(a), ExtComplex::Finite(b)) => {
                2.0 * (a - b).norm() / ((1.0 + a.norm_sqr()).sqrt() * (1.0 + b.norm_sqr()).sqrt())
            }
        }
    }
}

impl From<C64> for ExtComplex {
    fn from(z: C64) -> Self {
        ExtComplex::Finite(z)
    }
}

impl fmt::Display for ExtComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtComplex::Finite(z) => write!(f, "{}", z),
            ExtComplex::Infinity => write!(f, "∞"),
        }
    }
}

/// `[re, im]` for finite points, the string `"inf"` for infinity.
impl Serialize for ExtComplex {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtComplex::Finite(z) => pair::serialize(z, serializer),
            ExtComplex::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtComplex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ExtVisitor;
        impl<'de> Visitor<'de> for ExtVisitor {
            type Value = ExtComplex;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("[re, im] or \"inf\"")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<ExtComplex, E> {
                if v == "inf" {
                    Ok(ExtComplex::Infinity)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
            fn visit_seq<A: SeqAccess<'de>>(self, seq: A) -> Result<ExtComplex, A::Error> {
                pair::visit(seq).map(ExtComplex::Finite)
            }
        }
        deserializer.deserialize_any(ExtVisitor)
    }
}

/// Serde helpers storing a complex number as a `[re, im]` pair.
pub mod pair {
    use super::*;

    pub fn serialize<S: Serializer>(z: &C64, serializer: S) -> Result<S::Ok, S::Error> {
        let mut t = serializer.serialize_tuple(2)?;
        t.serialize_element(&z.re)?;
        t.serialize_element(&z.im)?;
        t.end()
    }

    pub(crate) fn visit<'de, A: SeqAccess<'de>>(mut seq: A) -> Result<C64, A::Error> {
        let re: f64 = seq
            .next_element()?
            .ok_or_else(|| de::Error::invalid_length(0, &"2"))?;
        let im: f64 = seq
            .next_element()?
            .ok_or_else(|| de::Error::invalid_length(1, &"2"))?;
        Ok(C64::new(re, im))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<C64, D::Error> {
        struct PairVisitor;
        impl<'de> Visitor<'de> for PairVisitor {
            type Value = C64;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("[re, im]")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, seq: A) -> Result<C64, A::Error> {
                visit(seq)
            }
        }
        deserializer.deserialize_tuple(2, PairVisitor)
    }

    /// Same encoding for a list of points.
    pub mod vec {
        use super::super::*;

        #[derive(Serialize, Deserialize)]
        struct P(#[serde(with = "super")] C64);

        pub fn serialize<S: Serializer>(v: &[C64], serializer: S) -> Result<S::Ok, S::Error> {
            serializer.collect_seq(v.iter().map(|&z| P(z)))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Vec<C64>, D::Error> {
            let v: Vec<P> = Vec::deserialize(deserializer)?;
            Ok(v.into_iter().map(|p| p.0).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_encoding() {
        let a = ExtComplex::Finite(C64::new(1.5, -2.0));
        assert_eq!(serde_json::to_string(&a).unwrap(), "[1.5,-2.0]");
        assert_eq!(serde_json::to_string(&ExtComplex::Infinity).unwrap(), "\"inf\"");
        let back: ExtComplex = serde_json::from_str("[1.5,-2.0]").unwrap();
        assert_eq!(back, a);
        let inf: ExtComplex = serde_json::from_str("\"inf\"").unwrap();
        assert!(inf.is_infinite());
    }

    #[test]
    fn chordal() {
        let z = ExtComplex::Finite(C64::new(0.0, 0.0));
        assert!((z.chordal_distance(ExtComplex::Infinity) - 2.0).abs() < 1e-15);
        let big = ExtComplex::Finite(C64::new(1e9, 0.0));
        assert!(big.chordal_distance(ExtComplex::Infinity) < 1e-8);
    }
}
