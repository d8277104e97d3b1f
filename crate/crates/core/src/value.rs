use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A security index: a component count or `+∞`. Written as `"inf"` on disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IndexValue {
    Finite(usize),
    Infinite,
}

impl IndexValue {
    pub fn is_finite(self) -> bool {
        matches!(self, IndexValue::Finite(_))
    }

    pub fn finite(self) -> Option<usize> {
        match self {
            IndexValue::Finite(v) => Some(v),
            IndexValue::Infinite => None,
        }
    }
}

impl Ord for IndexValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (IndexValue::Finite(a), IndexValue::Finite(b)) => a.cmp(b),
            (IndexValue::Finite(_), IndexValue::Infinite) => Ordering::Less,
            (IndexValue::Infinite, IndexValue::Finite(_)) => Ordering::Greater,
            (IndexValue::Infinite, IndexValue::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for IndexValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add<usize> for IndexValue {
    type Output = IndexValue;

    fn add(self, rhs: usize) -> IndexValue {
        match self {
            IndexValue::Finite(v) => IndexValue::Finite(v + rhs),
            IndexValue::Infinite => IndexValue::Infinite,
        }
    }
}

impl fmt::Display for IndexValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexValue::Finite(v) => write!(f, "{v}"),
            IndexValue::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for IndexValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            IndexValue::Finite(v) => s.serialize_u64(*v as u64),
            IndexValue::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for IndexValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(usize),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(IndexValue::Finite(v)),
            Raw::Text(t) if t == "inf" => Ok(IndexValue::Infinite),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("expected count or \"inf\", got {t:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_and_text() {
        assert!(IndexValue::Finite(100) < IndexValue::Infinite);
        assert_eq!(IndexValue::Infinite + 1, IndexValue::Infinite);
        assert_eq!(serde_json::to_string(&IndexValue::Infinite).unwrap(), "\"inf\"");
        let v: IndexValue = serde_json::from_str("3").unwrap();
        assert_eq!(v, IndexValue::Finite(3));
    }
}
