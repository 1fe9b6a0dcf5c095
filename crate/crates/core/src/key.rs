use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Registry key in canonical lowercase UUID text form (`8-4-4-4-12` hex).
///
/// Business, service, binding and tModel keys share this type, and so do
/// actors in the collaboration graph. Uppercase hex is accepted on input and
/// folded to lowercase, so equality is byte-wise on the canonical form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Key(String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid key {0:?}: expected a UUID of the form xxxxxxxx-xxxx-xxxx-xxxx-xxxxxxxxxxxx")]
pub struct InvalidKey(pub String);

const GROUPS: [usize; 5] = [8, 4, 4, 4, 12];

impl Key {
    pub fn parse(text: &str) -> Result<Self, InvalidKey> {
        let bad = || InvalidKey(text.to_string());
        if text.len() != 36 {
            return Err(bad());
        }
        let mut parts = text.split('-');
        for len in GROUPS {
            let part = parts.next().ok_or_else(bad)?;
            if part.len() != len || !part.bytes().all(|b| b.is_ascii_hexdigit()) {
                return Err(bad());
            }
        }
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(Key(text.to_ascii_lowercase()))
    }

    /// Builds a key from 128 bits, laid out big-endian.
    pub fn from_u128(bits: u128) -> Self {
        let hex = format!("{bits:032x}");
        Key(format!(
            "{}-{}-{}-{}-{}",
            &hex[0..8],
            &hex[8..12],
            &hex[12..16],
            &hex[16..20],
            &hex[20..32]
        ))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Key {
    type Err = InvalidKey;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Key::parse(s)
    }
}

impl Serialize for Key {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Key {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Key::parse(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn accepts_canonical_and_folds_case() {
        let k = Key::parse("0000000A-0000-4000-8000-00000000000F").unwrap();
        assert_eq!(k.as_str(), "0000000a-0000-4000-8000-00000000000f");
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            "",
            "not-a-key",
            "00000000000040008000000000000001",
            "{00000000-0000-4000-8000-000000000001}",
            "00000000-0000-4000-8000-00000000000g",
            "000000000-000-4000-8000-000000000001",
            "00000000-0000-4000-8000-0000000000011",
        ] {
            assert!(Key::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn serde_rejects_bad_keys() {
        assert!(serde_json::from_str::<Key>("\"xyz\"").is_err());
        let k: Key = serde_json::from_str("\"00000000-0000-4000-8000-000000000001\"").unwrap();
        assert_eq!(serde_json::to_string(&k).unwrap(), "\"00000000-0000-4000-8000-000000000001\"");
    }

    proptest! {
        #[test]
        fn from_u128_is_parseable(bits in any::<u128>()) {
            let k = Key::from_u128(bits);
            prop_assert_eq!(Key::parse(k.as_str()).unwrap(), k);
        }
    }
}
