//! Deterministic JSON output helpers.

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// Float serialized with 17 significant digits; non-finite values become
/// `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sig17(pub f64);

impl Serialize for Sig17 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(format!("{:.16e}", self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("serializable value");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_digits() {
        assert_eq!(serde_json::to_string(&Sig17(1.0)).unwrap(), "1.0000000000000000e0");
        assert_eq!(serde_json::to_string(&Sig17(f64::NAN)).unwrap(), "null");
        let v: f64 = serde_json::from_str(&serde_json::to_string(&Sig17(0.1 + 0.2)).unwrap()).unwrap();
        assert_eq!(v, 0.1 + 0.2);
    }
}
