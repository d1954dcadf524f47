//! Number formatting shared by every file writer: 17 significant digits,
//! `.` as the decimal separator, independent of locale.

use serde_json::value::RawValue;

use crate::error::{Error, Result};

/// Formats a finite double with 17 significant digits.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// A JSON number literal with 17 significant digits.
pub fn json_number(x: f64) -> Result<Box<RawValue>> {
    if !x.is_finite() {
        return Err(Error::FileFormat(format!("cannot serialize non-finite number {x}")));
    }
    RawValue::from_string(sig17(x)).map_err(|e| Error::FileFormat(e.to_string()))
}

pub fn json_numbers(xs: &[f64]) -> Result<Vec<Box<RawValue>>> {
    xs.iter().map(|&x| json_number(x)).collect()
}

pub(crate) fn parse_f64(field: &str, what: &str) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|_| Error::FileFormat(format!("bad number {field:?} in {what}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0] {
            let s = sig17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let digits = s.split('e').next().unwrap().chars().filter(|c| c.is_ascii_digit()).count();
            assert_eq!(digits, 17, "{s}");
        }
    }

    #[test]
    fn raw_json_is_valid() {
        let v: f64 = serde_json::from_str(json_number(-2.5).unwrap().get()).unwrap();
        assert_eq!(v, -2.5);
        assert!(json_number(f64::NAN).is_err());
    }
}
