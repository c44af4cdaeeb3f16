//! Thin layer over `num`'s arbitrary-precision rationals.
//!
//! All geometry in this crate runs on `Rat`. The helpers here fix the one
//! textual convention used across files and reports: rationals are always
//! written `p/q`, even for integers, so round-tripping never depends on a
//! reduced form looking integral.

use crate::error::{PexError, Result};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::str::FromStr;

pub type Rat = BigRational;

/// `rat(p, q)` with machine-integer arguments, for literals in code and tests.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_i(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn zero() -> Rat {
    Rat::zero()
}

pub fn one() -> Rat {
    Rat::one()
}

/// Accepts `p/q` or a bare integer `p`, with optional leading sign and
/// surrounding whitespace. Rejects zero denominators and empty input.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let t = s.trim();
    if t.is_empty() {
        return Err(PexError::Parse("empty rational".into()));
    }
    let (num_str, den_str) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n = BigInt::from_str(num_str)
        .map_err(|e| PexError::Parse(format!("bad numerator {num_str:?}: {e}")))?;
    let d = BigInt::from_str(den_str)
        .map_err(|e| PexError::Parse(format!("bad denominator {den_str:?}: {e}")))?;
    if d.is_zero() {
        return Err(PexError::Parse(format!("zero denominator in {t:?}")));
    }
    Ok(Rat::new(n, d))
}

/// Always emits `p/q` with q > 0, e.g. `5` prints as `5/1`.
pub fn format_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Floor of a rational as a BigInt (exact, works for negatives).
pub fn rat_floor(r: &Rat) -> BigInt {
    r.floor().to_integer()
}

/// Fractional part in [0, 1).
pub fn rat_fract(r: &Rat) -> Rat {
    r - r.floor()
}

pub fn rat_abs(r: &Rat) -> Rat {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_plain_and_fraction() {
        assert_eq!(parse_rat("1/3").unwrap(), rat(1, 3));
        assert_eq!(parse_rat("-2/7").unwrap(), rat(-2, 7));
        assert_eq!(parse_rat("5").unwrap(), rat_i(5));
        assert_eq!(parse_rat(" 4 / 6 ").unwrap(), rat(2, 3));
        assert_eq!(parse_rat("2/-4").unwrap(), rat(-1, 2));
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_rat("").is_err());
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("a/b").is_err());
        assert!(parse_rat("1/2/3").is_err());
    }

    #[test]
    fn format_always_fractional() {
        assert_eq!(format_rat(&rat_i(5)), "5/1");
        assert_eq!(format_rat(&rat(1, 3)), "1/3");
        assert_eq!(format_rat(&rat(-4, 6)), "-2/3");
        assert_eq!(format_rat(&rat(0, 9)), "0/1");
    }

    #[test]
    fn roundtrip() {
        for s in ["1/3", "-2/7", "5/1", "0/1", "123456789/987654321"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(parse_rat(&format_rat(&r)).unwrap(), r);
        }
    }

    #[test]
    fn floor_fract() {
        assert_eq!(rat_floor(&rat(7, 2)), BigInt::from(3));
        assert_eq!(rat_floor(&rat(-7, 2)), BigInt::from(-4));
        assert_eq!(rat_fract(&rat(-7, 2)), rat(1, 2));
        assert_eq!(rat_fract(&rat_i(3)), zero());
    }
}
