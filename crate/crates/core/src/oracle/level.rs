use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;

use crate::carpet::Carpet;
use crate::error::{Error, Result};

/// Quotients within this distance of an integer are rounded to it.
pub const FLOOR_NUDGE: f64 = 1e-12;

/// `L(k)`: the largest `ℓ` with `n^ℓ ≤ m^k`.
///
/// A floating-point comparison of `k log m` and `ℓ log n` is accepted only
/// when its margin exceeds a rounding bound; otherwise the powers are
/// compared exactly.
pub fn level_l(m: u64, n: u64, k: u64) -> u64 {
    let (log_m, log_n) = ((m as f64).ln(), (n as f64).ln());
    let fits = |l: u64| -> bool {
        let a = k as f64 * log_m;
        let b = l as f64 * log_n;
        let margin = 64.0 * f64::EPSILON * (a + b);
        if a - b > margin {
            true
        } else if b - a > margin {
            false
        } else {
            BigUint::from(n).pow(l as u32) <= BigUint::from(m).pow(k as u32)
        }
    };
    let mut l = (k as f64 * log_m / log_n).floor() as u64;
    while l > 0 && !fits(l) {
        l -= 1;
    }
    while fits(l + 1) {
        l += 1;
    }
    l
}

/// `L(k)` for the carpet's `m`, `n`.
pub fn carpet_level(carpet: &Carpet, k: u64) -> u64 {
    level_l(carpet.m(), carpet.n(), k)
}

/// A value of `θ`, optionally carrying an exact rational form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theta {
    value: f64,
    ratio: Option<(u64, u64)>,
}

impl Theta {
    pub fn rational(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidParameter("theta denominator is zero".into()));
        }
        let g = num.gcd(&den).max(1);
        Ok(Self { value: num as f64 / den as f64, ratio: Some((num / g, den / g)) })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn ratio(&self) -> Option<(u64, u64)> {
        self.ratio
    }

    /// `⌊k/θ⌋`, exact for rational `θ`; otherwise the float quotient is
    /// nudged onto a nearby integer (within [`FLOOR_NUDGE`]) before flooring.
    pub fn scale_level(&self, k: u64) -> u64 {
        match self.ratio {
            Some((num, den)) => ((k as u128 * den as u128) / num as u128) as u64,
            None => {
                let q = k as f64 / self.value;
                let nearest = q.round();
                if (q - nearest).abs() <= FLOOR_NUDGE * nearest.max(1.0) {
                    nearest as u64
                } else {
                    q.floor() as u64
                }
            }
        }
    }
}

impl From<f64> for Theta {
    fn from(value: f64) -> Self {
        Self { value, ratio: None }
    }
}

impl fmt::Display for Theta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.ratio {
            Some((a, b)) => write!(f, "{a}/{b}"),
            None => write!(f, "{}", self.value),
        }
    }
}

/// Parses `p/q` and plain decimals (`0.75`) as exact rationals; anything else
/// (exponent notation, very long mantissas) as a float.
impl FromStr for Theta {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidParameter(format!("cannot parse theta from {s:?}"));
        if let Some((a, b)) = s.split_once('/') {
            let num = a.trim().parse::<u64>().map_err(|_| bad())?;
            let den = b.trim().parse::<u64>().map_err(|_| bad())?;
            return Self::rational(num, den);
        }
        let value: f64 = s.parse().map_err(|_| bad())?;
        if let Some((int, frac)) = s.split_once('.') {
            let digits_ok = |t: &str| t.chars().all(|c| c.is_ascii_digit());
            if digits_ok(int) && digits_ok(frac) && frac.len() <= 12 {
                let den = 10u64.pow(frac.len() as u32);
                let whole: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
                let part: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
                return Self::rational(whole * den + part, den);
            }
        } else if let Ok(whole) = s.parse::<u64>() {
            return Self::rational(whole, 1);
        }
        Ok(Self::from(value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_examples() {
        assert_eq!(level_l(2, 3, 10), 6);
        assert_eq!(level_l(2, 3, 1), 0);
        assert_eq!(level_l(4, 16, 7), 3);
        // exact ties n^ℓ = m^k
        assert_eq!(level_l(4, 16, 8), 4);
        assert_eq!(level_l(8, 64, 2), 1);
        assert_eq!(level_l(9, 27, 3), 2);
    }

    #[test]
    fn level_matches_brute_force_powers() {
        for (m, n) in [(2u64, 3u64), (3, 5), (2, 12), (10, 12), (4, 16), (5, 7)] {
            for k in 1..=60u64 {
                let target = BigUint::from(m).pow(k as u32);
                let mut l = 0u32;
                while BigUint::from(n).pow(l + 1) <= target {
                    l += 1;
                }
                assert_eq!(level_l(m, n, k), l as u64, "m={m} n={n} k={k}");
            }
        }
    }

    #[test]
    fn theta_parsing() {
        let t: Theta = "3/4".parse().unwrap();
        assert_eq!(t.ratio(), Some((3, 4)));
        let t: Theta = "0.75".parse().unwrap();
        assert_eq!(t.ratio(), Some((3, 4)));
        let t: Theta = "1".parse().unwrap();
        assert_eq!(t.ratio(), Some((1, 1)));
        let t: Theta = "7.5e-1".parse().unwrap();
        assert_eq!(t.ratio(), None);
        assert!("abc".parse::<Theta>().is_err());
        assert!("1/0".parse::<Theta>().is_err());
    }

    #[test]
    fn scale_level_exact_and_nudged() {
        let exact = Theta::rational(3, 10).unwrap();
        assert_eq!(exact.scale_level(3), 10);
        // 3 / 0.3 evaluates to 10.000000000000002 in floating point
        assert_eq!(Theta::from(0.3).scale_level(3), 10);
        assert_eq!(Theta::from(0.75).scale_level(256), 341);
        assert_eq!(Theta::rational(3, 4).unwrap().scale_level(256), 341);
        assert_eq!(Theta::from(0.7).scale_level(7), 10);
    }
}
