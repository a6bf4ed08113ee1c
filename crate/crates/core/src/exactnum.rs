//! Exact rational scalars and generalized binomial coefficients.
//!
//! [`Rational`] is `num_rational::BigRational`, which is kept in lowest terms
//! with a positive denominator after every operation, and prints as `p/q`
//! (or `p` when `q = 1`).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// The integer `i` as a rational.
pub fn int(i: i64) -> Rational {
    Rational::from_integer(BigInt::from(i))
}

/// The fraction `p/q`. Panics when `q = 0`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Generalized binomial coefficient `r (r-1) ... (r-d+1) / d!`.
pub fn binom(r: &Rational, d: u64) -> Rational {
    let mut num = Rational::one();
    let mut k = Rational::zero();
    for _ in 0..d {
        num *= r - &k;
        if num.is_zero() {
            return num;
        }
        k += Rational::one();
    }
    num / factorial(d)
}

/// `binom(r, d)` for an integer top argument.
pub fn binom_i(r: i64, d: u64) -> Rational {
    binom(&int(r), d)
}

/// Multiset coefficient `binom(m + c - 1, c)`.
pub fn mbinom(m: &Rational, c: u64) -> Rational {
    binom(&(m + int(c as i64) - int(1)), c)
}

pub fn factorial(d: u64) -> Rational {
    let mut f = BigInt::one();
    for k in 2..=d {
        f *= k;
    }
    Rational::from_integer(f)
}

/// `r^e` for a signed exponent. Panics on `0^e` with `e < 0`.
pub fn pow(r: &Rational, e: i32) -> Rational {
    num_traits::pow::Pow::pow(r, e)
}

/// `(-1)^k` as a rational.
pub fn sign(k: usize) -> Rational {
    if k % 2 == 0 {
        int(1)
    } else {
        int(-1)
    }
}

pub fn is_integer(r: &Rational) -> bool {
    r.is_integer()
}

/// True when `r` is a non-negative integer.
pub fn is_natural(r: &Rational) -> bool {
    r.is_integer() && !r.is_negative()
}

pub fn ceil(r: &Rational) -> BigInt {
    r.ceil().to_integer()
}

pub fn floor(r: &Rational) -> BigInt {
    r.floor().to_integer()
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Least common multiple of the denominators.
pub fn denominator_lcm(values: &[Rational]) -> BigInt {
    values
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Scale a vector to coprime integers, keeping its direction.
pub fn clear_denominators(values: &[Rational]) -> Vec<Rational> {
    let l = Rational::from_integer(denominator_lcm(values));
    let scaled: Vec<Rational> = values.iter().map(|v| v * &l).collect();
    let g = scaled
        .iter()
        .fold(BigInt::zero(), |acc, v| acc.gcd(v.numer()));
    if g.is_zero() {
        return scaled;
    }
    let g = Rational::from_integer(g);
    scaled.into_iter().map(|v| v / &g).collect()
}

/// Parse `p/q`, an integer, or a terminating decimal such as `-0.125`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::DivisionByZero(format!("denominator in {s:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        let negative = whole.trim_start().starts_with('-');
        let digits = whole.trim_start_matches(['-', '+']);
        if frac.is_empty() && digits.is_empty() {
            return Err(bad());
        }
        if !frac.chars().all(|c| c.is_ascii_digit())
            || !digits.chars().all(|c| c.is_ascii_digit())
        {
            return Err(bad());
        }
        let joined = format!("{digits}{frac}");
        let mut n: BigInt = if joined.is_empty() {
            BigInt::zero()
        } else {
            joined.parse().map_err(|_| bad())?
        };
        if negative {
            n = -n;
        }
        let d = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(Rational::new(n, d));
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Parse a comma-separated list of rationals.
pub fn parse_rational_list(s: &str) -> Result<Vec<Rational>> {
    s.split(',').map(parse_rational).collect()
}

/// Serde helpers that write rationals as `"p/q"` strings.
pub mod ser {
    use super::Rational;
    use serde::ser::{SerializeSeq, Serializer};

    pub fn rational<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn rational_vec<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&r.to_string())?;
        }
        seq.end()
    }

    pub fn rational_mat<S: Serializer>(v: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = v
            .iter()
            .map(|row| row.iter().map(|r| r.to_string()).collect())
            .collect();
        serde::Serialize::serialize(&rows, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binom_examples() {
        assert_eq!(binom_i(5, 2), int(10));
        assert_eq!(binom(&rat(1, 2), 2), rat(-1, 8));
        assert_eq!(binom_i(-3, 2), int(6));
        assert_eq!(binom_i(3, 5), int(0));
        assert_eq!(binom(&rat(7, 3), 0), int(1));
    }

    #[test]
    fn mbinom_examples() {
        assert_eq!(mbinom(&int(3), 1), int(3));
        assert_eq!(mbinom(&rat(-5, 7), 0), int(1));
        assert_eq!(mbinom(&int(2), 3), int(4));
    }

    #[test]
    fn mbinom_reciprocity() {
        for m in 1..8i64 {
            for c in 0..8u64 {
                assert_eq!(mbinom(&int(m), c), mbinom(&int(c as i64 + 1), (m - 1) as u64));
            }
        }
    }

    // Multiset-coefficient summation identities, checked exhaustively.
    #[test]
    fn multiset_identities() {
        let m_ = |m: i64, c: u64| mbinom(&int(m), c);
        for c in 0..=6u64 {
            for d in 0..=6u64 {
                for x in 1..=12i64 {
                    let lhs: Rational = (0..=x).map(|y| m_(y + 1, c)).sum();
                    assert_eq!(lhs, m_(x + 1, c + 1));
                    let lhs: Rational = (0..=x).map(|y| m_(x - y + 1, c) * binom_i(y, d)).sum();
                    assert_eq!(lhs, binom_i(x + c as i64 + 1, c + d + 1));
                }
                for n in 1..=12i64 {
                    let lhs: Rational = (0..n).map(|x| m_(n - x, c) * m_(x + 1, d)).sum();
                    assert_eq!(lhs, m_(n, c + d + 1));
                }
            }
            for x in 1..=12i64 {
                for m in 1..=12i64 {
                    let lhs: Rational = (0..=x)
                        .map(|y| m_(x - y + 1, c) * sign(y as usize) * binom_i(m, y as u64))
                        .sum();
                    assert_eq!(lhs, sign(x as usize) * binom_i(m - c as i64 - 1, x as u64));
                }
            }
        }
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-7").unwrap(), int(-7));
        assert_eq!(parse_rational("0.125").unwrap(), rat(1, 8));
        assert_eq!(parse_rational("-1.5").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.2.3").is_err());
        assert_eq!(
            parse_rational_list("1,1/2, 1/3").unwrap(),
            vec![int(1), rat(1, 2), rat(1, 3)]
        );
    }

    #[test]
    fn display_is_p_over_q() {
        assert_eq!(rat(6, 4).to_string(), "3/2");
        assert_eq!(rat(-4, 2).to_string(), "-2");
        assert_eq!(rat(2, -6).to_string(), "-1/3");
    }

    #[test]
    fn clearing() {
        let v = clear_denominators(&[rat(2, 3), rat(1, 3), int(0), rat(-1, 3)]);
        assert_eq!(v, vec![int(2), int(1), int(0), int(-1)]);
    }
}
