//! Dense univariate polynomials with rational coefficients.

use std::fmt;
use std::ops::Mul;

use num_traits::{One, Zero};

use crate::exactnum::Rational;

/// Coefficients are stored lowest degree first, with no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Poly::new(vec![Rational::one()])
    }

    /// The monic linear factor `X - r`.
    pub fn linear(r: &Rational) -> Self {
        Poly::new(vec![-r.clone(), Rational::one()])
    }

    /// `prod (X - r)` over the given roots.
    pub fn from_roots<'a, I: IntoIterator<Item = &'a Rational>>(roots: I) -> Self {
        roots
            .into_iter()
            .fold(Poly::one(), |acc, r| &acc * &Poly::linear(r))
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn scale(&self, s: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let z = Rational::zero();
        Poly::new(
            (0..len)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) - other.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }
}

impl Mul for &Poly {
    type Output = Poly;

    fn mul(self, rhs: &Poly) -> Poly {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})X")?,
                _ => write!(f, "({c})X^{k}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    #[test]
    fn roots_expand() {
        let p = Poly::from_roots(&[int(1), int(-1)]);
        assert_eq!(p.coeffs(), &[int(-1), int(0), int(1)]);
        assert_eq!(p.eval(&int(3)), int(8));
        assert_eq!(p.degree(), Some(2));
    }

    #[test]
    fn trailing_zeros_trimmed() {
        let p = Poly::new(vec![rat(1, 2), int(0), int(0)]);
        assert_eq!(p.degree(), Some(0));
        assert_eq!(p.sub(&p), Poly::zero());
    }
}
