//! Closed-form spectra of the named families, exact right and left
//! eigenvectors, and mixing-rate estimates from exact matrix powers.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{binom, binom_i, clear_denominators, int, pow, sign, to_f64, Rational};
use crate::matrix::Matrix;
use crate::transform::{pascal, pascal_column};
use crate::walk::{invariant_closed_form, transition_matrix, Distribution};
use crate::weights::{domain_limit, DomainLimit, WeightSpec};

/// The unsigned eigenvalues `lambda_d` of `H(gamma)`, `d = 0..n`.
pub fn lambda_closed_form(spec: &WeightSpec, n: usize) -> Result<Vec<Rational>> {
    if let DomainLimit::Bounded(limit) = domain_limit(spec) {
        if n > limit {
            return Err(Error::IndexOutOfDomain { x: n - 1, limit });
        }
    }
    (0..n)
        .map(|d| {
            let du = d as u64;
            let di = int(d as i64);
            Ok(match spec {
                WeightSpec::GammaAB { a, b } => {
                    binom(&(a + &di), du) / binom(&(a + b + &di + int(1)), du)
                }
                WeightSpec::GammaC { c } => pow(&(c + int(1)), -(d as i32)),
                WeightSpec::DeltaAB { a_prime, b_prime } => {
                    binom(&(a_prime - int(1)), du) / binom(&(a_prime + b_prime - int(2)), du)
                }
                WeightSpec::Custom(_) => {
                    return Err(Error::UnsupportedFamily("no closed-form spectrum for custom weights".into()))
                }
            })
        })
        .collect()
}

/// The eigenvalues `(-1)^d lambda_d` of `P(gamma)`.
pub fn eigenvalues_closed_form(spec: &WeightSpec, n: usize) -> Result<Vec<Rational>> {
    Ok(lambda_closed_form(spec, n)?
        .into_iter()
        .enumerate()
        .map(|(d, l)| sign(d) * l)
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EigenSystem {
    pub n: usize,
    #[serde(serialize_with = "crate::exactnum::ser::rational_vec")]
    pub eigenvalues: Vec<Rational>,
    #[serde(serialize_with = "crate::exactnum::ser::rational_mat")]
    pub right_vectors: Vec<Vec<Rational>>,
    #[serde(serialize_with = "crate::exactnum::ser::rational_mat")]
    pub left_vectors: Vec<Vec<Rational>>,
    pub pi: Distribution,
}

/// `<v, w>_pi = sum_x pi_x v_x w_x`.
pub fn pi_inner(pi: &Distribution, v: &[Rational], w: &[Rational]) -> Rational {
    pi.probs().iter().zip(v).zip(w).map(|((p, a), b)| p * a * b).sum()
}

/// Scale to coprime integers with the first non-zero entry positive.
fn integer_normal(v: &[Rational]) -> Vec<Rational> {
    let mut out = clear_denominators(v);
    if out.iter().find(|x| !x.is_zero()).is_some_and(Signed::is_negative) {
        for x in out.iter_mut() {
            *x = -x.clone();
        }
    }
    out
}

/// Gram-Schmidt of `v(0), ..., v(upto)` under `<., .>_pi`, integer-cleared.
fn gram_schmidt(pi: &Distribution, n: usize, upto: usize) -> Vec<Vec<Rational>> {
    let mut basis: Vec<Vec<Rational>> = Vec::with_capacity(upto + 1);
    let mut norms: Vec<Rational> = Vec::with_capacity(upto + 1);
    for d in 0..=upto {
        let mut v = pascal_column(n, d);
        for (u, uu) in basis.iter().zip(&norms) {
            let c = pi_inner(pi, &v, u) / uu;
            for (vx, ux) in v.iter_mut().zip(u) {
                *vx -= &c * ux;
            }
        }
        let v = integer_normal(&v);
        norms.push(pi_inner(pi, &v, &v));
        basis.push(v);
    }
    basis
}

fn eigen_setup(spec: &WeightSpec, n: usize) -> Result<(Vec<Rational>, Distribution, Matrix)> {
    if !spec.is_named() {
        return Err(Error::UnsupportedFamily("eigenvectors need a named family".into()));
    }
    let eigenvalues = eigenvalues_closed_form(spec, n)?;
    let pi = invariant_closed_form(spec, n)?;
    if !pi.is_strictly_positive() {
        return Err(Error::NoPositiveStationary);
    }
    let p = transition_matrix(spec, n)?.p().clone();
    Ok((eigenvalues, pi, p))
}

fn check_eigen(p: &Matrix, v: &[Rational], ev: &Rational, d: usize) -> Result<()> {
    let pv = p.mul_vec(v);
    if pv.iter().zip(v).any(|(a, b)| *a != b * ev) {
        return Err(Error::InvalidMatrix(format!("Gram-Schmidt vector {d} is not an eigenvector")));
    }
    Ok(())
}

/// Gram-Schmidt of the Pascal columns `v(0), ..., v(n-1)` under `<., .>_pi`,
/// each result checked as an exact eigenvector of `P(gamma)`.
pub fn right_eigenvectors(spec: &WeightSpec, n: usize) -> Result<EigenSystem> {
    let (eigenvalues, pi, p) = eigen_setup(spec, n)?;
    let basis = if n == 0 { vec![] } else { gram_schmidt(&pi, n, n - 1) };
    for (d, v) in basis.iter().enumerate() {
        check_eigen(&p, v, &eigenvalues[d], d)?;
    }
    let left_vectors = basis.iter().map(|v| integer_normal(&left_from_right(&pi, v))).collect();
    Ok(EigenSystem { n, eigenvalues, right_vectors: basis, left_vectors, pi })
}

/// The single right eigenvector of degree `d`, without building the rest
/// of the basis.
pub fn right_eigenvector(spec: &WeightSpec, n: usize, d: usize) -> Result<Vec<Rational>> {
    if d >= n {
        return Err(Error::OutOfRange(format!("need d < n, got d={d}, n={n}")));
    }
    let (eigenvalues, pi, p) = eigen_setup(spec, n)?;
    let v = gram_schmidt(&pi, n, d).pop().expect("non-empty");
    check_eigen(&p, &v, &eigenvalues[d], d)?;
    Ok(v)
}

/// `u_x = pi_x v_x`; a left eigenvector whenever `v` is a right one of a
/// walk reversible with respect to `pi`.
pub fn left_from_right(pi: &Distribution, v: &[Rational]) -> Vec<Rational> {
    pi.probs().iter().zip(v).map(|(p, x)| p * x).collect()
}

/// `u_x = (-1)^x binom(n-1, x)`.
pub fn final_left_eigenvector(n: usize) -> Vec<Rational> {
    (0..n)
        .map(|x| sign(x) * binom_i(n as i64 - 1, x as u64))
        .collect()
}

/// Largest `d` with a non-zero coefficient of `v(d)` in `v`; `None` for
/// the zero vector.
pub fn pascal_degree(v: &[Rational]) -> Option<usize> {
    let b = pascal(v.len());
    let c = b.inverse.mul_vec(v);
    c.iter().rposition(|x| !x.is_zero())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixingReport {
    #[serde(serialize_with = "crate::exactnum::ser::rational")]
    pub second_abs_eigenvalue: Rational,
    pub empirical_rate: f64,
    /// `max_{x,z} |P^t_{xz} / pi_z - 1|` for `t = 1..=T`.
    pub errors: Vec<f64>,
}

pub const MIXING_STEPS: u32 = 64;

/// Second-largest absolute eigenvalue together with the decay rate fitted
/// to exact powers of `P`.
pub fn mixing_report(spec: &WeightSpec, n: usize) -> Result<MixingReport> {
    mixing_report_with(spec, n, MIXING_STEPS)
}

pub fn mixing_report_with(spec: &WeightSpec, n: usize, steps: u32) -> Result<MixingReport> {
    let lambdas = lambda_closed_form(spec, n)?;
    let second_abs_eigenvalue = lambdas
        .iter()
        .skip(1)
        .map(|l| l.abs())
        .max()
        .unwrap_or_else(Rational::zero);
    let pi = invariant_closed_form(spec, n)?;
    if !pi.is_strictly_positive() {
        return Err(Error::NoPositiveStationary);
    }
    let p = transition_matrix(spec, n)?.p().clone();
    let mut pt = Matrix::identity(n);
    let mut errors = Vec::with_capacity(steps as usize);
    for _ in 0..steps {
        pt = &pt * &p;
        let mut worst = Rational::zero();
        for x in 0..n {
            for (z, pz) in pi.probs().iter().enumerate() {
                let e = (&pt[(x, z)] / pz - Rational::one()).abs();
                if e > worst {
                    worst = e;
                }
            }
        }
        errors.push(to_f64(&worst));
    }
    let empirical_rate = fit_rate(&errors);
    Ok(MixingReport { second_abs_eigenvalue, empirical_rate, errors })
}

/// `exp` of the least-squares slope of `log e_t` over the second half of
/// the series, ignoring exact zeros.
fn fit_rate(errors: &[f64]) -> f64 {
    let t_max = errors.len();
    let pts: Vec<(f64, f64)> = (t_max / 2..t_max)
        .filter(|&i| errors[i] > 0.0)
        .map(|i| ((i + 1) as f64, errors[i].ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxy / sxx).exp()
}
