//! Pascal matrices, binomial transforms `H^lambda = B Diag(lambda) B^{-1}`,
//! stochasticity and ergodicity of `P^lambda = H^lambda J`, and the
//! anti-diagonal eigenvalue property checkers.

use std::fmt;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{binom_i, parse_rational_list, rat, sign, Rational};
use crate::matrix::Matrix;
use crate::poly::Poly;
use crate::walk::{accessible_from_all, ergodicity};

/// The sequence `lambda_0, ..., lambda_{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct LambdaSeq {
    #[serde(serialize_with = "crate::exactnum::ser::rational_vec")]
    values: Vec<Rational>,
}

impl LambdaSeq {
    pub fn new(values: Vec<Rational>) -> Self {
        LambdaSeq { values }
    }

    /// Parse a comma-separated list such as `1,1/2,1/3`.
    pub fn parse(s: &str) -> Result<Self> {
        Ok(LambdaSeq::new(parse_rational_list(s)?))
    }

    /// The sequence whose binomial transform has the given bottom row.
    pub fn from_bottom_row(row: &[Rational]) -> Self {
        let n = row.len();
        let top = n.saturating_sub(1) as i64;
        LambdaSeq::new(
            (0..n)
                .map(|w| {
                    let s: Rational = row
                        .iter()
                        .enumerate()
                        .skip(w)
                        .map(|(y, h)| h * binom_i(y as i64, w as u64))
                        .sum();
                    s / binom_i(top, w as u64)
                })
                .collect(),
        )
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `lambda_1`.
    pub fn mu(&self) -> Option<&Rational> {
        self.values.get(1)
    }

    /// `lambda_2`.
    pub fn nu(&self) -> Option<&Rational> {
        self.values.get(2)
    }

    /// The first `m` terms.
    pub fn truncate(&self, m: usize) -> LambdaSeq {
        LambdaSeq::new(self.values[..m].to_vec())
    }
}

impl fmt::Display for LambdaSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// `B(n)` with entries `binom(x, y)`, and its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PascalMatrix {
    pub n: usize,
    pub forward: Matrix,
    pub inverse: Matrix,
}

pub fn pascal(n: usize) -> PascalMatrix {
    let forward = Matrix::from_fn(n, n, |x, y| binom_i(x as i64, y as u64));
    let inverse = Matrix::from_fn(n, n, |x, y| sign(x + y) * binom_i(x as i64, y as u64));
    PascalMatrix { n, forward, inverse }
}

/// The column `v(d)` of `B(n)`, `v(d)_x = binom(x, d)`.
pub fn pascal_column(n: usize, d: usize) -> Vec<Rational> {
    (0..n).map(|x| binom_i(x as i64, d as u64)).collect()
}

/// `H^lambda`, entrywise:
/// `H_{xy} = binom(x,y) sum_e (-1)^e binom(x-y, e) lambda_{y+e}`.
pub fn binomial_transform(lambda: &LambdaSeq) -> Matrix {
    let n = lambda.len();
    let l = lambda.values();
    let h = Matrix::from_fn(n, n, |x, y| {
        if y > x {
            return Rational::zero();
        }
        let k = x - y;
        let s: Rational = (0..=k)
            .map(|e| sign(e) * binom_i(k as i64, e as u64) * &l[y + e])
            .sum();
        binom_i(x as i64, y as u64) * s
    });
    debug_assert_eq!(h, binomial_transform_via_pascal(lambda));
    h
}

/// `B(n) Diag(lambda) B(n)^{-1}` by matrix products.
pub fn binomial_transform_via_pascal(lambda: &LambdaSeq) -> Matrix {
    let b = pascal(lambda.len());
    &(&b.forward * &Matrix::diagonal(lambda.values())) * &b.inverse
}

/// `P^lambda = H^lambda J(n)`.
pub fn pl_matrix(lambda: &LambdaSeq) -> Matrix {
    &binomial_transform(lambda) * &Matrix::anti_diagonal(lambda.len())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StochasticityReport {
    pub stochastic: bool,
    pub lambda0_is_one: bool,
    /// `sum_e (-1)^e binom(z, e) lambda_{z* + e}` for `z = 0..n`.
    #[serde(serialize_with = "crate::exactnum::ser::rational_vec")]
    pub sums: Vec<Rational>,
    /// Least `z` whose sum is negative.
    pub witness: Option<usize>,
}

/// Decide whether `P^lambda` is a transition matrix from the alternating
/// sums of `lambda`.
pub fn is_stochastic(lambda: &LambdaSeq) -> StochasticityReport {
    let n = lambda.len();
    let l = lambda.values();
    let sums: Vec<Rational> = (0..n)
        .map(|z| {
            let zs = n - 1 - z;
            (0..=z)
                .map(|e| sign(e) * binom_i(z as i64, e as u64) * &l[zs + e])
                .sum()
        })
        .collect();
    let witness = sums.iter().position(Signed::is_negative);
    let lambda0_is_one = l.first().is_some_and(One::is_one);
    let report = StochasticityReport {
        stochastic: lambda0_is_one && witness.is_none(),
        lambda0_is_one,
        sums,
        witness,
    };
    debug_assert_eq!(report.stochastic, is_directly_stochastic(&pl_matrix(lambda)));
    report
}

/// Entrywise non-negativity with unit row sums.
pub fn is_directly_stochastic(p: &Matrix) -> bool {
    p.rows() > 0
        && (0..p.rows()).all(|x| {
            p.row(x).iter().all(|v| !v.is_negative()) && p.row(x).iter().sum::<Rational>().is_one()
        })
}

/// The tail length `s` when `lambda` has the shape
/// `1 > lambda_1 > ... > lambda_{n-s} = ... = lambda_{n-1} > 0` with
/// `s <= n/2`.
pub fn ergodic_structure(lambda: &LambdaSeq) -> Option<usize> {
    let l = lambda.values();
    let n = l.len();
    if n < 2 || !l[0].is_one() || !l[n - 1].is_positive() {
        return None;
    }
    let mut s = 1;
    while s < n && l[n - 1 - s] == l[n - 1] {
        s += 1;
    }
    let strict = (0..n - s).all(|i| l[i] > l[i + 1]);
    (strict && 2 * s <= n).then_some(s)
}

/// Ergodicity of `P^lambda`, decided on the support graph. Accessibility
/// of state 0 from every state is necessary but not sufficient: for
/// `lambda = (1, 1/2, 1/2, 1/2)` state 0 is accessible from everywhere
/// while `{1, 2}` cannot be reached from `{0, 3}`.
pub fn is_ergodic_lambda(lambda: &LambdaSeq) -> Result<bool> {
    let st = is_stochastic(lambda);
    if !st.stochastic {
        return Err(Error::NotStochastic { witness: st.witness });
    }
    let p = pl_matrix(lambda);
    if !accessible_from_all(&p, 0) {
        return Ok(false);
    }
    Ok(ergodicity(&p).ergodic)
}

/// `charpoly(L J(n)) == prod_d (X - (-1)^d L_dd)`.
pub fn check_adep(l: &Matrix) -> bool {
    if !l.is_square() || !l.is_lower_triangular() {
        return false;
    }
    let n = l.rows();
    let lj = l * &Matrix::anti_diagonal(n);
    let roots: Vec<Rational> = (0..n).map(|d| sign(d) * &l[(d, d)]).collect();
    lj.charpoly() == Poly::from_roots(&roots)
}

/// The least `m` whose top-left `m x m` block fails [`check_adep`].
pub fn gadep_witness(l: &Matrix) -> Option<usize> {
    if !l.is_square() {
        return Some(0);
    }
    let fails: Vec<usize> = (1..=l.rows())
        .into_par_iter()
        .filter(|&m| !check_adep(&l.top_left(m)))
        .collect();
    fails.into_iter().min()
}

pub fn check_gadep(l: &Matrix) -> bool {
    gadep_witness(l).is_none()
}

/// The least `d` with `L v(d) != L_dd v(d)`.
pub fn binomial_transform_witness(l: &Matrix) -> Option<usize> {
    if !l.is_square() || !l.is_lower_triangular() {
        return Some(0);
    }
    let n = l.rows();
    (0..n).find(|&d| {
        let v = pascal_column(n, d);
        let lv = l.mul_vec(&v);
        lv.iter().zip(&v).any(|(a, b)| *a != &l[(d, d)] * b)
    })
}

pub fn is_binomial_transform(l: &Matrix) -> bool {
    binomial_transform_witness(l).is_none()
}

/// `B^{-1} L B` is diagonal.
pub fn eigenbasis_action(l: &Matrix) -> bool {
    if !l.is_square() {
        return false;
    }
    let b = pascal(l.rows());
    (&(&b.inverse * l) * &b.forward).is_diagonal()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// Size of the least top-left block failing the eigenvalue test.
    Submatrix(usize),
    /// Least Pascal column that is not an eigenvector.
    Column(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub adep: bool,
    pub gadep: bool,
    pub eigenbasis_action: bool,
    pub is_binomial_transform: bool,
    pub witness: Option<Witness>,
}

/// All eigenvalue-property checks at once. The eigenvalue tests compare
/// characteristic polynomials, so they decide the multiset condition and
/// do not test diagonalizability.
pub fn property_report(l: &Matrix) -> PropertyReport {
    let adep = check_adep(l);
    let gw = gadep_witness(l);
    let bw = binomial_transform_witness(l);
    PropertyReport {
        adep,
        gadep: gw.is_none(),
        eigenbasis_action: eigenbasis_action(l),
        is_binomial_transform: bw.is_none(),
        witness: gw.map(Witness::Submatrix).or(bw.map(Witness::Column)),
    }
}

fn conjugates(q: &Matrix) -> Result<bool> {
    let m = q.rows();
    let c = &(&q.inverse()? * &Matrix::anti_diagonal(m)) * q;
    Ok(c.is_upper_triangular() && (0..m).all(|x| c[(x, x)] == sign(x)))
}

/// Whether `Q^{-1} J Q` is upper-triangular with diagonal `(-1)^x`; the
/// global variant checks every top-left block.
pub fn check_conjugator(q: &Matrix, global: bool) -> Result<bool> {
    if !q.is_square() {
        return Err(Error::DimensionMismatch("conjugator must be square".into()));
    }
    let n = q.rows();
    if !global {
        return conjugates(q);
    }
    for m in 1..=n {
        if !conjugates(&q.top_left(m))? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Counterexample {
    /// 4x4 lower-triangular matrix, a binomial transform at `tau = 0`.
    L4,
    /// 5x5 lower-triangular matrix.
    H5,
}

/// The parametrized matrices with the global eigenvalue property that are
/// not binomial transforms for `tau != 0`.
pub fn gadep_counterexample(which: Counterexample, tau: &Rational) -> Matrix {
    let z = Rational::zero;
    let r = |p: i64, q: i64| rat(p, q);
    let t = |k: i64| tau * rat(k, 1);
    let rows = match which {
        Counterexample::L4 => vec![
            vec![r(1, 1), z(), z(), z()],
            vec![r(1, 3), r(2, 3), z(), z()],
            vec![r(-1, 12), r(5, 6), r(1, 4), z()],
            vec![r(-9, 20), r(11, 10) + tau * r(4, 5), r(3, 20) + tau * r(1, 5), r(1, 5)],
        ],
        Counterexample::H5 => vec![
            vec![r(1, 1), z(), z(), z(), z()],
            vec![r(1, 2), r(1, 2), z(), z(), z()],
            vec![r(1, 2) - t(1), t(2), r(1, 2) - t(1), z(), z()],
            vec![r(1, 2) - t(2), t(3), z(), r(1, 2) - t(1), z()],
            vec![r(1, 2) - t(4), t(5), z(), t(1), r(1, 2) - t(2)],
        ],
    };
    Matrix::from_rows(rows).expect("fixed shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::int;

    fn lam(v: &[(i64, i64)]) -> LambdaSeq {
        LambdaSeq::new(v.iter().map(|&(p, q)| rat(p, q)).collect())
    }

    #[test]
    fn transform_examples() {
        let h = binomial_transform(&lam(&[(1, 1), (1, 2), (1, 3)]));
        let expected = Matrix::from_rows(vec![
            vec![int(1), int(0), int(0)],
            vec![rat(1, 2), rat(1, 2), int(0)],
            vec![rat(1, 3), rat(1, 3), rat(1, 3)],
        ])
        .unwrap();
        assert_eq!(h, expected);
        let mu = rat(3, 7);
        let h = binomial_transform(&LambdaSeq::new(vec![int(1), mu.clone(), int(2) * &mu - int(1)]));
        assert_eq!(h.row(2), &[int(0), int(2) * (int(1) - &mu), int(2) * &mu - int(1)]);
        assert_eq!(binomial_transform(&lam(&[(1, 1), (1, 1), (1, 1)])), Matrix::identity(3));
        assert_eq!(pl_matrix(&lam(&[(1, 1)])), Matrix::identity(1));
    }

    #[test]
    fn pl_gamma_c_half() {
        let p = pl_matrix(&lam(&[(1, 1), (2, 3), (4, 9), (8, 27)]));
        assert_eq!(p.row(3), &[rat(8, 27), rat(4, 9), rat(2, 9), rat(1, 27)]);
    }

    #[test]
    fn stochastic_examples() {
        let r = is_stochastic(&lam(&[(1, 1), (1, 2), (1, 3), (1, 4)]));
        assert!(r.stochastic);
        assert_eq!(r.sums, vec![rat(1, 4), rat(1, 12), rat(1, 12), rat(1, 4)]);
        let r = is_stochastic(&lam(&[(1, 1), (1, 2), (1, 2), (3, 4)]));
        assert!(!r.stochastic);
        assert_eq!(r.witness, Some(1));
        assert_eq!(r.sums[1], rat(-1, 4));
        let r = is_stochastic(&lam(&[(1, 1), (3, 5), (3, 10), (1, 20)]));
        assert!(r.stochastic);
        assert_eq!(r.sums, vec![rat(1, 20), rat(1, 4), rat(1, 20), rat(1, 20)]);
        assert!(!is_stochastic(&lam(&[(1, 2), (1, 4)])).stochastic);
    }

    #[test]
    fn ergodic_examples() {
        assert!(is_ergodic_lambda(&lam(&[(1, 1), (1, 2), (1, 3), (1, 4)])).unwrap());
        // lambda_{n-1} = 0 cuts the edge n-1 -> 0.
        assert!(!is_ergodic_lambda(&lam(&[(1, 1), (1, 2), (0, 1)])).unwrap());
        assert!(matches!(
            is_ergodic_lambda(&lam(&[(1, 1), (1, 2), (0, 1), (0, 1)])),
            Err(Error::NotStochastic { witness: Some(3) })
        ));
        assert!(!is_ergodic_lambda(&lam(&[(1, 1), (1, 1)])).unwrap());
        assert!(matches!(
            is_ergodic_lambda(&lam(&[(1, 1), (1, 2), (1, 2), (3, 4)])),
            Err(Error::NotStochastic { witness: Some(1) })
        ));
        let tail = lam(&[(1, 1), (1, 2), (1, 2), (1, 2)]);
        assert!(is_stochastic(&tail).stochastic);
        assert!(accessible_from_all(&pl_matrix(&tail), 0));
        assert!(!is_ergodic_lambda(&tail).unwrap());
        assert_eq!(ergodic_structure(&tail), None);
        assert_eq!(ergodic_structure(&lam(&[(1, 1), (1, 2), (1, 3), (1, 4)])), Some(1));
    }

    #[test]
    fn bottom_row_inversion() {
        let l = lam(&[(1, 1), (3, 5), (3, 10), (1, 20)]);
        let h = binomial_transform(&l);
        assert_eq!(LambdaSeq::from_bottom_row(h.row(3)), l);
    }

    #[test]
    fn adep_examples() {
        let h = binomial_transform(&lam(&[(1, 1), (1, 2), (1, 3), (1, 4)]));
        assert!(check_adep(&h));
        assert!(check_gadep(&h));
        let l = gadep_counterexample(Counterexample::L4, &int(1));
        assert_eq!(l.row(3), &[rat(-9, 20), rat(19, 10), rat(7, 20), rat(1, 5)]);
        assert!(check_adep(&l));
        assert!(check_gadep(&l));
        assert!(!is_binomial_transform(&l));
        // [[1,0],[1,-1]]: L J = [[0,1],[-1,1]] has charpoly X^2 - X + 1,
        // whereas (X - 1)(X + (-1)) = X^2 - 1.
        let m = Matrix::from_rows(vec![vec![int(1), int(0)], vec![int(1), int(-1)]]).unwrap();
        assert!(!check_adep(&m));
    }

    #[test]
    fn counterexample_at_zero() {
        let l = gadep_counterexample(Counterexample::L4, &int(0));
        assert_eq!(l, binomial_transform(&lam(&[(1, 1), (2, 3), (1, 4), (1, 5)])));
        for tau in [rat(1, 4), rat(1, 2), int(1)] {
            let h = gadep_counterexample(Counterexample::H5, &tau);
            assert!(check_gadep(&h), "tau = {tau}");
            assert!(!is_binomial_transform(&h));
        }
    }

    #[test]
    fn conjugators() {
        assert!(check_conjugator(&pascal(4).forward, true).unwrap());
        let mut q = pascal(5).forward;
        q[(4, 2)] = int(7);
        assert!(!check_conjugator(&q, true).unwrap());
        assert!(!check_conjugator(&Matrix::identity(2), false).unwrap());
        assert_eq!(check_conjugator(&Matrix::zeros(2, 2), false), Err(Error::Singular));
    }

    #[test]
    fn report_witness() {
        let l = gadep_counterexample(Counterexample::L4, &int(1));
        let r = property_report(&l);
        assert!(r.adep && r.gadep && !r.is_binomial_transform && !r.eigenbasis_action);
        assert_eq!(r.witness, Some(Witness::Column(0)));
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"witness\":{\"column\":0}"));
    }
}
