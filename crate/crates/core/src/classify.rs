//! Recovering family parameters from the leading eigenvalues of a
//! binomial-transform walk, the exceptional `nu_m(mu)` ladder, global
//! reversibility, and a finite search for reversible walks outside the
//! named families.

use std::fmt;

use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{ceil, floor, int, is_natural, rat, Rational};
use crate::matrix::Matrix;
use crate::spectral::lambda_closed_form;
use crate::transform::{is_directly_stochastic, is_stochastic, pl_matrix, LambdaSeq};
use crate::walk::{accessible_from_all, is_reversible};
use crate::weights::{domain_limit, WeightSpec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Classification {
    GammaAB {
        #[serde(serialize_with = "crate::exactnum::ser::rational")]
        a: Rational,
        #[serde(serialize_with = "crate::exactnum::ser::rational")]
        b: Rational,
    },
    GammaC {
        #[serde(serialize_with = "crate::exactnum::ser::rational")]
        c: Rational,
    },
    DeltaReal {
        #[serde(serialize_with = "crate::exactnum::ser::rational")]
        a_prime: Rational,
        #[serde(serialize_with = "crate::exactnum::ser::rational")]
        b_prime: Rational,
    },
    DeltaIntegerM {
        #[serde(serialize_with = "crate::exactnum::ser::rational")]
        a_prime: Rational,
        m: usize,
    },
    /// `P = J(n)`.
    Identity,
    NotClassified { reason: String },
}

impl Classification {
    /// The weight this classification names, if any.
    pub fn weight_spec(&self) -> Option<WeightSpec> {
        match self {
            Classification::GammaAB { a, b } => Some(WeightSpec::GammaAB { a: a.clone(), b: b.clone() }),
            Classification::GammaC { c } => Some(WeightSpec::GammaC { c: c.clone() }),
            Classification::DeltaReal { a_prime, b_prime } => Some(WeightSpec::DeltaAB {
                a_prime: a_prime.clone(),
                b_prime: b_prime.clone(),
            }),
            Classification::DeltaIntegerM { a_prime, m } => Some(WeightSpec::DeltaAB {
                a_prime: a_prime.clone(),
                b_prime: int(*m as i64),
            }),
            Classification::Identity | Classification::NotClassified { .. } => None,
        }
    }

    pub fn is_classified(&self) -> bool {
        !matches!(self, Classification::NotClassified { .. })
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::GammaAB { a, b } => write!(f, "gamma({a},{b})"),
            Classification::GammaC { c } => write!(f, "gammac({c})"),
            Classification::DeltaReal { a_prime, b_prime } => write!(f, "delta({a_prime},{b_prime})"),
            Classification::DeltaIntegerM { a_prime, m } => write!(f, "delta({a_prime},{m}) [m={m}]"),
            Classification::Identity => write!(f, "J(n)"),
            Classification::NotClassified { reason } => write!(f, "not classified: {reason}"),
        }
    }
}

fn not_classified(reason: impl Into<String>) -> Classification {
    Classification::NotClassified { reason: reason.into() }
}

/// `(a(mu, nu), b(mu, nu))`, the solution of `lambda_1 = mu`,
/// `lambda_2 = nu` in the `gamma(a,b)` eigenvalue formula. Needs
/// `nu != mu^2`.
pub fn ab_of_mu_nu(mu: &Rational, nu: &Rational) -> (Rational, Rational) {
    let s = (mu - nu) / (nu - mu * mu);
    let a = mu * &s - int(1);
    let b = (int(1) - mu) * &s - int(1);
    (a, b)
}

/// `nu_m(mu) = mu (m mu - 1) / (m - 2 + mu)`.
pub fn nu_m(mu: &Rational, m: usize) -> Rational {
    let mr = int(m as i64);
    mu * (&mr * mu - int(1)) / (&mr - int(2) + mu)
}

/// `a'_m(mu) = ((m - 2) mu + 1) / (1 - mu)`.
pub fn a_prime_m(mu: &Rational, m: usize) -> Rational {
    (int(m as i64 - 2) * mu + int(1)) / (int(1) - mu)
}

/// Least admissible band count `floor((1-mu)/mu (n-2)) + 2`.
pub fn least_band_count(mu: &Rational, n: usize) -> usize {
    let v = floor(&((int(1) - mu) / mu * int(n as i64 - 2))) + 2;
    usize::try_from(v).unwrap_or(usize::MAX)
}

/// Parameters of the named family with `lambda_1 = mu`, `lambda_2 = nu` on
/// `n` states.
pub fn params_from_mu_nu(mu: &Rational, nu: &Rational, n: usize) -> Result<Classification> {
    if !(mu.is_positive() && *mu < int(1) && nu < mu && !nu.is_negative()) {
        return Err(Error::OutOfRange(format!("need 1 > mu > nu >= 0, got mu={mu}, nu={nu}")));
    }
    if n < 3 {
        return Err(Error::OutOfRange(format!("need n >= 3, got {n}")));
    }
    let mu2 = mu * mu;
    if *nu == mu2 {
        return Ok(Classification::GammaC { c: (int(1) - mu) / mu });
    }
    let (a, b) = ab_of_mu_nu(mu, nu);
    if *nu > mu2 {
        return Ok(Classification::GammaAB { a, b });
    }
    let (a_prime, b_prime) = (-a, -b);
    let spec = WeightSpec::DeltaAB { a_prime: a_prime.clone(), b_prime: b_prime.clone() };
    if !domain_limit(&spec).admits(n) {
        return Ok(not_classified(format!(
            "delta({a_prime},{b_prime}) does not admit {n} states"
        )));
    }
    if is_natural(&b_prime) && b_prime < int(n as i64) {
        let m = usize::try_from(b_prime.to_integer()).expect("small");
        debug_assert!(m >= least_band_count(mu, n));
        debug_assert_eq!(*nu, nu_m(mu, m));
        return Ok(Classification::DeltaIntegerM { a_prime, m });
    }
    Ok(Classification::DeltaReal { a_prime, b_prime })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LadderRung {
    pub m: usize,
    #[serde(serialize_with = "crate::exactnum::ser::rational")]
    pub nu: Rational,
    #[serde(serialize_with = "crate::exactnum::ser::rational")]
    pub a_prime: Rational,
}

/// The exceptional values `nu_m(mu)` admissible on `n` states, `m` from
/// `n - 1` downwards.
pub fn exceptional_ladder(mu: &Rational, n: usize) -> Vec<LadderRung> {
    if !(mu.is_positive() && *mu < int(1)) || n < 3 {
        return vec![];
    }
    let lo = least_band_count(mu, n).max(2);
    (lo..n)
        .rev()
        .map(|m| LadderRung { m, nu: nu_m(mu, m), a_prime: a_prime_m(mu, m) })
        .filter(|r| ceil(&r.a_prime) >= (n as i64).into())
        .collect()
}

/// Reversibility of every top-right `m x m` submatrix, `m = 2..=n`.
pub fn is_globally_reversible(lambda: &LambdaSeq) -> Result<bool> {
    let st = is_stochastic(lambda);
    if !st.stochastic {
        return Err(Error::NotStochastic { witness: st.witness });
    }
    let p = pl_matrix(lambda);
    let n = lambda.len();
    if !accessible_from_all(&p, 0) {
        return Err(Error::ZeroNotAccessible);
    }
    Ok((2..=n).all(|m| {
        let sub = top_right(&p, m);
        is_directly_stochastic(&sub) && is_reversible(&sub)
    }))
}

/// Rows `0..m`, columns `n-m..n` of `p`.
pub fn top_right(p: &Matrix, m: usize) -> Matrix {
    p.submatrix(0, p.cols() - m, m, m)
}

/// Identify `P^lambda` with a named family, checking every eigenvalue.
pub fn classify_walk(lambda: &LambdaSeq) -> Result<Classification> {
    let n = lambda.len();
    let st = is_stochastic(lambda);
    if !st.stochastic {
        return Err(Error::NotStochastic { witness: st.witness });
    }
    if lambda.values().iter().all(One::is_one) {
        return Ok(Classification::Identity);
    }
    if n < 3 {
        return Err(Error::OutOfRange(format!("need n >= 3, got {n}")));
    }
    if !accessible_from_all(&pl_matrix(lambda), 0) {
        return Err(Error::ZeroNotAccessible);
    }
    let (mu, nu) = (&lambda.values()[1], &lambda.values()[2]);
    let c = match params_from_mu_nu(mu, nu, n) {
        Ok(c) => c,
        Err(Error::OutOfRange(reason)) => return Ok(not_classified(reason)),
        Err(e) => return Err(e),
    };
    let Some(spec) = c.weight_spec() else {
        return Ok(c);
    };
    let expect = lambda_closed_form(&spec, n)?;
    match expect.iter().zip(lambda.values()).position(|(e, l)| e != l) {
        None => Ok(c),
        Some(d) => Ok(not_classified(format!(
            "lambda_{d} = {} differs from {} for {c}",
            lambda.values()[d],
            expect[d]
        ))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SamplerConfig {
    /// Largest denominator of the grid entries.
    pub max_denominator: u32,
    /// Random draws per size above `grid_max_n`.
    pub samples: usize,
    pub seed: u64,
    /// Sizes up to this use the exhaustive grid.
    pub grid_max_n: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig { max_denominator: 8, samples: 1000, seed: 0x1ac0, grid_max_n: 5 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchRecord {
    pub lambda: LambdaSeq,
    pub stochastic: bool,
    pub reversible: bool,
    pub classification: Classification,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchReport {
    pub n: usize,
    pub examined: usize,
    pub stochastic: usize,
    pub reversible: usize,
    /// Every reversible walk found, in canonical order.
    pub records: Vec<SearchRecord>,
    /// Reversible walks that are neither a family point nor `J(n)`.
    pub unclassified: Vec<SearchRecord>,
}

impl SearchReport {
    pub fn to_json_lines(&self) -> String {
        self.records
            .iter()
            .map(|r| serde_json::to_string(r).expect("serializable") + "\n")
            .collect()
    }
}

/// Sorted Farey fractions in `[0, 1]` with denominator at most `q`.
pub fn farey(q: u32) -> Vec<Rational> {
    let mut v: Vec<Rational> = (1..=q as i64)
        .flat_map(|d| (0..=d).map(move |p| rat(p, d)))
        .collect();
    v.sort();
    v.dedup();
    v
}

/// All `(1, l_1, ..., l_{n-1})` with non-increasing entries from `values`.
fn grid_sequences(values: &[Rational], n: usize) -> Vec<LambdaSeq> {
    let mut out = Vec::new();
    let mut idx = vec![0usize; n.saturating_sub(1)];
    // indices into values sorted decreasingly, non-decreasing index = non-increasing value
    let desc: Vec<&Rational> = values.iter().rev().collect();
    if n == 0 {
        return out;
    }
    loop {
        let mut seq = vec![Rational::one()];
        seq.extend(idx.iter().map(|&i| desc[i].clone()));
        out.push(LambdaSeq::new(seq));
        let mut k = idx.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if idx[k] + 1 < desc.len() {
                let v = idx[k] + 1;
                for j in idx.iter_mut().skip(k) {
                    *j = v;
                }
                break;
            }
        }
    }
}

fn random_probability(rng: &mut ChaCha8Rng, n: usize, sparse: bool) -> Vec<Rational> {
    loop {
        let w: Vec<i64> = (0..n)
            .map(|_| {
                if sparse && rng.gen_bool(0.5) {
                    0
                } else {
                    rng.gen_range(0..=12)
                }
            })
            .collect();
        let total: i64 = w.iter().sum();
        if total > 0 {
            return w.into_iter().map(|x| rat(x, total)).collect();
        }
    }
}

fn random_param(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Rational {
    let q = rng.gen_range(1..=6i64);
    rat(rng.gen_range(lo * q + 1..=hi * q), q)
}

fn random_family_point(rng: &mut ChaCha8Rng, n: usize) -> LambdaSeq {
    let spec = match rng.gen_range(0..3) {
        0 => WeightSpec::GammaAB { a: random_param(rng, -1, 3), b: random_param(rng, -1, 3) },
        1 => WeightSpec::GammaC { c: random_param(rng, 0, 3) },
        _ => {
            let a_prime = int(n as i64 - 1) + random_param(rng, 0, 3);
            let b_prime = if rng.gen_bool(0.5) {
                int(rng.gen_range(2..=n as i64))
            } else {
                int(n as i64 - 1) + random_param(rng, 0, 3)
            };
            WeightSpec::DeltaAB { a_prime, b_prime }
        }
    };
    match lambda_closed_form(&spec, n) {
        Ok(v) => LambdaSeq::new(v),
        Err(_) => LambdaSeq::new(vec![Rational::one(); n]),
    }
}

/// Seeded random stochastic sequences: bottom rows (dense and sparse),
/// family points, and `J(n)`.
pub fn sample_sequences(n: usize, samples: usize, seed: u64) -> Vec<LambdaSeq> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((n as u64) << 32));
    let mut out = vec![LambdaSeq::new(vec![Rational::one(); n])];
    while out.len() < samples {
        let l = match rng.gen_range(0..4) {
            0 => LambdaSeq::from_bottom_row(&random_probability(&mut rng, n, false)),
            1 => LambdaSeq::from_bottom_row(&random_probability(&mut rng, n, true)),
            2 => random_family_point(&mut rng, n),
            _ => {
                // a family point's bottom row, perturbed
                let base = random_family_point(&mut rng, n);
                let mut row = pl_matrix(&base).row(n - 1).to_vec();
                let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
                let eps = row[i].clone().min(rat(1, 20));
                row[i] -= &eps;
                row[j] += &eps;
                LambdaSeq::from_bottom_row(&row)
            }
        };
        out.push(l);
    }
    out
}

fn examine(lambda: LambdaSeq) -> SearchRecord {
    let st = is_stochastic(&lambda);
    if !st.stochastic {
        return SearchRecord {
            lambda,
            stochastic: false,
            reversible: false,
            classification: not_classified("not stochastic"),
        };
    }
    let reversible = is_reversible(&pl_matrix(&lambda));
    let classification = match classify_walk(&lambda) {
        Ok(c) => c,
        Err(e) => not_classified(e.to_string()),
    };
    SearchRecord { lambda, stochastic: true, reversible, classification }
}

/// Search for reversible `P^lambda` on `n` states that are neither a
/// family point nor `J(n)`.
pub fn conjecture_search(n: usize, cfg: &SamplerConfig) -> Result<SearchReport> {
    if !(1..=8).contains(&n) {
        return Err(Error::OutOfRange(format!("search supports 1 <= n <= 8, got {n}")));
    }
    let candidates = if n <= cfg.grid_max_n {
        grid_sequences(&farey(cfg.max_denominator), n)
    } else {
        sample_sequences(n, cfg.samples, cfg.seed)
    };
    let examined = candidates.len();
    let all: Vec<SearchRecord> = candidates.into_par_iter().map(examine).collect();
    let stochastic = all.iter().filter(|r| r.stochastic).count();
    let mut records: Vec<SearchRecord> = all.into_iter().filter(|r| r.reversible).collect();
    records.sort_by(|x, y| x.lambda.values().cmp(y.lambda.values()));
    records.dedup_by(|x, y| x.lambda == y.lambda);
    let unclassified = records
        .iter()
        .filter(|r| !r.classification.is_classified() && n >= 3)
        .cloned()
        .collect();
    Ok(SearchReport { n, examined, stochastic, reversible: records.len(), records, unclassified })
}
