//! Interval weights, their norms and domains, and the atomic times
//! star-symmetric factorization.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{binom, binom_i, ceil, int, is_natural, parse_rational, pow, Rational};
use crate::matrix::Matrix;
use crate::walk::Distribution;

/// A weight on the intervals `[y, x]` of `{0, ..., n-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeightSpec {
    /// `binom(y+a, y) binom(b+x-y, x-y)`, with `a, b > -1`.
    GammaAB { a: Rational, b: Rational },
    /// `binom(x, y) c^(x-y)`, with `c > 0`.
    GammaC { c: Rational },
    /// `binom(a'-1, y) binom(b'-1, x-y)`, with `a', b' > 1`.
    DeltaAB { a_prime: Rational, b_prime: Rational },
    Custom(CustomWeight),
}

/// A dense weight table; `table[x][y]` holds the weight of `[y, x]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CustomWeight {
    n: usize,
    table: Vec<Vec<Rational>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainLimit {
    Bounded(usize),
    Unbounded,
}

impl DomainLimit {
    pub fn admits(self, n: usize) -> bool {
        match self {
            DomainLimit::Bounded(m) => n <= m,
            DomainLimit::Unbounded => true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct WeightFlags {
    pub atomic: bool,
    pub star_symmetric: bool,
    pub strictly_positive: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorizationResult {
    pub alpha: Vec<Rational>,
    /// `beta[x][y]` is the star-symmetric part on `[y, x]`.
    pub beta: Vec<Vec<Rational>>,
    pub valid: bool,
}

impl WeightSpec {
    pub fn gamma_ab(a: Rational, b: Rational) -> Result<Self> {
        if a <= int(-1) || b <= int(-1) {
            return Err(Error::InvalidWeight(format!("gamma(a,b) needs a,b > -1, got a={a}, b={b}")));
        }
        Ok(WeightSpec::GammaAB { a, b })
    }

    pub fn gamma_c(c: Rational) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::InvalidWeight(format!("gammac(c) needs c > 0, got c={c}")));
        }
        Ok(WeightSpec::GammaC { c })
    }

    pub fn delta_ab(a_prime: Rational, b_prime: Rational) -> Result<Self> {
        if a_prime <= int(1) || b_prime <= int(1) {
            return Err(Error::InvalidWeight(format!(
                "delta(a',b') needs a',b' > 1, got a'={a_prime}, b'={b_prime}"
            )));
        }
        Ok(WeightSpec::DeltaAB { a_prime, b_prime })
    }

    pub fn is_named(&self) -> bool {
        !matches!(self, WeightSpec::Custom(_))
    }
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightSpec::GammaAB { a, b } => write!(f, "gamma({a},{b})"),
            WeightSpec::GammaC { c } => write!(f, "gammac({c})"),
            WeightSpec::DeltaAB { a_prime, b_prime } => write!(f, "delta({a_prime},{b_prime})"),
            WeightSpec::Custom(w) => write!(f, "custom(n={})", w.n),
        }
    }
}

impl CustomWeight {
    /// `table[x]` must have length `x + 1`.
    pub fn new(table: Vec<Vec<Rational>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidWeight("empty weight table".into()));
        }
        for (x, row) in table.iter().enumerate() {
            if row.len() != x + 1 {
                return Err(Error::InvalidWeight(format!("row {x} must have {} entries", x + 1)));
            }
            if row.iter().any(Signed::is_negative) {
                return Err(Error::InvalidWeight(format!("negative weight in row {x}")));
            }
            if row.iter().all(Zero::is_zero) {
                return Err(Error::InvalidWeight(format!("weights on [.,{x}] sum to zero")));
            }
        }
        Ok(CustomWeight { n, table })
    }

    /// The weight `[y, x] -> L_{xy}` read from a lower-triangular matrix.
    pub fn from_lower_triangular(l: &Matrix) -> Result<Self> {
        if !l.is_square() || !l.is_lower_triangular() {
            return Err(Error::InvalidWeight("expected a square lower-triangular matrix".into()));
        }
        CustomWeight::new((0..l.rows()).map(|x| l.row(x)[..=x].to_vec()).collect())
    }

    /// Parse CSV rows `y,x,p/q`; an optional header row is skipped and
    /// missing intervals default to zero.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut entries = Vec::new();
        for (k, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            if rec.len() != 3 {
                return Err(Error::Parse(format!("expected y,x,weight on line {}", k + 1)));
            }
            let y = rec[0].parse::<usize>();
            let x = rec[1].parse::<usize>();
            let (y, x) = match (y, x) {
                (Ok(y), Ok(x)) => (y, x),
                _ if k == 0 => continue,
                _ => return Err(Error::Parse(format!("bad index on line {}", k + 1))),
            };
            if y > x {
                return Err(Error::EmptyInterval { y, x });
            }
            entries.push((y, x, parse_rational(&rec[2])?));
        }
        let n = entries.iter().map(|e| e.1 + 1).max().unwrap_or(0);
        let mut table: Vec<Vec<Rational>> = (0..n).map(|x| vec![Rational::zero(); x + 1]).collect();
        for (y, x, v) in entries {
            table[x][y] = v;
        }
        CustomWeight::new(table)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("y,x,weight\n");
        for (x, row) in self.table.iter().enumerate() {
            for (y, v) in row.iter().enumerate() {
                out.push_str(&format!("{y},{x},{v}\n"));
            }
        }
        out
    }
}

fn raw_value(spec: &WeightSpec, y: usize, x: usize) -> Rational {
    let (yi, d) = (y as i64, (x - y) as u64);
    match spec {
        WeightSpec::GammaAB { a, b } => binom(&(a + int(yi)), y as u64) * binom(&(b + int(d as i64)), d),
        WeightSpec::GammaC { c } => binom_i(x as i64, y as u64) * pow(c, d as i32),
        WeightSpec::DeltaAB { a_prime, b_prime } => {
            binom(&(a_prime - int(1)), y as u64) * binom(&(b_prime - int(1)), d)
        }
        WeightSpec::Custom(w) => w.table[x][y].clone(),
    }
}

fn check_domain(spec: &WeightSpec, x: usize) -> Result<()> {
    if let DomainLimit::Bounded(limit) = domain_limit(spec) {
        if x >= limit {
            return Err(Error::IndexOutOfDomain { x, limit });
        }
    }
    Ok(())
}

/// The weight of the interval `[y, x]`.
pub fn weight_value(spec: &WeightSpec, y: usize, x: usize) -> Result<Rational> {
    if y > x {
        return Err(Error::EmptyInterval { y, x });
    }
    check_domain(spec, x)?;
    Ok(raw_value(spec, y, x))
}

/// `N_x`, the total weight of the intervals ending at `x`.
pub fn norm(spec: &WeightSpec, x: usize) -> Result<Rational> {
    check_domain(spec, x)?;
    let xi = int(x as i64);
    Ok(match spec {
        WeightSpec::GammaAB { a, b } => binom(&(&xi + a + b + int(1)), x as u64),
        WeightSpec::GammaC { c } => pow(&(c + int(1)), x as i32),
        WeightSpec::DeltaAB { a_prime, b_prime } => binom(&(a_prime + b_prime - int(2)), x as u64),
        WeightSpec::Custom(_) => norm_direct(spec, x)?,
    })
}

/// `N_x` summed term by term.
pub fn norm_direct(spec: &WeightSpec, x: usize) -> Result<Rational> {
    (0..=x).map(|y| weight_value(spec, y, x)).sum()
}

/// The largest `n` on which the weight defines a walk from every state of
/// which `0` is accessible, or `Unbounded`.
///
/// For `DeltaAB` the weight `binom(a'-1, y) binom(b'-1, x-y)` fails
/// first where a factor changes sign: `binom(r, k)` with `r > 0` stays
/// positive for `k <= r` and first vanishes or turns negative at
/// `k = ceil(r) + 1` (it is never negative when `r` is a natural number).
/// This agrees with [`domain_limit_scan`].
pub fn domain_limit(spec: &WeightSpec) -> DomainLimit {
    match spec {
        WeightSpec::GammaAB { .. } | WeightSpec::GammaC { .. } => DomainLimit::Unbounded,
        WeightSpec::Custom(w) => DomainLimit::Bounded(w.n),
        WeightSpec::DeltaAB { a_prime, b_prime } => {
            let first_bad = |r: &Rational| usize::try_from(ceil(r) + 1).unwrap_or(usize::MAX);
            let by_a = first_bad(&(a_prime - int(1)));
            let by_b = if is_natural(&(b_prime - int(1))) {
                usize::MAX
            } else {
                first_bad(&(b_prime - int(1)))
            };
            DomainLimit::Bounded(by_a.min(by_b))
        }
    }
}

/// `domain_limit` by brute force: `n` is admissible while all weights on
/// `[y, x]`, `x < n`, are non-negative and every `[x, x]` weight is
/// positive. Stops at `cap`.
pub fn domain_limit_scan(spec: &WeightSpec, cap: usize) -> DomainLimit {
    for x in 0..cap {
        let ok = (0..=x).all(|y| !raw_value(spec, y, x).is_negative()) && raw_value(spec, x, x).is_positive();
        if !ok {
            return DomainLimit::Bounded(x);
        }
    }
    match spec {
        WeightSpec::Custom(w) if w.n <= cap => DomainLimit::Bounded(w.n),
        _ => DomainLimit::Unbounded,
    }
}

pub fn classify_weight(spec: &WeightSpec, n: usize) -> Result<WeightFlags> {
    if n > 0 {
        check_domain(spec, n - 1)?;
    }
    let mut flags = WeightFlags {
        atomic: true,
        star_symmetric: true,
        strictly_positive: true,
    };
    for x in 0..n {
        for y in 0..=x {
            let v = raw_value(spec, y, x);
            flags.atomic &= v == raw_value(spec, y, y);
            flags.star_symmetric &= v == raw_value(spec, n - 1 - x, n - 1 - y);
            flags.strictly_positive &= v.is_positive();
        }
    }
    Ok(flags)
}

/// Split `gamma = alpha beta` with `alpha` atomic, using the distribution
/// `pi`; `valid` reports whether `beta` is star-symmetric.
pub fn factorize(spec: &WeightSpec, n: usize, pi: &Distribution) -> Result<FactorizationResult> {
    if pi.len() != n {
        return Err(Error::DimensionMismatch(format!("distribution has {} states, expected {n}", pi.len())));
    }
    if n == 0 {
        return Ok(FactorizationResult { alpha: vec![], beta: vec![], valid: true });
    }
    check_domain(spec, n - 1)?;
    let mut alpha = Vec::with_capacity(n);
    for y in 0..n {
        let ys = n - 1 - y;
        let nrm = norm(spec, ys)?;
        if nrm.is_zero() {
            return Err(Error::DivisionByZero(format!("N_{ys} = 0")));
        }
        alpha.push(&pi.probs()[ys] / nrm);
    }
    let g00 = raw_value(spec, 0, 0);
    if !alpha[0].is_zero() && !g00.is_zero() {
        let s = &g00 / &alpha[0];
        for a in alpha.iter_mut() {
            *a *= &s;
        }
    }
    let mut beta = Vec::with_capacity(n);
    for x in 0..n {
        let mut row = Vec::with_capacity(x + 1);
        for (y, a) in alpha.iter().enumerate().take(x + 1) {
            if a.is_zero() {
                return Err(Error::DivisionByZero(format!("alpha_{y} = 0")));
            }
            row.push(raw_value(spec, y, x) / a);
        }
        beta.push(row);
    }
    let valid = (0..n).all(|x| (0..=x).all(|y| beta[x][y] == beta[n - 1 - y][n - 1 - x]));
    Ok(FactorizationResult { alpha, beta, valid })
}

/// The weight `[y, x] -> 1`.
pub fn constant_weight(n: usize) -> CustomWeight {
    CustomWeight::new((0..n).map(|x| vec![Rational::one(); x + 1]).collect())
        .expect("constant weight is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{ceil, is_natural, rat};
    use num_traits::ToPrimitive;

    fn gab(a: Rational, b: Rational) -> WeightSpec {
        WeightSpec::gamma_ab(a, b).unwrap()
    }

    #[test]
    fn values() {
        assert_eq!(weight_value(&gab(int(1), int(0)), 0, 3).unwrap(), int(1));
        assert_eq!(weight_value(&WeightSpec::gamma_c(int(2)).unwrap(), 1, 3).unwrap(), int(12));
        let d = WeightSpec::delta_ab(int(4), int(2)).unwrap();
        assert_eq!(weight_value(&d, 0, 2).unwrap(), int(0));
        assert_eq!(weight_value(&d, 0, 4), Err(Error::IndexOutOfDomain { x: 4, limit: 4 }));
        assert_eq!(weight_value(&d, 2, 1), Err(Error::EmptyInterval { y: 2, x: 1 }));
    }

    #[test]
    fn norms() {
        assert_eq!(norm(&gab(int(0), int(0)), 3).unwrap(), int(4));
        assert_eq!(norm(&WeightSpec::gamma_c(int(1)).unwrap(), 3).unwrap(), int(8));
        let d = WeightSpec::delta_ab(int(4), int(2)).unwrap();
        assert_eq!(norm(&d, 2).unwrap(), int(6));
        assert_eq!(norm_direct(&d, 2).unwrap(), int(6));
    }

    #[test]
    fn invalid_parameters() {
        assert!(WeightSpec::gamma_ab(int(-1), int(0)).is_err());
        assert!(WeightSpec::gamma_c(int(0)).is_err());
        assert!(WeightSpec::delta_ab(int(1), int(3)).is_err());
        assert!(CustomWeight::new(vec![vec![int(0)]]).is_err());
        assert!(CustomWeight::new(vec![vec![int(1)], vec![int(-1), int(2)]]).is_err());
    }

    // Closed-form ceiling rule, used as an oracle against the sign scan.
    fn ceiling_rule(a: &Rational, b: &Rational) -> usize {
        let ca = ceil(a).to_usize().unwrap();
        if is_natural(b) {
            ca
        } else {
            ca.min(ceil(b).to_usize().unwrap())
        }
    }

    #[test]
    fn delta_domains() {
        let d = |a: Rational, b: Rational| WeightSpec::delta_ab(a, b).unwrap();
        assert_eq!(domain_limit(&d(int(4), int(2))), DomainLimit::Bounded(4));
        assert_eq!(domain_limit(&d(rat(7, 2), rat(5, 2))), DomainLimit::Bounded(3));
        assert_eq!(domain_limit(&d(rat(10_000_001, 3), int(5))), DomainLimit::Bounded(3_333_334));
        assert_eq!(domain_limit(&gab(rat(1, 2), rat(1, 2))), DomainLimit::Unbounded);
        for p in 3..40i64 {
            for q in 4..40i64 {
                let (a, b) = (rat(p, 2), rat(q, 3));
                let w = d(a.clone(), b.clone());
                assert_eq!(domain_limit(&w), DomainLimit::Bounded(ceiling_rule(&a, &b)), "a'={a} b'={b}");
                assert_eq!(domain_limit_scan(&w, 64), domain_limit(&w), "a'={a} b'={b}");
            }
        }
    }

    #[test]
    fn flags() {
        let c = WeightSpec::Custom(constant_weight(5));
        let all = WeightFlags { atomic: true, star_symmetric: true, strictly_positive: true };
        assert_eq!(classify_weight(&c, 5).unwrap(), all);
        assert_eq!(
            classify_weight(&gab(int(1), int(0)), 4).unwrap(),
            WeightFlags { atomic: true, star_symmetric: false, strictly_positive: true }
        );
        assert_eq!(
            classify_weight(&gab(int(0), int(1)), 4).unwrap(),
            WeightFlags { atomic: false, star_symmetric: true, strictly_positive: true }
        );
    }

    #[test]
    fn factorize_gamma_c() {
        let spec = WeightSpec::gamma_c(int(1)).unwrap();
        let pi = Distribution::from_weights(vec![int(1), int(4), int(4)]).unwrap();
        let f = factorize(&spec, 3, &pi).unwrap();
        assert!(f.valid);
        assert_eq!(f.alpha, vec![int(1), int(2), int(1)]);
        // beta = x! y*! / ((x-y)! 2!) c^(x-y), here with c = 1.
        for x in 0..3usize {
            for y in 0..=x {
                let fact = |k: usize| crate::exactnum::factorial(k as u64);
                let expected = fact(x) * fact(2 - y) / (fact(x - y) * int(2));
                assert_eq!(f.beta[x][y], expected);
            }
        }
    }

    #[test]
    fn factorize_gamma00() {
        let spec = gab(int(0), int(0));
        let pi = Distribution::from_weights(vec![int(1), int(2), int(3), int(4)]).unwrap();
        let f = factorize(&spec, 4, &pi).unwrap();
        assert!(f.valid);
        for x in 0..4 {
            for y in 0..=x {
                assert_eq!(&f.alpha[y] * &f.beta[x][y], int(1));
            }
        }
    }

    #[test]
    fn csv_weights() {
        let w = CustomWeight::from_csv("y,x,weight\n0,0,1\n0,1,1/2\n1,1,1/2\n").unwrap();
        assert_eq!(w.n(), 2);
        let back = CustomWeight::from_csv(&w.to_csv()).unwrap();
        assert_eq!(back, w);
        assert!(CustomWeight::from_csv("1,0,1\n").is_err());
    }
}
