//! Transition matrices of involutive walks, stationary distributions,
//! ergodicity, reversibility, simulation and the subset walk.

use std::collections::VecDeque;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{binom, binom_i, int, pow, to_f64, Rational};
use crate::matrix::Matrix;
use crate::weights::{domain_limit, norm, weight_value, DomainLimit, WeightSpec};

/// Largest size for exhaustive cycle enumeration in [`kolmogorov`].
pub const KOLMOGOROV_CAP: usize = 12;

/// A probability vector with exact entries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Distribution {
    #[serde(serialize_with = "crate::exactnum::ser::rational_vec")]
    probs: Vec<Rational>,
}

impl Distribution {
    pub fn new(probs: Vec<Rational>) -> Result<Self> {
        if probs.iter().any(Signed::is_negative) {
            return Err(Error::InvalidMatrix("negative probability".into()));
        }
        let total: Rational = probs.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidMatrix(format!("probabilities sum to {total}")));
        }
        Ok(Distribution { probs })
    }

    /// Normalize non-negative weights with positive total.
    pub fn from_weights(weights: Vec<Rational>) -> Result<Self> {
        if weights.iter().any(Signed::is_negative) {
            return Err(Error::InvalidMatrix("negative weight".into()));
        }
        let total: Rational = weights.iter().sum();
        if total.is_zero() {
            return Err(Error::DivisionByZero("weights sum to zero".into()));
        }
        Ok(Distribution {
            probs: weights.into_iter().map(|w| w / &total).collect(),
        })
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.probs.iter().all(Signed::is_positive)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.probs.iter().map(to_f64).collect()
    }

    /// Total-variation distance, in floating point.
    pub fn total_variation(&self, other: &Distribution) -> f64 {
        self.to_f64()
            .iter()
            .zip(other.to_f64())
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            / 2.0
    }
}

/// The reflection `x -> n-1-x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AntiDiag {
    pub n: usize,
}

impl AntiDiag {
    pub fn reflect(self, x: usize) -> usize {
        self.n - 1 - x
    }

    pub fn matrix(self) -> Matrix {
        Matrix::anti_diagonal(self.n)
    }
}

/// Transition matrix `P` of an involutive walk together with its down-step
/// matrix `H`, related by `P = H J(n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkMatrix {
    n: usize,
    p: Matrix,
    h: Matrix,
}

impl WalkMatrix {
    /// Build from a down-step matrix, validating the walk invariants.
    pub fn from_down_step(h: Matrix) -> Result<Self> {
        if !h.is_square() {
            return Err(Error::InvalidMatrix("down-step matrix is not square".into()));
        }
        if !h.is_lower_triangular() {
            return Err(Error::InvalidMatrix("down-step matrix is not lower-triangular".into()));
        }
        let n = h.rows();
        let p = &h * &Matrix::anti_diagonal(n);
        check_stochastic(&p)?;
        Ok(WalkMatrix { n, p, h })
    }

    /// Build from a transition matrix, validating the walk invariants.
    pub fn from_transition(p: Matrix) -> Result<Self> {
        if !p.is_square() {
            return Err(Error::InvalidMatrix("transition matrix is not square".into()));
        }
        let n = p.rows();
        for x in 0..n {
            for z in 0..n {
                if x + z + 1 < n && !p[(x, z)].is_zero() {
                    return Err(Error::InvalidMatrix(format!(
                        "entry ({x},{z}) lies above the anti-diagonal"
                    )));
                }
            }
        }
        check_stochastic(&p)?;
        let h = &p * &Matrix::anti_diagonal(n);
        Ok(WalkMatrix { n, p, h })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> &Matrix {
        &self.p
    }

    pub fn h(&self) -> &Matrix {
        &self.h
    }

    pub fn stationary(&self) -> Result<Distribution> {
        stationary(&self.p)
    }

    pub fn ergodicity(&self) -> ErgodicityReport {
        ergodicity(&self.p)
    }

    pub fn detailed_balance(&self, pi: &Distribution) -> bool {
        detailed_balance(&self.p, pi)
    }

    /// Render with `·` for structurally zero entries `x + z < n - 1`.
    pub fn pretty(&self) -> String {
        format_pretty(&self.p, true)
    }
}

fn check_stochastic(p: &Matrix) -> Result<()> {
    for x in 0..p.rows() {
        if let Some(z) = p.row(x).iter().position(Signed::is_negative) {
            return Err(Error::InvalidMatrix(format!("negative entry at ({x},{z})")));
        }
        let s: Rational = p.row(x).iter().sum();
        if !s.is_one() {
            return Err(Error::InvalidMatrix(format!("row {x} sums to {s}")));
        }
    }
    Ok(())
}

/// Format a matrix as aligned text; with `dots`, entries with
/// `x + z < n - 1` print as `·`.
pub fn format_pretty(m: &Matrix, dots: bool) -> String {
    let n = m.rows();
    let cells: Vec<Vec<String>> = (0..n)
        .map(|x| {
            (0..m.cols())
                .map(|z| {
                    if dots && x + z + 1 < n && m[(x, z)].is_zero() {
                        "·".to_string()
                    } else {
                        m[(x, z)].to_string()
                    }
                })
                .collect()
        })
        .collect();
    let width = cells
        .iter()
        .flatten()
        .map(|c| c.chars().count())
        .max()
        .unwrap_or(1);
    let mut out = String::new();
    for row in cells {
        let line: Vec<String> = row
            .iter()
            .map(|c| format!("{}{}", " ".repeat(width - c.chars().count()), c))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

/// `P(gamma)_{xz} = gamma_{[z*, x]} / N_x` on `n` states.
pub fn transition_matrix(spec: &WeightSpec, n: usize) -> Result<WalkMatrix> {
    if n == 0 {
        return Err(Error::OutOfRange("a walk needs at least one state".into()));
    }
    if let DomainLimit::Bounded(limit) = domain_limit(spec) {
        if n > limit {
            return Err(Error::IndexOutOfDomain { x: n - 1, limit });
        }
    }
    let mut h = Matrix::zeros(n, n);
    for x in 0..n {
        let nx = norm(spec, x)?;
        if nx.is_zero() {
            return Err(Error::ZeroNorm { x });
        }
        for y in 0..=x {
            h[(x, y)] = weight_value(spec, y, x)? / &nx;
        }
    }
    WalkMatrix::from_down_step(h)
}

/// The unique `pi` with `pi P = pi`, by exact elimination on `(P - I)^T`.
pub fn stationary(p: &Matrix) -> Result<Distribution> {
    let n = p.rows();
    let a = p.sub(&Matrix::identity(n)).transpose();
    let kernel = a.nullspace();
    if kernel.len() != 1 {
        return Err(Error::NotIrreducible { dim: kernel.len() });
    }
    let v = kernel.into_iter().next().unwrap();
    let total: Rational = v.iter().sum();
    if total.is_zero() {
        return Err(Error::InvalidMatrix("invariant vector sums to zero".into()));
    }
    Distribution::new(v.into_iter().map(|x| x / &total).collect())
}

/// Closed-form invariant distribution of a named family.
pub fn invariant_closed_form(spec: &WeightSpec, n: usize) -> Result<Distribution> {
    if n == 0 {
        return Err(Error::OutOfRange("a walk needs at least one state".into()));
    }
    if !domain_limit(spec).admits(n) {
        return Err(Error::IndexOutOfDomain {
            x: n - 1,
            limit: match domain_limit(spec) {
                DomainLimit::Bounded(l) => l,
                DomainLimit::Unbounded => unreachable!(),
            },
        });
    }
    let m = n - 1;
    let probs: Vec<Rational> = match spec {
        WeightSpec::GammaAB { a, b } => {
            let z = binom(&(int(2) * a + b + int(n as i64 + 1)), m as u64);
            (0..n)
                .map(|x| {
                    let xs = m - x;
                    binom(&(int(xs as i64) + a), xs as u64)
                        * binom(&(int(x as i64) + a + b + int(1)), x as u64)
                        / &z
                })
                .collect()
        }
        WeightSpec::GammaC { c } => {
            let z = pow(&(c + int(2)), m as i32);
            (0..n)
                .map(|x| binom_i(m as i64, x as u64) * pow(&(c + int(1)), x as i32) / &z)
                .collect()
        }
        WeightSpec::DeltaAB { a_prime, b_prime } => {
            let z = binom(&(int(2) * a_prime + b_prime - int(3)), m as u64);
            (0..n)
                .map(|x| {
                    binom(&(a_prime - int(1)), (m - x) as u64)
                        * binom(&(a_prime + b_prime - int(2)), x as u64)
                        / &z
                })
                .collect()
        }
        WeightSpec::Custom(_) => {
            return Err(Error::UnsupportedFamily("no closed-form invariant for custom weights".into()))
        }
    };
    Distribution::new(probs)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ErgodicityReport {
    pub irreducible: bool,
    pub aperiodic: bool,
    pub ergodic: bool,
    /// Communicating classes, each sorted, ordered by least element.
    pub communicating_classes: Vec<Vec<usize>>,
    /// Period of each class; `0` for a class with no internal edge.
    pub periods: Vec<usize>,
}

fn support(p: &Matrix) -> Vec<Vec<usize>> {
    (0..p.rows())
        .map(|x| (0..p.cols()).filter(|&z| p[(x, z)].is_positive()).collect())
        .collect()
}

fn reachable_from(adj: &[Vec<usize>], s: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    seen[s] = true;
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen
}

/// True when `target` is reachable from every state along positive entries.
pub fn accessible_from_all(p: &Matrix, target: usize) -> bool {
    let adj = support(p);
    (0..p.rows()).all(|s| reachable_from(&adj, s)[target])
}

/// Irreducibility and aperiodicity from the support digraph.
pub fn ergodicity(p: &Matrix) -> ErgodicityReport {
    let n = p.rows();
    let adj = support(p);
    let reach: Vec<Vec<bool>> = (0..n).map(|s| reachable_from(&adj, s)).collect();
    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for s in 0..n {
        if class_of[s] != usize::MAX {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&t| reach[s][t] && reach[t][s]).collect();
        for &t in &members {
            class_of[t] = classes.len();
        }
        classes.push(members);
    }
    let periods: Vec<usize> = classes
        .iter()
        .enumerate()
        .map(|(ci, members)| {
            let root = members[0];
            let mut level = vec![usize::MAX; n];
            level[root] = 0;
            let mut queue = VecDeque::from([root]);
            let mut g = 0usize;
            while let Some(u) = queue.pop_front() {
                for &v in &adj[u] {
                    if class_of[v] != ci {
                        continue;
                    }
                    if level[v] == usize::MAX {
                        level[v] = level[u] + 1;
                        queue.push_back(v);
                    } else {
                        let diff = (level[u] + 1).abs_diff(level[v]);
                        g = g.gcd(&diff);
                    }
                }
            }
            g
        })
        .collect();
    let irreducible = classes.len() == 1;
    let aperiodic = periods.iter().all(|&d| d <= 1);
    ErgodicityReport {
        irreducible,
        aperiodic,
        ergodic: irreducible && aperiodic,
        communicating_classes: classes,
        periods,
    }
}

/// Exact check of `pi_x P_{xz} = pi_z P_{zx}` for all pairs.
pub fn detailed_balance(p: &Matrix, pi: &Distribution) -> bool {
    let n = p.rows();
    if pi.len() != n {
        return false;
    }
    let w = pi.probs();
    (0..n).all(|x| (x + 1..n).all(|z| &w[x] * &p[(x, z)] == &w[z] * &p[(z, x)]))
}

/// A strictly positive distribution in detailed balance with `p`, if one
/// exists. Propagates ratios `pi_z / pi_x = P_{xz} / P_{zx}` over the
/// support graph and checks consistency on every edge.
pub fn reversing_measure(p: &Matrix) -> Option<Distribution> {
    let n = p.rows();
    for x in 0..n {
        for z in x + 1..n {
            if p[(x, z)].is_zero() != p[(z, x)].is_zero() {
                return None;
            }
        }
    }
    let mut w: Vec<Option<Rational>> = vec![None; n];
    for root in 0..n {
        if w[root].is_some() {
            continue;
        }
        w[root] = Some(Rational::one());
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            let wx = w[x].clone().unwrap();
            for z in 0..n {
                if z == x || p[(x, z)].is_zero() {
                    continue;
                }
                let wz = &wx * &p[(x, z)] / &p[(z, x)];
                match &w[z] {
                    Some(existing) if *existing != wz => return None,
                    Some(_) => {}
                    None => {
                        w[z] = Some(wz);
                        queue.push_back(z);
                    }
                }
            }
        }
    }
    Distribution::from_weights(w.into_iter().map(Option::unwrap).collect()).ok()
}

/// Reversible in the sense of admitting a strictly positive distribution
/// in detailed balance.
pub fn is_reversible(p: &Matrix) -> bool {
    reversing_measure(p).is_some()
}

fn cycle_products(p: &Matrix, cycle: &[usize]) -> (Rational, Rational) {
    let k = cycle.len();
    let mut fwd = Rational::one();
    let mut bwd = Rational::one();
    for i in 0..k {
        let (u, v) = (cycle[i], cycle[(i + 1) % k]);
        fwd *= &p[(u, v)];
        bwd *= &p[(v, u)];
    }
    (fwd, bwd)
}

/// Kolmogorov's cycle criterion over every cycle of distinct states of
/// length at least three on the anti-triangular support.
pub fn kolmogorov(w: &WalkMatrix) -> Result<bool> {
    let n = w.n();
    let rep = ergodicity(w.p());
    if !rep.irreducible {
        return Err(Error::NoPositiveStationary);
    }
    if n > KOLMOGOROV_CAP {
        return Err(Error::CycleEnumerationCap { n, cap: KOLMOGOROV_CAP });
    }
    let p = w.p();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|x| (0..n).filter(|&z| z != x && x + z + 1 >= n).collect())
        .collect();
    // Depth-first search over simple paths starting at their least vertex;
    // each cycle is visited once per direction, and the check is symmetric.
    fn dfs(
        p: &Matrix,
        adj: &[Vec<usize>],
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        fwd: Rational,
        bwd: Rational,
    ) -> bool {
        let start = path[0];
        let last = *path.last().unwrap();
        for &v in &adj[last] {
            if v == start && path.len() >= 3 && path[1] < last {
                let f = &fwd * &p[(last, start)];
                let b = &bwd * &p[(start, last)];
                if f != b {
                    return false;
                }
            }
            if v <= start || on_path[v] {
                continue;
            }
            path.push(v);
            on_path[v] = true;
            let f = &fwd * &p[(last, v)];
            let b = &bwd * &p[(v, last)];
            let ok = dfs(p, adj, path, on_path, f, b);
            on_path[v] = false;
            path.pop();
            if !ok {
                return false;
            }
        }
        true
    }
    let mut on_path = vec![false; n];
    for s in 0..n {
        let mut path = vec![s];
        on_path[s] = true;
        let ok = dfs(p, &adj, &mut path, &mut on_path, Rational::one(), Rational::one());
        on_path[s] = false;
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Randomized Kolmogorov check for walks beyond the enumeration cap.
/// Returns a violating cycle if one is found among `samples` random cycles.
pub fn kolmogorov_sampled(w: &WalkMatrix, samples: usize, seed: u64) -> Result<Option<Vec<usize>>> {
    let n = w.n();
    if !ergodicity(w.p()).irreducible {
        return Err(Error::NoPositiveStationary);
    }
    if n < 3 {
        return Ok(None);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let len = rng.gen_range(3..=n);
        let mut cycle = vec![rng.gen_range(0..n)];
        while cycle.len() < len {
            let last = *cycle.last().unwrap();
            let options: Vec<usize> = (0..n)
                .filter(|&z| last + z + 1 >= n && !cycle.contains(&z))
                .collect();
            if options.is_empty() {
                break;
            }
            cycle.push(options[rng.gen_range(0..options.len())]);
        }
        if cycle.len() < 3 || cycle[0] + cycle[cycle.len() - 1] + 1 < n {
            continue;
        }
        let (f, b) = cycle_products(w.p(), &cycle);
        if f != b {
            return Ok(Some(cycle));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Simulation {
    /// Visited states, starting with the initial state.
    pub trajectory: Vec<usize>,
    /// Visit frequencies over the whole trajectory.
    pub empirical: Distribution,
}

impl Simulation {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,state\n");
        for (t, s) in self.trajectory.iter().enumerate() {
            out.push_str(&format!("{t},{s}\n"));
        }
        out
    }
}

/// Run the chain for `steps` transitions by inverse-CDF sampling.
pub fn simulate(p: &Matrix, x0: usize, steps: usize, seed: u64) -> Result<Simulation> {
    check_stochastic(p)?;
    let n = p.rows();
    if x0 >= n {
        return Err(Error::OutOfRange(format!("initial state {x0} with {n} states")));
    }
    let cdfs: Vec<Vec<f64>> = (0..n)
        .map(|x| {
            let mut acc = 0.0;
            p.row(x)
                .iter()
                .map(|v| {
                    acc += to_f64(v);
                    acc
                })
                .collect()
        })
        .collect();
    let last_positive: Vec<usize> = (0..n)
        .map(|x| (0..n).rev().find(|&z| p[(x, z)].is_positive()).unwrap())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trajectory = Vec::with_capacity(steps + 1);
    let mut counts = vec![0u64; n];
    let mut x = x0;
    trajectory.push(x);
    counts[x] += 1;
    for _ in 0..steps {
        let u: f64 = rng.gen();
        let cdf = &cdfs[x];
        x = (0..n)
            .find(|&z| u < cdf[z] && p[(x, z)].is_positive())
            .unwrap_or(last_positive[x]);
        trajectory.push(x);
        counts[x] += 1;
    }
    let empirical = Distribution::from_weights(counts.iter().map(|&c| int(c as i64)).collect())?;
    Ok(Simulation { trajectory, empirical })
}

/// `P^2 = H (J H J)`.
pub fn two_step(w: &WalkMatrix) -> Matrix {
    let j = Matrix::anti_diagonal(w.n());
    let jhj = &(&j * w.h()) * &j;
    w.h() * &jhj
}

/// The `m`-fold Kronecker power of `[[0, 1], [p, 1-p]]` on subsets of
/// `{1, ..., m}`, indexed by bitmask (bit `i` set when `i+1` is present).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetWalk {
    pub m: usize,
    pub p: Rational,
    pub matrix: Matrix,
    pub pi: Distribution,
    /// Eigenvalues `(-p)^e` with multiplicity `binom(m, e)`.
    pub eigenvalues: Vec<(Rational, usize)>,
}

impl SubsetWalk {
    pub fn factor(&self) -> Matrix {
        subset_factor(&self.p)
    }

    /// All eigenvalues with repetition.
    pub fn eigenvalue_list(&self) -> Vec<Rational> {
        self.eigenvalues
            .iter()
            .flat_map(|(v, k)| std::iter::repeat_n(v.clone(), *k))
            .collect()
    }
}

fn subset_factor(p: &Rational) -> Matrix {
    Matrix::from_rows(vec![
        vec![int(0), int(1)],
        vec![p.clone(), int(1) - p],
    ])
    .expect("2x2")
}

pub fn subset_walk(m: usize, p: &Rational) -> Result<SubsetWalk> {
    if !(p.is_positive() && *p < int(1)) {
        return Err(Error::OutOfRange(format!("p must lie in (0,1), got {p}")));
    }
    if m > 10 {
        return Err(Error::OutOfRange(format!("m must be at most 10, got {m}")));
    }
    let q = subset_factor(p);
    let size = 1usize << m;
    let matrix = Matrix::from_fn(size, size, |s, t| {
        (0..m).fold(Rational::one(), |acc, i| {
            if acc.is_zero() {
                return acc;
            }
            acc * &q[((s >> i) & 1, (t >> i) & 1)]
        })
    });
    let scale = pow(&(p + int(1)), -(m as i32));
    let pi = Distribution::new(
        (0..size)
            .map(|s| pow(p, (m - s.count_ones() as usize) as i32) * &scale)
            .collect(),
    )?;
    let eigenvalues = (0..=m)
        .map(|e| {
            let mult = binom_i(m as i64, e as u64).to_integer();
            (pow(&-p.clone(), e as i32), usize::try_from(mult).expect("small"))
        })
        .collect();
    Ok(SubsetWalk { m, p: p.clone(), matrix, pi, eigenvalues })
}
