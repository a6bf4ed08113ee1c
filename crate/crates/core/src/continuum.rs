//! The involutive walk on `[0, 1]`: the `kappa(a,b)` weight
//! `y^a (x-y)^b` and the trigonometric weight `sin(pi y)`, their integral
//! operators, polynomial eigenfunctions, invariant densities, and the
//! convergence of discrete eigenvectors to the continuous ones.

use std::f64::consts::PI;

use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{binom_i, int, rat, to_f64, Rational};
use crate::quadrature::Quadrature;
use crate::spectral::right_eigenvector;
use crate::weights::WeightSpec;

/// Largest degree of the eigenfunction bases.
pub const MAX_DEGREE: usize = 12;
/// Grid points `k / GRID`, `k = 1..=GRID`.
pub const GRID: usize = 101;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "walk", rename_all = "snake_case")]
pub enum ContinuousWalk {
    Kappa { a: u32, b: u32 },
    Trig,
}

/// A polynomial in `x` or in `cos(pi x)`, lowest degree first.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum PolyFunction {
    Monomial(Vec<f64>),
    CosPower(Vec<f64>),
}

impl PolyFunction {
    pub fn coefficients(&self) -> &[f64] {
        match self {
            PolyFunction::Monomial(c) | PolyFunction::CosPower(c) => c,
        }
    }

    pub fn degree(&self) -> usize {
        self.coefficients().len().saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let t = match self {
            PolyFunction::Monomial(_) => x,
            PolyFunction::CosPower(_) => (PI * x).cos(),
        };
        self.coefficients().iter().rev().fold(0.0, |acc, c| acc * t + c)
    }
}

fn binom_f(r: u64, d: u64) -> f64 {
    to_f64(&binom_i(r as i64, d))
}

/// `N(kappa)_x = x^(a+b+1) / ((a+b+1) binom(a+b, b))`.
pub fn kappa_norm(a: u32, b: u32, x: f64) -> f64 {
    let s = (a + b) as u64;
    x.powi((a + b + 1) as i32) / ((s + 1) as f64 * binom_f(s, b as u64))
}

fn check_x(x: f64) -> Result<()> {
    if x > 0.0 && x <= 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("x must lie in (0, 1], got {x}")))
    }
}

/// Density of the down-step point `x w` against `dw` on `[0, 1]`.
fn step_density(walk: ContinuousWalk, x: f64) -> impl Fn(f64) -> f64 {
    let (a, b, scale) = match walk {
        ContinuousWalk::Kappa { a, b } => {
            let s = (a + b) as u64;
            (a as i32, b as i32, (s + 1) as f64 * binom_f(s, a as u64))
        }
        ContinuousWalk::Trig => (0, 0, 0.0),
    };
    // 1 - cos(pi x) = 2 sin^2(pi x / 2)
    let trig_scale = x * PI / (2.0 * (PI * x / 2.0).sin().powi(2));
    move |w: f64| match walk {
        ContinuousWalk::Kappa { .. } => scale * w.powi(a) * (1.0 - w).powi(b),
        ContinuousWalk::Trig => trig_scale * (PI * x * w).sin(),
    }
}

/// `(L_P f)(x)`: expected value of `f` after one step from `x`.
pub fn lp_apply(walk: ContinuousWalk, f: &PolyFunction, x: f64) -> Result<f64> {
    lp_apply_fn(walk, |y| f.eval(y), x)
}

pub fn lp_apply_fn<F: Fn(f64) -> f64>(walk: ContinuousWalk, f: F, x: f64) -> Result<f64> {
    check_x(x)?;
    let k = step_density(walk, x);
    Quadrature::standard().integrate(|w| k(w) * f(1.0 - x * w), 0.0, 1.0)
}

/// `(L_H f)(x)`: expected value of `f` at the down-step point.
pub fn lh_apply(walk: ContinuousWalk, f: &PolyFunction, x: f64) -> Result<f64> {
    check_x(x)?;
    let k = step_density(walk, x);
    Quadrature::standard().integrate(|w| k(w) * f.eval(x * w), 0.0, 1.0)
}

/// The eigenvalue `(-1)^d lambda_d` of `L_P` on the degree-`d`
/// eigenfunction.
pub fn eigenvalue(walk: ContinuousWalk, d: usize) -> f64 {
    let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
    match walk {
        ContinuousWalk::Kappa { a, b } => {
            let (a, b, d) = (a as u64, b as u64, d as u64);
            sign * binom_f(a + d, d) / binom_f(a + b + d + 1, d)
        }
        ContinuousWalk::Trig => sign / (d + 1) as f64,
    }
}

/// Exact Gram-Schmidt on `1, t, t^2, ...` from the moments `m_k` of the
/// inner product, orthonormalized in floating point at the end.
fn gram_schmidt(moment: impl Fn(usize) -> Rational, dmax: usize) -> Vec<Vec<f64>> {
    let moments: Vec<Rational> = (0..=2 * dmax).map(moment).collect();
    let inner = |p: &[Rational], q: &[Rational]| -> Rational {
        let mut s = Rational::zero();
        for (i, pi) in p.iter().enumerate() {
            for (j, qj) in q.iter().enumerate() {
                s += pi * qj * &moments[i + j];
            }
        }
        s
    };
    let mut basis: Vec<(Vec<Rational>, Rational)> = Vec::new();
    for d in 0..=dmax {
        let mut p = vec![Rational::zero(); d + 1];
        p[d] = int(1);
        for (q, qq) in &basis {
            let c = inner(&p, q) / qq;
            for (pi, qi) in p.iter_mut().zip(q) {
                *pi -= &c * qi;
            }
        }
        let pp = inner(&p, &p);
        basis.push((p, pp));
    }
    basis
        .into_iter()
        .map(|(p, pp)| {
            let s = to_f64(&pp).sqrt();
            p.iter().map(|c| to_f64(c) / s).collect()
        })
        .collect()
}

/// `int_0^1 (1-x)^a x^(a+b+1+k) dx = 1 / ((2a+b+k+2) binom(2a+b+k+1, a))`.
pub fn jacobi_moment(a: u32, b: u32, k: usize) -> Rational {
    let top = (2 * a + b) as i64 + k as i64 + 1;
    Rational::from_integer(1.into()) / (int(top + 1) * binom_i(top, a as u64))
}

fn check_degree(dmax: usize) -> Result<()> {
    if dmax > MAX_DEGREE {
        return Err(Error::OutOfRange(format!("degree at most {MAX_DEGREE}, got {dmax}")));
    }
    Ok(())
}

/// Orthonormal polynomials `g_0..=g_dmax` for the weight
/// `(1-x)^a x^(a+b+1)` on `[0, 1]`.
pub fn jacobi_eigenfunctions(a: u32, b: u32, dmax: usize) -> Result<Vec<PolyFunction>> {
    check_degree(dmax)?;
    Ok(gram_schmidt(|k| jacobi_moment(a, b, k), dmax)
        .into_iter()
        .map(PolyFunction::Monomial)
        .collect())
}

/// `(1/2) int_{-1}^1 (1-u) u^k du`, the moments of the trigonometric
/// invariant density in the variable `u = cos(pi x)`.
pub fn trig_moment(k: usize) -> Rational {
    let even = |j: usize| if j % 2 == 0 { rat(2, j as i64 + 1) } else { Rational::zero() };
    (even(k) - even(k + 1)) / int(2)
}

/// Orthonormal polynomials in `cos(pi x)` for the trigonometric walk.
pub fn trig_eigenfunctions(dmax: usize) -> Result<Vec<PolyFunction>> {
    check_degree(dmax)?;
    Ok(gram_schmidt(trig_moment, dmax)
        .into_iter()
        .map(PolyFunction::CosPower)
        .collect())
}

pub fn eigenfunctions(walk: ContinuousWalk, dmax: usize) -> Result<Vec<PolyFunction>> {
    match walk {
        ContinuousWalk::Kappa { a, b } => jacobi_eigenfunctions(a, b, dmax),
        ContinuousWalk::Trig => trig_eigenfunctions(dmax),
    }
}

fn grid() -> Vec<f64> {
    (1..=GRID).map(|k| k as f64 / GRID as f64).collect()
}

/// `max_x |L_P g_d(x) - (-1)^d lambda_d g_d(x)|` over the grid.
pub fn eigen_residual(walk: ContinuousWalk, d: usize) -> Result<f64> {
    let g = eigenfunctions(walk, d)?.pop().expect("non-empty");
    let ev = eigenvalue(walk, d);
    let r: Result<Vec<f64>> = grid()
        .into_par_iter()
        .map(|x| Ok((lp_apply(walk, &g, x)? - ev * g.eval(x)).abs()))
        .collect();
    Ok(r?.into_iter().fold(0.0, f64::max))
}

/// The normalized invariant density at `x`.
pub fn cts_invariant(walk: ContinuousWalk, x: f64) -> f64 {
    match walk {
        ContinuousWalk::Kappa { a, b } => {
            let top = (2 * a + b + 1) as u64;
            let c = (top + 1) as f64 * binom_f(top, a as u64);
            c * (1.0 - x).powi(a as i32) * x.powi((a + b + 1) as i32)
        }
        ContinuousWalk::Trig => PI / 2.0 * (PI * x).sin() * (1.0 - (PI * x).cos()),
    }
}

/// The weight of the interval `[y, x]`.
pub fn weight(walk: ContinuousWalk, y: f64, x: f64) -> f64 {
    match walk {
        ContinuousWalk::Kappa { a, b } => y.powi(a as i32) * (x - y).powi(b as i32),
        ContinuousWalk::Trig => (PI * y).sin(),
    }
}

/// `int_0^x weight(y, x) dy` by quadrature.
pub fn norm_by_quadrature(walk: ContinuousWalk, x: f64) -> Result<f64> {
    Quadrature::standard().integrate(|y| weight(walk, y, x), 0.0, x)
}

/// `max_z |int pi_x p(x -> z) dx - pi_z|` over the grid, with the step
/// density `weight(1-z, x) / N_x` and `N_x` itself found by quadrature.
pub fn fixed_point_residual(walk: ContinuousWalk) -> Result<f64> {
    let q = Quadrature::standard();
    let r: Result<Vec<f64>> = grid()
        .into_par_iter()
        .map(|z| {
            let y = 1.0 - z;
            let inner_err = std::cell::RefCell::new(None);
            let push = q.integrate(
                |x| {
                    if x <= 0.0 {
                        return 0.0;
                    }
                    match norm_by_quadrature(walk, x) {
                        Ok(nx) if nx > 0.0 => cts_invariant(walk, x) * weight(walk, y, x) / nx,
                        Ok(_) => 0.0,
                        Err(e) => {
                            inner_err.borrow_mut().get_or_insert(e);
                            0.0
                        }
                    }
                },
                y,
                1.0,
            );
            let push = push?;
            if let Some(e) = inner_err.into_inner() {
                return Err(e);
            }
            Ok((push - cts_invariant(walk, z)).abs())
        })
        .collect();
    Ok(r?.into_iter().fold(0.0, f64::max))
}

/// `<f, g>` under the invariant density.
pub fn invariant_inner<F: Fn(f64) -> f64, G: Fn(f64) -> f64>(walk: ContinuousWalk, f: F, g: G) -> Result<f64> {
    Quadrature::standard().integrate(|x| cts_invariant(walk, x) * f(x) * g(x), 0.0, 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConvergencePoint {
    pub n: usize,
    pub distance: f64,
}

fn sup_normalize(v: &[f64]) -> Vec<f64> {
    let m = v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let first = v.iter().copied().find(|x| *x != 0.0).unwrap_or(1.0);
    let s = if m == 0.0 { 1.0 } else { m.copysign(first) };
    v.iter().map(|x| x / s).collect()
}

/// Sup-distance between the degree-`d` right eigenvector of
/// `P(gamma(a,b))` on `n` states, read at `x / n`, and the continuous
/// eigenfunction `g_d`; both scaled to sup-norm 1, positive at the left end.
pub fn discrete_convergence(a: u32, b: u32, d: usize, n_list: &[usize]) -> Result<Vec<ConvergencePoint>> {
    if d > 5 {
        return Err(Error::OutOfRange(format!("degree at most 5, got {d}")));
    }
    let g = jacobi_eigenfunctions(a, b, d)?.pop().expect("non-empty");
    let fine: Vec<f64> = (0..=4000).map(|k| g.eval(k as f64 / 4000.0)).collect();
    let sup = fine.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let g0 = fine.iter().copied().find(|x| *x != 0.0).unwrap_or(1.0);
    let gs = if sup == 0.0 { 1.0 } else { sup.copysign(g0) };
    let spec = WeightSpec::GammaAB { a: int(a as i64), b: int(b as i64) };
    n_list
        .par_iter()
        .map(|&n| {
            if n <= d {
                return Err(Error::OutOfRange(format!("need n > d, got n={n}, d={d}")));
            }
            let w: Vec<f64> = right_eigenvector(&spec, n, d)?
                .iter()
                .map(|r| r.to_f64().unwrap_or(f64::NAN))
                .collect();
            let w = sup_normalize(&w);
            let distance = w
                .iter()
                .enumerate()
                .map(|(x, wx)| (wx - g.eval(x as f64 / n as f64) / gs).abs())
                .fold(0.0, f64::max);
            Ok(ConvergencePoint { n, distance })
        })
        .collect()
}

pub fn convergence_csv(points: &[ConvergencePoint]) -> String {
    let mut s = String::from("n,distance\n");
    for p in points {
        s.push_str(&format!("{},{:e}\n", p.n, p.distance));
    }
    s
}
