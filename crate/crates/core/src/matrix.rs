//! Dense exact-rational matrices.

use std::ops::{Index, IndexMut, Mul};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{parse_rational, Rational};
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { Rational::one() } else { Rational::zero() })
    }

    /// The reflection matrix `J(n)` with `J_{xy} = [x = n-1-y]`.
    pub fn anti_diagonal(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| {
            if i + j + 1 == n {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
    }

    pub fn diagonal(d: &[Rational]) -> Self {
        let n = d.len();
        Matrix::from_fn(n, n, |i, j| if i == j { d[i].clone() } else { Rational::zero() })
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Rational>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn diag(&self) -> Vec<Rational> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].clone()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] - &other[(i, j)])
    }

    pub fn scale(&self, s: &Rational) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] * s)
    }

    /// The block with rows `r0..r0+h` and columns `c0..c0+w`.
    pub fn submatrix(&self, r0: usize, c0: usize, h: usize, w: usize) -> Matrix {
        assert!(r0 + h <= self.rows && c0 + w <= self.cols);
        Matrix::from_fn(h, w, |i, j| self[(r0 + i, c0 + j)].clone())
    }

    pub fn top_left(&self, m: usize) -> Matrix {
        self.submatrix(0, 0, m, m)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// Row vector times matrix, `u M`.
    pub fn vec_mul(&self, u: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.rows, u.len());
        let mut out = vec![Rational::zero(); self.cols];
        for (i, ui) in u.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                if !a.is_zero() {
                    *o += ui * a;
                }
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Matrix {
        assert!(self.is_square());
        let mut result = Matrix::identity(self.rows);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn kron(&self, other: &Matrix) -> Matrix {
        Matrix::from_fn(self.rows * other.rows, self.cols * other.cols, |i, j| {
            &self[(i / other.rows, j / other.cols)] * &other[(i % other.rows, j % other.cols)]
        })
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self[(i, j)].is_zero()))
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..i.min(self.cols)).all(|j| self[(i, j)].is_zero()))
    }

    pub fn is_diagonal(&self) -> bool {
        self.is_lower_triangular() && self.is_upper_triangular()
    }

    /// Reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = Rational::one() / &self[(r, c)];
            for j in c..self.cols {
                let v = &self[(r, j)] * &inv;
                self[(r, j)] = v;
            }
            for i in 0..self.rows {
                if i == r || self[(i, c)].is_zero() {
                    continue;
                }
                let f = self[(i, c)].clone();
                for j in c..self.cols {
                    if self[(r, j)].is_zero() {
                        continue;
                    }
                    let v = &self[(i, j)] - &f * &self[(r, j)];
                    self[(i, j)] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// A basis of the right null space `{v : M v = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = -m[(r, f)].clone();
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = Matrix::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self[(i, j)].clone()
            } else if j - n == i {
                Rational::one()
            } else {
                Rational::zero()
            }
        });
        let pivots = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        Ok(aug.submatrix(0, n, n, n))
    }

    /// Characteristic polynomial `det(X I - M)`, by reduction to upper
    /// Hessenberg form followed by the standard three-term recurrence.
    pub fn charpoly(&self) -> Poly {
        assert!(self.is_square());
        let n = self.rows;
        let mut h = self.clone();
        for m in 1..n.saturating_sub(1) {
            let col = m - 1;
            if h[(m, col)].is_zero() {
                if let Some(i) = (m + 1..n).find(|&i| !h[(i, col)].is_zero()) {
                    h.swap_rows(i, m);
                    h.swap_cols(i, m);
                }
            }
            if h[(m, col)].is_zero() {
                continue;
            }
            let t = h[(m, col)].clone();
            for i in m + 1..n {
                if h[(i, col)].is_zero() {
                    continue;
                }
                let u = &h[(i, col)] / &t;
                for j in 0..n {
                    if !h[(m, j)].is_zero() {
                        let v = &h[(i, j)] - &u * &h[(m, j)];
                        h[(i, j)] = v;
                    }
                }
                for r in 0..n {
                    if !h[(r, i)].is_zero() {
                        let v = &h[(r, m)] + &u * &h[(r, i)];
                        h[(r, m)] = v;
                    }
                }
            }
        }
        // p[k] = charpoly of the leading k x k block of h.
        let mut p: Vec<Poly> = vec![Poly::one()];
        for k in 1..=n {
            let mut next = &Poly::linear(&h[(k - 1, k - 1)]) * &p[k - 1];
            let mut prod = Rational::one();
            for i in 1..k {
                prod *= &h[(k - i, k - i - 1)];
                if prod.is_zero() {
                    break;
                }
                let c = &h[(k - i - 1, k - 1)] * &prod;
                if !c.is_zero() {
                    next = next.sub(&p[k - i - 1].scale(&c));
                }
            }
            p.push(next);
        }
        p.pop().unwrap()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// CSV with a header row `c0,c1,...` and entries written as `p/q`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header: Vec<String> = (0..self.cols).map(|j| format!("c{j}")).collect();
        w.write_record(&header).expect("in-memory write");
        for i in 0..self.rows {
            w.write_record(self.row(i).iter().map(|r| r.to_string()))
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8")
    }

    /// Parse CSV of `p/q` entries; a header row is detected and skipped.
    pub fn from_csv(text: &str) -> Result<Matrix> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut rows = Vec::new();
        for (k, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            let parsed: Result<Vec<Rational>> = rec.iter().map(parse_rational).collect();
            match parsed {
                Ok(row) => rows.push(row),
                Err(_) if k == 0 => continue,
                Err(e) => return Err(e),
            }
        }
        Matrix::from_rows(rows)
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(crate::exactnum::to_f64).collect())
            .collect()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Rational;

    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl Mul for Matrix {
    type Output = Matrix;

    fn mul(self, rhs: Matrix) -> Matrix {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect())
            .unwrap()
    }

    // Independent oracle: Faddeev-LeVerrier on small matrices.
    fn faddeev_leverrier(a: &Matrix) -> Poly {
        let n = a.rows();
        let mut coeffs = vec![Rational::zero(); n + 1];
        coeffs[n] = Rational::one();
        let mut mk = Matrix::zeros(n, n);
        for k in 1..=n {
            let am = a * &mk;
            mk = Matrix::from_fn(n, n, |i, j| {
                let id = if i == j { coeffs[n - k + 1].clone() } else { Rational::zero() };
                &am[(i, j)] + id
            });
            let tr: Rational = (a * &mk).diag().into_iter().sum();
            coeffs[n - k] = -tr / int(k as i64);
        }
        Poly::new(coeffs)
    }

    #[test]
    fn charpoly_small() {
        let a = m(&[&[2, 1], &[1, 2]]);
        assert_eq!(a.charpoly(), Poly::from_roots(&[int(1), int(3)]));
        let j = Matrix::anti_diagonal(3);
        assert_eq!(j.charpoly(), Poly::from_roots(&[int(1), int(1), int(-1)]));
    }

    #[test]
    fn charpoly_matches_faddeev_leverrier() {
        let a = Matrix::from_fn(6, 6, |i, j| rat((i * 7 + j * 3) as i64 % 5 - 2, (i + j + 1) as i64));
        assert_eq!(a.charpoly(), faddeev_leverrier(&a));
        // Zero subdiagonal forces the pivot search.
        let b = m(&[&[1, 2, 0, 3], &[0, 0, 1, 1], &[4, 0, 2, 0], &[0, 5, 0, 1]]);
        assert_eq!(b.charpoly(), faddeev_leverrier(&b));
        let z = Matrix::zeros(4, 4);
        assert_eq!(z.charpoly(), faddeev_leverrier(&z));
    }

    #[test]
    fn inverse_and_singular() {
        let a = m(&[&[1, 0], &[1, 1]]);
        assert_eq!(a.inverse().unwrap(), m(&[&[1, 0], &[-1, 1]]));
        assert_eq!(m(&[&[1, 2], &[2, 4]]).inverse(), Err(Error::Singular));
    }

    #[test]
    fn nullspace_dimension() {
        let a = m(&[&[1, 1, 0], &[0, 0, 1]]);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 1);
        assert_eq!(a.mul_vec(&ns[0]), vec![int(0), int(0)]);
    }

    #[test]
    fn kron_and_pow() {
        let q = m(&[&[0, 1], &[1, 1]]);
        let k = q.kron(&Matrix::identity(2));
        assert_eq!(k.rows(), 4);
        assert_eq!(k[(1, 3)], int(1));
        assert_eq!(q.pow(5), &(&(&(&q * &q) * &q) * &q) * &q);
        assert_eq!(Matrix::anti_diagonal(5).pow(2), Matrix::identity(5));
    }

    #[test]
    fn csv_round_trip() {
        let a = Matrix::from_rows(vec![vec![rat(1, 2), int(0)], vec![rat(-3, 4), int(7)]]).unwrap();
        let text = a.to_csv();
        assert!(text.starts_with("c0,c1\n1/2,0\n"));
        assert_eq!(Matrix::from_csv(&text).unwrap(), a);
    }
}
