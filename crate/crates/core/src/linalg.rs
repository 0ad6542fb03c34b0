//! Exact linear algebra over the integers and rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::rational::Rational;

/// Dense rational matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        RatMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len(), "shape mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (RatMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(p, r);
            let inv = m[(r, c)].recip();
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let factor = m[(i, c)].clone();
                for j in c..m.cols {
                    if m[(r, j)].is_zero() {
                        continue;
                    }
                    let v = &factor * &m[(r, j)];
                    m[(i, j)] -= v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Inverse of a nonsingular square matrix, `None` when singular.
    pub fn inverse(&self) -> Option<RatMatrix> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rational::one();
        }
        let (e, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = e[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    /// Moore–Penrose pseudo-inverse via the exact rank factorization
    /// `A = C R`: `A⁺ = Rᵀ (R Rᵀ)⁻¹ (Cᵀ C)⁻¹ Cᵀ`.
    ///
    /// `A⁺ b` is the minimum-norm least-squares solution of `A x ≈ b`.
    pub fn pseudo_inverse(&self) -> RatMatrix {
        let (e, pivots) = self.rref();
        let r = pivots.len();
        if r == 0 {
            return Self::zeros(self.cols, self.rows);
        }
        let mut rr = Self::zeros(r, self.cols);
        for i in 0..r {
            for j in 0..self.cols {
                rr[(i, j)] = e[(i, j)].clone();
            }
        }
        let mut c = Self::zeros(self.rows, r);
        for i in 0..self.rows {
            for (k, &p) in pivots.iter().enumerate() {
                c[(i, k)] = self[(i, p)].clone();
            }
        }
        let ct = c.transpose();
        let rt = rr.transpose();
        let ctc_inv = ct.mul(&c).inverse().expect("C has full column rank");
        let rrt_inv = rr.mul(&rt).inverse().expect("R has full row rank");
        rt.mul(&rrt_inv).mul(&ctc_inv).mul(&ct)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

/// Fraction-free (Bareiss) elimination of an integer matrix, scanning columns
/// from last to first. Returns the dependency of the first column found to be
/// linearly dependent on the columns already scanned, as a primitive integer
/// vector, or `None` when the columns are independent.
///
/// The returned vector is supported on that free column and on pivot columns
/// with larger index.
pub fn first_null_vector(rows: &[Vec<BigInt>], ncols: usize) -> Option<Vec<BigInt>> {
    let mut m: Vec<Vec<BigInt>> = rows.to_vec();
    let nrows = m.len();
    let mut prev = BigInt::one();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in (0..ncols).rev() {
        let found = (r..nrows).find(|&i| !m[i][c].is_zero());
        let Some(p) = found else {
            return Some(back_substitute(&m, &pivots, c, ncols));
        };
        m.swap(p, r);
        let pivot = m[r][c].clone();
        for i in r + 1..nrows {
            let lead = m[i][c].clone();
            for j in 0..ncols {
                let v = (&pivot * &m[i][j] - &lead * &m[r][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = pivot;
        pivots.push(c);
        r += 1;
    }
    None
}

fn back_substitute(m: &[Vec<BigInt>], pivots: &[usize], free: usize, ncols: usize) -> Vec<BigInt> {
    let mut x = vec![Rational::zero(); ncols];
    x[free] = Rational::one();
    for (i, &pc) in pivots.iter().enumerate().rev() {
        let mut s = Rational::from_integer(m[i][free].clone());
        for &qc in &pivots[i + 1..] {
            if !m[i][qc].is_zero() {
                s += Rational::from_integer(m[i][qc].clone()) * &x[qc];
            }
        }
        x[pc] = -s / Rational::from_integer(m[i][pc].clone());
    }
    let lcm = x.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<BigInt> = x.iter().map(|q| q.numer() * (&lcm / q.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    ints.into_iter().map(|v| v / &g).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn ints(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
    }

    fn rats(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect())
    }

    #[test]
    fn null_vector_of_dependent_columns() {
        // col0 = col1 + col2
        let m = ints(&[&[2, 1, 1], &[1, 0, 1], &[3, 3, 0]]);
        let v = first_null_vector(&m, 3).unwrap();
        let v: Vec<i64> = v.iter().map(|x| i64::try_from(x).unwrap()).collect();
        assert!(v == vec![1, -1, -1] || v == vec![-1, 1, 1]);
    }

    #[test]
    fn independent_columns_have_no_null_vector() {
        let m = ints(&[&[1, 0], &[1, 1], &[0, 1]]);
        assert!(first_null_vector(&m, 2).is_none());
    }

    #[test]
    fn zero_column_is_its_own_dependency() {
        let m = ints(&[&[0, 1, 0], &[0, 0, 1]]);
        let v = first_null_vector(&m, 3).unwrap();
        assert_eq!(v, vec![BigInt::from(1), BigInt::zero(), BigInt::zero()]);
    }

    #[test]
    fn rank_and_inverse() {
        let a = rats(&[&[1, 2], &[3, 4]]);
        assert_eq!(a.rank(), 2);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), RatMatrix::identity(2));
        assert!(rats(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn pseudo_inverse_penrose_conditions() {
        let a = rats(&[&[1, 1, 0], &[0, 1, 1], &[1, 2, 1], &[2, 3, 1]]);
        let p = a.pseudo_inverse();
        assert_eq!(a.mul(&p).mul(&a), a);
        assert_eq!(p.mul(&a).mul(&p), p);
        let ap = a.mul(&p);
        assert_eq!(ap.transpose(), ap);
        let pa = p.mul(&a);
        assert_eq!(pa.transpose(), pa);
    }

    #[test]
    fn pseudo_inverse_of_rank_one() {
        let a = rats(&[&[1, 1], &[1, 1]]);
        let p = a.pseudo_inverse();
        assert_eq!(p, RatMatrix::from_rows(vec![vec![ratio(1, 4); 2]; 2]));
    }
}
