//! Small dense integer matrices: products, determinants, characteristic
//! polynomials, Hermite normal form and integer kernels.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IMat {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IMat {
    pub fn zero(rows: usize, cols: usize) -> IMat {
        IMat { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> IMat {
        let mut m = IMat::zero(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> IMat {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        IMat { rows: r, cols: c, data: rows.concat() }
    }

    pub fn from_array<const N: usize, const M: usize>(a: [[i64; M]; N]) -> IMat {
        IMat::from_rows(&a.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
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

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn max_abs(&self) -> i64 {
        self.data.iter().map(|x| x.abs()).max().unwrap_or(0)
    }

    pub fn transpose(&self) -> IMat {
        let mut t = IMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &IMat) -> IMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)]
                        .checked_add(a.checked_mul(other[(k, j)]).expect("matrix overflow"))
                        .expect("matrix overflow");
                }
            }
        }
        out
    }

    /// Product, or `None` on overflow.
    pub fn checked_mul(&self, other: &IMat) -> Option<IMat> {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)].checked_add(self[(i, k)].checked_mul(other[(k, j)])?)?;
                }
            }
        }
        Some(out)
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(v.len(), self.rows);
        (0..self.cols).map(|j| (0..self.rows).map(|i| v[i] * self[(i, j)]).sum()).collect()
    }

    pub fn add(&self, other: &IMat) -> IMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &IMat) -> IMat {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, k: i64) -> IMat {
        IMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * k).collect() }
    }

    pub fn pow(&self, k: u32) -> IMat {
        let mut out = IMat::identity(self.rows);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn checked_pow(&self, k: u32) -> Option<IMat> {
        let mut out = IMat::identity(self.rows);
        for _ in 0..k {
            out = out.checked_mul(self)?;
        }
        Some(out)
    }

    pub fn trace(&self) -> i64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// Fraction-free Bareiss elimination.
    pub fn det(&self) -> i64 {
        assert!(self.is_square());
        let n = self.rows;
        if n == 0 {
            return 1;
        }
        let mut a: Vec<Vec<i128>> = self.to_rows().into_iter().map(|r| r.into_iter().map(i128::from).collect()).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&i| a[i][k] != 0) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
            }
            prev = a[k][k];
        }
        (sign * a[n - 1][n - 1]) as i64
    }

    /// Coefficients of `det(xI - M)`, constant term first, leading 1 last.
    pub fn char_poly(&self) -> Vec<i64> {
        assert!(self.is_square());
        let n = self.rows;
        // Faddeev-LeVerrier; divisions are exact over the integers.
        let mut c = vec![0i64; n + 1];
        c[n] = 1;
        let mut m = IMat::zero(n, n);
        let id = IMat::identity(n);
        for k in 1..=n {
            m = self.mul(&m).add(&id.scale(c[n - k + 1]));
            let t = self.mul(&m).trace();
            c[n - k] = -t / k as i64;
        }
        c
    }

    pub fn is_unimodular(&self) -> bool {
        self.is_square() && self.det().abs() == 1
    }

    /// Inverse of a unimodular matrix via the adjugate.
    pub fn inverse_unimodular(&self) -> Option<IMat> {
        let d = self.det();
        if d.abs() != 1 {
            return None;
        }
        let n = self.rows;
        let mut inv = IMat::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                let minor = self.minor(j, i);
                let s = if (i + j) % 2 == 0 { 1 } else { -1 };
                inv[(i, j)] = s * minor.det() * d;
            }
        }
        Some(inv)
    }

    fn minor(&self, r: usize, c: usize) -> IMat {
        let rows: Vec<Vec<i64>> = (0..self.rows)
            .filter(|&i| i != r)
            .map(|i| (0..self.cols).filter(|&j| j != c).map(|j| self[(i, j)]).collect())
            .collect();
        if rows.is_empty() {
            IMat::zero(0, 0)
        } else {
            IMat::from_rows(&rows)
        }
    }

    /// `(M - I)^n = 0`.
    pub fn is_unipotent(&self) -> bool {
        let n = self.rows;
        self.sub(&IMat::identity(n)).checked_pow(n as u32).is_some_and(|m| m.is_zero())
    }
}

impl std::ops::Index<(usize, usize)> for IMat {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_rows())
    }
}

impl fmt::Display for IMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_rows())
    }
}

pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        // a = q b + r with r = a mod b
        let q = (a - a.rem_euclid(b)) / b;
        (g, y, x - q * y)
    }
}

/// Row echelon form over the integers with a unimodular transform:
/// returns `(h, u)` with `u * a = h`. Pivots are positive and entries above
/// each pivot are reduced into `[0, pivot)`.
pub fn hermite_with_transform(a: &IMat) -> (IMat, IMat) {
    let (m, n) = (a.rows(), a.cols());
    let mut h: Vec<Vec<i128>> = a.to_rows().into_iter().map(|r| r.into_iter().map(i128::from).collect()).collect();
    let mut u: Vec<Vec<i128>> = IMat::identity(m).to_rows().into_iter().map(|r| r.into_iter().map(i128::from).collect()).collect();
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        // Euclid down the column until a single nonzero remains at row r.
        loop {
            let nz: Vec<usize> = (r..m).filter(|&i| h[i][c] != 0).collect();
            if nz.is_empty() {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| h[i][c].abs()).unwrap();
            h.swap(r, p);
            u.swap(r, p);
            let mut done = true;
            for i in r + 1..m {
                if h[i][c] != 0 {
                    let q = h[i][c].div_euclid(h[r][c]);
                    for j in 0..n {
                        h[i][j] -= q * h[r][j];
                    }
                    for j in 0..m {
                        u[i][j] -= q * u[r][j];
                    }
                    if h[i][c] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if h[r][c] == 0 {
            continue;
        }
        if h[r][c] < 0 {
            for j in 0..n {
                h[r][j] = -h[r][j];
            }
            for j in 0..m {
                u[r][j] = -u[r][j];
            }
        }
        for i in 0..r {
            let q = h[i][c].div_euclid(h[r][c]);
            if q != 0 {
                for j in 0..n {
                    h[i][j] -= q * h[r][j];
                }
                for j in 0..m {
                    u[i][j] -= q * u[r][j];
                }
            }
        }
        r += 1;
    }
    let cv = |v: Vec<Vec<i128>>| -> IMat {
        let rows: Vec<Vec<i64>> = v
            .into_iter()
            .map(|r| r.into_iter().map(|x| i64::try_from(x).expect("hermite overflow")).collect())
            .collect();
        if rows.is_empty() {
            IMat::zero(0, n)
        } else {
            IMat::from_rows(&rows)
        }
    };
    (cv(h), cv(u))
}

/// Nonzero rows of the Hermite normal form: a basis of the row lattice.
pub fn row_lattice_basis(a: &IMat) -> Vec<Vec<i64>> {
    let (h, _) = hermite_with_transform(a);
    h.to_rows().into_iter().filter(|r| r.iter().any(|&x| x != 0)).collect()
}

/// Whether `v` is an integer combination of the rows of `a`.
pub fn row_lattice_contains(a: &IMat, v: &[i64]) -> bool {
    let basis = row_lattice_basis(a);
    let mut rem: Vec<i128> = v.iter().map(|&x| x as i128).collect();
    for b in &basis {
        let c = b.iter().position(|&x| x != 0).unwrap();
        let p = b[c] as i128;
        if rem[c] % p != 0 {
            return false;
        }
        let q = rem[c] / p;
        for (j, &bj) in b.iter().enumerate() {
            rem[j] -= q * bj as i128;
        }
    }
    rem.iter().all(|&x| x == 0)
}

/// A basis of `{x in Z^n : a x = 0}`.
pub fn integer_kernel(a: &IMat) -> Vec<Vec<i64>> {
    let (h, u) = hermite_with_transform(&a.transpose());
    (0..h.rows())
        .filter(|&i| h.row(i).iter().all(|&x| x == 0))
        .map(|i| u.row(i).to_vec())
        .collect()
}
