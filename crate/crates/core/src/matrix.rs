//! Exact rational and integer matrices.
//!
//! [`MatQ`] is the square rational matrix used for all group elements.
//! [`IntMat`] is a rectangular integer matrix used by the normal-form
//! algorithms. Both compare by exact entry equality and hash canonically.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::number::{format_rational, parse_rational, Rational};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatQ {
    n: usize,
    entries: Vec<Rational>,
}

impl MatQ {
    pub fn zeros(n: usize) -> Self {
        MatQ { n, entries: vec![Rational::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.entries[i * n + i] = Rational::one();
        }
        m
    }

    pub fn scalar(n: usize, s: Rational) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.entries[i * n + i] = s.clone();
        }
        m
    }

    pub fn diag(d: &[Rational]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, v) in d.iter().enumerate() {
            m.entries[i * d.len() + i] = v.clone();
        }
        m
    }

    pub fn diag_i64(d: &[i64]) -> Self {
        Self::diag(&d.iter().map(|&v| Rational::from_integer(v.into())).collect::<Vec<_>>())
    }

    /// Row-major construction; panics if the length is not a square.
    pub fn from_i64(entries: &[i64]) -> Self {
        let n = (entries.len() as f64).sqrt() as usize;
        assert_eq!(n * n, entries.len(), "entry count must be a perfect square");
        MatQ { n, entries: entries.iter().map(|&v| Rational::from_integer(v.into())).collect() }
    }

    pub fn from_rationals(n: usize, entries: Vec<Rational>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::Dimension(format!("expected {} entries, got {}", n * n, entries.len())));
        }
        Ok(MatQ { n, entries })
    }

    pub fn from_int(m: &IntMat) -> Self {
        assert_eq!(m.rows, m.cols);
        MatQ { n: m.rows, entries: m.data.iter().cloned().map(Rational::from_integer).collect() }
    }

    /// Parses the row-major literal form `["1","0","1/2",...]`.
    pub fn from_literal(items: &[String]) -> Result<Self> {
        let n = (items.len() as f64).sqrt().round() as usize;
        if n * n != items.len() || n == 0 {
            return Err(Error::Parse(format!("{} entries is not a square matrix", items.len())));
        }
        let entries = items.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
        Ok(MatQ { n, entries })
    }

    pub fn to_literal(&self) -> Vec<String> {
        self.entries.iter().map(format_rational).collect()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.entries[i * self.n + j] = v;
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                t.entries[j * n + i] = self.entries[i * n + j].clone();
            }
        }
        t
    }

    pub fn scale(&self, s: &Rational) -> Self {
        MatQ { n: self.n, entries: self.entries.iter().map(|e| e * s).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(|e| e.is_integer())
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    pub fn to_int(&self) -> Result<IntMat> {
        if !self.is_integral() {
            return Err(Error::NonIntegral);
        }
        Ok(IntMat {
            rows: self.n,
            cols: self.n,
            data: self.entries.iter().map(|e| e.to_integer()).collect(),
        })
    }

    /// Row-major i64 entries if every entry is an integer that fits.
    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.entries.iter().map(|e| if e.is_integer() { e.numer().to_i64() } else { None }).collect()
    }

    /// The 2x2 block at block position (bi, bj) of a 4x4 matrix.
    pub fn block(&self, bi: usize, bj: usize) -> MatQ {
        let h = self.n / 2;
        let mut b = Self::zeros(h);
        for i in 0..h {
            for j in 0..h {
                b.entries[i * h + j] = self.get(bi * h + i, bj * h + j).clone();
            }
        }
        b
    }

    pub fn from_blocks(a: &MatQ, b: &MatQ, c: &MatQ, d: &MatQ) -> Self {
        let h = a.n;
        let n = 2 * h;
        let mut m = Self::zeros(n);
        for i in 0..h {
            for j in 0..h {
                m.entries[i * n + j] = a.get(i, j).clone();
                m.entries[i * n + j + h] = b.get(i, j).clone();
                m.entries[(i + h) * n + j] = c.get(i, j).clone();
                m.entries[(i + h) * n + j + h] = d.get(i, j).clone();
            }
        }
        m
    }

    /// Determinant by Gaussian elimination over the rationals.
    pub fn det(&self) -> Rational {
        let n = self.n;
        let mut a = self.entries.clone();
        let mut det = Rational::one();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !a[r * n + col].is_zero()) else {
                return Rational::zero();
            };
            if piv != col {
                for j in 0..n {
                    a.swap(piv * n + j, col * n + j);
                }
                det = -det;
            }
            let pv = a[col * n + col].clone();
            det *= &pv;
            for r in col + 1..n {
                if a[r * n + col].is_zero() {
                    continue;
                }
                let f = &a[r * n + col] / &pv;
                for j in col..n {
                    let t = &f * &a[col * n + j];
                    a[r * n + j] -= t;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let mut a = self.entries.clone();
        let mut inv = Self::identity(n).entries;
        for col in 0..n {
            let piv = (col..n).find(|&r| !a[r * n + col].is_zero()).ok_or(Error::Singular)?;
            if piv != col {
                for j in 0..n {
                    a.swap(piv * n + j, col * n + j);
                    inv.swap(piv * n + j, col * n + j);
                }
            }
            let pv = a[col * n + col].clone();
            for j in 0..n {
                a[col * n + j] /= &pv;
                inv[col * n + j] /= &pv;
            }
            for r in 0..n {
                if r == col || a[r * n + col].is_zero() {
                    continue;
                }
                let f = a[r * n + col].clone();
                for j in 0..n {
                    let t = &f * &a[col * n + j];
                    a[r * n + j] -= t;
                    let t = &f * &inv[col * n + j];
                    inv[r * n + j] -= t;
                }
            }
        }
        Ok(MatQ { n, entries: inv })
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        let n = self.n;
        let mut a = self.entries.clone();
        let mut rank = 0;
        for col in 0..n {
            let Some(piv) = (rank..n).find(|&r| !a[r * n + col].is_zero()) else { continue };
            for j in 0..n {
                a.swap(piv * n + j, rank * n + j);
            }
            let pv = a[rank * n + col].clone();
            for r in rank + 1..n {
                if a[r * n + col].is_zero() {
                    continue;
                }
                let f = &a[r * n + col] / &pv;
                for j in col..n {
                    let t = &f * &a[rank * n + j];
                    a[r * n + j] -= t;
                }
            }
            rank += 1;
        }
        rank
    }
}

impl Mul for &MatQ {
    type Output = MatQ;
    fn mul(self, rhs: &MatQ) -> MatQ {
        assert_eq!(self.n, rhs.n, "dimension mismatch in product");
        let n = self.n;
        let mut out = MatQ::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &rhs.entries[k * n + j];
                    if !b.is_zero() {
                        out.entries[i * n + j] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl Mul for MatQ {
    type Output = MatQ;
    fn mul(self, rhs: MatQ) -> MatQ {
        &self * &rhs
    }
}

impl Add for &MatQ {
    type Output = MatQ;
    fn add(self, rhs: &MatQ) -> MatQ {
        assert_eq!(self.n, rhs.n);
        MatQ { n: self.n, entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &MatQ {
    type Output = MatQ;
    fn sub(self, rhs: &MatQ) -> MatQ {
        assert_eq!(self.n, rhs.n);
        MatQ { n: self.n, entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &MatQ {
    type Output = MatQ;
    fn neg(self) -> MatQ {
        MatQ { n: self.n, entries: self.entries.iter().map(|a| -a).collect() }
    }
}

impl fmt::Debug for MatQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MatQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = (0..self.n).map(|j| format_rational(self.get(i, j))).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

/// Rectangular integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct IntMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<BigInt>,
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_i64(rows: usize, cols: usize, v: &[i64]) -> Self {
        assert_eq!(v.len(), rows * cols);
        IntMat { rows, cols, data: v.iter().map(|&x| BigInt::from(x)).collect() }
    }

    pub fn square_i64(v: &[i64]) -> Self {
        let n = (v.len() as f64).sqrt() as usize;
        assert_eq!(n * n, v.len());
        Self::from_i64(n, n, v)
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.data.iter().map(|x| x.to_i64()).collect()
    }

    pub fn mul(&self, rhs: &IntMat) -> IntMat {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut out = IntMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let t = a * rhs.get(k, j);
                    out.data[i * rhs.cols + j] += t;
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> IntMat {
        let mut t = IntMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols);
        MatQ::from_int(self).det().to_integer()
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && self.det().abs().is_one()
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

    /// row[dst] += f * row[src]
    pub fn add_row(&mut self, dst: usize, src: usize, f: &BigInt) {
        if f.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let t = f * &self.data[src * self.cols + j];
            self.data[dst * self.cols + j] += t;
        }
    }

    /// col[dst] += f * col[src]
    pub fn add_col(&mut self, dst: usize, src: usize, f: &BigInt) {
        if f.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let t = f * &self.data[i * self.cols + src];
            self.data[i * self.cols + dst] += t;
        }
    }

    pub fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -&self.data[r * self.cols + j];
            self.data[r * self.cols + j] = v;
        }
    }

    pub fn negate_col(&mut self, c: usize) {
        for i in 0..self.rows {
            let v = -&self.data[i * self.cols + c];
            self.data[i * self.cols + c] = v;
        }
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn max_abs(&self) -> BigInt {
        self.data.iter().map(|x| x.abs()).max().unwrap_or_default()
    }

    pub fn is_negative_free_diag(&self) -> bool {
        (0..self.rows.min(self.cols)).all(|i| !self.get(i, i).is_negative())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::ratio;

    #[test]
    fn inverse_and_det() {
        let m = MatQ::from_i64(&[2, 1, 0, 0, 1, 1, 0, 0, 0, 0, 3, 0, 0, 0, 1, 1]);
        assert_eq!(m.det(), Rational::from_integer(3.into()));
        let inv = m.inverse().unwrap();
        assert!((&m * &inv).is_identity());
        assert!(MatQ::zeros(2).inverse().is_err());
    }

    #[test]
    fn literal_round_trip() {
        let m = MatQ::from_rationals(2, vec![ratio(1, 2), ratio(0, 1), ratio(-3, 1), ratio(4, 6)]).unwrap();
        let lit = m.to_literal();
        assert_eq!(lit, vec!["1/2", "0", "-3", "2/3"]);
        assert_eq!(MatQ::from_literal(&lit).unwrap(), m);
        assert!(MatQ::from_literal(&["1".into(), "2".into(), "3".into()]).is_err());
    }

    #[test]
    fn blocks_reassemble() {
        let m = MatQ::from_i64(&(1..=16).collect::<Vec<_>>());
        let r = MatQ::from_blocks(&m.block(0, 0), &m.block(0, 1), &m.block(1, 0), &m.block(1, 1));
        assert_eq!(r, m);
    }

    #[test]
    fn rank_counts_independent_rows() {
        let m = MatQ::from_i64(&[1, 2, 0, 0, 2, 4, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1]);
        assert_eq!(m.rank(), 2);
    }
}
