//! Smith, Hermite and symplectic elementary-divisor normal forms, plus the
//! p-adic classification of multiplier-zero matrices into rank strata.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{IntMat, MatQ};
use crate::number::{pow_rat, prime_power_exponent, rat, val, Rational};
use crate::symplectic::{levi, multiplier, odot, pair_embed, shear_lower, shear_upper, Similitude};

/// Symplectic elementary divisors `(a1, a2, d2, d1)` with `a1 | a2 | d2 | d1`
/// and `a1·d1 = a2·d2 = r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct DivisorType {
    pub a1: u64,
    pub a2: u64,
    pub d2: u64,
    pub d1: u64,
}

impl DivisorType {
    pub fn new(a1: u64, a2: u64, d2: u64, d1: u64) -> Result<Self> {
        let t = DivisorType { a1, a2, d2, d1 };
        t.validate()?;
        Ok(t)
    }

    fn validate(&self) -> Result<()> {
        let DivisorType { a1, a2, d2, d1 } = *self;
        let bad = |why: &str| Err(Error::InvalidDivisorType(format!("({a1},{a2},{d2},{d1}): {why}")));
        if a1 == 0 || a2 == 0 || d2 == 0 || d1 == 0 {
            return bad("entries must be positive");
        }
        if a2 % a1 != 0 || d2 % a2 != 0 || d1 % d2 != 0 {
            return bad("divisibility chain a1 | a2 | d2 | d1 fails");
        }
        if a1.checked_mul(d1) != a2.checked_mul(d2) {
            return bad("a1·d1 ≠ a2·d2");
        }
        Ok(())
    }

    pub fn identity() -> Self {
        DivisorType { a1: 1, a2: 1, d2: 1, d1: 1 }
    }

    /// The type `p^(e1, e2, l − e2, l − e1)`; requires `e1 ≤ e2 ≤ l − e2`.
    pub fn from_exponents(p: u64, e1: u32, e2: u32, l: u32) -> Result<Self> {
        if e1 > e2 || 2 * e2 > l {
            return Err(Error::InvalidDivisorType(format!("exponents ({e1},{e2}) invalid for l = {l}")));
        }
        let pw = |e: u32| p.checked_pow(e).ok_or(Error::Overflow("prime power"));
        Self::new(pw(e1)?, pw(e2)?, pw(l - e2)?, pw(l - e1)?)
    }

    pub fn multiplier(&self) -> u64 {
        self.a1 * self.d1
    }

    /// `(e1, e2, l)` when every entry is a power of `p`.
    pub fn exponents(&self, p: u64) -> Option<(u32, u32, u32)> {
        let e1 = prime_power_exponent(self.a1, p)?;
        let e2 = prime_power_exponent(self.a2, p)?;
        let l = prime_power_exponent(self.multiplier(), p)?;
        Some((e1, e2, l))
    }

    /// The elementary form `diag(a1, a2, d1, d2)`.
    pub fn diagonal(&self) -> Similitude {
        let v = [self.a1, self.a2, self.d1, self.d2].map(|x| x as i64);
        Similitude::new(MatQ::diag_i64(&v)).expect("elementary form is a similitude")
    }

    /// All types of multiplier `p^l`, ordered by exponents.
    pub fn all_for_prime_power(p: u64, l: u32) -> Vec<DivisorType> {
        let mut out = Vec::new();
        for e1 in 0..=l / 2 {
            for e2 in e1..=l / 2 {
                out.push(Self::from_exponents(p, e1, e2, l).expect("chain holds by construction"));
            }
        }
        out
    }

    /// Entrywise product; the type of `g·h` when multipliers are coprime.
    pub fn combine(&self, other: &DivisorType) -> Result<DivisorType> {
        if self.multiplier().gcd(&other.multiplier()) != 1 {
            return Err(Error::InvalidArgument("types must have coprime multipliers".into()));
        }
        DivisorType::new(self.a1 * other.a1, self.a2 * other.a2, self.d2 * other.d2, self.d1 * other.d1)
    }
}

impl fmt::Display for DivisorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.a1, self.a2, self.d2, self.d1)
    }
}

impl From<DivisorType> for String {
    fn from(t: DivisorType) -> String {
        t.to_string()
    }
}

impl TryFrom<String> for DivisorType {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for DivisorType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<u64> = s
            .split(',')
            .map(|x| x.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad divisor type {s:?}"))))
            .collect::<Result<_>>()?;
        match parts[..] {
            [a1, a2, d2, d1] => DivisorType::new(a1, a2, d2, d1),
            _ => Err(Error::Parse(format!("divisor type needs four entries: {s:?}"))),
        }
    }
}

/// Orbit label of a nonzero multiplier-zero matrix over ℚ_p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum StratumLabel {
    Rank1 { k0: i64 },
    Rank2 { kmin: i64, kmax: i64 },
}

impl StratumLabel {
    pub fn rank1(k0: i64) -> Self {
        StratumLabel::Rank1 { k0 }
    }

    /// Unordered pair, stored sorted.
    pub fn rank2(k1: i64, k2: i64) -> Self {
        StratumLabel::Rank2 { kmin: k1.min(k2), kmax: k1.max(k2) }
    }

    pub fn shift(&self, by: i64) -> Self {
        match *self {
            StratumLabel::Rank1 { k0 } => StratumLabel::Rank1 { k0: k0 + by },
            StratumLabel::Rank2 { kmin, kmax } => StratumLabel::Rank2 { kmin: kmin + by, kmax: kmax + by },
        }
    }

    /// The base point `P_{k0} = (0 0; 0 p^k0) ⊙ 0` or `P_{k1,k2} = (0 0; 0 p^k1) ⊙ (0 0; 0 p^k2)`.
    pub fn base_point(&self, p: u64) -> MatQ {
        let corner = |k: i64| {
            let mut m = MatQ::zeros(2);
            m.set(1, 1, pow_rat(p, k));
            m
        };
        let (first, second) = match *self {
            StratumLabel::Rank1 { k0 } => (corner(k0), MatQ::zeros(2)),
            StratumLabel::Rank2 { kmin, kmax } => (corner(kmin), corner(kmax)),
        };
        odot(&first, &second).expect("both factors have multiplier zero").into_mat()
    }
}

impl fmt::Display for StratumLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StratumLabel::Rank1 { k0 } => write!(f, "{{{k0}}}"),
            StratumLabel::Rank2 { kmin, kmax } => write!(f, "{{{kmin},{kmax}}}"),
        }
    }
}

impl FromStr for StratumLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .ok_or_else(|| Error::Parse(format!("stratum label must look like {{k}} or {{a,b}}: {s:?}")))?;
        let parts: Vec<i64> = inner
            .split(',')
            .map(|x| x.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad stratum label {s:?}"))))
            .collect::<Result<_>>()?;
        match parts[..] {
            [k] => Ok(StratumLabel::rank1(k)),
            [a, b] => Ok(StratumLabel::rank2(a, b)),
            _ => Err(Error::Parse(format!("bad stratum label {s:?}"))),
        }
    }
}

impl From<StratumLabel> for String {
    fn from(l: StratumLabel) -> String {
        l.to_string()
    }
}

impl TryFrom<String> for StratumLabel {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

// ---------------------------------------------------------------------------
// Smith normal form
// ---------------------------------------------------------------------------

/// `S = U·M·V` with `U`, `V` unimodular and `S` diagonal, `s1 | s2 | …`, `sᵢ ≥ 0`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: IntMat,
    pub s: IntMat,
    pub v: IntMat,
}

impl SmithForm {
    pub fn invariants(&self) -> Vec<BigInt> {
        (0..self.s.rows.min(self.s.cols)).map(|i| self.s.get(i, i).clone()).collect()
    }
}

pub fn smith_normal_form(m: &IntMat) -> SmithForm {
    let (rows, cols) = (m.rows, m.cols);
    let mut s = m.clone();
    let mut u = IntMat::identity(rows);
    let mut v = IntMat::identity(cols);
    let k_max = rows.min(cols);
    for t in 0..k_max {
        // smallest nonzero entry of the trailing block
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let x = s.get(i, j);
                    if !x.is_zero() && best.map_or(true, |(bi, bj)| x.abs() < s.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            s.swap_rows(t, bi);
            u.swap_rows(t, bi);
            s.swap_cols(t, bj);
            v.swap_cols(t, bj);

            let piv = s.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..rows {
                let q = s.get(i, t).div_floor(&piv);
                if !q.is_zero() {
                    s.add_row(i, t, &-&q);
                    u.add_row(i, t, &-&q);
                }
                if !s.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                let q = s.get(t, j).div_floor(&piv);
                if !q.is_zero() {
                    s.add_col(j, t, &-&q);
                    v.add_col(j, t, &-&q);
                }
                if !s.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // pivot must divide the rest of the block
            let mut offender = None;
            'scan: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !s.get(i, j).is_multiple_of(&piv) {
                        offender = Some(i);
                        break 'scan;
                    }
                }
            }
            match offender {
                Some(i) => {
                    s.add_row(t, i, &BigInt::one());
                    u.add_row(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if s.get(t, t).is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    SmithForm { u, s, v }
}

/// Smith invariants from gcds of k×k minors; independent of the elimination
/// path above.
pub fn smith_invariants_by_minors(m: &IntMat) -> Vec<BigInt> {
    let n = m.rows.min(m.cols);
    let mut dets: Vec<BigInt> = vec![BigInt::one()];
    for k in 1..=n {
        let mut g = BigInt::zero();
        for rs in combinations(m.rows, k) {
            for cs in combinations(m.cols, k) {
                let sub: Vec<BigInt> =
                    rs.iter().flat_map(|&r| cs.iter().map(move |&c| m.get(r, c).clone())).collect();
                g = g.gcd(&laplace_det(&sub, k));
            }
        }
        dets.push(g);
    }
    let mut out = Vec::with_capacity(n);
    for k in 1..=n {
        if dets[k].is_zero() {
            out.push(BigInt::zero());
        } else {
            out.push(&dets[k] / &dets[k - 1]);
        }
    }
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn laplace_det(a: &[BigInt], k: usize) -> BigInt {
    match k {
        0 => BigInt::one(),
        1 => a[0].clone(),
        2 => &a[0] * &a[3] - &a[1] * &a[2],
        _ => {
            let mut total = BigInt::zero();
            for c in 0..k {
                if a[c].is_zero() {
                    continue;
                }
                let minor: Vec<BigInt> = (1..k)
                    .flat_map(|r| (0..k).filter(move |&cc| cc != c).map(move |cc| (r, cc)))
                    .map(|(r, cc)| a[r * k + cc].clone())
                    .collect();
                let term = &a[c] * laplace_det(&minor, k - 1);
                if c % 2 == 0 {
                    total += term;
                } else {
                    total -= term;
                }
            }
            total
        }
    }
}

// ---------------------------------------------------------------------------
// Hermite normal form
// ---------------------------------------------------------------------------

/// Row-style Hermite form `H = U·M`: echelon, positive pivots, entries above a
/// pivot reduced into `[0, pivot)`, zero rows last.
pub fn hermite_normal_form(m: &IntMat) -> (IntMat, IntMat) {
    let (rows, cols) = (m.rows, m.cols);
    let mut h = m.clone();
    let mut u = IntMat::identity(rows);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        // gcd-combine column c of rows r.. into row r
        loop {
            let mut best: Option<usize> = None;
            for i in r..rows {
                let x = h.get(i, c);
                if !x.is_zero() && best.map_or(true, |b| x.abs() < h.get(b, c).abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            h.swap_rows(r, b);
            u.swap_rows(r, b);
            let piv = h.get(r, c).clone();
            let mut done = true;
            for i in r + 1..rows {
                let q = h.get(i, c).div_floor(&piv);
                if !q.is_zero() {
                    h.add_row(i, r, &-&q);
                    u.add_row(i, r, &-&q);
                }
                if !h.get(i, c).is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h.get(r, c).is_zero() {
            continue;
        }
        if h.get(r, c).is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        let piv = h.get(r, c).clone();
        for i in 0..r {
            let q = h.get(i, c).div_floor(&piv);
            if !q.is_zero() {
                h.add_row(i, r, &-&q);
                u.add_row(i, r, &-&q);
            }
        }
        r += 1;
    }
    (u, h)
}

/// Hermite form of a nonsingular 2x2 matrix: `H = U·D` upper triangular.
pub fn hnf2(d: &IntMat) -> Result<(IntMat, IntMat)> {
    if d.rows != 2 || d.cols != 2 {
        return Err(Error::Dimension("hnf2 expects a 2x2 matrix".into()));
    }
    if d.det().is_zero() {
        return Err(Error::Singular);
    }
    Ok(hermite_normal_form(d))
}

// ---------------------------------------------------------------------------
// Symplectic reduction
// ---------------------------------------------------------------------------

/// Tracks `left · X · right` while elementary symplectic moves are applied.
struct Reducer {
    x: MatQ,
    left: MatQ,
    right: MatQ,
}

fn q2(a: Rational, b: Rational, c: Rational, d: Rational) -> MatQ {
    MatQ::from_rationals(2, vec![a, b, c, d]).expect("2x2")
}

fn pair_q(i: usize, a: Rational, b: Rational, c: Rational, d: Rational) -> MatQ {
    let mut e = MatQ::identity(4);
    e.set(i, i, a);
    e.set(i, i + 2, b);
    e.set(i + 2, i, c);
    e.set(i + 2, i + 2, d);
    e
}

impl Reducer {
    fn new(x: MatQ) -> Self {
        Reducer { x, left: MatQ::identity(4), right: MatQ::identity(4) }
    }

    fn apply_left(&mut self, e: &MatQ) {
        self.x = e * &self.x;
        self.left = e * &self.left;
    }

    fn apply_right(&mut self, e: &MatQ) {
        self.x = &self.x * e;
        self.right = &self.right * e;
    }

    fn swap_pairs() -> MatQ {
        levi(&MatQ::from_i64(&[0, 1, 1, 0])).expect("permutation is unimodular")
    }

    /// Moves entry (i, j) to (0, 0).
    fn to_origin(&mut self, i: usize, j: usize) {
        let mut i = i;
        if i % 2 == 1 {
            self.apply_left(&Self::swap_pairs());
            i -= 1;
        }
        if i == 2 {
            self.apply_left(&pair_embed(0, [[0, 1], [-1, 0]]));
        }
        let mut j = j;
        if j % 2 == 1 {
            self.apply_right(&Self::swap_pairs());
            j -= 1;
        }
        if j == 2 {
            self.apply_right(&pair_embed(0, [[0, -1], [1, 0]]));
        }
    }

    /// `col j -= q·col 0` for j ∈ {1,2,3}.
    fn clear_row0(&mut self, j: usize, q: Rational) {
        let z = Rational::zero;
        let o = Rational::one;
        let e = match j {
            1 => levi(&q2(o(), -q, z(), o())).expect("unit upper triangular"),
            2 => pair_q(0, o(), -q, z(), o()),
            3 => shear_upper(&q2(z(), -q.clone(), -q, z())),
            _ => unreachable!(),
        };
        self.apply_right(&e);
    }

    /// `row i -= q·row 0` for i ∈ {1,2,3}.
    fn clear_col0(&mut self, i: usize, q: Rational) {
        let z = Rational::zero;
        let o = Rational::one;
        let e = match i {
            1 => levi(&q2(o(), z(), -q, o())).expect("unit lower triangular"),
            2 => pair_q(0, o(), z(), -q, o()),
            3 => shear_lower(&q2(z(), -q.clone(), -q, z())),
            _ => unreachable!(),
        };
        self.apply_left(&e);
    }

    /// `row 0 += row i`.
    fn add_to_row0(&mut self, i: usize) {
        let e = match i {
            1 => levi(&MatQ::from_i64(&[1, 1, 0, 1])).expect("unimodular"),
            2 => pair_embed(0, [[1, 1], [0, 1]]),
            3 => shear_upper(&MatQ::from_i64(&[0, 1, 1, 0])),
            _ => unreachable!(),
        };
        self.apply_left(&e);
    }

    fn pivot_row_col_clear(&self) -> bool {
        (1..4).all(|k| self.x.get(0, k).is_zero() && self.x.get(k, 0).is_zero())
    }

    /// Euclidean reduction over ℤ of the (0,0) pivot.
    fn reduce_origin_integral(&mut self) {
        let (i, j) = min_abs_entry(&self.x, &[0, 1, 2, 3], &[0, 1, 2, 3]).expect("nonzero matrix");
        self.to_origin(i, j);
        loop {
            let piv = self.x.get(0, 0).to_integer();
            for k in 1..4 {
                let q = self.x.get(0, k).to_integer().div_floor(&piv);
                if !q.is_zero() {
                    self.clear_row0(k, Rational::from_integer(q));
                }
                let q = self.x.get(k, 0).to_integer().div_floor(&piv);
                if !q.is_zero() {
                    self.clear_col0(k, Rational::from_integer(q));
                }
            }
            if !self.pivot_row_col_clear() {
                // a nonzero remainder is smaller than the pivot; promote it
                let mut best: Option<(usize, usize)> = None;
                for k in 1..4 {
                    for (a, b) in [(0, k), (k, 0)] {
                        let v = self.x.get(a, b);
                        if !v.is_zero() && best.map_or(true, |(ba, bb)| v.abs() < self.x.get(ba, bb).abs()) {
                            best = Some((a, b));
                        }
                    }
                }
                let (a, b) = best.expect("some remainder is nonzero");
                self.to_origin(a, b);
                continue;
            }
            let piv = self.x.get(0, 0).to_integer();
            let offender = (1..4).find(|&r| (1..4).any(|c| !self.x.get(r, c).to_integer().is_multiple_of(&piv)));
            match offender {
                Some(r) => self.add_to_row0(r),
                None => break,
            }
        }
        if self.x.get(0, 0).is_negative() {
            self.apply_left(&pair_embed(0, [[-1, 0], [0, -1]]));
        }
    }

    /// Valuation-pivot reduction over ℤ_(p) of the (0,0) pivot.
    fn reduce_origin_padic(&mut self, p: u64) {
        let (i, j) = min_val_entry(&self.x, p, &[0, 1, 2, 3], &[0, 1, 2, 3]).expect("nonzero matrix");
        self.to_origin(i, j);
        let piv = self.x.get(0, 0).clone();
        for k in 1..4 {
            let q = self.x.get(0, k) / &piv;
            if !q.is_zero() {
                self.clear_row0(k, q);
            }
        }
        for k in 1..4 {
            let q = self.x.get(k, 0) / &piv;
            if !q.is_zero() {
                self.clear_col0(k, q);
            }
        }
        debug_assert!(self.pivot_row_col_clear());
    }

    // --- the 2x2 block on coordinates (1, 3) ---

    fn block_swap_rows(&mut self) {
        self.apply_left(&pair_embed(1, [[0, 1], [-1, 0]]));
    }

    fn block_swap_cols(&mut self) {
        self.apply_right(&pair_embed(1, [[0, -1], [1, 0]]));
    }

    fn block_to_origin(&mut self, i: usize, j: usize) {
        if i == 3 {
            self.block_swap_rows();
        }
        if j == 3 {
            self.block_swap_cols();
        }
    }

    fn block_clear(&mut self, q_row: Rational, q_col: Rational) {
        let z = Rational::zero;
        let o = Rational::one;
        if !q_row.is_zero() {
            self.apply_right(&pair_q(1, o(), -q_row, z(), o()));
        }
        if !q_col.is_zero() {
            self.apply_left(&pair_q(1, o(), z(), -q_col, o()));
        }
    }

    fn block_is_zero(&self) -> bool {
        [(1, 1), (1, 3), (3, 1), (3, 3)].iter().all(|&(a, b)| self.x.get(a, b).is_zero())
    }

    fn reduce_block_integral(&mut self) {
        if self.block_is_zero() {
            return;
        }
        let (i, j) = min_abs_entry(&self.x, &[1, 3], &[1, 3]).expect("block nonzero");
        self.block_to_origin(i, j);
        loop {
            let piv = self.x.get(1, 1).to_integer();
            let qr = self.x.get(1, 3).to_integer().div_floor(&piv);
            let qc = self.x.get(3, 1).to_integer().div_floor(&piv);
            self.block_clear(Rational::from_integer(qr), Rational::from_integer(qc));
            if !self.x.get(1, 3).is_zero() || !self.x.get(3, 1).is_zero() {
                let r13 = self.x.get(1, 3).clone();
                let r31 = self.x.get(3, 1).clone();
                if !r13.is_zero() && (r31.is_zero() || r13.abs() <= r31.abs()) {
                    self.block_swap_cols();
                } else {
                    self.block_swap_rows();
                }
                continue;
            }
            let corner = self.x.get(3, 3).to_integer();
            if corner.is_multiple_of(&piv) {
                break;
            }
            self.apply_left(&pair_embed(1, [[1, 1], [0, 1]]));
        }
        if self.x.get(1, 1).is_negative() {
            self.apply_left(&pair_embed(1, [[-1, 0], [0, -1]]));
        }
    }

    fn reduce_block_padic(&mut self, p: u64) {
        if self.block_is_zero() {
            return;
        }
        let (i, j) = min_val_entry(&self.x, p, &[1, 3], &[1, 3]).expect("block nonzero");
        self.block_to_origin(i, j);
        let piv = self.x.get(1, 1).clone();
        let qr = self.x.get(1, 3) / &piv;
        let qc = self.x.get(3, 1) / &piv;
        self.block_clear(qr, qc);
    }
}

fn min_abs_entry(x: &MatQ, rows: &[usize], cols: &[usize]) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for &i in rows {
        for &j in cols {
            let v = x.get(i, j);
            if !v.is_zero() && best.map_or(true, |(bi, bj)| v.abs() < x.get(bi, bj).abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

fn min_val_entry(x: &MatQ, p: u64, rows: &[usize], cols: &[usize]) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, i64)> = None;
    for &i in rows {
        for &j in cols {
            if let Some(v) = val(x.get(i, j), p) {
                if best.map_or(true, |(_, _, bv)| v < bv) {
                    best = Some((i, j, v));
                }
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

/// Result of a two-sided symplectic reduction `left · g · right = diag`.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub left: MatQ,
    pub right: MatQ,
    pub diagonal: MatQ,
}

/// Elementary divisors of an integral similitude with `λ = r > 0`, with
/// witnesses `γ1, γ2 ∈ Sp4(ℤ)` such that `γ1·N·γ2 = diag(a1, a2, d1, d2)`.
pub fn symplectic_elementary_divisors(n: &Similitude) -> Result<(DivisorType, Reduction)> {
    if n.dim() != 4 {
        return Err(Error::Dimension("expected a 4x4 similitude".into()));
    }
    if !n.is_integral() {
        return Err(Error::NonIntegral);
    }
    if !n.lambda().is_positive() {
        return Err(Error::InvalidArgument("multiplier must be positive".into()));
    }
    let mut red = Reducer::new(n.mat().clone());
    red.reduce_origin_integral();
    red.reduce_block_integral();
    let x = &red.x;
    debug_assert!((0..4).all(|i| (0..4).all(|j| i == j || x.get(i, j).is_zero())));
    let e = |i: usize| x.get(i, i).to_integer().to_u64().ok_or(Error::Overflow("elementary divisor"));
    let t = DivisorType::new(e(0)?, e(1)?, e(3)?, e(2)?)?;
    Ok((t, Reduction { left: red.left, right: red.right, diagonal: red.x }))
}

/// Divisor type read off the integer Smith invariants (same invariant,
/// no witnesses).
pub fn divisor_type_of(n: &Similitude) -> Result<DivisorType> {
    let m = n.mat().to_int()?;
    let inv = smith_invariants_by_minors(&m);
    let e = |i: usize| inv[i].to_u64().ok_or(Error::Overflow("elementary divisor"));
    DivisorType::new(e(0)?, e(1)?, e(2)?, e(3)?)
}

/// p-adic elementary form of an integral similitude with `λ ≠ 0`.
#[derive(Clone, Debug)]
pub struct PadicDiagonal {
    /// Valuations of `(a1, a2, d2, d1)`, nondecreasing.
    pub exponents: [i64; 4],
    pub reduction: Reduction,
}

pub fn padic_block_diagonalize(g: &Similitude, p: u64) -> Result<PadicDiagonal> {
    if g.dim() != 4 {
        return Err(Error::Dimension("expected a 4x4 similitude".into()));
    }
    if g.lambda().is_zero() {
        return Err(Error::ZeroMultiplier);
    }
    if g.mat().entries().iter().any(|e| val(e, p).is_some_and(|v| v < 0)) {
        return Err(Error::NonIntegral);
    }
    let mut red = Reducer::new(g.mat().clone());
    red.reduce_origin_padic(p);
    red.reduce_block_padic(p);
    let v = |i: usize| val(red.x.get(i, i), p).expect("diagonal of invertible matrix is nonzero");
    let exponents = [v(0), v(1), v(3), v(2)];
    Ok(PadicDiagonal { exponents, reduction: Reduction { left: red.left, right: red.right, diagonal: red.x } })
}

/// Valuations of the nonzero p-adic Smith invariants of a rational matrix,
/// by minimal-valuation full pivoting.
pub fn padic_smith_valuations(m: &MatQ, p: u64) -> Vec<i64> {
    let n = m.dim();
    let mut a: Vec<Rational> = m.entries().to_vec();
    let mut out = Vec::new();
    let mut active_rows: Vec<usize> = (0..n).collect();
    let mut active_cols: Vec<usize> = (0..n).collect();
    loop {
        let mut best: Option<(usize, usize, i64)> = None;
        for &i in &active_rows {
            for &j in &active_cols {
                if let Some(v) = val(&a[i * n + j], p) {
                    if best.map_or(true, |(_, _, bv)| v < bv) {
                        best = Some((i, j, v));
                    }
                }
            }
        }
        let Some((pi, pj, v)) = best else { break };
        out.push(v);
        let piv = a[pi * n + pj].clone();
        for &i in &active_rows {
            if i == pi || a[i * n + pj].is_zero() {
                continue;
            }
            let f = &a[i * n + pj] / &piv;
            for &j in &active_cols {
                let t = &f * &a[pi * n + j];
                a[i * n + j] -= t;
            }
        }
        active_rows.retain(|&i| i != pi);
        active_cols.retain(|&j| j != pj);
    }
    out
}

fn check_stratum_input(m: &MatQ) -> Result<()> {
    if m.dim() != 4 {
        return Err(Error::Dimension("expected a 4x4 matrix".into()));
    }
    if m.is_zero() {
        return Err(Error::InvalidArgument("the zero matrix has no stratum".into()));
    }
    match multiplier(m) {
        Some(l) if l.is_zero() => Ok(()),
        _ => Err(Error::InvalidArgument("stratum classification needs multiplier 0".into())),
    }
}

/// Rank-stratum label of a nonzero multiplier-zero matrix, read off its
/// p-adic Smith form.
pub fn classify_stratum(m: &MatQ, p: u64) -> Result<StratumLabel> {
    check_stratum_input(m)?;
    Ok(label_from_valuations(&padic_smith_valuations(m, p)))
}

fn label_from_valuations(v: &[i64]) -> StratumLabel {
    match v {
        [k0] => StratumLabel::rank1(*k0),
        [k1, k2] => StratumLabel::rank2(*k1, *k2),
        _ => unreachable!("isotropic column space has rank 1 or 2, got {}", v.len()),
    }
}

/// Constructive reduction: returns the label with `γ1 ∈ Sp4(ℤ_(p))` and
/// `γ2 ∈ Sp4(ℤ_(p))` such that `γ1·M·γ2` is the label's base point.
pub fn stratum_witness(m: &MatQ, p: u64) -> Result<(StratumLabel, Reduction)> {
    check_stratum_input(m)?;
    let mut red = Reducer::new(m.clone());
    red.reduce_origin_padic(p);
    red.reduce_block_padic(p);
    // diag(a, x, 0, 0) -> diag(0, 0, a, x)
    red.apply_left(&pair_embed(0, [[0, 1], [-1, 0]]));
    red.apply_right(&pair_embed(0, [[0, -1], [1, 0]]));
    let has_second = !red.x.get(1, 1).is_zero();
    if has_second {
        red.apply_left(&pair_embed(1, [[0, 1], [-1, 0]]));
        red.apply_right(&pair_embed(1, [[0, -1], [1, 0]]));
    }
    let k1 = val(red.x.get(2, 2), p).expect("pivot is nonzero");
    let y1 = pow_rat(p, k1) / red.x.get(2, 2);
    let (k2, y2) = if has_second {
        let k2 = val(red.x.get(3, 3), p).expect("second pivot is nonzero");
        (Some(k2), pow_rat(p, k2) / red.x.get(3, 3))
    } else {
        (None, rat(1))
    };
    let unit_fix = MatQ::diag(&[y1.recip(), y2.recip(), y1, y2]);
    red.apply_right(&unit_fix);
    let label = match k2 {
        Some(k2) => StratumLabel::rank2(k1, k2),
        None => StratumLabel::rank1(k1),
    };
    Ok((label, Reduction { left: red.left, right: red.right, diagonal: red.x }))
}

/// True when every entry has nonnegative p-adic valuation.
pub fn is_p_integral(m: &MatQ, p: u64) -> bool {
    m.entries().iter().all(|e| val(e, p).map_or(true, |v| v >= 0))
}
