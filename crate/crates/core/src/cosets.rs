//! Right-coset representatives of symplectic double cosets, degrees, the
//! counting function `R(p^l)`, and the GSp(2n) root datum behind the degree
//! exponent.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::IntMat;
use crate::normal_forms::{hnf2, DivisorType};
use crate::number::{factorize, pow_u64, Rational};
use crate::symplectic::Similitude;

pub type M2 = [[i64; 2]; 2];

fn mul2(x: &M2, y: &M2) -> M2 {
    let mut z = [[0i64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            z[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    z
}

fn transpose2(x: &M2) -> M2 {
    [[x[0][0], x[1][0]], [x[0][1], x[1][1]]]
}

fn det2(x: &M2) -> i64 {
    x[0][0] * x[1][1] - x[0][1] * x[1][0]
}

fn adj2(x: &M2) -> M2 {
    [[x[1][1], -x[0][1]], [-x[1][0], x[0][0]]]
}

fn to_intmat(x: &M2) -> IntMat {
    IntMat::square_i64(&[x[0][0], x[0][1], x[1][0], x[1][1]])
}

fn from_intmat(x: &IntMat) -> M2 {
    let v = x.to_i64().expect("2x2 block fits in i64");
    [[v[0], v[1]], [v[2], v[3]]]
}

/// Canonical right-coset representative `(A B; 0 D)` with `A = λ·D⁻ᵗ`,
/// `D` in Hermite form and `B` reduced modulo `{S·D : S symmetric}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BlockUpperRep {
    pub d: M2,
    pub b: M2,
    pub a: M2,
    pub lambda: u64,
}

impl BlockUpperRep {
    /// Row-major 4x4 integer entries.
    pub fn matrix(&self) -> [i64; 16] {
        let (a, b, d) = (&self.a, &self.b, &self.d);
        [
            a[0][0], a[0][1], b[0][0], b[0][1], //
            a[1][0], a[1][1], b[1][0], b[1][1], //
            0, 0, d[0][0], d[0][1], //
            0, 0, d[1][0], d[1][1],
        ]
    }

    pub fn to_similitude(&self) -> Similitude {
        Similitude::from_i64(&self.matrix()).expect("coset representative is a similitude")
    }

    /// Brings an integral block-upper-triangular similitude with positive
    /// multiplier to canonical form within its right coset `Γ·M`.
    pub fn canonicalize(m: &Similitude) -> Result<Self> {
        let x = m.mat().to_i64().ok_or(Error::NonIntegral)?;
        if x[8..10] != [0, 0] || x[12..14] != [0, 0] {
            return Err(Error::InvalidArgument("lower-left block must vanish".into()));
        }
        let lambda = m.lambda().to_integer().to_u64().filter(|&l| l > 0 && m.lambda().is_integer());
        let lambda = lambda.ok_or_else(|| Error::InvalidArgument("multiplier must be a positive integer".into()))?;
        let a = [[x[0], x[1]], [x[4], x[5]]];
        let b = [[x[2], x[3]], [x[6], x[7]]];
        let d = [[x[10], x[11]], [x[14], x[15]]];
        Ok(Self::from_blocks(&a, &b, &d, lambda))
    }

    fn from_blocks(a: &M2, b: &M2, d: &M2, lambda: u64) -> Self {
        let (u, h) = hnf2(&to_intmat(d)).expect("D is nonsingular for λ > 0");
        let u = from_intmat(&u);
        let du = det2(&u);
        // U⁻ᵗ = adj(U)ᵗ / det U
        let uinv_t = transpose2(&adj2(&u)).map(|r| r.map(|v| v * du));
        let h = from_intmat(&h);
        let a = mul2(&uinv_t, a);
        let b = canonical_b(&mul2(&uinv_t, b), &h);
        BlockUpperRep { d: h, b, a, lambda }
    }

    /// Checks `A = λ·D⁻ᵗ`, `BᵗD = DᵗB` and the Hermite/reduction conventions.
    pub fn is_canonical(&self) -> bool {
        let l = self.lambda as i64;
        let a_dt = mul2(&transpose2(&self.a), &self.d);
        let btd = mul2(&transpose2(&self.b), &self.d);
        let d = &self.d;
        a_dt == [[l, 0], [0, l]]
            && btd[0][1] == btd[1][0]
            && d[1][0] == 0
            && d[0][0] > 0
            && d[1][1] > 0
            && (0..d[1][1]).contains(&d[0][1])
            && canonical_b(&self.b, d) == self.b
    }
}

impl fmt::Display for BlockUpperRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.matrix())
    }
}

/// Reduces `B` modulo `{S·H : S ∈ Sym₂(ℤ)}` for `H` in Hermite form: the
/// symmetric matrix `δ·B·H⁻¹ = B·adj(H)` is reduced entrywise into `[0, δ)`.
pub fn canonical_b(b: &M2, h: &M2) -> M2 {
    let delta = det2(h);
    debug_assert!(delta > 0);
    let t = mul2(b, &adj2(h)).map(|r| r.map(|v| v.rem_euclid(delta)));
    mul2(&t, h).map(|r| {
        r.map(|v| {
            debug_assert_eq!(v % delta, 0);
            v / delta
        })
    })
}

/// Hermite matrices `(a b; 0 c)` with `0 ≤ b < c` whose largest elementary
/// divisor divides `lambda`: one per class of `GL₂(ℤ)\{D : λ·D⁻¹ integral}`.
pub fn hnf_d_matrices(lambda: u64) -> Vec<M2> {
    let divisors: Vec<u64> = (1..=lambda).filter(|d| lambda % d == 0).collect();
    let mut out = Vec::new();
    for &a in &divisors {
        for &c in &divisors {
            for b in 0..c {
                let g = a.gcd(&b).gcd(&c);
                let d2 = a * c / g;
                if lambda % d2 == 0 {
                    out.push([[a as i64, b as i64], [0, c as i64]]);
                }
            }
        }
    }
    out.sort();
    out
}

pub fn d_representatives(p: u64, l: u32) -> Vec<M2> {
    hnf_d_matrices(pow_u64(p, l))
}

/// Elementary divisors `(d1, d2)` of a nonsingular 2x2 integer matrix.
pub fn elm2(d: &M2) -> (u64, u64) {
    let g = d.iter().flatten().fold(0i64, |acc, &v| acc.gcd(&v)) as u64;
    let det = det2(d).unsigned_abs();
    (g, det / g)
}

/// Complete set of `B` with `BᵗH = HᵗB`, modulo `B ~ B + S·H`, for `H` in
/// Hermite form; `|·| = d1²·d2`.
fn b_reps_hnf(h: &M2) -> Vec<M2> {
    let (a, b, c) = (h[0][0], h[0][1], h[1][1]);
    let delta = a * c;
    let mut out = Vec::new();
    for u in 0..a {
        for v in 0..a {
            if (v * b + u * c) % a != 0 {
                continue;
            }
            let (t1, t2) = (c * v, c * u);
            let start = (-u * b).rem_euclid(a);
            let mut t3 = start;
            while t3 < delta {
                let t = [[t1, t2], [t2, t3]];
                out.push(mul2(&t, h).map(|r| r.map(|x| x / delta)));
                t3 += a;
            }
        }
    }
    out.sort();
    out
}

/// Representatives of `B(D)` modulo `B ~ B + S·D` for any nonsingular `D`.
pub fn b_representatives(d: &IntMat) -> Result<Vec<M2>> {
    let (u, h) = hnf2(d)?;
    let u = from_intmat(&u);
    let h = from_intmat(&h);
    // H = U·D, so B ↦ Uᵗ·B carries B(H) onto B(D)
    let ut = transpose2(&u);
    let mut out: Vec<M2> = b_reps_hnf(&h).iter().map(|b| mul2(&ut, b)).collect();
    out.sort();
    Ok(out)
}

/// Every right coset of `Γ₂` in the integral similitudes with multiplier
/// `lambda`, enumerated directly (any `lambda ≥ 1`).
pub fn all_right_coset_reps(lambda: u64) -> Vec<BlockUpperRep> {
    let l = lambda as i64;
    let mut out: Vec<BlockUpperRep> = hnf_d_matrices(lambda)
        .par_iter()
        .flat_map_iter(|d| {
            let delta = det2(d);
            // A = λ·D⁻ᵗ = λ·adj(D)ᵗ / δ
            let a = transpose2(&adj2(d)).map(|r| r.map(|v| v * l / delta));
            b_reps_hnf(d).into_iter().map(move |b| BlockUpperRep { d: *d, b, a, lambda })
        })
        .collect();
    out.sort();
    out
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    if a == 0 {
        return b as i64;
    }
    if b == 0 {
        return a as i64;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return (a << shift) as i64;
        }
    }
}

/// Divisor type of an integral 4x4 similitude from the gcds of its entries
/// and of its 2x2 minors.
pub fn divisor_type_fast(m: &[i64; 16], lambda: u64) -> Result<DivisorType> {
    if lambda > 1 << 31 {
        return Err(Error::Overflow("multiplier too large for the fast classifier"));
    }
    let g1 = m.iter().fold(0i64, |acc, &v| gcd_i64(acc, v));
    let mut g2 = 0i64;
    'outer: for r0 in 0..4 {
        for r1 in r0 + 1..4 {
            for c0 in 0..4 {
                for c1 in c0 + 1..4 {
                    let x = |r: usize, c: usize| m[r * 4 + c];
                    g2 = gcd_i64(g2, x(r0, c0) * x(r1, c1) - x(r0, c1) * x(r1, c0));
                    if g2 == g1 * g1 {
                        break 'outer;
                    }
                }
            }
        }
    }
    if g1 == 0 || g2 == 0 {
        return Err(Error::Singular);
    }
    let a1 = g1 as u64;
    let a2 = (g2 / g1) as u64;
    if lambda % a1 != 0 || lambda % a2 != 0 {
        return Err(Error::InvalidArgument("multiplier inconsistent with matrix".into()));
    }
    DivisorType::new(a1, a2, lambda / a2, lambda / a1)
}

type DegreeTable = Arc<BTreeMap<DivisorType, u64>>;

fn degree_cache() -> &'static Mutex<HashMap<u64, DegreeTable>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, DegreeTable>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Number of right cosets of each double coset with multiplier `lambda`,
/// counted without storing representatives; cached per multiplier.
pub fn degree_table(lambda: u64) -> DegreeTable {
    if let Some(hit) = degree_cache().lock().expect("cache lock").get(&lambda) {
        return hit.clone();
    }
    let l = lambda as i64;
    let table = hnf_d_matrices(lambda)
        .par_iter()
        .fold(BTreeMap::new, |mut acc: BTreeMap<DivisorType, u64>, d| {
            let delta = det2(d);
            let a = transpose2(&adj2(d)).map(|r| r.map(|v| v * l / delta));
            for b in b_reps_hnf(d) {
                let rep = BlockUpperRep { d: *d, b, a, lambda };
                let t = divisor_type_fast(&rep.matrix(), lambda).expect("representative is nonsingular");
                *acc.entry(t).or_insert(0) += 1;
            }
            acc
        })
        .reduce(BTreeMap::new, |mut x, y| {
            for (t, c) in y {
                *x.entry(t).or_insert(0) += c;
            }
            x
        });
    let table = Arc::new(table);
    degree_cache().lock().expect("cache lock").insert(lambda, table.clone());
    table
}

type Classified = Arc<Vec<(DivisorType, BlockUpperRep)>>;

fn cache() -> &'static Mutex<HashMap<u64, Classified>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Classified>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// All right cosets of multiplier `lambda` tagged with their double coset;
/// computed once per multiplier and cached.
pub fn classified_reps(lambda: u64) -> Classified {
    if let Some(hit) = cache().lock().expect("cache lock").get(&lambda) {
        return hit.clone();
    }
    let reps = all_right_coset_reps(lambda);
    let tagged: Vec<(DivisorType, BlockUpperRep)> = reps
        .into_par_iter()
        .map(|r| (divisor_type_fast(&r.matrix(), lambda).expect("representative is nonsingular"), r))
        .collect();
    let tagged = Arc::new(tagged);
    cache().lock().expect("cache lock").insert(lambda, tagged.clone());
    tagged
}

fn reps_prime_power(t: &DivisorType) -> Vec<BlockUpperRep> {
    classified_reps(t.multiplier()).iter().filter(|(ty, _)| ty == t).map(|(_, r)| r.clone()).collect()
}

/// Splits a type into its prime-power components.
pub fn local_components(t: &DivisorType) -> Vec<(u64, DivisorType)> {
    let part = |x: u64, p: u64| {
        let mut y = 1;
        let mut x = x;
        while x % p == 0 {
            x /= p;
            y *= p;
        }
        y
    };
    factorize(t.multiplier())
        .into_iter()
        .map(|(p, _)| {
            let c = DivisorType::new(part(t.a1, p), part(t.a2, p), part(t.d2, p), part(t.d1, p))
                .expect("local part of a valid type is valid");
            (p, c)
        })
        .collect()
}

/// Right-coset representatives of the double coset with the given type.
/// Prime-power multipliers are enumerated directly; composite ones are
/// assembled prime by prime with [`combine_reps`].
pub fn right_coset_reps(t: &DivisorType) -> Result<Vec<BlockUpperRep>> {
    let t = DivisorType::new(t.a1, t.a2, t.d2, t.d1)?;
    let parts = local_components(&t);
    let mut reps = vec![BlockUpperRep { d: [[1, 0], [0, 1]], b: [[0, 0], [0, 0]], a: [[1, 0], [0, 1]], lambda: 1 }];
    for (_, local) in parts {
        reps = combine_reps(&reps, &reps_prime_power(&local))?;
    }
    Ok(reps)
}

/// Products `Q_i·R_j` of two complete representative lists with coprime
/// multipliers, canonicalized and sorted.
pub fn combine_reps(qs: &[BlockUpperRep], rs: &[BlockUpperRep]) -> Result<Vec<BlockUpperRep>> {
    let (Some(q0), Some(r0)) = (qs.first(), rs.first()) else {
        return Ok(Vec::new());
    };
    if q0.lambda.gcd(&r0.lambda) != 1 {
        return Err(Error::InvalidArgument(format!(
            "multipliers {} and {} are not coprime",
            q0.lambda, r0.lambda
        )));
    }
    let lambda = q0.lambda * r0.lambda;
    let mut out: Vec<BlockUpperRep> = qs
        .par_iter()
        .flat_map_iter(|q| {
            rs.iter().map(move |r| {
                let a = mul2(&q.a, &r.a);
                let b0 = mul2(&q.a, &r.b);
                let b1 = mul2(&q.b, &r.d);
                let b = [[b0[0][0] + b1[0][0], b0[0][1] + b1[0][1]], [b0[1][0] + b1[1][0], b0[1][1] + b1[1][1]]];
                let d = mul2(&q.d, &r.d);
                BlockUpperRep::from_blocks(&a, &b, &d, lambda)
            })
        })
        .collect();
    out.sort();
    Ok(out)
}

/// Degree of a double coset, multiplied out over its prime-power parts.
pub fn degree(t: &DivisorType) -> Result<u64> {
    let t = DivisorType::new(t.a1, t.a2, t.d2, t.d1)?;
    let mut deg = 1u64;
    for (p, local) in local_components(&t) {
        // multiplier p is a single double coset, so its degree is R(p)
        let d = if local.multiplier() == p {
            (1 + p) * (1 + p * p)
        } else {
            degree_table(local.multiplier()).get(&local).copied().unwrap_or(0)
        };
        deg = deg.checked_mul(d).ok_or(Error::Overflow("degree"))?;
    }
    Ok(deg)
}

/// `R(p^l)`: number of right cosets of multiplier `p^l`, by enumeration.
pub fn r_count(p: u64, l: u32) -> u64 {
    DivisorType::all_for_prime_power(p, l)
        .iter()
        .map(|t| degree(t).expect("enumerated type is valid"))
        .sum()
}

/// Closed form `(1 − p^{2l}(p+p²+p³) + p^{3l}(p²+p⁴)) / ((1−p)²(1+p+p²))`.
pub fn r_closed(p: u64, l: u32) -> BigInt {
    let p = BigInt::from(p);
    let pw = |e: u32| num_traits::pow(p.clone(), e as usize);
    let num = BigInt::from(1) - pw(2 * l) * (&p + pw(2) + pw(3)) + pw(3 * l) * (pw(2) + pw(4));
    let one_minus = BigInt::from(1) - &p;
    let den = &one_minus * &one_minus * (BigInt::from(1) + &p + pw(2));
    let q = Rational::new(num, den);
    assert!(q.is_integer(), "closed form is integral");
    q.to_integer()
}

/// Degree of `Γ₁·diag(p^{l1}, p^{l2})·Γ₁` in terms of `k = l2 − l1`:
/// `p^{k−1}(1+p)` for `k ≥ 1`, and 1 for `k = 0`.
pub fn deg_gamma1(p: u64, k: u32) -> u64 {
    if k == 0 {
        1
    } else {
        pow_u64(p, k - 1) * (1 + p)
    }
}

/// `R(p^l)` as the sum over `D`-types `diag(p^i, p^{i+k})` of
/// `deg_Γ₁ · |B(D)|` with `|B(D)| = p^{3i+k}`.
pub fn r_by_summation(p: u64, l: u32) -> u64 {
    let mut total = 0;
    for i in 0..=l {
        for k in 0..=l - i {
            total += deg_gamma1(p, k) * pow_u64(p, 3 * i + k);
        }
    }
    total
}

/// `E = Σ_{i=0}^{n−1} 2(n−i)k_{n−i} − n(n+1)l/2` for `⌊l/2⌋ ≤ k₁ ≤ … ≤ k_n ≤ l`.
pub fn degree_leading_exponent(ks: &[u32], l: u32) -> Result<i64> {
    let n = ks.len();
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one exponent".into()));
    }
    if ks.windows(2).any(|w| w[0] > w[1]) || ks[0] < l / 2 || ks[n - 1] > l {
        return Err(Error::InvalidArgument(format!("exponents {ks:?} out of order for l = {l}")));
    }
    let lead: i64 = (0..n).map(|i| 2 * (n - i) as i64 * ks[n - 1 - i] as i64).sum();
    Ok(lead - (n * (n + 1) / 2) as i64 * l as i64)
}

/// The reordered exponents `(k1, k2)` of a prime-power type:
/// `p^(e1, e2, l−e2, l−e1)` becomes `(l − e2, l − e1)`.
pub fn leading_exponents(t: &DivisorType, p: u64) -> Result<([u32; 2], u32)> {
    let (e1, e2, l) = t.exponents(p).ok_or_else(|| Error::InvalidArgument(format!("{t} is not a power of {p}")))?;
    Ok(([l - e2, l - e1], l))
}

/// The explicit representative families for `g1`, `g2`, `g3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Lemma12 {
    G1,
    G2,
    G3,
}

impl FromStr for Lemma12 {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "g1" => Ok(Lemma12::G1),
            "g2" => Ok(Lemma12::G2),
            "g3" => Ok(Lemma12::G3),
            _ => Err(Error::Parse(format!("expected g1, g2 or g3, got {s:?}"))),
        }
    }
}

impl Lemma12 {
    pub fn divisor_type(&self, p: u64) -> DivisorType {
        match self {
            Lemma12::G1 => DivisorType::new(1, 1, p, p),
            Lemma12::G2 => DivisorType::new(p, p, p, p),
            Lemma12::G3 => DivisorType::new(1, p, p, p * p),
        }
        .expect("fixed types are valid")
    }
}

/// The tabulated representative families. Parameters run over `[0, p)` or
/// `[0, p²)`; in the fourth `g3` family the entry `r7` equals `r4`, and the
/// last family runs over symmetric matrices of rank one mod `p`.
pub fn lemma12_reps(p: u64, which: Lemma12) -> Vec<[i64; 16]> {
    let p = p as i64;
    let mut out = Vec::new();
    match which {
        Lemma12::G1 => {
            out.push([p, 0, 0, 0, 0, p, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1]);
            for k1 in 0..p {
                out.push([p, 0, 0, 0, 0, 1, 0, k1, 0, 0, 1, 0, 0, 0, 0, p]);
            }
            for k2 in 0..p {
                for k3 in 0..p {
                    out.push([1, -k2, k3, 0, 0, p, 0, 0, 0, 0, p, 0, 0, 0, k2, 1]);
                }
            }
            for k4 in 0..p {
                for k5 in 0..p {
                    for k6 in 0..p {
                        out.push([1, 0, k4, k5, 0, 1, k5, k6, 0, 0, p, 0, 0, 0, 0, p]);
                    }
                }
            }
        }
        Lemma12::G2 => out.push([p, 0, 0, 0, 0, p, 0, 0, 0, 0, p, 0, 0, 0, 0, p]),
        Lemma12::G3 => {
            let p2 = p * p;
            out.push([p2, 0, 0, 0, 0, p, 0, 0, 0, 0, 1, 0, 0, 0, 0, p]);
            for r1 in 0..p {
                out.push([p, -p * r1, 0, 0, 0, p2, 0, 0, 0, 0, p, 0, 0, 0, r1, 1]);
            }
            for r2 in 0..p {
                for r3 in 0..p2 {
                    out.push([p, 0, 0, p * r2, 0, 1, r2, r3, 0, 0, p, 0, 0, 0, 0, p2]);
                }
            }
            for r4 in 0..p {
                for r5 in 0..p {
                    for r6 in 0..p2 {
                        let r7 = r4;
                        out.push([1, -r4, r5 * r4 + r6, r5, 0, p, p * r5, 0, 0, 0, p2, 0, 0, 0, p * r7, p]);
                    }
                }
            }
            for r8 in 0..p {
                for r9 in 0..p {
                    for r10 in 0..p {
                        if rank_mod_p(&[[r8, r9], [r9, r10]], p) == 1 {
                            out.push([p, 0, r8, r9, 0, p, r9, r10, 0, 0, p, 0, 0, 0, 0, p]);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Rank over `ℤ/p` of a 2x2 integer matrix.
pub fn rank_mod_p(m: &M2, p: i64) -> usize {
    if m.iter().flatten().all(|v| v.rem_euclid(p) == 0) {
        0
    } else if det2(m).rem_euclid(p) == 0 {
        1
    } else {
        2
    }
}

/// Rank over `ℤ/p` of an integer matrix given row-major.
pub fn rank_mod_p_4(m: &[i64; 16], p: u64) -> usize {
    let p = p as i64;
    let mut a: Vec<i64> = m.iter().map(|v| v.rem_euclid(p)).collect();
    let inv = |x: i64| (1..p).find(|y| (x * y) % p == 1).expect("nonzero residue is invertible mod prime");
    let mut rank = 0;
    for c in 0..4 {
        let Some(r) = (rank..4).find(|&r| a[r * 4 + c] != 0) else { continue };
        for k in 0..4 {
            a.swap(rank * 4 + k, r * 4 + k);
        }
        let iv = inv(a[rank * 4 + c]);
        for row in 0..4 {
            if row != rank && a[row * 4 + c] != 0 {
                let f = (a[row * 4 + c] * iv) % p;
                for k in 0..4 {
                    a[row * 4 + k] = (a[row * 4 + k] - f * a[rank * 4 + k]).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Root datum of GSp(2n) in the bases `e₀…e_n`, `f₀…f_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootDatum {
    pub n: usize,
    pub simple_roots: Vec<Vec<i64>>,
    pub simple_coroots: Vec<Vec<i64>>,
    pub cartan: Vec<Vec<i64>>,
    pub positive_roots: Vec<Vec<i64>>,
    pub two_rho: Vec<i64>,
}

fn basis(n: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; n + 1];
    v[i] = 1;
    v
}

fn lin(terms: &[(i64, &Vec<i64>)]) -> Vec<i64> {
    let len = terms[0].1.len();
    (0..len).map(|k| terms.iter().map(|(c, v)| c * v[k]).sum()).collect()
}

fn pairing(x: &[i64], y: &[i64]) -> i64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn root_datum(n: usize) -> Result<RootDatum> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let e = |i: usize| basis(n, i);
    let mut simple_roots = Vec::new();
    let mut simple_coroots = Vec::new();
    // α_k = e_{n−k+1} − e_{n−k} for k < n, α_n = 2e₁ − e₀
    for k in 1..n {
        simple_roots.push(lin(&[(1, &e(n - k + 1)), (-1, &e(n - k))]));
        simple_coroots.push(lin(&[(1, &e(n - k + 1)), (-1, &e(n - k))]));
    }
    simple_roots.push(lin(&[(2, &e(1)), (-1, &e(0))]));
    simple_coroots.push(e(1));
    let cartan = simple_roots
        .iter()
        .map(|a| simple_coroots.iter().map(|c| pairing(a, c)).collect())
        .collect();
    let mut positive_roots = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            positive_roots.push(lin(&[(1, &e(j)), (-1, &e(i))]));
        }
    }
    for i in 1..=n {
        for j in i + 1..=n {
            positive_roots.push(lin(&[(1, &e(j)), (1, &e(i)), (-1, &e(0))]));
        }
    }
    for i in 1..=n {
        positive_roots.push(lin(&[(2, &e(i)), (-1, &e(0))]));
    }
    let two_rho = (0..=n).map(|k| positive_roots.iter().map(|r| r[k]).sum()).collect();
    Ok(RootDatum { n, simple_roots, simple_coroots, cartan, positive_roots, two_rho })
}

/// `2ρ = 2·Σ_{i=0}^{n−1}(n−i)e_{n−i} − n(n+1)/2·e₀`.
pub fn two_rho(n: usize) -> Vec<i64> {
    let mut v = vec![0i64; n + 1];
    for i in 0..n {
        v[n - i] = 2 * (n - i) as i64;
    }
    v[0] = -((n * (n + 1) / 2) as i64);
    v
}

/// The tridiagonal Cartan matrix with the `−2` in the last row.
pub fn cartan_reference(n: usize) -> Vec<Vec<i64>> {
    let mut c = vec![vec![0i64; n]; n];
    for i in 0..n {
        c[i][i] = 2;
        if i + 1 < n {
            c[i][i + 1] = -1;
            c[i + 1][i] = if i + 1 == n - 1 { -2 } else { -1 };
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_b_count(h: &M2) -> usize {
        // all symmetric T = t/δ with t ∈ [0,δ)³ and T·H integral
        let delta = det2(h);
        let mut n = 0;
        for t1 in 0..delta {
            for t2 in 0..delta {
                for t3 in 0..delta {
                    let b = mul2(&[[t1, t2], [t2, t3]], h);
                    if b.iter().flatten().all(|v| v % delta == 0) {
                        n += 1;
                    }
                }
            }
        }
        n
    }

    #[test]
    fn b_counts_match_brute_force() {
        for lambda in [2u64, 3, 4, 6, 8, 9] {
            for h in hnf_d_matrices(lambda) {
                let (d1, d2) = elm2(&h);
                let reps = b_reps_hnf(&h);
                assert_eq!(reps.len() as u64, d1 * d1 * d2, "H = {h:?}");
                assert_eq!(reps.len(), brute_force_b_count(&h), "H = {h:?}");
                for b in &reps {
                    assert_eq!(canonical_b(b, &h), *b);
                }
            }
        }
    }

    #[test]
    fn d_representatives_small() {
        let ds = d_representatives(2, 1);
        assert_eq!(ds.len(), 5);
        let mut elms: Vec<(u64, u64)> = ds.iter().map(elm2).collect();
        elms.sort();
        elms.dedup();
        assert_eq!(elms, vec![(1, 1), (1, 2), (2, 2)]);
    }

    #[test]
    fn r_values() {
        assert_eq!(r_closed(2, 1), BigInt::from(15));
        assert_eq!(r_closed(2, 2), BigInt::from(151));
        assert_eq!(r_closed(3, 1), BigInt::from(40));
        assert_eq!(r_closed(3, 2), BigInt::from(1201));
        assert_eq!(r_closed(2, 0), BigInt::from(1));
        for (p, l) in [(2, 1), (2, 2), (3, 1), (3, 2), (5, 2)] {
            assert_eq!(BigInt::from(r_by_summation(p, l)), r_closed(p, l));
            assert_eq!(all_right_coset_reps(pow_u64(p, l)).len() as u64, r_by_summation(p, l));
        }
    }

    #[test]
    fn degrees() {
        for p in [2u64, 3] {
            assert_eq!(degree(&Lemma12::G1.divisor_type(p)).unwrap(), (1 + p) * (1 + p * p));
            assert_eq!(degree(&Lemma12::G2.divisor_type(p)).unwrap(), 1);
            assert_eq!(degree(&Lemma12::G3.divisor_type(p)).unwrap(), p + p * p + p.pow(3) + p.pow(4));
        }
        assert_eq!(degree(&DivisorType::new(1, 1, 4, 4).unwrap()).unwrap(), 120);
    }

    #[test]
    fn explicit_tables_match_enumeration() {
        for p in [2u64, 3] {
            for which in [Lemma12::G1, Lemma12::G2, Lemma12::G3] {
                let t = which.divisor_type(p);
                let mut table: Vec<BlockUpperRep> = lemma12_reps(p, which)
                    .iter()
                    .map(|m| BlockUpperRep::canonicalize(&Similitude::from_i64(m).unwrap()).unwrap())
                    .collect();
                table.sort();
                let before = table.len();
                table.dedup();
                assert_eq!(before, table.len(), "{which:?} table has coset duplicates at p = {p}");
                assert_eq!(table, right_coset_reps(&t).unwrap(), "{which:?} at p = {p}");
            }
        }
    }

    #[test]
    fn canonical_reps() {
        for r in all_right_coset_reps(12) {
            assert!(r.is_canonical(), "{r}");
            assert_eq!(BlockUpperRep::canonicalize(&r.to_similitude()).unwrap(), r);
        }
    }

    #[test]
    fn exponents() {
        assert_eq!(degree_leading_exponent(&[1, 1], 1).unwrap(), 3);
        assert_eq!(degree_leading_exponent(&[1, 2], 2).unwrap(), 4);
        assert_eq!(degree_leading_exponent(&[2, 2], 2).unwrap(), 6);
        assert!(degree_leading_exponent(&[2, 1], 2).is_err());
        let t = Lemma12::G3.divisor_type(2);
        assert_eq!(leading_exponents(&t, 2).unwrap(), ([1, 2], 2));
    }

    #[test]
    fn root_data() {
        let rd = root_datum(2).unwrap();
        assert_eq!(rd.simple_roots, vec![vec![0, -1, 1], vec![-1, 2, 0]]);
        assert_eq!(rd.two_rho, vec![-3, 2, 4]);
        for n in 1..=5 {
            let rd = root_datum(n).unwrap();
            assert_eq!(rd.cartan, cartan_reference(n), "n = {n}");
            assert_eq!(rd.two_rho, two_rho(n));
            assert!((0..n).all(|i| rd.cartan[i][i] == 2));
        }
    }
}
