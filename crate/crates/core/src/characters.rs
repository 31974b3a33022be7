//! Dirichlet characters with exact root-of-unity values, L-series with tail
//! bounds, CRT lifting, and the ergodicity bound for nontrivial characters.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::number::{factorize, is_prime};

/// Generators of `(ℤ/m)^×` with their orders; the group is their direct
/// product.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitGroup {
    pub modulus: u64,
    pub generators: Vec<u64>,
    pub orders: Vec<u64>,
}

impl UnitGroup {
    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    /// Exponents of `n` on the generators, or `None` when `gcd(n, m) > 1`.
    pub fn discrete_log(&self, n: u64) -> Option<Vec<u64>> {
        let m = self.modulus;
        if m == 1 {
            return Some(Vec::new());
        }
        let n = n % m;
        if n.gcd(&m) != 1 {
            return None;
        }
        // walk the product of cyclic factors (small moduli only)
        let mut exps = vec![0u64; self.generators.len()];
        loop {
            let v = self
                .generators
                .iter()
                .zip(&exps)
                .fold(1u64, |acc, (&g, &e)| mul_mod(acc, pow_mod(g, e, m), m));
            if v == n {
                return Some(exps);
            }
            let mut i = 0;
            loop {
                if i == exps.len() {
                    return None;
                }
                exps[i] += 1;
                if exps[i] < self.orders[i] {
                    break;
                }
                exps[i] = 0;
                i += 1;
            }
        }
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

fn multiplicative_order(g: u64, m: u64) -> u64 {
    let mut k = 1;
    let mut x = g % m;
    while x != 1 {
        x = mul_mod(x, g, m);
        k += 1;
    }
    k
}

fn primitive_root(p: u64, e: u32) -> u64 {
    let pe = p.pow(e);
    let phi = pe / p * (p - 1);
    (2..pe).find(|&g| g % p != 0 && multiplicative_order(g, pe) == phi).expect("odd prime powers have primitive roots")
}

/// Generators of `(ℤ/m)^×`, one per cyclic factor of each prime-power part,
/// lifted by CRT (identity at the other primes).
pub fn unit_group_structure(m: u64) -> Result<UnitGroup> {
    if m < 1 {
        return Err(Error::InvalidArgument("modulus must be positive".into()));
    }
    let mut generators = Vec::new();
    let mut orders = Vec::new();
    for (p, e) in factorize(m) {
        let pe = p.pow(e);
        let local: Vec<(u64, u64)> = if p == 2 {
            match e {
                1 => vec![],
                2 => vec![(3, 2)],
                _ => vec![(pe - 1, 2), (3, pe / 4)],
            }
        } else {
            vec![(primitive_root(p, e), pe / p * (p - 1))]
        };
        for (g, ord) in local {
            let lifted = crt_lift(&[(g, pe), (1, m / pe)])?;
            generators.push(lifted % m);
            orders.push(ord);
        }
    }
    Ok(UnitGroup { modulus: m, generators, orders })
}

/// A Dirichlet character given by exponents `k_i`, meaning
/// `χ(g_i) = exp(2πi·k_i/ord_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirichletChar {
    pub group: UnitGroup,
    pub exponents: Vec<u64>,
}

impl DirichletChar {
    pub fn new(group: UnitGroup, exponents: Vec<u64>) -> Result<Self> {
        if exponents.len() != group.generators.len() {
            return Err(Error::Dimension(format!(
                "{} exponents for {} generators",
                exponents.len(),
                group.generators.len()
            )));
        }
        let exponents = exponents.iter().zip(&group.orders).map(|(k, o)| k % o).collect();
        Ok(DirichletChar { group, exponents })
    }

    pub fn principal(m: u64) -> Result<Self> {
        let group = unit_group_structure(m)?;
        let exponents = vec![0; group.generators.len()];
        Ok(DirichletChar { group, exponents })
    }

    /// All `φ(m)` characters modulo `m`.
    pub fn all(m: u64) -> Result<Vec<Self>> {
        let group = unit_group_structure(m)?;
        let mut out = vec![Vec::new()];
        for &o in &group.orders {
            out = out.into_iter().flat_map(|v: Vec<u64>| (0..o).map(move |k| [v.clone(), vec![k]].concat())).collect();
        }
        Ok(out.into_iter().map(|exponents| DirichletChar { group: group.clone(), exponents }).collect())
    }

    pub fn modulus(&self) -> u64 {
        self.group.modulus
    }

    pub fn is_principal(&self) -> bool {
        self.exponents.iter().all(|&k| k == 0)
    }

    /// `χ(n) = exp(2πi·t)` with `t ∈ [0, 1)` returned exactly, or `None`
    /// when `gcd(n, m) > 1`.
    pub fn phase(&self, n: u64) -> Option<Ratio<u64>> {
        let log = self.group.discrete_log(n)?;
        let mut t = Ratio::zero();
        for ((l, k), o) in log.iter().zip(&self.exponents).zip(&self.group.orders) {
            t += Ratio::new(l * k % o, *o);
        }
        while t >= Ratio::one() {
            t -= Ratio::one();
        }
        Some(t)
    }

    pub fn value(&self, n: u64) -> Complex64 {
        match self.phase(n) {
            Some(t) => Complex64::from_polar(1.0, 2.0 * PI * (*t.numer() as f64) / (*t.denom() as f64)),
            None => Complex64::zero(),
        }
    }

    /// Values on one period `0..m`.
    pub fn table(&self) -> Vec<Complex64> {
        let m = self.modulus();
        let mut out = vec![Complex64::zero(); m as usize];
        let ord = self.group.order();
        // enumerate the group once instead of taking discrete logs
        let mut exps = vec![0u64; self.group.generators.len()];
        for _ in 0..ord {
            let n = self
                .group
                .generators
                .iter()
                .zip(&exps)
                .fold(1 % m, |acc, (&g, &e)| mul_mod(acc, pow_mod(g, e, m), m));
            let t: f64 = exps
                .iter()
                .zip(&self.exponents)
                .zip(&self.group.orders)
                .map(|((l, k), o)| ((l * k) % o) as f64 / *o as f64)
                .sum();
            out[n as usize] = Complex64::from_polar(1.0, 2.0 * PI * t);
            for i in 0..exps.len() {
                exps[i] += 1;
                if exps[i] < self.group.orders[i] {
                    break;
                }
                exps[i] = 0;
            }
        }
        out
    }

    /// Order of the character as an element of the dual group.
    pub fn order(&self) -> u64 {
        self.exponents
            .iter()
            .zip(&self.group.orders)
            .fold(1u64, |acc, (k, o)| acc.lcm(&(o / o.gcd(k))))
    }
}

impl fmt::Display for DirichletChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chi mod {} [", self.modulus())?;
        for (i, (k, o)) in self.exponents.iter().zip(&self.group.orders).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k}/{o}")?;
        }
        write!(f, "]")
    }
}

/// Product of characters of pairwise coprime prime-power moduli, as a
/// character modulo the product of the moduli.
pub fn char_from_local(locals: &[DirichletChar]) -> Result<DirichletChar> {
    if locals.is_empty() {
        return Err(Error::InvalidArgument("need at least one local character".into()));
    }
    let mut m = 1u64;
    for c in locals {
        let q = c.modulus();
        if factorize(q).len() > 1 {
            return Err(Error::InvalidArgument(format!("{q} is not a prime power")));
        }
        if m.gcd(&q) != 1 {
            return Err(Error::InvalidArgument(format!("modulus {q} is not coprime to the others")));
        }
        m = m.checked_mul(q).ok_or(Error::Overflow("modulus"))?;
    }
    let group = unit_group_structure(m)?;
    let mut exponents = Vec::with_capacity(group.generators.len());
    for (&g, &o) in group.generators.iter().zip(&group.orders) {
        let mut t = Ratio::<u64>::zero();
        for c in locals {
            t += c.phase(g).expect("generator is a unit");
        }
        // χ(g)^o = 1, so o·t is an integer
        let k = (t * Ratio::from_integer(o)).to_integer() % o;
        exponents.push(k);
    }
    Ok(DirichletChar { group, exponents })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Level {
    pub level: u32,
    /// Set for the principal character, whose level is reported as 1.
    pub principal: bool,
}

/// Smallest `k′` such that the character of `(ℤ/p^k)^×` is trivial on
/// `1 + p^{k′}ℤ`.
pub fn local_level(chi: &DirichletChar) -> Result<Level> {
    let q = chi.modulus();
    let f = factorize(q);
    if f.len() != 1 {
        return Err(Error::InvalidArgument(format!("{q} is not a prime power")));
    }
    let (p, k) = f[0];
    if chi.is_principal() {
        return Ok(Level { level: 1, principal: true });
    }
    for level in 1..=k {
        let step = p.pow(level);
        let trivial = (0..q / step).all(|j| {
            let n = 1 + j * step;
            chi.phase(n).map_or(true, |t| t.is_zero())
        });
        if trivial {
            return Ok(Level { level, principal: false });
        }
    }
    Ok(Level { level: k, principal: false })
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

/// Solution `0 ≤ n < Π q_k` of `n ≡ a_k (mod q_k)` for pairwise coprime
/// moduli and residues prime to their moduli.
pub fn crt_lift(system: &[(u64, u64)]) -> Result<u64> {
    let mut n: i128 = 0;
    let mut m: i128 = 1;
    for &(a, q) in system {
        if q == 0 {
            return Err(Error::InvalidArgument("modulus must be positive".into()));
        }
        if a.gcd(&q) != 1 && q != 1 {
            return Err(Error::InvalidArgument(format!("residue {a} shares a factor with {q}")));
        }
        let q = q as i128;
        let (g, x, _) = ext_gcd(m, q);
        if g != 1 {
            return Err(Error::InvalidArgument(format!("modulus {q} is not coprime to {m}")));
        }
        // n + m·t ≡ a (mod q) with t = (a − n)·m⁻¹
        let t = ((a as i128 - n) * x).rem_euclid(q);
        n += m * t;
        m *= q;
        if m > u64::MAX as i128 {
            return Err(Error::Overflow("CRT modulus"));
        }
        n = n.rem_euclid(m);
    }
    Ok(n as u64)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LValue {
    pub re: f64,
    pub im: f64,
    pub terms: u64,
    pub tail_bound: f64,
}

impl LValue {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

const BLOCK: u64 = 1 << 14;

/// `L(s, χ) = Σ χ(n) n^{−s}` summed to `n ≤ terms`. For `s > 1` the tail is
/// bounded by comparison with an integral; for nontrivial `χ` and
/// `0 < s ≤ 1` by partial summation, `|tail| ≤ 2H(N+1)^{−s}` with `H` the
/// largest partial character sum.
pub fn l_function(chi: &DirichletChar, s: f64, terms: u64) -> Result<LValue> {
    if terms == 0 {
        return Err(Error::InvalidArgument("need at least one term".into()));
    }
    let principal = chi.is_principal();
    if principal && !(s > 1.0) {
        return Err(Error::Divergent(format!("L-series of a principal character diverges at s = {s}")));
    }
    if !(s > 0.0) {
        return Err(Error::InvalidArgument(format!("s = {s} outside the supported region s > 0")));
    }
    let m = chi.modulus();
    let table = chi.table();
    let blocks = terms.div_ceil(BLOCK);
    let partials: Vec<Complex64> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let lo = b * BLOCK + 1;
            let hi = ((b + 1) * BLOCK).min(terms);
            (lo..=hi).map(|n| table[(n % m) as usize] * (n as f64).powf(-s)).sum()
        })
        .collect();
    let sum: Complex64 = partials.iter().sum();
    let nf = terms as f64;
    let tail_bound = if principal {
        nf.powf(1.0 - s) / (s - 1.0)
    } else {
        let mut acc = Complex64::zero();
        let mut h: f64 = 0.0;
        for v in &table {
            acc += v;
            h = h.max(acc.norm());
        }
        2.0 * h * (nf + 1.0).powf(-s)
    };
    Ok(LValue { re: sum.re, im: sum.im, terms, tail_bound })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundReport {
    pub beta: f64,
    pub primes: Vec<u64>,
    /// `|L(β−3)L(β−2)L(β−1)| / (ζ_F(β−3)ζ_F(β−2)ζ_F(β−1))`.
    pub final_bound: f64,
    pub numerator: f64,
    pub denominator: f64,
    /// The same quotient with the L-series restricted to `ℕ(F)`.
    pub restricted: f64,
    /// `restricted · Π_{p∈F} |1 + χ(p)p^{1−β}| / (1 + p^{1−β})`.
    pub intermediate: f64,
}

/// Majorant for the norm of the projected character function, for a
/// nontrivial character and `3 < β ≤ 4`.
pub fn theorem58_bound(chi: &DirichletChar, beta: f64, primes: &[u64], terms: u64) -> Result<BoundReport> {
    if chi.is_principal() {
        return Err(Error::InvalidArgument("the bound needs a nontrivial character".into()));
    }
    if !(beta > 3.0 && beta <= 4.0) {
        return Err(Error::InvalidArgument(format!("β = {beta} outside (3, 4]")));
    }
    let m = chi.modulus();
    for &p in primes {
        if !is_prime(p) {
            return Err(Error::InvalidArgument(format!("{p} is not prime")));
        }
        if m % p == 0 {
            return Err(Error::InvalidArgument(format!("prime {p} divides the modulus {m}")));
        }
    }
    let mut numerator = 1.0;
    for k in 1..=3 {
        numerator *= l_function(chi, beta - 4.0 + k as f64, terms)?.value().norm();
    }
    let mut denominator = 1.0;
    let mut restricted = Complex64::new(1.0, 0.0);
    let mut extra = 1.0;
    for &p in primes {
        let pf = p as f64;
        let c = chi.value(p);
        for e in [3.0, 2.0, 1.0] {
            let x = pf.powf(e - beta);
            denominator /= 1.0 - x;
            restricted *= (1.0 - x) / (Complex64::new(1.0, 0.0) - c * x);
        }
        let y = pf.powf(1.0 - beta);
        extra *= (Complex64::new(1.0, 0.0) + c * y).norm() / (1.0 + y);
    }
    let restricted = restricted.norm();
    Ok(BoundReport {
        beta,
        primes: primes.to_vec(),
        final_bound: numerator / denominator,
        numerator,
        denominator,
        restricted,
        intermediate: restricted * extra,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::primes_up_to;

    #[test]
    fn unit_groups() {
        assert_eq!(unit_group_structure(4).unwrap().generators, vec![3]);
        let g8 = unit_group_structure(8).unwrap();
        assert_eq!((g8.generators, g8.orders), (vec![7, 3], vec![2, 2]));
        let g5 = unit_group_structure(5).unwrap();
        assert_eq!((g5.generators, g5.orders), (vec![2], vec![4]));
        for m in 2..200 {
            let g = unit_group_structure(m).unwrap();
            let phi = (1..m).filter(|n| n.gcd(&m) == 1).count() as u64;
            assert_eq!(g.order(), phi, "m = {m}");
        }
    }

    #[test]
    fn products_and_levels() {
        let chi4 = DirichletChar::new(unit_group_structure(4).unwrap(), vec![1]).unwrap();
        let chi3 = DirichletChar::new(unit_group_structure(3).unwrap(), vec![1]).unwrap();
        let chi12 = char_from_local(&[chi4.clone(), chi3]).unwrap();
        assert_eq!(chi12.modulus(), 12);
        assert!((chi12.value(5) - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!((chi4.value(3) - Complex64::new(-1.0, 0.0)).norm() < 1e-12);

        // χ₄ presented modulo 8 is trivial on 5
        let g8 = unit_group_structure(8).unwrap();
        let lifted = DirichletChar::all(8).unwrap().into_iter().find(|c| c.value(5).re > 0.5 && c.value(3).re < -0.5);
        assert_eq!(local_level(&lifted.unwrap()).unwrap().level, 2);
        assert_eq!(local_level(&DirichletChar::principal(8).unwrap()).unwrap(), Level { level: 1, principal: true });
        let faithful = DirichletChar::new(unit_group_structure(16).unwrap(), vec![0, 1]).unwrap();
        assert_eq!(local_level(&faithful).unwrap().level, 4);
        assert_eq!(g8.order(), 4);
    }

    #[test]
    fn crt() {
        assert_eq!(crt_lift(&[(1, 4), (2, 3)]).unwrap(), 5);
        assert_eq!(crt_lift(&[(3, 4), (1, 3), (2, 5)]).unwrap(), 7);
        assert_eq!(crt_lift(&[(5, 9)]).unwrap(), 5);
        assert!(crt_lift(&[(1, 4), (1, 6)]).is_err());
        assert!(crt_lift(&[(2, 4)]).is_err());
    }

    #[test]
    fn l_values() {
        let zeta = l_function(&DirichletChar::principal(1).unwrap(), 2.0, 100_000).unwrap();
        assert!((zeta.re - PI * PI / 6.0).abs() <= zeta.tail_bound);
        let chi4 = DirichletChar::new(unit_group_structure(4).unwrap(), vec![1]).unwrap();
        let catalan = l_function(&chi4, 2.0, 10_000).unwrap();
        assert!((catalan.re - 0.915_965_594_177_219).abs() <= catalan.tail_bound);
        let leibniz = l_function(&chi4, 1.0, 1_000_000).unwrap();
        assert!((leibniz.re - PI / 4.0).abs() <= leibniz.tail_bound);
        assert!(l_function(&DirichletChar::principal(4).unwrap(), 1.0, 10).is_err());
    }

    #[test]
    fn bound_monotone() {
        let chi4 = DirichletChar::new(unit_group_structure(4).unwrap(), vec![1]).unwrap();
        let b3 = theorem58_bound(&chi4, 4.0, &[3], 100_000).unwrap();
        let big: Vec<u64> = primes_up_to(100).into_iter().filter(|&p| p > 4).collect();
        let bb = theorem58_bound(&chi4, 4.0, &big, 100_000).unwrap();
        assert!(bb.final_bound < b3.final_bound);
        assert!(b3.intermediate <= b3.restricted);
        let empty = theorem58_bound(&chi4, 4.0, &[], 100_000).unwrap();
        assert_eq!(empty.denominator, 1.0);
        assert!(theorem58_bound(&chi4, 4.0, &[2], 10).is_err());
    }
}
