//! Local and global partition functions, Gibbs weights, the KMS phase map
//! and the Siegel fundamental-domain volume.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cosets::{degree, r_closed};
use crate::error::{Error, Result};
use crate::normal_forms::DivisorType;
use crate::number::{factorize, format_rational, is_prime, pow_rat, primes_up_to, rational_to_f64, Rational};

/// Bernoulli numbers `B_2, B_4, …, B_20`.
const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// `ζ(s)` for real `s > 1` by Euler–Maclaurin with `n` direct terms and
/// `order` Bernoulli corrections (`order ≤ 10`).
pub fn riemann_zeta_em(s: f64, n: usize, order: usize) -> Result<f64> {
    if !(s > 1.0) {
        return Err(Error::InvalidArgument(format!("zeta needs s > 1, got {s}")));
    }
    if n == 0 || order > BERNOULLI_EVEN.len() {
        return Err(Error::InvalidArgument("need n ≥ 1 and order ≤ 10".into()));
    }
    let nf = n as f64;
    let mut sum: f64 = (1..n).map(|k| (k as f64).powf(-s)).sum();
    sum += nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s);
    // B_{2k}/(2k)! · s(s+1)…(s+2k−2) · N^{−s−2k+1}
    let mut rising = s;
    let mut fact = 2.0;
    for k in 1..=order {
        let term = BERNOULLI_EVEN[k - 1] / fact * rising * nf.powf(-s - (2 * k) as f64 + 1.0);
        sum += term;
        let kk = (2 * k) as f64;
        rising *= (s + kk - 1.0) * (s + kk);
        fact *= (kk + 1.0) * (kk + 2.0);
    }
    Ok(sum)
}

pub fn riemann_zeta(s: f64) -> Result<f64> {
    riemann_zeta_em(s, 20, 10)
}

/// Exact value or float approximation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Value {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    pub approx: f64,
}

impl Value {
    fn exact(q: &Rational) -> Self {
        Value { exact: Some(format_rational(q)), approx: rational_to_f64(q) }
    }

    fn float(x: f64) -> Self {
        Value { exact: None, approx: x }
    }
}

fn divergence_diagnostic(beta: f64) -> Error {
    let vanishing = [(3.0, "1 − p^{3−β}"), (2.0, "1 − p^{2−β}"), (1.0, "1 − p^{1−β}"), (0.0, "1 − p^{−β}")]
        .iter()
        .find(|(b, _)| *b == beta)
        .map(|(_, f)| format!("factor {f} vanishes at β = {beta}"));
    Error::Divergent(vanishing.unwrap_or_else(|| format!("p^{{3−β}} ≥ 1 at β = {beta}; the local series diverges")))
}

/// Closed form at an integer `β > 3`, exactly.
pub fn local_zeta_closed_exact(p: u64, beta: i64) -> Result<Rational> {
    check_prime(p)?;
    if beta <= 3 {
        return Err(divergence_diagnostic(beta as f64));
    }
    let x = |e: i64| pow_rat(p, e);
    let one = Rational::one();
    let num = &one - x(2 - 2 * beta);
    let den = (&one - x(3 - beta)) * (&one - x(2 - beta)) * (&one - x(1 - beta)) * (&one - x(-beta));
    Ok(num / den)
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{p} is not prime")))
    }
}

/// Closed form at real `β > 3`.
pub fn local_zeta_closed_f64(p: u64, beta: f64) -> Result<f64> {
    check_prime(p)?;
    if !(beta > 3.0) {
        return Err(divergence_diagnostic(beta));
    }
    let pf = p as f64;
    let f = |e: f64| 1.0 - pf.powf(e);
    Ok(f(2.0 - 2.0 * beta) / (f(3.0 - beta) * f(2.0 - beta) * f(1.0 - beta) * f(-beta)))
}

/// Closed form, exact when `β` is an integer.
pub fn local_zeta_closed(p: u64, beta: &Rational) -> Result<Value> {
    if beta.is_integer() {
        let b = beta.to_integer().to_i64().ok_or(Error::Overflow("β"))?;
        return Ok(Value::exact(&local_zeta_closed_exact(p, b)?));
    }
    Ok(Value::float(local_zeta_closed_f64(p, rational_to_f64(beta))?))
}

/// Partial sums of `Σ_l R(p^l)·p^{−βl}` with a geometric tail bound.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeriesResult {
    pub value: f64,
    pub partial_sums: Vec<f64>,
    pub tail_bound: f64,
    pub diverging: bool,
}

pub fn local_zeta_series(p: u64, beta: f64, lmax: u32) -> Result<SeriesResult> {
    check_prime(p)?;
    if lmax < 1 {
        return Err(Error::InvalidArgument("lmax must be at least 1".into()));
    }
    let pf = p as f64;
    let mut partial_sums = Vec::with_capacity(lmax as usize + 1);
    let mut acc = 0.0;
    for l in 0..=lmax {
        let r = r_closed(p, l).to_f64().unwrap_or(f64::INFINITY);
        acc += r * pf.powf(-beta * l as f64);
        partial_sums.push(acc);
    }
    let q = pf.powf(3.0 - beta);
    let diverging = q >= 1.0;
    // R(p^l) ≤ C·p^{3l} with C = (1 + p² + p⁴) / ((p−1)²(1+p+p²))
    let c = (1.0 + pf.powi(2) + pf.powi(4)) / ((pf - 1.0).powi(2) * (1.0 + pf + pf * pf));
    let tail_bound = if diverging { f64::INFINITY } else { c * q.powi(lmax as i32 + 1) / (1.0 - q) };
    Ok(SeriesResult { value: acc, partial_sums, tail_bound, diverging })
}

/// Exact partial sum `Σ_{l ≤ lmax} R(p^l)·p^{−βl}` at integer `β`.
pub fn local_zeta_series_exact(p: u64, beta: i64, lmax: u32) -> Rational {
    (0..=lmax).map(|l| Rational::from_integer(r_closed(p, l)) * pow_rat(p, -beta * l as i64)).sum()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PartitionResult {
    pub beta: f64,
    pub prime_bound: u64,
    pub euler_product: f64,
    pub zeta_quotient: f64,
    pub relative_gap: f64,
}

/// `ζ(β)ζ(β−1)ζ(β−2)ζ(β−3)/ζ(2β−2)`.
pub fn zeta_quotient(beta: f64) -> Result<f64> {
    if !(beta > 4.0) {
        return Err(Error::Divergent(format!("ζ(β−3) has a pole or diverges at β = {beta} ≤ 4")));
    }
    Ok(riemann_zeta(beta)? * riemann_zeta(beta - 1.0)? * riemann_zeta(beta - 2.0)? * riemann_zeta(beta - 3.0)?
        / riemann_zeta(2.0 * beta - 2.0)?)
}

/// Truncated Euler product over primes `≤ prime_bound`.
pub fn euler_product(beta: f64, prime_bound: u64) -> Result<f64> {
    let factors: Vec<f64> =
        primes_up_to(prime_bound).par_iter().map(|&p| local_zeta_closed_f64(p, beta)).collect::<Result<_>>()?;
    Ok(factors.iter().product())
}

pub fn global_partition(beta: f64, prime_bound: u64) -> Result<PartitionResult> {
    if !(beta > 4.0) {
        return Err(Error::Divergent(format!("global partition function needs β > 4, got {beta}")));
    }
    if prime_bound < 2 {
        return Err(Error::InvalidArgument("prime bound must be at least 2".into()));
    }
    let euler_product = euler_product(beta, prime_bound)?;
    let zeta_quotient = zeta_quotient(beta)?;
    Ok(PartitionResult {
        beta,
        prime_bound,
        euler_product,
        zeta_quotient,
        relative_gap: (zeta_quotient - euler_product).abs() / zeta_quotient,
    })
}

/// `1 / ζ_p(β)`, the mass of the invertible locus at `p`.
pub fn measure_of_yp(beta: &Rational, p: u64) -> Result<Value> {
    let b = rational_to_f64(beta);
    if !(b > 3.0) {
        return Err(Error::Divergent(format!(
            "no KMS state for 0 < β < 3 ({}): the local zeta function diverges, so the measure of Y_p would vanish",
            format_rational(beta)
        )));
    }
    let z = local_zeta_closed(p, beta)?;
    Ok(match z.exact {
        Some(_) => {
            let b = beta.to_integer().to_i64().ok_or(Error::Overflow("β"))?;
            Value::exact(&local_zeta_closed_exact(p, b)?.recip())
        }
        None => Value::float(1.0 / z.approx),
    })
}

/// All types with multiplier exactly `lambda`, with their degrees.
pub fn types_with_degree(lambda: u64) -> Result<Vec<(DivisorType, u64)>> {
    let mut acc: Vec<(DivisorType, u64)> = vec![(DivisorType::identity(), 1)];
    for (p, l) in factorize(lambda) {
        let mut next = Vec::new();
        for local in DivisorType::all_for_prime_power(p, l) {
            let d = degree(&local)?;
            for (t, deg) in &acc {
                next.push((t.combine(&local)?, deg * d));
            }
        }
        acc = next;
    }
    acc.sort();
    Ok(acc)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GibbsResult {
    pub beta: f64,
    pub lambda_bound: u64,
    pub normalization: f64,
    pub weights: Vec<(DivisorType, f64)>,
    pub partial_mass: f64,
    pub tail_mass: f64,
}

/// Weights `deg(t)·λ(t)^{−β}/Z` of all double-coset types with multiplier
/// `≤ lambda_bound`.
pub fn gibbs_weights(beta: f64, lambda_bound: u64) -> Result<GibbsResult> {
    if !(beta > 4.0) {
        return Err(Error::Divergent(format!("Gibbs states need β > 4, got {beta}")));
    }
    if lambda_bound < 1 {
        return Err(Error::InvalidArgument("lambda bound must be at least 1".into()));
    }
    let z = zeta_quotient(beta)?;
    let per_lambda: Vec<Vec<(DivisorType, u64)>> =
        (1..=lambda_bound).map(types_with_degree).collect::<Result<_>>()?;
    let mut weights = Vec::new();
    for (lambda, types) in (1..=lambda_bound).zip(per_lambda) {
        for (t, deg) in types {
            weights.push((t, deg as f64 * (lambda as f64).powf(-beta) / z));
        }
    }
    let partial_mass: f64 = weights.iter().map(|(_, w)| w).sum();
    Ok(GibbsResult { beta, lambda_bound, normalization: z, weights, partial_mass, tail_mass: 1.0 - partial_mass })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "witness")]
pub enum PhaseVerdict {
    NoKMS { prime: u64, partial_sums: Vec<f64> },
    Unresolved { note: String },
    Unique { local_zeta_p2: f64, euler_partials: Vec<(u64, f64)> },
    GibbsFamily { normalization: f64 },
}

impl PhaseVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            PhaseVerdict::NoKMS { .. } => "NoKMS",
            PhaseVerdict::Unresolved { .. } => "Unresolved",
            PhaseVerdict::Unique { .. } => "Unique",
            PhaseVerdict::GibbsFamily { .. } => "GibbsFamily",
        }
    }
}

/// Phase of the system at inverse temperature `β`, with a witness.
pub fn kms_phase(beta: &Rational) -> Result<PhaseVerdict> {
    if *beta <= Rational::zero() {
        return Err(Error::InvalidArgument("β must be positive".into()));
    }
    let three = Rational::from_integer(BigInt::from(3));
    let four = Rational::from_integer(BigInt::from(4));
    let b = rational_to_f64(beta);
    if beta.is_integer() && *beta <= three {
        let note = if *beta == Rational::from_integer(BigInt::from(2)) {
            "β = 2: an explicit invariant measure can be written down, but whether it yields a KMS state is not settled"
        } else {
            "conjectured to admit no KMS state; not settled"
        };
        return Ok(PhaseVerdict::Unresolved { note: note.into() });
    }
    if *beta < three {
        let s = local_zeta_series(2, b, 12)?;
        return Ok(PhaseVerdict::NoKMS { prime: 2, partial_sums: s.partial_sums });
    }
    if *beta <= four {
        let local = local_zeta_closed_f64(2, b)?;
        // ζ(β−3) diverges, so the global Euler product grows without bound
        let partials = [10u64, 100, 1000, 10000]
            .iter()
            .map(|&n| {
                let v: f64 = primes_up_to(n).iter().map(|&p| local_zeta_closed_f64(p, b).unwrap_or(f64::NAN)).product();
                (n, v)
            })
            .collect();
        return Ok(PhaseVerdict::Unique { local_zeta_p2: local, euler_partials: partials });
    }
    Ok(PhaseVerdict::GibbsFamily { normalization: zeta_quotient(b)? })
}

/// `2·Π_{i=1}^{n} π^{−i}·Γ(i)·ζ(2i)`.
pub fn siegel_volume(n: u32) -> Result<f64> {
    if !(1..=4).contains(&n) {
        return Err(Error::InvalidArgument(format!("volume implemented for 1 ≤ n ≤ 4, got {n}")));
    }
    let mut v = 2.0;
    for i in 1..=n {
        v *= volume_factor(i)?;
    }
    Ok(v)
}

/// The factor `π^{−i}·Γ(i)·ζ(2i)`.
pub fn volume_factor(i: u32) -> Result<f64> {
    let gamma: f64 = (1..i).map(|k| k as f64).product();
    Ok(PI.powi(-(i as i32)) * gamma * riemann_zeta(2.0 * i as f64)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::{parse_rational, ratio};

    #[test]
    fn zeta_values() {
        assert!((riemann_zeta(2.0).unwrap() - PI * PI / 6.0).abs() < 1e-10);
        assert!((riemann_zeta(4.0).unwrap() - PI.powi(4) / 90.0).abs() < 1e-10);
        assert!((riemann_zeta(8.0).unwrap() - 1.004_077_356_197_944).abs() < 1e-10);
        assert!(riemann_zeta(1.0).is_err());
    }

    #[test]
    fn local_closed_values() {
        assert_eq!(local_zeta_closed_exact(2, 4).unwrap(), ratio(16, 5));
        let z3 = local_zeta_closed_exact(3, 4).unwrap();
        let one = Rational::one();
        let t = |e: i64| &one - pow_rat(3, e);
        assert_eq!(z3, t(-6) / (t(-1) * t(-2) * t(-3) * t(-4)));
        let err = local_zeta_closed_exact(2, 3).unwrap_err();
        assert!(err.to_string().contains("1 − p^{3−β}"));
        assert_eq!(measure_of_yp(&Rational::from_integer(4.into()), 2).unwrap().exact.as_deref(), Some("5/16"));
    }

    #[test]
    fn series() {
        assert_eq!(local_zeta_series_exact(2, 4, 1), ratio(31, 16));
        assert_eq!(local_zeta_series(2, 4.0, 1).unwrap().value, 1.9375);
        let s = local_zeta_series(2, 4.0, 20).unwrap();
        assert!((s.value - 3.2).abs() < 1e-4);
        assert!(local_zeta_series(2, 2.5, 10).unwrap().diverging);
    }

    #[test]
    fn phases() {
        let v = |s: &str| kms_phase(&parse_rational(s).unwrap()).unwrap().name();
        assert_eq!(v("2.5"), "NoKMS");
        assert_eq!(v("3.5"), "Unique");
        assert_eq!(v("4"), "Unique");
        assert_eq!(v("5"), "GibbsFamily");
        assert_eq!(v("1"), "Unresolved");
        assert_eq!(v("3"), "Unresolved");
        assert!(kms_phase(&Rational::zero()).is_err());
    }

    #[test]
    fn volume() {
        assert!((siegel_volume(1).unwrap() - PI / 3.0).abs() < 1e-10);
        let v2 = 2.0 / PI * (PI * PI / 6.0) / (PI * PI) * (PI.powi(4) / 90.0);
        assert!((siegel_volume(2).unwrap() - v2).abs() < 1e-10);
    }

    #[test]
    fn partition_and_gibbs() {
        let r = global_partition(5.0, 10_000).unwrap();
        assert!((r.zeta_quotient - 2.2101).abs() < 1e-4);
        assert!(r.relative_gap < 1e-3);
        assert!(global_partition(4.0, 100).is_err());
        let g = gibbs_weights(5.0, 12).unwrap();
        let w = |t: DivisorType| g.weights.iter().find(|(u, _)| *u == t).unwrap().1;
        let id = w(DivisorType::identity());
        assert!((id - 1.0 / r.zeta_quotient).abs() < 1e-12);
        let t3 = w(DivisorType::new(1, 1, 3, 3).unwrap());
        assert!((t3 / id - 40.0 * 3f64.powf(-5.0)).abs() < 1e-12);
        assert!(g.partial_mass < 1.0 && g.tail_mass > 0.0);
    }
}
