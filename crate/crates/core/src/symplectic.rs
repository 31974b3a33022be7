//! Similitude groups GSp(2) and GSp(4) over the rationals.
//!
//! Coordinates of a 4x4 matrix are indexed 0..4 and the symplectic form is
//! `Ω = (0 1; -1 0)` in 2x2 blocks, so coordinate `i` pairs with `i + 2`.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::MatQ;
use crate::number::{rat, Rational};

/// The standard symplectic form of size `2h`.
pub fn omega(h: usize) -> MatQ {
    let n = 2 * h;
    let mut m = MatQ::zeros(n);
    for i in 0..h {
        m.set(i, i + h, Rational::one());
        m.set(i + h, i, -Rational::one());
    }
    m
}

/// Returns λ with `Mᵗ Ω M = λ Ω`, or `None` when no scalar works.
/// λ = 0 is allowed, so this also decides membership in MSp.
pub fn multiplier(m: &MatQ) -> Option<Rational> {
    let n = m.dim();
    if n == 0 || n % 2 != 0 {
        return None;
    }
    let h = n / 2;
    let om = omega(h);
    let form = &(&m.transpose() * &om) * m;
    let lambda = form.get(0, h).clone();
    (form == om.scale(&lambda)).then_some(lambda)
}

/// A matrix together with its multiplier.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Similitude {
    mat: MatQ,
    lambda: Rational,
}

impl Similitude {
    pub fn new(mat: MatQ) -> Result<Self> {
        let lambda = multiplier(&mat).ok_or(Error::NotSimilitude)?;
        Ok(Similitude { mat, lambda })
    }

    pub fn from_i64(entries: &[i64]) -> Result<Self> {
        Self::new(MatQ::from_i64(entries))
    }

    pub fn identity(n: usize) -> Self {
        Similitude { mat: MatQ::identity(n), lambda: Rational::one() }
    }

    /// `s · 1` with multiplier `s²`.
    pub fn scalar(n: usize, s: Rational) -> Self {
        Similitude { lambda: &s * &s, mat: MatQ::scalar(n, s) }
    }

    pub fn mat(&self) -> &MatQ {
        &self.mat
    }

    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    pub fn into_mat(self) -> MatQ {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn is_integral(&self) -> bool {
        self.mat.is_integral()
    }

    pub fn mul(&self, rhs: &Similitude) -> Similitude {
        Similitude { mat: &self.mat * &rhs.mat, lambda: &self.lambda * &rhs.lambda }
    }

    pub fn scale(&self, s: &Rational) -> Similitude {
        Similitude { mat: self.mat.scale(s), lambda: &self.lambda * s * s }
    }

    /// `λ⁻¹ (Dᵗ -Bᵗ; -Cᵗ Aᵗ)`.
    pub fn inverse(&self) -> Result<Similitude> {
        symplectic_inverse(self)
    }
}

pub fn symplectic_inverse(g: &Similitude) -> Result<Similitude> {
    if g.lambda.is_zero() {
        return Err(Error::ZeroMultiplier);
    }
    let m = &g.mat;
    let (a, b, c, d) = (m.block(0, 0), m.block(0, 1), m.block(1, 0), m.block(1, 1));
    let adj = MatQ::from_blocks(&d.transpose(), &-&b.transpose(), &-&c.transpose(), &a.transpose());
    let inv_lambda = g.lambda.recip();
    Ok(Similitude { mat: adj.scale(&inv_lambda), lambda: inv_lambda })
}

/// Checks `AᵗC = CᵗA, BᵗD = DᵗB, AᵗD − CᵗB = λ` (from `MᵗΩM = λΩ`) and
/// `ABᵗ = BAᵗ, CDᵗ = DCᵗ, ADᵗ − BCᵗ = λ` (from `MΩMᵗ = λΩ`).
pub fn block_identities_hold(g: &Similitude) -> bool {
    let m = g.mat();
    let (a, b, c, d) = (m.block(0, 0), m.block(0, 1), m.block(1, 0), m.block(1, 1));
    let (at, bt, ct, dt) = (a.transpose(), b.transpose(), c.transpose(), d.transpose());
    let lam = MatQ::scalar(a.dim(), g.lambda().clone());
    &at * &c == &ct * &a
        && &bt * &d == &dt * &b
        && &(&at * &d) - &(&ct * &b) == lam
        && &a * &bt == &b * &at
        && &c * &dt == &d * &ct
        && &(&a * &dt) - &(&b * &ct) == lam
}

/// Interleaves two 2x2 similitudes with the same multiplier into a 4x4 one;
/// the first factor occupies coordinates (0, 2), the second (1, 3).
pub fn odot(m1: &MatQ, m2: &MatQ) -> Result<Similitude> {
    if m1.dim() != 2 || m2.dim() != 2 {
        return Err(Error::Dimension("odot expects 2x2 factors".into()));
    }
    let (q1, q2) = (m1.det(), m2.det());
    if q1 != q2 {
        return Err(Error::MultiplierMismatch(q1.to_string(), q2.to_string()));
    }
    let mut m = MatQ::zeros(4);
    for (f, off) in [(m1, 0usize), (m2, 1usize)] {
        m.set(off, off, f.get(0, 0).clone());
        m.set(off, off + 2, f.get(0, 1).clone());
        m.set(off + 2, off, f.get(1, 0).clone());
        m.set(off + 2, off + 2, f.get(1, 1).clone());
    }
    Ok(Similitude { mat: m, lambda: q1 })
}

/// One of the generator families of Sp(2n), or Ω itself (`family == 0`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub family: u8,
    pub i: usize,
    pub j: usize,
    pub alpha: i64,
    pub mat: MatQ,
}

fn unit_e(h: usize, i: usize, j: usize, v: i64) -> MatQ {
    let mut m = MatQ::zeros(h);
    m.set(i, j, rat(v));
    m
}

/// Generator families of Sp(2n) for n ∈ {1, 2}, indices 1-based in `i`, `j`.
///
/// With `modulus = None` every α is 1; with `Some(N)` α runs over 1..N.
/// Family 1: `(1 αE_ii; 0 1)`, 2: `(1 0; αE_ii 1)`, 3: `(1 α(E_ij+E_ji); 0 1)`,
/// 4: `(1 0; α(E_ij+E_ji) 1)`, 5: `(1+αE_ij 0; 0 1−αE_ji)`; families 3 and 4
/// use `i < j`, family 5 uses `i ≠ j`. Ω is appended last.
pub fn generators(n: usize, modulus: Option<u64>) -> Result<Vec<Generator>> {
    if !(1..=2).contains(&n) {
        return Err(Error::InvalidArgument(format!("generators defined for n ∈ {{1,2}}, got {n}")));
    }
    let alphas: Vec<i64> = match modulus {
        None => vec![1],
        Some(m) if m >= 2 => (1..m as i64).collect(),
        Some(m) => return Err(Error::InvalidArgument(format!("modulus must be ≥ 2, got {m}"))),
    };
    let id = MatQ::identity(n);
    let zero = MatQ::zeros(n);
    let mut out = Vec::new();
    for &alpha in &alphas {
        for i in 0..n {
            let e = unit_e(n, i, i, alpha);
            out.push(Generator { family: 1, i: i + 1, j: i + 1, alpha, mat: MatQ::from_blocks(&id, &e, &zero, &id) });
            out.push(Generator { family: 2, i: i + 1, j: i + 1, alpha, mat: MatQ::from_blocks(&id, &zero, &e, &id) });
        }
        for i in 0..n {
            for j in i + 1..n {
                let s = &unit_e(n, i, j, alpha) + &unit_e(n, j, i, alpha);
                out.push(Generator { family: 3, i: i + 1, j: j + 1, alpha, mat: MatQ::from_blocks(&id, &s, &zero, &id) });
                out.push(Generator { family: 4, i: i + 1, j: j + 1, alpha, mat: MatQ::from_blocks(&id, &zero, &s, &id) });
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let a = &id + &unit_e(n, i, j, alpha);
                let d = &id - &unit_e(n, j, i, alpha);
                out.push(Generator { family: 5, i: i + 1, j: j + 1, alpha, mat: MatQ::from_blocks(&a, &zero, &zero, &d) });
            }
        }
    }
    out.sort_by_key(|g| (g.family, g.i, g.j, g.alpha));
    out.push(Generator { family: 0, i: 0, j: 0, alpha: 0, mat: omega(n) });
    Ok(out)
}

/// `diag(1,1,p,p)`, `diag(p,p,p,p)`, `diag(1,p,p²,p)`.
pub fn g1(p: u64) -> Similitude {
    let p = p as i64;
    Similitude::from_i64(&diag4(1, 1, p, p)).expect("g1 is a similitude")
}

pub fn g2(p: u64) -> Similitude {
    let p = p as i64;
    Similitude::from_i64(&diag4(p, p, p, p)).expect("g2 is a similitude")
}

pub fn g3(p: u64) -> Similitude {
    let p = p as i64;
    Similitude::from_i64(&diag4(1, p, p * p, p)).expect("g3 is a similitude")
}

fn diag4(a: i64, b: i64, c: i64, d: i64) -> [i64; 16] {
    [a, 0, 0, 0, 0, b, 0, 0, 0, 0, c, 0, 0, 0, 0, d]
}

/// Embeds a 2x2 matrix on the coordinate pair `(i, i + 2)` of a 4x4 identity.
pub fn pair_embed(i: usize, m: [[i64; 2]; 2]) -> MatQ {
    let mut e = MatQ::identity(4);
    e.set(i, i, rat(m[0][0]));
    e.set(i, i + 2, rat(m[0][1]));
    e.set(i + 2, i, rat(m[1][0]));
    e.set(i + 2, i + 2, rat(m[1][1]));
    e
}

/// `diag(U, U⁻ᵗ)` for a 2x2 unimodular `U`.
pub fn levi(u: &MatQ) -> Result<MatQ> {
    let uinv_t = u.inverse()?.transpose();
    Ok(MatQ::from_blocks(u, &MatQ::zeros(2), &MatQ::zeros(2), &uinv_t))
}

/// `(1 S; 0 1)` for symmetric `S`.
pub fn shear_upper(s: &MatQ) -> MatQ {
    MatQ::from_blocks(&MatQ::identity(2), s, &MatQ::zeros(2), &MatQ::identity(2))
}

/// `(1 0; S 1)` for symmetric `S`.
pub fn shear_lower(s: &MatQ) -> MatQ {
    MatQ::from_blocks(&MatQ::identity(2), &MatQ::zeros(2), s, &MatQ::identity(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::ratio;

    #[test]
    fn multiplier_examples() {
        assert_eq!(multiplier(&omega(2)), Some(rat(1)));
        assert_eq!(multiplier(&g3(5).mat().clone()), Some(rat(25)));
        assert_eq!(multiplier(&MatQ::diag_i64(&[1, 1, 1, 2])), None);
        // λ = 0 members of MSp
        assert_eq!(multiplier(&MatQ::diag_i64(&[0, 0, 1, 1])), Some(rat(0)));
    }

    #[test]
    fn inverse_examples() {
        let inv = symplectic_inverse(&g1(3)).unwrap();
        assert_eq!(inv.mat(), &MatQ::diag(&[rat(1), rat(1), ratio(1, 3), ratio(1, 3)]));
        assert_eq!(inv.lambda(), &ratio(1, 3));
        let om = Similitude::new(omega(2)).unwrap();
        assert_eq!(symplectic_inverse(&om).unwrap().mat(), &-&omega(2));
        let rep = Similitude::from_i64(&[2, 0, 0, 0, 0, 1, 0, 1, 0, 0, 1, 0, 0, 0, 0, 2]).unwrap();
        let h = symplectic_inverse(&rep).unwrap();
        assert!(rep.mul(&h).mat().is_identity());
        assert!(symplectic_inverse(&Similitude::new(MatQ::diag_i64(&[0, 0, 1, 1])).unwrap()).is_err());
    }

    #[test]
    fn odot_examples() {
        let id = MatQ::identity(2);
        assert!(odot(&id, &id).unwrap().mat().is_identity());
        let p1 = MatQ::from_i64(&[0, 0, 0, 2]);
        let p2 = MatQ::from_i64(&[0, 0, 0, 4]);
        let p = odot(&p1, &p2).unwrap();
        assert_eq!(p.mat(), &MatQ::diag_i64(&[0, 0, 2, 4]));
        assert_eq!(p.lambda(), &rat(0));
        assert!(odot(&MatQ::from_i64(&[1, 0, 0, 2]), &id).is_err());
    }

    #[test]
    fn generator_families() {
        let gens = generators(2, None).unwrap();
        // 2 + 2 + 1 + 1 + 2 families plus Ω
        assert_eq!(gens.len(), 9);
        let first = gens.iter().find(|g| g.family == 1 && g.i == 1).unwrap();
        let mut expected = MatQ::identity(4);
        expected.set(0, 2, rat(1));
        assert_eq!(first.mat, expected);
        for g in &gens {
            assert_eq!(multiplier(&g.mat), Some(rat(1)), "{g:?}");
        }
        assert_eq!(generators(1, Some(3)).unwrap().len(), 5);
        assert!(generators(3, None).is_err());
    }

    #[test]
    fn generators_are_block_consistent() {
        for g in generators(2, Some(4)).unwrap() {
            assert!(block_identities_hold(&Similitude::new(g.mat).unwrap()));
        }
    }
}
