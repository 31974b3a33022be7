//! Brute-force cross-checks: closures of finite symplectic groups, degrees
//! as congruence indices, distinctness of coset representatives, and
//! double-coset membership.

use std::collections::HashSet;
use std::hash::Hash;

use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::cosets::rank_mod_p_4;
use crate::error::{Error, Result};
use crate::normal_forms::{divisor_type_of, DivisorType};
use crate::number::{factorize, val_int};
use crate::symplectic::{generators, Similitude};

/// Default memory budget for group enumeration.
pub const DEFAULT_BUDGET: u64 = 4 << 30;

/// Environment variable overriding the memory budget, in bytes or with a
/// `K`, `M`, `G` (binary) suffix.
pub const BUDGET_ENV: &str = "SIEGEL_HECKE_MEMORY_BUDGET";

/// Parses `"4G"`, `"512M"`, `"1048576"` and the `KiB/MiB/GiB` spellings.
pub fn parse_budget(s: &str) -> Result<u64> {
    let t = s.trim();
    let split = t.find(|c: char| !c.is_ascii_digit()).unwrap_or(t.len());
    let (num, unit) = t.split_at(split);
    let n: u64 = num.parse().map_err(|_| Error::Parse(format!("bad memory budget {s:?}")))?;
    let shift = match unit.trim().to_ascii_uppercase().as_str() {
        "" | "B" => 0,
        "K" | "KB" | "KIB" => 10,
        "M" | "MB" | "MIB" => 20,
        "G" | "GB" | "GIB" => 30,
        "T" | "TB" | "TIB" => 40,
        _ => return Err(Error::Parse(format!("bad memory unit in {s:?}"))),
    };
    n.checked_mul(1 << shift).ok_or(Error::Overflow("memory budget"))
}

/// The budget from the environment, or the default.
pub fn budget_from_env() -> Result<u64> {
    match std::env::var(BUDGET_ENV) {
        Ok(s) => parse_budget(&s),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

/// A 4x4 matrix with entries reduced into `[0, N)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModMatrix {
    pub modulus: u32,
    pub entries: [u32; 16],
}

impl ModMatrix {
    pub fn new(entries: &[i64; 16], modulus: u32) -> Result<Self> {
        if modulus < 2 || modulus > 1 << 31 {
            return Err(Error::InvalidArgument(format!("modulus {modulus} outside [2, 2^31]")));
        }
        Ok(ModMatrix { modulus, entries: entries.map(|v| v.rem_euclid(modulus as i64) as u32) })
    }

    pub fn from_similitude(g: &Similitude, modulus: u32) -> Result<Self> {
        let v = g.mat().to_i64().ok_or(Error::NonIntegral)?;
        let arr: [i64; 16] = v.try_into().map_err(|_| Error::Dimension("expected a 4x4 matrix".into()))?;
        Self::new(&arr, modulus)
    }

    pub fn identity(modulus: u32) -> Self {
        let mut e = [0u32; 16];
        for i in 0..4 {
            e[i * 5] = 1;
        }
        ModMatrix { modulus, entries: e }
    }

    pub fn mul(&self, rhs: &ModMatrix) -> ModMatrix {
        let n = self.modulus as u64;
        let mut out = [0u32; 16];
        for i in 0..4 {
            for j in 0..4 {
                let s: u64 = (0..4).map(|k| self.entries[i * 4 + k] as u64 * rhs.entries[k * 4 + j] as u64).sum();
                out[i * 4 + j] = (s % n) as u32;
            }
        }
        ModMatrix { modulus: self.modulus, entries: out }
    }

    /// `MᵗΩM ≡ Ω (mod N)`.
    pub fn is_symplectic(&self) -> bool {
        let n = self.modulus as i64;
        let m = |i: usize, j: usize| self.entries[i * 4 + j] as i64;
        let omega = |i: usize, j: usize| -> i64 {
            if j == i + 2 {
                1
            } else if i == j + 2 {
                -1
            } else {
                0
            }
        };
        (0..4).all(|i| {
            (0..4).all(|j| {
                let mut s = 0i64;
                for k in 0..4 {
                    for l in 0..4 {
                        s += m(k, i) * omega(k, l) * m(l, j);
                    }
                }
                (s - omega(i, j)).rem_euclid(n) == 0
            })
        })
    }

    /// Injective byte encoding: modulus then entries, big-endian.
    pub fn encode(&self) -> Vec<u8> {
        std::iter::once(self.modulus).chain(self.entries).flat_map(|v| v.to_be_bytes()).collect()
    }

    fn bits(modulus: u32) -> u32 {
        32 - (modulus - 1).leading_zeros()
    }
}

/// Packed keys for the BFS store.
trait Key: Copy + Eq + Hash + Ord + Send + Sync {
    fn pack(m: &[u32; 16], bits: u32) -> Self;
    fn unpack(self, bits: u32) -> [u32; 16];
}

macro_rules! impl_key {
    ($t:ty) => {
        impl Key for $t {
            fn pack(m: &[u32; 16], bits: u32) -> Self {
                m.iter().fold(0 as $t, |acc, &v| (acc << bits) | v as $t)
            }
            fn unpack(mut self, bits: u32) -> [u32; 16] {
                let mask: $t = (1 << bits) - 1;
                let mut out = [0u32; 16];
                for slot in out.iter_mut().rev() {
                    *slot = (self & mask) as u32;
                    self >>= bits;
                }
                out
            }
        }
    };
}

impl_key!(u64);
impl_key!(u128);

/// Left multiplication by a sparse generator: `(row, col, value)` triples.
#[derive(Clone, Debug)]
struct SparseGen(Vec<(usize, usize, u64)>);

impl SparseGen {
    fn from(m: &ModMatrix) -> Self {
        let mut t = Vec::new();
        for i in 0..4 {
            for k in 0..4 {
                let v = m.entries[i * 4 + k];
                if v != 0 {
                    t.push((i, k, v as u64));
                }
            }
        }
        SparseGen(t)
    }

    fn apply(&self, x: &[u32; 16], n: u64) -> [u32; 16] {
        let mut acc = [0u64; 16];
        for &(i, k, v) in &self.0 {
            for j in 0..4 {
                acc[i * 4 + j] += v * x[k * 4 + j] as u64;
            }
        }
        acc.map(|s| (s % n) as u32)
    }
}

enum Store {
    Narrow(FxHashSet<u64>),
    Wide(FxHashSet<u128>),
    Product(ProductStore),
}

/// A closure mod a prime power, with elements indexed.
struct Component {
    modulus: u32,
    elements: Vec<ModMatrix>,
    index: FxHashMap<[u32; 16], u32>,
}

/// Subgroup of `Π_c Sp₄(ℤ/q_c)` for a composite modulus, stored as a bitmap
/// over tuples of component indices (CRT identifies it with a subgroup
/// mod `Π q_c`).
struct ProductStore {
    components: Vec<Component>,
    strides: Vec<u64>,
    bits: Vec<u64>,
}

impl ProductStore {
    fn tuple_index(&self, m: &ModMatrix) -> Option<u64> {
        let mut idx = 0;
        for (c, stride) in self.components.iter().zip(&self.strides) {
            let r = m.entries.map(|v| v % c.modulus);
            idx += *c.index.get(&r)? as u64 * stride;
        }
        Some(idx)
    }

    fn contains_index(&self, idx: u64) -> bool {
        self.bits[(idx / 64) as usize] >> (idx % 64) & 1 == 1
    }

    fn set_indices(&self) -> impl Iterator<Item = u64> + '_ {
        self.bits.iter().enumerate().flat_map(|(w, &word)| {
            (0..64).filter(move |b| word >> b & 1 == 1).map(move |b| w as u64 * 64 + b)
        })
    }

    fn element(&self, idx: u64, modulus: u32) -> [u32; 16] {
        let n = modulus as u64;
        let mut out = [0u64; 16];
        for (c, stride) in self.components.iter().zip(&self.strides) {
            let i = (idx / stride) % c.elements.len() as u64;
            let q = c.modulus as u64;
            // CRT idempotent: ≡ 1 mod q, ≡ 0 mod n/q
            let rest = n / q;
            let e = rest * mod_inverse(rest % q, q) % n;
            for (slot, &r) in out.iter_mut().zip(&c.elements[i as usize].entries) {
                *slot = (*slot + r as u64 * e) % n;
            }
        }
        out.map(|v| v as u32)
    }
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    (1..m).find(|x| a * x % m == 1).expect("unit modulo m")
}

/// A finite matrix group enumerated by breadth-first closure.
pub struct Closure {
    pub modulus: u32,
    pub order: u64,
    pub levels: usize,
    store: Store,
}

impl Closure {
    pub fn contains(&self, m: &ModMatrix) -> bool {
        let bits = ModMatrix::bits(self.modulus);
        m.modulus == self.modulus
            && match &self.store {
                Store::Narrow(s) => s.contains(&u64::pack(&m.entries, bits)),
                Store::Wide(s) => s.contains(&u128::pack(&m.entries, bits)),
                Store::Product(p) => p.tuple_index(m).is_some_and(|i| p.contains_index(i)),
            }
    }

    /// Elements in ascending packed order.
    pub fn elements(&self) -> Vec<ModMatrix> {
        let bits = ModMatrix::bits(self.modulus);
        let wrap = |entries| ModMatrix { modulus: self.modulus, entries };
        match &self.store {
            Store::Narrow(s) => {
                let mut v: Vec<u64> = s.iter().copied().collect();
                v.sort_unstable();
                v.into_iter().map(|k| wrap(k.unpack(bits))).collect()
            }
            Store::Wide(s) => {
                let mut v: Vec<u128> = s.iter().copied().collect();
                v.sort_unstable();
                v.into_iter().map(|k| wrap(k.unpack(bits))).collect()
            }
            Store::Product(p) => {
                let mut v: Vec<ModMatrix> = p.set_indices().map(|i| wrap(p.element(i, self.modulus))).collect();
                v.sort_unstable_by_key(|m| u128::pack(&m.entries, bits));
                v
            }
        }
    }

    /// Number of elements satisfying `pred`, in parallel.
    pub fn count_where<F: Fn(&[u32; 16]) -> bool + Sync>(&self, pred: F) -> u64 {
        let bits = ModMatrix::bits(self.modulus);
        match &self.store {
            Store::Narrow(s) => s.par_iter().filter(|k| pred(&k.unpack(bits))).count() as u64,
            Store::Wide(s) => s.par_iter().filter(|k| pred(&k.unpack(bits))).count() as u64,
            Store::Product(p) => p.set_indices().filter(|&i| pred(&p.element(i, self.modulus))).count() as u64,
        }
    }
}

/// `|Sp₄(ℤ/N)| = Π_{p^e ∥ N} p^{10(e−1)}·p⁴(p²−1)(p⁴−1)`.
pub fn sp4_order(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .map(|(p, e)| p.pow(10 * (e - 1)) * p.pow(4) * (p * p - 1) * (p.pow(4) - 1))
        .product()
}

const CHUNK: usize = 1 << 20;

fn bfs<K: Key>(gens: &[SparseGen], modulus: u32, budget: u64, bits: u32) -> Result<(FxHashSet<K>, usize)> {
    let n = modulus as u64;
    let per_element = 2 * (std::mem::size_of::<K>() as u64 + 1) * 8 / 7 + std::mem::size_of::<K>() as u64;
    let id = ModMatrix::identity(modulus);
    let start = K::pack(&id.entries, bits);
    let mut seen: FxHashSet<K> = FxHashSet::default();
    seen.insert(start);
    let mut frontier = vec![start];
    let mut levels = 0;
    while !frontier.is_empty() {
        levels += 1;
        let mut next = Vec::new();
        for chunk in frontier.chunks(CHUNK) {
            let mut found: Vec<K> = chunk
                .par_iter()
                .flat_map_iter(|k| {
                    let x = k.unpack(bits);
                    let seen = &seen;
                    gens.iter().filter_map(move |g| {
                        let y = K::pack(&g.apply(&x, n), bits);
                        (!seen.contains(&y)).then_some(y)
                    })
                })
                .collect();
            found.sort_unstable();
            found.dedup();
            for y in found {
                if seen.insert(y) {
                    next.push(y);
                }
            }
            if seen.len() as u64 * per_element > budget {
                return Err(Error::Resource(format!(
                    "group closure mod {modulus} exceeded the memory budget of {budget} bytes after {} elements",
                    seen.len()
                )));
            }
        }
        next.sort_unstable();
        frontier = next;
    }
    Ok((seen, levels))
}

/// Closure of `gens` under multiplication modulo `modulus`. The generators
/// must be symplectic mod `modulus`. Fails with a resource error when the
/// group would not fit in `budget` bytes.
pub fn group_closure(gens: &[ModMatrix], modulus: u32, budget: u64) -> Result<Closure> {
    if gens.is_empty() {
        return Err(Error::InvalidArgument("no generators".into()));
    }
    for g in gens {
        if g.modulus != modulus {
            return Err(Error::InvalidArgument(format!("generator modulus {} ≠ {modulus}", g.modulus)));
        }
        if !g.is_symplectic() {
            return Err(Error::InvalidArgument(format!("generator {:?} is not symplectic mod {modulus}", g.entries)));
        }
    }
    if factorize(modulus as u64).len() > 1 {
        return product_closure(gens, modulus, budget);
    }
    let bits = ModMatrix::bits(modulus);
    let key_bytes: u64 = if 16 * bits <= 64 {
        8
    } else if 16 * bits <= 128 {
        16
    } else {
        return Err(Error::Resource(format!("modulus {modulus} too large to enumerate")));
    };
    // every closure lies inside Sp₄(ℤ/N), so refuse up front when even that bound is out of budget
    let bound = (sp4_order(modulus as u64) as u128) * (2 * (key_bytes + 1) * 8 / 7 + key_bytes) as u128;
    if bound > budget as u128 {
        return Err(Error::Resource(format!(
            "Sp4(Z/{modulus}) has {} elements; enumeration needs about {bound} bytes, budget is {budget}",
            sp4_order(modulus as u64)
        )));
    }
    let sparse: Vec<SparseGen> = gens.iter().map(SparseGen::from).collect();
    let (order, levels, store) = if key_bytes == 8 {
        let (s, levels) = bfs::<u64>(&sparse, modulus, budget, bits)?;
        (s.len() as u64, levels, Store::Narrow(s))
    } else {
        let (s, levels) = bfs::<u128>(&sparse, modulus, budget, bits)?;
        (s.len() as u64, levels, Store::Wide(s))
    };
    Ok(Closure { modulus, order, levels, store })
}

/// Closure for a composite modulus: close each prime-power reduction, then
/// run the BFS on tuples of component indices with a bitmap store.
fn product_closure(gens: &[ModMatrix], modulus: u32, budget: u64) -> Result<Closure> {
    let mut components = Vec::new();
    let mut tables: Vec<Vec<Vec<u32>>> = Vec::new();
    for (p, e) in factorize(modulus as u64) {
        let q = p.pow(e) as u32;
        let local: Vec<ModMatrix> = gens.iter().map(|g| ModMatrix { modulus: q, entries: g.entries.map(|v| v % q) }).collect();
        let elements = group_closure(&local, q, budget)?.elements();
        let index: FxHashMap<[u32; 16], u32> =
            elements.iter().enumerate().map(|(i, m)| (m.entries, i as u32)).collect();
        // tables[g][i] = index of g·element_i
        let table: Vec<Vec<u32>> = local
            .iter()
            .map(|g| elements.iter().map(|x| index[&g.mul(x).entries]).collect())
            .collect();
        tables.push(table);
        components.push(Component { modulus: q, elements, index });
    }
    let mut strides = Vec::new();
    let mut size: u64 = 1;
    for c in &components {
        strides.push(size);
        size = size.checked_mul(c.elements.len() as u64).ok_or(Error::Overflow("product group size"))?;
    }
    if size / 8 > budget {
        return Err(Error::Resource(format!("bitmap of {size} bits exceeds the budget of {budget} bytes")));
    }
    let mut bits = vec![0u64; size.div_ceil(64) as usize];
    let test_and_set = |bits: &mut Vec<u64>, i: u64| {
        let (w, b) = ((i / 64) as usize, i % 64);
        let fresh = bits[w] >> b & 1 == 0;
        bits[w] |= 1 << b;
        fresh
    };
    let identity_index: u64 = components
        .iter()
        .zip(&strides)
        .map(|(c, s)| c.index[&ModMatrix::identity(c.modulus).entries] as u64 * s)
        .sum();
    test_and_set(&mut bits, identity_index);
    let mut frontier = vec![identity_index];
    let mut order = 1u64;
    let mut levels = 0;
    while !frontier.is_empty() {
        levels += 1;
        let mut next = Vec::new();
        for &x in &frontier {
            for g in 0..gens.len() {
                let mut y = 0;
                for ((c, stride), table) in components.iter().zip(&strides).zip(&tables) {
                    let i = (x / stride) % c.elements.len() as u64;
                    y += table[g][i as usize] as u64 * stride;
                }
                if test_and_set(&mut bits, y) {
                    next.push(y);
                    order += 1;
                }
            }
        }
        next.sort_unstable();
        frontier = next;
    }
    Ok(Closure { modulus, order, levels, store: Store::Product(ProductStore { components, strides, bits }) })
}

/// Images mod `modulus` of the symplectic generators; with `all_alpha`
/// every parameter `α ∈ [1, N)` is included, otherwise only `α = 1`.
pub fn generator_images(modulus: u32, all_alpha: bool) -> Result<Vec<ModMatrix>> {
    let gens = generators(2, all_alpha.then_some(modulus as u64))?;
    gens.iter()
        .map(|g| {
            let v = g.mat.to_i64().ok_or(Error::NonIntegral)?;
            let arr: [i64; 16] = v.try_into().map_err(|_| Error::Dimension("expected 4x4".into()))?;
            ModMatrix::new(&arr, modulus)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Surjectivity {
    pub modulus: u32,
    pub integer_generators_order: u64,
    pub all_parameters_order: u64,
    pub formula_order: u64,
    pub surjective: bool,
}

/// Compares the closure of the integral generators mod `N` with the closure
/// over every parameter `α mod N` and with `|Sp₄(ℤ/N)|`.
pub fn surjectivity_check(modulus: u32, budget: u64) -> Result<Surjectivity> {
    let integer = group_closure(&generator_images(modulus, false)?, modulus, budget)?.order;
    let all = group_closure(&generator_images(modulus, true)?, modulus, budget)?.order;
    let formula = sp4_order(modulus as u64);
    Ok(Surjectivity {
        modulus,
        integer_generators_order: integer,
        all_parameters_order: all,
        formula_order: formula,
        surjective: integer == all && all == formula,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DegreeMethod {
    /// `|Sp₄(ℤ/p^l)| / |S|` with `S` the congruence stabilizer, by filtering.
    Filter,
    /// Size of the `Γ₂`-orbit of the lattice `p^l·a⁻¹ℤ⁴` modulo `p^l`.
    LatticeOrbit,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DegreeOracle {
    pub divisor_type: DivisorType,
    pub p: u64,
    pub l: u32,
    pub degree: u64,
    pub method: DegreeMethod,
}

fn diagonal_exponents(t: &DivisorType, p: u64) -> Result<(u32, [u32; 4])> {
    let (_, _, l) = t.exponents(p).ok_or_else(|| Error::InvalidArgument(format!("{t} is not a power of {p}")))?;
    let d = t.diagonal();
    let mut e = [0u32; 4];
    for (i, slot) in e.iter_mut().enumerate() {
        *slot = val_int(&d.mat().get(i, i).to_integer(), p);
    }
    Ok((l, e))
}

/// `[Γ : Γ ∩ a⁻¹Γa]` for the diagonal representative `a` of the type, by
/// the congruence filter when `Sp₄(ℤ/p^l)` fits in the budget and by the
/// lattice orbit otherwise.
pub fn degree_oracle(t: &DivisorType, p: u64, budget: u64) -> Result<DegreeOracle> {
    let (l, e) = diagonal_exponents(t, p)?;
    if l == 0 {
        return Ok(DegreeOracle { divisor_type: *t, p, l, degree: 1, method: DegreeMethod::Filter });
    }
    let q = p.pow(l);
    let q32 = u32::try_from(q).map_err(|_| Error::Overflow("modulus"))?;
    let filter_fits = sp4_order(q) as u128 * 40 <= budget as u128;
    if filter_fits {
        let g = group_closure(&generator_images(q32, false)?, q32, budget)?;
        let div: Vec<u32> = (0..16)
            .map(|k| {
                let (i, j) = (k / 4, k % 4);
                p.pow(e[j].saturating_sub(e[i])) as u32
            })
            .collect();
        let s = g.count_where(|m| m.iter().zip(&div).all(|(v, d)| v % d == 0));
        if s == 0 || g.order % s != 0 {
            return Err(Error::InvalidArgument("stabilizer does not divide the group order".into()));
        }
        Ok(DegreeOracle { divisor_type: *t, p, l, degree: g.order / s, method: DegreeMethod::Filter })
    } else {
        let degree = lattice_orbit_size(p, l, &e)? as u64;
        Ok(DegreeOracle { divisor_type: *t, p, l, degree, method: DegreeMethod::LatticeOrbit })
    }
}

type Lattice = [[i64; 4]; 4];

/// Row Hermite form of the lattice spanned by `rows` and `qℤ⁴`, entries
/// reduced mod `q`.
fn lattice_hnf(rows: &[[i64; 4]], q: i64) -> Lattice {
    let mut pool: Vec<[i64; 4]> = rows.iter().map(|r| r.map(|v| v.rem_euclid(q))).collect();
    for i in 0..4 {
        let mut r = [0; 4];
        r[i] = q;
        pool.push(r);
    }
    let mut out = [[0i64; 4]; 4];
    for c in 0..4 {
        loop {
            let nz: Vec<usize> = (0..pool.len()).filter(|&i| pool[i][c] != 0).collect();
            let piv = *nz.iter().min_by_key(|&&i| pool[i][c].abs()).expect("qe_c keeps the column nonzero");
            if nz.len() == 1 {
                let mut row = pool.swap_remove(piv);
                if row[c] < 0 {
                    row = row.map(|v| -v);
                }
                out[c] = row;
                break;
            }
            let pr = pool[piv];
            for &i in &nz {
                if i != piv {
                    let f = pool[i][c].div_euclid(pr[c]);
                    for k in c..4 {
                        pool[i][k] -= f * pr[k];
                    }
                }
            }
        }
    }
    for j in 0..4 {
        for i in 0..j {
            let f = out[i][j].div_euclid(out[j][j]);
            for k in j..4 {
                out[i][k] -= f * out[j][k];
            }
        }
    }
    out
}

fn lattice_orbit_size(p: u64, l: u32, e: &[u32; 4]) -> Result<usize> {
    let q = p.pow(l) as i64;
    let mut start = [[0i64; 4]; 4];
    for i in 0..4 {
        start[i][i] = p.pow(l - e[i]) as i64;
    }
    let gens: Vec<[i64; 16]> = generators(2, None)?
        .iter()
        .map(|g| {
            let v = g.mat.to_i64().expect("generators are integral");
            v.try_into().expect("4x4")
        })
        .collect();
    let start = lattice_hnf(&start, q);
    let mut seen: HashSet<Lattice> = HashSet::from([start]);
    let mut frontier = vec![start];
    while let Some(lat) = frontier.pop() {
        for g in &gens {
            let moved: Vec<[i64; 4]> = lat
                .iter()
                .map(|r| {
                    let mut v = [0i64; 4];
                    for (i, slot) in v.iter_mut().enumerate() {
                        *slot = (0..4).map(|k| g[i * 4 + k] * r[k]).sum();
                    }
                    v
                })
                .collect();
            let h = lattice_hnf(&moved, q);
            if seen.insert(h) {
                frontier.push(h);
            }
        }
    }
    Ok(seen.len())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Distinctness {
    pub distinct: bool,
    pub count: usize,
    pub first_violation: Option<(usize, usize)>,
}

fn to_arr(g: &Similitude) -> Option<[i64; 16]> {
    g.mat().to_i64().and_then(|v| v.try_into().ok())
}

/// Whether no two representatives lie in the same right coset, i.e.
/// `R_i·R_j⁻¹ ∉ Γ₂` for all `i ≠ j`.
pub fn coset_distinctness(reps: &[Similitude]) -> Result<Distinctness> {
    let count = reps.len();
    let Some(first) = reps.first() else {
        return Ok(Distinctness { distinct: true, count, first_violation: None });
    };
    let lambda = first.lambda().clone();
    if let Some(r) = reps.iter().find(|r| *r.lambda() != lambda) {
        return Err(Error::MultiplierMismatch(lambda.to_string(), r.lambda().to_string()));
    }
    let ints: Option<Vec<[i64; 16]>> = reps.iter().map(to_arr).collect();
    let lam_int = lambda.is_integer().then(|| lambda.to_integer());
    let violation = match (ints, lam_int.and_then(|v| i64::try_from(v).ok())) {
        (Some(ints), Some(lam)) => {
            // R_j⁻¹ = λ⁻¹·Ω⁻¹R_jᵗΩ, so R_i·R_j⁻¹ ∈ Γ₂ iff R_i·Ω⁻¹R_jᵗΩ ≡ 0 mod λ
            let adj: Vec<[i64; 16]> = ints.iter().map(symplectic_adjoint).collect();
            (0..count).into_par_iter().find_map_first(|i| {
                (0..count).find(|&j| j != i && product_divisible(&ints[i], &adj[j], lam)).map(|j| (i.min(j), i.max(j)))
            })
        }
        _ => {
            let inv: Vec<Similitude> = reps.iter().map(|r| r.inverse()).collect::<Result<_>>()?;
            (0..count).into_par_iter().find_map_first(|i| {
                (0..count).find(|&j| j != i && reps[i].mul(&inv[j]).is_integral()).map(|j| (i.min(j), i.max(j)))
            })
        }
    };
    Ok(Distinctness { distinct: violation.is_none(), count, first_violation: violation })
}

/// `Ω⁻¹MᵗΩ` for `Ω = (0 I; −I 0)`.
fn symplectic_adjoint(m: &[i64; 16]) -> [i64; 16] {
    // (Ω⁻¹MᵗΩ)_{ij} = s_i s_j M_{σj,σi} with σ swapping i and i+2 and s = (1,1,−1,−1) up to a global sign
    let sigma = |i: usize| (i + 2) % 4;
    let sign = |i: usize| if i < 2 { 1 } else { -1 };
    let mut out = [0i64; 16];
    for i in 0..4 {
        for j in 0..4 {
            out[i * 4 + j] = sign(i) * sign(j) * m[sigma(j) * 4 + sigma(i)];
        }
    }
    out
}

fn product_divisible(a: &[i64; 16], b: &[i64; 16], lam: i64) -> bool {
    (0..4).all(|i| {
        (0..4).all(|j| {
            let s: i128 = (0..4).map(|k| a[i * 4 + k] as i128 * b[k * 4 + j] as i128).sum();
            s % lam as i128 == 0
        })
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Membership {
    pub member: bool,
    pub computed_type: DivisorType,
    /// Rank mod `p` of the matrix, reported for types `(1,p,p,p²)`.
    pub rank_mod_p: Option<usize>,
    pub rank_criterion_agrees: Option<bool>,
}

/// Whether `m` lies in the double coset of type `t`; for `(1,p,p,p²)` the
/// answer is cross-checked against the rank-one-mod-`p` criterion.
pub fn double_coset_membership(m: &Similitude, t: &DivisorType) -> Result<Membership> {
    if *m.lambda() != crate::number::rat(t.multiplier() as i64) {
        return Err(Error::MultiplierMismatch(m.lambda().to_string(), t.multiplier().to_string()));
    }
    let computed = divisor_type_of(m)?;
    let member = computed == *t;
    let g3_prime = (t.a1 == 1 && t.a2 == t.d2 && t.d1 == t.a2 * t.a2 && factorize(t.a2).len() == 1 && factorize(t.a2)[0].1 == 1)
        .then_some(t.a2);
    let (rank, agrees) = match g3_prime {
        Some(p) => {
            let arr = to_arr(m).ok_or(Error::NonIntegral)?;
            let r = rank_mod_p_4(&arr, p);
            // among multiplier-p² matrices only the (1,p,p,p²) class has rank one mod p
            (Some(r), Some((r == 1) == member))
        }
        None => (None, None),
    };
    Ok(Membership { member, computed_type: computed, rank_mod_p: rank, rank_criterion_agrees: agrees })
}
