use proptest::prelude::*;

use siegel_hecke::characters::{char_from_local, crt_lift, unit_group_structure, DirichletChar};
use siegel_hecke::cosets::{degree, r_closed, right_coset_reps, BlockUpperRep};
use siegel_hecke::hecke::{apply_hecke_counts, central_twist};
use siegel_hecke::normal_forms::{
    classify_stratum, divisor_type_of, smith_normal_form, stratum_witness, symplectic_elementary_divisors,
};
use siegel_hecke::number::{format_rational, parse_rational, ratio};
use siegel_hecke::symplectic::{block_identities_hold, generators, odot, symplectic_inverse};
use siegel_hecke::thermo::{
    euler_product, gibbs_weights, local_zeta_closed_exact, local_zeta_closed_f64, local_zeta_series, measure_of_yp,
    zeta_quotient,
};
use siegel_hecke::{DivisorType, IntMat, MatQ, Rational, Similitude, StratumLabel};

fn gamma_gens() -> Vec<Similitude> {
    let mut out = Vec::new();
    for g in generators(2, None).unwrap() {
        let s = Similitude::new(g.mat).unwrap();
        out.push(symplectic_inverse(&s).unwrap());
        out.push(s);
    }
    out
}

/// A word in the generators of Sp₄(ℤ) and their inverses.
fn word() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..64, 0..8)
}

fn eval_word(w: &[usize], gens: &[Similitude]) -> Similitude {
    w.iter().fold(Similitude::identity(4), |acc, &i| acc.mul(&gens[i % gens.len()]))
}

fn small_similitude() -> impl Strategy<Value = Similitude> {
    (word(), prop::sample::select(vec![(1i64, 1, 2, 2), (1, 2, 2, 4), (1, 1, 3, 3), (2, 2, 4, 4), (1, 3, 6, 18)]))
        .prop_map(|(w, (a1, a2, d2, d1))| {
            let gens = gamma_gens();
            let d = Similitude::from_i64(&[a1, 0, 0, 0, 0, a2, 0, 0, 0, 0, d1, 0, 0, 0, 0, d2]).unwrap();
            eval_word(&w, &gens).mul(&d)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplier_is_multiplicative(g in small_similitude(), h in small_similitude()) {
        let gh = g.mul(&h);
        prop_assert_eq!(gh.lambda(), &(g.lambda() * h.lambda()));
        prop_assert!(block_identities_hold(&gh));
    }

    #[test]
    fn symplectic_inverse_is_inverse(g in small_similitude()) {
        let inv = symplectic_inverse(&g).unwrap();
        prop_assert!(inv.mul(&g).mat().is_identity());
        prop_assert!(g.mul(&inv).mat().is_identity());
    }

    #[test]
    fn odot_multiplier_is_common_determinant(a in -5i64..6, b in -5i64..6, c in -5i64..6) {
        // (a b; c d) and (1 0; c' q) with matching determinants
        let d = 3;
        let det = a * d - b * c;
        prop_assume!(det != 0);
        let x = MatQ::from_i64(&[a, b, c, d]);
        let y = MatQ::from_i64(&[1, 0, 7, det]);
        let z = odot(&x, &y).unwrap();
        prop_assert_eq!(z.lambda(), &Rational::from_integer(det.into()));
    }

    #[test]
    fn smith_form_is_exact(v in prop::collection::vec(-20i64..20, 16)) {
        let m = IntMat::square_i64(&v);
        let snf = smith_normal_form(&m);
        prop_assert_eq!(snf.u.mul(&m).mul(&snf.v), snf.s.clone());
        let inv = snf.invariants();
        for w in inv.windows(2) {
            if !w[0].is_zero_value() {
                prop_assert!((&w[1] % &w[0]).is_zero_value());
            }
        }
    }

    #[test]
    fn divisor_type_is_double_coset_invariant(w1 in word(), w2 in word(), g in small_similitude()) {
        let gens = gamma_gens();
        let moved = eval_word(&w1, &gens).mul(&g).mul(&eval_word(&w2, &gens));
        let t = divisor_type_of(&g).unwrap();
        prop_assert_eq!(divisor_type_of(&moved).unwrap(), t);
        let (t2, red) = symplectic_elementary_divisors(&moved).unwrap();
        prop_assert_eq!(t2, t);
        prop_assert_eq!(&(&(&red.left * moved.mat()) * &red.right), &red.diagonal);
    }

    #[test]
    fn stratum_is_constant_on_translates(
        w1 in word(),
        w2 in word(),
        k in (-2i64..3, -2i64..3),
        rank1 in any::<bool>(),
        flip in any::<bool>(),
        p in prop::sample::select(vec![2u64, 3, 5]),
    ) {
        let gens = gamma_gens();
        let label = if rank1 { StratumLabel::rank1(k.0) } else { StratumLabel::rank2(k.0, k.1) };
        let x = label.base_point(p);
        let mut right = eval_word(&w2, &gens).into_mat();
        if flip {
            // a unit of GSp₄(ℤ) with multiplier −1
            right = &right * &MatQ::diag_i64(&[1, 1, -1, -1]);
        }
        let moved = &(eval_word(&w1, &gens).mat() * &x) * &right;
        prop_assert_eq!(classify_stratum(&moved, p).unwrap(), label);
        let (l2, red) = stratum_witness(&moved, p).unwrap();
        prop_assert_eq!(l2, label);
        prop_assert_eq!(&(&(&red.left * &moved) * &red.right), &label.base_point(p));
    }

    #[test]
    fn rank2_labels_are_unordered(a in -3i64..4, b in -3i64..4, p in prop::sample::select(vec![2u64, 3])) {
        let x = StratumLabel::Rank2 { kmin: a, kmax: b }.base_point(p);
        let y = StratumLabel::Rank2 { kmin: b, kmax: a }.base_point(p);
        prop_assert_eq!(classify_stratum(&x, p).unwrap(), classify_stratum(&y, p).unwrap());
    }

    #[test]
    fn canonical_rep_is_left_invariant(w in word(), idx in 0usize..30) {
        // left multiplication by upper-triangular elements of Γ keeps the block shape
        let t = DivisorType::new(1, 2, 2, 4).unwrap();
        let reps = right_coset_reps(&t).unwrap();
        let r = &reps[idx % reps.len()];
        let gens = gamma_gens();
        let upper: Vec<Similitude> = gens
            .iter()
            .filter(|g| {
                let e = g.mat().to_i64().unwrap();
                e[8..10] == [0, 0] && e[12..14] == [0, 0]
            })
            .cloned()
            .collect();
        let gamma = eval_word(&w.iter().map(|i| i % upper.len()).collect::<Vec<_>>(), &upper);
        let moved = gamma.mul(&r.to_similitude());
        prop_assert_eq!(&BlockUpperRep::canonicalize(&moved).unwrap(), r);
    }

    #[test]
    fn hecke_shift_equivariance(j in 0i64..3, k in (-2i64..2, -2i64..2), p in prop::sample::select(vec![2u64, 3])) {
        let reps: Vec<Similitude> = right_coset_reps(&DivisorType::new(1, 1, p, p).unwrap())
            .unwrap()
            .iter()
            .map(|r| r.to_similitude())
            .collect();
        let point = StratumLabel::rank2(k.0, k.1);
        let base = apply_hecke_counts(&reps, p, &point).unwrap();
        let twisted = apply_hecke_counts(&central_twist(&reps, j, p), p, &point).unwrap();
        let shifted: Vec<_> = base.iter().map(|(l, c)| (l.shift(-j), *c)).collect();
        prop_assert_eq!(twisted.into_iter().collect::<Vec<_>>(), shifted);
        prop_assert_eq!(base.values().sum::<u64>(), reps.len() as u64);
    }

    #[test]
    fn hecke_counts_depend_only_on_offsets(k1 in -2i64..2, k2 in -2i64..2, d in 0i64..3) {
        let p = 2;
        let reps: Vec<Similitude> = right_coset_reps(&DivisorType::new(1, 2, 2, 4).unwrap())
            .unwrap()
            .iter()
            .map(|r| r.to_similitude())
            .collect();
        let a = apply_hecke_counts(&reps, p, &StratumLabel::rank2(k1, k2)).unwrap();
        let b = apply_hecke_counts(&reps, p, &StratumLabel::rank2(k1 + d, k2 + d)).unwrap();
        let moved: Vec<_> = a.iter().map(|(l, c)| (l.shift(d), *c)).collect();
        prop_assert_eq!(b.into_iter().collect::<Vec<_>>(), moved);
    }

    #[test]
    fn rationals_round_trip(n in -10_000i64..10_000, d in 1i64..10_000) {
        let q = ratio(n, d);
        prop_assert_eq!(parse_rational(&format_rational(&q)).unwrap(), q);
    }

    #[test]
    fn crt_reduces_to_each_residue(a in 0u64..4, b in 0u64..9, c in 0u64..25) {
        let coprime: Vec<(u64, u64)> = [(a, 4u64), (b, 9), (c, 25)]
            .into_iter().filter(|(x, q)| num_integer::gcd(*x, *q) == 1).collect();
        prop_assume!(!coprime.is_empty());
        let n = crt_lift(&coprime).unwrap();
        let m: u64 = coprime.iter().map(|(_, q)| q).product();
        prop_assert!(n < m);
        for (x, q) in &coprime {
            prop_assert_eq!(n % q, *x);
        }
    }
}

#[test]
fn completeness_per_prime_power() {
    for p in [2u64, 3] {
        for l in 1..=2 {
            let total: u64 = DivisorType::all_for_prime_power(p, l).iter().map(|t| degree(t).unwrap()).sum();
            assert_eq!(num_bigint::BigInt::from(total), r_closed(p, l));
        }
    }
}

#[test]
fn emitted_reps_have_their_type() {
    for t in [(1, 1, 2, 2), (1, 2, 2, 4), (1, 1, 4, 4), (1, 3, 3, 9), (1, 1, 6, 6), (1, 2, 6, 12)] {
        let t = DivisorType::new(t.0, t.1, t.2, t.3).unwrap();
        let reps = right_coset_reps(&t).unwrap();
        assert_eq!(reps.len() as u64, degree(&t).unwrap(), "{t}");
        for r in &reps {
            assert_eq!(divisor_type_of(&r.to_similitude()).unwrap(), t);
        }
    }
}

#[test]
fn local_series_converges_to_closed_form() {
    for beta in [3.5, 4.0, 5.0, 8.0] {
        for p in [2u64, 3, 5] {
            let s = local_zeta_series(p, beta, 30).unwrap();
            let closed = local_zeta_closed_f64(p, beta).unwrap();
            assert!((s.value - closed).abs() < 10.0 * s.tail_bound.max(f64::EPSILON * closed), "p={p} β={beta}");
        }
    }
}

#[test]
fn euler_products_increase_to_the_quotient() {
    for beta in [4.5, 5.0, 6.0] {
        let q = zeta_quotient(beta).unwrap();
        let mut last = 0.0;
        for bound in [10u64, 100, 1000, 10_000] {
            let e = euler_product(beta, bound).unwrap();
            assert!(e > last && e <= q * (1.0 + 1e-12));
            last = e;
        }
        if beta >= 5.0 {
            assert!((q - last) / q < 1e-3);
        }
    }
    assert!((euler_product(50.0, 1000).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn measure_times_zeta_is_one() {
    for beta in 4..9 {
        for p in [2u64, 3, 5, 7] {
            let m = parse_rational(measure_of_yp(&Rational::from_integer(beta.into()), p).unwrap().exact.as_deref().unwrap())
                .unwrap();
            assert_eq!(m * local_zeta_closed_exact(p, beta).unwrap(), Rational::from_integer(1.into()));
        }
    }
    assert!(measure_of_yp(&Rational::from_integer(3.into()), 2).is_err());
}

#[test]
fn gibbs_mass_grows_with_bound() {
    let mut last = 0.0;
    for bound in [1u64, 5, 10, 30] {
        let g = gibbs_weights(5.0, bound).unwrap();
        assert!(g.weights.iter().all(|(_, w)| *w >= 0.0));
        assert!(g.partial_mass > last && g.partial_mass <= 1.0);
        last = g.partial_mass;
    }
}

#[test]
fn character_orthogonality_and_multiplicativity() {
    for m in [3u64, 4, 5, 8, 12, 15, 16, 20, 21] {
        let phi = unit_group_structure(m).unwrap().order();
        for chi in DirichletChar::all(m).unwrap() {
            let total: num_complex::Complex64 = (0..m).map(|n| chi.value(n)).sum();
            let want = if chi.is_principal() { phi as f64 } else { 0.0 };
            assert!((total - num_complex::Complex64::new(want, 0.0)).norm() < 1e-9, "{chi}");
            for a in 1..m {
                for b in 1..m {
                    let lhs = chi.value(a * b % m);
                    assert!((lhs - chi.value(a) * chi.value(b)).norm() < 1e-9);
                }
            }
        }
    }
}

#[test]
fn local_characters_multiply() {
    let c4 = DirichletChar::all(4).unwrap();
    let c9 = DirichletChar::all(9).unwrap();
    let c5 = DirichletChar::all(5).unwrap();
    for a in &c4 {
        for b in &c9 {
            for c in &c5 {
                let chi = char_from_local(&[a.clone(), b.clone(), c.clone()]).unwrap();
                assert_eq!(chi.is_principal(), a.is_principal() && b.is_principal() && c.is_principal());
                for n in (1..180u64).filter(|n| num_integer::gcd(*n, 180) == 1) {
                    let want = a.value(n) * b.value(n) * c.value(n);
                    assert!((chi.value(n) - want).norm() < 1e-9);
                }
            }
        }
    }
}

trait IsZeroValue {
    fn is_zero_value(&self) -> bool;
}

impl IsZeroValue for num_bigint::BigInt {
    fn is_zero_value(&self) -> bool {
        *self == num_bigint::BigInt::from(0)
    }
}

#[test]
fn block_identities_on_random_products() {
    use rand::{Rng, SeedableRng};
    let gens = gamma_gens();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let diags = [
        Similitude::from_i64(&[1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 2, 0, 0, 0, 0, 2]).unwrap(),
        Similitude::from_i64(&[1, 0, 0, 0, 0, 3, 0, 0, 0, 0, 3, 0, 0, 0, 0, 1]).unwrap(),
    ];
    for _ in 0..1000 {
        let len = rng.gen_range(1..12);
        let mut g = Similitude::identity(4);
        for _ in 0..len {
            g = if rng.gen_bool(0.1) {
                g.mul(&diags[rng.gen_range(0..diags.len())])
            } else {
                g.mul(&gens[rng.gen_range(0..gens.len())])
            };
        }
        assert!(block_identities_hold(&g));
        assert!(block_identities_hold(&symplectic_inverse(&g).unwrap()));
    }
}

#[test]
fn closure_mod_four_lifts_closure_mod_two() {
    use siegel_hecke::oracle::{generator_images, group_closure, sp4_order, DEFAULT_BUDGET};
    let c2 = group_closure(&generator_images(2, false).unwrap(), 2, DEFAULT_BUDGET).unwrap();
    let c4 = group_closure(&generator_images(4, false).unwrap(), 4, DEFAULT_BUDGET).unwrap();
    assert_eq!(c4.order, 1024 * c2.order);
    assert_eq!(c4.order, sp4_order(4));
}

#[test]
fn degree_oracle_matches_enumeration() {
    use siegel_hecke::oracle::{degree_oracle, DEFAULT_BUDGET};
    for (p, l) in [(2u64, 1u32), (2, 2), (3, 1)] {
        for t in DivisorType::all_for_prime_power(p, l) {
            let o = degree_oracle(&t, p, DEFAULT_BUDGET).unwrap();
            assert_eq!(o.degree, degree(&t).unwrap(), "{t}");
        }
    }
}

#[test]
fn emitted_lists_are_distinct() {
    use siegel_hecke::oracle::coset_distinctness;
    for t in [(1, 1, 2, 2), (1, 2, 2, 4), (1, 1, 3, 3), (1, 1, 6, 6)] {
        let t = DivisorType::new(t.0, t.1, t.2, t.3).unwrap();
        let reps: Vec<Similitude> = right_coset_reps(&t).unwrap().iter().map(|r| r.to_similitude()).collect();
        let d = coset_distinctness(&reps).unwrap();
        assert!(d.distinct, "{t}");
        assert_eq!(d.count, reps.len());
    }
}
