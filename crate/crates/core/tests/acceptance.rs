//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any criterion fails.

use std::time::{Duration, Instant};

use siegel_hecke::characters::{theorem58_bound, DirichletChar};
use siegel_hecke::cosets::{
    b_representatives, combine_reps, degree, degree_leading_exponent, leading_exponents, r_closed, r_count,
    right_coset_reps,
};
use siegel_hecke::hecke::verify_lemma47;
use siegel_hecke::number::{primes_up_to, ratio};
use siegel_hecke::oracle::{
    coset_distinctness, degree_oracle, generator_images, group_closure, surjectivity_check, DEFAULT_BUDGET,
};
use siegel_hecke::thermo::{euler_product, kms_phase, local_zeta_series, siegel_volume, zeta_quotient, PhaseVerdict};
use siegel_hecke::{DivisorType, IntMat, Similitude};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn dt(a1: u64, a2: u64, d2: u64, d1: u64) -> DivisorType {
    DivisorType::new(a1, a2, d2, d1).unwrap()
}

fn c1_degree_table() -> Outcome {
    let mut bad = Vec::new();
    for p in [2u64, 3, 5] {
        let want = [(dt(1, 1, p, p), (1 + p) * (1 + p * p)), (dt(p, p, p, p), 1), (dt(1, p, p, p * p), p + p * p + p.pow(3) + p.pow(4))];
        for (t, w) in want {
            let n = right_coset_reps(&t).unwrap().len() as u64;
            if n != w {
                bad.push(format!("{t}: {n} != {w}"));
            }
        }
    }
    outcome(bad.is_empty(), if bad.is_empty() { "g1, g2, g3 degrees match for p = 2, 3, 5".into() } else { bad.join("; ") })
}

fn c2_counting() -> Outcome {
    let mut got = Vec::new();
    let mut pass = true;
    for (p, l, want) in [(2u64, 1u32, 15u64), (2, 2, 151), (3, 1, 40), (3, 2, 1201)] {
        let n = r_count(p, l);
        pass &= n == want && r_closed(p, l) == want.into();
        got.push(format!("R({}^{l})={n}", p));
    }
    outcome(pass, got.join(", "))
}

fn c3_multiplicativity() -> Outcome {
    let mut reps = Vec::new();
    for t2 in DivisorType::all_for_prime_power(2, 1) {
        let q = right_coset_reps(&t2).unwrap();
        for t3 in DivisorType::all_for_prime_power(3, 1) {
            let r = right_coset_reps(&t3).unwrap();
            reps.extend(combine_reps(&q, &r).unwrap());
        }
    }
    let sims: Vec<Similitude> = reps.iter().map(|r| r.to_similitude()).collect();
    let d = coset_distinctness(&sims).unwrap();
    let r2 = r_count(2, 1);
    let r3 = r_count(3, 1);
    outcome(sims.len() == 600 && r2 * r3 == 600 && d.distinct, format!("R(6) = {} = {r2}·{r3}, distinct = {}", sims.len(), d.distinct))
}

fn c4_b_counts() -> Outcome {
    let u = IntMat::square_i64(&[2, 1, 1, 1]);
    let v = IntMat::square_i64(&[1, -3, 0, 1]);
    let mut bad = Vec::new();
    let mut checked = 0;
    for p in [2i64, 3] {
        for (d1, d2) in [(1, p), (p, p), (1, p * p), (p, p * p)] {
            let d = IntMat::square_i64(&[d1, 0, 0, d2]);
            let want = (d1 * d1 * d2) as usize;
            let direct = b_representatives(&d).unwrap().len();
            let moved = b_representatives(&u.mul(&d).mul(&v)).unwrap().len();
            checked += 1;
            if direct != want || moved != want {
                bad.push(format!("diag({d1},{d2}): {direct}/{moved} != {want}"));
            }
        }
    }
    outcome(bad.is_empty(), if bad.is_empty() { format!("{checked} matrices and their unimodular translates") } else { bad.join("; ") })
}

fn c5_local_zeta() -> Outcome {
    let s = local_zeta_series(2, 4.0, 30).unwrap();
    let err = (s.value - 16.0 / 5.0).abs();
    let flags: Vec<bool> = [2.5, 3.0].iter().map(|b| local_zeta_series(2, *b, 30).unwrap().diverging).collect();
    outcome(
        err < 1e-4 && !s.diverging && flags.iter().all(|f| *f),
        format!("series = {:.10}, |series − 16/5| = {err:.2e}, diverging at 2.5, 3: {flags:?}", s.value),
    )
}

fn c6_partition() -> Outcome {
    let q = zeta_quotient(5.0).unwrap();
    let e = euler_product(5.0, 10_000).unwrap();
    let rel = (q - e).abs() / q;
    outcome(rel < 1e-3 && (q - 2.2101).abs() < 1e-4, format!("Euler product {e:.6}, zeta quotient {q:.6}, relative gap {rel:.2e}"))
}

fn c7_lemma47() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (p, radius) in [(2u64, 3i64), (3, 2)] {
        let r = verify_lemma47(p, radius).unwrap();
        let failing: Vec<String> = r
            .identities
            .iter()
            .filter(|i| !i.holds)
            .map(|i| format!("T({})→{}", i.operator, i.target))
            .chain(r.combinations.iter().filter(|c| !c.holds).map(|c| format!("combination→{} twist {}", c.target, c.g3_twist)))
            .collect();
        let ok = r.all_identities_hold && r.all_mass_conserved && r.r_poly_identity;
        pass &= ok;
        parts.push(format!(
            "p={p}: identities hold {}, mass conserved {}, R(p,β) factorization {}; failing [{}]",
            r.all_identities_hold,
            r.all_mass_conserved,
            r.r_poly_identity,
            failing.join(", ")
        ));
    }
    outcome(pass, parts.join(" | "))
}

fn c8_oracle() -> Outcome {
    let mut bad = Vec::new();
    for (n, want) in [(2u32, 720u64), (3, 51_840), (4, 737_280)] {
        let c = group_closure(&generator_images(n, false).unwrap(), n, DEFAULT_BUDGET).unwrap();
        if c.order != want {
            bad.push(format!("|closure mod {n}| = {} != {want}", c.order));
        }
    }
    let mut types = 0;
    for (p, l) in [(2u64, 1u32), (2, 2), (3, 1), (3, 2)] {
        for t in DivisorType::all_for_prime_power(p, l) {
            types += 1;
            let o = degree_oracle(&t, p, DEFAULT_BUDGET).unwrap();
            let d = degree(&t).unwrap();
            if o.degree != d {
                bad.push(format!("oracle degree {t}: {} != {d}", o.degree));
            }
        }
    }
    for n in [2u32, 3, 4, 6] {
        let s = surjectivity_check(n, DEFAULT_BUDGET).unwrap();
        if !s.surjective {
            bad.push(format!("not surjective mod {n}"));
        }
    }
    outcome(
        bad.is_empty(),
        if bad.is_empty() { format!("orders 720, 51840, 737280; {types} oracle degrees; surjective mod 2, 3, 4, 6") } else { bad.join("; ") },
    )
}

fn c9_degree_exponents() -> Outcome {
    let mut bad = Vec::new();
    let mut shapes = std::collections::BTreeMap::<(u32, u32, u32), Vec<f64>>::new();
    for p in [2u64, 3, 5] {
        for l in 1..=3 {
            for t in DivisorType::all_for_prime_power(p, l) {
                let (ks, l) = leading_exponents(&t, p).unwrap();
                let e = degree_leading_exponent(&ks, l).unwrap();
                let ratio = degree(&t).unwrap() as f64 / (p as f64).powi(e as i32);
                if !(1.0..=4.0).contains(&ratio) {
                    bad.push(format!("{t}: ratio {ratio}"));
                }
                shapes.entry(t.exponents(p).unwrap()).or_default().push(ratio);
            }
        }
    }
    for (shape, rs) in &shapes {
        if rs.windows(2).any(|w| w[1] > w[0]) {
            bad.push(format!("shape {shape:?} increases: {rs:?}"));
        }
    }
    outcome(bad.is_empty(), if bad.is_empty() { format!("{} shapes, ratios in [1, 4], nonincreasing in p", shapes.len()) } else { bad.join("; ") })
}

fn c10_character_bound() -> Outcome {
    let chi = DirichletChar::all(4).unwrap().into_iter().find(|c| !c.is_principal()).unwrap();
    let bounds: Vec<f64> = [10u64, 100, 1000, 10_000]
        .iter()
        .map(|&c| {
            let primes: Vec<u64> = primes_up_to(c).into_iter().filter(|&p| p != 2).collect();
            theorem58_bound(&chi, 4.0, &primes, 1 << 20).unwrap().final_bound
        })
        .collect();
    let monotone = bounds.windows(2).all(|w| w[1] <= w[0]);
    let factor = bounds[0] / bounds[3];
    outcome(monotone && factor >= 5.0, format!("bounds {bounds:.4?}, monotone {monotone}, decrease factor {factor:.3} (need ≥ 5)"))
}

fn c11_phase() -> Outcome {
    let cases: [(i64, i64, &str); 12] = [
        (1, 2, "NoKMS"),
        (3, 2, "NoKMS"),
        (5, 2, "NoKMS"),
        (29, 10, "NoKMS"),
        (1, 1, "Unresolved"),
        (2, 1, "Unresolved"),
        (3, 1, "Unresolved"),
        (31, 10, "Unique"),
        (7, 2, "Unique"),
        (4, 1, "Unique"),
        (41, 10, "GibbsFamily"),
        (6, 1, "GibbsFamily"),
    ];
    let mut bad = Vec::new();
    for (n, d, want) in cases {
        let v = kms_phase(&ratio(n, d)).unwrap();
        let payload = serde_json::to_value(&v).unwrap();
        let witness_ok = match &v {
            PhaseVerdict::NoKMS { partial_sums, .. } => partial_sums.len() > 1,
            PhaseVerdict::Unique { euler_partials, .. } => !euler_partials.is_empty(),
            _ => !payload["witness"].is_null(),
        };
        if v.name() != want || !witness_ok {
            bad.push(format!("β = {n}/{d}: {} (want {want})", v.name()));
        }
    }
    outcome(bad.is_empty(), if bad.is_empty() { format!("{} sample points classified with witnesses", cases.len()) } else { bad.join("; ") })
}

fn c12_volume() -> Outcome {
    let v = siegel_volume(1).unwrap();
    let err = (v - std::f64::consts::PI / 3.0).abs();
    outcome(err < 1e-10, format!("vol = {v:.12}, |vol − π/3| = {err:.1e}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Option<Duration>); 12] = [
        ("degree table", c1_degree_table, Some(Duration::from_secs(5))),
        ("counting function", c2_counting, Some(Duration::from_secs(30))),
        ("multiplicativity", c3_multiplicativity, Some(Duration::from_secs(60))),
        ("B(D) counts", c4_b_counts, None),
        ("local zeta", c5_local_zeta, Some(Duration::from_secs(1))),
        ("global partition", c6_partition, Some(Duration::from_secs(10))),
        ("Hecke expansion identities", c7_lemma47, Some(Duration::from_secs(300))),
        ("oracle cross-checks", c8_oracle, Some(Duration::from_secs(300))),
        ("degree exponents", c9_degree_exponents, None),
        ("character bound", c10_character_bound, Some(Duration::from_secs(10))),
        ("phase map", c11_phase, None),
        ("volume", c12_volume, None),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let took = start.elapsed();
        let in_time = limit.is_none_or(|l| took <= l);
        let pass = o.pass && in_time;
        if !pass {
            failed += 1;
        }
        let time = match limit {
            Some(l) => format!("{:.2}s / {}s", took.as_secs_f64(), l.as_secs()),
            None => format!("{:.2}s", took.as_secs_f64()),
        };
        println!("criterion {:>2} {} {name} [{time}]: {}", i + 1, if pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
