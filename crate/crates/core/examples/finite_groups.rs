//! Brute-force oracles: closures of Sp₄(ℤ/N), degrees as congruence
//! indices, right-coset distinctness and double-coset membership.

use siegel_hecke::cosets::{lemma12_reps, right_coset_reps, Lemma12};
use siegel_hecke::oracle::{
    budget_from_env, coset_distinctness, degree_oracle, double_coset_membership, generator_images, group_closure,
};
use siegel_hecke::{DivisorType, Similitude};

fn main() -> siegel_hecke::Result<()> {
    let budget = budget_from_env()?;
    for n in [2u32, 3, 4] {
        let g = group_closure(&generator_images(n, false)?, n, budget)?;
        println!("|<generators mod {n}>| = {} ({} BFS levels)", g.order, g.levels);
    }
    for (t, p) in [((1, 1, 2, 2), 2u64), ((1, 2, 2, 4), 2), ((1, 1, 4, 4), 2), ((1, 3, 3, 9), 3)] {
        let t = DivisorType::new(t.0, t.1, t.2, t.3)?;
        let o = degree_oracle(&t, p, budget)?;
        println!("degree oracle {t}: {} via {:?}", o.degree, o.method);
    }
    let reps: Vec<Similitude> =
        right_coset_reps(&DivisorType::new(1, 1, 6, 6)?)?.iter().map(|r| r.to_similitude()).collect();
    println!("{} representatives of multiplier 6 pairwise distinct: {}", reps.len(), coset_distinctness(&reps)?.distinct);

    let t = DivisorType::new(1, 3, 3, 9)?;
    let m = Similitude::from_i64(&lemma12_reps(3, Lemma12::G3)[5])?;
    let r = double_coset_membership(&m, &t)?;
    println!("rep in type {t}: {} (rank mod 3 = {:?})", r.member, r.rank_mod_p);
    Ok(())
}
