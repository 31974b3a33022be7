//! Right-coset representatives of double cosets, their degrees, the
//! counting function R(p^l) and the multiplicative assembly of composite
//! multipliers.

use siegel_hecke::cosets::{combine_reps, degree, r_closed, r_count, right_coset_reps};
use siegel_hecke::DivisorType;

fn main() -> siegel_hecke::Result<()> {
    for p in [2u64, 3, 5] {
        let t1 = DivisorType::new(1, 1, p, p)?;
        let t2 = DivisorType::new(p, p, p, p)?;
        let t3 = DivisorType::new(1, p, p, p * p)?;
        println!("p = {p}: deg {t1} = {}, deg {t2} = {}, deg {t3} = {}", degree(&t1)?, degree(&t2)?, degree(&t3)?);
    }
    println!();
    for (p, l) in [(2u64, 1u32), (2, 2), (2, 3), (3, 1), (3, 2)] {
        println!("R({p}^{l}) enumerated {} closed form {}", r_count(p, l), r_closed(p, l));
    }

    let t = DivisorType::new(1, 2, 2, 4)?;
    println!("\nrepresentatives of {t} (D, B, A blocks):");
    for r in right_coset_reps(&t)?.iter().take(6) {
        println!("  D={:?} B={:?} A={:?}", r.d, r.b, r.a);
    }

    let q = right_coset_reps(&DivisorType::new(1, 1, 2, 2)?)?;
    let r = right_coset_reps(&DivisorType::new(1, 1, 3, 3)?)?;
    let combined = combine_reps(&q, &r)?;
    println!("\ncombine_reps: {} × {} = {} representatives of multiplier 6", q.len(), r.len(), combined.len());
    Ok(())
}
