//! Dirichlet characters built from local characters, L-values with tail
//! bounds, CRT lifting, and the character bound sweep at β = 4.

use siegel_hecke::characters::{
    char_from_local, crt_lift, l_function, local_level, theorem58_bound, unit_group_structure, DirichletChar,
};
use siegel_hecke::number::primes_up_to;

fn main() -> siegel_hecke::Result<()> {
    for m in [4u64, 8, 5, 12, 16] {
        let g = unit_group_structure(m)?;
        println!("(Z/{m})^×: generators {:?} of orders {:?}", g.generators, g.orders);
    }
    let chi4 = DirichletChar::new(unit_group_structure(4)?, vec![1])?;
    let chi3 = DirichletChar::new(unit_group_structure(3)?, vec![1])?;
    let chi12 = char_from_local(&[chi4.clone(), chi3])?;
    println!("{chi12}: χ(5) = {}, χ(7) = {}", chi12.value(5), chi12.value(7));
    for c in DirichletChar::all(16)? {
        let lv = local_level(&c)?;
        println!("{c}: level {}{}", lv.level, if lv.principal { " (principal)" } else { "" });
    }
    println!("CRT [(3 mod 4), (1 mod 3), (2 mod 5)] = {}", crt_lift(&[(3, 4), (1, 3), (2, 5)])?);

    for s in [1.0, 2.0] {
        let l = l_function(&chi4, s, 1 << 20)?;
        println!("L({s}, χ4) = {:.10} ± {:.1e}", l.re, l.tail_bound);
    }
    for cut in [10u64, 100, 1000, 10_000] {
        let f: Vec<u64> = primes_up_to(cut).into_iter().filter(|&p| p != 2).collect();
        let b = theorem58_bound(&chi4, 4.0, &f, 1 << 20)?;
        println!("primes ≤ {cut}: bound {:.6} (restricted {:.6}, intermediate {:.6})", b.final_bound, b.restricted, b.intermediate);
    }
    Ok(())
}
