//! Pointwise check of the stratum expansion identities for the twisted
//! Hecke operators at a prime. Pass the prime and grid radius as arguments
//! (defaults: 2 and 3).

use siegel_hecke::hecke::{r_poly_identity, verify_lemma47};

fn main() -> siegel_hecke::Result<()> {
    let mut args = std::env::args().skip(1);
    let p: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(2);
    let radius: i64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);
    let report = verify_lemma47(p, radius)?;
    println!("p = {p}, grid radius {radius}");
    for id in &report.identities {
        let fmt = |v: &[(siegel_hecke::StratumLabel, i64)]| {
            v.iter().map(|(l, c)| format!("{c}·f{l}")).collect::<Vec<_>>().join(" + ")
        };
        println!(
            "T({}) f{}: {}  (degree {}, mass conserved: {})",
            id.operator,
            id.target,
            if id.holds { "holds" } else { "FAILS" },
            id.degree,
            id.mass_conserved
        );
        if !id.holds {
            println!("    claimed  {}", fmt(&id.expected));
            println!("    observed {}", fmt(&id.observed));
        }
    }
    for c in &report.combinations {
        println!(
            "combination for f{} with g3 twisted {} time(s): {} ({} failing points)",
            c.target,
            c.g3_twist,
            if c.holds { "holds" } else { "fails" },
            c.failures.len()
        );
    }
    println!("R(p, β) factorization identity: {}", r_poly_identity());
    Ok(())
}
