//! Leading growth of double-coset degrees: compares each enumerated degree
//! with `p^E`, where `E` comes from the GSp₄ root datum.

use siegel_hecke::cosets::{degree, degree_leading_exponent, leading_exponents, root_datum};
use siegel_hecke::DivisorType;

fn main() -> siegel_hecke::Result<()> {
    let rd = root_datum(2)?;
    println!("simple roots   {:?}", rd.simple_roots);
    println!("simple coroots {:?}", rd.simple_coroots);
    println!("Cartan matrix  {:?}", rd.cartan);
    println!("2ρ             {:?}", rd.two_rho);
    println!();
    println!("{:>3} {:>14} {:>8} {:>4} {:>8}", "p", "type", "degree", "E", "ratio");
    for p in [2u64, 3, 5] {
        for l in 1..=3 {
            for t in DivisorType::all_for_prime_power(p, l) {
                let (ks, l) = leading_exponents(&t, p)?;
                let e = degree_leading_exponent(&ks, l)?;
                let d = degree(&t)?;
                println!("{p:>3} {:>14} {d:>8} {e:>4} {:>8.4}", t.to_string(), d as f64 / (p as f64).powi(e as i32));
            }
        }
    }
    Ok(())
}
