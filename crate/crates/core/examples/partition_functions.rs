//! Local and global partition functions, Gibbs weights, the KMS phase map
//! and the volume of the Siegel fundamental domain.

use siegel_hecke::number::parse_rational;
use siegel_hecke::thermo::{
    gibbs_weights, global_partition, kms_phase, local_zeta_closed, local_zeta_series, measure_of_yp, riemann_zeta,
    siegel_volume,
};
use siegel_hecke::Rational;

fn main() -> siegel_hecke::Result<()> {
    let four = Rational::from_integer(4.into());
    println!("ζ_2(4) closed form = {:?}", local_zeta_closed(2, &four)?.exact);
    println!("ζ_3(4) closed form = {:?}", local_zeta_closed(3, &four)?.exact);
    let s = local_zeta_series(2, 4.0, 30)?;
    println!("series to l = 30: {} (tail ≤ {:.3e})", s.value, s.tail_bound);
    println!("series at β = 2.5 diverges: {}", local_zeta_series(2, 2.5, 10)?.diverging);
    if let Err(e) = local_zeta_closed(2, &Rational::from_integer(3.into())) {
        println!("β = 3: {e}");
    }
    println!("measure of Y_2 at β = 4: {:?}", measure_of_yp(&four, 2)?.exact);

    for bound in [100u64, 1000, 10_000] {
        let r = global_partition(5.0, bound)?;
        println!("β = 5, primes ≤ {bound}: Euler product {:.8}, zeta quotient {:.8}", r.euler_product, r.zeta_quotient);
    }
    println!("ζ(3) = {}", riemann_zeta(3.0)?);

    let g = gibbs_weights(5.0, 20)?;
    println!("Gibbs weights at β = 5, multipliers ≤ 20 (mass {:.6}, tail {:.6}):", g.partial_mass, g.tail_mass);
    for (t, w) in g.weights.iter().take(8) {
        println!("  {t:>10}  {w:.6e}");
    }

    for b in ["1", "2", "2.5", "3", "3.5", "4", "5"] {
        let v = kms_phase(&parse_rational(b)?)?;
        println!("β = {b}: {}", v.name());
    }
    for n in 1..=4 {
        println!("vol(U_{n}) = {}", siegel_volume(n)?);
    }
    Ok(())
}
