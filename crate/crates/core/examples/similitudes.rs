//! Symplectic similitudes: multipliers, the ⊙ embedding of GL₂ × GL₂, the
//! generators of Sp₄(ℤ) and the symplectic inverse.

use siegel_hecke::symplectic::{g1, g3, generators, odot, omega, symplectic_inverse};
use siegel_hecke::{MatQ, Similitude};

fn main() -> siegel_hecke::Result<()> {
    println!("Ω = {:?}", omega(2).to_literal());

    let m = Similitude::from_i64(&[1, 2, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, -2, 1])?;
    println!("M = {:?}, λ(M) = {}", m.mat().to_literal(), m.lambda());

    let x = MatQ::from_i64(&[2, 1, 0, 3]);
    let y = MatQ::from_i64(&[1, 1, -1, 5]);
    let z = odot(&x, &y)?;
    println!("(2 1; 0 3) ⊙ (1 1; −1 5) = {:?}, λ = {}", z.mat().to_literal(), z.lambda());

    let g = g3(3);
    let inv = symplectic_inverse(&g)?;
    println!("g3(3) = {:?}", g.mat().to_literal());
    println!("g3(3)⁻¹ = {:?}, λ = {}", inv.mat().to_literal(), inv.lambda());
    println!("g1(2)·g3(2) has λ = {}", g1(2).mul(&g3(2)).lambda());

    let gens = generators(2, None)?;
    println!("{} integral generators of Sp4(Z):", gens.len());
    for gen in &gens {
        println!("  family {} (i={}, j={}): {:?}", gen.family, gen.i, gen.j, gen.mat.to_literal());
    }
    println!("{} generators once every parameter mod 3 is included", generators(2, Some(3))?.len());
    Ok(())
}
