//! Elementary divisors of integral similitudes with explicit Sp₄(ℤ)
//! witnesses, and the p-adic rank strata of multiplier-zero matrices.

use siegel_hecke::normal_forms::{
    classify_stratum, smith_normal_form, stratum_witness, symplectic_elementary_divisors,
};
use siegel_hecke::symplectic::{g3, pair_embed};
use siegel_hecke::{IntMat, MatQ, Similitude, StratumLabel};

fn main() -> siegel_hecke::Result<()> {
    let m = IntMat::square_i64(&[2, 4, 4, 0, -6, 6, 12, 2, 10, -4, -16, 4, 0, 0, 0, 7]);
    let snf = smith_normal_form(&m);
    println!("Smith invariants of an integer matrix: {:?}", snf.invariants());

    // a random-looking element of the double coset of g3(2)
    let gamma = Similitude::new(pair_embed(0, [[2, 1], [1, 1]]))?;
    let delta = Similitude::new(pair_embed(1, [[1, 3], [0, 1]]))?;
    let n = gamma.mul(&g3(2)).mul(&delta);
    let (t, red) = symplectic_elementary_divisors(&n)?;
    println!("N = {:?}", n.mat().to_literal());
    println!("symplectic divisor type of N: {t}");
    println!("γ1·N·γ2 = {:?}", red.diagonal.to_literal());

    let x = MatQ::from_i64(&[0, 0, 3, 9, 0, 0, 6, 0, 0, 0, 1, 3, 0, 0, 2, 0]);
    for p in [2u64, 3, 5] {
        let (label, w) = stratum_witness(&x, p)?;
        assert_eq!(label, classify_stratum(&x, p)?);
        println!("p = {p}: stratum {label}, base point {:?}", w.diagonal.to_literal());
    }
    let label = StratumLabel::rank2(1, 3);
    println!("base point of {label} at p = 2: {:?}", label.base_point(2).to_literal());
    Ok(())
}
