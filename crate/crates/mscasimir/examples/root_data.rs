//! Restricted root data of the Euclidean four-point Cartan subset for d = 3..6,
//! and of the maximal split abelian a_p.
//!
//! cargo run -p mscasimir --example root_data

use mscasimir::cartan::{find_spec, CartanLabel, PairKind};
use mscasimir::liealg::{Algebra, Signature};
use mscasimir::rootspace::{root_decomposition, DecompositionOptions};
use mscasimir::Result;

fn main() -> Result<()> {
    println!("four-point pair, c' = span(F_01, F_d,d+1)");
    for d in 3..=6 {
        let spec = find_spec(Signature::new(d, 0)?, PairKind::FourPoint, CartanLabel::Euclid)?;
        let (_, dec) = spec.decompose(0)?;
        let info = dec.classify();
        println!(
            "  d={d}: {} short mult {:?}, long mult {}, dim g_0 = {} (c' {} + m' {})",
            info.name,
            info.short_multiplicity,
            info.long_multiplicity,
            dec.zero_dim(),
            dec.zero_odd.len(),
            dec.zero_even.len()
        );
        for r in dec.positive_roots().map(|(_, r)| r) {
            let coords: Vec<String> = r.coords.iter().flatten().map(|x| x.to_string()).collect();
            println!("      ({}) x{}", coords.join(", "), r.multiplicity);
        }
    }

    println!("a_p = span(D_0, ..., D_q)");
    for (p, q) in [(3, 1), (4, 1), (5, 1), (4, 2)] {
        let alg = Algebra::new(Signature::new(p, q)?);
        let basis: Vec<_> = alg.a_p_basis::<f64>().iter().map(|e| e.to_c64()).collect();
        let dec = root_decomposition(&alg, &basis, &alg.theta(), DecompositionOptions::default())?;
        let info = dec.classify();
        let ty = format!("B{}", q + 1);
        println!(
            "  so({},{}): {} (is {ty}: {}) short mult {:?}, long mult {}",
            p + 1,
            q + 1,
            info.name,
            info.is_type(&ty),
            info.short_multiplicity,
            info.long_multiplicity
        );
    }
    Ok(())
}
