//! Checks the Casimir decomposition against the defining representation:
//! Ω acting on matrices is compared with the radial formula built from A_α, x^α and φ.
//!
//! cargo run -p mscasimir --example casimir_oracle

use mscasimir::cartan::{catalog, PairKind};
use mscasimir::liealg::Signature;
use mscasimir::radial::{a_symmetries, oracle_check, random_regular_points, Representation, RootSpaces};
use mscasimir::scalar::C64;
use mscasimir::Result;

fn main() -> Result<()> {
    for (p, q) in [(3, 0), (3, 1)] {
        for spec in catalog(Signature::new(p, q)?, PairKind::FourPoint)? {
            let rs = RootSpaces::<C64>::build(&spec, 0)?;
            let mut worst = 0.0f64;
            for pt in random_regular_points(&spec, 20, 0) {
                worst = worst.max(oracle_check(&spec, &rs, &pt, Representation::Defining)?.max_residual());
            }
            let sym = a_symmetries(&rs);
            println!(
                "so({},{}) C_{:<6} max residual over 20 points {:.2e}; A_α symmetries {:.1e} {:.1e} {:.1e}",
                p + 1,
                q + 1,
                spec.label.to_string(),
                worst,
                sym.negation,
                sym.swap_sigma,
                sym.phi_twist
            );
        }
    }
    Ok(())
}
