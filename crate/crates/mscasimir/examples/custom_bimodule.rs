//! A user-supplied bimodule: two copies of the scalar weights on W = ℂ², given as explicit
//! matrices, and the resulting radial operator evaluated at a point.
//!
//! cargo run -p mscasimir --example custom_bimodule

use std::collections::BTreeMap;

use mscasimir::cartan::{find_spec, CartanLabel, ChiPoint, PairKind};
use mscasimir::json;
use mscasimir::liealg::Signature;
use mscasimir::radial::{radial_casimir, Bimodule, RootSpaces};
use mscasimir::scalar::{c, C64};
use mscasimir::Result;
use nalgebra::DMatrix;

fn main() -> Result<()> {
    let spec = find_spec(Signature::new(3, 1)?, PairKind::FourPoint, CartanLabel::ZeroTwo)?;
    let rs = RootSpaces::<C64>::build(&spec, 0)?;
    // D_0 = F_{0,d+1} acts diagonally on both sides; the rest of h acts by zero.
    let d1 = format!("F_0_{}", spec.sig.n() - 1);
    let diag = |x: f64, y: f64| DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(x, 0.0), c(y, 0.0)]));
    let left = BTreeMap::from([(d1.clone(), diag(1.0, 0.5))]);
    let right = BTreeMap::from([(d1, diag(2.0, -0.3))]);
    let w = Bimodule::custom(&rs.alg, 2, &left, &right)?;
    println!("bimodule axiom residual {:.1e}", w.axiom_residual(&rs.alg, &rs.sigma));
    let op = radial_casimir(&rs, &w)?;
    println!("{} first-order terms, {} zero-order terms", op.first_order.len(), op.zero_order.len());
    let at = op.evaluate(&spec, &ChiPoint::new(c(0.7, 0.0), c(1.3, 0.0)))?;
    println!("zero-order coefficient at χ = (0.7, 1.3):");
    println!("{}", json::to_string(&json::cmat(&at.zero)));
    Ok(())
}
