//! Cross-ratios from group elements, the affine Weyl action on (χ₁, χ₂) and causal regions.
//!
//! cargo run -p mscasimir --example cross_ratios

use mscasimir::cartan::{catalog, parametrize, ChiPoint, PairKind};
use mscasimir::coords::{apply_word, classify_causal, cross_ratios_from_corners, f_map, weyl_reduce, Gen};
use mscasimir::liealg::Signature;
use mscasimir::scalar::c;
use mscasimir::Result;

fn main() -> Result<()> {
    let pt = ChiPoint::new(c(0.8, 0.0), c(1.7, 0.0));
    let (u, v) = f_map(&pt)?;
    println!("f(0.8, 1.7) = (u, v) = ({:.6}, {:.6})", u.re, v.re);
    for spec in catalog(Signature::new(3, 1)?, PairKind::FourPoint)? {
        let g = parametrize(&spec, &pt)?;
        let (a, b) = cross_ratios_from_corners(&g)?;
        println!("  via x(χ) for C_{:<6}: ({:.6}{:+.1e}i, {:.6}{:+.1e}i)", spec.label.to_string(), a.re, a.im, b.re, b.im);
    }

    let moved = apply_word(&[Gen::S0, Gen::S1, Gen::S2, Gen::S1, Gen::S0], &ChiPoint::new(c(0.4, 0.3), c(1.2, 2.0)));
    let red = weyl_reduce(&moved)?;
    let w: Vec<String> = red.word.iter().map(|g| g.to_string()).collect();
    let r = &red.representative.chi;
    println!(
        "({:.3}{:+.3}i, {:.3}{:+.3}i) reduces by [{}] to ({:.3}{:+.3}i, {:.3}{:+.3}i) in face {}",
        moved.chi[0].re, moved.chi[0].im, moved.chi[1].re, moved.chi[1].im, w.join(" "),
        r[0].re, r[0].im, r[1].re, r[1].im,
        red.face.map(|f| f.to_string()).unwrap_or_else(|| "(wall)".into())
    );

    for chi in [[c(0.0, 0.7), c(0.0, 2.1)], [c(1.2, 0.0), c(0.0, 1.7)], [c(0.4, 0.0), c(1.5, 0.0)], [c(0.6, 0.0), c(1.1, std::f64::consts::PI)]] {
        let r = classify_causal(&ChiPoint::new(chi[0], chi[1]))?;
        println!("  χ = ({:.2}{:+.2}i, {:.2}{:+.2}i): region {} ({}) u = {:.4}, v = {:.4}", chi[0].re, chi[0].im, chi[1].re, chi[1].im, r.region, r.causal, r.u.re, r.v.re);
    }
    Ok(())
}
