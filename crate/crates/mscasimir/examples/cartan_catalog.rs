//! The eight Lorentzian Cartan subsets: generators, inhomogeneity t, ε tables,
//! and how well Ad(t) = εφ holds for each table.
//!
//! cargo run -p mscasimir --example cartan_catalog

use mscasimir::cartan::{catalog, i_power, PairKind};
use mscasimir::liealg::Signature;
use mscasimir::radial::epsilon_check;
use mscasimir::Result;

fn main() -> Result<()> {
    let sig = Signature::new(3, 1)?;
    for spec in catalog(sig, PairKind::FourPoint)? {
        let (_, dec) = spec.decompose(0)?;
        let info = dec.classify();
        let eps: Vec<String> = spec.epsilon.exponents.iter().map(|e| fmt_unit(i_power(*e))).collect();
        let op = epsilon_check(&spec, &spec.epsilon, 0)?;
        print!("C_{:<6} t = {:<14} {} ({:?},{}) ε = [{}] residual {:.1e}", spec.label.to_string(), spec.t_name, info.name, info.short_multiplicity, info.long_multiplicity, eps.join(", "), op.max_residual());
        if let Some(st) = &spec.epsilon_stated {
            if st != &spec.epsilon {
                let chk = epsilon_check(&spec, st, 0)?;
                let s: Vec<String> = st.exponents.iter().map(|e| fmt_unit(i_power(*e))).collect();
                print!("  | tabulated ε = [{}] residual {:.1e}", s.join(", "), chk.max_residual());
            }
        }
        println!();
        if let Some(c) = &spec.caveat {
            println!("        note: {c}");
        }
    }
    Ok(())
}

fn fmt_unit(z: mscasimir::scalar::C64) -> String {
    match (z.re.round() as i64, z.im.round() as i64) {
        (1, 0) => "1".into(),
        (-1, 0) => "-1".into(),
        (0, 1) => "i".into(),
        _ => "-i".into(),
    }
}
