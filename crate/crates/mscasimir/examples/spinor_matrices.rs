//! The d = 3 spinor case in exact arithmetic: K/L matrices on End(ℂ²) and their gauge transforms.
//!
//! cargo run -p mscasimir --example spinor_matrices

use mscasimir::csmodels::{gauge_conjugate, spinor_match, spinor_spec};
use mscasimir::radial::{k_l_matrices, Bimodule, RootSpaces};
use mscasimir::scalar::{q, CQ, Q};
use mscasimir::Result;
use nalgebra::DMatrix;

fn show(name: &str, m: &DMatrix<CQ>) {
    println!("  {name}");
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:>8}", m[(i, j)].re.to_string())).collect();
        println!("    {}", row.join(" "));
    }
}

fn main() -> Result<()> {
    let (a, b) = (q(2, 1), q(3, 1));
    let spec = spinor_spec()?;
    let rs = RootSpaces::<CQ>::build(&spec, 0)?;
    let w = Bimodule::<CQ>::spinor(&rs.alg, CQ::new(a.clone(), Q::from_integer(0.into())), CQ::new(b.clone(), Q::from_integer(0.into())))?;
    let tables = k_l_matrices(&rs, &w)?;
    println!("α = {a}, β = {b}");
    for root in [vec![q(1, 2), q(1, 2)], vec![q(1, 2), q(-1, 2)], vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]] {
        let pm = &tables[&root];
        let r: Vec<String> = root.iter().map(|x| x.to_string()).collect();
        show(&format!("K_2γ, γ = ({})", r.join(", ")), &pm.k);
        show(&format!("L_γ,  γ = ({})", r.join(", ")), &pm.l);
        show(&format!("gauged K_2γ, γ = ({})", r.join(", ")), &gauge_conjugate(&pm.k));
    }
    for (a, b) in [(1, 0), (2, 3), (-1, 1)] {
        let rep = spinor_match(&q(a, 1), &q(b, 1), 0)?;
        let ok = rep.cases.iter().filter(|c| c.matches).count();
        println!("(α, β) = ({a}, {b}): {ok}/{} tables match exactly", rep.cases.len());
    }
    Ok(())
}
