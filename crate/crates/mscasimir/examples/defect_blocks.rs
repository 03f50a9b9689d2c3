//! Defect pairs: root type B_N or D_N and the trivial-bimodule radial Casimir as L(k).
//!
//! cargo run -p mscasimir --example defect_blocks

use mscasimir::csmodels::defect_match;
use mscasimir::Result;

fn main() -> Result<()> {
    for (d, p) in [(4, 1), (5, 1), (6, 3), (5, 3)] {
        let rep = defect_match(d, p, 0)?;
        for c in &rep.cases {
            println!(
                "d={d} p={p} {:<5} {} (expected rank {}) mult ({:?}, {}) | L(k) residual {:.1e}",
                c.label, c.root_type, c.expected_rank, c.short_multiplicity, c.long_multiplicity, c.operator.residual
            );
        }
    }
    Ok(())
}
