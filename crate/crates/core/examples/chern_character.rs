// Chern character of the derived pushforward of the universal root.

use tautrel::chiodo::{chiodo_chern_char, coarse_degree, validate_spec, RelationSpec};

pub fn run() -> tautrel::Result<()> {
    let spec = validate_spec(&RelationSpec::new(1, 2, 3, vec![1, 2], 2))?;
    println!("coarse degree {}, virtual rank {}", coarse_degree(&spec.a, spec.r)?, spec.virtual_rank());
    for d in 1..=2 {
        let ch = chiodo_chern_char(&spec, d)?;
        println!("ch_{d}: κ {} ψ {:?}", ch.kappa_coeff, ch.psi_coeffs);
        for t in &ch.sep_terms {
            println!("  sep l={} I={:?} q={}: {}", t.genus, t.legs, t.q, t.coeff);
        }
        for t in &ch.irr_terms {
            println!("  irr q={}: {}", t.q, t.coeff);
        }
    }
    Ok(())
}

fn main() {
    run().expect("chern example");
}
