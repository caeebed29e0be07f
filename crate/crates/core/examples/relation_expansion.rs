// The partition sum and the exponential series give the same relation.

use tautrel::relgen::{exp_series_relation, relation_bzr};
use tautrel::RelationSpec;

pub fn run() -> tautrel::Result<()> {
    let spec = RelationSpec::new(0, 5, 2, vec![1, 1, 1, 1, 0], 2);
    let rel = relation_bzr(&spec)?;
    for t in &rel.terms {
        println!("parts {:?} coefficient {}", t.parts, t.coeff);
    }
    let nf = rel.normal_form();
    println!("{} monomials; ψ1² coefficient {}", nf.len(), nf.psi_coefficient(&[2, 0, 0, 0, 0]));
    println!("routes agree: {}", nf == exp_series_relation(&spec)?);
    Ok(())
}

fn main() {
    run().expect("expansion example");
}
