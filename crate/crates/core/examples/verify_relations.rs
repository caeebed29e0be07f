// Vanishing certificates, and a control that does not vanish.

use tautrel::verify::{verify, verify_with, VerifyOptions};
use tautrel::RelationSpec;

pub fn run() -> tautrel::Result<()> {
    let specs = [
        RelationSpec::new(0, 5, 2, vec![1, 1, 1, 1, 0], 2),
        RelationSpec::new(1, 1, 2, vec![0], 1).nontrivial(),
        RelationSpec::new(1, 3, 3, vec![1, 1, 1], 2),
    ];
    for spec in &specs {
        let report = verify(spec)?;
        println!(
            "g={} n={} r={} a={:?} d={}: {} monomials, all zero: {}",
            spec.g, spec.n, spec.r, spec.a, spec.d, report.monomials_paired, report.all_zero
        );
    }
    let below = RelationSpec::new(0, 5, 2, vec![1, 1, 1, 1, 0], 1);
    let options = VerifyOptions { allow_out_of_window: true, ..Default::default() };
    let report = verify_with(&below, &options)?;
    let nonzero = report.pairings.iter().filter(|p| !p.value.is_zero()).count();
    println!("degree at the rank: {nonzero} of {} pairings nonzero", report.monomials_paired);
    Ok(())
}

fn main() {
    run().expect("verify example");
}
