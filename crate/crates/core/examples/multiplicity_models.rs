// The torsion multiplicities used when forgetting residues, against alternatives.

use tautrel::relgen::MultiplicityModel;
use tautrel::verify::{verify_with, VerifyOptions};
use tautrel::RelationSpec;

pub fn run() -> tautrel::Result<()> {
    let specs = [RelationSpec::new(1, 1, 2, vec![0], 1).nontrivial(), RelationSpec::new(1, 2, 2, vec![1, 1], 2)];
    let models = [
        ("root count", MultiplicityModel::FROZEN),
        ("r^E", MultiplicityModel::edge_power(1)),
        ("r^0", MultiplicityModel::edge_power(0)),
        ("r^-E", MultiplicityModel::edge_power(-1)),
    ];
    for (name, model) in models {
        let values: Vec<String> = specs
            .iter()
            .map(|s| {
                let options = VerifyOptions { model, ..Default::default() };
                verify_with(s, &options).map(|r| r.pairings[0].value.to_string())
            })
            .collect::<tautrel::Result<_>>()?;
        println!("{name:>10}: {values:?}");
    }
    Ok(())
}

fn main() {
    run().expect("multiplicity example");
}
