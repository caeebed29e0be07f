// Pushing a relation forward to the moduli of curves.

use tautrel::relgen::pushforward_relation;
use tautrel::RelationSpec;

pub fn run() -> tautrel::Result<()> {
    let spec = RelationSpec::new(1, 2, 2, vec![1, 1], 2);
    let relation = pushforward_relation(&spec)?;
    println!("{} strata of degree {:?}", relation.len(), relation.degrees());
    for term in relation.to_json().iter().take(3) {
        println!("{}", serde_json::to_string(term).expect("terms serialize"));
    }
    println!("∫ relation = {}", relation.integrate()?);
    Ok(())
}

fn main() {
    run().expect("pushforward example");
}
