// Products and integrals in the strata algebra.

use tautrel::graphs::{StableGraph, Vertex};
use tautrel::strata::{Ambient, TautExpr};

fn divisor(ambient: &Ambient, left: &[u32]) -> tautrel::Result<TautExpr> {
    let right = (1..=ambient.n).filter(|i| !left.contains(i)).collect();
    let graph = StableGraph::new(
        vec![Vertex { genus: 0, legs: left.to_vec() }, Vertex { genus: 0, legs: right }],
        vec![0, 1],
        vec![[0, 1]],
    )?;
    TautExpr::stratum(ambient.clone(), graph)
}

pub fn run() -> tautrel::Result<()> {
    let m05 = Ambient::new(0, 5)?;
    let d12 = divisor(&m05, &[1, 2])?;
    let d45 = divisor(&m05, &[4, 5])?;
    println!("D12·D45 = {}", d12.multiply(&d45)?);
    println!("∫ D12·D45 = {}", d12.pairing(&d45)?);
    println!("∫ D12² = {}", d12.pairing(&d12)?);
    let psi1 = TautExpr::psi(m05.clone(), 1, 1)?;
    println!("∫ ψ1·D12 = {}", psi1.pairing(&d12)?);
    let m11 = Ambient::new(1, 1)?;
    let loop_graph = StableGraph::new(vec![Vertex { genus: 0, legs: vec![1] }], vec![0, 0], vec![[0, 1]])?;
    println!("∫ δ_irr on (1,1) = {}", TautExpr::stratum(m11.clone(), loop_graph)?.integrate()?);
    println!("∫ κ1 on (1,1) = {}", TautExpr::kappa(m11, 1)?.integrate()?);
    Ok(())
}

fn main() {
    run().expect("strata example");
}
