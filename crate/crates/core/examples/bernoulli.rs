// Bernoulli numbers and Bernoulli polynomials at rational points.

use tautrel::exactnum::{bernoulli_number, bernoulli_poly, Rational};

pub fn run() -> tautrel::Result<()> {
    for n in [0, 1, 2, 4, 12] {
        println!("B_{n} = {}", bernoulli_number(n));
    }
    let half = Rational::new(1, 2);
    println!("B_2(1/2) = {}", bernoulli_poly(2, &half));
    println!("B_3(1/2) = {}", bernoulli_poly(3, &half));
    // reflection B_n(1 - x) = (-1)^n B_n(x)
    let x = Rational::new(2, 7);
    let left = bernoulli_poly(5, &(Rational::one() - &x));
    println!("B_5(5/7) = {left}, -B_5(2/7) = {}", -bernoulli_poly(5, &x));
    Ok(())
}

fn main() {
    run().expect("bernoulli example");
}
