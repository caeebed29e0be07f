//! Bernoulli numbers and polynomials against power-series division.

use proptest::prelude::*;
use tautrel::exactnum::{bernoulli_number, bernoulli_poly, factorial, Rational};

const N: usize = 20;

fn inv_fact(k: usize) -> Rational {
    Rational::from_bigint(factorial(k as u32)).recip()
}

/// Coefficients of `1 / f` up to `t^N`, for `f(0) = 1`.
fn invert(f: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::one()];
    for k in 1..=N {
        let s: Rational = (1..=k).map(|j| &f[j] * &out[k - j]).sum();
        out.push(-s);
    }
    out
}

/// `t / (e^t - 1)`; its coefficients are `B_n / n!`.
fn todd_series() -> Vec<Rational> {
    invert(&(0..=N).map(|k| inv_fact(k + 1)).collect::<Vec<_>>())
}

/// `B_n(x)` from the coefficient of `t^n` in `t e^{xt} / (e^t - 1)`.
fn poly_oracle(n: usize, x: &Rational) -> Rational {
    let todd = todd_series();
    let exp: Vec<Rational> = (0..=n).map(|k| x.pow(k as i32) * inv_fact(k)).collect();
    let coeff: Rational = (0..=n).map(|k| &todd[k] * &exp[n - k]).sum();
    coeff * Rational::from_bigint(factorial(n as u32))
}

#[test]
fn numbers_match_series_division() {
    let todd = todd_series();
    for (n, c) in todd.iter().enumerate() {
        assert_eq!(bernoulli_number(n), c * Rational::from_bigint(factorial(n as u32)), "B_{n}");
    }
}

#[test]
fn odd_numbers_vanish_past_one() {
    for n in (3..=N).step_by(2) {
        assert!(bernoulli_number(n).is_zero());
    }
}

fn rational() -> impl Strategy<Value = Rational> {
    (-40i64..40, 1i64..13).prop_map(|(p, q)| Rational::new(p, q))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn polynomials_match_series_division(x in rational()) {
        for n in 0..=N {
            prop_assert_eq!(bernoulli_poly(n, &x), poly_oracle(n, &x));
        }
    }

    #[test]
    fn reflection_identity(x in rational()) {
        for n in 0..=N {
            let sign = Rational::from_integer(if n % 2 == 0 { 1 } else { -1 });
            prop_assert_eq!(bernoulli_poly(n, &(Rational::one() - &x)), sign * bernoulli_poly(n, &x));
        }
    }

    #[test]
    fn difference_identity(x in rational()) {
        for n in 1..=N {
            let diff = bernoulli_poly(n, &(&x + &Rational::one())) - bernoulli_poly(n, &x);
            prop_assert_eq!(diff, Rational::from_integer(n as i64) * x.pow(n as i32 - 1));
        }
    }
}
