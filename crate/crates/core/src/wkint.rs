//! Intersection numbers of ψ and κ classes on moduli of stable curves.
//!
//! Pure ψ integrals `<τ_{d_1} ... τ_{d_n}>_g` come from the DVV recursion,
//! seeded only by `<τ_0^3>_0 = 1`; the string and dilaton equations strip
//! exponents 0 and 1 first. κ classes use the degree-`a` convention
//! `κ_a = π_*(ψ_{n+1}^{a+1})` and are reduced to ψ integrals on spaces with
//! extra marked points.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PsiMonomial {
    pub genus: u32,
    pub exponents: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KappaPsiMonomial {
    pub genus: u32,
    pub psi_exponents: Vec<u32>,
    /// Multiset of κ indices, each at least 1.
    pub kappa_indices: Vec<u32>,
}

impl PsiMonomial {
    pub fn new(genus: u32, exponents: Vec<u32>) -> Self {
        PsiMonomial { genus, exponents }
    }
}

impl KappaPsiMonomial {
    pub fn new(genus: u32, psi_exponents: Vec<u32>, kappa_indices: Vec<u32>) -> Self {
        KappaPsiMonomial { genus, psi_exponents, kappa_indices }
    }

    pub fn degree(&self) -> u64 {
        self.psi_exponents.iter().chain(&self.kappa_indices).map(|&x| x as u64).sum()
    }
}

fn dim(g: u32, n: usize) -> i64 {
    3 * g as i64 - 3 + n as i64
}

fn check(g: u32, n: usize, degree: u64) -> Result<()> {
    if 2 * g as i64 - 2 + n as i64 <= 0 {
        return Err(Error::Parameter(format!("(g,n)=({g},{n}) is unstable")));
    }
    if degree as i64 != dim(g, n) {
        return Err(Error::Dimension(format!(
            "degree {degree} differs from dim {} of the (g,n)=({g},{n}) moduli space",
            dim(g, n)
        )));
    }
    Ok(())
}

/// `<τ_{d_1} ... τ_{d_n}>_g`.
pub fn psi_integral(m: &PsiMonomial) -> Result<Rational> {
    check(m.genus, m.exponents.len(), m.exponents.iter().map(|&x| x as u64).sum())?;
    Ok(IntersectionTable::global().psi(m.genus, &m.exponents))
}

/// Integral of `Π ψ_i^{d_i} Π κ_{b_j}` over the moduli space.
pub fn kappa_psi_integral(m: &KappaPsiMonomial) -> Result<Rational> {
    if m.kappa_indices.contains(&0) {
        return Err(Error::Parameter("κ indices must be positive".into()));
    }
    check(m.genus, m.psi_exponents.len(), m.degree())?;
    Ok(IntersectionTable::global().kappa_psi(m.genus, &m.psi_exponents, &m.kappa_indices))
}

/// Memo tables for ψ and κ-ψ integrals.
#[derive(Debug, Default)]
pub struct IntersectionTable {
    psi: RwLock<HashMap<(u32, Vec<u32>), Rational>>,
    kappa: RwLock<HashMap<(u32, Vec<u32>, Vec<u32>), Rational>>,
}

/// `(2k+1)!!` for `k >= -1`, with `(-1)!! = 1`.
fn odd_double_factorial(two_k_plus_one: i64) -> BigInt {
    let mut acc = BigInt::one();
    let mut m = two_k_plus_one;
    while m > 1 {
        acc *= m;
        m -= 2;
    }
    acc
}

fn df(x: i64) -> Rational {
    Rational::from_bigint(odd_double_factorial(x))
}

impl IntersectionTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn global() -> &'static IntersectionTable {
        static TABLE: OnceLock<IntersectionTable> = OnceLock::new();
        TABLE.get_or_init(IntersectionTable::new)
    }

    /// Number of memoized ψ integrals.
    pub fn len(&self) -> usize {
        self.psi.read().expect("poisoned table").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Snapshot of every memoized ψ integral, keyed by genus and exponents
    /// sorted in decreasing order.
    pub fn snapshot(&self) -> Vec<((u32, Vec<u32>), Rational)> {
        let mut v: Vec<_> = self
            .psi
            .read()
            .expect("poisoned table")
            .iter()
            .map(|(k, x)| (k.clone(), x.clone()))
            .collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    /// ψ integral; zero outside the stable range or off the degree condition.
    pub fn psi(&self, g: u32, exponents: &[u32]) -> Rational {
        let n = exponents.len();
        if 2 * g as i64 - 2 + n as i64 <= 0 {
            return Rational::zero();
        }
        let total: i64 = exponents.iter().map(|&x| x as i64).sum();
        if total != dim(g, n) {
            return Rational::zero();
        }
        let mut key = exponents.to_vec();
        key.sort_unstable_by(|a, b| b.cmp(a));
        if let Some(v) = self.psi.read().expect("poisoned table").get(&(g, key.clone())) {
            return v.clone();
        }
        let value = self.psi_uncached(g, &key);
        self.psi.write().expect("poisoned table").insert((g, key), value.clone());
        value
    }

    fn psi_uncached(&self, g: u32, sorted: &[u32]) -> Rational {
        let n = sorted.len();
        if g == 0 && n == 3 {
            // dimension check already forced all exponents to zero
            return Rational::one();
        }
        if g == 1 && n == 1 {
            return self.tau1_genus1();
        }
        // string equation
        if let Some(pos) = sorted.iter().position(|&d| d == 0) {
            let mut rest = sorted.to_vec();
            rest.remove(pos);
            let mut acc = Rational::zero();
            for j in 0..rest.len() {
                if rest[j] > 0 {
                    let mut lowered = rest.clone();
                    lowered[j] -= 1;
                    acc += self.psi(g, &lowered);
                }
            }
            return acc;
        }
        // dilaton equation
        if let Some(pos) = sorted.iter().position(|&d| d == 1) {
            let mut rest = sorted.to_vec();
            rest.remove(pos);
            let factor = Rational::from_integer(2 * g as i64 - 2 + rest.len() as i64);
            return factor * self.psi(g, &rest);
        }
        // DVV on the largest exponent, which is at least 2
        let k = sorted[0] as i64 - 1;
        let rest = &sorted[1..];
        self.dvv(g, k, rest)
    }

    /// Right-hand side of the DVV recursion for `<τ_{k+1} τ_S>_g`.
    fn dvv(&self, g: u32, k: i64, rest: &[u32]) -> Rational {
        let mut acc = Rational::zero();
        for j in 0..rest.len() {
            let dj = rest[j] as i64;
            let mut others: Vec<u32> = rest.to_vec();
            others[j] = (k + dj) as u32;
            acc += df(2 * k + 2 * dj + 1) / df(2 * dj - 1) * self.psi(g, &others);
        }
        let half = Rational::new(1, 2);
        for a in 0..k {
            let b = k - 1 - a;
            let weight = df(2 * a + 1) * df(2 * b + 1) * &half;
            if g >= 1 {
                let mut e = rest.to_vec();
                e.push(a as u32);
                e.push(b as u32);
                acc += &weight * self.psi(g - 1, &e);
            }
            let m = rest.len();
            for mask in 0u64..(1 << m) {
                let (mut left, mut right) = (vec![a as u32], vec![b as u32]);
                for (i, &d) in rest.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        left.push(d)
                    } else {
                        right.push(d)
                    }
                }
                for g1 in 0..=g {
                    let l = self.psi(g1, &left);
                    if l.is_zero() {
                        continue;
                    }
                    acc += &weight * l * self.psi(g - g1, &right);
                }
            }
        }
        acc / df(2 * k + 3)
    }

    /// `<τ_1>_1`, solved from DVV for `<τ_2 τ_0>_1` and the string equation
    /// `<τ_2 τ_0>_1 = <τ_1>_1`.
    fn tau1_genus1(&self) -> Rational {
        // <τ_2 τ_0>_1 = (1/5!!) [ 3!!/(-1)!! <τ_1>_1 + 1/2 <τ_0^3>_0 ]
        let k = 1;
        let own = df(2 * k + 1) / df(-1) / df(2 * k + 3);
        let split = Rational::new(1, 2) * self.psi(0, &[0, 0, 0]) / df(2 * k + 3);
        split / (Rational::one() - own)
    }

    /// κ-ψ integral; zero off the degree condition.
    pub fn kappa_psi(&self, g: u32, psi: &[u32], kappa: &[u32]) -> Rational {
        if kappa.is_empty() {
            return self.psi(g, psi);
        }
        let n = psi.len();
        if 2 * g as i64 - 2 + n as i64 <= 0 {
            return Rational::zero();
        }
        let total: i64 = psi.iter().chain(kappa).map(|&x| x as i64).sum();
        if total != dim(g, n) {
            return Rational::zero();
        }
        let mut kkey = kappa.to_vec();
        kkey.sort_unstable();
        let mut pkey = psi.to_vec();
        pkey.sort_unstable_by(|a, b| b.cmp(a));
        let key = (g, pkey, kkey);
        if let Some(v) = self.kappa.read().expect("poisoned table").get(&key) {
            return v.clone();
        }
        // κ_b X = π_*(ψ_{n+1}^{b+1} π^*X), π^*κ_c = κ_c - ψ_{n+1}^c
        let (last, others) = key.2.split_last().expect("nonempty");
        let m = others.len();
        let mut value = Rational::zero();
        for mask in 0u64..(1 << m) {
            let mut exp = last + 1;
            let mut kept = vec![];
            for (i, &c) in others.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    exp += c;
                } else {
                    kept.push(c);
                }
            }
            let mut p = key.1.clone();
            p.push(exp);
            let term = self.kappa_psi(g, &p, &kept);
            if mask.count_ones() % 2 == 0 {
                value += term;
            } else {
                value -= term;
            }
        }
        self.kappa.write().expect("poisoned table").insert(key, value.clone());
        value
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn psi(g: u32, e: &[u32]) -> Rational {
        psi_integral(&PsiMonomial::new(g, e.to_vec())).unwrap()
    }

    #[test]
    fn seeds_and_known_values() {
        assert_eq!(psi(0, &[0, 0, 0]), Rational::one());
        assert_eq!(psi(0, &[1, 0, 0, 0]), Rational::one());
        assert_eq!(psi(1, &[1]), Rational::new(1, 24));
        assert_eq!(psi(2, &[4]), Rational::new(1, 1152));
        assert_eq!(psi(2, &[3, 2]), Rational::new(29, 5760));
        assert_eq!(psi(2, &[2, 2, 2]), Rational::new(7, 240));
        assert_eq!(psi(3, &[7]), Rational::new(1, 82944));
        assert_eq!(psi(0, &[2, 1, 0, 0, 0, 0]), Rational::from_integer(3));
    }

    #[test]
    fn degree_and_stability_errors() {
        assert!(matches!(
            psi_integral(&PsiMonomial::new(0, vec![1, 0, 0])),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(psi_integral(&PsiMonomial::new(0, vec![0, 0])), Err(Error::Parameter(_))));
    }

    #[test]
    fn kappa_examples() {
        let k = |g, p: &[u32], kk: &[u32]| {
            kappa_psi_integral(&KappaPsiMonomial::new(g, p.to_vec(), kk.to_vec())).unwrap()
        };
        assert_eq!(k(1, &[0], &[1]), Rational::new(1, 24));
        assert_eq!(k(0, &[0, 0, 0, 0], &[1]), Rational::one());
        assert_eq!(k(0, &[0, 0, 0, 0, 0], &[1, 1]), Rational::from_integer(5));
        assert_eq!(k(0, &[1, 0, 0, 0, 0], &[1]), Rational::from_integer(3));
        assert_eq!(k(1, &[1], &[]), psi(1, &[1]));
        // κ_1 on M_{2,0}-type checks: <κ_3>_2 = 1/1152 (Faber)
        assert_eq!(k(2, &[], &[3]), Rational::new(1, 1152));
    }
}
