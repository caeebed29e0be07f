//! Algebraic invariants checked on random inputs.

use std::sync::OnceLock;

use proptest::prelude::*;
use tautrel::exactnum::Rational;
use tautrel::relgen::{exp_series_relation_with, pushforward_relation_with, relation_bzr_with, MultiplicityModel};
use tautrel::strata::{Limits, TautExpr};
use tautrel::verify::{complementary_monomials, verify_relation, verify_with, VerifyOptions};
use tautrel::wkint::{psi_integral, PsiMonomial};
use tautrel::RelationSpec;

const TYPES: [(u32, u32); 4] = [(0, 4), (0, 5), (1, 1), (1, 2)];

/// Spanning monomials of every degree, per ambient in `TYPES`.
fn bases() -> &'static Vec<Vec<Vec<TautExpr>>> {
    static BASES: OnceLock<Vec<Vec<Vec<TautExpr>>>> = OnceLock::new();
    BASES.get_or_init(|| {
        TYPES
            .iter()
            .map(|&(g, n)| (0..=3 * g + n - 3).map(|d| complementary_monomials(g, n, d).unwrap()).collect())
            .collect()
    })
}

/// A homogeneous combination of up to three monomials.
fn homogeneous(ty: usize) -> impl Strategy<Value = TautExpr> {
    let dim = bases()[ty].len() - 1;
    (0..=dim).prop_flat_map(move |d| {
        let basis = &bases()[ty][d];
        prop::collection::vec((0..basis.len(), -3i64..=3), 1..=3).prop_map(move |picks| {
            picks.iter().fold(TautExpr::zero(basis[0].ambient().clone()), |acc, &(i, c)| {
                acc.add(&bases()[ty][d][i].scale(&Rational::from_integer(c))).unwrap()
            })
        })
    })
}

fn triple() -> impl Strategy<Value = (TautExpr, TautExpr, TautExpr)> {
    (0..TYPES.len()).prop_flat_map(|ty| (homogeneous(ty), homogeneous(ty), homogeneous(ty)))
}

fn psi(g: u32, e: &[u32]) -> Rational {
    psi_integral(&PsiMonomial::new(g, e.to_vec())).unwrap()
}

/// Weakly decreasing exponent vectors of length `n` summing to `total`.
fn sorted_vectors(n: usize, total: u32, cap: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = vec![];
    for first in (0..=total.min(cap)).rev() {
        for mut rest in sorted_vectors(n - 1, total - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

#[test]
fn string_and_dilaton_hold_up_to_dimension_six() {
    let mut checked = 0;
    for g in 0..=3u32 {
        for n in 1..=9u32 {
            let dim = 3 * g as i64 - 3 + n as i64;
            if 2 * g as i64 - 2 + n as i64 <= 0 || !(0..=6).contains(&dim) {
                continue;
            }
            for e in sorted_vectors(n as usize, dim as u32, dim as u32) {
                let rest = &e[..e.len() - 1];
                let smaller_stable = 2 * g as i64 - 2 + n as i64 - 1 > 0;
                match e.last() {
                    Some(0) if smaller_stable => {
                        let expected: Rational = (0..rest.len())
                            .filter(|&j| rest[j] > 0)
                            .map(|j| {
                                let mut lowered = rest.to_vec();
                                lowered[j] -= 1;
                                psi(g, &lowered)
                            })
                            .sum();
                        assert_eq!(psi(g, &e), expected, "string at g={g} {e:?}");
                        checked += 1;
                    }
                    Some(1) if smaller_stable => {
                        let factor = Rational::from_integer(2 * g as i64 - 2 + n as i64 - 1);
                        // rest may carry a second ψ_1; move the τ_1 being removed to the end
                        let mut others = e.clone();
                        let pos = others.iter().position(|&x| x == 1).unwrap();
                        others.remove(pos);
                        assert_eq!(psi(g, &e), factor * psi(g, &others), "dilaton at g={g} {e:?}");
                        checked += 1;
                    }
                    _ => {}
                }
            }
        }
    }
    assert!(checked > 50, "only {checked} instances");
}

/// Synthetic specs; the degree cap per type keeps the formal expansion small.
fn spec_strategy() -> impl Strategy<Value = RelationSpec> {
    let types = [(0u32, 4u32, 1u32), (0, 5, 2), (1, 1, 1), (1, 2, 2), (1, 3, 3), (2, 1, 4), (2, 2, 4), (3, 1, 6)];
    (prop::sample::select(types.to_vec()), 2u32..=3)
        .prop_flat_map(|((g, n, cap), r)| (Just((g, n, r)), prop::collection::vec(0..r, n as usize - 1), 1..=cap))
        .prop_map(|((g, n, r), mut a, d)| {
            let s: u32 = a.iter().sum();
            a.push((r - s % r) % r);
            let mut spec = RelationSpec::new(g, n, r, a, d);
            spec.nontrivial_component = spec.a.iter().all(|&x| x == 0);
            spec
        })
        .prop_filter("valid", |s| s.validate_structure().is_ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn psi_integrals_are_symmetric(g in 0u32..=2, seed in prop::collection::vec(0u32..4, 1..=5), shift in 0usize..5) {
        let n = seed.len() as i64;
        let dim = 3 * g as i64 - 3 + n;
        prop_assume!(2 * g as i64 - 2 + n > 0 && dim >= 0);
        // spread the dimension over the legs following the seed
        let mut e = vec![0u32; seed.len()];
        let mut left = dim as u32;
        for (i, &s) in seed.iter().enumerate() {
            let take = s.min(left);
            e[i] = take;
            left -= take;
        }
        e[0] += left;
        let mut rotated = e.clone();
        rotated.rotate_left(shift % e.len());
        let mut reversed = e.clone();
        reversed.reverse();
        prop_assert_eq!(psi(g, &e), psi(g, &rotated));
        prop_assert_eq!(psi(g, &e), psi(g, &reversed));
    }

    #[test]
    fn product_is_commutative_and_graded((x, y, _) in triple()) {
        let xy = x.multiply(&y).unwrap();
        prop_assert_eq!(&xy, &y.multiply(&x).unwrap());
        if !xy.is_empty() {
            let expected = x.homogeneous_degree().unwrap() + y.homogeneous_degree().unwrap();
            prop_assert_eq!(xy.homogeneous_degree(), Some(expected));
        }
    }

    #[test]
    fn product_is_associative_with_unit((x, y, z) in triple()) {
        let one = TautExpr::fundamental(x.ambient().clone());
        prop_assert_eq!(&one.multiply(&x).unwrap(), &x);
        let left = x.multiply(&y).unwrap().multiply(&z).unwrap();
        let right = x.multiply(&y.multiply(&z).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn swapping_edge_sides_is_invisible(ty in 0..TYPES.len(), d in 0u32..=2, pick in any::<prop::sample::Index>()) {
        let basis = &bases()[ty];
        prop_assume!((d as usize) < basis.len());
        let m = pick.get(&basis[d as usize]);
        let (s, _) = m.terms().next().unwrap();
        for e in 0..s.graph.num_edges() {
            prop_assert_eq!(s.swap_edge(e).canonicalize(), s.canonicalize());
        }
    }

}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn partition_sum_equals_exponential_series(s in spec_strategy()) {
        let partition = relation_bzr_with(&s, true).unwrap().normal_form();
        prop_assert_eq!(partition, exp_series_relation_with(&s, true).unwrap());
    }
}

#[test]
fn rescaling_preserves_vanishing() {
    let factor = Rational::new(7, 3);
    let limits = Limits::default();
    let cases = [
        (RelationSpec::new(0, 5, 2, vec![1, 1, 1, 1, 0], 2), true),
        (RelationSpec::new(1, 2, 3, vec![1, 2], 2), true),
        (RelationSpec::new(0, 5, 2, vec![1, 1, 1, 1, 0], 1), false),
    ];
    for (s, vanishes) in cases {
        let relation = pushforward_relation_with(&s, MultiplicityModel::FROZEN, &limits, true).unwrap();
        let plain = verify_relation(&s, &relation, &limits).unwrap();
        let scaled = verify_relation(&s, &relation.scale(&factor), &limits).unwrap();
        assert_eq!(plain.all_zero, vanishes);
        assert_eq!(scaled.all_zero, vanishes);
        for (p, q) in plain.pairings.iter().zip(&scaled.pairings) {
            assert_eq!(&p.value * &factor, q.value);
        }
    }
}

fn sorted_values(s: &RelationSpec) -> Vec<Rational> {
    let options = VerifyOptions { allow_out_of_window: true, ..Default::default() };
    let mut v: Vec<Rational> = verify_with(s, &options).unwrap().pairings.into_iter().map(|p| p.value).collect();
    v.sort_by(|a, b| a.as_big().cmp(b.as_big()));
    v
}

#[test]
fn verification_is_deterministic() {
    let s = RelationSpec::new(1, 3, 3, vec![1, 1, 1], 2);
    let options = VerifyOptions::default();
    let a = verify_with(&s, &options).unwrap();
    let b = verify_with(&s, &options).unwrap();
    assert_eq!(a.pairings, b.pairings);
    assert!(a.all_zero);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn relabeling_legs_permutes_pairings(perm in Just(vec![0usize, 1, 2, 3, 4]).prop_shuffle()) {
        let a = [1u32, 1, 1, 1, 2];
        let base = RelationSpec::new(0, 5, 3, a.to_vec(), 1);
        let permuted = RelationSpec::new(0, 5, 3, perm.iter().map(|&i| a[i]).collect(), 1);
        prop_assert_eq!(sorted_values(&base), sorted_values(&permuted));
        let top = RelationSpec { d: 2, ..permuted };
        prop_assert!(verify_with(&top, &VerifyOptions::default()).unwrap().all_zero);
    }
}
