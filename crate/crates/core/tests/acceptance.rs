//! Acceptance run: one PASS/FAIL line per criterion, with timings.
//! All comparisons are exact; the only tolerances are the runtime budgets.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use proptest::prelude::RngExt;
use proptest::test_runner::{RngAlgorithm, TestRng};
use tautrel::chiodo::{validate_spec, SpecError};
use tautrel::exactnum::{bernoulli_number, bernoulli_poly, factorial, Rational};
use tautrel::graphs::{StableGraph, Vertex};
use tautrel::relgen::{exp_series_relation, exp_series_relation_with, relation_bzr, relation_bzr_with, MultiplicityModel};
use tautrel::strata::{Ambient, TautExpr};
use tautrel::verify::{complementary_monomials, verify_relation, verify_with, VerifyOptions};
use tautrel::wkint::{psi_integral, IntersectionTable, PsiMonomial};
use tautrel::{Error, RelationSpec};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn rng() -> TestRng {
    TestRng::deterministic_rng(RngAlgorithm::ChaCha)
}

fn main_cases() -> Vec<RelationSpec> {
    vec![
        RelationSpec::new(0, 5, 2, vec![1, 1, 1, 1, 0], 2),
        RelationSpec::new(0, 6, 2, vec![1; 6], 3),
        RelationSpec::new(1, 2, 2, vec![1, 1], 2),
        RelationSpec::new(1, 2, 3, vec![1, 2], 2),
        RelationSpec::new(1, 1, 2, vec![0], 1).nontrivial(),
    ]
}

fn inv_fact(k: usize) -> Rational {
    Rational::from_bigint(factorial(k as u32)).recip()
}

fn bernoulli_suite() -> Outcome {
    const N: usize = 20;
    // t/(e^t - 1) by inverting Σ t^k/(k+1)!
    let f: Vec<Rational> = (0..=N).map(|k| inv_fact(k + 1)).collect();
    let mut todd = vec![Rational::one()];
    for k in 1..=N {
        let s: Rational = (1..=k).map(|j| &f[j] * &todd[k - j]).sum();
        todd.push(-s);
    }
    for n in 0..=N {
        ensure(bernoulli_number(n) == &todd[n] / &inv_fact(n), format!("B_{n}"))?;
    }
    let mut rng = rng();
    for _ in 0..50 {
        let x = Rational::new(rng.random_range(-40..40), rng.random_range(1..13));
        for n in 0..=N {
            let series: Rational = (0..=n).map(|k| &todd[k] * x.pow((n - k) as i32) * inv_fact(n - k)).sum();
            let value = bernoulli_poly(n, &x);
            ensure(value == series / inv_fact(n), format!("B_{n}({x})"))?;
            let sign = Rational::from_integer(if n % 2 == 0 { 1 } else { -1 });
            ensure(bernoulli_poly(n, &(Rational::one() - &x)) == sign * &value, format!("reflection n={n} x={x}"))?;
            if n > 0 {
                let diff = bernoulli_poly(n, &(&x + &Rational::one())) - &value;
                ensure(diff == Rational::from_integer(n as i64) * x.pow(n as i32 - 1), format!("difference n={n}"))?;
            }
        }
    }
    Ok(format!("n ≤ {N}, 50 random arguments"))
}

fn psi(g: u32, e: &[u32]) -> Rational {
    psi_integral(&PsiMonomial::new(g, e.to_vec())).expect("in-dimension monomial")
}

fn intersection_suite() -> Outcome {
    ensure(psi(0, &[0, 0, 0]).is_one(), "<τ_0^3>_0")?;
    ensure(psi(1, &[1]) == Rational::new(1, 24), "<τ_1>_1")?;
    // fill the table with every monomial up to dimension 6
    for g in 0..=3u32 {
        for n in 1..=9u32 {
            let dim = 3 * g as i64 - 3 + n as i64;
            if 2 * g as i64 - 2 + n as i64 > 0 && (0..=6).contains(&dim) {
                let mut e = vec![0u32; n as usize];
                fill(&mut e, 0, dim as u32, &mut |e| {
                    psi(g, e);
                });
            }
        }
    }
    let mut checked = 0;
    for ((g, e), value) in IntersectionTable::global().snapshot() {
        let n = e.len() as i64;
        let dim = 3 * g as i64 - 3 + n;
        if dim > 6 || 2 * g as i64 - 3 + n <= 0 {
            continue;
        }
        // sorted decreasing, so a 0 or 1 sits at the end if present
        let mut rest = e.clone();
        if let Some(pos) = rest.iter().position(|&x| x == 0) {
            rest.remove(pos);
            let expected: Rational = (0..rest.len())
                .filter(|&j| rest[j] > 0)
                .map(|j| {
                    let mut lowered = rest.clone();
                    lowered[j] -= 1;
                    psi(g, &lowered)
                })
                .sum();
            ensure(value == expected, format!("string g={g} {e:?}"))?;
            checked += 1;
        } else if let Some(pos) = rest.iter().position(|&x| x == 1) {
            rest.remove(pos);
            let expected = Rational::from_integer(2 * g as i64 - 3 + n) * psi(g, &rest);
            ensure(value == expected, format!("dilaton g={g} {e:?}"))?;
            checked += 1;
        }
        let mut reversed = e.clone();
        reversed.reverse();
        let mut rotated = e.clone();
        rotated.rotate_left(1);
        ensure(psi(g, &reversed) == value && psi(g, &rotated) == value, format!("symmetry g={g} {e:?}"))?;
    }
    Ok(format!("{checked} string/dilaton instances"))
}

/// Visit every exponent vector with the given total.
fn fill(e: &mut Vec<u32>, i: usize, left: u32, f: &mut dyn FnMut(&[u32])) {
    if i + 1 == e.len() {
        e[i] = left;
        f(e);
        return;
    }
    for x in 0..=left {
        e[i] = x;
        fill(e, i + 1, left - x, f);
    }
}

fn random_class(rng: &mut TestRng, basis: &[Vec<TautExpr>]) -> TautExpr {
    let d = rng.random_range(0..basis.len().min(3));
    let mut out = TautExpr::zero(basis[d][0].ambient().clone());
    for _ in 0..rng.random_range(1..4) {
        let m = &basis[d][rng.random_range(0..basis[d].len())];
        out = out.add(&m.scale(&Rational::from_integer(rng.random_range(-3..4)))).unwrap();
    }
    out
}

fn divisor(n: u32, left: &[u32]) -> TautExpr {
    let right = (1..=n).filter(|i| !left.contains(i)).collect();
    let graph = StableGraph::new(
        vec![Vertex { genus: 0, legs: left.to_vec() }, Vertex { genus: 0, legs: right }],
        vec![0, 1],
        vec![[0, 1]],
    )
    .unwrap();
    TautExpr::stratum(Ambient::new(0, n).unwrap(), graph).unwrap()
}

fn strata_suite() -> Outcome {
    let bases: Vec<Vec<Vec<TautExpr>>> = [(0, 4), (0, 5), (1, 1), (1, 2)]
        .iter()
        .map(|&(g, n)| (0..=3 * g + n - 3).map(|d| complementary_monomials(g, n, d).unwrap()).collect())
        .collect();
    let mut rng = rng();
    let mut nonzero = 0;
    for i in 0..100 {
        let basis = &bases[i % bases.len()];
        let (x, y, z) = (random_class(&mut rng, basis), random_class(&mut rng, basis), random_class(&mut rng, basis));
        let xy = x.multiply(&y).unwrap();
        ensure(xy == y.multiply(&x).unwrap(), "commutativity")?;
        if !xy.is_empty() {
            nonzero += 1;
            let degree = x.homogeneous_degree().unwrap() + y.homogeneous_degree().unwrap();
            ensure(xy.homogeneous_degree() == Some(degree), "degree additivity")?;
        }
        ensure(xy.multiply(&z).unwrap() == x.multiply(&y.multiply(&z).unwrap()).unwrap(), "associativity")?;
    }
    // on (0,4) the excess class lives on 3-pointed rational vertices, so D·D is stored as zero
    let d04 = divisor(4, &[1, 2]);
    ensure(d04.multiply(&d04).unwrap().is_empty(), "(0,4) D·D is not the zero class")?;
    ensure(matches!(d04.pairing(&d04), Err(Error::Dimension(_))), "(0,4) D² integral must be a dimension error")?;
    let d05 = divisor(5, &[1, 2]);
    ensure(d05.pairing(&d05).unwrap() == -Rational::one(), "(0,5) D² ≠ -1")?;
    Ok(format!("100 triples ({nonzero} nonzero products); D² = 0 class on (0,4), ∫D² = -1 on (0,5)"))
}

fn expansion_suite() -> Outcome {
    let mut synthetic = vec![
        RelationSpec::new(0, 4, 3, vec![1, 1, 2, 2], 1),
        RelationSpec::new(0, 5, 3, vec![1, 1, 1, 1, 2], 2),
        RelationSpec::new(1, 3, 3, vec![1, 1, 1], 3),
        RelationSpec::new(2, 1, 2, vec![0], 4).nontrivial(),
        RelationSpec::new(2, 2, 3, vec![1, 2], 4),
        RelationSpec::new(3, 1, 2, vec![0], 5).nontrivial(),
        RelationSpec::new(3, 1, 2, vec![0], 6).nontrivial(),
    ];
    for s in main_cases() {
        ensure(relation_bzr(&s).unwrap().normal_form() == exp_series_relation(&s).unwrap(), format!("{s:?}"))?;
    }
    for s in synthetic.drain(..) {
        let left = relation_bzr_with(&s, true).unwrap().normal_form();
        ensure(left == exp_series_relation_with(&s, true).unwrap(), format!("{s:?}"))?;
    }
    Ok("5 listed specs and 7 synthetic specs up to d = 6".into())
}

fn vanishing_suite() -> Outcome {
    let mut notes = vec![];
    for s in main_cases() {
        let t = Instant::now();
        let report = verify_with(&s, &VerifyOptions::default()).unwrap();
        let elapsed = t.elapsed();
        ensure(report.all_zero, format!("{s:?} has a nonzero pairing"))?;
        ensure(elapsed < Duration::from_secs(60), format!("{s:?} took {elapsed:?}"))?;
        notes.push(format!("({},{},r={},d={}) {} terms {:.2}s", s.g, s.n, s.r, s.d, report.relation_terms, elapsed.as_secs_f64()));
    }
    // the rejected per-edge family fails on the calibration pair
    let calibration = [main_cases()[4].clone(), main_cases()[2].clone()];
    for c in [-1, 0, 1] {
        let options = VerifyOptions { model: MultiplicityModel::edge_power(c), ..Default::default() };
        let vanish = calibration.iter().all(|s| verify_with(s, &options).unwrap().all_zero);
        ensure(!vanish, format!("per-edge exponent {c} unexpectedly vanishes"))?;
    }
    notes.push("per-edge exponents -1, 0, 1 fail calibration".into());
    Ok(notes.join("; "))
}

fn negative_control() -> Outcome {
    let s = RelationSpec::new(0, 5, 2, vec![1, 1, 1, 1, 0], 1);
    ensure(matches!(validate_spec(&s), Err(SpecError::Window { .. })), "degree at the rank should be outside the window")?;
    let options = VerifyOptions { allow_out_of_window: true, ..Default::default() };
    let report = verify_with(&s, &options).unwrap();
    let nonzero = report.pairings.iter().filter(|p| !p.value.is_zero()).count();
    ensure(nonzero > 0, "out-of-window class vanished")?;
    Ok(format!("{nonzero} of {} pairings nonzero", report.monomials_paired))
}

fn exit_code(args: &[&str]) -> Option<i32> {
    Command::new(env!("CARGO_BIN_EXE_tautrel")).args(args).output().ok()?.status.code()
}

fn window_enforcement() -> Outcome {
    let empty = RelationSpec::new(0, 4, 2, vec![1, 1, 1, 1], 1);
    ensure(matches!(validate_spec(&empty), Err(SpecError::Window { .. })), "empty window accepted")?;
    let genus_zero = RelationSpec::new(0, 4, 2, vec![0; 4], 1);
    ensure(matches!(validate_spec(&genus_zero), Err(SpecError::TrivialResidues)), "all-zero genus 0 accepted")?;
    let no_flag = RelationSpec::new(1, 1, 2, vec![0], 1);
    ensure(matches!(validate_spec(&no_flag), Err(SpecError::TrivialResidues)), "all-zero without flag accepted")?;
    let base = ["verify", "--r", "2", "--d", "1"];
    for extra in [["--g", "0", "--n", "4", "--a", "1,1,1,1"], ["--g", "0", "--n", "4", "--a", "0,0,0,0"], ["--g", "1", "--n", "1", "--a", "0"]] {
        let args: Vec<&str> = base.iter().chain(extra.iter()).copied().collect();
        let code = exit_code(&args);
        ensure(code == Some(2), format!("{args:?} exited with {code:?}"))?;
    }
    Ok("three rejections, CLI exit code 2".into())
}

fn scaling_invariance() -> Outcome {
    let factor = Rational::new(7, 3);
    let opts = VerifyOptions { allow_out_of_window: true, ..Default::default() };
    let mut cases = main_cases();
    cases.push(RelationSpec::new(0, 5, 2, vec![1, 1, 1, 1, 0], 1));
    for s in &cases {
        let relation = tautrel::relgen::pushforward_relation_with(s, opts.model, &opts.limits, true).unwrap();
        let plain = verify_relation(s, &relation, &opts.limits).unwrap();
        let scaled = verify_relation(s, &relation.scale(&factor), &opts.limits).unwrap();
        ensure(plain.all_zero == scaled.all_zero, format!("{s:?}"))?;
    }
    Ok(format!("{} reports, including the negative control", cases.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, u64); 8] = [
        ("bernoulli suite", bernoulli_suite, 1),
        ("intersection numbers", intersection_suite, 10),
        ("strata algebra", strata_suite, 30),
        ("expansion identity", expansion_suite, 10),
        ("main vanishing", vanishing_suite, 300),
        ("negative control", negative_control, 10),
        ("window enforcement", window_enforcement, 10),
        ("scaling invariance", scaling_invariance, 300),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        let outcome = outcome.and_then(|note| {
            if secs < *budget as f64 {
                Ok(note)
            } else {
                Err(format!("{note}; over the {budget}s budget"))
            }
        });
        match outcome {
            Ok(note) => println!("criterion {}: PASS {name} ({secs:.2}s) {note}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({secs:.2}s) {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
