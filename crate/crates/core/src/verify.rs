//! Vanishing certificates: pair a relation with a spanning set of
//! complementary monomials and check that every pairing is exactly zero.

use std::collections::BTreeSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::chiodo::RelationSpec;
use crate::error::{Error, Result};
use crate::exactnum::Rational;
use crate::graphs::{enumerate_stable_graphs, StableGraph};
use crate::relgen::{pushforward_relation_with, MultiplicityModel};
use crate::strata::{Ambient, Decoration, DecoratedStratum, Limits, TautExpr};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pairing {
    pub monomial: usize,
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub spec: RelationSpec,
    pub ambient_dim: u32,
    pub relation_degree: u32,
    pub relation_terms: usize,
    pub monomials_paired: usize,
    pub pairings: Vec<Pairing>,
    pub all_zero: bool,
    pub elapsed: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub allow_out_of_window: bool,
    pub model: MultiplicityModel,
    pub limits: Limits,
}

/// Every decorated stratum of the given degree, one per canonical form, in a
/// deterministic order. The list spans the degree-`degree` tautological classes.
pub fn complementary_monomials(g: u32, n: u32, degree: u32) -> Result<Vec<TautExpr>> {
    complementary_monomials_with(g, n, degree, &Limits::default())
}

pub fn complementary_monomials_with(g: u32, n: u32, degree: u32, limits: &Limits) -> Result<Vec<TautExpr>> {
    let ambient = Ambient::new(g, n)?;
    if degree > ambient.dim() {
        return Err(Error::Dimension(format!(
            "degree {degree} exceeds the dimension {} of the (g,n)=({g},{n}) moduli space",
            ambient.dim()
        )));
    }
    let graphs = enumerate_stable_graphs(g, n, degree)?;
    let mut strata = BTreeSet::new();
    for graph in graphs {
        let rest = degree - graph.num_edges() as u32;
        for dec in decorations(&graph, n, rest) {
            let s = DecoratedStratum::new(graph.clone(), dec);
            if !s.vanishes() {
                strata.insert(s.canonicalize());
            }
            if strata.len() > limits.max_terms {
                return Err(Error::ResourceLimit(format!("more than {} monomials", limits.max_terms)));
            }
        }
    }
    Ok(strata
        .into_iter()
        .map(|s| TautExpr::from_stratum(ambient.clone(), s, Rational::one()))
        .collect())
}

/// All ψ/κ decorations of total degree `degree` on a graph.
fn decorations(graph: &StableGraph, n: u32, degree: u32) -> Vec<Decoration> {
    let slots = n as usize + graph.num_halfedges();
    let mut out = vec![];
    // split the degree between ψ slots and κ at each vertex
    let mut psi = vec![0u32; slots];
    compositions(degree, slots, &mut psi, 0, &mut |psi, used| {
        let rest = degree - used;
        for kappa in kappa_distributions(graph.num_vertices(), rest) {
            let mut dec = Decoration::trivial(graph, n);
            dec.leg_psi = psi[..n as usize].to_vec();
            dec.halfedge_psi = psi[n as usize..].to_vec();
            dec.vertex_kappa = kappa;
            out.push(dec);
        }
    });
    out
}

/// Visit every vector of `slots` exponents with sum at most `max`.
fn compositions(max: u32, slots: usize, cur: &mut Vec<u32>, i: usize, f: &mut dyn FnMut(&[u32], u32)) {
    let used: u32 = cur[..i].iter().sum();
    if i == slots {
        f(cur, used);
        return;
    }
    for e in 0..=(max - used) {
        cur[i] = e;
        compositions(max, slots, cur, i + 1, f);
    }
    cur[i] = 0;
}

/// κ multisets on `vertices` vertices with index total `degree`.
fn kappa_distributions(vertices: usize, degree: u32) -> Vec<Vec<Vec<u32>>> {
    if vertices == 0 {
        return if degree == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = vec![];
    for here in 0..=degree {
        for part in crate::relgen::partitions(here) {
            for mut rest in kappa_distributions(vertices - 1, degree - here) {
                let mut first = part.clone();
                first.sort_unstable();
                rest.insert(0, first);
                out.push(rest);
            }
        }
    }
    out
}

pub fn verify(s: &RelationSpec) -> Result<VerificationReport> {
    verify_with(s, &VerifyOptions::default())
}

pub fn verify_with(s: &RelationSpec, options: &VerifyOptions) -> Result<VerificationReport> {
    let start = Instant::now();
    let relation = pushforward_relation_with(s, options.model, &options.limits, options.allow_out_of_window)?;
    let mut report = verify_relation(s, &relation, &options.limits)?;
    report.elapsed = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Pair an already computed relation of degree `s.d` with the complementary monomials.
pub fn verify_relation(s: &RelationSpec, relation: &TautExpr, limits: &Limits) -> Result<VerificationReport> {
    let start = Instant::now();
    let dim = s.dim();
    if s.d > dim {
        return Err(Error::Dimension(format!("degree {} exceeds dimension {dim}", s.d)));
    }
    let monomials = complementary_monomials_with(s.g, s.n, dim - s.d, limits)?;
    let mut pairings = Vec::with_capacity(monomials.len());
    for (i, m) in monomials.iter().enumerate() {
        let value = relation.pairing_with_limits(m, limits)?;
        pairings.push(Pairing { monomial: i, value });
    }
    let all_zero = pairings.iter().all(|p| p.value.is_zero());
    Ok(VerificationReport {
        spec: s.clone(),
        ambient_dim: dim,
        relation_degree: s.d,
        relation_terms: relation.len(),
        monomials_paired: monomials.len(),
        pairings,
        all_zero,
        elapsed: start.elapsed().as_secs_f64(),
    })
}
