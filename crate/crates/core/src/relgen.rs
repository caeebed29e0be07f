//! Relation generation: the partition-sum form, the exponential-series form,
//! and the pushforward to a tautological class on the moduli of curves.
//!
//! Before pushforward a relation is a [`FormalPoly`] in the symbols of the
//! Chern character (κ, leg ψ powers, and the boundary terms named by their
//! node data). Both generating routes produce this normal form, so they can
//! be compared exactly.
//!
//! The pushforward builds each bracket as a class on the twisted ambient
//! (graphs carry half-edge residues), multiplies in the strata algebra, then
//! forgets the residues with the torsion multiplicities of
//! [`MultiplicityModel`].

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::chiodo::{chiodo_chern_char, gamma_expansion, validate_spec, ChernCharExpr, IrrTerm, RelationSpec, SepTerm};
use crate::error::{Error, Result};
use crate::exactnum::{factorial, Rational};
use crate::graphs::StableGraph;
use crate::strata::{Ambient, Decoration, DecoratedStratum, Limits, TautExpr};

/// Logarithmic coefficients of the equivariant Euler class of a bundle of
/// rank `rank`: `ln e = rank·ln λ + Σ_d (-1)^{d-1} s_d ch_d λ^{-d}` with
/// `s_d = (d-1)!`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivariantEulerSeries {
    pub rank: i64,
    pub coefficients: BTreeMap<u32, Rational>,
}

impl EquivariantEulerSeries {
    pub fn new(spec: &RelationSpec, truncation: u32) -> Self {
        let coefficients = (1..=truncation).map(|d| (d, Rational::from_bigint(factorial(d - 1)))).collect();
        EquivariantEulerSeries { rank: spec.virtual_rank(), coefficients }
    }

    pub fn coefficient(&self, d: u32) -> Result<&Rational> {
        self.coefficients
            .get(&d)
            .ok_or_else(|| Error::Parameter(format!("series truncated below degree {d}")))
    }
}

/// A symbol of the Chern character other than a leg ψ power.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Atom {
    Kappa(u32),
    /// Separating node term of `ch_degree`; the residue-`q` branch lies on the
    /// side of genus `genus` holding `legs`.
    Sep { genus: u32, legs: Vec<u32>, q: u32, degree: u32 },
    /// Nonseparating node term of `ch_degree` with a branch of residue `q`.
    Irr { q: u32, degree: u32 },
}

impl Atom {
    pub fn degree(&self) -> u32 {
        match self {
            Atom::Kappa(k) => *k,
            Atom::Sep { degree, .. } | Atom::Irr { degree, .. } => *degree,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    /// ψ exponent per leg.
    pub psi: Vec<u32>,
    /// Other symbols with multiplicity.
    pub atoms: BTreeMap<Atom, u32>,
}

impl Monomial {
    fn one(n: u32) -> Self {
        Monomial { psi: vec![0; n as usize], atoms: BTreeMap::new() }
    }

    pub fn degree(&self) -> u32 {
        self.psi.iter().sum::<u32>() + self.atoms.iter().map(|(a, m)| a.degree() * m).sum::<u32>()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.clone();
        for (p, q) in out.psi.iter_mut().zip(&other.psi) {
            *p += q;
        }
        for (a, m) in &other.atoms {
            *out.atoms.entry(a.clone()).or_insert(0) += m;
        }
        out
    }
}

/// Commutative polynomial in the Chern character symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalPoly {
    n: u32,
    terms: BTreeMap<Monomial, Rational>,
}

impl FormalPoly {
    pub fn zero(n: u32) -> Self {
        FormalPoly { n, terms: BTreeMap::new() }
    }

    pub fn one(n: u32) -> Self {
        let mut p = FormalPoly::zero(n);
        p.add_term(Monomial::one(n), Rational::one());
        p
    }

    pub fn atom(n: u32, atom: Atom, coeff: Rational) -> Self {
        let mut m = Monomial::one(n);
        m.atoms.insert(atom, 1);
        let mut p = FormalPoly::zero(n);
        p.add_term(m, coeff);
        p
    }

    pub fn psi(n: u32, leg: u32, exponent: u32, coeff: Rational) -> Self {
        let mut m = Monomial::one(n);
        m.psi[leg as usize - 1] = exponent;
        let mut p = FormalPoly::zero(n);
        p.add_term(m, coeff);
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, other: &FormalPoly) -> FormalPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> FormalPoly {
        let mut out = FormalPoly::zero(self.n);
        for (m, x) in &self.terms {
            out.add_term(m.clone(), x * c);
        }
        out
    }

    pub fn mul(&self, other: &FormalPoly) -> FormalPoly {
        let mut out = FormalPoly::zero(self.n);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    /// Coefficient of the monomial `Π ψ_j^{e_j}` with no other symbols.
    pub fn psi_coefficient(&self, exponents: &[u32]) -> Rational {
        let m = Monomial { psi: exponents.to_vec(), atoms: BTreeMap::new() };
        self.terms.get(&m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn degrees(&self) -> Vec<u32> {
        let mut d: Vec<u32> = self.terms.keys().map(|m| m.degree()).collect();
        d.sort_unstable();
        d.dedup();
        d
    }
}

/// `ch_d` as a formal polynomial.
pub fn chern_char_poly(s: &RelationSpec, ch: &ChernCharExpr) -> FormalPoly {
    let d = ch.degree;
    let mut p = FormalPoly::atom(s.n, Atom::Kappa(d), ch.kappa_coeff.clone());
    for (j, c) in ch.psi_coeffs.iter().enumerate() {
        p = p.add(&FormalPoly::psi(s.n, j as u32 + 1, d, c.clone()));
    }
    for t in &ch.sep_terms {
        let atom = Atom::Sep { genus: t.genus, legs: t.legs.clone(), q: t.q, degree: d };
        p = p.add(&FormalPoly::atom(s.n, atom, t.coeff.clone()));
    }
    for t in &ch.irr_terms {
        p = p.add(&FormalPoly::atom(s.n, Atom::Irr { q: t.q, degree: d }, t.coeff.clone()));
    }
    p
}

/// One unordered partition of the degree with its symmetry-folded coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionTerm {
    /// Parts in decreasing order.
    pub parts: Vec<u32>,
    pub coeff: Rational,
}

/// The partition-sum relation before pushforward.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BZrRelation {
    pub spec: RelationSpec,
    pub terms: Vec<PartitionTerm>,
    /// `ch_k` for each part size `k` that occurs.
    pub brackets: BTreeMap<u32, ChernCharExpr>,
}

/// Partitions of `d` with parts in decreasing order.
pub fn partitions(d: u32) -> Vec<Vec<u32>> {
    fn rec(rest: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            out.push(prefix.clone());
            return;
        }
        for p in (1..=rest.min(max)).rev() {
            prefix.push(p);
            rec(rest - p, p, prefix, out);
            prefix.pop();
        }
    }
    let mut out = vec![];
    rec(d, d, &mut vec![], &mut out);
    out
}

fn check_spec(s: &RelationSpec, allow_out_of_window: bool) -> Result<()> {
    if allow_out_of_window {
        s.validate_structure()?;
    } else {
        validate_spec(s)?;
    }
    Ok(())
}

pub fn relation_bzr(s: &RelationSpec) -> Result<BZrRelation> {
    relation_bzr_with(s, false)
}

/// As [`relation_bzr`]; `allow_out_of_window` keeps every check except the
/// lower bound of the degree window.
pub fn relation_bzr_with(s: &RelationSpec, allow_out_of_window: bool) -> Result<BZrRelation> {
    check_spec(s, allow_out_of_window)?;
    let mut terms = vec![];
    let mut brackets = BTreeMap::new();
    for parts in partitions(s.d) {
        let mut denom = num_bigint::BigInt::from(1);
        let mut i = 0;
        while i < parts.len() {
            let run = parts[i..].iter().take_while(|&&p| p == parts[i]).count();
            denom *= factorial(run as u32);
            i += run;
        }
        for &p in &parts {
            denom *= p * (p + 1);
            if let std::collections::btree_map::Entry::Vacant(e) = brackets.entry(p) {
                e.insert(chiodo_chern_char(s, p)?);
            }
        }
        terms.push(PartitionTerm { parts, coeff: Rational::from_bigint(denom).recip() });
    }
    Ok(BZrRelation { spec: s.clone(), terms, brackets })
}

impl BZrRelation {
    /// `B_{k+1}(0)κ_k - Σ_j B_{k+1}(a_j/r)ψ_j^k + (r/2)Σ sep + (r/2)Σ irr`, i.e. `(k+1)!·ch_k`.
    pub fn bracket(&self, k: u32) -> FormalPoly {
        chern_char_poly(&self.spec, &self.brackets[&k]).scale(&Rational::from_bigint(factorial(k + 1)))
    }

    pub fn normal_form(&self) -> FormalPoly {
        let n = self.spec.n;
        let brackets: BTreeMap<u32, FormalPoly> = self.brackets.keys().map(|&k| (k, self.bracket(k))).collect();
        let mut out = FormalPoly::zero(n);
        for t in &self.terms {
            let mut prod = FormalPoly::one(n);
            for p in &t.parts {
                prod = prod.mul(&brackets[p]);
            }
            out = out.add(&prod.scale(&t.coeff));
        }
        out
    }
}

/// Degree-`d` part of `exp(Σ_k (k-1)!·ch_k)`, by graded exponentiation.
pub fn exp_series_relation(s: &RelationSpec) -> Result<FormalPoly> {
    exp_series_relation_with(s, false)
}

pub fn exp_series_relation_with(s: &RelationSpec, allow_out_of_window: bool) -> Result<FormalPoly> {
    check_spec(s, allow_out_of_window)?;
    let series = EquivariantEulerSeries::new(s, s.d);
    let n = s.n;
    let mut log = vec![FormalPoly::zero(n)];
    for k in 1..=s.d {
        let ch = chiodo_chern_char(s, k)?;
        log.push(chern_char_poly(s, &ch).scale(series.coefficient(k)?));
    }
    // m·E_m = Σ_{k=1}^m k·L_k·E_{m-k}
    let mut exp = vec![FormalPoly::one(n)];
    for m in 1..=s.d as usize {
        let mut acc = FormalPoly::zero(n);
        for k in 1..=m {
            acc = acc.add(&log[k].mul(&exp[m - k]).scale(&Rational::from_integer(k as i64)));
        }
        exp.push(acc.scale(&Rational::new(1, m as i64)));
    }
    Ok(exp.pop().expect("degree at least one"))
}

/// Torsion multiplicities used when forgetting residues.
///
/// A boundary entry of `ch_k` with coefficient `c` on the weighted one-edge
/// graph `(Γ, w)` becomes `c·r^{entry_exponent}·ξ_{(Γ,w)*}γ`. After the
/// products, `ξ_{(Γ,w)*}f` maps to `ρ(Γ,w)·ξ_{Γ*}f` with
/// `ρ = r^{edge_exponent·E + genus_exponent·(Σ_v g_v - g)}`. On the
/// nontrivial component of all-zero residues the trivial root is removed:
/// `ρ = (r^{2g}·ρ - [w ≡ 0]) / (r^{2g} - 1)`.
///
/// The default counts admissible roots: `ρ = r^{-h^1(Γ)}` and each entry
/// carries `1/r`, which reproduces the graph sum for the pushforward of the
/// total Chern class of the root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiplicityModel {
    pub entry_exponent: i32,
    pub edge_exponent: i32,
    pub genus_exponent: i32,
}

impl MultiplicityModel {
    pub const FROZEN: MultiplicityModel = MultiplicityModel { entry_exponent: -1, edge_exponent: 0, genus_exponent: 1 };

    /// `r^{cE}·Π_v r^{2g_v}/r^{2g}` with printed entry coefficients.
    pub fn edge_power(c: i32) -> Self {
        MultiplicityModel { entry_exponent: 0, edge_exponent: c, genus_exponent: 2 }
    }

    fn rho(&self, graph: &StableGraph, r: u32, g: u32, nontrivial_zero: bool) -> Rational {
        let vertex_genus: u32 = graph.vertices().iter().map(|v| v.genus).sum();
        let exponent =
            self.edge_exponent * graph.num_edges() as i32 + self.genus_exponent * (vertex_genus as i32 - g as i32);
        let rr = Rational::from_integer(r as i64);
        let rho = rr.pow(exponent);
        if !nontrivial_zero {
            return rho;
        }
        let full = rr.pow(2 * g as i32);
        let trivial = if graph.residues().iter().all(|&x| x == 0) { Rational::one() } else { Rational::zero() };
        (&full * rho - trivial) / (full - Rational::one())
    }
}

impl Default for MultiplicityModel {
    fn default() -> Self {
        MultiplicityModel::FROZEN
    }
}

/// Pushes formal symbols to classes on the twisted ambient.
pub struct Pushforward {
    spec: RelationSpec,
    ambient: Ambient,
    model: MultiplicityModel,
    limits: Limits,
    atoms: HashMap<Atom, TautExpr>,
}

impl Pushforward {
    pub fn new(spec: &RelationSpec, model: MultiplicityModel, limits: Limits) -> Result<Self> {
        spec.validate_structure()
            .or_else(|e| if matches!(e, crate::chiodo::SpecError::Window { .. }) { Ok(()) } else { Err(e) })?;
        let ambient = Ambient::twisted(spec.g, spec.n, spec.r, spec.a.clone())?;
        Ok(Pushforward { spec: spec.clone(), ambient, model, limits, atoms: HashMap::new() })
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    fn node_entry(&self, graph: StableGraph, degree: u32) -> Result<TautExpr> {
        let n = self.spec.n;
        let r = Rational::from_integer(self.spec.r as i64);
        let weight = r.pow(self.model.entry_exponent) * Rational::from_integer(graph.aut_order() as i64);
        let [q_half, minus_half] = graph.edges()[0];
        let mut e = TautExpr::zero(self.ambient.clone());
        for (i, j, sign) in gamma_expansion(degree - 1) {
            let mut dec = Decoration::trivial(&graph, n);
            dec.halfedge_psi[minus_half] = i;
            dec.halfedge_psi[q_half] = j;
            e.add_term(DecoratedStratum::new(graph.clone(), dec), sign * &weight);
        }
        Ok(e)
    }

    /// The class of one symbol on the twisted ambient.
    pub fn atom(&mut self, atom: &Atom) -> Result<TautExpr> {
        if let Some(e) = self.atoms.get(atom) {
            return Ok(e.clone());
        }
        let s = &self.spec;
        let e = match atom {
            Atom::Kappa(k) => TautExpr::kappa(self.ambient.clone(), *k)?,
            Atom::Sep { genus, legs, q, degree } => {
                let t = SepTerm { genus: *genus, legs: legs.clone(), q: *q, coeff: Rational::one() };
                self.node_entry(t.graph(s.g, s.n, s.r), *degree)?
            }
            Atom::Irr { q, degree } => {
                let t = IrrTerm { q: *q, coeff: Rational::one() };
                self.node_entry(t.graph(s.g, s.n, s.r), *degree)?
            }
        };
        self.atoms.insert(atom.clone(), e.clone());
        Ok(e)
    }

    fn monomial(&mut self, m: &Monomial) -> Result<TautExpr> {
        let graph = StableGraph::smooth(self.spec.g, self.spec.n);
        let mut dec = Decoration::trivial(&graph, self.spec.n);
        dec.leg_psi = m.psi.clone();
        let mut e = TautExpr::from_stratum(self.ambient.clone(), DecoratedStratum::new(graph, dec), Rational::one());
        for (atom, &mult) in &m.atoms {
            let x = self.atom(atom)?;
            for _ in 0..mult {
                e = e.multiply_with_limits(&x, &self.limits)?;
            }
        }
        Ok(e)
    }

    /// Linear combination of symbols (no products) as a twisted class.
    pub fn linear(&mut self, p: &FormalPoly) -> Result<TautExpr> {
        let mut out = TautExpr::zero(self.ambient.clone());
        for (m, c) in p.terms() {
            if m.atoms.values().sum::<u32>() > 1 {
                return Err(Error::Integrity("expected a linear polynomial".into()));
            }
            out = out.add(&self.monomial(m)?.scale(c))?;
        }
        Ok(out)
    }

    /// Any formal polynomial, monomial by monomial.
    pub fn polynomial(&mut self, p: &FormalPoly) -> Result<TautExpr> {
        let mut out = TautExpr::zero(self.ambient.clone());
        for (m, c) in p.terms() {
            out = out.add(&self.monomial(m)?.scale(c))?;
        }
        Ok(out)
    }

    /// The partition sum, multiplying pushed brackets in the strata algebra.
    pub fn relation(&mut self, rel: &BZrRelation) -> Result<TautExpr> {
        let mut brackets = BTreeMap::new();
        for &k in rel.brackets.keys() {
            brackets.insert(k, self.linear(&rel.bracket(k))?);
        }
        // products share prefixes: parts are sorted decreasingly
        let mut products: HashMap<Vec<u32>, TautExpr> = HashMap::new();
        products.insert(vec![], TautExpr::fundamental(self.ambient.clone()));
        let mut out = TautExpr::zero(self.ambient.clone());
        for t in &rel.terms {
            for len in 1..=t.parts.len() {
                let key = t.parts[..len].to_vec();
                if products.contains_key(&key) {
                    continue;
                }
                let prev = &products[&t.parts[..len - 1]];
                let next = prev.multiply_with_limits(&brackets[&t.parts[len - 1]], &self.limits)?;
                products.insert(key, next);
            }
            out = out.add(&products[&t.parts].scale(&t.coeff))?;
        }
        Ok(out)
    }

    /// Forget residues, weighting each stratum by its torsion multiplicity.
    pub fn forget_residues(&self, e: &TautExpr) -> Result<TautExpr> {
        let s = &self.spec;
        let nontrivial_zero = s.all_zero() && s.nontrivial_component;
        let model = self.model;
        e.map_strata(self.ambient.untwisted(), |stratum| {
            let weighted = &stratum.graph;
            let rho = model.rho(weighted, s.r, s.g, nontrivial_zero);
            let mut plain = weighted.clone();
            plain.clear_residues();
            let factor = rho * Rational::new(plain.plain_aut_order() as i64, weighted.aut_order() as i64);
            Ok(vec![(DecoratedStratum::new(plain, stratum.decoration.clone()), factor)])
        })
    }
}

/// The relation as a class on the twisted ambient, before forgetting residues.
pub fn twisted_relation(s: &RelationSpec, model: MultiplicityModel, limits: &Limits, allow_out_of_window: bool) -> Result<TautExpr> {
    let rel = relation_bzr_with(s, allow_out_of_window)?;
    Pushforward::new(s, model, *limits)?.relation(&rel)
}

pub fn pushforward_relation(s: &RelationSpec) -> Result<TautExpr> {
    pushforward_relation_with(s, MultiplicityModel::FROZEN, &Limits::default(), false)
}

pub fn pushforward_relation_with(
    s: &RelationSpec,
    model: MultiplicityModel,
    limits: &Limits,
    allow_out_of_window: bool,
) -> Result<TautExpr> {
    let rel = relation_bzr_with(s, allow_out_of_window)?;
    let mut push = Pushforward::new(s, model, *limits)?;
    let twisted = push.relation(&rel)?;
    let out = push.forget_residues(&twisted)?;
    if out.degrees().iter().any(|&d| d != s.d) {
        return Err(Error::Integrity(format!(
            "pushed-forward relation has degrees {:?}, expected {}",
            out.degrees(),
            s.d
        )));
    }
    Ok(out)
}
