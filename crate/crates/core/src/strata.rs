//! The strata algebra: formal tautological classes on moduli of stable curves.
//!
//! A [`DecoratedStratum`] is a stable graph with ψ powers on legs and
//! half-edges and κ multisets on vertices. With coefficient `c` it stands for
//! `c/|Aut Γ| · ξ_Γ*(decoration)`, where `ξ_Γ` is the gluing map of the graph.
//! A [`TautExpr`] is a finite rational combination of canonical strata.
//!
//! Expressions may live on a twisted ambient (an order `r` and leg residues
//! `a_i`); their graphs then carry half-edge residues and only admissible
//! weightings (edge residues summing to 0 and vertex residues summing to 0
//! mod `r`) survive products. The product rule is the same in both cases:
//! a sum over generic common degenerations, with `-ψ_h - ψ_h'` inserted on
//! every edge shared by both factors.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::Rational;
use crate::graphs::{enumerate_stable_graphs, StableGraph};
use crate::wkint::IntersectionTable;

/// Residue data of a twisted ambient space.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Twist {
    pub r: u32,
    /// Residue `a_i` of each leg, in leg order.
    pub legs: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Ambient {
    pub g: u32,
    pub n: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twist: Option<Twist>,
}

impl Ambient {
    pub fn new(g: u32, n: u32) -> Result<Self> {
        crate::graphs::check_stable_type(g, n)?;
        Ok(Ambient { g, n, twist: None })
    }

    pub fn twisted(g: u32, n: u32, r: u32, legs: Vec<u32>) -> Result<Self> {
        crate::graphs::check_stable_type(g, n)?;
        if legs.len() != n as usize || r == 0 || legs.iter().any(|&a| a >= r) {
            return Err(Error::Parameter("leg residues must be n values in 0..r".into()));
        }
        Ok(Ambient { g, n, twist: Some(Twist { r, legs }) })
    }

    /// Dimension `3g - 3 + n`.
    pub fn dim(&self) -> u32 {
        3 * self.g + self.n - 3
    }

    pub fn untwisted(&self) -> Ambient {
        Ambient { g: self.g, n: self.n, twist: None }
    }

    /// Check the residue conditions of a weighted graph.
    pub fn admissible(&self, graph: &StableGraph) -> bool {
        let Some(tw) = &self.twist else {
            return !graph.is_twisted();
        };
        let r = tw.r;
        for &[h0, h1] in graph.edges() {
            if !(graph.residue(h0) + graph.residue(h1)).is_multiple_of(r) {
                return false;
            }
        }
        for v in 0..graph.num_vertices() {
            let legs: u32 = graph.vertices()[v].legs.iter().map(|&l| tw.legs[l as usize - 1]).sum();
            let halves: u32 = graph.halfedges_at(v).iter().map(|&h| graph.residue(h)).sum();
            if !(legs + halves).is_multiple_of(r) {
                return false;
            }
        }
        true
    }
}

/// ψ and κ decorations on a fixed graph.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Decoration {
    /// ψ exponent of leg `i + 1`.
    pub leg_psi: Vec<u32>,
    /// ψ exponent of each half-edge.
    pub halfedge_psi: Vec<u32>,
    /// κ indices at each vertex, sorted.
    pub vertex_kappa: Vec<Vec<u32>>,
}

impl Decoration {
    pub fn trivial(graph: &StableGraph, n: u32) -> Self {
        Decoration {
            leg_psi: vec![0; n as usize],
            halfedge_psi: vec![0; graph.num_halfedges()],
            vertex_kappa: vec![vec![]; graph.num_vertices()],
        }
    }

    pub fn degree(&self) -> u32 {
        self.leg_psi.iter().sum::<u32>()
            + self.halfedge_psi.iter().sum::<u32>()
            + self.vertex_kappa.iter().flatten().sum::<u32>()
    }

    fn multiply(&self, other: &Decoration) -> Decoration {
        let add = |a: &[u32], b: &[u32]| a.iter().zip(b).map(|(x, y)| x + y).collect();
        Decoration {
            leg_psi: add(&self.leg_psi, &other.leg_psi),
            halfedge_psi: add(&self.halfedge_psi, &other.halfedge_psi),
            vertex_kappa: self
                .vertex_kappa
                .iter()
                .zip(&other.vertex_kappa)
                .map(|(a, b)| {
                    let mut k: Vec<u32> = a.iter().chain(b).copied().collect();
                    k.sort_unstable();
                    k
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DecoratedStratum {
    pub graph: StableGraph,
    pub decoration: Decoration,
}

impl DecoratedStratum {
    pub fn new(graph: StableGraph, decoration: Decoration) -> Self {
        DecoratedStratum { graph, decoration }
    }

    /// Edges plus ψ and κ degrees.
    pub fn degree(&self) -> u32 {
        self.graph.num_edges() as u32 + self.decoration.degree()
    }

    /// Decoration degree carried by vertex `v`.
    pub fn vertex_degree(&self, v: usize) -> u32 {
        let legs: u32 = self.graph.vertices()[v]
            .legs
            .iter()
            .map(|&l| self.decoration.leg_psi[l as usize - 1])
            .sum();
        let halves: u32 = self.graph.halfedges_at(v).iter().map(|&h| self.decoration.halfedge_psi[h]).sum();
        legs + halves + self.decoration.vertex_kappa[v].iter().sum::<u32>()
    }

    /// A decoration exceeding some vertex dimension represents zero.
    pub fn vanishes(&self) -> bool {
        (0..self.graph.num_vertices()).any(|v| self.vertex_degree(v) as i64 > self.graph.vertex_dim(v))
    }

    pub fn canonicalize(&self) -> DecoratedStratum {
        let (graph, relabel) = self
            .graph
            .canonical_relabeling(&self.decoration.vertex_kappa, &self.decoration.halfedge_psi);
        let decoration = Decoration {
            leg_psi: self.decoration.leg_psi.clone(),
            halfedge_psi: relabel
                .halfedge_new_to_old
                .iter()
                .map(|&h| self.decoration.halfedge_psi[h])
                .collect(),
            vertex_kappa: relabel
                .vertex_new_to_old
                .iter()
                .map(|&v| self.decoration.vertex_kappa[v].clone())
                .collect(),
        };
        DecoratedStratum { graph, decoration }
    }

    /// Swap the two half-edges of edge `e`, together with their decorations.
    pub fn swap_edge(&self, e: usize) -> DecoratedStratum {
        let [h0, h1] = self.graph.edges()[e];
        let mut verts: Vec<usize> = (0..self.graph.num_halfedges()).map(|h| self.graph.halfedge_vertex(h)).collect();
        let mut edges = self.graph.edges().to_vec();
        edges[e] = [h1, h0];
        verts.swap(h0, h1);
        // rename h0 <-> h1 everywhere so the edge keeps its ids
        let mut residues = self.graph.residues().to_vec();
        residues.swap(h0, h1);
        let mut psi = self.decoration.halfedge_psi.clone();
        psi.swap(h0, h1);
        edges[e] = [h0, h1];
        let graph = StableGraph::with_residues(self.graph.vertices().to_vec(), verts, edges, residues)
            .expect("swapping keeps the graph consistent");
        DecoratedStratum { graph, decoration: Decoration { halfedge_psi: psi, ..self.decoration.clone() } }
    }
}

/// Formal rational combination of decorated strata over a fixed ambient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TautExpr {
    ambient: Ambient,
    terms: BTreeMap<DecoratedStratum, Rational>,
}

/// Caps on intermediate sizes; exceeding one is an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub max_graphs: usize,
    pub max_terms: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_graphs: 20_000, max_terms: 2_000_000 }
    }
}

impl TautExpr {
    pub fn zero(ambient: Ambient) -> Self {
        TautExpr { ambient, terms: BTreeMap::new() }
    }

    pub fn fundamental(ambient: Ambient) -> Self {
        let graph = StableGraph::smooth(ambient.g, ambient.n);
        let dec = Decoration::trivial(&graph, ambient.n);
        Self::from_stratum(ambient, DecoratedStratum::new(graph, dec), Rational::one())
    }

    /// `ψ_leg^exponent`.
    pub fn psi(ambient: Ambient, leg: u32, exponent: u32) -> Result<Self> {
        if leg == 0 || leg > ambient.n {
            return Err(Error::Parameter(format!("no leg {leg}")));
        }
        let graph = StableGraph::smooth(ambient.g, ambient.n);
        let mut dec = Decoration::trivial(&graph, ambient.n);
        dec.leg_psi[leg as usize - 1] = exponent;
        Ok(Self::from_stratum(ambient, DecoratedStratum::new(graph, dec), Rational::one()))
    }

    /// `κ_index`.
    pub fn kappa(ambient: Ambient, index: u32) -> Result<Self> {
        if index == 0 {
            return Err(Error::Parameter("κ index must be positive".into()));
        }
        let graph = StableGraph::smooth(ambient.g, ambient.n);
        let mut dec = Decoration::trivial(&graph, ambient.n);
        dec.vertex_kappa[0] = vec![index];
        Ok(Self::from_stratum(ambient, DecoratedStratum::new(graph, dec), Rational::one()))
    }

    /// The undecorated boundary stratum of `graph`.
    pub fn stratum(ambient: Ambient, graph: StableGraph) -> Result<Self> {
        graph.validate(ambient.g, ambient.n)?;
        let dec = Decoration::trivial(&graph, ambient.n);
        Ok(Self::from_stratum(ambient, DecoratedStratum::new(graph, dec), Rational::one()))
    }

    /// Single term; canonicalizes, and drops the term if it vanishes.
    pub fn from_stratum(ambient: Ambient, stratum: DecoratedStratum, coeff: Rational) -> Self {
        let mut e = TautExpr::zero(ambient);
        e.add_term(stratum, coeff);
        e
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DecoratedStratum, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of a stratum (after canonicalization).
    pub fn coefficient(&self, stratum: &DecoratedStratum) -> Rational {
        self.terms.get(&stratum.canonicalize()).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, stratum: DecoratedStratum, coeff: Rational) {
        if coeff.is_zero() || stratum.vanishes() {
            return;
        }
        let key = stratum.canonicalize();
        let entry = self.terms.entry(key.clone()).or_insert_with(Rational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    fn add_canonical(&mut self, key: DecoratedStratum, coeff: Rational) {
        let entry = self.terms.entry(key.clone()).or_insert_with(Rational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &TautExpr) -> Result<TautExpr> {
        self.same_ambient(other)?;
        let mut out = self.clone();
        for (s, c) in &other.terms {
            out.add_canonical(s.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &TautExpr) -> Result<TautExpr> {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> TautExpr {
        if c.is_zero() {
            return TautExpr::zero(self.ambient.clone());
        }
        TautExpr {
            ambient: self.ambient.clone(),
            terms: self.terms.iter().map(|(s, x)| (s.clone(), x * c)).collect(),
        }
    }

    /// Distinct degrees occurring in the expression.
    pub fn degrees(&self) -> Vec<u32> {
        let mut d: Vec<u32> = self.terms.keys().map(|s| s.degree()).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// The common degree, if homogeneous and nonzero.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        match self.degrees().as_slice() {
            [d] => Some(*d),
            _ => None,
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.degrees().len() <= 1
    }

    /// Degree-`d` part.
    pub fn part(&self, d: u32) -> TautExpr {
        TautExpr {
            ambient: self.ambient.clone(),
            terms: self.terms.iter().filter(|(s, _)| s.degree() == d).map(|(s, c)| (s.clone(), c.clone())).collect(),
        }
    }

    fn same_ambient(&self, other: &TautExpr) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::Parameter(format!(
                "ambient mismatch: {:?} vs {:?}",
                self.ambient, other.ambient
            )));
        }
        Ok(())
    }

    /// Product in the strata algebra.
    pub fn multiply(&self, other: &TautExpr) -> Result<TautExpr> {
        self.multiply_with_limits(other, &Limits::default())
    }

    pub fn multiply_with_limits(&self, other: &TautExpr, limits: &Limits) -> Result<TautExpr> {
        self.same_ambient(other)?;
        let mut out = TautExpr::zero(self.ambient.clone());
        if self.is_empty() || other.is_empty() {
            return Ok(out);
        }
        let catalog = GraphCatalog::get(self.ambient.g, self.ambient.n, limits)?;
        let dim = self.ambient.dim();
        for (s1, c1) in &self.terms {
            for (s2, c2) in &other.terms {
                if s1.degree() + s2.degree() > dim {
                    continue;
                }
                let c = c1 * c2;
                for (stratum, coeff) in catalog.multiply_strata(&self.ambient, s1, s2)? {
                    out.add_term(stratum, coeff * &c);
                }
                if out.len() > limits.max_terms {
                    return Err(Error::ResourceLimit(format!(
                        "product has more than {} terms",
                        limits.max_terms
                    )));
                }
            }
        }
        Ok(out)
    }

    /// Integral over the moduli space; the expression must be homogeneous of
    /// top degree (the zero expression integrates to 0).
    pub fn integrate(&self) -> Result<Rational> {
        if self.ambient.twist.is_some() {
            return Err(Error::Parameter("integration needs an untwisted ambient".into()));
        }
        let dim = self.ambient.dim();
        if let Some(bad) = self.degrees().into_iter().find(|&d| d != dim) {
            return Err(Error::Dimension(format!(
                "cannot integrate a degree-{bad} class over a space of dimension {dim}"
            )));
        }
        let table = IntersectionTable::global();
        let mut total = Rational::zero();
        for (s, c) in &self.terms {
            total += c * stratum_integral(s, table);
        }
        Ok(total)
    }

    /// `∫ self · other`; degrees must add up to the dimension.
    pub fn pairing(&self, other: &TautExpr) -> Result<Rational> {
        self.pairing_with_limits(other, &Limits::default())
    }

    pub fn pairing_with_limits(&self, other: &TautExpr, limits: &Limits) -> Result<Rational> {
        self.same_ambient(other)?;
        if self.is_empty() || other.is_empty() {
            return Ok(Rational::zero());
        }
        let dim = self.ambient.dim();
        for a in self.degrees() {
            for b in other.degrees() {
                if a + b != dim {
                    return Err(Error::Dimension(format!(
                        "degrees {a} + {b} do not add up to dimension {dim}"
                    )));
                }
            }
        }
        self.multiply_with_limits(other, limits)?.integrate()
    }

    /// Apply a per-stratum map to strata of another ambient, collecting terms.
    pub fn map_strata<F>(&self, target: Ambient, mut f: F) -> Result<TautExpr>
    where
        F: FnMut(&DecoratedStratum) -> Result<Vec<(DecoratedStratum, Rational)>>,
    {
        let mut out = TautExpr::zero(target);
        for (s, c) in &self.terms {
            for (t, x) in f(s)? {
                out.add_term(t, x * c);
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Vec<TermJson> {
        self.terms.iter().map(|(s, c)| TermJson::from_term(s, c)).collect()
    }

    pub fn from_json(ambient: Ambient, terms: &[TermJson]) -> Result<TautExpr> {
        let mut out = TautExpr::zero(ambient.clone());
        for t in terms {
            let (s, c) = t.to_term(ambient.n)?;
            s.graph.validate(ambient.g, ambient.n)?;
            out.add_term(s, c);
        }
        Ok(out)
    }
}

impl fmt::Display for TautExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (s, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*{}", serde_json::to_string(&TermJson::from_term(s, &Rational::one())).unwrap())?;
        }
        Ok(())
    }
}

/// JSON form of one term.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub graph: StableGraph,
    #[serde(default)]
    pub leg_psi: BTreeMap<String, u32>,
    #[serde(default)]
    pub halfedge_psi: BTreeMap<String, u32>,
    #[serde(default)]
    pub vertex_kappa: BTreeMap<String, Vec<u32>>,
    pub coeff: Rational,
}

impl TermJson {
    pub fn from_term(s: &DecoratedStratum, c: &Rational) -> Self {
        let d = &s.decoration;
        TermJson {
            graph: s.graph.clone(),
            leg_psi: d
                .leg_psi
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| ((i + 1).to_string(), e))
                .collect(),
            halfedge_psi: d
                .halfedge_psi
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(h, &e)| (s.graph.halfedge_name(h), e))
                .collect(),
            vertex_kappa: d
                .vertex_kappa
                .iter()
                .enumerate()
                .filter(|(_, k)| !k.is_empty())
                .map(|(v, k)| (v.to_string(), k.clone()))
                .collect(),
            coeff: c.clone(),
        }
    }

    pub fn to_term(&self, n: u32) -> Result<(DecoratedStratum, Rational)> {
        let graph = self.graph.clone();
        let mut dec = Decoration::trivial(&graph, n);
        for (leg, &e) in &self.leg_psi {
            let i: usize = leg.parse().map_err(|_| Error::Parameter(format!("bad leg {leg:?}")))?;
            if i == 0 || i > n as usize {
                return Err(Error::Parameter(format!("no leg {i}")));
            }
            dec.leg_psi[i - 1] = e;
        }
        for (name, &e) in &self.halfedge_psi {
            let h = graph
                .halfedge_by_name(name)
                .ok_or_else(|| Error::Parameter(format!("no half-edge {name:?}")))?;
            dec.halfedge_psi[h] = e;
        }
        for (v, k) in &self.vertex_kappa {
            let v: usize = v.parse().map_err(|_| Error::Parameter(format!("bad vertex {v:?}")))?;
            if v >= graph.num_vertices() || k.contains(&0) {
                return Err(Error::Parameter(format!("bad κ decoration at vertex {v}")));
            }
            let mut k = k.clone();
            k.sort_unstable();
            dec.vertex_kappa[v] = k;
        }
        Ok((DecoratedStratum::new(graph, dec), self.coeff.clone()))
    }
}

/// `(1/|Aut Γ|) Π_v ∫ decoration at v`, zero unless every vertex is in top degree.
fn stratum_integral(s: &DecoratedStratum, table: &IntersectionTable) -> Rational {
    let g = &s.graph;
    let mut value = Rational::one();
    for v in 0..g.num_vertices() {
        if s.vertex_degree(v) as i64 != g.vertex_dim(v) {
            return Rational::zero();
        }
        let mut psi: Vec<u32> = g.vertices()[v].legs.iter().map(|&l| s.decoration.leg_psi[l as usize - 1]).collect();
        psi.extend(g.halfedges_at(v).iter().map(|&h| s.decoration.halfedge_psi[h]));
        let x = table.kappa_psi(g.vertices()[v].genus, &psi, &s.decoration.vertex_kappa[v]);
        if x.is_zero() {
            return x;
        }
        value *= x;
    }
    value / Rational::from_integer(g.plain_aut_order() as i64)
}

/// A generic common degeneration: a graph `Γ` with maps onto both factors.
#[derive(Debug, Clone)]
struct Structure {
    gamma: usize,
    a_vertex: Vec<usize>,
    a_half: Vec<Option<usize>>,
    b_vertex: Vec<usize>,
    b_half: Vec<Option<usize>>,
    shared: Vec<usize>,
}

/// All stable graphs of one `(g, n)` plus memoized product structures.
struct GraphCatalog {
    n: u32,
    graphs: Vec<StableGraph>,
    plain_auts: Vec<usize>,
    contractions: RwLock<HashMap<(usize, u64), StableGraph>>,
    structures: RwLock<HashMap<(StableGraph, StableGraph), Arc<Vec<Structure>>>>,
}

type Polynomial = Vec<(Decoration, Rational)>;

impl GraphCatalog {
    fn get(g: u32, n: u32, limits: &Limits) -> Result<Arc<GraphCatalog>> {
        static CATALOGS: OnceLock<Mutex<HashMap<(u32, u32), Arc<GraphCatalog>>>> = OnceLock::new();
        let map = CATALOGS.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(c) = map.lock().expect("poisoned catalog").get(&(g, n)) {
            check_graph_limit(c.graphs.len(), limits)?;
            return Ok(c.clone());
        }
        let graphs = enumerate_stable_graphs(g, n, 3 * g + n - 3)?;
        check_graph_limit(graphs.len(), limits)?;
        let plain_auts = graphs.iter().map(|x| x.plain_aut_order()).collect();
        let catalog = Arc::new(GraphCatalog {
            n,
            graphs,
            plain_auts,
            contractions: RwLock::new(HashMap::new()),
            structures: RwLock::new(HashMap::new()),
        });
        map.lock().expect("poisoned catalog").insert((g, n), catalog.clone());
        Ok(catalog)
    }

    fn contraction_class(&self, gamma: usize, keep: u64) -> StableGraph {
        if let Some(c) = self.contractions.read().expect("poisoned").get(&(gamma, keep)) {
            return c.clone();
        }
        let graph = &self.graphs[gamma];
        let contracted: Vec<usize> = (0..graph.num_edges()).filter(|e| keep & (1 << e) == 0).collect();
        let c = graph.contract(&contracted).graph.canonicalize();
        self.contractions.write().expect("poisoned").insert((gamma, keep), c.clone());
        c
    }

    /// Pairs (edge subset, map onto `target`) for graph `gamma`.
    fn structures_onto(&self, gamma: usize, target: &StableGraph, target_class: &StableGraph) -> Vec<(u64, Vec<usize>, Vec<Option<usize>>)> {
        let graph = &self.graphs[gamma];
        let ne = graph.num_edges();
        let k = target.num_edges();
        let mut out = vec![];
        for keep in 0u64..(1 << ne) {
            if keep.count_ones() as usize != k {
                continue;
            }
            if &self.contraction_class(gamma, keep) != target_class {
                continue;
            }
            let contracted: Vec<usize> = (0..ne).filter(|e| keep & (1 << e) == 0).collect();
            let c = graph.contract(&contracted);
            for iso in c.graph.isomorphisms(target, false) {
                let vmap = c.vertex.iter().map(|&v| iso.vertex[v]).collect();
                let hmap = c.halfedge.iter().map(|h| h.map(|h| iso.halfedge[h])).collect();
                out.push((keep, vmap, hmap));
            }
        }
        out
    }

    fn structures(&self, a: &StableGraph, b: &StableGraph) -> Arc<Vec<Structure>> {
        let key = (a.clone(), b.clone());
        if let Some(s) = self.structures.read().expect("poisoned").get(&key) {
            return s.clone();
        }
        let (ea, eb) = (a.num_edges(), b.num_edges());
        let (ca, cb) = (a.canonicalize(), b.canonicalize());
        let mut list = vec![];
        for (gamma, graph) in self.graphs.iter().enumerate() {
            let ne = graph.num_edges();
            if ne < ea.max(eb) || ne > ea + eb {
                continue;
            }
            let onto_a = self.structures_onto(gamma, a, &ca);
            if onto_a.is_empty() {
                continue;
            }
            let onto_b = self.structures_onto(gamma, b, &cb);
            let full = (1u64 << ne) - 1;
            for (ka, av, ah) in &onto_a {
                for (kb, bv, bh) in &onto_b {
                    if ka | kb != full {
                        continue;
                    }
                    let shared = (0..ne).filter(|e| (ka & kb) & (1 << e) != 0).collect();
                    list.push(Structure {
                        gamma,
                        a_vertex: av.clone(),
                        a_half: ah.clone(),
                        b_vertex: bv.clone(),
                        b_half: bh.clone(),
                        shared,
                    });
                }
            }
        }
        let list = Arc::new(list);
        self.structures.write().expect("poisoned").insert(key, list.clone());
        list
    }

    fn multiply_strata(
        &self,
        ambient: &Ambient,
        s1: &DecoratedStratum,
        s2: &DecoratedStratum,
    ) -> Result<Vec<(DecoratedStratum, Rational)>> {
        let mut p1 = s1.graph.clone();
        p1.clear_residues();
        let mut p2 = s2.graph.clone();
        p2.clear_residues();
        let twisted = ambient.twist.is_some();
        let aut1 = if twisted { s1.graph.aut_order() } else { s1.graph.plain_aut_order() };
        let aut2 = if twisted { s2.graph.aut_order() } else { s2.graph.plain_aut_order() };
        let mut out = vec![];
        for st in self.structures(&p1, &p2).iter() {
            let mut gamma = self.graphs[st.gamma].clone();
            let mut factor = Rational::new(1, (aut1 * aut2) as i64);
            if twisted {
                let mut res = vec![0u32; gamma.num_halfedges()];
                let mut ok = true;
                for h in 0..gamma.num_halfedges() {
                    let from_a = st.a_half[h].map(|k| s1.graph.residue(k));
                    let from_b = st.b_half[h].map(|k| s2.graph.residue(k));
                    res[h] = match (from_a, from_b) {
                        (Some(x), Some(y)) if x != y => {
                            ok = false;
                            break;
                        }
                        (Some(x), _) | (None, Some(x)) => x,
                        (None, None) => unreachable!("every edge comes from a factor"),
                    };
                }
                if !ok {
                    continue;
                }
                gamma.set_residues(res);
                if !ambient.admissible(&gamma) {
                    continue;
                }
                factor *= Rational::new(gamma.aut_order() as i64, self.plain_auts[st.gamma] as i64);
            }
            let da = pull_back(&s1.decoration, &gamma, &st.a_vertex, &st.a_half, self.n);
            let db = pull_back(&s2.decoration, &gamma, &st.b_vertex, &st.b_half, self.n);
            let mut poly = multiply_polys(&da, &db);
            for &e in &st.shared {
                let [h0, h1] = gamma.edges()[e];
                let mut excess = vec![];
                for h in [h0, h1] {
                    let mut d = Decoration::trivial(&gamma, self.n);
                    d.halfedge_psi[h] = 1;
                    excess.push((d, -Rational::one()));
                }
                poly = multiply_polys(&poly, &excess);
            }
            for (dec, c) in poly {
                let s = DecoratedStratum::new(gamma.clone(), dec);
                if !s.vanishes() {
                    out.push((s, c * &factor));
                }
            }
        }
        Ok(out)
    }
}

fn check_graph_limit(count: usize, limits: &Limits) -> Result<()> {
    if count > limits.max_graphs {
        return Err(Error::ResourceLimit(format!(
            "{count} stable graphs exceed the cap of {}",
            limits.max_graphs
        )));
    }
    Ok(())
}

/// Pull a decoration back along a contraction map `Γ -> Γ_i`.
fn pull_back(
    dec: &Decoration,
    gamma: &StableGraph,
    vmap: &[usize],
    hmap: &[Option<usize>],
    n: u32,
) -> Polynomial {
    let mut base = Decoration::trivial(gamma, n);
    base.leg_psi = dec.leg_psi.clone();
    for (h, target) in hmap.iter().enumerate() {
        if let Some(k) = target {
            base.halfedge_psi[h] = dec.halfedge_psi[*k];
        }
    }
    let mut poly = vec![(base, Rational::one())];
    // κ_c at a vertex pulls back to the sum of κ_c over its preimages
    for (u, kappas) in dec.vertex_kappa.iter().enumerate() {
        let pre: Vec<usize> = (0..gamma.num_vertices()).filter(|&v| vmap[v] == u).collect();
        for &c in kappas {
            let choices: Polynomial = pre
                .iter()
                .map(|&v| {
                    let mut d = Decoration::trivial(gamma, n);
                    d.vertex_kappa[v] = vec![c];
                    (d, Rational::one())
                })
                .collect();
            poly = multiply_polys(&poly, &choices);
        }
    }
    poly
}

fn multiply_polys(a: &Polynomial, b: &Polynomial) -> Polynomial {
    let mut acc: BTreeMap<Decoration, Rational> = BTreeMap::new();
    for (x, cx) in a {
        for (y, cy) in b {
            *acc.entry(x.multiply(y)).or_insert_with(Rational::zero) += cx * cy;
        }
    }
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}
