//! Stable graphs: dual graphs of stable nodal curves.
//!
//! A graph stores its vertices (genus and marked legs), its half-edges (each
//! attached to one vertex) and its edges (pairs of half-edges). Half-edges
//! carry stable integer ids so decorations can be attached to them, and an
//! optional residue in `Z/r` used for twisted (weighted) strata.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Vertex {
    pub genus: u32,
    /// Marked points (1-based), sorted.
    pub legs: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StableGraph {
    vertices: Vec<Vertex>,
    /// Vertex of each half-edge.
    halfedges: Vec<usize>,
    /// Edges as ordered pairs of half-edge ids.
    edges: Vec<[usize; 2]>,
    /// Residue of each half-edge (all zero for untwisted graphs).
    residues: Vec<u32>,
}

/// An isomorphism between two graphs with the same legs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Isomorphism {
    pub vertex: Vec<usize>,
    pub halfedge: Vec<usize>,
}

/// Result of contracting a set of edges.
#[derive(Debug, Clone)]
pub struct Contraction {
    pub graph: StableGraph,
    /// Old vertex -> new vertex.
    pub vertex: Vec<usize>,
    /// Old half-edge -> new half-edge (`None` for contracted half-edges).
    pub halfedge: Vec<Option<usize>>,
}

/// Reordering produced by canonicalization: entry `i` is the old index that
/// moved to position `i`.
#[derive(Debug, Clone)]
pub struct Relabeling {
    pub vertex_new_to_old: Vec<usize>,
    pub halfedge_new_to_old: Vec<usize>,
}

impl StableGraph {
    /// Build a graph, checking only structural consistency (not stability).
    pub fn new(vertices: Vec<Vertex>, halfedges: Vec<usize>, edges: Vec<[usize; 2]>) -> Result<Self> {
        let residues = vec![0; halfedges.len()];
        Self::with_residues(vertices, halfedges, edges, residues)
    }

    pub fn with_residues(
        mut vertices: Vec<Vertex>,
        halfedges: Vec<usize>,
        edges: Vec<[usize; 2]>,
        residues: Vec<u32>,
    ) -> Result<Self> {
        if residues.len() != halfedges.len() {
            return Err(Error::Graph("residue list length differs from half-edge count".into()));
        }
        if halfedges.iter().any(|&v| v >= vertices.len()) {
            return Err(Error::Graph("half-edge attached to a missing vertex".into()));
        }
        let mut seen = vec![false; halfedges.len()];
        for e in &edges {
            for &h in e {
                if h >= halfedges.len() || seen[h] {
                    return Err(Error::Graph(format!("half-edge {h} missing or used twice")));
                }
                seen[h] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Graph("dangling half-edge".into()));
        }
        for v in &mut vertices {
            v.legs.sort_unstable();
        }
        Ok(StableGraph { vertices, halfedges, edges, residues })
    }

    /// The graph with one vertex and no edges.
    pub fn smooth(g: u32, n: u32) -> Self {
        StableGraph {
            vertices: vec![Vertex { genus: g, legs: (1..=n).collect() }],
            halfedges: vec![],
            edges: vec![],
            residues: vec![],
        }
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_halfedges(&self) -> usize {
        self.halfedges.len()
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn halfedge_vertex(&self, h: usize) -> usize {
        self.halfedges[h]
    }

    pub fn residues(&self) -> &[u32] {
        &self.residues
    }

    pub fn residue(&self, h: usize) -> u32 {
        self.residues[h]
    }

    pub fn is_twisted(&self) -> bool {
        self.residues.iter().any(|&r| r != 0)
    }

    /// Replace all half-edge residues.
    pub fn set_residues(&mut self, residues: Vec<u32>) {
        assert_eq!(residues.len(), self.halfedges.len());
        self.residues = residues;
    }

    pub fn clear_residues(&mut self) {
        self.residues.iter_mut().for_each(|r| *r = 0);
    }

    /// The half-edge paired with `h`.
    pub fn partner(&self, h: usize) -> usize {
        let e = self.edge_of(h);
        if self.edges[e][0] == h {
            self.edges[e][1]
        } else {
            self.edges[e][0]
        }
    }

    pub fn edge_of(&self, h: usize) -> usize {
        self.edges
            .iter()
            .position(|e| e[0] == h || e[1] == h)
            .expect("half-edge belongs to an edge")
    }

    /// Half-edges attached to `v`, in id order.
    pub fn halfedges_at(&self, v: usize) -> Vec<usize> {
        (0..self.halfedges.len()).filter(|&h| self.halfedges[h] == v).collect()
    }

    /// Number of legs and half-edges at `v`.
    pub fn valence(&self, v: usize) -> usize {
        self.vertices[v].legs.len() + self.halfedges.iter().filter(|&&w| w == v).count()
    }

    /// Dimension `3g_v - 3 + n_v` of the vertex moduli space.
    pub fn vertex_dim(&self, v: usize) -> i64 {
        3 * self.vertices[v].genus as i64 - 3 + self.valence(v) as i64
    }

    /// Vertex carrying marked point `leg`.
    pub fn leg_vertex(&self, leg: u32) -> Option<usize> {
        self.vertices.iter().position(|v| v.legs.contains(&leg))
    }

    pub fn num_legs(&self) -> usize {
        self.vertices.iter().map(|v| v.legs.len()).sum()
    }

    /// First Betti number `E - V + 1`.
    pub fn betti(&self) -> u32 {
        (self.edges.len() + 1 - self.vertices.len()) as u32
    }

    /// Arithmetic genus: vertex genera plus loops.
    pub fn genus(&self) -> u32 {
        self.vertices.iter().map(|v| v.genus).sum::<u32>() + self.betti()
    }

    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return false;
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for e in &self.edges {
                let (a, b) = (self.halfedges[e[0]], self.halfedges[e[1]]);
                for (x, y) in [(a, b), (b, a)] {
                    if x == v && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Is the edge separating (removing it disconnects the graph)?
    pub fn is_separating(&self, e: usize) -> bool {
        let [h0, h1] = self.edges[e];
        let (a, b) = (self.halfedges[h0], self.halfedges[h1]);
        if a == b {
            return false;
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![a];
        seen[a] = true;
        while let Some(v) = stack.pop() {
            for (i, edge) in self.edges.iter().enumerate() {
                if i == e {
                    continue;
                }
                let (x, y) = (self.halfedges[edge[0]], self.halfedges[edge[1]]);
                for (p, q) in [(x, y), (y, x)] {
                    if p == v && !seen[q] {
                        seen[q] = true;
                        stack.push(q);
                    }
                }
            }
        }
        !seen[b]
    }

    /// Check stability, connectivity, the genus sum and that legs are exactly `1..=n`.
    pub fn validate(&self, g: u32, n: u32) -> Result<()> {
        for v in 0..self.vertices.len() {
            if 2 * self.vertices[v].genus as i64 - 2 + self.valence(v) as i64 <= 0 {
                return Err(Error::Graph(format!("vertex {v} is unstable")));
            }
        }
        if !self.is_connected() {
            return Err(Error::Graph("graph is disconnected".into()));
        }
        if self.genus() != g {
            return Err(Error::Graph(format!("genus {} != {g}", self.genus())));
        }
        let mut legs: Vec<u32> = self.vertices.iter().flat_map(|v| v.legs.iter().copied()).collect();
        legs.sort_unstable();
        if legs != (1..=n).collect::<Vec<_>>() {
            return Err(Error::Graph("legs do not partition 1..n".into()));
        }
        Ok(())
    }

    /// Contract the given edges, merging their endpoints.
    pub fn contract(&self, contracted: &[usize]) -> Contraction {
        let nv = self.vertices.len();
        let mut parent: Vec<usize> = (0..nv).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        let mut extra_genus = vec![0u32; nv];
        for &e in contracted {
            let [h0, h1] = self.edges[e];
            let a = find(&mut parent, self.halfedges[h0]);
            let b = find(&mut parent, self.halfedges[h1]);
            if a == b {
                extra_genus[a] += 1;
            } else {
                let (lo, hi) = (a.min(b), a.max(b));
                parent[hi] = lo;
                extra_genus[lo] += extra_genus[hi];
                extra_genus[hi] = 0;
            }
        }
        let mut root_index = BTreeMap::new();
        let mut vertex = vec![0; nv];
        for v in 0..nv {
            let r = find(&mut parent, v);
            let next = root_index.len();
            vertex[v] = *root_index.entry(r).or_insert(next);
        }
        let mut new_vertices = vec![Vertex { genus: 0, legs: vec![] }; root_index.len()];
        for (&root, &idx) in &root_index {
            new_vertices[idx].genus += extra_genus[root];
        }
        for v in 0..nv {
            let nvx = &mut new_vertices[vertex[v]];
            nvx.genus += self.vertices[v].genus;
            nvx.legs.extend(self.vertices[v].legs.iter().copied());
        }
        for v in &mut new_vertices {
            v.legs.sort_unstable();
        }
        let contracted_set: HashSet<usize> = contracted.iter().copied().collect();
        let mut halfedge = vec![None; self.halfedges.len()];
        let mut new_halfedges = vec![];
        let mut new_residues = vec![];
        let mut new_edges = vec![];
        for (i, e) in self.edges.iter().enumerate() {
            if contracted_set.contains(&i) {
                continue;
            }
            let mut pair = [0; 2];
            for (k, &h) in e.iter().enumerate() {
                halfedge[h] = Some(new_halfedges.len());
                pair[k] = new_halfedges.len();
                new_halfedges.push(vertex[self.halfedges[h]]);
                new_residues.push(self.residues[h]);
            }
            new_edges.push(pair);
        }
        Contraction {
            graph: StableGraph {
                vertices: new_vertices,
                halfedges: new_halfedges,
                edges: new_edges,
                residues: new_residues,
            },
            vertex,
            halfedge,
        }
    }

    /// All isomorphisms `self -> other` fixing legs. Residues must match when
    /// `with_residues` is set.
    pub fn isomorphisms(&self, other: &StableGraph, with_residues: bool) -> Vec<Isomorphism> {
        let mut out = vec![];
        if self.vertices.len() != other.vertices.len()
            || self.edges.len() != other.edges.len()
            || self.halfedges.len() != other.halfedges.len()
        {
            return out;
        }
        let sig = |g: &StableGraph, v: usize| {
            let loops = g
                .edges
                .iter()
                .filter(|e| g.halfedges[e[0]] == v && g.halfedges[e[1]] == v)
                .count();
            (g.vertices[v].clone(), g.valence(v), loops)
        };
        let sa: Vec<_> = (0..self.vertices.len()).map(|v| sig(self, v)).collect();
        let sb: Vec<_> = (0..other.vertices.len()).map(|v| sig(other, v)).collect();
        let mut vmap = vec![usize::MAX; self.vertices.len()];
        let mut used = vec![false; other.vertices.len()];
        self.vertex_bijections(other, &sa, &sb, 0, &mut vmap, &mut used, with_residues, &mut out);
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn vertex_bijections(
        &self,
        other: &StableGraph,
        sa: &[(Vertex, usize, usize)],
        sb: &[(Vertex, usize, usize)],
        i: usize,
        vmap: &mut Vec<usize>,
        used: &mut Vec<bool>,
        with_residues: bool,
        out: &mut Vec<Isomorphism>,
    ) {
        if i == vmap.len() {
            let mut hmap = vec![usize::MAX; self.halfedges.len()];
            let mut eused = vec![false; other.edges.len()];
            self.edge_bijections(other, 0, vmap, &mut hmap, &mut eused, with_residues, out);
            return;
        }
        for j in 0..sb.len() {
            if !used[j] && sa[i] == sb[j] {
                used[j] = true;
                vmap[i] = j;
                self.vertex_bijections(other, sa, sb, i + 1, vmap, used, with_residues, out);
                used[j] = false;
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn edge_bijections(
        &self,
        other: &StableGraph,
        i: usize,
        vmap: &[usize],
        hmap: &mut Vec<usize>,
        eused: &mut Vec<bool>,
        with_residues: bool,
        out: &mut Vec<Isomorphism>,
    ) {
        if i == self.edges.len() {
            out.push(Isomorphism { vertex: vmap.to_vec(), halfedge: hmap.clone() });
            return;
        }
        let [a0, a1] = self.edges[i];
        let (u, v) = (vmap[self.halfedges[a0]], vmap[self.halfedges[a1]]);
        for j in 0..other.edges.len() {
            if eused[j] {
                continue;
            }
            let [b0, b1] = other.edges[j];
            for (c0, c1) in [(b0, b1), (b1, b0)] {
                if other.halfedges[c0] != u || other.halfedges[c1] != v {
                    continue;
                }
                if with_residues
                    && (self.residues[a0] != other.residues[c0] || self.residues[a1] != other.residues[c1])
                {
                    continue;
                }
                eused[j] = true;
                hmap[a0] = c0;
                hmap[a1] = c1;
                self.edge_bijections(other, i + 1, vmap, hmap, eused, with_residues, out);
                eused[j] = false;
            }
        }
    }

    /// Order of the automorphism group (legs fixed, half-edge swaps counted).
    pub fn aut_order(&self) -> usize {
        self.isomorphisms(self, true).len()
    }

    /// Automorphisms ignoring residues.
    pub fn plain_aut_order(&self) -> usize {
        self.isomorphisms(self, false).len()
    }

    /// Canonical relabeling with extra per-vertex and per-half-edge labels.
    ///
    /// Two labelled graphs that are isomorphic (respecting labels and
    /// residues) yield identical `(graph, permuted labels)` outputs.
    pub fn canonical_relabeling<VL: Ord + Clone, HL: Ord + Clone>(
        &self,
        vlabels: &[VL],
        hlabels: &[HL],
    ) -> (StableGraph, Relabeling) {
        let nv = self.vertices.len();
        let hkey = |h: usize| (self.residues[h], hlabels[h].clone());
        let vkey = |v: usize| {
            let mut hs: Vec<_> = self.halfedges_at(v).into_iter().map(hkey).collect();
            hs.sort();
            (self.vertices[v].clone(), vlabels[v].clone(), hs)
        };
        let keys: Vec<_> = (0..nv).map(vkey).collect();
        let mut order: Vec<usize> = (0..nv).collect();
        order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
        // blocks of equal keys may be permuted freely
        let mut blocks: Vec<Vec<usize>> = vec![];
        for &v in &order {
            match blocks.last_mut() {
                Some(b) if keys[b[0]] == keys[v] => b.push(v),
                _ => blocks.push(vec![v]),
            }
        }
        type EdgeEnc<HL> = ((usize, u32, HL), (usize, u32, HL));
        let mut best: Option<(Vec<EdgeEnc<HL>>, Vec<usize>, Vec<[usize; 2]>)> = None;
        let mut candidate = vec![];
        for_each_block_permutation(&blocks, &mut candidate, &mut |new_to_old: &[usize]| {
            let mut old_to_new = vec![0; nv];
            for (i, &o) in new_to_old.iter().enumerate() {
                old_to_new[o] = i;
            }
            let mut enc: Vec<(EdgeEnc<HL>, [usize; 2])> = self
                .edges
                .iter()
                .map(|&[h0, h1]| {
                    let x = (old_to_new[self.halfedges[h0]], self.residues[h0], hlabels[h0].clone());
                    let y = (old_to_new[self.halfedges[h1]], self.residues[h1], hlabels[h1].clone());
                    if x <= y {
                        ((x, y), [h0, h1])
                    } else {
                        ((y, x), [h1, h0])
                    }
                })
                .collect();
            enc.sort_by(|a, b| a.0.cmp(&b.0));
            let code: Vec<_> = enc.iter().map(|e| e.0.clone()).collect();
            if best.as_ref().is_none_or(|b| code < b.0) {
                let oriented = enc.iter().map(|e| e.1).collect();
                best = Some((code, new_to_old.to_vec(), oriented));
            }
        });
        let (_, vertex_new_to_old, oriented) = best.expect("at least one ordering");
        let mut old_to_new = vec![0; nv];
        for (i, &o) in vertex_new_to_old.iter().enumerate() {
            old_to_new[o] = i;
        }
        let vertices = vertex_new_to_old.iter().map(|&o| self.vertices[o].clone()).collect();
        let mut halfedges = vec![];
        let mut residues = vec![];
        let mut edges = vec![];
        let mut halfedge_new_to_old = vec![];
        for [h0, h1] in oriented {
            let base = halfedges.len();
            for h in [h0, h1] {
                halfedges.push(old_to_new[self.halfedges[h]]);
                residues.push(self.residues[h]);
                halfedge_new_to_old.push(h);
            }
            edges.push([base, base + 1]);
        }
        (
            StableGraph { vertices, halfedges, edges, residues },
            Relabeling { vertex_new_to_old, halfedge_new_to_old },
        )
    }

    /// Canonical representative of the isomorphism class.
    pub fn canonicalize(&self) -> StableGraph {
        let vl = vec![(); self.vertices.len()];
        let hl = vec![(); self.halfedges.len()];
        self.canonical_relabeling(&vl, &hl).0
    }

    /// Half-edge name `"v.k"`: vertex index and slot among that vertex's half-edges.
    pub fn halfedge_name(&self, h: usize) -> String {
        let v = self.halfedges[h];
        let slot = self.halfedges_at(v).iter().position(|&x| x == h).unwrap();
        format!("{v}.{slot}")
    }

    pub fn halfedge_by_name(&self, name: &str) -> Option<usize> {
        let (v, k) = name.split_once('.')?;
        let v: usize = v.parse().ok()?;
        let k: usize = k.parse().ok()?;
        self.halfedges_at(v).get(k).copied()
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|&[a, b]| [self.halfedge_name(a), self.halfedge_name(b)])
                .collect(),
            residues: if self.is_twisted() {
                (0..self.halfedges.len())
                    .map(|h| (self.halfedge_name(h), self.residues[h]))
                    .collect()
            } else {
                BTreeMap::new()
            },
        }
    }

    pub fn from_json(json: &GraphJson) -> Result<Self> {
        let nv = json.vertices.len();
        let mut slots: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); nv];
        let parse = |s: &str| -> Result<(usize, usize)> {
            let (v, k) = s
                .split_once('.')
                .ok_or_else(|| Error::Graph(format!("bad half-edge name {s:?}")))?;
            let v = v.parse().map_err(|_| Error::Graph(format!("bad half-edge name {s:?}")))?;
            let k = k.parse().map_err(|_| Error::Graph(format!("bad half-edge name {s:?}")))?;
            if v >= nv {
                return Err(Error::Graph(format!("half-edge {s:?} on a missing vertex")));
            }
            Ok((v, k))
        };
        for e in &json.edges {
            for s in e {
                let (v, k) = parse(s)?;
                if !slots[v].insert(k) {
                    return Err(Error::Graph(format!("half-edge {s:?} used twice")));
                }
            }
        }
        // ids in (vertex, slot) order so names round-trip
        let mut id = BTreeMap::new();
        let mut halfedges = vec![];
        for (v, ks) in slots.iter().enumerate() {
            for (expected, &k) in ks.iter().enumerate() {
                if expected != k {
                    return Err(Error::Graph(format!("vertex {v} has non-contiguous slots")));
                }
                id.insert((v, k), halfedges.len());
                halfedges.push(v);
            }
        }
        let mut edges = vec![];
        for e in &json.edges {
            edges.push([id[&parse(&e[0])?], id[&parse(&e[1])?]]);
        }
        let mut residues = vec![0; halfedges.len()];
        for (name, &r) in &json.residues {
            residues[id[&parse(name)?]] = r;
        }
        StableGraph::with_residues(json.vertices.clone(), halfedges, edges, residues)
    }
}

fn for_each_block_permutation(
    blocks: &[Vec<usize>],
    prefix: &mut Vec<usize>,
    f: &mut dyn FnMut(&[usize]),
) {
    match blocks.split_first() {
        None => f(prefix),
        Some((first, rest)) => {
            let mut items = first.clone();
            permute(&mut items, 0, &mut |perm: &[usize]| {
                let len = prefix.len();
                prefix.extend_from_slice(perm);
                for_each_block_permutation(rest, prefix, f);
                prefix.truncate(len);
            });
        }
    }
}

fn permute(items: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, f);
        items.swap(k, i);
    }
}

/// JSON form: `{"vertices":[{"genus":..,"legs":[..]}],"edges":[["v.k","v.k"]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub residues: BTreeMap<String, u32>,
}

impl Serialize for StableGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for StableGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let json = GraphJson::deserialize(d)?;
        StableGraph::from_json(&json).map_err(serde::de::Error::custom)
    }
}

/// Check that `(g, n)` is a stable type.
pub fn check_stable_type(g: u32, n: u32) -> Result<()> {
    if 2 * g as i64 - 2 + n as i64 <= 0 {
        return Err(Error::Parameter(format!("(g,n)=({g},{n}) is unstable")));
    }
    Ok(())
}

/// Ways to degenerate vertex `v` by adding one edge.
fn degenerations(graph: &StableGraph, v: usize) -> Vec<StableGraph> {
    let mut out = vec![];
    let vert = &graph.vertices[v];
    let hs = graph.halfedges_at(v);
    // self-loop
    if vert.genus >= 1 {
        let mut vertices = graph.vertices.clone();
        vertices[v].genus -= 1;
        let mut halfedges = graph.halfedges.clone();
        let mut edges = graph.edges.clone();
        let base = halfedges.len();
        halfedges.extend([v, v]);
        edges.push([base, base + 1]);
        let residues = vec![0; halfedges.len()];
        out.push(StableGraph { vertices, halfedges, edges, residues });
    }
    // separating split: items are legs (Ok) and half-edges (Err)
    let items: Vec<std::result::Result<u32, usize>> =
        vert.legs.iter().map(|&l| Ok(l)).chain(hs.iter().map(|&h| Err(h))).collect();
    let k = items.len();
    for mask in 0u64..(1 << k) {
        for g1 in 0..=vert.genus {
            let g2 = vert.genus - g1;
            let n1 = mask.count_ones() as i64 + 1;
            let n2 = (k as i64 - mask.count_ones() as i64) + 1;
            if 2 * g1 as i64 - 2 + n1 <= 0 || 2 * g2 as i64 - 2 + n2 <= 0 {
                continue;
            }
            let mut vertices = graph.vertices.clone();
            let new_v = vertices.len();
            let mut legs1 = vec![];
            let mut legs2 = vec![];
            let mut halfedges = graph.halfedges.clone();
            for (i, item) in items.iter().enumerate() {
                let side1 = mask & (1 << i) != 0;
                match *item {
                    Ok(l) => {
                        if side1 {
                            legs1.push(l)
                        } else {
                            legs2.push(l)
                        }
                    }
                    Err(h) => halfedges[h] = if side1 { v } else { new_v },
                }
            }
            vertices[v] = Vertex { genus: g1, legs: legs1 };
            vertices.push(Vertex { genus: g2, legs: legs2 });
            let mut edges = graph.edges.clone();
            let base = halfedges.len();
            halfedges.extend([v, new_v]);
            edges.push([base, base + 1]);
            let residues = vec![0; halfedges.len()];
            out.push(StableGraph { vertices, halfedges, edges, residues });
        }
    }
    out
}

/// One canonical representative per isomorphism class of stable graphs of
/// type `(g, n)` with at most `max_edges` edges, sorted by edge count.
pub fn enumerate_stable_graphs(g: u32, n: u32, max_edges: u32) -> Result<Vec<StableGraph>> {
    check_stable_type(g, n)?;
    let dim = 3 * g as i64 - 3 + n as i64;
    if max_edges as i64 > dim {
        return Err(Error::Parameter(format!(
            "max_edges {max_edges} exceeds the dimension {dim} of the (g,n)=({g},{n}) moduli space"
        )));
    }
    let mut all = vec![StableGraph::smooth(g, n)];
    let mut layer = all.clone();
    for _ in 0..max_edges {
        let mut next: BTreeSet<StableGraph> = BTreeSet::new();
        for graph in &layer {
            for v in 0..graph.num_vertices() {
                for d in degenerations(graph, v) {
                    next.insert(d.canonicalize());
                }
            }
        }
        layer = next.into_iter().collect();
        all.extend(layer.iter().cloned());
    }
    Ok(all)
}
