//! The line-bundle side: relation specs, residue bookkeeping and the Chern
//! character of the derived pushforward of the universal r-th root.
//!
//! `ch_d` is a combination of `κ_d`, leg `ψ_j^d` and one-edge boundary terms.
//! Each boundary term names a node by the residue `q` of one branch and
//! carries `γ_{d-1} = Σ_{i+j=d-1} (-ψ)^i ψ̂^j`.
//!
//! Half-edge residues follow the vertex congruence (residues around a vertex,
//! legs included, sum to 0 mod r), so the branch of residue `q` of a
//! separating node lies on the side holding `I`. The `-ψ` of `γ` sits on the
//! opposite branch. This is the orientation under which the pushforward agrees
//! with the graph sum for the total Chern class of the root; for `r = 2` the
//! two orientations give the same class, because `B_{d+1}(q/2)` vanishes for
//! even `d`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::exactnum::{bernoulli_poly, factorial, Rational};
use crate::graphs::{StableGraph, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RelationSpec {
    pub g: u32,
    pub n: u32,
    pub r: u32,
    pub a: Vec<u32>,
    pub d: u32,
    #[serde(default)]
    pub nontrivial_component: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("(g,n)=({g},{n}) is not a stable type")]
    Unstable { g: u32, n: u32 },
    #[error("r must be at least 2, got {0}")]
    Order(u32),
    #[error("expected {expected} residues, got {got}")]
    ResidueCount { expected: u32, got: usize },
    #[error("residue a_{index} = {value} is outside 0..{r}")]
    ResidueRange { index: usize, value: u32, r: u32 },
    #[error("residues sum to {sum}, which is not divisible by r = {r}")]
    ResidueSum { sum: u32, r: u32 },
    #[error("all residues are zero: this needs g > 0 and the nontrivial-component flag")]
    TrivialResidues,
    #[error("degree {d} is outside the window {low} < d <= {high}")]
    Window { d: u32, low: i64, high: i64 },
    #[error("degree must be at least 1")]
    Degree,
}

impl RelationSpec {
    pub fn new(g: u32, n: u32, r: u32, a: Vec<u32>, d: u32) -> Self {
        RelationSpec { g, n, r, a, d, nontrivial_component: false }
    }

    pub fn nontrivial(mut self) -> Self {
        self.nontrivial_component = true;
        self
    }

    pub fn dim(&self) -> u32 {
        3 * self.g + self.n - 3
    }

    pub fn all_zero(&self) -> bool {
        self.a.iter().all(|&x| x == 0)
    }

    /// Everything but the degree window.
    pub fn validate_structure(&self) -> std::result::Result<(), SpecError> {
        if 2 * self.g as i64 - 2 + self.n as i64 <= 0 {
            return Err(SpecError::Unstable { g: self.g, n: self.n });
        }
        if self.r < 2 {
            return Err(SpecError::Order(self.r));
        }
        if self.a.len() != self.n as usize {
            return Err(SpecError::ResidueCount { expected: self.n, got: self.a.len() });
        }
        if let Some((i, &v)) = self.a.iter().enumerate().find(|(_, &v)| v >= self.r) {
            return Err(SpecError::ResidueRange { index: i + 1, value: v, r: self.r });
        }
        let sum: u32 = self.a.iter().sum();
        if !sum.is_multiple_of(self.r) {
            return Err(SpecError::ResidueSum { sum, r: self.r });
        }
        if self.all_zero() && (self.g == 0 || !self.nontrivial_component) {
            return Err(SpecError::TrivialResidues);
        }
        if self.d < 1 {
            return Err(SpecError::Degree);
        }
        if self.d > self.dim() {
            return Err(SpecError::Window { d: self.d, low: self.virtual_rank(), high: self.dim() as i64 });
        }
        Ok(())
    }

    /// Rank of the obstruction bundle, `(1/r) Σ a_i + g - 1`.
    pub fn virtual_rank(&self) -> i64 {
        self.a.iter().sum::<u32>() as i64 / self.r as i64 + self.g as i64 - 1
    }
}

/// Accept a spec only if every invariant holds, including the degree window.
pub fn validate_spec(s: &RelationSpec) -> std::result::Result<RelationSpec, SpecError> {
    s.validate_structure()?;
    let low = s.virtual_rank();
    if (s.d as i64) <= low {
        return Err(SpecError::Window { d: s.d, low, high: s.dim() as i64 });
    }
    Ok(s.clone())
}

/// Degree `-(1/r) Σ a_i` of the coarse bundle.
pub fn coarse_degree(a: &[u32], r: u32) -> Result<i64> {
    let sum: u32 = a.iter().sum();
    if r == 0 || !sum.is_multiple_of(r) {
        return Err(Error::Parameter(format!("residue sum {sum} is not divisible by r = {r}")));
    }
    Ok(-((sum / r) as i64))
}

pub fn virtual_rank(s: &RelationSpec) -> i64 {
    s.virtual_rank()
}

/// Residue `q` of the branch on the side of genus `l` holding the legs `I`.
pub fn node_multiplicity(g: u32, l: u32, legs: &[u32], a: &[u32], r: u32) -> Result<u32> {
    let n = a.len() as u32;
    if !splitting_is_stable(g, n, l, legs) {
        return Err(Error::Parameter(format!("splitting (l={l}, I={legs:?}) is unstable")));
    }
    let sum: u32 = legs.iter().map(|&i| a[i as usize - 1]).sum();
    Ok((r - sum % r) % r)
}

fn splitting_is_stable(g: u32, n: u32, l: u32, legs: &[u32]) -> bool {
    let k = legs.len() as i64;
    l <= g
        && legs.iter().all(|&i| i >= 1 && i <= n)
        && 2 * l as i64 - 2 + k + 1 > 0
        && 2 * (g - l) as i64 - 2 + (n as i64 - k) + 1 > 0
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SepTerm {
    /// Genus `l` of the side holding the residue-`q` branch.
    pub genus: u32,
    /// Legs `I` on that side.
    pub legs: Vec<u32>,
    pub q: u32,
    pub coeff: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrrTerm {
    pub q: u32,
    pub coeff: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChernCharExpr {
    pub degree: u32,
    pub kappa_coeff: Rational,
    pub psi_coeffs: Vec<Rational>,
    pub sep_terms: Vec<SepTerm>,
    pub irr_terms: Vec<IrrTerm>,
}

/// `γ_k` as (exponent of the `-ψ` branch, exponent of the residue-`q` branch, sign).
pub fn gamma_expansion(k: u32) -> Vec<(u32, u32, Rational)> {
    (0..=k)
        .map(|i| {
            let sign = if i % 2 == 0 { Rational::one() } else { -Rational::one() };
            (i, k - i, sign)
        })
        .collect()
}

/// `ch_d` of the derived pushforward of the universal root.
pub fn chiodo_chern_char(s: &RelationSpec, d: u32) -> Result<ChernCharExpr> {
    s.validate_structure().or_else(|e| match e {
        // the window concerns the relation degree, not the character degree
        SpecError::Window { .. } | SpecError::Degree => Ok(()),
        e => Err(e),
    })?;
    if d < 1 {
        return Err(Error::Parameter("Chern character degree must be at least 1".into()));
    }
    let norm = Rational::from_bigint(factorial(d + 1)).recip();
    let b = |q: u32| bernoulli_poly(d as usize + 1, &Rational::new(q as i64, s.r as i64)) * &norm;
    let half_r = Rational::new(s.r as i64, 2);
    let kappa_coeff = b(0);
    let psi_coeffs = s.a.iter().map(|&a| -b(a)).collect();
    let mut sep_terms = vec![];
    for l in 0..=s.g {
        for mask in 0u32..(1 << s.n) {
            let legs: Vec<u32> = (1..=s.n).filter(|i| mask & (1 << (i - 1)) != 0).collect();
            if !splitting_is_stable(s.g, s.n, l, &legs) {
                continue;
            }
            let q = node_multiplicity(s.g, l, &legs, &s.a, s.r)?;
            sep_terms.push(SepTerm { genus: l, legs, q, coeff: &half_r * b(q) });
        }
    }
    let irr_terms = if s.g >= 1 {
        (0..s.r).map(|q| IrrTerm { q, coeff: &half_r * b(q) }).collect()
    } else {
        vec![]
    };
    Ok(ChernCharExpr { degree: d, kappa_coeff, psi_coeffs, sep_terms, irr_terms })
}

impl SepTerm {
    /// The same node seen from the other branch.
    pub fn swapped(&self, g: u32, n: u32, r: u32) -> (u32, Vec<u32>, u32) {
        let legs = (1..=n).filter(|i| !self.legs.contains(i)).collect();
        (g - self.genus, legs, (r - self.q) % r)
    }

    /// One-edge weighted graph; half-edge 0 has residue `q`, half-edge 1 gets `-ψ`.
    pub fn graph(&self, g: u32, n: u32, r: u32) -> StableGraph {
        let other: Vec<u32> = (1..=n).filter(|i| !self.legs.contains(i)).collect();
        StableGraph::with_residues(
            vec![
                Vertex { genus: self.genus, legs: self.legs.clone() },
                Vertex { genus: g - self.genus, legs: other },
            ],
            vec![0, 1],
            vec![[0, 1]],
            vec![self.q, (r - self.q) % r],
        )
        .expect("a stable splitting gives a valid graph")
    }
}

impl IrrTerm {
    /// Self-loop graph; half-edge 0 has residue `q`, half-edge 1 gets `-ψ`.
    pub fn graph(&self, g: u32, n: u32, r: u32) -> StableGraph {
        StableGraph::with_residues(
            vec![Vertex { genus: g - 1, legs: (1..=n).collect() }],
            vec![0, 0],
            vec![[0, 1]],
            vec![self.q, (r - self.q) % r],
        )
        .expect("a loop on a genus g-1 vertex is stable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_validation() {
        assert!(validate_spec(&RelationSpec::new(0, 5, 2, vec![1, 1, 1, 1, 0], 2)).is_ok());
        assert!(matches!(
            validate_spec(&RelationSpec::new(0, 4, 2, vec![1, 1, 1, 1], 1)),
            Err(SpecError::Window { .. })
        ));
        assert!(validate_spec(&RelationSpec::new(1, 1, 2, vec![0], 1).nontrivial()).is_ok());
        assert_eq!(
            validate_spec(&RelationSpec::new(1, 1, 2, vec![0], 1)),
            Err(SpecError::TrivialResidues)
        );
        assert_eq!(
            validate_spec(&RelationSpec::new(0, 3, 2, vec![0, 0, 0], 0).nontrivial()),
            Err(SpecError::TrivialResidues)
        );
        assert!(matches!(
            validate_spec(&RelationSpec::new(0, 4, 2, vec![1, 1, 1, 0], 1)),
            Err(SpecError::ResidueSum { .. })
        ));
        assert!(matches!(
            validate_spec(&RelationSpec::new(0, 4, 2, vec![1, 1, 3, 1], 1)),
            Err(SpecError::ResidueRange { index: 3, .. })
        ));
    }

    #[test]
    fn degrees_and_ranks() {
        assert_eq!(coarse_degree(&[1, 1], 2).unwrap(), -1);
        assert_eq!(coarse_degree(&[0, 0, 0], 5).unwrap(), 0);
        assert_eq!(coarse_degree(&[1, 2], 3).unwrap(), -1);
        assert!(coarse_degree(&[1], 2).is_err());
        assert_eq!(RelationSpec::new(1, 2, 2, vec![1, 1], 2).virtual_rank(), 1);
        assert_eq!(RelationSpec::new(0, 5, 2, vec![1, 1, 1, 1, 0], 2).virtual_rank(), 1);
        assert_eq!(RelationSpec::new(2, 1, 3, vec![0], 2).virtual_rank(), 1);
    }

    #[test]
    fn node_residues() {
        assert_eq!(node_multiplicity(1, 0, &[1, 2], &[1, 1], 2).unwrap(), 0);
        assert_eq!(node_multiplicity(0, 0, &[1, 2], &[1, 1, 2, 2], 3).unwrap(), 1);
        assert_eq!(node_multiplicity(2, 1, &[], &[1, 1], 2).unwrap(), 0);
        assert!(node_multiplicity(1, 0, &[1], &[1, 1], 2).is_err());
        assert_eq!(node_multiplicity(0, 0, &[1, 3], &[1, 1, 2, 2], 3).unwrap(), 0);
    }

    #[test]
    fn chern_character_coefficients() {
        let s = RelationSpec::new(1, 2, 2, vec![1, 1], 2);
        let ch = chiodo_chern_char(&s, 1).unwrap();
        assert_eq!(ch.kappa_coeff, Rational::new(1, 12));
        assert_eq!(ch.psi_coeffs, vec![Rational::new(1, 24), Rational::new(1, 24)]);
        assert_eq!(ch.irr_terms.len(), 2);
        assert_eq!(ch.irr_terms[0].coeff, Rational::new(1, 12));
        assert_eq!(ch.irr_terms[1].coeff, Rational::new(-1, 24));
        // (l, I) in {(0,{1,2}), (1,∅)}
        assert_eq!(ch.sep_terms.len(), 2);
        for t in &ch.sep_terms {
            assert_eq!(t.q, 0);
        }
        let genus0 = chiodo_chern_char(&RelationSpec::new(0, 5, 2, vec![1, 1, 1, 1, 0], 2), 1).unwrap();
        assert!(genus0.irr_terms.is_empty());
        assert_eq!(genus0.sep_terms.len(), 20);
    }

    #[test]
    fn branch_swap_consistency() {
        let specs = [
            RelationSpec::new(0, 6, 2, vec![1; 6], 3),
            RelationSpec::new(1, 2, 3, vec![1, 2], 2),
            RelationSpec::new(2, 2, 3, vec![1, 2], 4),
            RelationSpec::new(1, 3, 4, vec![1, 3, 0], 3),
        ];
        for s in &specs {
            for d in 1..=5 {
                let ch = chiodo_chern_char(s, d).unwrap();
                let sign = if (d - 1) % 2 == 0 { Rational::one() } else { -Rational::one() };
                for t in &ch.sep_terms {
                    assert_eq!(node_multiplicity(s.g, t.genus, &t.legs, &s.a, s.r).unwrap(), t.q);
                    let (l, legs, q) = t.swapped(s.g, s.n, s.r);
                    let partner = ch.sep_terms.iter().find(|u| u.genus == l && u.legs == legs).unwrap();
                    assert_eq!(partner.q, q);
                    assert_eq!(partner.coeff, &t.coeff * &sign);
                }
                for t in &ch.irr_terms {
                    let partner = &ch.irr_terms[((s.r - t.q) % s.r) as usize];
                    assert_eq!(partner.coeff, &t.coeff * &sign);
                }
            }
        }
    }

    #[test]
    fn gamma_terms() {
        let g = gamma_expansion(2);
        assert_eq!(g.len(), 3);
        assert_eq!(g[1], (1, 1, -Rational::one()));
        assert_eq!(gamma_expansion(0), vec![(0, 0, Rational::one())]);
    }
}
