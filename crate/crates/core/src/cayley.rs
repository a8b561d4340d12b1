//! Generating sets and Cayley-graph predicates.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{structural, Result};
use crate::group::{Element, Extension};
use crate::lattice::LatticeVector;

/// `S_+` together with the loop flag. The full generator list `S` is
/// `S_+`, then the inverses not already present, then the identity when
/// loops are enabled. Matrices and scalars are keyed by position in `S`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratingSet {
    ext: Extension,
    plus: Vec<Element>,
    includes_identity: bool,
    closure: Vec<Element>,
}

impl GeneratingSet {
    pub fn new(ext: Extension, plus: Vec<Element>, includes_identity: bool) -> Result<Self> {
        let id = ext.identity();
        for (i, g) in plus.iter().enumerate() {
            if g.n.len() != ext.dim() || g.q >= ext.quotient().order() {
                return Err(structural!("generator {i} = {g} does not belong to the extension"));
            }
            if *g == id {
                return Err(structural!("identity listed in S+; use includes_identity"));
            }
            if plus[..i].contains(g) {
                return Err(structural!("generator {g} listed twice"));
            }
        }
        let mut closure = plus.clone();
        for g in &plus {
            let gi = ext.inv(g);
            if !closure.contains(&gi) {
                closure.push(gi);
            }
        }
        if includes_identity {
            closure.push(id);
        }
        Ok(GeneratingSet { ext, plus, includes_identity, closure })
    }

    /// Plain lattice generators on Z^d (trivial quotient).
    pub fn lattice(plus: &[LatticeVector], includes_identity: bool) -> Result<Self> {
        let d = plus.first().map_or(0, |v| v.len());
        let gens = plus.iter().map(|v| Element::kernel(v.clone())).collect();
        Self::new(Extension::trivial(d), gens, includes_identity)
    }

    /// The index-2 presentation `S' = {g, gc : g in S}` for a symmetric
    /// lattice set `S` given in listing order.
    pub fn admissible(ext: Extension, s: &[LatticeVector]) -> Result<Self> {
        let mut plus: Vec<Element> = s.iter().map(|v| Element::kernel(v.clone())).collect();
        plus.extend(s.iter().map(|v| Element::new(v.clone(), 1)));
        Self::new(ext, plus, false)
    }

    pub fn ext(&self) -> &Extension {
        &self.ext
    }

    pub fn plus(&self) -> &[Element] {
        &self.plus
    }

    pub fn includes_identity(&self) -> bool {
        self.includes_identity
    }

    /// The full generator list `S` (see the type docs for the order).
    pub fn elements(&self) -> &[Element] {
        &self.closure
    }

    pub fn len(&self) -> usize {
        self.closure.len()
    }

    pub fn is_empty(&self) -> bool {
        self.closure.is_empty()
    }

    pub fn index_of(&self, g: &Element) -> Option<usize> {
        self.closure.iter().position(|x| x == g)
    }

    /// Position of `h^-1` in `S`.
    pub fn inverse_index(&self, i: usize) -> usize {
        let gi = self.ext.inv(&self.closure[i]);
        self.index_of(&gi).expect("S is closed under inverses")
    }
}

/// `S_+ u S_-` in the order described on [`GeneratingSet`].
pub fn symmetric_closure(gs: &GeneratingSet) -> Vec<Element> {
    gs.elements().to_vec()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadrangularityReport {
    pub passes: bool,
    /// Ordered index pairs `(h1, h2)` into `S` whose product `h1 h2^-1`
    /// no other pair reproduces.
    pub violators: Vec<(usize, usize)>,
}

/// Checks that every `h1 h2^-1` (with `h1 != h2`) arises from at least two
/// ordered pairs of `S`.
pub fn quadrangularity_check(gs: &GeneratingSet) -> QuadrangularityReport {
    let s = gs.elements();
    let ext = gs.ext();
    let inv: Vec<Element> = s.iter().map(|h| ext.inv(h)).collect();
    let mut count: BTreeMap<Element, usize> = BTreeMap::new();
    let mut products = Vec::new();
    for (i, a) in s.iter().enumerate() {
        for (j, bi) in inv.iter().enumerate() {
            if i == j {
                continue;
            }
            let p = ext.mul(a, bi);
            *count.entry(p.clone()).or_insert(0) += 1;
            products.push(((i, j), p));
        }
    }
    let violators: Vec<(usize, usize)> =
        products.into_iter().filter(|(_, p)| count[p] < 2).map(|(ij, _)| ij).collect();
    QuadrangularityReport { passes: violators.is_empty(), violators }
}

/// One regrouped generator: scalar generator `gen` seen from coset `q`
/// lands in coset `q_prime` with kernel displacement `n_out`, i.e.
/// `c_{q'} h c_q^-1 = n_out` and `q' = q q_h^-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoarseEntry {
    pub gen: usize,
    pub q: usize,
    pub q_prime: usize,
    pub n_out: LatticeVector,
}

/// The kernel generators `S_N`, one entry per (generator, coset) pair.
pub fn coarse_grained_generators(gs: &GeneratingSet) -> Vec<CoarseEntry> {
    let ext = gs.ext();
    let quotient = ext.quotient();
    let d = ext.dim();
    let rep = |q: usize| Element::new(vec![0; d], q);
    let mut out = Vec::new();
    for (i, h) in gs.elements().iter().enumerate() {
        for q in 0..quotient.order() {
            let qp = quotient.mul(q, quotient.inv(h.q));
            let m = ext.mul(&ext.mul(&rep(qp), h), &ext.inv(&rep(q)));
            debug_assert_eq!(m.q, 0);
            out.push(CoarseEntry { gen: i, q, q_prime: qp, n_out: m.n });
        }
    }
    out
}

/// Distinct kernel parts of `S_N` in first-appearance order.
pub fn kernel_generators(entries: &[CoarseEntry]) -> Vec<LatticeVector> {
    let mut out: Vec<LatticeVector> = Vec::new();
    for e in entries {
        if !out.contains(&e.n_out) {
            out.push(e.n_out.clone());
        }
    }
    out
}

pub use crate::lattice::generates_full_lattice;

/// Standard generator lists in listing order.
pub mod lattices {
    use super::*;

    /// `{h1, -h1, h2, -h2}` on the square lattice.
    pub fn square() -> Vec<LatticeVector> {
        vec![vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]]
    }

    /// `{+1, -1}` on Z.
    pub fn line() -> Vec<LatticeVector> {
        vec![vec![1], vec![-1]]
    }

    /// The four BCC vectors `h1..h4`.
    pub fn bcc_plus() -> Vec<LatticeVector> {
        vec![vec![1, 1, 1], vec![-1, -1, 1], vec![-1, 1, -1], vec![1, -1, -1]]
    }

    /// `{h1, -h1, ..., h4, -h4}`.
    pub fn bcc() -> Vec<LatticeVector> {
        bcc_plus().into_iter().flat_map(|h| [h.clone(), h.iter().map(|x| -x).collect()]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{klein_semidirect, named_extension};
    use crate::lattice::IntMat;

    #[test]
    fn closure_examples() {
        let z = GeneratingSet::lattice(&[vec![1]], false).unwrap();
        assert_eq!(symmetric_closure(&z), vec![Element::kernel(vec![1]), Element::kernel(vec![-1])]);
        let dinf = named_extension("Dinf").unwrap();
        let gs = GeneratingSet::new(dinf, vec![Element::kernel(vec![1]), Element::new(vec![1], 1)], false).unwrap();
        assert_eq!(
            symmetric_closure(&gs),
            vec![Element::kernel(vec![1]), Element::new(vec![1], 1), Element::kernel(vec![-1])]
        );
        let sym = GeneratingSet::lattice(&lattices::square(), false).unwrap();
        assert_eq!(symmetric_closure(&sym).len(), 4);
        assert!(GeneratingSet::lattice(&[vec![0, 0]], false).is_err());
        assert!(GeneratingSet::lattice(&[vec![1, 0], vec![1, 0]], false).is_err());
    }

    #[test]
    fn quadrangularity_examples() {
        let z = GeneratingSet::lattice(&lattices::line(), false).unwrap();
        let r = quadrangularity_check(&z);
        assert!(!r.passes);
        assert_eq!(r.violators, vec![(0, 1), (1, 0)]);
        // 2 h1 only arises from (h1, -h1): the bare square lattice fails
        let sq = quadrangularity_check(&GeneratingSet::lattice(&lattices::square(), false).unwrap());
        assert_eq!(sq.violators, vec![(0, 1), (1, 0), (2, 3), (3, 2)]);
        for name in ["J1", "J2", "J3"] {
            let gs = GeneratingSet::admissible(named_extension(name).unwrap(), &lattices::square()).unwrap();
            assert!(quadrangularity_check(&gs).passes, "{name}");
        }
    }

    #[test]
    fn coarse_generators_examples() {
        let dinf = named_extension("Dinf").unwrap();
        let gs = GeneratingSet::new(dinf, vec![Element::kernel(vec![1]), Element::new(vec![0], 1)], false).unwrap();
        let e = coarse_grained_generators(&gs);
        let from0: Vec<_> = e.iter().filter(|x| x.gen == 0).map(|x| (x.q, x.n_out.clone())).collect();
        assert_eq!(from0, vec![(0, vec![1]), (1, vec![-1])]);
        assert!(e.iter().filter(|x| x.gen == 1).all(|x| x.n_out == vec![0] && x.q_prime != x.q));
        let j2 = GeneratingSet::admissible(named_extension("J2").unwrap(), &lattices::square()).unwrap();
        let e = coarse_grained_generators(&j2);
        let h1: Vec<_> = e.iter().filter(|x| x.gen == 0).map(|x| x.n_out.clone()).collect();
        assert_eq!(h1, vec![vec![1, 0], vec![0, 1]]);
        assert!(generates_full_lattice(&kernel_generators(&e), 2));
    }

    #[test]
    fn klein_parent_is_quadrangular() {
        let sz = IntMat::diag(&[1, -1]);
        let ext = klein_semidirect(&sz, &sz.neg()).unwrap();
        let mut plus: Vec<Element> = lattices::square().into_iter().map(Element::kernel).collect();
        plus.extend(lattices::square().into_iter().map(|v| Element::new(v, 1)));
        plus.push(Element::new(vec![0, 0], 2));
        let gs = GeneratingSet::new(ext, plus, false).unwrap();
        assert!(quadrangularity_check(&gs).passes);
    }
}
