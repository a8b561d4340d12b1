//! Regrouping `|n c_q> -> |n>|q>` of a scalar walk on a Q-by-Z^d group into
//! a coin-|Q| walk on Z^d, and the inverse lift of coin matrices back to
//! scalars.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::cayley::{coarse_grained_generators, CoarseEntry, GeneratingSet};
use crate::error::{precondition, structural, Error, Result};
use crate::group::{normalize_cocycle_with_shift, Element, Extension};
use crate::lattice::{sub_vec, LatticeVector};
use crate::linalg::{c, CMat, Complex64};
use crate::walk::QuantumWalk;

/// Where one coarse-grained matrix entry comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    /// Index of the coarse generator in `base.gens().elements()`.
    pub target: usize,
    pub row: usize,
    pub col: usize,
    /// Index of the scalar generator in the input walk.
    pub source: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoarseGrainedWalk {
    pub base: QuantumWalk,
    pub provenance: Vec<Provenance>,
}

impl CoarseGrainedWalk {
    /// Renders every matrix with `labels[source]` in each occupied entry and
    /// `0` elsewhere, e.g. `[[z_h1, z_h1c], [z_h2c, z_h2]]`.
    pub fn symbolic(&self, labels: &[String]) -> Vec<(LatticeVector, String)> {
        let s = self.base.coin_dim();
        self.base
            .gens()
            .elements()
            .iter()
            .enumerate()
            .map(|(t, g)| {
                let mut cells = vec![vec![String::from("0"); s]; s];
                for p in self.provenance.iter().filter(|p| p.target == t) {
                    cells[p.row][p.col] = labels[p.source].clone();
                }
                let rows: Vec<String> = cells.iter().map(|r| format!("[{}]", r.join(", "))).collect();
                (g.n.clone(), format!("[{}]", rows.join(", ")))
            })
            .collect()
    }

    pub fn matrix_for(&self, v: &[i64]) -> Option<&CMat> {
        self.base.matrix_for(&Element::kernel(v.to_vec()))
    }
}

/// Re-expresses a generating set on the normalized form of its extension.
/// Returns the set unchanged when the cocycle is already normalized.
pub fn normalized_generating_set(gs: &GeneratingSet) -> Result<GeneratingSet> {
    let ext = gs.ext();
    if ext.is_normalized() {
        return Ok(gs.clone());
    }
    let (norm, shifts) = normalize_cocycle_with_shift(ext)?;
    // n c_q = (n - n_q) c'_q
    let map = |g: &Element| Element::new(sub_vec(&g.n, &shifts[g.q]), g.q);
    let plus = gs.plus().iter().map(map).collect();
    let out = GeneratingSet::new(norm, plus, gs.includes_identity())?;
    debug_assert_eq!(out.len(), gs.len());
    Ok(out)
}

/// Applies the double-delta placement rule: `z_h` goes to row `q'`, column
/// `q` of the matrix of `c_{q'} h c_q^-1`, with `q' = q q_h^-1`.
pub fn coarse_grain(w: &QuantumWalk) -> Result<CoarseGrainedWalk> {
    if w.coin_dim() != 1 {
        return Err(Error::Unsupported(format!("coarse-graining needs a scalar walk, coin dimension is {}", w.coin_dim())));
    }
    let order = w.ext().quotient().order();
    if order < 2 {
        return Err(precondition!("quotient order is {order}; nothing to regroup"));
    }
    let gs = normalized_generating_set(w.gens())?;
    let d = gs.ext().dim();
    let entries = coarse_grained_generators(&gs);
    let mut vectors: Vec<LatticeVector> = Vec::new();
    for e in &entries {
        if !vectors.contains(&e.n_out) {
            vectors.push(e.n_out.clone());
        }
    }
    let zero = vec![0i64; d];
    let has_loop = vectors.contains(&zero);
    let plus: Vec<Element> = vectors.iter().filter(|v| **v != zero).cloned().map(Element::kernel).collect();
    let base_gs = GeneratingSet::new(Extension::trivial(d), plus, has_loop)?;
    if base_gs.len() != vectors.len() {
        return Err(structural!("coarse generators are not closed under inverses"));
    }
    let z = w.scalars();
    let mut mats = vec![CMat::zeros(order, order); base_gs.len()];
    let mut provenance = Vec::with_capacity(entries.len());
    for e in &entries {
        let t = base_gs.index_of(&Element::kernel(e.n_out.clone())).expect("vector registered above");
        mats[t][(e.q_prime, e.q)] += z[e.gen];
        provenance.push(Provenance { target: t, row: e.q_prime, col: e.q, source: e.gen });
    }
    let base = QuantumWalk::new(base_gs, order, mats)?.with_tolerance(w.tolerance());
    Ok(CoarseGrainedWalk { base, provenance })
}

/// Scalars recovered from a coin walk by inverting the placement rule.
#[derive(Clone, Debug, PartialEq)]
pub struct Refinement {
    pub walk: QuantumWalk,
    /// Largest deviation between an entry and the scalar assigned to it.
    pub spread: f64,
    /// Largest modulus of a target entry no scalar generator reaches.
    pub uncovered: f64,
}

/// Lifts a coin-|Q| walk on Z^d to scalars on `gs` (normalized cocycle):
/// each scalar is the mean of the target entries it would occupy. When the
/// target lies in the image of [`coarse_grain`], `spread` and `uncovered`
/// vanish and the round trip is exact.
pub fn refine(gs: &GeneratingSet, target: &QuantumWalk) -> Result<Refinement> {
    let ext = gs.ext();
    if !ext.is_normalized() {
        return Err(precondition!("refinement needs a normalized cocycle"));
    }
    let order = ext.quotient().order();
    if target.coin_dim() != order {
        return Err(structural!("target coin dimension {} differs from |Q| = {order}", target.coin_dim()));
    }
    if target.ext().quotient().order() != 1 || target.ext().dim() != ext.dim() {
        return Err(structural!("target must be a walk on Z^{}", ext.dim()));
    }
    let entries: Vec<CoarseEntry> = coarse_grained_generators(gs);
    let mut sum = vec![c(0.0, 0.0); gs.len()];
    let mut count = vec![0usize; gs.len()];
    let lookup = |e: &CoarseEntry| -> Complex64 {
        target.matrix_for(&Element::kernel(e.n_out.clone())).map_or(c(0.0, 0.0), |m| m[(e.q_prime, e.q)])
    };
    for e in &entries {
        sum[e.gen] += lookup(e);
        count[e.gen] += 1;
    }
    let z: Vec<Complex64> = sum.iter().zip(&count).map(|(s, &k)| s / k as f64).collect();
    let spread = entries.iter().map(|e| (lookup(e) - z[e.gen]).norm()).fold(0.0, f64::max);
    let mut uncovered: f64 = 0.0;
    for (g, m) in target.gens().elements().iter().zip(target.matrices()) {
        for r in 0..order {
            for col in 0..order {
                let hit = entries.iter().any(|e| e.n_out == g.n && e.q_prime == r && e.q == col);
                if !hit {
                    uncovered = uncovered.max(m[(r, col)].norm());
                }
            }
        }
    }
    let walk = QuantumWalk::scalar(gs.clone(), &z)?.with_tolerance(target.tolerance());
    Ok(Refinement { walk, spread, uncovered })
}

/// The relabeling `U_N: |n c_q> -> |n>|q>` on a periodic patch of side `l`.
/// Sites are stored row-major in `n mod l`; a scalar state is indexed
/// `site * |Q| + q` and a coarse state `site * |Q| + coin`, so the map is the
/// identity on flat indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StateIntertwiner {
    pub dim: usize,
    pub side: usize,
    pub order: usize,
}

impl StateIntertwiner {
    pub fn new(ext: &Extension, side: usize) -> Result<Self> {
        if side == 0 {
            return Err(precondition!("patch side must be at least 1"));
        }
        Ok(StateIntertwiner { dim: ext.dim(), side, order: ext.quotient().order() })
    }

    pub fn site_count(&self) -> usize {
        self.side.pow(self.dim as u32)
    }

    pub fn site_index(&self, n: &[i64]) -> usize {
        let l = self.side as i64;
        n.iter().fold(0usize, |acc, &x| acc * self.side + x.rem_euclid(l) as usize)
    }

    pub fn site_coords(&self, mut idx: usize) -> LatticeVector {
        let mut out = vec![0i64; self.dim];
        for k in (0..self.dim).rev() {
            out[k] = (idx % self.side) as i64;
            idx /= self.side;
        }
        out
    }

    /// `(n, q)` of the scalar walk to `(site, coin)` of the coarse walk.
    pub fn to_coarse(&self, n: &[i64], q: usize) -> (usize, usize) {
        (self.site_index(n), q)
    }

    pub fn to_scalar(&self, site: usize, coin: usize) -> (LatticeVector, usize) {
        (self.site_coords(site), coin)
    }

    /// Flat scalar index to flat coarse index.
    pub fn map_index(&self, scalar_index: usize) -> usize {
        let (site, q) = (scalar_index / self.order, scalar_index % self.order);
        site * self.order + q
    }

    /// Moves a scalar-walk amplitude vector into coarse layout.
    pub fn map_state(&self, scalar: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![c(0.0, 0.0); scalar.len()];
        for (i, a) in scalar.iter().enumerate() {
            out[self.map_index(i)] = *a;
        }
        out
    }
}

pub fn state_intertwiner(ext: &Extension, side: usize) -> Result<StateIntertwiner> {
    StateIntertwiner::new(ext, side)
}
