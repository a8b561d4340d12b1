//! Walk operators `A = sum_h T_h (x) A_h`, their unitarity constraints,
//! isotropy, a numerical scalar-walk search and the isotropic no-go
//! certificate.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cayley::{lattices, quadrangularity_check, GeneratingSet};
use crate::error::{structural, Error, Result};
use crate::group::{named_extension, Element, Extension};
use crate::linalg::{c, frobenius, identity, max_abs, CMat, Complex64};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// A walk `{G, S, s, {A_h}}`; `matrices[i]` belongs to `gens.elements()[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumWalk {
    gens: GeneratingSet,
    coin_dim: usize,
    matrices: Vec<CMat>,
    tolerance: f64,
}

impl QuantumWalk {
    pub fn new(gens: GeneratingSet, coin_dim: usize, matrices: Vec<CMat>) -> Result<Self> {
        if coin_dim == 0 {
            return Err(structural!("coin dimension must be at least 1"));
        }
        if matrices.len() != gens.len() {
            return Err(structural!("{} matrices for {} generators", matrices.len(), gens.len()));
        }
        for (i, m) in matrices.iter().enumerate() {
            if m.nrows() != coin_dim || m.ncols() != coin_dim {
                return Err(structural!("matrix {i} is {}x{}, coin dimension {coin_dim}", m.nrows(), m.ncols()));
            }
            if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(structural!("matrix {i} has non-finite entries"));
            }
        }
        Ok(QuantumWalk { gens, coin_dim, matrices, tolerance: DEFAULT_TOLERANCE })
    }

    /// Scalar (coinless) walk with one amplitude per generator of `S`.
    pub fn scalar(gens: GeneratingSet, z: &[Complex64]) -> Result<Self> {
        let m = z.iter().map(|&x| CMat::from_element(1, 1, x)).collect();
        Self::new(gens, 1, m)
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }

    pub fn gens(&self) -> &GeneratingSet {
        &self.gens
    }

    pub fn ext(&self) -> &Extension {
        self.gens.ext()
    }

    pub fn coin_dim(&self) -> usize {
        self.coin_dim
    }

    pub fn matrices(&self) -> &[CMat] {
        &self.matrices
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn matrix_for(&self, g: &Element) -> Option<&CMat> {
        self.gens.index_of(g).map(|i| &self.matrices[i])
    }

    /// Scalars of an `s = 1` walk.
    pub fn scalars(&self) -> Vec<Complex64> {
        self.matrices.iter().map(|m| m[(0, 0)]).collect()
    }

    /// Applies `A_h -> U A_h` to every matrix.
    pub fn left_multiplied(&self, u: &CMat) -> Self {
        let mut w = self.clone();
        w.matrices = self.matrices.iter().map(|m| u * m).collect();
        w
    }

    /// Applies `A_h -> U A_h U^dag` to every matrix.
    pub fn conjugated(&self, u: &CMat) -> Self {
        let mut w = self.clone();
        w.matrices = self.matrices.iter().map(|m| u * m * u.adjoint()).collect();
        w
    }

    pub fn scaled(&self, k: Complex64) -> Self {
        let mut w = self.clone();
        w.matrices = self.matrices.iter().map(|m| m * k).collect();
        w
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    /// `sum_{h h'^-1 = g} A_h A_h'^dag`
    Left,
    /// `sum_{h^-1 h' = g} A_h^dag A_h'`
    Right,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintResidual {
    pub side: Side,
    pub g: Element,
    pub norm: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnitarityReport {
    pub residual: f64,
    pub constraints: Vec<ConstraintResidual>,
}

impl UnitarityReport {
    /// Constraints whose norm exceeds `tol`, worst first.
    pub fn failing(&self, tol: f64) -> Vec<&ConstraintResidual> {
        let mut v: Vec<&ConstraintResidual> = self.constraints.iter().filter(|c| c.norm > tol).collect();
        v.sort_by(|a, b| b.norm.partial_cmp(&a.norm).expect("finite norms"));
        v
    }
}

/// Evaluates every unitarity constraint; the residual is the largest entry
/// modulus of `sum - delta_{g,e} I`. Each entry of a coarse-grained block is
/// one constraint of the scalar walk, so this residual is preserved.
pub fn unitarity_residual(w: &QuantumWalk) -> UnitarityReport {
    let ext = w.ext();
    let s = w.gens.elements();
    let inv: Vec<Element> = s.iter().map(|h| ext.inv(h)).collect();
    let adj: Vec<CMat> = w.matrices.iter().map(|m| m.adjoint()).collect();
    let zero = CMat::zeros(w.coin_dim, w.coin_dim);
    let mut acc: BTreeMap<(Side, Element), CMat> = BTreeMap::new();
    for i in 0..s.len() {
        for j in 0..s.len() {
            let gl = ext.mul(&s[i], &inv[j]);
            *acc.entry((Side::Left, gl)).or_insert_with(|| zero.clone()) += &w.matrices[i] * &adj[j];
            let gr = ext.mul(&inv[i], &s[j]);
            *acc.entry((Side::Right, gr)).or_insert_with(|| zero.clone()) += &adj[i] * &w.matrices[j];
        }
    }
    let e = ext.identity();
    let id = identity(w.coin_dim);
    let mut constraints = Vec::with_capacity(acc.len());
    let mut residual: f64 = 0.0;
    for ((side, g), mut m) in acc {
        if g == e {
            m -= &id;
        }
        let norm = max_abs(&m);
        residual = residual.max(norm);
        constraints.push(ConstraintResidual { side, g, norm });
    }
    UnitarityReport { residual, constraints }
}

pub fn verify_unitarity(w: &QuantumWalk) -> bool {
    unitarity_residual(w).residual <= w.tolerance
}

/// The two-matrix constraints `A_h A_{-h}^dag = A_h^dag A_{-h} = 0` over all
/// generators with a distinct inverse; returns the largest norm.
pub fn opposite_pair_defect(w: &QuantumWalk) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..w.gens.len() {
        let j = w.gens.inverse_index(i);
        if i == j {
            continue;
        }
        let (a, b) = (&w.matrices[i], &w.matrices[j]);
        worst = worst.max(frobenius(&(a * b.adjoint()))).max(frobenius(&(a.adjoint() * b)));
    }
    worst
}

/// A finite group `L` acting on generator indices with unitaries `U_l`.
#[derive(Clone, Debug, PartialEq)]
pub struct IsotropyRep {
    pub perms: Vec<Vec<usize>>,
    pub unitaries: Vec<CMat>,
}

impl IsotropyRep {
    pub fn trivial(n_gens: usize, coin_dim: usize) -> Self {
        IsotropyRep { perms: vec![(0..n_gens).collect()], unitaries: vec![identity(coin_dim)] }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IsotropyReport {
    pub isotropic: bool,
    pub max_deviation: f64,
    pub transitive: bool,
    pub homomorphism_defect: f64,
}

/// Order of a group element, `None` when infinite.
pub fn element_order(ext: &Extension, g: &Element) -> Option<usize> {
    let r = ext.quotient().element_order(g.q);
    let mut p = g.clone();
    for _ in 1..r {
        p = ext.mul(&p, g);
    }
    if p == ext.identity() {
        Some(r)
    } else {
        None
    }
}

/// Checks `A_{l(h)} = U_l A_h U_l^dag` for all `l, h` and transitivity of
/// `L` on generators of equal order.
pub fn isotropy_check(w: &QuantumWalk, rep: &IsotropyRep) -> Result<IsotropyReport> {
    let n = w.gens.len();
    if rep.perms.len() != rep.unitaries.len() {
        return Err(structural!("{} permutations but {} unitaries", rep.perms.len(), rep.unitaries.len()));
    }
    for p in &rep.perms {
        let mut seen = vec![false; n];
        if p.len() != n || p.iter().any(|&i| i >= n || core::mem::replace(&mut seen[i], true)) {
            return Err(structural!("{p:?} is not a permutation of the {n} generators"));
        }
    }
    let id: Vec<usize> = (0..n).collect();
    if !rep.perms.contains(&id) {
        return Err(structural!("the permutation set lacks the identity"));
    }
    let mut hom_defect: f64 = 0.0;
    for (a, pa) in rep.perms.iter().enumerate() {
        for (b, pb) in rep.perms.iter().enumerate() {
            let comp: Vec<usize> = (0..n).map(|i| pa[pb[i]]).collect();
            let Some(k) = rep.perms.iter().position(|p| *p == comp) else {
                return Err(structural!("permutations are not closed under composition"));
            };
            let prod = &rep.unitaries[a] * &rep.unitaries[b];
            hom_defect = hom_defect.max(frobenius(&(prod - &rep.unitaries[k])));
        }
    }
    let mut dev: f64 = 0.0;
    for (p, u) in rep.perms.iter().zip(&rep.unitaries) {
        for h in 0..n {
            let rotated = u * &w.matrices[h] * u.adjoint();
            dev = dev.max(frobenius(&(&w.matrices[p[h]] - rotated)));
        }
    }
    let ext = w.ext();
    let orders: Vec<Option<usize>> = w.gens.elements().iter().map(|g| element_order(ext, g)).collect();
    let transitive = (0..n).all(|h| {
        (0..n).filter(|&k| orders[k] == orders[h]).all(|k| rep.perms.iter().any(|p| p[h] == k))
    });
    let tol = w.tolerance;
    Ok(IsotropyReport {
        isotropic: dev <= tol && transitive && hom_defect <= tol,
        max_deviation: dev,
        transitive,
        homomorphism_defect: hom_defect,
    })
}

/// Options for [`scalar_solution_search`].
#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub restarts: usize,
    pub seed: u64,
    /// A point counts as a solution when its unitarity residual is below this.
    pub accept: f64,
    pub max_iters: usize,
    /// Adds the gauge `sum_h z_h = 1` to the objective.
    pub sum_gauge: bool,
    /// Optional map generator index -> free parameter index, to search
    /// inside a constrained (e.g. isotropic) family.
    pub tie: Option<Vec<usize>>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { restarts: 20, seed: 0, accept: 1e-7, max_iters: 20000, sum_gauge: false, tie: None }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    /// Distinct solutions (one scalar per generator), phase-fixed.
    pub solutions: Vec<Vec<Complex64>>,
    pub best_residual: f64,
    /// Residual reached by each restart, in restart order.
    pub restart_residuals: Vec<f64>,
    /// False when quadrangularity already rules out any scalar walk.
    pub quadrangular: bool,
}

impl SearchOutcome {
    pub fn feasible(&self) -> bool {
        !self.solutions.is_empty()
    }
}

/// Terms `z_a conj(z_b)` of one scalar constraint.
struct ScalarConstraint {
    is_identity: bool,
    pairs: Vec<(usize, usize)>,
}

fn scalar_constraints(gs: &GeneratingSet) -> Vec<ScalarConstraint> {
    let ext = gs.ext();
    let s = gs.elements();
    let inv: Vec<Element> = s.iter().map(|h| ext.inv(h)).collect();
    let mut map: BTreeMap<(Side, Element), Vec<(usize, usize)>> = BTreeMap::new();
    for i in 0..s.len() {
        for j in 0..s.len() {
            map.entry((Side::Left, ext.mul(&s[i], &inv[j]))).or_default().push((i, j));
            // conj(z_i) z_j
            map.entry((Side::Right, ext.mul(&inv[i], &s[j]))).or_default().push((j, i));
        }
    }
    let e = ext.identity();
    map.into_iter().map(|((_, g), pairs)| ScalarConstraint { is_identity: g == e, pairs }).collect()
}

struct Objective {
    cons: Vec<ScalarConstraint>,
    tie: Vec<usize>,
    n_params: usize,
    sum_gauge: bool,
}

impl Objective {
    fn expand(&self, w: &[Complex64]) -> Vec<Complex64> {
        self.tie.iter().map(|&t| w[t]).collect()
    }

    fn values(&self, z: &[Complex64]) -> Vec<Complex64> {
        self.cons
            .iter()
            .map(|c| {
                let mut v: Complex64 = c.pairs.iter().map(|&(a, b)| z[a] * z[b].conj()).sum();
                if c.is_identity {
                    v -= 1.0;
                }
                v
            })
            .collect()
    }

    fn value(&self, w: &[Complex64]) -> f64 {
        let z = self.expand(w);
        let mut f: f64 = self.values(&z).iter().map(|v| v.norm_sqr()).sum();
        if self.sum_gauge {
            f += (z.iter().sum::<Complex64>() - 1.0).norm_sqr();
        }
        f
    }

    /// Wirtinger gradient `dF/d conj(w)`.
    fn gradient(&self, w: &[Complex64]) -> Vec<Complex64> {
        let z = self.expand(w);
        let vals = self.values(&z);
        let mut gz = vec![c(0.0, 0.0); z.len()];
        for (con, v) in self.cons.iter().zip(&vals) {
            for &(a, b) in &con.pairs {
                gz[b] += v.conj() * z[a];
                gz[a] += v * z[b];
            }
        }
        if self.sum_gauge {
            let g = z.iter().sum::<Complex64>() - 1.0;
            for x in gz.iter_mut() {
                *x += g;
            }
        }
        let mut gw = vec![c(0.0, 0.0); self.n_params];
        for (k, &t) in self.tie.iter().enumerate() {
            gw[t] += gz[k];
        }
        gw
    }

    fn max_constraint(&self, w: &[Complex64]) -> f64 {
        self.values(&self.expand(w)).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

fn descend(obj: &Objective, mut w: Vec<Complex64>, opts: &SearchOptions) -> Vec<Complex64> {
    let mut f = obj.value(&w);
    let mut step = 0.1;
    for _ in 0..opts.max_iters {
        if obj.max_constraint(&w) < opts.accept * 0.1 {
            break;
        }
        let g = obj.gradient(&w);
        let gn: f64 = g.iter().map(|x| x.norm_sqr()).sum();
        if gn < 1e-300 {
            break;
        }
        step *= 2.0;
        loop {
            let trial: Vec<Complex64> = w.iter().zip(&g).map(|(x, gx)| x - gx * (2.0 * step)).collect();
            let ft = obj.value(&trial);
            if ft <= f - step * gn {
                w = trial;
                f = ft;
                break;
            }
            step *= 0.5;
            if step < 1e-18 {
                return w;
            }
        }
    }
    w
}

/// Fixes the global phase by making the largest-modulus scalar real positive.
pub fn fix_phase(z: &[Complex64]) -> Vec<Complex64> {
    let big = z.iter().copied().fold(c(0.0, 0.0), |a, b| if b.norm() > a.norm() { b } else { a });
    if big.norm() == 0.0 {
        return z.to_vec();
    }
    let ph = big.conj() / big.norm();
    z.iter().map(|x| x * ph).collect()
}

/// Local minimisation of the scalar unitarity system from random starts.
/// Deterministic for a given seed.
pub fn scalar_solution_search(gs: &GeneratingSet, opts: &SearchOptions) -> Result<SearchOutcome> {
    let quad = quadrangularity_check(gs);
    if !quad.passes {
        return Ok(SearchOutcome {
            solutions: Vec::new(),
            best_residual: f64::INFINITY,
            restart_residuals: Vec::new(),
            quadrangular: false,
        });
    }
    let n = gs.len();
    let tie = opts.tie.clone().unwrap_or_else(|| (0..n).collect());
    if tie.len() != n {
        return Err(structural!("tie map has {} entries for {n} generators", tie.len()));
    }
    let n_params = tie.iter().copied().max().map_or(0, |m| m + 1);
    let obj = Objective { cons: scalar_constraints(gs), tie, n_params, sum_gauge: opts.sum_gauge };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let scale = 1.0 / libm::sqrt(n as f64);
    let mut solutions: Vec<Vec<Complex64>> = Vec::new();
    let mut restart_residuals = Vec::with_capacity(opts.restarts);
    let mut best = f64::INFINITY;
    for _ in 0..opts.restarts {
        let w0: Vec<Complex64> =
            (0..n_params).map(|_| c(rng.random_range(-1.0..1.0) * scale, rng.random_range(-1.0..1.0) * scale)).collect();
        let w = descend(&obj, w0, opts);
        let z = obj.expand(&w);
        let walk = QuantumWalk::scalar(gs.clone(), &z)?;
        let r = unitarity_residual(&walk).residual;
        restart_residuals.push(r);
        best = best.min(r);
        if r < opts.accept {
            let zf = fix_phase(&z);
            let dup = solutions.iter().any(|s| s.iter().zip(&zf).all(|(a, b)| (a - b).norm() < 1e-5));
            if !dup {
                solutions.push(zf);
            }
        }
    }
    Ok(SearchOutcome { solutions, best_residual: best, restart_residuals, quadrangular: true })
}

/// Numerical evidence for the non-existence of isotropic scalar walks on
/// `Z^d x|_{-I} Z2` with `S = {O(h), O(h) c}`.
#[derive(Clone, Debug)]
pub struct NogoCertificate {
    pub d: usize,
    pub statement: String,
    pub instance: GeneratingSet,
    /// Generator index -> isotropic class (0: z+, 1: z-, 2: z_c).
    pub tie: Vec<usize>,
    pub samples: usize,
    /// Smallest `max(|z+|^2 + 2|z_c|^2 + |z-|^2, normalization gap)`.
    pub min_lower_bound: f64,
    /// Smallest full unitarity residual over the samples.
    pub min_residual: f64,
    /// True when every sample satisfied `residual >= bound > 0`.
    pub confirmed: bool,
}

/// The isotropic instance used by the certificate.
pub fn isotropic_instance(d: usize) -> Result<(GeneratingSet, Vec<usize>)> {
    let (ext, s) = match d {
        2 => (named_extension("J1")?, lattices::square()),
        3 => (named_extension("K1")?, lattices::bcc()),
        _ => return Err(Error::Unsupported(format!("no isotropic instance for d = {d}"))),
    };
    let gs = GeneratingSet::admissible(ext, &s)?;
    // listing order alternates +h, -h
    let tie = gs.elements().iter().enumerate().map(|(i, g)| if g.q == 1 { 2 } else { i % 2 }).collect();
    Ok((gs, tie))
}

pub fn isotropic_scalar_nogo_certificate(d: usize, samples: usize, seed: u64) -> Result<NogoCertificate> {
    let (gs, tie) = isotropic_instance(d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_bound = f64::INFINITY;
    let mut min_res = f64::INFINITY;
    let mut confirmed = true;
    for _ in 0..samples {
        let r = rng.random_range(0.0..1.0);
        let w: Vec<Complex64> =
            (0..3).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * r).collect();
        let res = isotropic_residual(&gs, &tie, &w)?;
        let bound = nogo_bound(&tie, &w);
        min_bound = min_bound.min(bound);
        min_res = min_res.min(res);
        if !(bound > 0.0 && res >= bound - 1e-12) {
            confirmed = false;
        }
    }
    let statement = "for h, h' with h - h' the unique longest path, the unitarity constraint at g = h h'^-1 \
                     reads |z+|^2 + |z_c|^2 + |z-|^2 + |z_c|^2 = 0, forcing all amplitudes to vanish, \
                     which contradicts sum_h |z_h|^2 = 1"
        .to_string();
    Ok(NogoCertificate {
        d,
        statement,
        instance: gs,
        tie,
        samples,
        min_lower_bound: min_bound,
        min_residual: min_res,
        confirmed,
    })
}

fn isotropic_residual(gs: &GeneratingSet, tie: &[usize], w: &[Complex64]) -> Result<f64> {
    let z: Vec<Complex64> = tie.iter().map(|&t| w[t]).collect();
    Ok(unitarity_residual(&QuantumWalk::scalar(gs.clone(), &z)?).residual)
}

fn nogo_bound(tie: &[usize], w: &[Complex64]) -> f64 {
    let s = w[0].norm_sqr() + w[1].norm_sqr() + 2.0 * w[2].norm_sqr();
    let norm: f64 = tie.iter().map(|&t| w[t].norm_sqr()).sum();
    s.max((norm - 1.0).abs())
}
