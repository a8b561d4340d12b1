//! Momentum-space analysis of walks on Z^d: Brillouin zone, `A_k`,
//! dispersion relations, drift and diffusion.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cayley::GeneratingSet;
use crate::error::{precondition, Error, Result};
use crate::lattice::{IntMat, LatticeVector};
use crate::linalg::{c, normal_eigen, principal, CMat, Complex64};
use crate::walk::QuantumWalk;

/// Slack on the float side of the exact half-space test.
pub const MEMBERSHIP_SLACK: f64 = 1e-12;
/// Eigenphase gap below which drift and diffusion are refused.
pub const MIN_GAP: f64 = 1e-6;
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Half-space pair `-pi |n|^2 <= k.n <= pi |n|^2` with the rational normal
/// `n = numer / denom`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfSpace {
    pub numer: LatticeVector,
    pub denom: i64,
}

impl HalfSpace {
    pub fn normal(&self) -> Vec<f64> {
        self.numer.iter().map(|&x| x as f64 / self.denom as f64).collect()
    }

    /// `pi |n|^2`.
    pub fn bound(&self) -> f64 {
        let sq: i64 = self.numer.iter().map(|x| x * x).sum();
        PI * sq as f64 / (self.denom as f64 * self.denom as f64)
    }

    /// Exact in the normal: `|k.numer| <= pi |numer|^2 / denom`.
    pub fn contains(&self, k: &[f64], slack: f64) -> bool {
        let dot: f64 = k.iter().zip(&self.numer).map(|(a, &b)| a * b as f64).sum();
        let sq: i64 = self.numer.iter().map(|x| x * x).sum();
        dot.abs() <= PI * sq as f64 / self.denom as f64 + slack
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BrillouinZone {
    pub dim: usize,
    pub halfspaces: Vec<HalfSpace>,
    /// Per-axis `(min, max)` over the polytope vertices.
    pub bbox: Vec<(f64, f64)>,
}

impl BrillouinZone {
    pub fn contains(&self, k: &[f64]) -> bool {
        k.len() == self.dim && self.halfspaces.iter().all(|h| h.contains(k, MEMBERSHIP_SLACK))
    }

    /// Monte Carlo volume estimate over the bounding box.
    pub fn volume_estimate(&self, samples: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let box_vol: f64 = self.bbox.iter().map(|(a, b)| b - a).product();
        let mut k = vec![0.0; self.dim];
        let mut hits = 0usize;
        for _ in 0..samples {
            for (x, (a, b)) in k.iter_mut().zip(&self.bbox) {
                *x = rng.random_range(*a..=*b);
            }
            if self.contains(&k) {
                hits += 1;
            }
        }
        box_vol * hits as f64 / samples.max(1) as f64
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Brillouin zone of the lattice vectors `s_plus` in dimension `d`: the
/// intersection over the dual sets of every independent d-subset.
pub fn brillouin_zone_of(s_plus: &[LatticeVector], d: usize) -> Result<BrillouinZone> {
    if d == 0 {
        return Err(Error::Degenerate("dimension 0 has no Brillouin zone".into()));
    }
    let vecs: Vec<&LatticeVector> = s_plus.iter().filter(|v| v.iter().any(|&x| x != 0)).collect();
    if vecs.iter().any(|v| v.len() != d) {
        return Err(precondition!("generator of the wrong dimension"));
    }
    let mut halfspaces: Vec<HalfSpace> = Vec::new();
    for subset in combinations(vecs.len(), d) {
        let rows: Vec<Vec<i64>> = subset.iter().map(|&i| vecs[i].clone()).collect();
        let m = IntMat::from_rows(&rows);
        let det = m.det();
        if det == 0 {
            continue;
        }
        // rows of M are the h's, so the duals are the columns of adj(M)/det
        let adj = m.adjugate();
        for l in 0..d {
            let mut numer = adj.col(l);
            let mut denom = det;
            let g = numer.iter().fold(denom, |acc, &x| gcd(acc, x));
            numer.iter_mut().for_each(|x| *x /= g);
            denom /= g;
            if denom < 0 {
                denom = -denom;
                numer.iter_mut().for_each(|x| *x = -*x);
            }
            if numer.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
                numer.iter_mut().for_each(|x| *x = -*x);
            }
            let h = HalfSpace { numer, denom };
            if !halfspaces.contains(&h) {
                halfspaces.push(h);
            }
        }
    }
    if halfspaces.is_empty() {
        return Err(Error::Degenerate(format!("generators do not span R^{d}")));
    }
    let bbox = vertex_box(&halfspaces, d)?;
    Ok(BrillouinZone { dim: d, halfspaces, bbox })
}

/// Brillouin zone of a walk's kernel generators (trivial quotient).
pub fn brillouin_zone(gs: &GeneratingSet) -> Result<BrillouinZone> {
    if gs.ext().quotient().order() != 1 {
        return Err(precondition!("Brillouin zones are defined for walks on Z^d"));
    }
    let plus: Vec<LatticeVector> = gs.plus().iter().map(|g| g.n.clone()).collect();
    brillouin_zone_of(&plus, gs.ext().dim())
}

fn vertex_box(hs: &[HalfSpace], d: usize) -> Result<Vec<(f64, f64)>> {
    let mut bbox = vec![(f64::INFINITY, f64::NEG_INFINITY); d];
    let zone = BrillouinZone { dim: d, halfspaces: hs.to_vec(), bbox: Vec::new() };
    for subset in combinations(hs.len(), d) {
        let a = DMatrix::from_fn(d, d, |i, j| hs[subset[i]].normal()[j]);
        let Some(lu) = Some(a.lu()).filter(|lu| lu.determinant().abs() > 1e-12) else {
            continue;
        };
        for signs in 0..(1usize << d) {
            let b = DVector::from_fn(d, |i, _| {
                let s = if signs >> i & 1 == 1 { -1.0 } else { 1.0 };
                s * hs[subset[i]].bound()
            });
            let Some(x) = lu.solve(&b) else { continue };
            if zone.halfspaces.iter().all(|h| h.contains(x.as_slice(), 1e-9)) {
                for (i, v) in x.iter().enumerate() {
                    bbox[i].0 = bbox[i].0.min(*v);
                    bbox[i].1 = bbox[i].1.max(*v);
                }
            }
        }
    }
    if bbox.iter().any(|(a, b)| !(a < b)) {
        return Err(Error::Degenerate("Brillouin zone is not a bounded polytope".into()));
    }
    Ok(bbox)
}

fn require_lattice_walk(w: &QuantumWalk, k: &[f64]) -> Result<()> {
    if w.ext().quotient().order() != 1 {
        return Err(precondition!("momentum matrices need a walk on Z^d; coarse-grain first"));
    }
    if k.len() != w.ext().dim() {
        return Err(precondition!("k has {} components, lattice dimension is {}", k.len(), w.ext().dim()));
    }
    Ok(())
}

/// `A_k = sum_h e^{i h.k} A_h`.
pub fn walk_at_k(w: &QuantumWalk, k: &[f64]) -> Result<CMat> {
    require_lattice_walk(w, k)?;
    let s = w.coin_dim();
    let mut out = CMat::zeros(s, s);
    for (g, a) in w.gens().elements().iter().zip(w.matrices()) {
        let ph: f64 = g.n.iter().zip(k).map(|(&x, y)| x as f64 * y).sum();
        out += a * c(libm::cos(ph), libm::sin(ph));
    }
    Ok(out)
}

/// Eigenphases with the global phase `arg(det)/s` removed, sorted.
pub fn centered_eigenphases(a: &CMat) -> Vec<f64> {
    let s = a.nrows() as f64;
    let theta = crate::linalg::det(a).arg() / s;
    let (vals, _) = normal_eigen(a);
    let mut ph: Vec<f64> = vals.iter().map(|z| principal(z.arg() - theta)).collect();
    ph.sort_by(|x, y| x.total_cmp(y));
    ph
}

/// Interpolating Hamiltonian `H = -sum_l w_l P_l`, so `exp(-i H) = A_k`.
pub fn interpolating_hamiltonian(a: &CMat) -> CMat {
    let (vals, u) = normal_eigen(a);
    let diag = CMat::from_diagonal(&DVector::from_iterator(vals.len(), vals.iter().map(|z| c(-z.arg(), 0.0))));
    &u * diag * u.adjoint()
}

#[derive(Clone, Debug, PartialEq)]
pub struct DispersionPoint {
    pub k: Vec<f64>,
    /// Sorted ascending in (-pi, pi].
    pub omegas: Vec<f64>,
    pub v: Option<Vec<f64>>,
    /// Row-major `d x d`.
    pub diffusion: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DispersionGrid {
    pub dim: usize,
    pub coin_dim: usize,
    pub points: Vec<DispersionPoint>,
}

/// Sample points of an `n`-per-axis rectangular grid over the zone's
/// bounding box that lie in the (closed) zone, last axis fastest.
pub fn grid_points(zone: &BrillouinZone, n: usize) -> Vec<Vec<f64>> {
    let axis = |(a, b): (f64, f64)| -> Vec<f64> {
        if n <= 1 {
            vec![(a + b) / 2.0]
        } else {
            (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
        }
    };
    let axes: Vec<Vec<f64>> = zone.bbox.iter().map(|&r| axis(r)).collect();
    let mut out = Vec::new();
    let total = axes.iter().map(Vec::len).product::<usize>();
    for mut idx in 0..total {
        let mut k = vec![0.0; zone.dim];
        for ax in (0..zone.dim).rev() {
            let len = axes[ax].len();
            k[ax] = axes[ax][idx % len];
            idx /= len;
        }
        if zone.contains(&k) {
            out.push(k);
        }
    }
    out
}

/// Eigenphases of `A_k` on an `n`-per-axis grid clipped to the zone.
pub fn dispersion(w: &QuantumWalk, n: usize) -> Result<DispersionGrid> {
    let zone = brillouin_zone(w.gens())?;
    let mut points = Vec::new();
    for k in grid_points(&zone, n) {
        let omegas = crate::linalg::eigenphases(&walk_at_k(w, &k)?);
        points.push(DispersionPoint { k, omegas, v: None, diffusion: None });
    }
    Ok(DispersionGrid { dim: zone.dim, coin_dim: w.coin_dim(), points })
}

/// As [`dispersion`], with drift and diffusion of `branch` at every point
/// away from band crossings.
pub fn dispersion_with_derivatives(w: &QuantumWalk, n: usize, branch: Branch, h: f64) -> Result<DispersionGrid> {
    let mut grid = dispersion(w, n)?;
    for p in grid.points.iter_mut() {
        match group_velocity_and_diffusion(w, &p.k, branch, h) {
            Ok(dd) => {
                p.v = Some(dd.v);
                p.diffusion = Some(dd.diffusion);
            }
            Err(Error::Degenerate(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(grid)
}

/// Which eigenphase branch to differentiate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// Position in the ascending eigenphase list at `k0`.
    Index(usize),
    /// Largest eigenphase at `k0`.
    Upper,
    /// Smallest eigenphase at `k0`.
    Lower,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Derivatives {
    pub omega: f64,
    pub v: Vec<f64>,
    /// Row-major `d x d`.
    pub diffusion: Vec<f64>,
}

struct Tracker<'a> {
    w: &'a QuantumWalk,
    omega: f64,
    vec: DVector<Complex64>,
}

impl Tracker<'_> {
    /// Phase of the eigenvector with maximal overlap, unwrapped near `omega`.
    fn phase_at(&self, k: &[f64]) -> Result<f64> {
        let (vals, u) = normal_eigen(&walk_at_k(self.w, k)?);
        let mut best = (0usize, -1.0);
        for j in 0..vals.len() {
            let ov = self.vec.dotc(&u.column(j)).norm();
            if ov > best.1 {
                best = (j, ov);
            }
        }
        Ok(self.omega + principal(vals[best.0].arg() - self.omega))
    }
}

/// `v = grad w`, `D = grad grad w` at `k0` by central differences with step
/// `h`, following the chosen branch by eigenvector overlap.
pub fn group_velocity_and_diffusion(w: &QuantumWalk, k0: &[f64], branch: Branch, h: f64) -> Result<Derivatives> {
    if !(h > 0.0) {
        return Err(precondition!("finite-difference step must be positive"));
    }
    let (vals, u) = normal_eigen(&walk_at_k(w, k0)?);
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| principal(vals[a].arg()).total_cmp(&principal(vals[b].arg())));
    let pos = match branch {
        Branch::Index(i) if i < order.len() => i,
        Branch::Index(i) => return Err(precondition!("branch {i} out of range")),
        Branch::Upper => order.len() - 1,
        Branch::Lower => 0,
    };
    let b = order[pos];
    let omega = principal(vals[b].arg());
    let gap = (0..vals.len())
        .filter(|&j| j != b)
        .map(|j| principal(vals[j].arg() - vals[b].arg()).abs())
        .fold(f64::INFINITY, f64::min);
    if gap < MIN_GAP {
        return Err(Error::Degenerate(format!("eigenphase gap {gap:.3e} at k0 is below {MIN_GAP:e}")));
    }
    let t = Tracker { w, omega, vec: u.column(b).into_owned() };
    let d = k0.len();
    let shifted = |steps: &[(usize, f64)]| -> Result<f64> {
        let mut k = k0.to_vec();
        for &(i, s) in steps {
            k[i] += s;
        }
        t.phase_at(&k)
    };
    let mut v = vec![0.0; d];
    let mut diff = vec![0.0; d * d];
    for i in 0..d {
        let p = shifted(&[(i, h)])?;
        let m = shifted(&[(i, -h)])?;
        v[i] = (p - m) / (2.0 * h);
        diff[i * d + i] = (p - 2.0 * omega + m) / (h * h);
        for j in 0..i {
            let pp = shifted(&[(i, h), (j, h)])?;
            let pm = shifted(&[(i, h), (j, -h)])?;
            let mp = shifted(&[(i, -h), (j, h)])?;
            let mm = shifted(&[(i, -h), (j, -h)])?;
            let x = (pp - pm - mp + mm) / (4.0 * h * h);
            diff[i * d + j] = x;
            diff[j * d + i] = x;
        }
    }
    Ok(Derivatives { omega, v, diffusion: diff })
}
