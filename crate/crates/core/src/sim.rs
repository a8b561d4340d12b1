//! Evolution on periodic patches. States live on `(Z_L)^d x Q x C^s` and a
//! step is the gather `psi'(g) = sum_h A_h psi(g h)`, the component form of
//! `T_h |g> = |g h^-1>`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coarse::{coarse_grain, StateIntertwiner};
use crate::error::{precondition, structural, Error, Result};
use crate::group::{normalize_cocycle_with_shift, Element};
use crate::lattice::LatticeVector;
use crate::linalg::{c, Complex64};
use crate::walk::QuantumWalk;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TorusPatch {
    pub side: usize,
    pub dim: usize,
    pub quotient_size: usize,
}

impl TorusPatch {
    pub fn new(side: usize, dim: usize, quotient_size: usize) -> Result<Self> {
        if side == 0 || quotient_size == 0 {
            return Err(precondition!("patch side and quotient size must be at least 1"));
        }
        side.checked_pow(dim as u32)
            .and_then(|n| n.checked_mul(quotient_size))
            .ok_or_else(|| precondition!("patch of side {side} in dimension {dim} is too large"))?;
        Ok(TorusPatch { side, dim, quotient_size })
    }

    /// Patch matching the group of `w`.
    pub fn for_walk(w: &QuantumWalk, side: usize) -> Result<Self> {
        TorusPatch::new(side, w.ext().dim(), w.ext().quotient().order())
    }

    pub fn sites(&self) -> usize {
        self.side.pow(self.dim as u32)
    }

    /// Number of `(site, q)` positions.
    pub fn positions(&self) -> usize {
        self.sites() * self.quotient_size
    }

    pub fn site_index(&self, n: &[i64]) -> usize {
        let it = StateIntertwiner { dim: self.dim, side: self.side, order: self.quotient_size };
        it.site_index(n)
    }

    pub fn site_coords(&self, idx: usize) -> LatticeVector {
        let it = StateIntertwiner { dim: self.dim, side: self.side, order: self.quotient_size };
        it.site_coords(idx)
    }
}

/// Amplitudes indexed `((site * |Q| + q) * s + coin)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkState {
    pub patch: TorusPatch,
    pub coin_dim: usize,
    pub amps: Vec<Complex64>,
    pub time: u64,
}

impl WalkState {
    pub fn zeros(patch: TorusPatch, coin_dim: usize) -> Self {
        WalkState { patch, coin_dim, amps: vec![c(0.0, 0.0); patch.positions() * coin_dim], time: 0 }
    }

    pub fn index(&self, n: &[i64], q: usize, coin: usize) -> usize {
        (self.patch.site_index(n) * self.patch.quotient_size + q) * self.coin_dim + coin
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.amps.iter().map(|a| a.norm_sqr()).sum())
    }

    /// Left translation `(n, q) -> (t + n, q)`, i.e. `g -> t g`, which
    /// commutes with every walk since walks act by right multiplication.
    pub fn translated(&self, t: &[i64]) -> WalkState {
        let mut out = WalkState { amps: vec![c(0.0, 0.0); self.amps.len()], ..self.clone() };
        let (qs, s) = (self.patch.quotient_size, self.coin_dim);
        for site in 0..self.patch.sites() {
            let n = self.patch.site_coords(site);
            let moved: LatticeVector = n.iter().zip(t).map(|(a, b)| a + b).collect();
            let dst = self.patch.site_index(&moved);
            for j in 0..qs * s {
                out.amps[dst * qs * s + j] = self.amps[site * qs * s + j];
            }
        }
        out
    }
}

/// Initial-state recipes.
#[derive(Clone, Debug, PartialEq)]
pub enum InitSpec {
    Delta { site: LatticeVector, q: usize, coin: usize },
    /// `exp(-|n - center|^2 / (2 width^2) + i k0.n)` on one `(q, coin)`,
    /// distances taken to the nearest periodic image.
    Gaussian { center: LatticeVector, k0: Vec<f64>, width: f64, q: usize, coin: usize },
    /// Seeded uniformly random normalized state.
    Random { seed: u64 },
}

impl InitSpec {
    pub fn origin(dim: usize) -> Self {
        InitSpec::Delta { site: vec![0; dim], q: 0, coin: 0 }
    }
}

pub fn init_state(patch: TorusPatch, coin_dim: usize, spec: &InitSpec) -> Result<WalkState> {
    let mut st = WalkState::zeros(patch, coin_dim);
    let check = |q: usize, coin: usize, v: &[i64]| -> Result<()> {
        if q >= patch.quotient_size || coin >= coin_dim || v.len() != patch.dim {
            return Err(precondition!("initial position outside the patch"));
        }
        Ok(())
    };
    match spec {
        InitSpec::Delta { site, q, coin } => {
            check(*q, *coin, site)?;
            let i = st.index(site, *q, *coin);
            st.amps[i] = c(1.0, 0.0);
        }
        InitSpec::Gaussian { center, k0, width, q, coin } => {
            check(*q, *coin, center)?;
            if !(*width > 0.0) || !width.is_finite() {
                return Err(Error::Degenerate(format!("Gaussian width {width} must be positive")));
            }
            if k0.len() != patch.dim {
                return Err(precondition!("k0 has {} components, patch dimension is {}", k0.len(), patch.dim));
            }
            let l = patch.side as i64;
            for site in 0..patch.sites() {
                let n = patch.site_coords(site);
                let mut r2 = 0.0;
                let mut ph = 0.0;
                for ((x, x0), k) in n.iter().zip(center).zip(k0) {
                    let mut dx = (x - x0).rem_euclid(l);
                    if dx > l / 2 {
                        dx -= l;
                    }
                    r2 += (dx * dx) as f64;
                    ph += k * (x0 + dx) as f64;
                }
                let amp = libm::exp(-r2 / (2.0 * width * width));
                let i = st.index(&n, *q, *coin);
                st.amps[i] = c(amp * libm::cos(ph), amp * libm::sin(ph));
            }
        }
        InitSpec::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            for a in st.amps.iter_mut() {
                *a = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
        }
    }
    let norm = st.norm();
    if !(norm > 0.0) {
        return Err(Error::Degenerate("initial state vanishes".into()));
    }
    st.amps.iter_mut().for_each(|a| *a /= norm);
    Ok(st)
}

/// Precomputed gather table: for every position `g` and generator `h`,
/// the position of `g h` on the torus.
#[derive(Clone, Debug)]
pub struct Stepper {
    pub patch: TorusPatch,
    coin_dim: usize,
    gens: usize,
    table: Vec<u32>,
    mats: Vec<Complex64>,
}

impl Stepper {
    pub fn new(w: &QuantumWalk, patch: TorusPatch) -> Result<Self> {
        let ext = w.ext();
        if patch.dim != ext.dim() || patch.quotient_size != ext.quotient().order() {
            return Err(structural!("patch does not match the walk's group"));
        }
        if patch.positions() > u32::MAX as usize {
            return Err(precondition!("patch too large"));
        }
        let gens = w.gens().elements();
        let mut table = Vec::with_capacity(patch.positions() * gens.len());
        for site in 0..patch.sites() {
            let n = patch.site_coords(site);
            for q in 0..patch.quotient_size {
                let g = Element::new(n.clone(), q);
                for h in gens {
                    let p = ext.mul(&g, h);
                    table.push((patch.site_index(&p.n) * patch.quotient_size + p.q) as u32);
                }
            }
        }
        let s = w.coin_dim();
        let mats = w.matrices().iter().flat_map(|m| (0..s * s).map(move |i| m[(i / s, i % s)])).collect();
        Ok(Stepper { patch, coin_dim: s, gens: gens.len(), table, mats })
    }

    pub fn step(&self, state: &WalkState) -> Result<WalkState> {
        if state.patch != self.patch || state.coin_dim != self.coin_dim {
            return Err(structural!("state dimensions do not match the walk and patch"));
        }
        let s = self.coin_dim;
        let mut out = vec![c(0.0, 0.0); state.amps.len()];
        for (pos, chunk) in out.chunks_exact_mut(s).enumerate() {
            let nbrs = &self.table[pos * self.gens..(pos + 1) * self.gens];
            for (h, &t) in nbrs.iter().enumerate() {
                let src = &state.amps[t as usize * s..(t as usize + 1) * s];
                let a = &self.mats[h * s * s..(h + 1) * s * s];
                for (r, o) in chunk.iter_mut().enumerate() {
                    let mut acc = c(0.0, 0.0);
                    for (col, x) in src.iter().enumerate() {
                        acc += a[r * s + col] * x;
                    }
                    *o += acc;
                }
            }
        }
        Ok(WalkState { amps: out, time: state.time + 1, ..state.clone() })
    }
}

/// One application of the walk operator.
pub fn step(w: &QuantumWalk, state: &WalkState) -> Result<WalkState> {
    Stepper::new(w, state.patch)?.step(state)
}

/// Result of [`evolve`]: the final state and the requested snapshots.
#[derive(Clone, Debug, PartialEq)]
pub struct Evolution {
    pub state: WalkState,
    /// `(time, probability distribution)` every `snapshot_every` steps,
    /// including time 0.
    pub snapshots: Vec<(u64, Vec<f64>)>,
}

pub fn evolve(w: &QuantumWalk, state: &WalkState, steps: usize, snapshot_every: Option<usize>) -> Result<Evolution> {
    let stepper = Stepper::new(w, state.patch)?;
    let mut cur = state.clone();
    let mut snapshots = Vec::new();
    let every = snapshot_every.filter(|&e| e > 0);
    if every.is_some() {
        snapshots.push((cur.time, probability_distribution(&cur)));
    }
    for t in 1..=steps {
        cur = stepper.step(&cur)?;
        if every.is_some_and(|e| t % e == 0) {
            snapshots.push((cur.time, probability_distribution(&cur)));
        }
    }
    Ok(Evolution { state: cur, snapshots })
}

/// Born-rule marginal over the coin, indexed `site * |Q| + q`.
pub fn probability_distribution(state: &WalkState) -> Vec<f64> {
    state.amps.chunks_exact(state.coin_dim).map(|ch| ch.iter().map(|a| a.norm_sqr()).sum()).collect()
}

/// Largest norm drift `| ||psi(t)|| - 1 |` over `steps` steps.
pub fn norm_drift(w: &QuantumWalk, state: &WalkState, steps: usize) -> Result<f64> {
    let stepper = Stepper::new(w, state.patch)?;
    let mut cur = state.clone();
    let mut drift: f64 = (cur.norm() - 1.0).abs();
    for _ in 0..steps {
        cur = stepper.step(&cur)?;
        drift = drift.max((cur.norm() - 1.0).abs());
    }
    Ok(drift)
}

/// Evolves a scalar walk and its coarse-graining for `steps` steps from
/// intertwined copies of a seeded random state and returns the largest
/// amplitude deviation. Representatives are matched through the cocycle
/// normalization, `(n, q) -> (n - n_q, q)`.
pub fn compare_representations(w: &QuantumWalk, steps: usize, side: usize, seed: u64) -> Result<f64> {
    let cg = coarse_grain(w)?.base;
    let ext = w.ext();
    let (_, shifts) = normalize_cocycle_with_shift(ext)?;
    let scalar_patch = TorusPatch::for_walk(w, side)?;
    let coarse_patch = TorusPatch::for_walk(&cg, side)?;
    let order = ext.quotient().order();
    let init = init_state(scalar_patch, 1, &InitSpec::Random { seed })?;
    let map = |st: &WalkState| -> WalkState {
        let mut out = WalkState::zeros(coarse_patch, order);
        out.time = st.time;
        for site in 0..scalar_patch.sites() {
            let n = scalar_patch.site_coords(site);
            for (q, shift) in shifts.iter().enumerate() {
                let moved: LatticeVector = n.iter().zip(shift).map(|(a, b)| a - b).collect();
                let dst = coarse_patch.site_index(&moved) * order + q;
                out.amps[dst] = st.amps[site * order + q];
            }
        }
        out
    };
    let a = evolve(w, &init, steps, None)?.state;
    let b = evolve(&cg, &map(&init), steps, None)?.state;
    let a = map(&a);
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max))
}
