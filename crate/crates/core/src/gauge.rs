//! Coin-space gauge fits. Finds unitaries `P, U` so that `P A_h U^dag`
//! takes the entry pattern that coarse-graining a scalar walk produces.

use alloc::vec::Vec;

use levenberg_marquardt::{LeastSquaresProblem, LevenbergMarquardt};
use nalgebra::storage::Owned;
use nalgebra::{DMatrix, DVector, Dyn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{structural, Result};
use crate::linalg::{c, CMat};

/// `U(2)` element from four angles.
pub fn u2(p: &[f64]) -> CMat {
    let (a, b, cc, d) = (p[0], p[1], p[2], p[3]);
    let ph = c(libm::cos(d), libm::sin(d));
    let e = |t: f64| c(libm::cos(t), libm::sin(t));
    let (ca, sa) = (libm::cos(a), libm::sin(a));
    let m = CMat::from_row_slice(2, 2, &[e(b) * ca, e(cc) * sa, -e(-cc) * sa, e(-b) * ca]);
    m * ph
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GaugeKind {
    /// `A_h -> P A_h P^dag`, a change of coin basis.
    Conjugation,
    /// `A_h -> P A_h U^dag`, a basis change plus a left unitary.
    TwoSided,
}

/// Target relations on the transformed matrices `A'_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugeConstraints {
    /// `sigma_x A'_i sigma_x = A'_{swap[i]}`.
    pub swap: Vec<usize>,
    /// Optional `A'_{first[i]} = A'^dag_{second[i]}`.
    pub adjoint: Option<(Vec<usize>, Vec<usize>)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaugeFit {
    pub left: CMat,
    pub right: CMat,
    pub matrices: Vec<CMat>,
    /// Euclidean norm of all stacked constraint violations.
    pub residual: f64,
}

struct Problem<'a> {
    mats: &'a [CMat],
    cons: &'a GaugeConstraints,
    kind: GaugeKind,
    x: DVector<f64>,
}

impl Problem<'_> {
    fn unitaries(&self, x: &[f64]) -> (CMat, CMat) {
        let p = u2(&x[..4]);
        let u = match self.kind {
            GaugeKind::Conjugation => p.clone(),
            GaugeKind::TwoSided => u2(&x[4..8]),
        };
        (p, u)
    }

    fn transformed(&self, x: &[f64]) -> Vec<CMat> {
        let (p, u) = self.unitaries(x);
        let ud = u.adjoint();
        self.mats.iter().map(|m| &p * m * &ud).collect()
    }

    fn eval(&self, x: &[f64]) -> DVector<f64> {
        let a = self.transformed(x);
        let sx = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let mut r: Vec<f64> = Vec::new();
        let mut push = |m: CMat| {
            for z in m.iter() {
                r.push(z.re);
                r.push(z.im);
            }
        };
        for (i, &j) in self.cons.swap.iter().enumerate() {
            push(&sx * &a[i] * &sx - &a[j]);
        }
        if let Some((f, s)) = &self.cons.adjoint {
            for (&i, &j) in f.iter().zip(s) {
                push(&a[i] - a[j].adjoint());
            }
        }
        DVector::from_vec(r)
    }
}

impl LeastSquaresProblem<f64, Dyn, Dyn> for Problem<'_> {
    type ResidualStorage = Owned<f64, Dyn>;
    type JacobianStorage = Owned<f64, Dyn, Dyn>;
    type ParameterStorage = Owned<f64, Dyn>;

    fn set_params(&mut self, x: &DVector<f64>) {
        self.x.copy_from(x);
    }

    fn params(&self) -> DVector<f64> {
        self.x.clone()
    }

    fn residuals(&self) -> Option<DVector<f64>> {
        Some(self.eval(self.x.as_slice()))
    }

    fn jacobian(&self) -> Option<DMatrix<f64>> {
        let n = self.x.len();
        let m = self.eval(self.x.as_slice()).len();
        let mut jac = DMatrix::zeros(m, n);
        let h = 1e-7;
        let mut x = self.x.as_slice().to_vec();
        for k in 0..n {
            let x0 = x[k];
            x[k] = x0 + h;
            let fp = self.eval(&x);
            x[k] = x0 - h;
            let fm = self.eval(&x);
            x[k] = x0;
            jac.set_column(k, &((fp - fm) / (2.0 * h)));
        }
        Some(jac)
    }
}

/// Levenberg-Marquardt over `U(2)` (or `U(2) x U(2)`) from `restarts`
/// seeded starts; returns the best fit. Deterministic for a given seed.
pub fn fit_gauge(
    mats: &[CMat],
    cons: &GaugeConstraints,
    kind: GaugeKind,
    restarts: usize,
    seed: u64,
) -> Result<GaugeFit> {
    if mats.iter().any(|m| m.nrows() != 2 || m.ncols() != 2) {
        return Err(structural!("gauge fits act on coin dimension 2"));
    }
    let n = mats.len();
    let bad = |v: &[usize]| v.len() != n || v.iter().any(|&i| i >= n);
    if bad(&cons.swap) || cons.adjoint.as_ref().is_some_and(|(a, b)| bad(a) || bad(b)) {
        return Err(structural!("constraint index maps must cover the {n} matrices"));
    }
    let np = match kind {
        GaugeKind::Conjugation => 4,
        GaugeKind::TwoSided => 8,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for _ in 0..restarts.max(1) {
        let x0: Vec<f64> = (0..np).map(|_| rng.random_range(-3.0..3.0)).collect();
        let problem = Problem { mats, cons, kind, x: DVector::from_vec(x0) };
        let lm = LevenbergMarquardt::new().with_ftol(1e-15).with_xtol(1e-15).with_gtol(1e-15).with_patience(400);
        let (done, _) = lm.minimize(problem);
        let x = done.x.as_slice().to_vec();
        let r = done.eval(&x).norm();
        if best.as_ref().is_none_or(|(b, _)| r < *b) {
            best = Some((r, x));
        }
        if r < 1e-14 {
            break;
        }
    }
    let (residual, x) = best.expect("at least one restart");
    let problem = Problem { mats, cons, kind, x: DVector::from_vec(x.clone()) };
    let (left, right) = problem.unitaries(&x);
    let matrices = problem.transformed(&x);
    Ok(GaugeFit { left, right, matrices, residual })
}

/// Index of `f(v)` in `vectors` for every entry.
pub fn index_map(vectors: &[Vec<i64>], f: impl Fn(&[i64]) -> Vec<i64>) -> Result<Vec<usize>> {
    vectors
        .iter()
        .map(|v| {
            let w = f(v);
            vectors.iter().position(|x| *x == w).ok_or_else(|| structural!("{w:?} is not a generator"))
        })
        .collect()
}
