//! Concrete walk families: the square and BCC two-coin families, Weyl and
//! Dirac walks, scalar walks on the index-2 extensions and the D2-by-Z^d
//! Dirac parent.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use crate::cayley::{lattices, GeneratingSet};
use crate::coarse::{coarse_grain, refine};
use crate::error::{precondition, structural, Error, Result};
use crate::gauge::{fit_gauge, index_map, GaugeConstraints, GaugeFit, GaugeKind};
use crate::group::{klein_semidirect, named_extension, Element, Extension};
use crate::lattice::{IntMat, LatticeVector};
use crate::linalg::{c, CMat, Complex64};
use crate::walk::QuantumWalk;

const PARAM_TOL: f64 = 1e-12;

/// Alpha of the 2D Weyl walk inside the square family.
pub const WEYL_ALPHA_2D: f64 = FRAC_1_SQRT_2;
/// Alphas and theta of the 3D Weyl walk inside the BCC family.
pub const WEYL_ALPHA_3D: [f64; 4] = [0.5; 4];
pub const WEYL_THETA_3D: f64 = -FRAC_PI_2;

fn m2(a: Complex64, b: Complex64, cc: Complex64, d: Complex64) -> CMat {
    CMat::from_row_slice(2, 2, &[a, b, cc, d])
}

fn re(x: f64) -> Complex64 {
    c(x, 0.0)
}

fn phase(t: f64) -> Complex64 {
    c(libm::cos(t), libm::sin(t))
}

/// Optional left unitary applied to every matrix of a canonical family.
fn apply_left(w: QuantumWalk, left: Option<&CMat>) -> Result<QuantumWalk> {
    match left {
        None => Ok(w),
        Some(u) if u.nrows() == w.coin_dim() && u.ncols() == w.coin_dim() => Ok(w.left_multiplied(u)),
        Some(u) => Err(structural!("left unitary is {}x{}, coin dimension {}", u.nrows(), u.ncols(), w.coin_dim())),
    }
}

/// The square-lattice two-coin family in the `sum_h A_h = I` gauge, on
/// `S = {h1, -h1, h2, -h2}`.
pub fn square2d(alpha: f64) -> Result<QuantumWalk> {
    square2d_with(alpha, None)
}

pub fn square2d_with(alpha: f64, left: Option<&CMat>) -> Result<QuantumWalk> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(precondition!("alpha = {alpha} is outside (0, 1)"));
    }
    let a2 = alpha * alpha;
    let ab = alpha * libm::sqrt(1.0 - a2);
    let z = re(0.0);
    let mats = vec![
        m2(re(a2), z, re(ab), z),
        m2(z, re(-ab), z, re(a2)),
        m2(re(1.0 - a2), z, re(-ab), z),
        m2(z, re(ab), z, re(1.0 - a2)),
    ];
    let gs = GeneratingSet::lattice(&lattices::square(), false)?;
    apply_left(QuantumWalk::new(gs, 2, mats)?, left)
}

/// `(beta, gamma)` of the BCC family.
pub fn bcc_beta_gamma(alpha: [f64; 4], theta: f64) -> (Complex64, Complex64) {
    let e = phase(theta);
    (re(alpha[0]) + e * alpha[1], re(alpha[2]) - e * alpha[3])
}

/// The BCC two-coin family on `S = {h1, -h1, ..., h4, -h4}`.
pub fn bcc3d(alpha: [f64; 4], theta: f64) -> Result<QuantumWalk> {
    bcc3d_with(alpha, theta, None)
}

pub fn bcc3d_with(alpha: [f64; 4], theta: f64, left: Option<&CMat>) -> Result<QuantumWalk> {
    if alpha.iter().any(|&a| !(a > 0.0) || !a.is_finite()) || !theta.is_finite() {
        return Err(precondition!("alphas must be positive and finite, theta finite"));
    }
    let prod = alpha[0] * alpha[1] - alpha[2] * alpha[3];
    if prod.abs() > PARAM_TOL {
        return Err(precondition!(
            "alpha1 alpha2 = {} differs from alpha3 alpha4 = {}",
            alpha[0] * alpha[1],
            alpha[2] * alpha[3]
        ));
    }
    let norm: f64 = alpha.iter().map(|a| a * a).sum();
    if (norm - 1.0).abs() > PARAM_TOL {
        return Err(precondition!("sum of alpha_i^2 is {norm}, not 1"));
    }
    let (b, g) = bcc_beta_gamma(alpha, theta);
    let z = re(0.0);
    let l = m2(b, z, -g.conj(), z);
    let r = m2(z, g, z, b.conj());
    let l2 = m2(z, b, z, -g.conj());
    let r2 = m2(g, z, b.conj(), z);
    let e = phase(theta);
    let mats = vec![
        &l * re(alpha[0]),
        &r * re(alpha[0]),
        &r * (e * alpha[1]),
        &l * (e.conj() * alpha[1]),
        &l2 * re(-alpha[2]),
        &r2 * re(alpha[2]),
        &r2 * (e.conj() * -alpha[3]),
        &l2 * (e * alpha[3]),
    ];
    let gs = GeneratingSet::lattice(&lattices::bcc(), false)?;
    apply_left(QuantumWalk::new(gs, 2, mats)?, left)
}

pub fn weyl2d() -> QuantumWalk {
    square2d(WEYL_ALPHA_2D).expect("valid parameters")
}

pub fn weyl3d() -> QuantumWalk {
    bcc3d(WEYL_ALPHA_3D, WEYL_THETA_3D).expect("valid parameters")
}

/// Weyl walk used by the Dirac constructions in dimension `d`.
pub fn weyl(d: usize) -> Result<QuantumWalk> {
    match d {
        2 => Ok(weyl2d()),
        3 => Ok(weyl3d()),
        _ => Err(Error::Unsupported(format!("no Weyl walk for d = {d}"))),
    }
}

fn mass_n(m: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&m) {
        return Err(precondition!("mass m = {m} is outside [0, 1)"));
    }
    Ok(libm::sqrt(1.0 - m * m))
}

/// 1D Dirac walk on Z with a loop: `A_+ = diag(n, 0)`, `A_- = diag(0, n)`,
/// `A_e = [[0, im], [im, 0]]`.
pub fn dirac1d(m: f64) -> Result<QuantumWalk> {
    let n = mass_n(m)?;
    let z = re(0.0);
    let mats = vec![m2(re(n), z, z, z), m2(z, z, z, re(n)), m2(z, c(0.0, m), c(0.0, m), z)];
    let gs = GeneratingSet::lattice(&lattices::line(), true)?;
    QuantumWalk::new(gs, 2, mats)
}

/// `A^D_h = diag(n A_h, n A_{-h}^dag)` with the Weyl `A_h` and the mass
/// loop `A^D_e = [[0, im I], [im I, 0]]`.
pub fn dirac_walk(d: usize, m: f64) -> Result<QuantumWalk> {
    let n = mass_n(m)?;
    let w = weyl(d)?;
    let vectors: Vec<LatticeVector> = w.gens().elements().iter().map(|g| g.n.clone()).collect();
    let neg = index_map(&vectors, |v| v.iter().map(|x| -x).collect())?;
    let mut mats = Vec::with_capacity(vectors.len() + 1);
    for (i, a) in w.matrices().iter().enumerate() {
        let mut big = CMat::zeros(4, 4);
        big.view_mut((0, 0), (2, 2)).copy_from(&(a * re(n)));
        big.view_mut((2, 2), (2, 2)).copy_from(&(w.matrices()[neg[i]].adjoint() * re(n)));
        mats.push(big);
    }
    let mut e = CMat::zeros(4, 4);
    for k in 0..2 {
        e[(k, k + 2)] = c(0.0, m);
        e[(k + 2, k)] = c(0.0, m);
    }
    mats.push(e);
    let s = if d == 2 { lattices::square() } else { lattices::bcc() };
    let gs = GeneratingSet::lattice(&s, true)?;
    QuantumWalk::new(gs, 4, mats)
}

/// Generating set `{(1,e), (-1,e), (1,q), (-1,q)}` of D_inf.
pub fn dinfty_generators() -> GeneratingSet {
    let ext = named_extension("Dinf").expect("built in");
    let plus = vec![
        Element::kernel(vec![1]),
        Element::kernel(vec![-1]),
        Element::new(vec![1], 1),
        Element::new(vec![-1], 1),
    ];
    GeneratingSet::new(ext, plus, false).expect("distinct generators")
}

/// Isotropic scalar walk on D_inf: `z_+`, `z_-` on the translations and
/// `z_c` on both reflections.
pub fn dinfty_scalar(z_plus: Complex64, z_minus: Complex64, z_c: Complex64) -> QuantumWalk {
    QuantumWalk::scalar(dinfty_generators(), &[z_plus, z_minus, z_c, z_c]).expect("four scalars")
}

/// The D_inf scalars whose coarse-graining has `cos w = n cos k`:
/// `z_+ = (1 + n)/2`, `z_- = (n - 1)/2`, `z_c = im/2`.
pub fn dinfty_dirac(m: f64) -> Result<QuantumWalk> {
    let n = mass_n(m)?;
    Ok(dinfty_scalar(re((1.0 + n) / 2.0), re((n - 1.0) / 2.0), c(0.0, m / 2.0)))
}

/// Lattice generator list and names used by the admissible sets.
pub fn lattice_for(d: usize) -> Result<(Vec<LatticeVector>, Vec<String>)> {
    let (s, basis) = match d {
        1 => (lattices::line(), 1),
        2 => (lattices::square(), 2),
        3 => (lattices::bcc(), 4),
        _ => return Err(Error::Unsupported(format!("no standard lattice for d = {d}"))),
    };
    let mut names = Vec::new();
    for i in 1..=basis {
        names.push(format!("h{i}"));
        names.push(format!("h{i}^-1"));
    }
    Ok((s, names))
}

/// The admissible set `S' = {g, gc}` on a named index-2 extension.
pub fn admissible_set(which: &str) -> Result<GeneratingSet> {
    let ext = named_extension(which)?;
    let (s, _) = lattice_for(ext.dim())?;
    GeneratingSet::admissible(ext, &s)
}

/// `z_<name>` and `z_<name>c` labels in the order of [`admissible_set`].
pub fn admissible_labels(d: usize) -> Result<Vec<String>> {
    let (_, names) = lattice_for(d)?;
    let mut out: Vec<String> = names.iter().map(|n| format!("z_{n}")).collect();
    out.extend(names.iter().map(|n| format!("z_{n}c")));
    Ok(out)
}

/// A scalar walk on `S'` of J1, J2, J3, K1, K2 or K3 (any named index-2
/// extension is accepted).
pub fn scalar_on_extension(which: &str, scalars: &[Complex64]) -> Result<QuantumWalk> {
    let gs = admissible_set(which)?;
    if scalars.len() != gs.len() {
        return Err(structural!("{which} has {} generators, got {} scalars", gs.len(), scalars.len()));
    }
    QuantumWalk::scalar(gs, scalars)
}

/// A scalar walk together with the gauge that produced it.
#[derive(Clone, Debug)]
pub struct Preimage {
    pub walk: QuantumWalk,
    pub fit: GaugeFit,
    /// Largest inconsistency of the lifted scalars (zero for an exact fit).
    pub spread: f64,
}

fn swap_map(w: &QuantumWalk, phi: &IntMat) -> Result<Vec<usize>> {
    let vectors: Vec<LatticeVector> = w.gens().elements().iter().map(|g| g.n.clone()).collect();
    index_map(&vectors, |v| phi.mul_vec(v))
}

/// Scalar walk on J1, J2 or K2 whose coarse-graining is the Weyl walk up to
/// a change of coin basis `P`.
pub fn weyl_preimage(which: &str) -> Result<Preimage> {
    let gs = admissible_set(which)?;
    let key = which.to_ascii_uppercase();
    let target = match key.as_str() {
        "J1" | "J2" => weyl2d(),
        "K2" => weyl3d(),
        _ => return Err(Error::Unsupported(format!("no Weyl pre-image on {which}"))),
    };
    let cons = GaugeConstraints { swap: swap_map(&target, gs.ext().phi(1))?, adjoint: None };
    let fit = fit_gauge(target.matrices(), &cons, GaugeKind::Conjugation, 32, 7)?;
    let fitted = QuantumWalk::new(target.gens().clone(), 2, fit.matrices.clone())?;
    let r = refine(&gs, &fitted)?;
    Ok(Preimage { walk: r.walk, fit, spread: r.spread.max(r.uncovered) })
}

/// Default automorphism pair of the D2-by-Z^d Dirac parent.
pub fn default_dirac_pair(d: usize) -> Result<(IntMat, IntMat)> {
    match d {
        2 => Ok((IntMat::diag(&[1, -1]), IntMat::diag(&[-1, 1]))),
        3 => Ok((IntMat::diag(&[1, -1, -1]), IntMat::diag(&[-1, -1, 1]))),
        _ => Err(Error::Unsupported(format!("no Dirac parent for d = {d}"))),
    }
}

/// Generating set `{h, h c1, c2 | h in S}` on the Klein extension.
pub fn dirac_parent_generators(d: usize, phi1: &IntMat, phi2: &IntMat) -> Result<GeneratingSet> {
    let ext = klein_semidirect(phi1, phi2)?;
    let bad = ext.validate();
    if !bad.is_empty() {
        return Err(Error::InvalidExtension(bad));
    }
    let (s, _) = lattice_for(d)?;
    let mut plus: Vec<Element> = s.iter().cloned().map(Element::kernel).collect();
    plus.extend(s.iter().cloned().map(|v| Element::new(v, 1)));
    plus.push(Element::new(vec![0; d], 2));
    let n = plus.len();
    let gs = GeneratingSet::new(ext, plus, false)?;
    if gs.len() != n {
        return Err(precondition!("phi1 does not preserve the generator set"));
    }
    Ok(gs)
}

#[derive(Clone, Debug)]
pub struct DiracParent {
    pub walk: QuantumWalk,
    pub phi1: IntMat,
    pub phi2: IntMat,
    /// Coin basis change of each two-dimensional diagonal block.
    pub block_unitary: CMat,
    /// Norm of the violated pattern and pairing relations after the fit.
    pub fit_residual: f64,
    /// `max_h ||A'_{phi2 h} - A'^dag_{-h}||_F`; zero when the lower block is
    /// the adjoint walk, as a nonzero mass needs.
    pub pairing_defect: f64,
}

/// Scalar walk on `Z^d x| (Z2 x Z2)` whose upper block is the fitted Weyl
/// walk `P W P^dag` and whose `c2` loop carries `im`. The lower block is
/// fixed by the extension to `A'_{phi2 h}`. Unitary and equivalent to
/// [`dirac_walk`] exactly when the fit and the pairing defect vanish.
pub fn dirac_scalar_parent(d: usize, m: f64, pair: Option<(IntMat, IntMat)>) -> Result<DiracParent> {
    let n = mass_n(m)?;
    let (phi1, phi2) = match pair {
        Some(p) => p,
        None => default_dirac_pair(d)?,
    };
    let gs = dirac_parent_generators(d, &phi1, &phi2)?;
    let w = weyl(d)?;
    let vectors: Vec<LatticeVector> = w.gens().elements().iter().map(|g| g.n.clone()).collect();
    let p2 = index_map(&vectors, |v| phi2.mul_vec(v))?;
    let neg = index_map(&vectors, |v| v.iter().map(|x| -x).collect())?;
    let adjoint = if m > 0.0 { Some((p2.clone(), neg.clone())) } else { None };
    let cons = GaugeConstraints { swap: swap_map(&w, &phi1)?, adjoint };
    let fit = fit_gauge(w.matrices(), &cons, GaugeKind::Conjugation, 32, 11)?;
    let a = &fit.matrices;
    let pairing_defect =
        (0..a.len()).map(|i| crate::linalg::frobenius(&(&a[p2[i]] - a[neg[i]].adjoint()))).fold(0.0, f64::max);
    // coarse target: upper block n A'_h, lower block n A'_{phi2 h}, mass loop
    let mut mats = Vec::with_capacity(a.len() + 1);
    for i in 0..a.len() {
        let mut big = CMat::zeros(4, 4);
        big.view_mut((0, 0), (2, 2)).copy_from(&(&a[i] * re(n)));
        big.view_mut((2, 2), (2, 2)).copy_from(&(&a[p2[i]] * re(n)));
        mats.push(big);
    }
    let mut e = CMat::zeros(4, 4);
    for k in 0..2 {
        e[(k, k + 2)] = c(0.0, m);
        e[(k + 2, k)] = c(0.0, m);
    }
    mats.push(e);
    let target = QuantumWalk::new(GeneratingSet::lattice(&vectors, true)?, 4, mats)?;
    let r = refine(&gs, &target)?;
    Ok(DiracParent {
        walk: r.walk,
        phi1,
        phi2,
        block_unitary: fit.left.clone(),
        fit_residual: fit.residual.max(r.spread),
        pairing_defect,
    })
}

/// Names accepted by [`catalog_walk`].
pub const CATALOG: &[&str] = &[
    "square2d",
    "bcc3d",
    "weyl2d",
    "weyl3d",
    "dirac1d",
    "dirac2d",
    "dirac3d",
    "dinfty-dirac",
    "weyl-j1",
    "weyl-j2",
    "weyl-k2",
    "dirac-parent-2d",
    "dirac-parent-3d",
];

/// Parameters of a catalog entry; unset fields take the defaults
/// (Weyl points, `m = 0.6`).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CatalogParams {
    pub alpha: Option<Vec<f64>>,
    pub theta: Option<f64>,
    pub m: Option<f64>,
}

pub const DEFAULT_MASS: f64 = 0.6;

/// One-line description of a catalog entry.
pub fn catalog_description(name: &str) -> Option<&'static str> {
    Some(match name {
        "square2d" => "square lattice two-coin family (--alpha, default 1/sqrt2)",
        "bcc3d" => "BCC two-coin family (--alpha a1,a2,a3,a4 --theta, default Weyl point)",
        "weyl2d" => "2D Weyl walk",
        "weyl3d" => "3D Weyl walk on the BCC lattice",
        "dirac1d" => "1D Dirac walk with mass loop (--m)",
        "dirac2d" => "2D Dirac walk, coin 4 (--m)",
        "dirac3d" => "3D Dirac walk, coin 4 (--m)",
        "dinfty-dirac" => "scalar walk on D_inf coarse-graining to the 1D Dirac walk (--m)",
        "weyl-j1" => "scalar walk on J1 coarse-graining to the 2D Weyl walk",
        "weyl-j2" => "scalar walk on J2 coarse-graining to the 2D Weyl walk",
        "weyl-k2" => "scalar walk on K2 coarse-graining to the 3D Weyl walk",
        "dirac-parent-2d" => "scalar walk on Z^2 x| D2 for the 2D Dirac walk (--m)",
        "dirac-parent-3d" => "scalar walk on Z^3 x| D2 for the 3D Dirac walk (--m)",
        _ => return None,
    })
}

pub fn catalog_walk(name: &str, p: &CatalogParams) -> Result<QuantumWalk> {
    let m = p.m.unwrap_or(DEFAULT_MASS);
    match name {
        "square2d" => {
            let a = p.alpha.as_ref().map_or(Ok(WEYL_ALPHA_2D), |v| match v.as_slice() {
                [x] => Ok(*x),
                _ => Err(precondition!("square2d takes one alpha")),
            })?;
            square2d(a)
        }
        "bcc3d" => {
            let a = match &p.alpha {
                None => WEYL_ALPHA_3D,
                Some(v) => v.as_slice().try_into().map_err(|_| precondition!("bcc3d takes four alphas"))?,
            };
            bcc3d(a, p.theta.unwrap_or(WEYL_THETA_3D))
        }
        "weyl2d" => Ok(weyl2d()),
        "weyl3d" => Ok(weyl3d()),
        "dirac1d" => dirac1d(m),
        "dirac2d" => dirac_walk(2, m),
        "dirac3d" => dirac_walk(3, m),
        "dinfty-dirac" => dinfty_dirac(m),
        "weyl-j1" => weyl_preimage("J1").map(|p| p.walk),
        "weyl-j2" => weyl_preimage("J2").map(|p| p.walk),
        "weyl-k2" => weyl_preimage("K2").map(|p| p.walk),
        "dirac-parent-2d" => dirac_scalar_parent(2, m, None).map(|p| p.walk),
        "dirac-parent-3d" => dirac_scalar_parent(3, m, None).map(|p| p.walk),
        _ => Err(Error::Unsupported(format!("unknown catalog walk {name}"))),
    }
}

/// Coarse-graining of a catalog scalar walk, or the walk itself when it is
/// already a lattice walk.
pub fn as_lattice_walk(w: &QuantumWalk) -> Result<QuantumWalk> {
    if w.ext().quotient().order() == 1 {
        Ok(w.clone())
    } else {
        coarse_grain(w).map(|cg| cg.base)
    }
}

/// Extension name used in catalog metadata.
pub fn extension_label(ext: &Extension) -> String {
    if ext.quotient().order() == 1 {
        return "trivial".to_string();
    }
    for d in 1..=3 {
        if let Ok(list) = crate::group::enumerate_index2_extensions(d) {
            if let Some(c) = list.iter().find(|c| c.ext == *ext) {
                return c.name.clone();
            }
        }
    }
    "custom".to_string()
}
