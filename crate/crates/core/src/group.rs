//! Q-by-Z^d groups given by extension data `(phi, f)`.
//!
//! Every element is stored as `(n, q)`, meaning `n c_q` with `c_q` the
//! coset representative of `q`. Products follow
//! `(n1, q1)(n2, q2) = (n1 + phi[q1] n2 + f(q1, q2), q1 q2)`.
//! All arithmetic is exact.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{precondition, structural, Error, Result};
use crate::lattice::{add_vec, integer_kernel, smith, solve_integer, sub_vec, IntMat, LatticeVector};

/// Finite group given by its multiplication table; index 0 is the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quotient {
    order: usize,
    table: Vec<usize>,
    inverse: Vec<usize>,
    element_orders: Vec<usize>,
}

impl Quotient {
    /// Checks closure, identity, inverses and (exhaustively) associativity.
    pub fn from_table(rows: &[Vec<usize>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(structural!("empty quotient table"));
        }
        let mut table = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(structural!("quotient table row {i} has length {} (expected {n})", row.len()));
            }
            if let Some(&bad) = row.iter().find(|&&x| x >= n) {
                return Err(structural!("quotient table entry {bad} out of range in row {i}"));
            }
            table.extend_from_slice(row);
        }
        for q in 0..n {
            if table[q] != q || table[q * n] != q {
                return Err(structural!("index 0 does not act as identity on {q}"));
            }
        }
        let mut inverse = vec![0; n];
        for q in 0..n {
            let Some(r) = (0..n).find(|&r| table[q * n + r] == 0 && table[r * n + q] == 0) else {
                return Err(structural!("element {q} has no two-sided inverse"));
            };
            inverse[q] = r;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let ab = table[a * n + b];
                    let bc = table[b * n + c];
                    if table[ab * n + c] != table[a * n + bc] {
                        return Err(structural!("quotient table not associative at ({a},{b},{c})"));
                    }
                }
            }
        }
        let element_orders = (0..n)
            .map(|q| {
                let (mut x, mut r) = (q, 1);
                while x != 0 {
                    x = table[x * n + q];
                    r += 1;
                }
                r
            })
            .collect();
        Ok(Quotient { order: n, table, inverse, element_orders })
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    pub fn cyclic(n: usize) -> Self {
        let rows: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::from_table(&rows).expect("cyclic table is a group")
    }

    /// Z2 x Z2 with elements ordered `e, c1, c2, c1c2`.
    pub fn klein() -> Self {
        let rows: Vec<Vec<usize>> = (0..4).map(|a| (0..4).map(|b| a ^ b).collect()).collect();
        Self::from_table(&rows).expect("klein table is a group")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn element_order(&self, q: usize) -> usize {
        self.element_orders[q]
    }

    pub fn table_rows(&self) -> Vec<Vec<usize>> {
        (0..self.order).map(|a| self.table[a * self.order..(a + 1) * self.order].to_vec()).collect()
    }
}

/// A group element `n c_q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    pub n: LatticeVector,
    pub q: usize,
}

impl Element {
    pub fn new(n: LatticeVector, q: usize) -> Self {
        Element { n, q }
    }

    pub fn kernel(n: LatticeVector) -> Self {
        Element { n, q: 0 }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?},{})", self.n, self.q)
    }
}

/// One failed defining relation of extension data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NotUnimodular { q: usize },
    Homomorphism { q1: usize, q2: usize },
    Cocycle { q1: usize, q2: usize, q3: usize },
    Unnormalized { q1: usize, q2: usize },
}

/// Which of the three invariants a violation belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ViolationKind {
    Homomorphism,
    Cocycle,
    Normalization,
}

impl Violation {
    pub fn kind(&self) -> ViolationKind {
        match self {
            Violation::NotUnimodular { .. } | Violation::Homomorphism { .. } => ViolationKind::Homomorphism,
            Violation::Cocycle { .. } => ViolationKind::Cocycle,
            Violation::Unnormalized { .. } => ViolationKind::Normalization,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotUnimodular { q } => write!(f, "phi[{q}] is not in GL(d,Z)"),
            Violation::Homomorphism { q1, q2 } => write!(f, "phi[{q1}] phi[{q2}] != phi[{q1}*{q2}]"),
            Violation::Cocycle { q1, q2, q3 } => write!(f, "cocycle condition fails at ({q1},{q2},{q3})"),
            Violation::Unnormalized { q1, q2 } => write!(f, "f({q1},{q2}) != 0 with an identity argument"),
        }
    }
}

/// Extension data `(phi, f)` of a finite quotient by Z^d.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extension {
    dim: usize,
    quotient: Quotient,
    phi: Vec<IntMat>,
    cocycle: Vec<LatticeVector>,
}

impl Extension {
    /// Shape checks only; use [`Extension::validate`] for the relations.
    pub fn new(dim: usize, quotient: Quotient, phi: Vec<IntMat>, cocycle: Vec<LatticeVector>) -> Result<Self> {
        let n = quotient.order();
        if phi.len() != n {
            return Err(structural!("{} automorphisms for a quotient of order {n}", phi.len()));
        }
        if let Some(m) = phi.iter().find(|m| m.rows() != dim || m.cols() != dim) {
            return Err(structural!("automorphism of shape {}x{} in dimension {dim}", m.rows(), m.cols()));
        }
        if cocycle.len() != n * n {
            return Err(structural!("{} cocycle values for {} pairs", cocycle.len(), n * n));
        }
        if let Some(v) = cocycle.iter().find(|v| v.len() != dim) {
            return Err(structural!("cocycle vector of length {} in dimension {dim}", v.len()));
        }
        Ok(Extension { dim, quotient, phi, cocycle })
    }

    /// Z^d itself (trivial quotient).
    pub fn trivial(dim: usize) -> Self {
        Self::semidirect(dim, Quotient::trivial(), vec![IntMat::identity(dim)]).expect("well-shaped")
    }

    pub fn semidirect(dim: usize, quotient: Quotient, phi: Vec<IntMat>) -> Result<Self> {
        let n = quotient.order();
        Self::new(dim, quotient, phi, vec![vec![0; dim]; n * n])
    }

    /// Index-2 extension with `phi(q~) = phi` and `c^2 = f(q~, q~) = c2`.
    pub fn index2(phi: IntMat, c2: LatticeVector) -> Result<Self> {
        let d = phi.rows();
        let mut cocycle = vec![vec![0; d]; 4];
        cocycle[3] = c2;
        Self::new(d, Quotient::cyclic(2), vec![IntMat::identity(d), phi], cocycle)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn quotient(&self) -> &Quotient {
        &self.quotient
    }

    pub fn phi(&self, q: usize) -> &IntMat {
        &self.phi[q]
    }

    pub fn phis(&self) -> &[IntMat] {
        &self.phi
    }

    pub fn cocycle(&self, q1: usize, q2: usize) -> &[i64] {
        &self.cocycle[q1 * self.quotient.order() + q2]
    }

    pub fn cocycle_table(&self) -> Vec<Vec<LatticeVector>> {
        let n = self.quotient.order();
        (0..n).map(|a| (0..n).map(|b| self.cocycle(a, b).to_vec()).collect()).collect()
    }

    fn set_cocycle(&mut self, q1: usize, q2: usize, v: LatticeVector) {
        let n = self.quotient.order();
        self.cocycle[q1 * n + q2] = v;
    }

    pub fn is_semidirect_data(&self) -> bool {
        self.cocycle.iter().all(|v| v.iter().all(|&x| x == 0))
    }

    pub fn is_normalized(&self) -> bool {
        let n = self.quotient.order();
        (0..n).all(|q| is_zero(self.cocycle(0, q)) && is_zero(self.cocycle(q, 0)))
    }

    /// Every violated relation; empty iff the data is a valid normalized
    /// extension.
    pub fn validate(&self) -> Vec<Violation> {
        let n = self.quotient.order();
        let mut out = Vec::new();
        for q in 0..n {
            if !self.phi[q].is_unimodular() {
                out.push(Violation::NotUnimodular { q });
            }
        }
        for q1 in 0..n {
            for q2 in 0..n {
                if self.phi[q1].mul(&self.phi[q2]) != self.phi[self.quotient.mul(q1, q2)] {
                    out.push(Violation::Homomorphism { q1, q2 });
                }
            }
        }
        out.extend(self.cocycle_violations());
        for q in 0..n {
            if !is_zero(self.cocycle(0, q)) {
                out.push(Violation::Unnormalized { q1: 0, q2: q });
            }
            if q != 0 && !is_zero(self.cocycle(q, 0)) {
                out.push(Violation::Unnormalized { q1: q, q2: 0 });
            }
        }
        out
    }

    fn cocycle_violations(&self) -> Vec<Violation> {
        let n = self.quotient.order();
        let mut out = Vec::new();
        for q1 in 0..n {
            for q2 in 0..n {
                let q12 = self.quotient.mul(q1, q2);
                for q3 in 0..n {
                    let q23 = self.quotient.mul(q2, q3);
                    let lhs = add_vec(self.cocycle(q1, q2), self.cocycle(q12, q3));
                    let rhs = add_vec(&self.phi[q1].mul_vec(self.cocycle(q2, q3)), self.cocycle(q1, q23));
                    if lhs != rhs {
                        out.push(Violation::Cocycle { q1, q2, q3 });
                    }
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub fn identity(&self) -> Element {
        Element { n: vec![0; self.dim], q: 0 }
    }

    fn check(&self, a: &Element) -> Result<()> {
        if a.n.len() != self.dim {
            return Err(structural!("element of dimension {} in a dimension-{} extension", a.n.len(), self.dim));
        }
        if a.q >= self.quotient.order() {
            return Err(structural!("quotient index {} out of range", a.q));
        }
        Ok(())
    }

    pub fn compose(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul(a, b))
    }

    pub fn inverse(&self, a: &Element) -> Result<Element> {
        self.check(a)?;
        Ok(self.inv(a))
    }

    /// Product without shape checks; panics on mismatched dimensions.
    pub fn mul(&self, a: &Element, b: &Element) -> Element {
        let mut n = add_vec(&a.n, &self.phi[a.q].mul_vec(&b.n));
        for (x, f) in n.iter_mut().zip(self.cocycle(a.q, b.q)) {
            *x += f;
        }
        Element { n, q: self.quotient.mul(a.q, b.q) }
    }

    /// Inverse `(-phi[q^-1] n - f(q^-1, q), q^-1)`; assumes normalized data.
    pub fn inv(&self, a: &Element) -> Element {
        let qi = self.quotient.inv(a.q);
        let pn = self.phi[qi].mul_vec(&a.n);
        let n = pn.iter().zip(self.cocycle(qi, a.q)).map(|(x, f)| -x - f).collect();
        Element { n, q: qi }
    }

    /// Text presentation in generator/relator form.
    pub fn presentation(&self) -> String {
        presentation(self)
    }
}

fn is_zero(v: &[i64]) -> bool {
    v.iter().all(|&x| x == 0)
}

/// Returns pseudo-congruent normalized data together with the coset shifts
/// `n_q` used (new representative `c'_q = n_q c_q`). For index 2 the value
/// `c^2` is also reduced to the canonical representative of its class.
pub fn normalize_cocycle_with_shift(ext: &Extension) -> Result<(Extension, Vec<LatticeVector>)> {
    let cv = ext.cocycle_violations();
    let hom: Vec<Violation> =
        ext.validate().into_iter().filter(|v| v.kind() == ViolationKind::Homomorphism).collect();
    if !cv.is_empty() || !hom.is_empty() {
        let mut all = hom;
        all.extend(cv);
        return Err(Error::InvalidExtension(all));
    }
    let n = ext.quotient.order();
    let d = ext.dim;
    let mut shifts = vec![vec![0i64; d]; n];
    shifts[0] = ext.cocycle(0, 0).iter().map(|x| -x).collect();
    if n == 2 {
        let base = transform_cocycle(ext, &shifts);
        let c2 = base.cocycle(1, 1).to_vec();
        let classes = CocycleClasses::new(ext.phi(1));
        let canon = classes.canonical(&c2).ok_or_else(|| structural!("c^2 is not fixed by phi"))?;
        // (I + phi) m = canon - c2 gives c'_q~ = m c_q~ with c'^2 = canon
        let ip = IntMat::identity(d).add(ext.phi(1));
        let m = solve_integer(&ip, &sub_vec(&canon, &c2)).expect("same class has a solution");
        shifts[1] = m;
    }
    Ok((transform_cocycle(ext, &shifts), shifts))
}

pub fn normalize_cocycle(ext: &Extension) -> Result<Extension> {
    normalize_cocycle_with_shift(ext).map(|(e, _)| e)
}

/// Cocycle after the change of representatives `c'_q = n_q c_q`:
/// `f'(a, b) = n_a + phi[a] n_b + f(a, b) - n_{ab}`.
pub fn transform_cocycle(ext: &Extension, shifts: &[LatticeVector]) -> Extension {
    let n = ext.quotient.order();
    let mut out = ext.clone();
    for a in 0..n {
        for b in 0..n {
            let ab = ext.quotient.mul(a, b);
            let v = sub_vec(&add_vec(&add_vec(&shifts[a], &ext.phi[a].mul_vec(&shifts[b])), ext.cocycle(a, b)), &shifts[ab]);
            out.set_cocycle(a, b, v);
        }
    }
    out
}

/// The class group `Fix(phi) / (I + phi) Z^d` for an order-2 automorphism.
#[derive(Clone, Debug)]
pub struct CocycleClasses {
    phi: IntMat,
    fix_basis: Vec<LatticeVector>,
    left: IntMat,
    moduli: Vec<i64>,
}

impl CocycleClasses {
    pub fn new(phi: &IntMat) -> Self {
        let d = phi.rows();
        let fix_basis = integer_kernel(&phi.sub(&IntMat::identity(d)));
        let k = fix_basis.len();
        let b = IntMat::from_cols(&fix_basis, d);
        let ip = IntMat::identity(d).add(phi);
        let mut coords = IntMat::zeros(k, d);
        for j in 0..d {
            let y = solve_integer(&b, &ip.col(j)).expect("(I+phi) maps into Fix(phi) when phi^2 = I");
            for i in 0..k {
                coords[(i, j)] = y[i];
            }
        }
        let s = smith(&coords);
        let moduli = (0..k).map(|i| s.diag.get(i).copied().unwrap_or(0)).collect();
        CocycleClasses { phi: phi.clone(), fix_basis, left: s.left, moduli }
    }

    /// Number of classes, `None` when infinite.
    pub fn count(&self) -> Option<usize> {
        self.moduli.iter().try_fold(1usize, |acc, &m| if m == 0 { None } else { Some(acc * m as usize) })
    }

    pub fn fixed_basis(&self) -> &[LatticeVector] {
        &self.fix_basis
    }

    /// Class label of a fixed vector; `None` if `v` is not fixed by phi.
    pub fn invariant(&self, v: &[i64]) -> Option<Vec<i64>> {
        if self.phi.mul_vec(v) != v {
            return None;
        }
        let d = self.phi.rows();
        let y = if self.fix_basis.is_empty() {
            Vec::new()
        } else {
            solve_integer(&IntMat::from_cols(&self.fix_basis, d), v)?
        };
        let z = if y.is_empty() { Vec::new() } else { self.left.mul_vec(&y) };
        Some(z.iter().zip(&self.moduli).map(|(&x, &m)| if m == 0 { x } else { x.rem_euclid(m) }).collect())
    }

    /// Smallest representative (by L1 norm, then fewest negative entries,
    /// then reverse lexicographic) of the class of `v`.
    pub fn canonical(&self, v: &[i64]) -> Option<LatticeVector> {
        let target = self.invariant(v)?;
        let bound = v.iter().map(|x| x.abs()).max().unwrap_or(0).max(1);
        let d = v.len();
        let mut best: Option<LatticeVector> = None;
        for r in 0..=bound {
            for cand in box_vectors(d, r) {
                if self.invariant(&cand).as_ref() == Some(&target)
                    && best.as_ref().is_none_or(|b| canonical_key(&cand) < canonical_key(b))
                {
                    best = Some(cand);
                }
            }
            if best.is_some() {
                break;
            }
        }
        best
    }

    /// One canonical representative per class (zero class first).
    pub fn representatives(&self) -> Vec<LatticeVector> {
        let count = self.count().expect("finite class group for an order-2 automorphism");
        let d = self.phi.rows();
        let mut found: BTreeMap<Vec<i64>, LatticeVector> = BTreeMap::new();
        let mut r = 0;
        while found.len() < count {
            for cand in box_vectors(d, r) {
                if let Some(inv) = self.invariant(&cand) {
                    let slot = found.entry(inv).or_insert_with(|| cand.clone());
                    if canonical_key(&cand) < canonical_key(slot) {
                        *slot = cand;
                    }
                }
            }
            r += 1;
        }
        let mut reps: Vec<LatticeVector> = found.into_values().collect();
        reps.sort_by_key(|v| canonical_key(v));
        reps
    }
}

fn canonical_key(v: &[i64]) -> (i64, usize, Vec<i64>) {
    let l1 = v.iter().map(|x| x.abs()).sum();
    let neg = v.iter().filter(|&&x| x < 0).count();
    (l1, neg, v.iter().map(|x| -x).collect())
}

/// All vectors of Z^d with infinity norm at most `r`.
fn box_vectors(d: usize, r: i64) -> Vec<LatticeVector> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        let mut next = Vec::new();
        for v in &out {
            for x in -r..=r {
                let mut w = v.clone();
                w.push(x);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

/// Decides whether two index-2 extensions differ only by a change of coset
/// representative, i.e. whether `c^2 - c'^2` lies in `(I + phi) Z^d`.
///
/// `conj` is an optional `P` with `phi_2 = P phi_1 P^-1`; the second
/// extension is pulled back through `P` first. Returns the witness `n` with
/// `c^2 = n + phi(n) + c'^2` when they are pseudo-congruent.
pub fn pseudo_congruent_index2(e1: &Extension, e2: &Extension, conj: Option<&IntMat>) -> Result<Option<LatticeVector>> {
    if e1.quotient.order() != 2 || e2.quotient.order() != 2 {
        return Err(Error::Unsupported("pseudo-congruence is decided only for index-2 extensions".to_string()));
    }
    if e1.dim != e2.dim {
        return Err(structural!("dimensions {} and {} differ", e1.dim, e2.dim));
    }
    let d = e1.dim;
    let (phi2, c2b) = match conj {
        None => (e2.phi(1).clone(), e2.cocycle(1, 1).to_vec()),
        Some(p) => {
            let pinv = p.inverse_unimodular().ok_or_else(|| precondition!("conjugator is not in GL(d,Z)"))?;
            (pinv.mul(e2.phi(1)).mul(p), pinv.mul_vec(e2.cocycle(1, 1)))
        }
    };
    if &phi2 != e1.phi(1) {
        return Err(precondition!("automorphisms {:?} and {:?} differ", e1.phi(1), phi2));
    }
    let is = IntMat::identity(d).add(e1.phi(1));
    let rhs = sub_vec(e1.cocycle(1, 1), &c2b);
    Ok(solve_integer(&is, &rhs))
}

/// A named canonical index-2 extension.
#[derive(Clone, Debug)]
pub struct ClassifiedExtension {
    pub name: String,
    pub automorphism: &'static str,
    pub ext: Extension,
    pub semidirect: bool,
}

/// Built-in conjugacy representatives of order-2 subgroups of GL(d,Z).
pub fn order2_automorphisms(d: usize) -> Result<Vec<(&'static str, IntMat)>> {
    let m = |rows: &[&[i64]]| IntMat::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>());
    match d {
        1 => Ok(vec![("-1", m(&[&[-1]]))]),
        2 => Ok(vec![
            ("-I2", m(&[&[-1, 0], &[0, -1]])),
            ("sigma_x", m(&[&[0, 1], &[1, 0]])),
            ("sigma_z", m(&[&[1, 0], &[0, -1]])),
        ]),
        3 => Ok(vec![
            ("-I3", m(&[&[-1, 0, 0], &[0, -1, 0], &[0, 0, -1]])),
            ("Sigma+", m(&[&[1, 0, 0], &[0, -1, 0], &[0, 0, -1]])),
            ("Sigma-", m(&[&[-1, 0, 0], &[0, 1, 0], &[0, 0, 1]])),
            ("Lambda+", m(&[&[-1, 0, 0], &[0, 0, 1], &[0, 1, 0]])),
            ("Lambda-", m(&[&[1, 0, 0], &[0, 0, -1], &[0, -1, 0]])),
        ]),
        _ => Err(Error::Unsupported(format!("no automorphism table for d = {d}"))),
    }
}

/// All non-Abelian index-2 extensions of Z^d up to pseudo-congruence.
pub fn enumerate_index2_extensions(d: usize) -> Result<Vec<ClassifiedExtension>> {
    let autos = order2_automorphisms(d)?;
    let mut out = Vec::new();
    let mut extra_j = 0;
    for (i, (label, phi)) in autos.into_iter().enumerate() {
        let classes = CocycleClasses::new(&phi);
        for (j, c2) in classes.representatives().into_iter().enumerate() {
            let semidirect = is_zero(&c2);
            let name = match d {
                1 => "Dinf".to_string(),
                2 if semidirect => format!("J{}", i + 1),
                2 => {
                    extra_j += 1;
                    format!("J{}", 3 + extra_j)
                }
                _ if semidirect => format!("K{}", i + 1),
                _ => format!("K{}.{}", i + 1, j),
            };
            let ext = Extension::index2(phi.clone(), c2)?;
            out.push(ClassifiedExtension { name, automorphism: label, ext, semidirect });
        }
    }
    // J4 and the d = 3 non-semidirect classes after the semidirect ones
    out.sort_by_key(|c| !c.semidirect);
    Ok(out)
}

/// Looks up a canonical extension by name (`Dinf`, `J1`..`J4`, `K1`..`K5`, `K2.1`, ...).
pub fn named_extension(name: &str) -> Result<Extension> {
    for d in 1..=3 {
        if let Some(c) = enumerate_index2_extensions(d)?.into_iter().find(|c| c.name.eq_ignore_ascii_case(name)) {
            return Ok(c.ext);
        }
    }
    Err(Error::Unsupported(format!("unknown extension name {name}")))
}

/// The semidirect product Z^d x| (Z2 x Z2) with `phi(c1) = phi1`,
/// `phi(c2) = phi2`. Quotient order is `e, c1, c2, c1c2`.
pub fn klein_semidirect(phi1: &IntMat, phi2: &IntMat) -> Result<Extension> {
    let d = phi1.rows();
    Extension::semidirect(d, Quotient::klein(), vec![IntMat::identity(d), phi1.clone(), phi2.clone(), phi1.mul(phi2)])
}

/// Every homomorphism `Q -> GL(1,Z) = {+1, -1}`, as sign vectors.
pub fn gl1_homomorphisms(q: &Quotient) -> Vec<Vec<i64>> {
    let n = q.order();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << n) {
        let s: Vec<i64> = (0..n).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
        if (0..n).all(|a| (0..n).all(|b| s[a] * s[b] == s[q.mul(a, b)])) {
            out.push(s);
        }
    }
    out
}

fn word_for(v: &[i64], sign: i64) -> String {
    let mut s = String::new();
    for (i, &x) in v.iter().enumerate() {
        let e = sign * x;
        match e {
            0 => {}
            1 => s.push_str(&format!("h{}", i + 1)),
            _ => s.push_str(&format!("h{}^{}", i + 1, e)),
        }
    }
    s
}

fn presentation(ext: &Extension) -> String {
    let d = ext.dim;
    let n = ext.quotient.order();
    let mut gens: Vec<String> = (1..=d).map(|i| format!("h{i}")).collect();
    let cname = |q: usize| if n == 2 { "c".to_string() } else { format!("c{q}") };
    for q in 1..n {
        gens.push(cname(q));
    }
    let mut rel = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            rel.push(format!("h{a}h{b}h{a}^-1h{b}^-1", a = i + 1, b = j + 1));
        }
    }
    for a in 1..n {
        for b in 1..n {
            if n == 2 || a <= b {
                let ab = ext.quotient.mul(a, b);
                let mut r = if a == b { format!("{}^2", cname(a)) } else { format!("{}{}", cname(a), cname(b)) };
                if ab != 0 {
                    r.push_str(&format!("{}^-1", cname(ab)));
                }
                r.push_str(&word_for(ext.cocycle(a, b), -1));
                rel.push(r);
            }
        }
        for i in 0..d {
            let mut e = vec![0; d];
            e[i] = 1;
            let img = ext.phi[a].mul_vec(&e);
            rel.push(format!("{c}h{k}{c}^-1{w}", c = cname(a), k = i + 1, w = word_for(&img, -1)));
        }
    }
    format!("\u{27e8}{} | {}\u{27e9}", gens.join(","), rel.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sz() -> IntMat {
        IntMat::diag(&[1, -1])
    }

    #[test]
    fn compose_examples() {
        let dinf = named_extension("Dinf").unwrap();
        let r = Element::new(vec![1], 1);
        assert_eq!(dinf.compose(&r, &r).unwrap(), Element::new(vec![0], 0));
        let j4 = Extension::index2(sz(), vec![1, 0]).unwrap();
        let c = Element::new(vec![0, 0], 1);
        assert_eq!(j4.compose(&c, &c).unwrap(), Element::new(vec![1, 0], 0));
        let a = Element::kernel(vec![2, -1]);
        let b = Element::kernel(vec![-5, 3]);
        assert_eq!(j4.compose(&a, &b).unwrap(), Element::kernel(vec![-3, 2]));
        assert!(matches!(j4.compose(&Element::kernel(vec![1]), &c), Err(Error::Structural(_))));
    }

    #[test]
    fn inverse_examples() {
        let dinf = named_extension("Dinf").unwrap();
        assert_eq!(dinf.inv(&Element::new(vec![5], 1)), Element::new(vec![5], 1));
        assert_eq!(dinf.inv(&Element::kernel(vec![5])), Element::kernel(vec![-5]));
        let j4 = Extension::index2(sz(), vec![1, 0]).unwrap();
        let c = Element::new(vec![0, 0], 1);
        // brute-force oracle: the x with x * c = e
        let mut found = None;
        for a in -3..=3 {
            for b in -3..=3 {
                let x = Element::new(vec![a, b], 1);
                if j4.mul(&x, &c) == j4.identity() {
                    found = Some(x);
                }
            }
        }
        assert_eq!(found, Some(Element::new(vec![-1, 0], 1)));
        assert_eq!(j4.inv(&c), Element::new(vec![-1, 0], 1));
    }

    #[test]
    fn validation_examples() {
        assert!(Extension::index2(sz(), vec![1, 0]).unwrap().is_valid());
        let bad = Extension::index2(sz(), vec![0, 1]).unwrap().validate();
        assert!(!bad.is_empty());
        assert!(bad.iter().all(|v| v.kind() == ViolationKind::Cocycle));
        let sx = IntMat::from_rows(&[vec![0, 1], vec![1, 0]]);
        assert!(Extension::index2(sx, vec![0, 0]).unwrap().is_valid());
        let nonhom = Extension::index2(IntMat::from_rows(&[vec![1, 1], vec![0, 1]]), vec![0, 0]).unwrap();
        assert!(nonhom.validate().iter().any(|v| matches!(v, Violation::Homomorphism { q1: 1, q2: 1 })));
    }

    #[test]
    fn normalize_examples() {
        let dinf = named_extension("Dinf").unwrap();
        assert_eq!(normalize_cocycle(&dinf).unwrap(), dinf);
        // perturb f(e,e) to 3 through the congruence with n_e = 3
        let shifted = transform_cocycle(&dinf, &[vec![3], vec![0]]);
        assert_eq!(shifted.cocycle(0, 0), &[3]);
        assert!(!shifted.is_normalized());
        assert!(shifted.validate().iter().all(|v| v.kind() == ViolationKind::Normalization));
        assert_eq!(normalize_cocycle(&shifted).unwrap(), dinf);
        let j2 = named_extension("J2").unwrap();
        let moved = transform_cocycle(&j2, &[vec![0, 0], vec![1, 0]]);
        assert_eq!(moved.cocycle(1, 1), &[1, 1]);
        assert_eq!(normalize_cocycle(&moved).unwrap(), j2);
        let bad = Extension::index2(sz(), vec![0, 1]).unwrap();
        assert!(matches!(normalize_cocycle(&bad), Err(Error::InvalidExtension(_))));
    }

    #[test]
    fn pseudo_congruence_examples() {
        let sx = IntMat::from_rows(&[vec![0, 1], vec![1, 0]]);
        let zero = Extension::index2(sx.clone(), vec![0, 0]).unwrap();
        for r in -3..=3 {
            let e = Extension::index2(sx.clone(), vec![r, r]).unwrap();
            assert!(pseudo_congruent_index2(&e, &zero, None).unwrap().is_some());
        }
        let z0 = Extension::index2(sz(), vec![0, 0]).unwrap();
        let z1 = Extension::index2(sz(), vec![1, 0]).unwrap();
        let z2 = Extension::index2(sz(), vec![2, 0]).unwrap();
        let w = pseudo_congruent_index2(&z2, &z0, None).unwrap().unwrap();
        let iw = IntMat::identity(2).add(&sz()).mul_vec(&w);
        assert_eq!(iw, vec![2, 0]);
        assert_eq!(pseudo_congruent_index2(&z1, &z0, None).unwrap(), None);
        assert_eq!(pseudo_congruent_index2(&z1, &z1, None).unwrap(), Some(vec![0, 0]));
        assert!(pseudo_congruent_index2(&z1, &zero, None).is_err());
        // sigma_x pulled back to sigma_z through a conjugator? they are not conjugate;
        // -sigma_z is conjugate to sigma_z by the swap
        let swap = IntMat::from_rows(&[vec![0, 1], vec![1, 0]]);
        let msz1 = Extension::index2(sz().neg(), vec![0, 1]).unwrap();
        assert!(msz1.is_valid());
        assert_eq!(pseudo_congruent_index2(&z1, &msz1, Some(&swap)).unwrap(), Some(vec![0, 0]));
        let dk = klein_semidirect(&sz(), &sz().neg()).unwrap();
        assert!(matches!(pseudo_congruent_index2(&dk, &dk, None), Err(Error::Unsupported(_))));
    }

    #[test]
    fn enumeration_counts() {
        let e1 = enumerate_index2_extensions(1).unwrap();
        assert_eq!(e1.len(), 1);
        assert_eq!(e1[0].ext.phi(1), &IntMat::diag(&[-1]));
        let e2 = enumerate_index2_extensions(2).unwrap();
        let names: Vec<&str> = e2.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["J1", "J2", "J3", "J4"]);
        assert_eq!(e2[3].ext.cocycle(1, 1), &[1, 0]);
        assert_eq!(e2[3].automorphism, "sigma_z");
        let e3 = enumerate_index2_extensions(3).unwrap();
        let semi: Vec<&str> = e3.iter().filter(|c| c.semidirect).map(|c| c.name.as_str()).collect();
        assert_eq!(semi, ["K1", "K2", "K3", "K4", "K5"]);
        let extra = |a: &str| e3.iter().filter(|c| !c.semidirect && c.automorphism == a).count();
        assert_eq!(
            [extra("-I3"), extra("Sigma+"), extra("Sigma-"), extra("Lambda+"), extra("Lambda-")],
            [0, 1, 3, 0, 1]
        );
        assert!(enumerate_index2_extensions(4).is_err());
        for c in e3.iter().chain(&e2) {
            assert!(c.ext.is_valid(), "{}", c.name);
        }
    }

    #[test]
    fn presentations_follow_relations() {
        let j2 = named_extension("J2").unwrap();
        assert_eq!(j2.presentation(), "\u{27e8}h1,h2,c | h1h2h1^-1h2^-1, c^2, ch1c^-1h2^-1, ch2c^-1h1^-1\u{27e9}");
        let j4 = named_extension("J4").unwrap();
        assert!(j4.presentation().contains("c^2h1^-1"));
    }

    #[test]
    fn quotient_tables() {
        assert!(Quotient::from_table(&[vec![0, 1], vec![1, 1]]).is_err());
        assert!(Quotient::from_table(&[vec![0, 1], vec![1, 2]]).is_err());
        let k = Quotient::klein();
        assert_eq!((1..4).map(|q| k.element_order(q)).collect::<Vec<_>>(), [2, 2, 2]);
        let z6 = Quotient::cyclic(6);
        assert_eq!(z6.element_order(2), 3);
        assert_eq!(z6.inv(2), 4);
    }

    #[test]
    fn odd_quotients_act_trivially_on_z() {
        for n in [3, 5] {
            assert_eq!(gl1_homomorphisms(&Quotient::cyclic(n)), vec![vec![1; n]]);
        }
        assert_eq!(gl1_homomorphisms(&Quotient::cyclic(2)).len(), 2);
    }
}
