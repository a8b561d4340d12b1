//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero when any criterion fails.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use cayleywalk::run_with;
use cayleywalk_core::catalog::{
    admissible_labels, admissible_set, bcc3d, catalog_walk, dinfty_dirac, dinfty_generators, dirac1d,
    dirac_parent_generators, dirac_scalar_parent, dirac_walk, default_dirac_pair, square2d, weyl_preimage,
    CatalogParams, CATALOG,
};
use cayleywalk_core::cayley::{lattices, quadrangularity_check, GeneratingSet};
use cayleywalk_core::coarse::coarse_grain;
use cayleywalk_core::group::{enumerate_index2_extensions, order2_automorphisms, CocycleClasses, ViolationKind};
use cayleywalk_core::linalg::{c, eigenphases, normal_eigen, Complex64};
use cayleywalk_core::momentum::{group_velocity_and_diffusion, walk_at_k, Branch, DEFAULT_FD_STEP};
use cayleywalk_core::sim::{compare_representations, init_state, norm_drift, InitSpec, TorusPatch};
use cayleywalk_core::walk::{
    isotropic_instance, isotropic_scalar_nogo_certificate, scalar_solution_search, unitarity_residual, QuantumWalk,
    SearchOptions,
};
use cayleywalk_core::{Extension, IntMat, Quotient};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn cli_json(args: &[&str]) -> Result<Value, String> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["cayleywalk"];
    argv.extend_from_slice(args);
    let code = run_with(argv, &mut out, &mut err);
    if code != 0 {
        return Err(format!("exit {code}: {}", String::from_utf8_lossy(&err)));
    }
    serde_json::from_slice(&out).map_err(|e| e.to_string())
}

/// `|Fix(phi) / (I + phi) Z^3|` by brute force over a box: two fixed
/// vectors are identified when their difference is `(I + phi) w`.
fn brute_force_class_count(phi: &IntMat) -> usize {
    let r = 3i64;
    let d = phi.rows();
    let boxed = |r: i64| -> Vec<Vec<i64>> {
        let mut out = vec![vec![]];
        for _ in 0..d {
            out = out.into_iter().flat_map(|v| (-r..=r).map(move |x| [v.clone(), vec![x]].concat())).collect();
        }
        out
    };
    let fixed: Vec<Vec<i64>> = boxed(r).into_iter().filter(|v| phi.mul_vec(v) == *v).collect();
    let ip = IntMat::identity(d).add(phi);
    let images: Vec<Vec<i64>> = boxed(2 * r).iter().map(|w| ip.mul_vec(w)).collect();
    let mut classes: Vec<Vec<i64>> = Vec::new();
    for v in &fixed {
        let same = |u: &Vec<i64>| {
            let diff: Vec<i64> = v.iter().zip(u).map(|(a, b)| a - b).collect();
            images.contains(&diff)
        };
        if !classes.iter().any(same) {
            classes.push(v.clone());
        }
    }
    classes.len()
}

fn c1_enumeration() -> Check {
    let d1 = cli_json(&["extensions", "enumerate", "--dim", "1", "--json"])?;
    let d1 = d1.as_array().ok_or("not a list")?;
    ensure(d1.len() == 1 && d1[0]["name"] == "Dinf", "dim 1 must give exactly D_inf")?;
    ensure(d1[0]["extension"]["phi"][1] == serde_json::json!([[-1]]), "D_inf acts by -1")?;

    let d2 = cli_json(&["extensions", "enumerate", "--dim", "2", "--json"])?;
    let got: Vec<(String, String, Value)> = d2
        .as_array()
        .ok_or("not a list")?
        .iter()
        .map(|c| (c["name"].as_str().unwrap_or("").to_string(), c["automorphism"].as_str().unwrap_or("").to_string(), c["extension"]["cocycle"][1][1].clone()))
        .collect();
    // J1 (-I2), J2 (sigma_x), J3 (sigma_z) split; J4: sigma_z with c^2 = h1
    let want = [
        ("J1", "-I2", serde_json::json!([0, 0])),
        ("J2", "sigma_x", serde_json::json!([0, 0])),
        ("J3", "sigma_z", serde_json::json!([0, 0])),
        ("J4", "sigma_z", serde_json::json!([1, 0])),
    ];
    ensure(got.len() == 4, format!("dim 2 gave {} classes", got.len()))?;
    for ((n, a, c2), (wn, wa, wc)) in got.iter().zip(&want) {
        ensure(n == wn && a == wa && c2 == wc, format!("dim 2 class {n} {a} {c2} differs from {wn} {wa} {wc}"))?;
    }

    let d3 = enumerate_index2_extensions(3).map_err(|e| e.to_string())?;
    let semi: Vec<(&str, &str)> = d3.iter().filter(|c| c.semidirect).map(|c| (c.name.as_str(), c.automorphism)).collect();
    let want3 = [("K1", "-I3"), ("K2", "Sigma+"), ("K3", "Sigma-"), ("K4", "Lambda+"), ("K5", "Lambda-")];
    ensure(semi == want3, format!("dim 3 semidirect classes {semi:?}"))?;
    let mut counts = Vec::new();
    for (label, phi) in order2_automorphisms(3).map_err(|e| e.to_string())? {
        let ours = d3.iter().filter(|c| !c.semidirect && c.automorphism == label).count();
        let oracle = brute_force_class_count(&phi) - 1;
        let snf = CocycleClasses::new(&phi).count().ok_or("infinite class group")? - 1;
        ensure(ours == oracle && snf == oracle, format!("{label}: listed {ours}, SNF {snf}, brute force {oracle}"))?;
        counts.push(format!("{label}:{ours}"));
    }
    Ok(format!("D_inf; J1..J4; K1..K5; non-semidirect {}", counts.join(" ")))
}

fn random_unimodular(rng: &mut ChaCha8Rng, d: usize) -> IntMat {
    let mut m = IntMat::identity(d);
    for _ in 0..4 {
        let i = rng.random_range(0..d);
        let j = (i + rng.random_range(1..d)) % d;
        let mut e = IntMat::identity(d);
        e[(i, j)] = rng.random_range(-2..=2);
        m = m.mul(&e);
    }
    m
}

fn c2_validation() -> Check {
    let mut catalog: Vec<Extension> = Vec::new();
    for d in 1..=3 {
        catalog.extend(enumerate_index2_extensions(d).map_err(|e| e.to_string())?.into_iter().map(|c| c.ext));
    }
    for d in [2, 3] {
        let (p1, p2) = default_dirac_pair(d).map_err(|e| e.to_string())?;
        catalog.push(cayleywalk_core::group::klein_semidirect(&p1, &p2).map_err(|e| e.to_string())?);
    }
    for e in &catalog {
        ensure(e.is_valid(), format!("false positive on catalog data {}", e.presentation()))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut hom, mut coc, mut clean) = (0, 0, 0);
    for t in 0..10_000 {
        let base = &catalog[rng.random_range(0..catalog.len() - 2)];
        let d = base.dim();
        let phi = base.phi(1).clone();
        let inject_hom = t % 2 == 0;
        let (ext, expected) = if inject_hom {
            // an automorphism that does not square to the identity, with
            // zero cocycle so the cocycle relation cannot fail
            let m = loop {
                let m = if d == 1 { IntMat::from_rows(&[vec![rng.random_range(2..5)]]) } else { random_unimodular(&mut rng, d) };
                if m.mul(&m) != IntMat::identity(d) {
                    break m;
                }
            };
            let e = Extension::semidirect(d, Quotient::cyclic(2), vec![IntMat::identity(d), m]).map_err(|e| e.to_string())?;
            (e, vec![ViolationKind::Homomorphism])
        } else {
            // c^2 = v satisfies the cocycle relation iff phi v = v
            let v: Vec<i64> = (0..d).map(|_| rng.random_range(-3..=3)).collect();
            let expect = if phi.mul_vec(&v) == v { vec![] } else { vec![ViolationKind::Cocycle] };
            (Extension::index2(phi, v).map_err(|e| e.to_string())?, expect)
        };
        let mut kinds: Vec<ViolationKind> = ext.validate().iter().map(|v| v.kind()).collect();
        kinds.sort();
        kinds.dedup();
        ensure(kinds == expected, format!("trial {t}: flagged {kinds:?}, injected {expected:?}"))?;
        match expected.first() {
            Some(ViolationKind::Homomorphism) => hom += 1,
            Some(_) => coc += 1,
            None => clean += 1,
        }
    }
    Ok(format!("{hom} homomorphism and {coc} cocycle injections flagged exactly, {clean} valid draws clean, {} catalog extensions clean", catalog.len()))
}

fn c3_quadrangularity() -> Check {
    let line = GeneratingSet::lattice(&lattices::line(), false).map_err(|e| e.to_string())?;
    ensure(!quadrangularity_check(&line).passes, "Z with S = {+1, -1} must fail")?;
    let mut names = Vec::new();
    for name in ["J1", "J2", "J3", "K1", "K2", "K3"] {
        let gs = admissible_set(name).map_err(|e| e.to_string())?;
        let r = quadrangularity_check(&gs);
        ensure(r.passes, format!("{name} fails with {} violating pairs", r.violators.len()))?;
        names.push(name.to_string());
    }
    for d in [2, 3] {
        let (p1, p2) = default_dirac_pair(d).map_err(|e| e.to_string())?;
        let gs = dirac_parent_generators(d, &p1, &p2).map_err(|e| e.to_string())?;
        let r = quadrangularity_check(&gs);
        ensure(r.passes, format!("D2 Dirac presentation d={d} fails with {} pairs", r.violators.len()))?;
        names.push(format!("D2-d{d}"));
    }
    Ok(format!("Z fails; passes on {}", names.join(" ")))
}

fn random_bcc_params(rng: &mut ChaCha8Rng) -> ([f64; 4], f64) {
    loop {
        let u: f64 = rng.random_range(0.05..0.95);
        let t1: f64 = rng.random_range(0.05..(PI / 2.0 - 0.05));
        let s = u * (2.0 * t1).sin() / (1.0 - u);
        if s >= 1.0 {
            continue;
        }
        let t2 = 0.5 * s.asin();
        let t2 = if rng.random_bool(0.5) { t2 } else { PI / 2.0 - t2 };
        let (r1, r2) = (u.sqrt(), (1.0 - u).sqrt());
        let a = [r1 * t1.cos(), r1 * t1.sin(), r2 * t2.cos(), r2 * t2.sin()];
        if a.iter().all(|&x| x > 1e-6) {
            return (a, rng.random_range(-PI..PI));
        }
    }
}

fn c4_unitarity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let a = rng.random_range(1e-6..1.0 - 1e-6);
        let r = unitarity_residual(&square2d(a).map_err(|e| format!("alpha {a}: {e}"))?).residual;
        ensure(r <= 1e-10, format!("square family alpha {a}: residual {r:e}"))?;
        worst = worst.max(r);
    }
    let mut worst3: f64 = 0.0;
    for _ in 0..50 {
        let (a, th) = random_bcc_params(&mut rng);
        let r = unitarity_residual(&bcc3d(a, th).map_err(|e| format!("{a:?} {th}: {e}"))?).residual;
        ensure(r <= 1e-10, format!("BCC family {a:?} theta {th}: residual {r:e}"))?;
        worst3 = worst3.max(r);
    }
    Ok(format!("max residual square {worst:.1e}, BCC {worst3:.1e}"))
}

fn symbolic_map(w: &QuantumWalk, labels: &[String]) -> Result<BTreeMap<Vec<i64>, String>, String> {
    let cg = coarse_grain(w).map_err(|e| e.to_string())?;
    Ok(cg.symbolic(labels).into_iter().collect())
}

fn c5_patterns() -> Check {
    let labels = admissible_labels(2).map_err(|e| e.to_string())?;
    let m = |pairs: &[(&[i64], &str)]| -> BTreeMap<Vec<i64>, String> {
        pairs.iter().map(|(v, s)| (v.to_vec(), s.to_string())).collect()
    };
    // transcribed from the displayed J1, J2, J3 coarse-grained matrices
    let fixtures = [
        (
            "J1",
            m(&[
                (&[1, 0], "[[z_h1, z_h1c], [z_h1^-1c, z_h1^-1]]"),
                (&[-1, 0], "[[z_h1^-1, z_h1^-1c], [z_h1c, z_h1]]"),
                (&[0, 1], "[[z_h2, z_h2c], [z_h2^-1c, z_h2^-1]]"),
                (&[0, -1], "[[z_h2^-1, z_h2^-1c], [z_h2c, z_h2]]"),
            ]),
        ),
        (
            "J2",
            m(&[
                (&[1, 0], "[[z_h1, z_h1c], [z_h2c, z_h2]]"),
                (&[-1, 0], "[[z_h1^-1, z_h1^-1c], [z_h2^-1c, z_h2^-1]]"),
                (&[0, 1], "[[z_h2, z_h2c], [z_h1c, z_h1]]"),
                (&[0, -1], "[[z_h2^-1, z_h2^-1c], [z_h1^-1c, z_h1^-1]]"),
            ]),
        ),
        (
            "J3",
            m(&[
                (&[1, 0], "[[z_h1, z_h1c], [z_h1c, z_h1]]"),
                (&[-1, 0], "[[z_h1^-1, z_h1^-1c], [z_h1^-1c, z_h1^-1]]"),
                (&[0, 1], "[[z_h2, z_h2c], [z_h2^-1c, z_h2^-1]]"),
                (&[0, -1], "[[z_h2^-1, z_h2^-1c], [z_h2c, z_h2]]"),
            ]),
        ),
    ];
    for (name, want) in &fixtures {
        let gs = admissible_set(name).map_err(|e| e.to_string())?;
        let w = QuantumWalk::scalar(gs, &vec![c(1.0, 0.0); labels.len()]).map_err(|e| e.to_string())?;
        let got = symbolic_map(&w, &labels)?;
        ensure(&got == want, format!("{name}: got {got:?}"))?;
    }
    let gs = dinfty_generators();
    let dl: Vec<String> = ["z_+", "z_-", "z_c", "z_c"].iter().map(|s| s.to_string()).collect();
    let w = QuantumWalk::scalar(gs, &[c(1.0, 0.0); 4]).map_err(|e| e.to_string())?;
    let got = symbolic_map(&w, &dl)?;
    let want = m(&[(&[1], "[[z_+, z_c], [z_c, z_-]]"), (&[-1], "[[z_-, z_c], [z_c, z_+]]")]);
    ensure(got == want, format!("D_inf: got {got:?}"))?;
    Ok("J1, J2, J3 and D_inf placements match symbol for symbol".into())
}

fn c6_equivalence() -> Check {
    let dinf = dinfty_dirac(0.6).map_err(|e| e.to_string())?;
    let a = compare_representations(&dinf, 50, 128, 6).map_err(|e| e.to_string())?;
    let j2 = weyl_preimage("J2").map_err(|e| e.to_string())?.walk;
    let b = compare_representations(&j2, 50, 64, 6).map_err(|e| e.to_string())?;
    ensure(a <= 1e-10 && b <= 1e-10, format!("deviation D_inf {a:e}, J2 {b:e}"))?;
    Ok(format!("deviation D_inf {a:.1e}, J2 {b:.1e}"))
}

/// Largest distance in an optimal-greedy matching of two eigenvalue lists.
fn spectrum_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("equal lengths");
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

fn c7_dirac() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut lines = Vec::new();
    let mut all = true;
    for d in [2usize, 3] {
        for m in [0.0, 0.3, 0.6] {
            let parent = dirac_scalar_parent(d, m, None).map_err(|e| e.to_string())?;
            let cg = coarse_grain(&parent.walk).map_err(|e| e.to_string())?.base;
            let target = dirac_walk(d, m).map_err(|e| e.to_string())?;
            let mut worst: f64 = 0.0;
            for _ in 0..20 {
                let k: Vec<f64> = (0..d).map(|_| rng.random_range(-PI..PI)).collect();
                let (ev_a, _) = normal_eigen(&walk_at_k(&cg, &k).map_err(|e| e.to_string())?);
                let (ev_b, _) = normal_eigen(&walk_at_k(&target, &k).map_err(|e| e.to_string())?);
                worst = worst.max(spectrum_distance(&ev_b, &ev_a));
            }
            let ok = worst <= 1e-9;
            all &= ok;
            lines.push(format!("d={d} m={m}: {} ({worst:.1e})", if ok { "ok" } else { "mismatch" }));
        }
    }
    if all {
        Ok(lines.join("; "))
    } else {
        Err(lines.join("; "))
    }
}

fn c8_nogo() -> Check {
    let mut parts = Vec::new();
    for d in [2usize, 3] {
        let cert = isotropic_scalar_nogo_certificate(d, 10_000, 8).map_err(|e| e.to_string())?;
        ensure(cert.min_lower_bound > 0.05, format!("d={d}: lower bound {}", cert.min_lower_bound))?;
        let (gs, tie) = isotropic_instance(d).map_err(|e| e.to_string())?;
        let opts = SearchOptions { restarts: 100, seed: 8, tie: Some(tie), ..SearchOptions::default() };
        let res = scalar_solution_search(&gs, &opts).map_err(|e| e.to_string())?;
        let best = res.restart_residuals.iter().cloned().fold(f64::INFINITY, f64::min);
        ensure(res.restart_residuals.len() == 100, format!("d={d}: {} restarts ran", res.restart_residuals.len()))?;
        ensure(best >= 0.05, format!("d={d}: search reached residual {best}"))?;
        parts.push(format!("d={d} bound {:.3} search min {:.3}", cert.min_lower_bound, best));
    }
    Ok(parts.join("; "))
}

fn c9_dispersion() -> Check {
    let w = dirac1d(0.6).map_err(|e| e.to_string())?;
    let w0 = (0.8f64).acos();
    let at0 = eigenphases(&walk_at_k(&w, &[0.0]).map_err(|e| e.to_string())?);
    let min0 = at0.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
    ensure((min0 - w0).abs() <= 1e-8, format!("min |omega(0)| = {min0}"))?;
    // k = 0 is where min |omega| is smallest
    for i in 0..=2000 {
        let k = -PI + 2.0 * PI * i as f64 / 2000.0;
        let ph = eigenphases(&walk_at_k(&w, &[k]).map_err(|e| e.to_string())?);
        let mn = ph.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
        ensure(mn >= min0 - 1e-12, format!("min |omega| at k={k} is {mn} < {min0}"))?;
    }
    let dd = group_velocity_and_diffusion(&w, &[0.0], Branch::Upper, DEFAULT_FD_STEP).map_err(|e| e.to_string())?;
    ensure(dd.v[0].abs() <= 1e-6, format!("v(0) = {}", dd.v[0]))?;
    ensure((dd.diffusion[0] - 0.8 / 0.6).abs() <= 1e-4, format!("D(0) = {}", dd.diffusion[0]))?;
    Ok(format!("omega(0) {min0:.10}, v(0) {:.1e}, D(0) {:.8}", dd.v[0], dd.diffusion[0]))
}

fn c10_conservation() -> Check {
    let mut bad = Vec::new();
    let mut worst: f64 = 0.0;
    for name in CATALOG {
        let w = catalog_walk(name, &CatalogParams::default()).map_err(|e| e.to_string())?;
        let patch = TorusPatch::for_walk(&w, 64).map_err(|e| e.to_string())?;
        let st = init_state(patch, w.coin_dim(), &InitSpec::origin(patch.dim)).map_err(|e| e.to_string())?;
        let drift = norm_drift(&w, &st, 100).map_err(|e| e.to_string())?;
        if drift > 1e-10 {
            bad.push(format!("{name} drift {drift:.2e}"));
        } else {
            worst = worst.max(drift);
        }
    }
    if bad.is_empty() {
        Ok(format!("{} walks, max drift {worst:.1e}", CATALOG.len()))
    } else {
        Err(format!("{}; the others stay within {worst:.1e}", bad.join(", ")))
    }
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("extension enumeration", c1_enumeration),
        ("extension validity", c2_validation),
        ("quadrangularity", c3_quadrangularity),
        ("unitarity of families", c4_unitarity),
        ("coarse-graining pattern fidelity", c5_patterns),
        ("dynamical equivalence", c6_equivalence),
        ("Dirac reconstruction", c7_dirac),
        ("no-go certificate", c8_nogo),
        ("dispersion oracle", c9_dispersion),
        ("conservation", c10_conservation),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let res = f();
        let secs = t.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail}) [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({detail}) [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
