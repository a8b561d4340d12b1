//! CSV writers for dispersion grids and probability distributions.

use cayleywalk_core::momentum::DispersionGrid;
use cayleywalk_core::sim::{probability_distribution, WalkState};

/// Columns `k_1..k_d, omega_1..omega_s`, then `v_1..v_d` and row-major
/// `D_ij` when `derivatives` is set (empty at band crossings).
pub fn dispersion_csv(g: &DispersionGrid, derivatives: bool) -> csv::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = (1..=g.dim).map(|i| format!("k_{i}")).collect();
    header.extend((1..=g.coin_dim).map(|i| format!("omega_{i}")));
    if derivatives {
        header.extend((1..=g.dim).map(|i| format!("v_{i}")));
        for i in 1..=g.dim {
            header.extend((1..=g.dim).map(|j| format!("D_{i}{j}")));
        }
    }
    w.write_record(&header)?;
    for p in &g.points {
        let mut row: Vec<String> = p.k.iter().chain(&p.omegas).map(f64::to_string).collect();
        if derivatives {
            let blank = || vec![String::new(); g.dim];
            row.extend(p.v.as_ref().map_or_else(blank, |v| v.iter().map(f64::to_string).collect()));
            let blank = || vec![String::new(); g.dim * g.dim];
            row.extend(p.diffusion.as_ref().map_or_else(blank, |v| v.iter().map(f64::to_string).collect()));
        }
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

/// Columns `x_1..x_d, q, probability`, one row per `(site, q)`.
pub fn probabilities_csv(state: &WalkState) -> csv::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let d = state.patch.dim;
    let mut header: Vec<String> = (1..=d).map(|i| format!("x_{i}")).collect();
    header.push("q".into());
    header.push("probability".into());
    w.write_record(&header)?;
    let qs = state.patch.quotient_size;
    for (i, p) in probability_distribution(state).iter().enumerate() {
        let mut row: Vec<String> = state.patch.site_coords(i / qs).iter().map(i64::to_string).collect();
        row.push((i % qs).to_string());
        row.push(p.to_string());
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}
