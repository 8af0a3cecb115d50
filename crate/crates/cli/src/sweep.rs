//! Grid sweep over the tetrahedron of reachable concurrence triples.

use serde::Serialize;
use sepdisc::constructions::{basis_from_unitary, tetra_unitary, TetraPoint};
use sepdisc::discrimination::decide_max_ent_basis;
use sepdisc::states::concurrence;

use crate::report::status_str;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub achieved1: f64,
    pub achieved2: f64,
    pub achieved3: f64,
    pub max_error: f64,
    pub decide_status: String,
}

fn row(p: &TetraPoint) -> Result<SweepRow, String> {
    let u = tetra_unitary(p).map_err(|e| e.to_string())?;
    let basis = basis_from_unitary(&u).map_err(|e| e.to_string())?;
    let c: Vec<f64> = basis.iter().map(|s| concurrence(s).map_err(|e| e.to_string())).collect::<Result<_, _>>()?;
    let max_error = c.iter().zip(p.x).map(|(a, t)| (a - t).abs()).fold(0.0, f64::max);
    let status = decide_max_ent_basis(&basis).map_err(|e| e.to_string())?.status;
    Ok(SweepRow {
        x1: p.x[0],
        x2: p.x[1],
        x3: p.x[2],
        achieved1: c[0],
        achieved2: c[1],
        achieved3: c[2],
        max_error,
        decide_status: status_str(status).to_string(),
    })
}

/// Valid grid points `k·step` in lexicographic order.
pub fn grid(step: f64) -> Result<Vec<TetraPoint>, String> {
    if !(step > 0.0 && step <= 0.25) {
        return Err(format!("grid step must satisfy 0 < step <= 0.25, got {step}"));
    }
    let n = (1.0 / step + 1e-9).floor() as usize;
    let mut out = Vec::new();
    for a in 0..=n {
        for b in 0..=n {
            for c in 0..=n {
                if let Ok(p) = TetraPoint::new(a as f64 * step, b as f64 * step, c as f64 * step) {
                    out.push(p);
                }
            }
        }
    }
    Ok(out)
}

/// Rows are computed on worker threads; the output keeps grid order.
pub fn sweep(step: f64) -> Result<Vec<SweepRow>, String> {
    let points = grid(step)?;
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(points.len().max(1));
    let chunk = points.len().div_ceil(workers).max(1);
    let results: Vec<Result<Vec<SweepRow>, String>> = std::thread::scope(|s| {
        let handles: Vec<_> = points.chunks(chunk).map(|ps| s.spawn(move || ps.iter().map(row).collect())).collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    let mut rows = Vec::with_capacity(points.len());
    for r in results {
        rows.extend(r?);
    }
    Ok(rows)
}

pub fn write_csv(rows: &[SweepRow], path: &std::path::Path) -> Result<(), String> {
    let mut w = csv::Writer::from_path(path).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    for r in rows {
        w.serialize(r).map_err(|e| e.to_string())?;
    }
    w.flush().map_err(|e| format!("cannot write {}: {e}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn find(rows: &[SweepRow], x: [f64; 3]) -> &SweepRow {
        rows.iter().find(|r| (r.x1 - x[0]).abs() + (r.x2 - x[1]).abs() + (r.x3 - x[2]).abs() < 1e-12).unwrap()
    }

    #[test]
    fn quarter_grid() {
        let rows = sweep(0.25).unwrap();
        assert_eq!(find(&rows, [1.0, 0.0, 0.0]).decide_status, "distinguishable");
        assert_eq!(find(&rows, [1.0, 1.0, 1.0]).decide_status, "indistinguishable");
        assert_eq!(find(&rows, [0.5, 0.25, 0.25]).decide_status, "distinguishable");
        for r in &rows {
            assert!(r.max_error < 1e-8, "{r:?}");
            let face = (r.x1 + r.x2 + r.x3 - 1.0).abs() < 1e-12;
            assert_eq!(r.decide_status == "distinguishable", face, "{r:?}");
        }
    }

    #[test]
    fn order_is_deterministic() {
        assert_eq!(sweep(0.2).unwrap(), sweep(0.2).unwrap());
        let g = grid(0.2).unwrap();
        assert!(g.windows(2).all(|w| w[0].x < w[1].x));
    }

    #[test]
    fn step_bounds() {
        assert!(grid(0.0).is_err());
        assert!(grid(0.3).is_err());
        assert!(grid(0.25).is_ok());
    }
}
