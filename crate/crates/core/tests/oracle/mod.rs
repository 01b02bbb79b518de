//! Naive re-implementation of the similarity metric, used to cross-check
//! the production scorer. Written independently and kept deliberately
//! simple: edge sets are plain vectors, membership tests are linear scans,
//! and the statistics are textbook loops.

use planscore::graph::{FloorPlanIr, Orientation};

pub struct OracleBreakdown {
    pub edge_overlap: f64,
    pub degree_corr: f64,
    pub density_sim: f64,
    pub room_count_sim: f64,
    pub door_count_sim: f64,
    pub orientation_sim: f64,
    pub composite: f64,
}

/// Edges as deduplicated `(lo, hi)` pairs with self-loops dropped.
fn clean_edges(ir: &FloorPlanIr) -> Vec<(u32, u32)> {
    let mut out: Vec<(u32, u32)> = Vec::new();
    for &(a, b) in &ir.edges {
        if a == b {
            continue;
        }
        let e = (a.min(b), a.max(b));
        if !out.contains(&e) {
            out.push(e);
        }
    }
    out
}

fn edge_overlap(a: &FloorPlanIr, b: &FloorPlanIr) -> f64 {
    let ea = clean_edges(a);
    let eb = clean_edges(b);
    let mut union = ea.clone();
    for e in &eb {
        if !union.contains(e) {
            union.push(*e);
        }
    }
    if union.is_empty() {
        return 1.0;
    }
    let shared = ea.iter().filter(|e| eb.contains(e)).count();
    shared as f64 / union.len() as f64
}

fn degree_of(edges: &[(u32, u32)], id: u32) -> f64 {
    edges.iter().filter(|&&(a, b)| a == id || b == id).count() as f64
}

fn degree_corr(a: &FloorPlanIr, b: &FloorPlanIr) -> f64 {
    let m = a.rooms.len().min(b.rooms.len());
    if m == 0 {
        return if a.rooms.is_empty() && b.rooms.is_empty() {
            1.0
        } else {
            0.0
        };
    }
    let ea = clean_edges(a);
    let eb = clean_edges(b);
    let da: Vec<f64> = (1..=m as u32).map(|id| degree_of(&ea, id)).collect();
    let db: Vec<f64> = (1..=m as u32).map(|id| degree_of(&eb, id)).collect();
    if da == db {
        return 1.0;
    }
    let mean_a = da.iter().sum::<f64>() / m as f64;
    let mean_b = db.iter().sum::<f64>() / m as f64;
    let mut cov = 0.0;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    for i in 0..m {
        cov += (da[i] - mean_a) * (db[i] - mean_b);
        var_a += (da[i] - mean_a) * (da[i] - mean_a);
        var_b += (db[i] - mean_b) * (db[i] - mean_b);
    }
    if var_a == 0.0 || var_b == 0.0 {
        let mut mad = 0.0;
        let mut max_degree = 0.0_f64;
        for i in 0..m {
            mad += (da[i] - db[i]).abs();
            max_degree = max_degree.max(da[i]).max(db[i]);
        }
        mad /= m as f64;
        return (1.0 - mad / max_degree).clamp(0.0, 1.0);
    }
    let r = (cov / (var_a * var_b).sqrt()).clamp(-1.0, 1.0);
    (r + 1.0) / 2.0
}

fn density(ir: &FloorPlanIr) -> f64 {
    let n = ir.rooms.len() as f64;
    if n < 2.0 {
        return 0.0;
    }
    clean_edges(ir).len() as f64 / (n * (n - 1.0) / 2.0)
}

fn ratio(x: usize, y: usize) -> f64 {
    if x == 0 && y == 0 {
        return 1.0;
    }
    x.min(y) as f64 / x.max(y) as f64
}

fn orientation_sim(a: &FloorPlanIr, b: &FloorPlanIr) -> f64 {
    let horizontal = |ir: &FloorPlanIr| {
        ir.doors
            .iter()
            .filter(|d| d.orientation == Orientation::Horizontal)
            .count() as f64
            / ir.doors.len() as f64
    };
    if a.doors.is_empty() && b.doors.is_empty() {
        return 1.0;
    }
    if a.doors.is_empty() || b.doors.is_empty() {
        return 0.0;
    }
    1.0 - (horizontal(a) - horizontal(b)).abs()
}

/// Scores `candidate` against `truth` from first principles.
pub fn score(candidate: &FloorPlanIr, truth: &FloorPlanIr) -> OracleBreakdown {
    let edge_overlap = edge_overlap(candidate, truth);
    let degree_corr = degree_corr(candidate, truth);
    let density_sim = 1.0 - (density(candidate) - density(truth)).abs();
    let room_count_sim = ratio(candidate.rooms.len(), truth.rooms.len());
    let door_count_sim = ratio(candidate.doors.len(), truth.doors.len());
    let orientation_sim = orientation_sim(candidate, truth);
    let composite = 0.50 * edge_overlap
        + 0.20 * degree_corr
        + 0.10 * density_sim
        + 0.10 * room_count_sim
        + 0.05 * door_count_sim
        + 0.05 * orientation_sim;
    OracleBreakdown {
        edge_overlap,
        degree_corr,
        density_sim,
        room_count_sim,
        door_count_sim,
        orientation_sim,
        composite,
    }
}
