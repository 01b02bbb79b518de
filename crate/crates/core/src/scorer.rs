//! Similarity scoring between a candidate plan and a ground-truth plan.
//!
//! Six component similarities, each in `[0, 1]`, are combined into a weighted
//! composite. All components are symmetric in their two arguments, and
//! identical inputs score exactly 1.0 on every component.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::graph::{FloorPlanIr, Orientation, RoomGraph};

/// Component weights. They sum to exactly 1.0.
pub const W_EDGE_OVERLAP: f64 = 0.50;
pub const W_DEGREE_CORR: f64 = 0.20;
pub const W_DENSITY: f64 = 0.10;
pub const W_ROOM_COUNT: f64 = 0.10;
pub const W_DOOR_COUNT: f64 = 0.05;
pub const W_ORIENTATION: f64 = 0.05;

/// Per-component similarity scores plus the weighted composite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreBreakdown {
    pub edge_overlap: f64,
    pub degree_corr: f64,
    pub density_sim: f64,
    pub room_count_sim: f64,
    pub door_count_sim: f64,
    pub orientation_sim: f64,
    pub composite: f64,
}

impl ScoreBreakdown {
    /// Builds a breakdown from the six component values, computing the
    /// composite as the weighted sum.
    pub fn from_components(
        edge_overlap: f64,
        degree_corr: f64,
        density_sim: f64,
        room_count_sim: f64,
        door_count_sim: f64,
        orientation_sim: f64,
    ) -> Self {
        let composite = W_EDGE_OVERLAP * edge_overlap
            + W_DEGREE_CORR * degree_corr
            + W_DENSITY * density_sim
            + W_ROOM_COUNT * room_count_sim
            + W_DOOR_COUNT * door_count_sim
            + W_ORIENTATION * orientation_sim;
        ScoreBreakdown {
            edge_overlap,
            degree_corr,
            density_sim,
            room_count_sim,
            door_count_sim,
            orientation_sim,
            composite,
        }
    }

    /// Breakdown representing a submission that could not be scored at all.
    pub fn zero() -> Self {
        ScoreBreakdown {
            edge_overlap: 0.0,
            degree_corr: 0.0,
            density_sim: 0.0,
            room_count_sim: 0.0,
            door_count_sim: 0.0,
            orientation_sim: 0.0,
            composite: 0.0,
        }
    }
}

/// Jaccard similarity of the two rank-pair edge sets.
///
/// Two empty edge sets count as perfect agreement.
pub fn edge_jaccard(a: &RoomGraph, b: &RoomGraph) -> f64 {
    let ea: BTreeSet<(u32, u32)> = a.edges().collect();
    let eb: BTreeSet<(u32, u32)> = b.edges().collect();
    let union = ea.union(&eb).count();
    if union == 0 {
        return 1.0;
    }
    let inter = ea.intersection(&eb).count();
    inter as f64 / union as f64
}

/// Degree-vector similarity over the shared rank prefix `1..min(n_a, n_b)`.
///
/// Normally the Pearson correlation coefficient of the two truncated degree
/// vectors mapped through `(r + 1) / 2`. Degenerate cases: an empty prefix
/// scores 0 unless both graphs are empty (1); identical vectors score 1; a
/// zero-variance vector falls back to a mean-absolute-difference similarity
/// normalized by the largest degree present.
pub fn degree_correlation(a: &RoomGraph, b: &RoomGraph) -> f64 {
    let m = a.node_count().min(b.node_count()) as usize;
    if m == 0 {
        return if a.node_count() == 0 && b.node_count() == 0 {
            1.0
        } else {
            0.0
        };
    }
    let da: Vec<u32> = a.degree_sequence().into_iter().take(m).collect();
    let db: Vec<u32> = b.degree_sequence().into_iter().take(m).collect();
    if da == db {
        return 1.0;
    }

    let n = m as f64;
    let mean_a = da.iter().map(|&d| d as u64).sum::<u64>() as f64 / n;
    let mean_b = db.iter().map(|&d| d as u64).sum::<u64>() as f64 / n;
    let mut cov = 0.0;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    for i in 0..m {
        let xa = da[i] as f64 - mean_a;
        let xb = db[i] as f64 - mean_b;
        cov += xa * xb;
        var_a += xa * xa;
        var_b += xb * xb;
    }
    if var_a == 0.0 || var_b == 0.0 {
        // The vectors differ, so some degree is positive and max_degree > 0.
        let max_degree = da.iter().chain(db.iter()).copied().max().unwrap_or(0) as f64;
        let mad = da
            .iter()
            .zip(db.iter())
            .map(|(&x, &y)| (x as f64 - y as f64).abs())
            .sum::<f64>()
            / n;
        return (1.0 - mad / max_degree).clamp(0.0, 1.0);
    }
    let r = (cov / (var_a * var_b).sqrt()).clamp(-1.0, 1.0);
    (r + 1.0) / 2.0
}

/// Similarity of the two graph densities: `1 − |density(a) − density(b)|`.
pub fn density_similarity(a: &RoomGraph, b: &RoomGraph) -> f64 {
    1.0 - (a.density() - b.density()).abs()
}

/// Ratio similarity of two non-negative counts: `min / max`, with `0, 0 → 1`.
pub fn count_similarity(x: usize, y: usize) -> f64 {
    if x == 0 && y == 0 {
        return 1.0;
    }
    x.min(y) as f64 / x.max(y) as f64
}

/// Similarity of the two door-orientation distributions.
///
/// Compares the fractions of horizontal doors: `1 − |p(a) − p(b)|`. If exactly
/// one side has no doors at all the distributions are incomparable and the
/// score is 0; if neither side has doors it is 1.
pub fn orientation_similarity(a: &FloorPlanIr, b: &FloorPlanIr) -> f64 {
    let (na, nb) = (a.doors.len(), b.doors.len());
    match (na, nb) {
        (0, 0) => 1.0,
        (0, _) | (_, 0) => 0.0,
        _ => {
            let pa = horizontal_fraction(a);
            let pb = horizontal_fraction(b);
            1.0 - (pa - pb).abs()
        }
    }
}

fn horizontal_fraction(ir: &FloorPlanIr) -> f64 {
    let h = ir
        .doors
        .iter()
        .filter(|d| d.orientation == Orientation::Horizontal)
        .count();
    h as f64 / ir.doors.len() as f64
}

/// Computes all six component similarities and the weighted composite.
pub fn composite_score(candidate: &FloorPlanIr, truth: &FloorPlanIr) -> ScoreBreakdown {
    let ga = RoomGraph::from_ir(candidate);
    let gb = RoomGraph::from_ir(truth);
    ScoreBreakdown::from_components(
        edge_jaccard(&ga, &gb),
        degree_correlation(&ga, &gb),
        density_similarity(&ga, &gb),
        count_similarity(candidate.room_count(), truth.room_count()),
        count_similarity(candidate.door_count(), truth.door_count()),
        orientation_similarity(candidate, truth),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Door, Room};

    fn graph(n: usize, edges: &[(u32, u32)]) -> RoomGraph {
        let ir = chain_ir(n, edges);
        RoomGraph::from_ir(&ir)
    }

    /// IR with n rooms (areas descending so rank i+1 has area 1000−i) and one
    /// door per requested edge.
    fn chain_ir(n: usize, edges: &[(u32, u32)]) -> FloorPlanIr {
        let rooms = (0..n)
            .map(|i| Room {
                id: (i + 1) as u32,
                area: (1000 - i) as u64,
                centroid: (10 * i as u32, 10),
            })
            .collect();
        let doors = edges
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| Door {
                center: (50 + i as u32, 50),
                orientation: if i % 2 == 0 {
                    Orientation::Vertical
                } else {
                    Orientation::Horizontal
                },
                rooms: vec![a, b],
            })
            .collect();
        let mut ir = FloorPlanIr::empty();
        ir.rooms = rooms;
        ir.doors = doors;
        ir.edges = edges.to_vec();
        ir.canonicalize();
        ir
    }

    #[test]
    fn jaccard_counts_shared_and_total_edges() {
        let a = graph(3, &[(1, 2), (2, 3)]);
        let b = graph(3, &[(1, 2)]);
        assert_eq!(edge_jaccard(&a, &b), 0.5);
        assert_eq!(edge_jaccard(&a, &a), 1.0);
    }

    #[test]
    fn jaccard_on_two_empty_edge_sets_is_one() {
        let a = graph(2, &[]);
        let b = graph(3, &[]);
        assert_eq!(edge_jaccard(&a, &b), 1.0);
    }

    #[test]
    fn jaccard_empty_vs_nonempty_is_zero() {
        let a = graph(3, &[]);
        let b = graph(3, &[(1, 2)]);
        assert_eq!(edge_jaccard(&a, &b), 0.0);
    }

    #[test]
    fn degree_corr_matches_hand_computed_pearson() {
        // Degrees a = [2,1,1] (star at rank 1), b = [1,2,1] (star at rank 2):
        // r = −0.5, mapped to 0.25.
        let a = graph(3, &[(1, 2), (1, 3)]);
        let b = graph(3, &[(1, 2), (2, 3)]);
        let got = degree_correlation(&a, &b);
        assert!((got - 0.25).abs() < 1e-12, "got {got}");
    }

    #[test]
    fn degree_corr_identity_is_exactly_one() {
        let a = graph(4, &[(1, 2), (2, 3), (3, 4)]);
        assert_eq!(degree_correlation(&a, &a), 1.0);
        // Zero-variance identical vectors hit the early return too.
        let ring = graph(3, &[(1, 2), (2, 3), (1, 3)]);
        assert_eq!(degree_correlation(&ring, &ring), 1.0);
    }

    #[test]
    fn degree_corr_empty_cases() {
        let empty = graph(0, &[]);
        let three = graph(3, &[(1, 2)]);
        assert_eq!(degree_correlation(&empty, &empty), 1.0);
        assert_eq!(degree_correlation(&three, &empty), 0.0);
        assert_eq!(degree_correlation(&empty, &three), 0.0);
    }

    #[test]
    fn degree_corr_zero_variance_falls_back_to_mean_abs_difference() {
        // a degrees [1,1] (one edge), b degrees [2,2] impossible on 2 nodes;
        // use 3 nodes: a = path degrees [1,2,1] truncated vs b = triangle
        // [2,2,2]. b has zero variance; max degree 2; mad = (1+0+1)/3 = 2/3.
        let a = graph(3, &[(1, 2), (2, 3)]);
        let b = graph(3, &[(1, 2), (2, 3), (1, 3)]);
        let got = degree_correlation(&a, &b);
        assert!((got - (1.0 - (2.0 / 3.0) / 2.0)).abs() < 1e-12, "got {got}");
        assert_eq!(got, degree_correlation(&b, &a));
    }

    #[test]
    fn degree_corr_truncates_to_shared_rank_prefix() {
        // a: 4-chain degrees [1,2,2,1]; b: 2 rooms one edge degrees [1,1].
        // Truncated to [1,2] vs [1,1]: b side zero variance, max 2,
        // mad = 1/2 → 0.75.
        let a = graph(4, &[(1, 2), (2, 3), (3, 4)]);
        let b = graph(2, &[(1, 2)]);
        let got = degree_correlation(&a, &b);
        assert!((got - 0.75).abs() < 1e-12, "got {got}");
    }

    #[test]
    fn density_similarity_uses_absolute_difference() {
        let a = graph(4, &[(1, 2), (2, 3), (3, 4)]); // density 0.5
        let b = graph(4, &[(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]); // 1.0
        assert!((density_similarity(&a, &b) - 0.5).abs() < 1e-12);
        assert_eq!(density_similarity(&a, &a), 1.0);
    }

    #[test]
    fn density_similarity_single_rooms_agree() {
        let a = graph(1, &[]);
        let b = graph(1, &[]);
        assert_eq!(density_similarity(&a, &b), 1.0);
    }

    #[test]
    fn count_similarity_cases() {
        assert_eq!(count_similarity(5, 5), 1.0);
        assert_eq!(count_similarity(3, 4), 0.75);
        assert_eq!(count_similarity(4, 3), 0.75);
        assert_eq!(count_similarity(0, 2), 0.0);
        assert_eq!(count_similarity(0, 0), 1.0);
    }

    #[test]
    fn orientation_similarity_compares_horizontal_fractions() {
        // a: 2H/2V, b: 4H → |0.5 − 1.0| = 0.5.
        let mut a = chain_ir(5, &[(1, 2), (2, 3), (3, 4), (4, 5)]);
        for (i, d) in a.doors.iter_mut().enumerate() {
            d.orientation = if i < 2 {
                Orientation::Horizontal
            } else {
                Orientation::Vertical
            };
        }
        let mut b = chain_ir(5, &[(1, 2), (2, 3), (3, 4), (4, 5)]);
        for d in b.doors.iter_mut() {
            d.orientation = Orientation::Horizontal;
        }
        assert!((orientation_similarity(&a, &b) - 0.5).abs() < 1e-12);
        assert_eq!(orientation_similarity(&b, &b), 1.0);
    }

    #[test]
    fn orientation_similarity_degenerate_door_counts() {
        let none = chain_ir(2, &[]);
        let some = chain_ir(3, &[(1, 2), (2, 3)]);
        assert_eq!(orientation_similarity(&none, &none), 1.0);
        assert_eq!(orientation_similarity(&none, &some), 0.0);
        assert_eq!(orientation_similarity(&some, &none), 0.0);
    }

    #[test]
    fn composite_weights_are_exact() {
        let unit = |i: usize| {
            let mut v = [0.0; 6];
            v[i] = 1.0;
            ScoreBreakdown::from_components(v[0], v[1], v[2], v[3], v[4], v[5]).composite
        };
        assert_eq!(unit(0), 0.50);
        assert_eq!(unit(1), 0.20);
        assert_eq!(unit(2), 0.10);
        assert_eq!(unit(3), 0.10);
        assert_eq!(unit(4), 0.05);
        assert_eq!(unit(5), 0.05);
        let all = ScoreBreakdown::from_components(1.0, 1.0, 1.0, 1.0, 1.0, 1.0);
        assert_eq!(all.composite, 1.0);
    }

    #[test]
    fn identical_plans_score_exactly_one() {
        let g = chain_ir(4, &[(1, 2), (2, 3), (3, 4)]);
        let s = composite_score(&g, &g);
        assert_eq!(s.edge_overlap, 1.0);
        assert_eq!(s.degree_corr, 1.0);
        assert_eq!(s.density_sim, 1.0);
        assert_eq!(s.room_count_sim, 1.0);
        assert_eq!(s.door_count_sim, 1.0);
        assert_eq!(s.orientation_sim, 1.0);
        assert_eq!(s.composite, 1.0);
    }

    #[test]
    fn chain_missing_one_edge_matches_hand_derivation() {
        let truth = chain_ir(4, &[(1, 2), (2, 3), (3, 4)]);
        let mut cand = chain_ir(4, &[(1, 2), (2, 3)]);
        // Keep the same orientations for the two remaining doors as truth's
        // first two so orientation compares distributions, not door lists.
        for (c, t) in cand.doors.iter_mut().zip(truth.doors.iter()) {
            c.orientation = t.orientation;
        }
        let s = composite_score(&cand, &truth);
        assert!((s.edge_overlap - 2.0 / 3.0).abs() < 1e-12);
        assert!((s.door_count_sim - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(s.room_count_sim, 1.0);
        // densities 2/6 vs 3/6.
        assert!((s.density_sim - (1.0 - 1.0 / 6.0)).abs() < 1e-12);
    }

    #[test]
    fn empty_candidate_vs_populated_truth() {
        let truth = chain_ir(5, &[(1, 2), (2, 3), (3, 4), (4, 5)]);
        let cand = FloorPlanIr::empty();
        let s = composite_score(&cand, &truth);
        assert_eq!(s.edge_overlap, 0.0);
        assert_eq!(s.degree_corr, 0.0);
        assert_eq!(s.room_count_sim, 0.0);
        assert_eq!(s.door_count_sim, 0.0);
        assert_eq!(s.orientation_sim, 0.0);
        // Truth density = 4 / C(5,2) = 0.4; empty graph density 0.
        assert!((s.density_sim - 0.6).abs() < 1e-12);
        let expected = 0.10 * s.density_sim;
        assert!((s.composite - expected).abs() < 1e-12);
    }

    #[test]
    fn scoring_is_symmetric() {
        let a = chain_ir(4, &[(1, 2), (2, 3), (3, 4)]);
        let b = chain_ir(3, &[(1, 2), (1, 3)]);
        let ab = composite_score(&a, &b);
        let ba = composite_score(&b, &a);
        assert_eq!(ab, ba);
    }

    #[test]
    fn breakdown_serializes_all_fields() {
        let s = ScoreBreakdown::from_components(1.0, 0.5, 1.0, 1.0, 0.75, 1.0);
        let json = serde_json::to_string(&s).unwrap();
        for key in [
            "edge_overlap",
            "degree_corr",
            "density_sim",
            "room_count_sim",
            "door_count_sim",
            "orientation_sim",
            "composite",
        ] {
            assert!(json.contains(key), "missing {key} in {json}");
        }
        let back: ScoreBreakdown = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }
}
