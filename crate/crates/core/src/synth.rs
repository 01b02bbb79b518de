//! Procedural generation of rule-compliant floor plans with analytically
//! known ground truth, plus perturbation operators for sensitivity testing
//! and a no-input random baseline.
//!
//! Plans are built on a wall-centerline grid: every room is a rectangle
//! whose walls are straight odd-width strokes centered on integer
//! coordinates, doors are stroke-width green segments painted over a shared
//! wall, and each room carries one square red marker. Geometry is chosen so
//! that extraction recovers the generated truth exactly: room areas,
//! centroids, door centers, and orientations are all computed from the
//! rectangles, never from the raster.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{
    rank_order, Door, FloorPlanIr, Orientation, Room, RuleViolation, ViolationSite,
};
use crate::raster::{ColorClass, PixelGrid};
use crate::svg::{self, ElementKind, VectorElement, VectorPlan};

/// Inset of the outer wall centerline from the canvas edge, leaving a white
/// margin around the plan.
const ROOT_MARGIN: u32 = 5;
/// Minimum centerline side length a split may leave on either child.
const MIN_SIDE: u32 = 90;
/// Clearance between a door (or punched gap) and the nearest wall junction.
const JUNCTION_MARGIN: u32 = 6;
/// Extra clearance between a punched gap and a door on the same wall.
const GAP_DOOR_CLEARANCE: u32 = 2;
/// Partition attempts before a config is declared unsatisfiable.
const MAX_ATTEMPTS: u32 = 100;

/// Knobs for the generator. `seed` drives all randomness; everything else
/// shapes the geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    /// Inclusive room-count range to draw from.
    pub room_range: (u32, u32),
    /// Canvas size in pixels (width, height).
    pub canvas: (u32, u32),
    /// Wall stroke width; must be odd so strokes center on the grid.
    pub wall_width: u32,
    /// Door length along its wall, in pixels.
    pub door_length: u32,
    /// Side length of the square room marker.
    pub dot_size: u32,
    /// Probability of a door on each adjacent pair beyond the spanning tree.
    pub extra_door_prob: f64,
    /// Minimum pairwise relative area difference between rooms.
    pub min_area_margin: f64,
    /// RNG seed; same config + seed reproduces the plan bit for bit.
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            room_range: (3, 6),
            canvas: (1000, 1000),
            wall_width: 3,
            door_length: 24,
            dot_size: 10,
            extra_door_prob: 0.25,
            min_area_margin: 0.02,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        let err = |msg: String| Err(SynthError::Config(msg));
        if self.room_range.0 < 1 {
            return err("room range minimum must be at least 1".into());
        }
        if self.room_range.0 > self.room_range.1 {
            return err(format!(
                "room range minimum {} exceeds maximum {}",
                self.room_range.0, self.room_range.1
            ));
        }
        if self.wall_width.is_multiple_of(2) || !(1..=5).contains(&self.wall_width) {
            return err(format!(
                "wall width must be odd and between 1 and 5, got {}",
                self.wall_width
            ));
        }
        if self.door_length <= self.wall_width {
            return err(format!(
                "door length {} must exceed wall width {}",
                self.door_length, self.wall_width
            ));
        }
        if !(8..=14).contains(&self.dot_size) {
            return err(format!(
                "dot size must be between 8 and 14, got {}",
                self.dot_size
            ));
        }
        if !(0.0..=1.0).contains(&self.extra_door_prob) {
            return err(format!(
                "extra-door probability must be in [0, 1], got {}",
                self.extra_door_prob
            ));
        }
        if !(self.min_area_margin > 0.0 && self.min_area_margin < 1.0) {
            return err(format!(
                "area margin must be in (0, 1), got {}",
                self.min_area_margin
            ));
        }
        if self.canvas.0 < 40 || self.canvas.1 < 40 {
            return err(format!(
                "canvas must be at least 40x40, got {}x{}",
                self.canvas.0, self.canvas.1
            ));
        }
        Ok(())
    }

    fn half_wall(&self) -> u32 {
        self.wall_width / 2
    }

    /// Minimum centerline overlap two rooms need before they count as
    /// adjacent: enough for a door plus junction margins.
    fn min_overlap(&self) -> u32 {
        (self.door_length + 2 * JUNCTION_MARGIN).max(40)
    }
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("no rule-compliant plan found after {attempts} attempts")]
    Unsatisfiable { attempts: u32 },
    #[error("{op} is not applicable here: {reason}")]
    Inapplicable { op: &'static str, reason: String },
}

/// Wall-centerline rectangle of one room; all four coordinates are
/// centerlines, so adjacent rooms share an edge coordinate exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoomRect {
    pub x0: u32,
    pub y0: u32,
    pub x1: u32,
    pub y1: u32,
}

impl RoomRect {
    fn span_x(&self) -> u32 {
        self.x1 - self.x0
    }

    fn span_y(&self) -> u32 {
        self.y1 - self.y0
    }

    /// Interior pixel count between the walls.
    pub fn interior_area(&self, wall_width: u32) -> u64 {
        (self.span_x() - wall_width) as u64 * (self.span_y() - wall_width) as u64
    }

    /// Round-half-up mean of the interior pixel coordinates.
    pub fn interior_centroid(&self) -> (u32, u32) {
        ((self.x0 + self.x1 + 1) >> 1, (self.y0 + self.y1 + 1) >> 1)
    }
}

/// A door painted over the shared wall of two rooms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlacedDoor {
    /// Indices into the plan's room list, stored low-first.
    pub rooms: (usize, usize),
    /// Vertical doors sit on vertical walls (separating left/right rooms).
    pub orientation: Orientation,
    /// Centerline coordinate of the wall (x for vertical, y for horizontal).
    pub wall: u32,
    /// Door-center coordinate along the wall.
    pub along: u32,
}

impl PlacedDoor {
    pub fn center(&self) -> (u32, u32) {
        match self.orientation {
            Orientation::Vertical => (self.wall, self.along),
            Orientation::Horizontal => (self.along, self.wall),
        }
    }
}

/// A generated plan: geometry, analytic truth, and the rendered raster.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthPlan {
    pub config: SynthConfig,
    pub rooms: Vec<RoomRect>,
    pub doors: Vec<PlacedDoor>,
    /// Marker centers, indexed like `rooms`.
    pub dots: Vec<(u32, u32)>,
    pub truth: FloorPlanIr,
    pub raster: PixelGrid,
}

/// Raster-damaging and truth-damaging edits for sensitivity tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbOp {
    /// Drop one door; with `keep_connected` only doors whose removal leaves
    /// the room graph connected qualify.
    RemoveDoor { keep_connected: bool },
    /// Add a door on an adjacent room pair that has none.
    AddDoor,
    /// Swap two size-rank ids in the truth, leaving the raster untouched.
    SwapRanks,
    /// Punch a 1-pixel white slit through a shared wall (breaks rule 7).
    PunchGap,
    /// Erase one room marker (breaks rule 6).
    DeleteDot,
    /// Paint a 2x2 off-palette speck in the outer margin (breaks rule 8).
    OffPaletteSpeck,
}

/// Shared wall segment between two adjacent rooms.
#[derive(Debug, Clone, Copy)]
struct SharedWall {
    orientation: Orientation,
    /// The common centerline coordinate.
    wall: u32,
    /// Overlap interval along the wall, in centerline coordinates.
    lo: u32,
    hi: u32,
}

/// Generates a plan for the config, retrying the partition until the area
/// margin, adjacency, and connectivity constraints all hold.
pub fn generate(config: &SynthConfig) -> Result<SynthPlan, SynthError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for _ in 0..MAX_ATTEMPTS {
        let k = rng.random_range(config.room_range.0..=config.room_range.1);
        let Some(rooms) = try_partition(&mut rng, config, k) else {
            continue;
        };
        if !margins_ok(&rooms, config) {
            continue;
        }
        let adj = adjacency(&rooms, config.min_overlap());
        let pairs: BTreeSet<(usize, usize)> = adj.keys().copied().collect();
        if !connected(rooms.len(), &pairs) {
            continue;
        }
        let tree = uniform_spanning_tree(&mut rng, rooms.len(), &pairs);
        let mut doors = Vec::new();
        let mut feasible = true;
        for (&(i, j), wall) in &adj {
            // Short-circuit keeps the RNG stream independent of tree pairs.
            let wanted = tree.contains(&(i, j)) || rng.random_bool(config.extra_door_prob);
            if !wanted {
                continue;
            }
            let Some((lo, hi)) = door_center_range(config, wall) else {
                feasible = false;
                break;
            };
            doors.push(PlacedDoor {
                rooms: (i, j),
                orientation: wall.orientation,
                wall: wall.wall,
                along: rng.random_range(lo..=hi),
            });
        }
        if !feasible {
            continue;
        }
        let dots = place_dots(&mut rng, &rooms, config);
        return Ok(assemble(*config, rooms, doors, dots));
    }
    Err(SynthError::Unsatisfiable {
        attempts: MAX_ATTEMPTS,
    })
}

/// Applies one perturbation, returning a new plan. Graph edits (doors)
/// rebuild truth and raster together; raster-only edits attach the rule
/// violation they introduce to the truth as a marker.
pub fn perturb(plan: &SynthPlan, op: PerturbOp, seed: u64) -> Result<SynthPlan, SynthError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match op {
        PerturbOp::RemoveDoor { keep_connected } => remove_door(plan, keep_connected, &mut rng),
        PerturbOp::AddDoor => add_door(plan, &mut rng),
        PerturbOp::SwapRanks => swap_ranks(plan, &mut rng),
        PerturbOp::PunchGap => punch_gap(plan, &mut rng),
        PerturbOp::DeleteDot => delete_dot(plan, &mut rng),
        PerturbOp::OffPaletteSpeck => off_palette_speck(plan),
    }
}

/// Serializes the plan's geometry as a minimal SVG document that parses and
/// rasterizes back to exactly `plan.raster`.
pub fn render_to_svg(plan: &SynthPlan) -> String {
    let (w, h) = plan.config.canvas;
    let ww = plan.config.wall_width;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(
        out,
        r##"  <rect x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>"##
    );
    for (x1, y1, x2, y2) in wall_segments(&plan.rooms) {
        let _ = writeln!(
            out,
            r##"  <line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="#000000" stroke-width="{ww}"/>"##
        );
    }
    for door in &plan.doors {
        let (x1, y1, x2, y2) = door_segment(&plan.config, door);
        let _ = writeln!(
            out,
            r##"  <line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="#00ff00" stroke-width="{ww}"/>"##
        );
    }
    let r = plan.config.dot_size as f64 / 2.0;
    for &(cx, cy) in &plan.dots {
        let _ = writeln!(
            out,
            r##"  <circle cx="{cx}" cy="{cy}" r="{r}" fill="#ff0000"/>"##
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Generates a plan that ignores any target apartment and returns its IR —
/// the "guess without looking" baseline.
pub fn random_baseline(config: &SynthConfig, seed: u64) -> Result<FloorPlanIr, SynthError> {
    let cfg = SynthConfig { seed, ..*config };
    Ok(generate(&cfg)?.truth)
}

fn assemble(
    config: SynthConfig,
    rooms: Vec<RoomRect>,
    doors: Vec<PlacedDoor>,
    dots: Vec<(u32, u32)>,
) -> SynthPlan {
    let truth = build_truth(&config, &rooms, &doors);
    let vector = vector_plan(&config, &rooms, &doors, &dots);
    let raster = svg::rasterize(&vector, config.canvas.0, config.canvas.1);
    SynthPlan {
        config,
        rooms,
        doors,
        dots,
        truth,
        raster,
    }
}

/// Splits the root rectangle into `k` rooms by random binary partitioning.
/// Returns `None` when no leaf can be split further.
fn try_partition(rng: &mut ChaCha8Rng, config: &SynthConfig, k: u32) -> Option<Vec<RoomRect>> {
    let root = RoomRect {
        x0: ROOT_MARGIN,
        y0: ROOT_MARGIN,
        x1: config.canvas.0 - ROOT_MARGIN - 1,
        y1: config.canvas.1 - ROOT_MARGIN - 1,
    };
    let mut leaves = vec![root];
    while (leaves.len() as u32) < k {
        let splittable: Vec<usize> = leaves
            .iter()
            .enumerate()
            .filter(|(_, r)| r.span_x() >= 2 * MIN_SIDE || r.span_y() >= 2 * MIN_SIDE)
            .map(|(i, _)| i)
            .collect();
        if splittable.is_empty() {
            return None;
        }
        let pick = splittable[rng.random_range(0..splittable.len())];
        let r = leaves[pick];
        let can_x = r.span_x() >= 2 * MIN_SIDE;
        let can_y = r.span_y() >= 2 * MIN_SIDE;
        // Split across the longer side; ties prefer a vertical wall.
        let vertical = match (can_x, can_y) {
            (true, true) => r.span_x() >= r.span_y(),
            (only_x, _) => only_x,
        };
        let (a, b) = if vertical {
            let s = rng.random_range(r.x0 + MIN_SIDE..=r.x1 - MIN_SIDE);
            (RoomRect { x1: s, ..r }, RoomRect { x0: s, ..r })
        } else {
            let s = rng.random_range(r.y0 + MIN_SIDE..=r.y1 - MIN_SIDE);
            (RoomRect { y1: s, ..r }, RoomRect { y0: s, ..r })
        };
        leaves[pick] = a;
        leaves.push(b);
    }
    Some(leaves)
}

fn margins_ok(rooms: &[RoomRect], config: &SynthConfig) -> bool {
    let areas: Vec<u64> = rooms
        .iter()
        .map(|r| r.interior_area(config.wall_width))
        .collect();
    for i in 0..areas.len() {
        for j in (i + 1)..areas.len() {
            let hi = areas[i].max(areas[j]);
            let lo = areas[i].min(areas[j]);
            if ((hi - lo) as f64) < config.min_area_margin * hi as f64 {
                return false;
            }
        }
    }
    true
}

fn shared_wall(a: &RoomRect, b: &RoomRect, min_overlap: u32) -> Option<SharedWall> {
    if a.x1 == b.x0 || b.x1 == a.x0 {
        let wall = if a.x1 == b.x0 { a.x1 } else { b.x1 };
        let lo = a.y0.max(b.y0);
        let hi = a.y1.min(b.y1);
        if hi > lo && hi - lo >= min_overlap {
            return Some(SharedWall {
                orientation: Orientation::Vertical,
                wall,
                lo,
                hi,
            });
        }
    }
    if a.y1 == b.y0 || b.y1 == a.y0 {
        let wall = if a.y1 == b.y0 { a.y1 } else { b.y1 };
        let lo = a.x0.max(b.x0);
        let hi = a.x1.min(b.x1);
        if hi > lo && hi - lo >= min_overlap {
            return Some(SharedWall {
                orientation: Orientation::Horizontal,
                wall,
                lo,
                hi,
            });
        }
    }
    None
}

fn adjacency(rooms: &[RoomRect], min_overlap: u32) -> BTreeMap<(usize, usize), SharedWall> {
    let mut adj = BTreeMap::new();
    for i in 0..rooms.len() {
        for j in (i + 1)..rooms.len() {
            if let Some(wall) = shared_wall(&rooms[i], &rooms[j], min_overlap) {
                adj.insert((i, j), wall);
            }
        }
    }
    adj
}

fn connected(n: usize, edges: &BTreeSet<(usize, usize)>) -> bool {
    if n <= 1 {
        return true;
    }
    let mut neighbors = vec![Vec::new(); n];
    for &(a, b) in edges {
        neighbors[a].push(b);
        neighbors[b].push(a);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &w in &neighbors[v] {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    count == n
}

/// Wilson's algorithm: loop-erased random walks yield a uniformly random
/// spanning tree of the adjacency graph.
fn uniform_spanning_tree(
    rng: &mut ChaCha8Rng,
    n: usize,
    pairs: &BTreeSet<(usize, usize)>,
) -> BTreeSet<(usize, usize)> {
    let mut edges = BTreeSet::new();
    if n <= 1 {
        return edges;
    }
    let mut neighbors = vec![Vec::new(); n];
    for &(a, b) in pairs {
        neighbors[a].push(b);
        neighbors[b].push(a);
    }
    for list in &mut neighbors {
        list.sort_unstable();
    }
    let mut in_tree = vec![false; n];
    let mut next = vec![usize::MAX; n];
    in_tree[0] = true;
    for start in 1..n {
        let mut cur = start;
        while !in_tree[cur] {
            let list = &neighbors[cur];
            next[cur] = list[rng.random_range(0..list.len())];
            cur = next[cur];
        }
        cur = start;
        while !in_tree[cur] {
            in_tree[cur] = true;
            let to = next[cur];
            edges.insert((cur.min(to), cur.max(to)));
            cur = to;
        }
    }
    edges
}

/// Inclusive range of valid door centers along a shared wall, or `None`
/// when the overlap is too short for a door plus margins.
fn door_center_range(config: &SynthConfig, wall: &SharedWall) -> Option<(u32, u32)> {
    let half_lo = config.door_length / 2;
    let half_hi = config.door_length - 1 - half_lo;
    let lo = wall.lo + JUNCTION_MARGIN + half_lo;
    let hi = wall.hi as i64 - JUNCTION_MARGIN as i64 - half_hi as i64;
    if hi < lo as i64 {
        return None;
    }
    Some((lo, hi as u32))
}

fn place_dots(
    rng: &mut ChaCha8Rng,
    rooms: &[RoomRect],
    config: &SynthConfig,
) -> Vec<(u32, u32)> {
    let hw = config.half_wall();
    let half_lo = config.dot_size / 2;
    let half_hi = config.dot_size - 1 - half_lo;
    rooms
        .iter()
        .map(|r| {
            // Keep two white pixels between the marker and any wall.
            let cx = rng.random_range(r.x0 + hw + 3 + half_lo..=r.x1 - hw - 3 - half_hi);
            let cy = rng.random_range(r.y0 + hw + 3 + half_lo..=r.y1 - hw - 3 - half_hi);
            (cx, cy)
        })
        .collect()
}

fn build_truth(config: &SynthConfig, rooms: &[RoomRect], doors: &[PlacedDoor]) -> FloorPlanIr {
    let stats: Vec<(u64, (u32, u32))> = rooms
        .iter()
        .map(|r| (r.interior_area(config.wall_width), r.interior_centroid()))
        .collect();
    let ranks = rank_order(&stats);
    let mut ir = FloorPlanIr::empty();
    ir.rooms = rooms
        .iter()
        .enumerate()
        .map(|(i, _)| Room {
            id: ranks[i],
            area: stats[i].0,
            centroid: stats[i].1,
        })
        .collect();
    let mut edges = BTreeSet::new();
    ir.doors = doors
        .iter()
        .map(|d| {
            let (i, j) = d.rooms;
            let pair = (ranks[i].min(ranks[j]), ranks[i].max(ranks[j]));
            edges.insert(pair);
            Door {
                center: d.center(),
                orientation: d.orientation,
                rooms: vec![pair.0, pair.1],
            }
        })
        .collect();
    ir.edges = edges.into_iter().collect();
    ir.canonicalize();
    ir
}

/// Deduplicated wall centerline segments, sorted for determinism.
fn wall_segments(rooms: &[RoomRect]) -> BTreeSet<(u32, u32, u32, u32)> {
    let mut walls = BTreeSet::new();
    for r in rooms {
        walls.insert((r.x0, r.y0, r.x1, r.y0));
        walls.insert((r.x0, r.y1, r.x1, r.y1));
        walls.insert((r.x0, r.y0, r.x0, r.y1));
        walls.insert((r.x1, r.y0, r.x1, r.y1));
    }
    walls
}

/// Endpoints of the green stroke for a door. The stroke covers exactly
/// `door_length` pixels along the wall and the wall's width across it.
fn door_segment(config: &SynthConfig, door: &PlacedDoor) -> (u32, u32, u32, u32) {
    let half_lo = config.door_length / 2;
    let half_hi = config.door_length - 1 - half_lo;
    match door.orientation {
        Orientation::Vertical => (
            door.wall,
            door.along - half_lo,
            door.wall,
            door.along + half_hi,
        ),
        Orientation::Horizontal => (
            door.along - half_lo,
            door.wall,
            door.along + half_hi,
            door.wall,
        ),
    }
}

fn vector_plan(
    config: &SynthConfig,
    rooms: &[RoomRect],
    doors: &[PlacedDoor],
    dots: &[(u32, u32)],
) -> VectorPlan {
    let mut plan = VectorPlan::empty(config.canvas.0, config.canvas.1);
    let ww = config.wall_width as f64;
    for (x1, y1, x2, y2) in wall_segments(rooms) {
        plan.elements.push(VectorElement {
            kind: ElementKind::Segment {
                x1: x1 as f64,
                y1: y1 as f64,
                x2: x2 as f64,
                y2: y2 as f64,
            },
            color: ColorClass::Black,
            stroke_width: ww,
        });
    }
    for door in doors {
        let (x1, y1, x2, y2) = door_segment(config, door);
        plan.elements.push(VectorElement {
            kind: ElementKind::Segment {
                x1: x1 as f64,
                y1: y1 as f64,
                x2: x2 as f64,
                y2: y2 as f64,
            },
            color: ColorClass::Green,
            stroke_width: ww,
        });
    }
    for &(cx, cy) in dots {
        plan.elements.push(VectorElement {
            kind: ElementKind::Dot {
                cx: cx as f64,
                cy: cy as f64,
                diameter: config.dot_size as f64,
            },
            color: ColorClass::Red,
            stroke_width: 1.0,
        });
    }
    plan
}

fn remove_door(
    plan: &SynthPlan,
    keep_connected: bool,
    rng: &mut ChaCha8Rng,
) -> Result<SynthPlan, SynthError> {
    let n = plan.rooms.len();
    let applicable: Vec<usize> = (0..plan.doors.len())
        .filter(|&skip| {
            if !keep_connected {
                return true;
            }
            let edges: BTreeSet<(usize, usize)> = plan
                .doors
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, d)| d.rooms)
                .collect();
            connected(n, &edges)
        })
        .collect();
    if applicable.is_empty() {
        return Err(SynthError::Inapplicable {
            op: "RemoveDoor",
            reason: if plan.doors.is_empty() {
                "the plan has no doors".into()
            } else {
                "every door is a bridge and connectivity must be kept".into()
            },
        });
    }
    let victim = applicable[rng.random_range(0..applicable.len())];
    let mut doors = plan.doors.clone();
    doors.remove(victim);
    Ok(assemble(
        plan.config,
        plan.rooms.clone(),
        doors,
        plan.dots.clone(),
    ))
}

fn add_door(plan: &SynthPlan, rng: &mut ChaCha8Rng) -> Result<SynthPlan, SynthError> {
    let adj = adjacency(&plan.rooms, plan.config.min_overlap());
    let have: BTreeSet<(usize, usize)> = plan.doors.iter().map(|d| d.rooms).collect();
    let open: Vec<((usize, usize), SharedWall)> = adj
        .iter()
        .filter(|(pair, wall)| {
            !have.contains(pair) && door_center_range(&plan.config, wall).is_some()
        })
        .map(|(&pair, &wall)| (pair, wall))
        .collect();
    if open.is_empty() {
        return Err(SynthError::Inapplicable {
            op: "AddDoor",
            reason: "every adjacent room pair already has a door".into(),
        });
    }
    let (pair, wall) = open[rng.random_range(0..open.len())];
    let (lo, hi) = door_center_range(&plan.config, &wall).expect("filtered above");
    let mut doors = plan.doors.clone();
    doors.push(PlacedDoor {
        rooms: pair,
        orientation: wall.orientation,
        wall: wall.wall,
        along: rng.random_range(lo..=hi),
    });
    Ok(assemble(
        plan.config,
        plan.rooms.clone(),
        doors,
        plan.dots.clone(),
    ))
}

fn swap_ranks(plan: &SynthPlan, rng: &mut ChaCha8Rng) -> Result<SynthPlan, SynthError> {
    let n = plan.truth.room_count() as u32;
    if n < 2 {
        return Err(SynthError::Inapplicable {
            op: "SwapRanks",
            reason: "at least two rooms are needed".into(),
        });
    }
    let a = rng.random_range(1..=n);
    let mut b = rng.random_range(1..=n - 1);
    if b >= a {
        b += 1;
    }
    let swap = |id: u32| {
        if id == a {
            b
        } else if id == b {
            a
        } else {
            id
        }
    };
    let mut truth = plan.truth.clone();
    for room in &mut truth.rooms {
        room.id = swap(room.id);
    }
    for door in &mut truth.doors {
        for id in &mut door.rooms {
            *id = swap(*id);
        }
        door.rooms.sort_unstable();
    }
    truth.edges = truth
        .edges
        .iter()
        .map(|&(x, y)| {
            let (x, y) = (swap(x), swap(y));
            (x.min(y), x.max(y))
        })
        .collect();
    truth.canonicalize();
    Ok(SynthPlan {
        truth,
        ..plan.clone()
    })
}

fn punch_gap(plan: &SynthPlan, rng: &mut ChaCha8Rng) -> Result<SynthPlan, SynthError> {
    let adj = adjacency(&plan.rooms, plan.config.min_overlap());
    let half_lo = plan.config.door_length / 2;
    let half_hi = plan.config.door_length - 1 - half_lo;
    let mut options: Vec<(SharedWall, Vec<u32>)> = Vec::new();
    for wall in adj.values() {
        let mut slots: Vec<u32> = (wall.lo + JUNCTION_MARGIN..=wall.hi - JUNCTION_MARGIN).collect();
        for door in &plan.doors {
            if door.orientation == wall.orientation && door.wall == wall.wall {
                let lo = door.along.saturating_sub(half_lo + GAP_DOOR_CLEARANCE);
                let hi = door.along + half_hi + GAP_DOOR_CLEARANCE;
                slots.retain(|&g| g < lo || g > hi);
            }
        }
        if !slots.is_empty() {
            options.push((*wall, slots));
        }
    }
    if options.is_empty() {
        return Err(SynthError::Inapplicable {
            op: "PunchGap",
            reason: "no shared wall has room for a gap".into(),
        });
    }
    let (wall, slots) = &options[rng.random_range(0..options.len())];
    let g = slots[rng.random_range(0..slots.len())];
    let hw = plan.config.half_wall();
    let mut raster = plan.raster.clone();
    let site = match wall.orientation {
        Orientation::Vertical => {
            for x in wall.wall - hw..=wall.wall + hw {
                raster.set(x, g, ColorClass::White);
            }
            (wall.wall, g)
        }
        Orientation::Horizontal => {
            for y in wall.wall - hw..=wall.wall + hw {
                raster.set(g, y, ColorClass::White);
            }
            (g, wall.wall)
        }
    };
    let mut truth = plan.truth.clone();
    truth.violations.push(RuleViolation {
        rule: 7,
        description: "a wall gap joins two marked regions".into(),
        location: Some(ViolationSite::Pixel(site)),
    });
    truth.canonicalize();
    Ok(SynthPlan {
        raster,
        truth,
        ..plan.clone()
    })
}

fn delete_dot(plan: &SynthPlan, rng: &mut ChaCha8Rng) -> Result<SynthPlan, SynthError> {
    if plan.dots.is_empty() {
        return Err(SynthError::Inapplicable {
            op: "DeleteDot",
            reason: "the plan has no room markers".into(),
        });
    }
    let i = rng.random_range(0..plan.dots.len());
    let (cx, cy) = plan.dots[i];
    let half_lo = plan.config.dot_size / 2;
    let half_hi = plan.config.dot_size - 1 - half_lo;
    let mut raster = plan.raster.clone();
    for y in cy - half_lo..=cy + half_hi {
        for x in cx - half_lo..=cx + half_hi {
            raster.set(x, y, ColorClass::White);
        }
    }
    let mut truth = plan.truth.clone();
    truth.violations.push(RuleViolation {
        rule: 6,
        description: "an enclosed region lost its room marker".into(),
        location: Some(ViolationSite::Region(plan.rooms[i].interior_centroid())),
    });
    truth.canonicalize();
    Ok(SynthPlan {
        raster,
        truth,
        ..plan.clone()
    })
}

fn off_palette_speck(plan: &SynthPlan) -> Result<SynthPlan, SynthError> {
    // The outer margin is always white, so a fixed corner position works.
    let mut raster = plan.raster.clone();
    for y in 1..=2 {
        for x in 1..=2 {
            raster.set(x, y, ColorClass::Other);
        }
    }
    let mut truth = plan.truth.clone();
    truth.violations.push(RuleViolation {
        rule: 8,
        description: "off-palette pixels in the margin".into(),
        location: Some(ViolationSite::Pixel((1, 1))),
    });
    truth.canonicalize();
    Ok(SynthPlan {
        raster,
        truth,
        ..plan.clone()
    })
}
