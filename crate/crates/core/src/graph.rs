//! Room-connectivity interchange representation and graph views.
//!
//! Extraction produces a [`FloorPlanIr`]; scoring consumes two of them.
//! The JSON form (`ir_version` 1) is the stable contract between the two,
//! so plans extracted by one build can be scored by another, or produced
//! by external tooling. Everything is kept in a canonical order so equal
//! plans serialize to identical bytes.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Interchange format version this build reads and writes.
pub const IR_VERSION: u32 = 1;

/// One detected room region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Room {
    /// Size rank: 1 is the largest room, ids are contiguous 1..=n.
    pub id: u32,
    /// Pixel count of the region.
    pub area: u64,
    /// Region centroid `(x, y)`, mean pixel coordinate rounded half-up.
    pub centroid: (u32, u32),
}

/// Long-axis orientation of a door stripe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Orientation::Horizontal => write!(f, "horizontal"),
            Orientation::Vertical => write!(f, "vertical"),
        }
    }
}

/// One detected door.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Door {
    /// Blob centroid `(x, y)`, rounded half-up.
    pub center: (u32, u32),
    pub orientation: Orientation,
    /// Ids of the rooms the door touches, sorted ascending. Fewer than
    /// two means the door is dangling and contributes no edge; more than
    /// two is anomalous and contributes an edge per pair.
    pub rooms: Vec<u32>,
}

/// Where a format-rule violation was observed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ViolationSite {
    /// A single pixel `(x, y)`.
    Pixel((u32, u32)),
    /// A region identified by its representative pixel `(x, y)`.
    Region((u32, u32)),
}

/// Advisory diagnostic: the drawing breaks a format rule. Violations
/// never block scoring; they are carried alongside the plan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleViolation {
    /// Format rule number (1..=9).
    pub rule: u8,
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location: Option<ViolationSite>,
}

impl fmt::Display for RuleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule {}: {}", self.rule, self.description)?;
        match self.location {
            Some(ViolationSite::Pixel((x, y))) => write!(f, " (at pixel {x},{y})"),
            Some(ViolationSite::Region((x, y))) => write!(f, " (region near {x},{y})"),
            None => Ok(()),
        }
    }
}

/// Extracted structure of one floor plan: rooms ranked by size, doors,
/// and the room-adjacency edges the doors induce.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FloorPlanIr {
    pub ir_version: u32,
    pub rooms: Vec<Room>,
    pub doors: Vec<Door>,
    /// Unordered room-id pairs, stored `(lo, hi)` with `lo < hi`.
    pub edges: Vec<(u32, u32)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<RuleViolation>,
}

/// Reasons an interchange document is rejected on load.
#[derive(Debug, Error)]
pub enum IrError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported ir_version {found} (this build reads version {IR_VERSION})")]
    Version { found: u32 },
    #[error("room ids must be contiguous 1..=n: {detail}")]
    RoomIds { detail: String },
    #[error("edge ({a},{b}) references a room id that does not exist")]
    EdgeEndpoint { a: u32, b: u32 },
    #[error("edge ({id},{id}) is a self-loop")]
    SelfLoop { id: u32 },
    #[error("door at ({x},{y}) references unknown room id {id}")]
    DoorRoomRef { x: u32, y: u32, id: u32 },
}

impl FloorPlanIr {
    /// An empty plan (no rooms, doors, or edges).
    pub fn empty() -> Self {
        FloorPlanIr {
            ir_version: IR_VERSION,
            rooms: Vec::new(),
            doors: Vec::new(),
            edges: Vec::new(),
            violations: Vec::new(),
        }
    }

    pub fn room_count(&self) -> usize {
        self.rooms.len()
    }

    pub fn door_count(&self) -> usize {
        self.doors.len()
    }

    /// Sort rooms by id, doors by (center y, center x, orientation),
    /// normalize edges to `(lo, hi)`, sort and dedup them, and drop
    /// degenerate self-loops. Producers call this before handing a plan
    /// out; consumers may rely on the ordering.
    pub fn canonicalize(&mut self) {
        self.rooms.sort_by_key(|r| r.id);
        for door in &mut self.doors {
            door.rooms.sort_unstable();
            door.rooms.dedup();
        }
        self.doors
            .sort_by_key(|d| (d.center.1, d.center.0, d.orientation));
        let edges: BTreeSet<(u32, u32)> = self
            .edges
            .iter()
            .filter(|(a, b)| a != b)
            .map(|&(a, b)| (a.min(b), a.max(b)))
            .collect();
        self.edges = edges.into_iter().collect();
        self.violations
            .sort_by(|a, b| (a.rule, a.location, &a.description).cmp(&(b.rule, b.location, &b.description)));
    }

    /// Serialize to the versioned JSON interchange form.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serialization cannot fail")
    }

    /// Parse and validate an interchange document, normalizing field
    /// order. Duplicate edges are deduplicated quietly; structural
    /// problems (bad version, id gaps, dangling references, self-loops)
    /// are hard errors.
    pub fn from_json(text: &str) -> Result<Self, IrError> {
        let mut ir: FloorPlanIr = serde_json::from_str(text)?;
        if ir.ir_version != IR_VERSION {
            return Err(IrError::Version {
                found: ir.ir_version,
            });
        }
        let n = ir.rooms.len() as u32;
        let mut seen = vec![false; ir.rooms.len()];
        for room in &ir.rooms {
            if room.id == 0 || room.id > n {
                return Err(IrError::RoomIds {
                    detail: format!("id {} outside 1..={n}", room.id),
                });
            }
            let slot = &mut seen[(room.id - 1) as usize];
            if *slot {
                return Err(IrError::RoomIds {
                    detail: format!("id {} appears twice", room.id),
                });
            }
            *slot = true;
        }
        for &(a, b) in &ir.edges {
            if a == b {
                return Err(IrError::SelfLoop { id: a });
            }
            if a == 0 || a > n || b == 0 || b > n {
                return Err(IrError::EdgeEndpoint { a, b });
            }
        }
        for door in &ir.doors {
            for &id in &door.rooms {
                if id == 0 || id > n {
                    return Err(IrError::DoorRoomRef {
                        x: door.center.0,
                        y: door.center.1,
                        id,
                    });
                }
            }
        }
        ir.canonicalize();
        Ok(ir)
    }
}

/// Assign size-rank ids to regions: 1 for the largest area, descending;
/// area ties break by centroid in row-major order (smaller y, then
/// smaller x). Returns ids aligned with the input slice.
pub fn rank_order(regions: &[(u64, (u32, u32))]) -> Vec<u32> {
    let mut order: Vec<usize> = (0..regions.len()).collect();
    order.sort_by(|&i, &j| {
        let (area_i, (cx_i, cy_i)) = regions[i];
        let (area_j, (cx_j, cy_j)) = regions[j];
        area_j
            .cmp(&area_i)
            .then(cy_i.cmp(&cy_j))
            .then(cx_i.cmp(&cx_j))
    });
    let mut ids = vec![0u32; regions.len()];
    for (rank, &index) in order.iter().enumerate() {
        ids[index] = rank as u32 + 1;
    }
    ids
}

/// Simple undirected graph over room ids, for scoring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoomGraph {
    node_count: u32,
    edges: BTreeSet<(u32, u32)>,
}

impl RoomGraph {
    pub fn from_ir(ir: &FloorPlanIr) -> Self {
        let edges = ir
            .edges
            .iter()
            .filter(|(a, b)| a != b)
            .map(|&(a, b)| (a.min(b), a.max(b)))
            .collect();
        RoomGraph {
            node_count: ir.rooms.len() as u32,
            edges,
        }
    }

    pub fn node_count(&self) -> u32 {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    /// Degree of each room in id order (index 0 = room 1).
    pub fn degree_sequence(&self) -> Vec<u32> {
        let mut degrees = vec![0u32; self.node_count as usize];
        for &(a, b) in &self.edges {
            degrees[(a - 1) as usize] += 1;
            degrees[(b - 1) as usize] += 1;
        }
        degrees
    }

    /// Fraction of possible edges present: `|E| / C(n,2)`, or 0 when
    /// fewer than two rooms exist.
    pub fn density(&self) -> f64 {
        if self.node_count < 2 {
            return 0.0;
        }
        let possible = self.node_count as f64 * (self.node_count as f64 - 1.0) / 2.0;
        self.edges.len() as f64 / possible
    }

    /// True if every room is reachable from every other (vacuously true
    /// for 0 or 1 rooms).
    pub fn is_connected(&self) -> bool {
        let n = self.node_count as usize;
        if n <= 1 {
            return true;
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in &self.edges {
            adjacency[(a - 1) as usize].push(b - 1);
            adjacency[(b - 1) as usize].push(a - 1);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0u32];
        seen[0] = true;
        let mut visited = 1;
        while let Some(v) = stack.pop() {
            for &w in &adjacency[v as usize] {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    visited += 1;
                    stack.push(w);
                }
            }
        }
        visited == n
    }
}
