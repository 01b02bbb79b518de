//! Structural extraction: classified raster -> rooms, doors, connectivity.
//!
//! The pipeline mirrors how the plans are drawn: red marker dots locate
//! rooms, flood fill from each dot recovers the room region (walls and
//! doors block traversal), and green stripes on walls become doors whose
//! neighboring regions define the connectivity edges.

use std::collections::BTreeSet;

use crate::graph::{rank_order, Door, FloorPlanIr, Orientation, Room, RuleViolation, ViolationSite};
use crate::raster::{ColorClass, PixelGrid};

/// Red components smaller than this are stray pixels, not room markers
/// (half the nominal 10x10 dot).
pub const BLOB_NOISE_FLOOR: u64 = 25;

/// How far a door probes outward, perpendicular to its long axis, to
/// find the rooms it connects. Walls are nominally 3 px thick, so 4
/// crosses residual slivers without jumping into a non-adjacent room.
pub const DOOR_PROBE_DEPTH: i64 = 4;

/// A connected component of same-class pixels (8-connectivity).
#[derive(Debug, Clone)]
pub(crate) struct Component {
    pub pixels: Vec<(u32, u32)>,
    pub area: u64,
    /// Centroid rounded half-up.
    pub center: (u32, u32),
    /// (min_x, min_y, max_x, max_y)
    pub bbox: (u32, u32, u32, u32),
}

/// floor(sum/count + 1/2) in exact integer arithmetic.
pub(crate) fn round_half_up_mean(sum: u64, count: u64) -> u32 {
    debug_assert!(count > 0);
    ((2 * sum + count) / (2 * count)) as u32
}

/// 8-connected components of pixels of one class, in row-major discovery
/// order.
pub(crate) fn class_components(grid: &PixelGrid, class: ColorClass) -> Vec<Component> {
    let width = grid.width();
    let height = grid.height();
    let mut seen = vec![false; (width as usize) * (height as usize)];
    let mut components = Vec::new();
    let index = |x: u32, y: u32| (y as usize) * (width as usize) + x as usize;

    for y in 0..height {
        for x in 0..width {
            if seen[index(x, y)] || grid.get(x, y) != class {
                continue;
            }
            let mut pixels = Vec::new();
            let mut stack = vec![(x, y)];
            seen[index(x, y)] = true;
            let (mut sum_x, mut sum_y) = (0u64, 0u64);
            let (mut min_x, mut min_y, mut max_x, mut max_y) = (x, y, x, y);
            while let Some((px, py)) = stack.pop() {
                pixels.push((px, py));
                sum_x += px as u64;
                sum_y += py as u64;
                min_x = min_x.min(px);
                min_y = min_y.min(py);
                max_x = max_x.max(px);
                max_y = max_y.max(py);
                for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        if dx == 0 && dy == 0 {
                            continue;
                        }
                        let nx = px as i64 + dx;
                        let ny = py as i64 + dy;
                        if !grid.contains(nx, ny) {
                            continue;
                        }
                        let (nx, ny) = (nx as u32, ny as u32);
                        if !seen[index(nx, ny)] && grid.get(nx, ny) == class {
                            seen[index(nx, ny)] = true;
                            stack.push((nx, ny));
                        }
                    }
                }
            }
            let area = pixels.len() as u64;
            components.push(Component {
                area,
                center: (round_half_up_mean(sum_x, area), round_half_up_mean(sum_y, area)),
                bbox: (min_x, min_y, max_x, max_y),
                pixels,
            });
        }
    }
    components
}

/// Red marker blobs that pass the noise floor, with their areas, sorted
/// row-major by center. The validator uses the areas; extraction uses
/// the centers.
pub(crate) fn red_blobs(grid: &PixelGrid) -> Vec<Component> {
    let mut blobs: Vec<Component> = class_components(grid, ColorClass::Red)
        .into_iter()
        .filter(|c| c.area >= BLOB_NOISE_FLOOR)
        .collect();
    blobs.sort_by_key(|c| (c.center.1, c.center.0));
    blobs
}

/// Centers of the red room-marker dots, row-major by center.
pub fn detect_red_blobs(grid: &PixelGrid) -> Vec<(u32, u32)> {
    red_blobs(grid).into_iter().map(|c| c.center).collect()
}

fn traversable(class: ColorClass) -> bool {
    !matches!(class, ColorClass::Black | ColorClass::Green)
}

/// Per-pixel region labeling produced by [`segment_rooms`].
#[derive(Debug, Clone)]
pub struct LabelMap {
    width: u32,
    height: u32,
    /// 0 = unlabeled; k > 0 = region index k-1.
    labels: Vec<u32>,
}

impl LabelMap {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Region index at a pixel, if flood fill from some dot reached it.
    pub fn label(&self, x: u32, y: u32) -> Option<u32> {
        debug_assert!(x < self.width && y < self.height);
        let v = self.labels[(y as usize) * (self.width as usize) + x as usize];
        (v != 0).then(|| v - 1)
    }
}

/// One room region grown from marker dots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoomRegion {
    /// Dot centers whose fills merged into this region. A compliant plan
    /// has exactly one; more means the rooms leak into each other.
    pub dots: Vec<(u32, u32)>,
    /// Pixel count, marker pixels included. Zero for a dot stranded on a
    /// wall pixel.
    pub area: u64,
    pub centroid: (u32, u32),
    /// True if the region reaches the grid border (unenclosed room).
    pub touches_border: bool,
}

/// Flood fill 4-connected from each dot over traversable pixels (anything
/// that is not a wall and not a door). Dots whose fills meet share one
/// region. A dot sitting on a non-traversable pixel yields an empty
/// region recording just that dot.
pub fn segment_rooms(grid: &PixelGrid, dots: &[(u32, u32)]) -> (LabelMap, Vec<RoomRegion>) {
    let width = grid.width();
    let height = grid.height();
    let mut labels = vec![0u32; (width as usize) * (height as usize)];
    let index = |x: u32, y: u32| (y as usize) * (width as usize) + x as usize;
    let mut regions: Vec<RoomRegion> = Vec::new();

    for &(dx, dy) in dots {
        assert!(dx < width && dy < height, "dot ({dx},{dy}) outside grid");
        if !traversable(grid.get(dx, dy)) {
            regions.push(RoomRegion {
                dots: vec![(dx, dy)],
                area: 0,
                centroid: (dx, dy),
                touches_border: false,
            });
            continue;
        }
        if labels[index(dx, dy)] != 0 {
            let existing = (labels[index(dx, dy)] - 1) as usize;
            regions[existing].dots.push((dx, dy));
            continue;
        }
        let label = regions.len() as u32 + 1;
        let mut stack = vec![(dx, dy)];
        labels[index(dx, dy)] = label;
        let (mut sum_x, mut sum_y, mut area) = (0u64, 0u64, 0u64);
        let mut touches_border = false;
        while let Some((px, py)) = stack.pop() {
            area += 1;
            sum_x += px as u64;
            sum_y += py as u64;
            if px == 0 || py == 0 || px == width - 1 || py == height - 1 {
                touches_border = true;
            }
            for (nx, ny) in [
                (px as i64 - 1, py as i64),
                (px as i64 + 1, py as i64),
                (px as i64, py as i64 - 1),
                (px as i64, py as i64 + 1),
            ] {
                if !grid.contains(nx, ny) {
                    continue;
                }
                let (nx, ny) = (nx as u32, ny as u32);
                if labels[index(nx, ny)] == 0 && traversable(grid.get(nx, ny)) {
                    labels[index(nx, ny)] = label;
                    stack.push((nx, ny));
                }
            }
        }
        regions.push(RoomRegion {
            dots: vec![(dx, dy)],
            area,
            centroid: (round_half_up_mean(sum_x, area), round_half_up_mean(sum_y, area)),
            touches_border,
        });
    }

    (
        LabelMap {
            width,
            height,
            labels,
        },
        regions,
    )
}

/// One detected door: a green component with the regions it touches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoorRecord {
    pub center: (u32, u32),
    pub orientation: Orientation,
    /// Distinct region indices found by perpendicular probing, sorted.
    /// Fewer than two = dangling door, no edge.
    pub incident: Vec<u32>,
}

/// Find doors: 8-connected green components. Orientation comes from the
/// bounding box (width >= height = Horizontal). Each green pixel probes
/// up to [`DOOR_PROBE_DEPTH`] pixels outward on both sides perpendicular
/// to the long axis; the probe passes through the door's own green body,
/// stops dead at a wall, and records the region of the first traversable
/// pixel it reaches.
pub fn detect_doors(grid: &PixelGrid, labels: &LabelMap) -> Vec<DoorRecord> {
    assert!(
        labels.width() == grid.width() && labels.height() == grid.height(),
        "label map does not match grid"
    );
    let mut doors = Vec::new();
    for component in class_components(grid, ColorClass::Green) {
        let (min_x, min_y, max_x, max_y) = component.bbox;
        let orientation = if max_x - min_x >= max_y - min_y {
            Orientation::Horizontal
        } else {
            Orientation::Vertical
        };
        let dirs: [(i64, i64); 2] = match orientation {
            Orientation::Horizontal => [(0, -1), (0, 1)],
            Orientation::Vertical => [(-1, 0), (1, 0)],
        };
        let mut incident = BTreeSet::new();
        for &(px, py) in &component.pixels {
            for (dx, dy) in dirs {
                for step in 1..=DOOR_PROBE_DEPTH {
                    let nx = px as i64 + dx * step;
                    let ny = py as i64 + dy * step;
                    if !grid.contains(nx, ny) {
                        break;
                    }
                    let (nx, ny) = (nx as u32, ny as u32);
                    match grid.get(nx, ny) {
                        ColorClass::Green => continue,
                        ColorClass::Black => break,
                        _ => {
                            if let Some(region) = labels.label(nx, ny) {
                                incident.insert(region);
                            }
                            break;
                        }
                    }
                }
            }
        }
        doors.push(DoorRecord {
            center: component.center,
            orientation,
            incident: incident.into_iter().collect(),
        });
    }
    doors
}

/// Full extraction: dots -> regions -> doors -> ranked interchange plan,
/// with advisory violations attached. Never fails; degenerate input
/// yields an empty plan.
pub fn extract(grid: &PixelGrid) -> FloorPlanIr {
    let dots = detect_red_blobs(grid);
    let (labels, regions) = segment_rooms(grid, &dots);
    let door_records = detect_doors(grid, &labels);

    let rank_input: Vec<(u64, (u32, u32))> =
        regions.iter().map(|r| (r.area, r.centroid)).collect();
    let ranks = rank_order(&rank_input);

    let rooms: Vec<Room> = regions
        .iter()
        .zip(&ranks)
        .map(|(region, &id)| Room {
            id,
            area: region.area,
            centroid: region.centroid,
        })
        .collect();

    let mut edges = Vec::new();
    let mut violations = crate::validate::validate(grid);
    let doors: Vec<Door> = door_records
        .iter()
        .map(|record| {
            let mut room_ids: Vec<u32> = record
                .incident
                .iter()
                .map(|&region| ranks[region as usize])
                .collect();
            room_ids.sort_unstable();
            for i in 0..room_ids.len() {
                for j in i + 1..room_ids.len() {
                    edges.push((room_ids[i], room_ids[j]));
                }
            }
            if room_ids.len() > 2 {
                violations.push(RuleViolation {
                    rule: 5,
                    description: format!(
                        "door touches {} rooms; a door should join exactly two",
                        room_ids.len()
                    ),
                    location: Some(ViolationSite::Region(record.center)),
                });
            }
            Door {
                center: record.center,
                orientation: record.orientation,
                rooms: room_ids,
            }
        })
        .collect();

    let mut ir = FloorPlanIr {
        ir_version: crate::graph::IR_VERSION,
        rooms,
        doors,
        edges,
        violations,
    };
    ir.canonicalize();
    ir
}

#[cfg(test)]
pub(crate) mod fixtures {
    use crate::raster::{ColorClass, PixelGrid};

    pub(crate) fn blank(width: u32, height: u32) -> PixelGrid {
        PixelGrid::filled(width, height, ColorClass::White)
    }

    pub(crate) fn fill(grid: &mut PixelGrid, x0: u32, y0: u32, x1: u32, y1: u32, class: ColorClass) {
        for y in y0..=y1 {
            for x in x0..=x1 {
                grid.set(x, y, class);
            }
        }
    }

    /// Two rooms side by side inside an outer wall box, divided by a
    /// vertical wall with a door stripe, an 8x8 marker in each room.
    ///
    /// Layout on a 46x26 grid: outer walls 3 px; divider at cols 21..23;
    /// door at rows 10..15 of the divider; left interior cols 3..20
    /// (18x20 = 360 px), right interior cols 24..42 (19x20 = 380 px).
    pub(crate) fn two_room_fixture() -> PixelGrid {
        let mut grid = blank(46, 26);
        fill(&mut grid, 0, 0, 45, 2, ColorClass::Black);
        fill(&mut grid, 0, 23, 45, 25, ColorClass::Black);
        fill(&mut grid, 0, 0, 2, 25, ColorClass::Black);
        fill(&mut grid, 43, 0, 45, 25, ColorClass::Black);
        fill(&mut grid, 21, 0, 23, 25, ColorClass::Black);
        fill(&mut grid, 21, 10, 23, 15, ColorClass::Green);
        fill(&mut grid, 8, 8, 15, 15, ColorClass::Red); // 64 px marker, left
        fill(&mut grid, 28, 8, 35, 15, ColorClass::Red); // right
        grid
    }

    /// One fully walled room on a 40x40 grid with a centered marker of
    /// the given size.
    pub(crate) fn one_room_with_dot(dot_w: u32, dot_h: u32) -> PixelGrid {
        let mut grid = blank(40, 40);
        fill(&mut grid, 0, 0, 39, 2, ColorClass::Black);
        fill(&mut grid, 0, 37, 39, 39, ColorClass::Black);
        fill(&mut grid, 0, 0, 2, 39, ColorClass::Black);
        fill(&mut grid, 37, 0, 39, 39, ColorClass::Black);
        let x0 = 20 - dot_w / 2;
        let y0 = 20 - dot_h / 2;
        fill(&mut grid, x0, y0, x0 + dot_w - 1, y0 + dot_h - 1, ColorClass::Red);
        grid
    }
}
