//! Advisory format checks.
//!
//! A submission that breaks the drawing rules still gets scored — the
//! violations reported here ride along with the extracted plan so a low
//! score can be explained, but nothing downstream is blocked by them.
//!
//! Checked: off-palette colors (rule 8), marker presence and size
//! (rule 6), exactly one marker per enclosed region (rules 6/7), rooms
//! open to the image border (rule 5), door stripes detached from walls
//! (rule 1), and — via [`transparency_violation`] where load metadata is
//! available — transparent backgrounds (rule 4). Line straightness and
//! width (rules 2/3) and semantic content (rule 9) are not mechanically
//! checked.

use crate::extract::{red_blobs, round_half_up_mean};
use crate::graph::{RuleViolation, ViolationSite};
use crate::raster::{ColorClass, PixelGrid, RasterMeta};

/// Acceptable pixel count for a room marker: the nominal dot is 10x10 =
/// 100 px; the window allows rasterization slack either way.
pub const DOT_AREA_RANGE: (u64, u64) = (50, 200);

struct OpenRegion {
    area: u64,
    sum_x: u64,
    sum_y: u64,
    touches_border: bool,
    dots: Vec<(u32, u32)>,
}

/// Check a classified raster against the machine-checkable format rules.
/// Never fails; returns an empty list when nothing checked is violated.
pub fn validate(grid: &PixelGrid) -> Vec<RuleViolation> {
    let mut violations = Vec::new();

    // rule 8: every pixel must classify to one of the four palette colors
    let mut off_palette = 0u64;
    let mut first_off = None;
    for y in 0..grid.height() {
        for x in 0..grid.width() {
            if grid.get(x, y) == ColorClass::Other {
                off_palette += 1;
                if first_off.is_none() {
                    first_off = Some((x, y));
                }
            }
        }
    }
    if off_palette > 0 {
        violations.push(RuleViolation {
            rule: 8,
            description: format!("{off_palette} pixels match no palette color"),
            location: first_off.map(ViolationSite::Pixel),
        });
    }

    // rule 6: markers exist and are dot-sized
    let blobs = red_blobs(grid);
    if blobs.is_empty() {
        violations.push(RuleViolation {
            rule: 6,
            description: "no red room markers found".to_string(),
            location: None,
        });
    }
    for blob in &blobs {
        if blob.area < DOT_AREA_RANGE.0 || blob.area > DOT_AREA_RANGE.1 {
            violations.push(RuleViolation {
                rule: 6,
                description: format!(
                    "room marker area {} px is outside the expected range [{}, {}]",
                    blob.area, DOT_AREA_RANGE.0, DOT_AREA_RANGE.1
                ),
                location: Some(ViolationSite::Region(blob.center)),
            });
        }
    }

    // partition all traversable pixels and count markers per region;
    // unlike extraction this is not seeded by dots, so dotless enclosed
    // areas are visible here
    let regions = open_regions(grid, &blobs.iter().map(|b| b.center).collect::<Vec<_>>());
    for region in &regions {
        if region.touches_border {
            if !region.dots.is_empty() {
                violations.push(RuleViolation {
                    rule: 5,
                    description: "room marker sits in a region open to the image border"
                        .to_string(),
                    location: Some(ViolationSite::Region(region.dots[0])),
                });
            }
            // a borderless open area with no marker is just the exterior
        } else if region.dots.is_empty() {
            violations.push(RuleViolation {
                rule: 6,
                description: "enclosed region has no room marker".to_string(),
                location: Some(ViolationSite::Region((
                    round_half_up_mean(region.sum_x, region.area),
                    round_half_up_mean(region.sum_y, region.area),
                ))),
            });
        } else if region.dots.len() >= 2 {
            violations.push(RuleViolation {
                rule: 7,
                description: format!(
                    "{} room markers share one region (gap in the walls between rooms)",
                    region.dots.len()
                ),
                location: Some(ViolationSite::Region(region.dots[0])),
            });
        }
    }

    // rule 1: every door stripe must lie on a wall
    for component in crate::extract::class_components(grid, ColorClass::Green) {
        let attached = component.pixels.iter().any(|&(px, py)| {
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let nx = px as i64 + dx;
                    let ny = py as i64 + dy;
                    if grid.contains(nx, ny) && grid.get(nx as u32, ny as u32) == ColorClass::Black
                    {
                        return true;
                    }
                }
            }
            false
        });
        if !attached {
            violations.push(RuleViolation {
                rule: 1,
                description: "door stripe is not attached to any wall".to_string(),
                location: Some(ViolationSite::Region(component.center)),
            });
        }
    }

    violations.sort_by(|a, b| {
        (a.rule, a.location, &a.description).cmp(&(b.rule, b.location, &b.description))
    });
    violations
}

/// Rule 4 check for images that carried an alpha channel: the loader
/// composites transparency over white, and this reports that it had to.
pub fn transparency_violation(meta: &RasterMeta) -> Option<RuleViolation> {
    (meta.transparent_pixels > 0).then(|| RuleViolation {
        rule: 4,
        description: format!(
            "{} transparent pixels were composited over a white background",
            meta.transparent_pixels
        ),
        location: None,
    })
}

/// 4-connected components of traversable (non-wall, non-door) pixels,
/// with the marker dots that fall inside each.
fn open_regions(grid: &PixelGrid, dots: &[(u32, u32)]) -> Vec<OpenRegion> {
    let width = grid.width();
    let height = grid.height();
    let index = |x: u32, y: u32| (y as usize) * (width as usize) + x as usize;
    let traversable =
        |x: u32, y: u32| !matches!(grid.get(x, y), ColorClass::Black | ColorClass::Green);
    let mut labels = vec![0u32; (width as usize) * (height as usize)];
    let mut regions: Vec<OpenRegion> = Vec::new();

    for y in 0..height {
        for x in 0..width {
            if labels[index(x, y)] != 0 || !traversable(x, y) {
                continue;
            }
            let label = regions.len() as u32 + 1;
            let mut region = OpenRegion {
                area: 0,
                sum_x: 0,
                sum_y: 0,
                touches_border: false,
                dots: Vec::new(),
            };
            let mut stack = vec![(x, y)];
            labels[index(x, y)] = label;
            while let Some((px, py)) = stack.pop() {
                region.area += 1;
                region.sum_x += px as u64;
                region.sum_y += py as u64;
                if px == 0 || py == 0 || px == width - 1 || py == height - 1 {
                    region.touches_border = true;
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
                    if labels[index(nx, ny)] == 0 && traversable(nx, ny) {
                        labels[index(nx, ny)] = label;
                        stack.push((nx, ny));
                    }
                }
            }
            regions.push(region);
        }
    }

    for &(dx, dy) in dots {
        if dx < width && dy < height && traversable(dx, dy) {
            let label = labels[index(dx, dy)];
            if label != 0 {
                regions[(label - 1) as usize].dots.push((dx, dy));
            }
        }
    }
    regions
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::fixtures::*;

    #[test]
    fn all_white_grid_reports_only_missing_markers() {
        let violations = validate(&blank(100, 100));
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].rule, 6);
        assert!(violations[0].description.contains("no red room markers"));
    }

    #[test]
    fn compliant_room_passes_clean() {
        assert_eq!(validate(&one_room_with_dot(10, 10)), vec![]);
    }

    #[test]
    fn marker_area_bounds_are_inclusive() {
        assert!(validate(&one_room_with_dot(10, 5)).is_empty()); // 50 px
        assert!(validate(&one_room_with_dot(20, 10)).is_empty()); // 200 px
    }

    #[test]
    fn undersized_and_oversized_markers_flag_rule_6() {
        let small = validate(&one_room_with_dot(6, 5)); // 30 px
        assert!(small.iter().any(|v| v.rule == 6 && v.description.contains("30 px")));
        let big = validate(&one_room_with_dot(15, 15)); // 225 px
        assert!(big.iter().any(|v| v.rule == 6 && v.description.contains("225 px")));
    }

    #[test]
    fn off_palette_pixels_flag_rule_8_with_location() {
        let mut grid = one_room_with_dot(10, 10);
        grid.set(5, 9, ColorClass::Other);
        grid.set(6, 9, ColorClass::Other);
        let violations = validate(&grid);
        let rule8: Vec<_> = violations.iter().filter(|v| v.rule == 8).collect();
        assert_eq!(rule8.len(), 1);
        assert!(rule8[0].description.starts_with("2 pixels"));
        assert_eq!(
            rule8[0].location,
            Some(crate::graph::ViolationSite::Pixel((5, 9)))
        );
    }

    #[test]
    fn floating_door_stripe_flags_rule_1() {
        let mut grid = one_room_with_dot(10, 10);
        fill(&mut grid, 10, 20, 15, 21, ColorClass::Green); // in open room space
        let violations = validate(&grid);
        assert!(violations.iter().any(|v| v.rule == 1));
    }

    #[test]
    fn door_on_wall_does_not_flag_rule_1() {
        let grid = two_room_fixture();
        assert!(validate(&grid).iter().all(|v| v.rule != 1));
    }

    #[test]
    fn wall_gap_merging_two_marked_rooms_flags_rule_7() {
        let mut grid = two_room_fixture();
        fill(&mut grid, 21, 5, 23, 5, crate::raster::ColorClass::White); // breach divider
        let violations = validate(&grid);
        assert!(violations
            .iter()
            .any(|v| v.rule == 7 && v.description.contains("2 room markers")));
    }

    #[test]
    fn dotless_enclosed_region_flags_rule_6() {
        let mut grid = two_room_fixture();
        fill(&mut grid, 28, 8, 35, 15, ColorClass::White); // erase right marker
        let violations = validate(&grid);
        assert!(violations
            .iter()
            .any(|v| v.rule == 6 && v.description.contains("no room marker")));
    }

    #[test]
    fn marker_in_unenclosed_space_flags_rule_5() {
        let mut grid = blank(60, 60);
        fill(&mut grid, 20, 20, 29, 29, ColorClass::Red); // marker, no walls at all
        let violations = validate(&grid);
        assert!(violations.iter().any(|v| v.rule == 5));
        assert!(violations.iter().all(|v| v.rule != 6));
    }

    #[test]
    fn exterior_without_markers_is_not_a_violation() {
        // the compliant fixture's exterior ring touches the border and has
        // no marker; it must stay silent
        assert_eq!(validate(&two_room_fixture()), vec![]);
    }

    #[test]
    fn transparency_meta_maps_to_rule_4() {
        let some = transparency_violation(&RasterMeta {
            transparent_pixels: 12,
        });
        assert_eq!(some.as_ref().map(|v| v.rule), Some(4));
        assert!(some.unwrap().description.contains("12 transparent"));
        assert!(transparency_violation(&RasterMeta {
            transparent_pixels: 0
        })
        .is_none());
    }
}
