//! Restricted vector-format parsing and rasterization.
//!
//! Submissions may arrive as markup instead of pixels. The supported
//! subset is what the plan format can legitimately express: straight
//! strokes (`line`, `polyline`, `rect` outlines, `path` with move/line/
//! close commands), filled rects, and small filled circles standing in
//! for the square room dots. Everything else is reported, not guessed at,
//! so scoring failures stay attributable to the submission.

mod parse;

pub use parse::{parse_svg, parse_svg_with, IssueKind, ParseIssue, ParseOutcome, SvgError};

use crate::raster::{ColorClass, PixelGrid};

/// Default canvas when a document declares no usable dimensions.
pub const DEFAULT_CANVAS: (u32, u32) = (1000, 1000);

/// Options shared by parsing and rasterization.
#[derive(Debug, Clone, Copy)]
pub struct SvgOptions {
    /// Per-channel tolerance used to classify element colors.
    pub tolerance: u8,
    /// Canvas used when the document lacks width/height and viewBox.
    pub default_canvas: (u32, u32),
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            tolerance: crate::raster::DEFAULT_TOLERANCE,
            default_canvas: DEFAULT_CANVAS,
        }
    }
}

/// Geometry of a single drawable element, in canvas pixels.
#[derive(Debug, Clone, PartialEq)]
pub enum ElementKind {
    /// Stroked straight segment between two points.
    Segment { x1: f64, y1: f64, x2: f64, y2: f64 },
    /// Axis-aligned filled rectangle (corner + size).
    Rect { x: f64, y: f64, w: f64, h: f64 },
    /// Filled square dot (center + edge length). Circles that encode room
    /// markers collapse to this.
    Dot { cx: f64, cy: f64, diameter: f64 },
}

/// One drawable element: geometry, palette color, stroke width.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorElement {
    pub kind: ElementKind,
    pub color: ColorClass,
    /// Stroke width in canvas pixels; 1.0 for filled shapes.
    pub stroke_width: f64,
}

/// Parsed vector plan. Painter's order is list order.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorPlan {
    pub width: u32,
    pub height: u32,
    pub elements: Vec<VectorElement>,
}

impl VectorPlan {
    pub fn empty(width: u32, height: u32) -> Self {
        VectorPlan {
            width: width.max(1),
            height: height.max(1),
            elements: Vec::new(),
        }
    }
}

/// Paint a plan onto a white canvas of the given size, without
/// anti-aliasing. Canvas coordinates scale to the output size; a pixel
/// `(x, y)` is treated as the lattice point `(x, y)`.
///
/// A segment of stroke width `w` covers the lattice points within
/// perpendicular distance `w/2` of it whose projection falls inside the
/// segment (rectangular cap, boundary inclusive). Rects and dots cover
/// the half-open boxes `[x, x+w) x [y, y+h)`. Degenerate elements paint
/// nothing.
pub fn rasterize(plan: &VectorPlan, out_width: u32, out_height: u32) -> PixelGrid {
    assert!(out_width >= 1 && out_height >= 1, "output dimensions must be >= 1");
    let mut grid = PixelGrid::filled(out_width, out_height, ColorClass::White);
    let sx = out_width as f64 / plan.width as f64;
    let sy = out_height as f64 / plan.height as f64;
    for element in &plan.elements {
        match element.kind {
            ElementKind::Segment { x1, y1, x2, y2 } => {
                let w = element.stroke_width * (sx + sy) / 2.0;
                paint_segment(
                    &mut grid,
                    (x1 * sx, y1 * sy),
                    (x2 * sx, y2 * sy),
                    w,
                    element.color,
                );
            }
            ElementKind::Rect { x, y, w, h } => {
                paint_box(&mut grid, x * sx, y * sy, w * sx, h * sy, element.color);
            }
            ElementKind::Dot { cx, cy, diameter } => {
                let dx = diameter * sx;
                let dy = diameter * sy;
                paint_box(
                    &mut grid,
                    cx * sx - dx / 2.0,
                    cy * sy - dy / 2.0,
                    dx,
                    dy,
                    element.color,
                );
            }
        }
    }
    grid
}

fn paint_segment(grid: &mut PixelGrid, a: (f64, f64), b: (f64, f64), width: f64, color: ColorClass) {
    let (ax, ay) = a;
    let (bx, by) = b;
    let dx = bx - ax;
    let dy = by - ay;
    let len_sq = dx * dx + dy * dy;
    if len_sq == 0.0 || width <= 0.0 || !len_sq.is_finite() {
        return;
    }
    let half = width / 2.0;
    let x_lo = clamp_coord(ax.min(bx) - half, grid.width());
    let x_hi = clamp_coord(ax.max(bx) + half, grid.width());
    let y_lo = clamp_coord(ay.min(by) - half, grid.height());
    let y_hi = clamp_coord(ay.max(by) + half, grid.height());
    // cross^2 <= (w/2)^2 * len^2 avoids a sqrt and stays exact for the
    // integer-coordinate geometry the generator emits.
    let max_cross_sq = half * half * len_sq;
    for y in y_lo..=y_hi {
        for x in x_lo..=x_hi {
            let px = x as f64 - ax;
            let py = y as f64 - ay;
            let dot = px * dx + py * dy;
            if dot < 0.0 || dot > len_sq {
                continue;
            }
            let cross = px * dy - py * dx;
            if cross * cross <= max_cross_sq {
                grid.set(x, y, color);
            }
        }
    }
}

// Fill the half-open box [x, x+w) x [y, y+h).
fn paint_box(grid: &mut PixelGrid, x: f64, y: f64, w: f64, h: f64, color: ColorClass) {
    if !(w > 0.0 && h > 0.0) || !x.is_finite() || !y.is_finite() {
        return;
    }
    // float-to-int casts saturate, so wildly off-canvas boxes just clip away
    let x0 = (x.ceil().max(0.0)) as i64;
    let y0 = (y.ceil().max(0.0)) as i64;
    let x1 = (((x + w).ceil() - 1.0).min((grid.width() - 1) as f64)) as i64;
    let y1 = (((y + h).ceil() - 1.0).min((grid.height() - 1) as f64)) as i64;
    for yy in y0..=y1 {
        for xx in x0..=x1 {
            grid.set(xx as u32, yy as u32, color);
        }
    }
}

fn clamp_coord(v: f64, limit: u32) -> u32 {
    if v.is_nan() {
        return 0;
    }
    v.max(0.0).min((limit - 1) as f64) as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(x1: f64, y1: f64, x2: f64, y2: f64, color: ColorClass, w: f64) -> VectorElement {
        VectorElement {
            kind: ElementKind::Segment { x1, y1, x2, y2 },
            color,
            stroke_width: w,
        }
    }

    #[test]
    fn horizontal_segment_covers_exact_rows_and_columns() {
        let plan = VectorPlan {
            width: 100,
            height: 100,
            elements: vec![seg(10.0, 20.0, 50.0, 20.0, ColorClass::Black, 3.0)],
        };
        let grid = rasterize(&plan, 100, 100);
        for y in 0..100u32 {
            for x in 0..100u32 {
                let expected = (19..=21).contains(&y) && (10..=50).contains(&x);
                assert_eq!(
                    grid.get(x, y) == ColorClass::Black,
                    expected,
                    "pixel ({x},{y})"
                );
            }
        }
    }

    #[test]
    fn empty_plan_rasterizes_all_white() {
        let grid = rasterize(&VectorPlan::empty(64, 64), 64, 64);
        assert_eq!(grid.count(ColorClass::White), 64 * 64);
    }

    #[test]
    fn dot_covers_square_block() {
        let plan = VectorPlan {
            width: 100,
            height: 100,
            elements: vec![VectorElement {
                kind: ElementKind::Dot {
                    cx: 30.0,
                    cy: 30.0,
                    diameter: 10.0,
                },
                color: ColorClass::Red,
                stroke_width: 1.0,
            }],
        };
        let grid = rasterize(&plan, 100, 100);
        assert_eq!(grid.count(ColorClass::Red), 100);
        for y in 25..=34u32 {
            for x in 25..=34u32 {
                assert_eq!(grid.get(x, y), ColorClass::Red);
            }
        }
        assert_eq!(grid.get(24, 30), ColorClass::White);
        assert_eq!(grid.get(35, 30), ColorClass::White);
    }

    #[test]
    fn vertical_segment_symmetric_to_horizontal() {
        let plan = VectorPlan {
            width: 60,
            height: 60,
            elements: vec![seg(20.0, 5.0, 20.0, 40.0, ColorClass::Green, 3.0)],
        };
        let grid = rasterize(&plan, 60, 60);
        assert_eq!(grid.count(ColorClass::Green), 3 * 36);
        assert_eq!(grid.get(19, 5), ColorClass::Green);
        assert_eq!(grid.get(21, 40), ColorClass::Green);
        assert_eq!(grid.get(22, 20), ColorClass::White);
    }

    #[test]
    fn diagonal_segment_paints_without_gaps_along_its_length() {
        let plan = VectorPlan {
            width: 50,
            height: 50,
            elements: vec![seg(5.0, 5.0, 40.0, 40.0, ColorClass::Black, 3.0)],
        };
        let grid = rasterize(&plan, 50, 50);
        // every diagonal lattice point on the centerline is covered
        for i in 5..=40u32 {
            assert_eq!(grid.get(i, i), ColorClass::Black);
        }
        assert_eq!(grid.get(4, 4), ColorClass::White);
    }

    #[test]
    fn painter_order_applies_for_overlaps() {
        let mut elements = vec![seg(0.0, 10.0, 30.0, 10.0, ColorClass::Black, 3.0)];
        elements.push(seg(10.0, 10.0, 20.0, 10.0, ColorClass::Green, 3.0));
        let plan = VectorPlan {
            width: 40,
            height: 40,
            elements,
        };
        let grid = rasterize(&plan, 40, 40);
        assert_eq!(grid.get(5, 10), ColorClass::Black);
        assert_eq!(grid.get(15, 10), ColorClass::Green);
    }

    #[test]
    fn degenerate_elements_paint_nothing() {
        let plan = VectorPlan {
            width: 20,
            height: 20,
            elements: vec![
                seg(5.0, 5.0, 5.0, 5.0, ColorClass::Black, 3.0),
                VectorElement {
                    kind: ElementKind::Rect {
                        x: 3.0,
                        y: 3.0,
                        w: 0.0,
                        h: 4.0,
                    },
                    color: ColorClass::Red,
                    stroke_width: 1.0,
                },
            ],
        };
        let grid = rasterize(&plan, 20, 20);
        assert_eq!(grid.count(ColorClass::White), 400);
    }

    #[test]
    fn scaling_maps_canvas_to_output() {
        // canvas 100 wide rendered at 200: x doubles
        let plan = VectorPlan {
            width: 100,
            height: 100,
            elements: vec![VectorElement {
                kind: ElementKind::Rect {
                    x: 10.0,
                    y: 10.0,
                    w: 5.0,
                    h: 5.0,
                },
                color: ColorClass::Red,
                stroke_width: 1.0,
            }],
        };
        let grid = rasterize(&plan, 200, 200);
        assert_eq!(grid.count(ColorClass::Red), 100);
        assert_eq!(grid.get(20, 20), ColorClass::Red);
        assert_eq!(grid.get(29, 29), ColorClass::Red);
        assert_eq!(grid.get(30, 30), ColorClass::White);
    }

    #[test]
    fn elements_fully_off_canvas_are_clipped() {
        let plan = VectorPlan {
            width: 50,
            height: 50,
            elements: vec![
                seg(-20.0, -5.0, -10.0, -5.0, ColorClass::Black, 3.0),
                VectorElement {
                    kind: ElementKind::Dot {
                        cx: 200.0,
                        cy: 200.0,
                        diameter: 10.0,
                    },
                    color: ColorClass::Red,
                    stroke_width: 1.0,
                },
            ],
        };
        let grid = rasterize(&plan, 50, 50);
        assert_eq!(grid.count(ColorClass::White), 2500);
    }
}
