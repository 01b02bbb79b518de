//! Raster loading and palette classification.
//!
//! Plan drawings use exactly four colors: white background, black walls,
//! green doors and red room markers. Every pixel of an input image is
//! snapped to one of those classes (or [`ColorClass::Other`]) before any
//! further analysis, so the rest of the pipeline never sees raw RGB.

use std::fmt;
use std::path::Path;

use thiserror::Error;

/// Default per-channel classification tolerance. Anti-aliased renders
/// produce near-palette colors; 48 snaps those while keeping the four
/// palette colors well separated (they differ by 255 in some channel).
pub const DEFAULT_TOLERANCE: u8 = 48;

/// Semantic color class of a plan pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColorClass {
    White,
    Black,
    Green,
    Red,
    /// Anything that does not snap to the four-color palette. Never
    /// appears in a rule-compliant plan.
    Other,
}

impl ColorClass {
    /// Reference RGB for the palette classes; `None` for `Other`.
    pub fn reference_rgb(self) -> Option<(u8, u8, u8)> {
        match self {
            ColorClass::White => Some((255, 255, 255)),
            ColorClass::Black => Some((0, 0, 0)),
            ColorClass::Green => Some((0, 255, 0)),
            ColorClass::Red => Some((255, 0, 0)),
            ColorClass::Other => None,
        }
    }
}

impl fmt::Display for ColorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ColorClass::White => "white",
            ColorClass::Black => "black",
            ColorClass::Green => "green",
            ColorClass::Red => "red",
            ColorClass::Other => "other",
        };
        f.write_str(name)
    }
}

const PALETTE: [ColorClass; 4] = [
    ColorClass::White,
    ColorClass::Black,
    ColorClass::Red,
    ColorClass::Green,
];

/// Snap an RGB triple to the plan palette.
///
/// A palette class qualifies when every channel is within `tolerance` of
/// its reference color; among qualifying classes the smaller max-channel
/// distance wins (two classes can only tie for tolerance >= 128, and ties
/// resolve in palette order: white, black, red, green). Returns
/// [`ColorClass::Other`] when nothing qualifies.
pub fn classify_color(r: u8, g: u8, b: u8, tolerance: u8) -> ColorClass {
    let mut best = ColorClass::Other;
    let mut best_dist = u16::MAX;
    for class in PALETTE {
        let (pr, pg, pb) = class.reference_rgb().unwrap();
        let dist = (r.abs_diff(pr) as u16)
            .max(g.abs_diff(pg) as u16)
            .max(b.abs_diff(pb) as u16);
        if dist <= tolerance as u16 && dist < best_dist {
            best = class;
            best_dist = dist;
        }
    }
    best
}

/// Classified raster of a floor plan, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelGrid {
    width: u32,
    height: u32,
    cells: Vec<ColorClass>,
}

impl PixelGrid {
    /// Grid filled with a single class. Panics if either dimension is zero.
    pub fn filled(width: u32, height: u32, class: ColorClass) -> Self {
        assert!(width >= 1 && height >= 1, "grid dimensions must be >= 1");
        PixelGrid {
            width,
            height,
            cells: vec![class; width as usize * height as usize],
        }
    }

    /// Build a grid from row-major cells. Panics unless
    /// `cells.len() == width * height` and both dimensions are >= 1.
    pub fn from_cells(width: u32, height: u32, cells: Vec<ColorClass>) -> Self {
        assert!(width >= 1 && height >= 1, "grid dimensions must be >= 1");
        assert_eq!(
            cells.len(),
            width as usize * height as usize,
            "cell count must equal width * height"
        );
        PixelGrid { width, height, cells }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn get(&self, x: u32, y: u32) -> ColorClass {
        debug_assert!(x < self.width && y < self.height);
        self.cells[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, class: ColorClass) {
        debug_assert!(x < self.width && y < self.height);
        self.cells[y as usize * self.width as usize + x as usize] = class;
    }

    pub fn cells(&self) -> &[ColorClass] {
        &self.cells
    }

    pub fn contains(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && (x as u64) < self.width as u64 && (y as u64) < self.height as u64
    }

    /// Count of pixels in a given class.
    pub fn count(&self, class: ColorClass) -> usize {
        self.cells.iter().filter(|&&c| c == class).count()
    }

    /// Encode as an RGB image using reference palette colors.
    /// `Other` pixels render mid-gray. Debug/inspection use.
    pub fn to_rgb_image(&self) -> image::RgbImage {
        image::RgbImage::from_fn(self.width, self.height, |x, y| {
            let (r, g, b) = self.get(x, y).reference_rgb().unwrap_or((128, 128, 128));
            image::Rgb([r, g, b])
        })
    }
}

/// Load-time metadata that does not fit in the grid itself.
#[derive(Debug, Clone, Copy, Default)]
pub struct RasterMeta {
    /// Pixels with alpha < 255 before compositing over white.
    pub transparent_pixels: u64,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot open image file {path}: {source}")]
    Open {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot decode image file {path}: {source}")]
    Decode {
        path: String,
        source: image::ImageError,
    },
    #[error("image {path} has a zero dimension ({width}x{height})")]
    EmptyImage { path: String, width: u32, height: u32 },
}

/// Load an image file and classify every pixel.
///
/// Alpha, when present, composites over white before classification; the
/// transparent-pixel count is reported through [`RasterMeta`] so callers
/// can surface a background-rule violation.
pub fn load_image_with_meta(
    path: impl AsRef<Path>,
    tolerance: u8,
) -> Result<(PixelGrid, RasterMeta), LoadError> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let bytes = std::fs::read(path).map_err(|source| LoadError::Open {
        path: display.clone(),
        source,
    })?;
    let dynamic = image::load_from_memory(&bytes).map_err(|source| LoadError::Decode {
        path: display.clone(),
        source,
    })?;
    classify_dynamic(&dynamic, tolerance).ok_or(LoadError::EmptyImage {
        path: display,
        width: dynamic.width(),
        height: dynamic.height(),
    })
}

/// As [`load_image_with_meta`] but dropping the metadata.
pub fn load_image(path: impl AsRef<Path>, tolerance: u8) -> Result<PixelGrid, LoadError> {
    load_image_with_meta(path, tolerance).map(|(grid, _)| grid)
}

/// Classify a decoded image. Returns `None` for zero-dimension images.
pub fn classify_dynamic(
    dynamic: &image::DynamicImage,
    tolerance: u8,
) -> Option<(PixelGrid, RasterMeta)> {
    let rgba = dynamic.to_rgba8();
    let (width, height) = rgba.dimensions();
    if width == 0 || height == 0 {
        return None;
    }
    let mut cells = Vec::with_capacity(width as usize * height as usize);
    let mut transparent = 0u64;
    for px in rgba.pixels() {
        let [r, g, b, a] = px.0;
        let (r, g, b) = if a == 255 {
            (r, g, b)
        } else {
            transparent += 1;
            (over_white(r, a), over_white(g, a), over_white(b, a))
        };
        cells.push(classify_color(r, g, b, tolerance));
    }
    Some((
        PixelGrid::from_cells(width, height, cells),
        RasterMeta {
            transparent_pixels: transparent,
        },
    ))
}

// Source-over compositing against a white background, rounded to nearest.
fn over_white(channel: u8, alpha: u8) -> u8 {
    let c = channel as u32 * alpha as u32 + 255 * (255 - alpha as u32);
    ((c + 127) / 255) as u8
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_palette_colors_classify_to_themselves() {
        for tol in [0u8, 1, 48, 127] {
            assert_eq!(classify_color(255, 255, 255, tol), ColorClass::White);
            assert_eq!(classify_color(0, 0, 0, tol), ColorClass::Black);
            assert_eq!(classify_color(255, 0, 0, tol), ColorClass::Red);
            assert_eq!(classify_color(0, 255, 0, tol), ColorClass::Green);
        }
    }

    #[test]
    fn near_red_within_tolerance() {
        // per-channel distances (5, 4, 3), all <= 48
        assert_eq!(classify_color(250, 4, 3, 48), ColorClass::Red);
    }

    #[test]
    fn mid_gray_is_other() {
        // max-channel distance to every palette color is 127 or 128
        assert_eq!(classify_color(128, 128, 128, 48), ColorClass::Other);
    }

    #[test]
    fn nearest_class_wins_at_large_tolerance() {
        // at tolerance 200 both black and red qualify; red is nearer
        assert_eq!(classify_color(200, 10, 10, 200), ColorClass::Red);
        assert_eq!(classify_color(60, 10, 10, 200), ColorClass::Black);
    }

    #[test]
    fn grid_addressing_is_row_major() {
        let mut grid = PixelGrid::filled(4, 3, ColorClass::White);
        grid.set(2, 1, ColorClass::Red);
        assert_eq!(grid.get(2, 1), ColorClass::Red);
        let row_major = 4 + 2; // row 1 of width 4, col 2
        assert_eq!(grid.cells()[row_major], ColorClass::Red);
        assert_eq!(grid.count(ColorClass::Red), 1);
    }

    #[test]
    fn compositing_fully_transparent_yields_white() {
        assert_eq!(over_white(0, 0), 255);
        assert_eq!(over_white(255, 255), 255);
        assert_eq!(over_white(17, 0), 255);
    }

    #[test]
    fn zero_dimension_image_is_rejected() {
        let img = image::DynamicImage::new_rgb8(0, 5);
        assert!(classify_dynamic(&img, 48).is_none());
    }

    #[test]
    fn missing_file_reports_open_error() {
        let err = load_image("/nonexistent/plan.png", 48).unwrap_err();
        assert!(matches!(err, LoadError::Open { .. }));
    }

    #[test]
    fn undecodable_file_reports_decode_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk.png");
        std::fs::write(&path, b"not an image").unwrap();
        let err = load_image(&path, 48).unwrap_err();
        assert!(matches!(err, LoadError::Decode { .. }));
    }

    #[test]
    fn loads_and_classifies_png() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("plan.png");
        let mut img = image::RgbImage::from_pixel(10, 10, image::Rgb([255, 255, 255]));
        img.put_pixel(3, 4, image::Rgb([255, 0, 0]));
        img.save(&path).unwrap();

        let grid = load_image(&path, DEFAULT_TOLERANCE).unwrap();
        assert_eq!((grid.width(), grid.height()), (10, 10));
        assert_eq!(grid.get(3, 4), ColorClass::Red);
        assert_eq!(grid.count(ColorClass::Red), 1);
        assert_eq!(grid.count(ColorClass::White), 99);
    }

    #[test]
    fn fully_transparent_rgba_loads_as_white() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("clear.png");
        let img = image::RgbaImage::from_pixel(6, 4, image::Rgba([10, 200, 30, 0]));
        img.save(&path).unwrap();

        let (grid, meta) = load_image_with_meta(&path, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(grid.count(ColorClass::White), 24);
        assert_eq!(meta.transparent_pixels, 24);
    }
}
