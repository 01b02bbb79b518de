use std::fmt;

use thiserror::Error;

use super::{ElementKind, SvgOptions, VectorElement, VectorPlan};
use crate::raster::{classify_color, ColorClass};

/// Hard parse failure: the document is not usable markup at all.
/// Anything recoverable is reported as a [`ParseIssue`] instead.
#[derive(Debug, Error)]
pub enum SvgError {
    #[error("malformed markup: {0}")]
    Markup(#[from] roxmltree::Error),
    #[error("root element is <{found}>, expected <svg>")]
    NotSvg { found: String },
}

/// A recoverable problem found while parsing. The offending element is
/// dropped (or partially honored, per the kind), never guessed at.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseIssue {
    /// Tag name of the element the issue occurred on.
    pub element: String,
    /// 1-based source line of the element's start tag.
    pub line: u32,
    /// 1-based source column of the element's start tag.
    pub column: u32,
    pub kind: IssueKind,
}

impl fmt::Display for ParseIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, col {}: <{}> {}",
            self.line, self.column, self.element, self.kind
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum IssueKind {
    /// Element type outside the supported subset; its subtree is skipped.
    UnsupportedElement,
    /// `transform` present; affected subtree is skipped rather than
    /// mis-placed.
    UnsupportedTransform,
    /// A path command outside M/L/H/V/Z (and lowercase forms); the whole
    /// path is dropped.
    UnsupportedPathCommand { command: char },
    /// Color value that could not be parsed at all.
    UnparseableColor { value: String },
    /// Color parsed to RGB but matches no palette class at the active
    /// tolerance.
    OffPaletteColor { value: String, rgb: (u8, u8, u8) },
    /// Shape would render with neither stroke nor fill.
    Invisible,
    /// A numeric attribute was missing or unparseable.
    BadNumber { attribute: String, value: String },
    /// Circle too large to stand in for a room marker dot.
    CircleTooLarge { diameter: f64 },
    /// Explicit fill on an open stroke shape is ignored.
    FillIgnored,
    /// Length in unsupported units (only unitless / px are supported).
    UnsupportedUnit { attribute: String, value: String },
}

impl fmt::Display for IssueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IssueKind::UnsupportedElement => write!(f, "unsupported element, subtree skipped"),
            IssueKind::UnsupportedTransform => {
                write!(f, "transform attributes are not supported, subtree skipped")
            }
            IssueKind::UnsupportedPathCommand { command } => write!(
                f,
                "unsupported path command '{command}' (only M, L, H, V, Z and lowercase forms), path dropped"
            ),
            IssueKind::UnparseableColor { value } => {
                write!(f, "could not parse color \"{value}\", element dropped")
            }
            IssueKind::OffPaletteColor { value, rgb } => write!(
                f,
                "color \"{value}\" = rgb({},{},{}) matches no palette class \
                 (use #000000 walls, #00ff00 doors, #ff0000 dots, #ffffff background), element dropped",
                rgb.0, rgb.1, rgb.2
            ),
            IssueKind::Invisible => write!(f, "no stroke or fill, element invisible and dropped"),
            IssueKind::BadNumber { attribute, value } => {
                write!(f, "attribute {attribute}=\"{value}\" is not a usable number, element dropped")
            }
            IssueKind::CircleTooLarge { diameter } => write!(
                f,
                "circle diameter {diameter} exceeds the room-marker limit of 14, element dropped"
            ),
            IssueKind::FillIgnored => write!(f, "fill on an open stroke shape is ignored"),
            IssueKind::UnsupportedUnit { attribute, value } => {
                write!(f, "attribute {attribute}=\"{value}\" uses unsupported units")
            }
        }
    }
}

/// Result of a successful parse: the plan plus everything that had to be
/// dropped or fudged along the way.
#[derive(Debug, Clone)]
pub struct ParseOutcome {
    pub plan: VectorPlan,
    pub issues: Vec<ParseIssue>,
}

/// Parse with default options.
pub fn parse_svg(text: &str) -> Result<ParseOutcome, SvgError> {
    parse_svg_with(text, &SvgOptions::default())
}

/// Parse a document into a [`VectorPlan`].
///
/// Returns `Err` only for unusable markup (bad XML, non-svg root);
/// everything else degrades element-by-element into [`ParseIssue`]s.
pub fn parse_svg_with(text: &str, options: &SvgOptions) -> Result<ParseOutcome, SvgError> {
    let doc = roxmltree::Document::parse(text)?;
    let root = doc.root_element();
    if root.tag_name().name() != "svg" {
        return Err(SvgError::NotSvg {
            found: root.tag_name().name().to_string(),
        });
    }

    let mut parser = Parser {
        doc: &doc,
        options: *options,
        issues: Vec::new(),
        elements: Vec::new(),
    };

    let (width, height, map) = parser.canvas(root);
    let initial = Style {
        stroke: Paint::None,
        fill: Paint::Color {
            class: ColorClass::Black,
            rgb: (0, 0, 0),
            raw: String::from("black"),
        },
        stroke_width: 1.0,
    };
    // the root svg element may itself carry style/presentation attributes
    let root_style = parser.apply_style(root, &initial);
    if root_style.is_none() {
        // transform on the root: nothing renders
        return Ok(ParseOutcome {
            plan: VectorPlan::empty(width, height),
            issues: parser.issues,
        });
    }
    parser.walk_children(root, &root_style.unwrap(), &map);

    Ok(ParseOutcome {
        plan: VectorPlan {
            width,
            height,
            elements: parser.elements,
        },
        issues: parser.issues,
    })
}

/// Affine map from user coordinates to canvas pixels (viewBox handling).
#[derive(Debug, Clone, Copy)]
struct CoordMap {
    sx: f64,
    sy: f64,
    tx: f64,
    ty: f64,
}

impl CoordMap {
    fn identity() -> Self {
        CoordMap {
            sx: 1.0,
            sy: 1.0,
            tx: 0.0,
            ty: 0.0,
        }
    }

    fn point(&self, x: f64, y: f64) -> (f64, f64) {
        (x * self.sx + self.tx, y * self.sy + self.ty)
    }

    fn length(&self, w: f64) -> f64 {
        w * (self.sx + self.sy) / 2.0
    }
}

/// Inheritable presentation state.
#[derive(Debug, Clone)]
struct Style {
    stroke: Paint,
    fill: Paint,
    stroke_width: f64,
}

#[derive(Debug, Clone)]
enum Paint {
    None,
    Color {
        class: ColorClass,
        rgb: (u8, u8, u8),
        raw: String,
    },
}

struct Parser<'a> {
    doc: &'a roxmltree::Document<'a>,
    options: SvgOptions,
    issues: Vec<ParseIssue>,
    elements: Vec<VectorElement>,
}

impl<'a> Parser<'a> {
    fn issue(&mut self, node: roxmltree::Node, kind: IssueKind) {
        let pos = self.doc.text_pos_at(node.range().start);
        self.issues.push(ParseIssue {
            element: node.tag_name().name().to_string(),
            line: pos.row,
            column: pos.col,
            kind,
        });
    }

    /// Resolve canvas size and the user-to-canvas coordinate map.
    /// Explicit width/height win; otherwise viewBox; otherwise the default.
    fn canvas(&mut self, root: roxmltree::Node) -> (u32, u32, CoordMap) {
        let width = self.dim_attr(root, "width");
        let height = self.dim_attr(root, "height");
        let view_box = root.attribute("viewBox").and_then(parse_view_box);

        let (w, h) = match (width, height, view_box) {
            (Some(w), Some(h), _) => (w, h),
            (_, _, Some((_, _, vw, vh))) => (vw.round().max(1.0), vh.round().max(1.0)),
            _ => {
                let d = self.options.default_canvas;
                (d.0 as f64, d.1 as f64)
            }
        };
        let w = w.round().clamp(1.0, u32::MAX as f64) as u32;
        let h = h.round().clamp(1.0, u32::MAX as f64) as u32;

        let map = match view_box {
            Some((vx, vy, vw, vh)) if vw > 0.0 && vh > 0.0 => {
                let sx = w as f64 / vw;
                let sy = h as f64 / vh;
                CoordMap {
                    sx,
                    sy,
                    tx: -vx * sx,
                    ty: -vy * sy,
                }
            }
            _ => CoordMap::identity(),
        };
        (w, h, map)
    }

    /// Parse a root length attribute; `None` if absent or unusable
    /// (an issue is recorded for present-but-unusable values).
    fn dim_attr(&mut self, node: roxmltree::Node, name: &str) -> Option<f64> {
        let raw = node.attribute(name)?;
        match parse_length(raw) {
            Some(v) if v >= 1.0 => Some(v),
            Some(_) => {
                self.issue(
                    node,
                    IssueKind::BadNumber {
                        attribute: name.to_string(),
                        value: raw.to_string(),
                    },
                );
                None
            }
            None => {
                self.issue(
                    node,
                    IssueKind::UnsupportedUnit {
                        attribute: name.to_string(),
                        value: raw.to_string(),
                    },
                );
                None
            }
        }
    }

    fn walk_children(&mut self, node: roxmltree::Node, style: &Style, map: &CoordMap) {
        for child in node.children() {
            if !child.is_element() {
                continue;
            }
            self.visit(child, style, map);
        }
    }

    fn visit(&mut self, node: roxmltree::Node, inherited: &Style, map: &CoordMap) {
        let name = node.tag_name().name();
        match name {
            // non-rendering containers we can silently ignore
            "title" | "desc" | "metadata" | "defs" => {}
            "g" | "svg" => {
                if let Some(style) = self.apply_style(node, inherited) {
                    self.walk_children(node, &style, map);
                }
            }
            "line" => self.visit_line(node, inherited, map),
            "polyline" => self.visit_polyline(node, inherited, map),
            "rect" => self.visit_rect(node, inherited, map),
            "circle" => self.visit_circle(node, inherited, map),
            "path" => self.visit_path(node, inherited, map),
            _ => self.issue(node, IssueKind::UnsupportedElement),
        }
    }

    /// Merge a node's presentation attributes and `style` attribute into
    /// the inherited style. Returns `None` if the subtree must be skipped
    /// (a `transform` is present).
    fn apply_style(&mut self, node: roxmltree::Node, inherited: &Style) -> Option<Style> {
        if node.attribute("transform").is_some() {
            self.issue(node, IssueKind::UnsupportedTransform);
            return None;
        }
        let mut style = inherited.clone();
        // presentation attributes first, then style="" wins
        for (key, value) in node
            .attributes()
            .filter(|a| matches!(a.name(), "stroke" | "fill" | "stroke-width"))
            .map(|a| (a.name().to_string(), a.value().to_string()))
            .collect::<Vec<_>>()
        {
            self.apply_property(node, &mut style, &key, &value);
        }
        if let Some(css) = node.attribute("style") {
            for decl in css.split(';') {
                let Some((key, value)) = decl.split_once(':') else {
                    continue;
                };
                let key = key.trim();
                let value = value.trim().to_string();
                if matches!(key, "stroke" | "fill" | "stroke-width") {
                    self.apply_property(node, &mut style, key, &value);
                }
            }
        }
        Some(style)
    }

    fn apply_property(&mut self, node: roxmltree::Node, style: &mut Style, key: &str, value: &str) {
        match key {
            "stroke-width" => match parse_length(value) {
                Some(w) if w > 0.0 => style.stroke_width = w,
                _ => self.issue(
                    node,
                    IssueKind::BadNumber {
                        attribute: "stroke-width".to_string(),
                        value: value.to_string(),
                    },
                ),
            },
            "stroke" | "fill" => match parse_color_value(value, self.options.tolerance) {
                Some(paint) => {
                    if key == "stroke" {
                        style.stroke = paint;
                    } else {
                        style.fill = paint;
                    }
                }
                None => self.issue(
                    node,
                    IssueKind::UnparseableColor {
                        value: value.to_string(),
                    },
                ),
            },
            _ => unreachable!(),
        }
    }

    /// Resolve the stroke paint into a palette class, recording the
    /// appropriate issue when the element can't render. `None` = drop.
    fn stroke_class(&mut self, node: roxmltree::Node, style: &Style) -> Option<ColorClass> {
        match &style.stroke {
            Paint::None => {
                self.issue(node, IssueKind::Invisible);
                None
            }
            Paint::Color { class, rgb, raw } => {
                if *class == ColorClass::Other {
                    let kind = IssueKind::OffPaletteColor {
                        value: raw.clone(),
                        rgb: *rgb,
                    };
                    self.issue(node, kind);
                    None
                } else {
                    Some(*class)
                }
            }
        }
    }

    fn fill_class(&mut self, node: roxmltree::Node, style: &Style) -> Option<ColorClass> {
        match &style.fill {
            Paint::None => None,
            Paint::Color { class, rgb, raw } => {
                if *class == ColorClass::Other {
                    let kind = IssueKind::OffPaletteColor {
                        value: raw.clone(),
                        rgb: *rgb,
                    };
                    self.issue(node, kind);
                    None
                } else {
                    Some(*class)
                }
            }
        }
    }

    /// Read a required numeric attribute; issue + `None` when unusable.
    fn number_attr(&mut self, node: roxmltree::Node, name: &str, default: f64) -> Option<f64> {
        match node.attribute(name) {
            None => Some(default),
            Some(raw) => match parse_length(raw) {
                Some(v) => Some(v),
                None => {
                    self.issue(
                        node,
                        IssueKind::BadNumber {
                            attribute: name.to_string(),
                            value: raw.to_string(),
                        },
                    );
                    None
                }
            },
        }
    }

    fn visit_line(&mut self, node: roxmltree::Node, inherited: &Style, map: &CoordMap) {
        let Some(style) = self.apply_style(node, inherited) else {
            return;
        };
        let (Some(x1), Some(y1), Some(x2), Some(y2)) = (
            self.number_attr(node, "x1", 0.0),
            self.number_attr(node, "y1", 0.0),
            self.number_attr(node, "x2", 0.0),
            self.number_attr(node, "y2", 0.0),
        ) else {
            return;
        };
        let Some(color) = self.stroke_class(node, &style) else {
            return;
        };
        let (x1, y1) = map.point(x1, y1);
        let (x2, y2) = map.point(x2, y2);
        self.elements.push(VectorElement {
            kind: ElementKind::Segment { x1, y1, x2, y2 },
            color,
            stroke_width: map.length(style.stroke_width),
        });
    }

    fn visit_polyline(&mut self, node: roxmltree::Node, inherited: &Style, map: &CoordMap) {
        let Some(style) = self.apply_style(node, inherited) else {
            return;
        };
        let raw = node.attribute("points").unwrap_or("");
        let Some(points) = parse_number_list(raw) else {
            self.issue(
                node,
                IssueKind::BadNumber {
                    attribute: "points".to_string(),
                    value: raw.to_string(),
                },
            );
            return;
        };
        if points.len() < 4 || points.len() % 2 != 0 {
            self.issue(
                node,
                IssueKind::BadNumber {
                    attribute: "points".to_string(),
                    value: raw.to_string(),
                },
            );
            return;
        }
        if node.attribute("fill").is_some() && !matches!(style.fill, Paint::None) {
            // an explicitly filled polyline would render as a filled area;
            // this subset only honors its stroke
            self.issue(node, IssueKind::FillIgnored);
        }
        let Some(color) = self.stroke_class(node, &style) else {
            return;
        };
        let width = map.length(style.stroke_width);
        for pair in points.chunks_exact(2).collect::<Vec<_>>().windows(2) {
            let (x1, y1) = map.point(pair[0][0], pair[0][1]);
            let (x2, y2) = map.point(pair[1][0], pair[1][1]);
            self.elements.push(VectorElement {
                kind: ElementKind::Segment { x1, y1, x2, y2 },
                color,
                stroke_width: width,
            });
        }
    }

    fn visit_rect(&mut self, node: roxmltree::Node, inherited: &Style, map: &CoordMap) {
        let Some(style) = self.apply_style(node, inherited) else {
            return;
        };
        let (Some(x), Some(y), Some(w), Some(h)) = (
            self.number_attr(node, "x", 0.0),
            self.number_attr(node, "y", 0.0),
            self.number_attr(node, "width", 0.0),
            self.number_attr(node, "height", 0.0),
        ) else {
            return;
        };
        if w <= 0.0 || h <= 0.0 {
            self.issue(
                node,
                IssueKind::BadNumber {
                    attribute: "width/height".to_string(),
                    value: format!("{w}x{h}"),
                },
            );
            return;
        }
        let fill = self.fill_class(node, &style);
        let stroke = match style.stroke {
            Paint::None => None,
            _ => self.stroke_class(node, &style),
        };
        if fill.is_none() && stroke.is_none() {
            // specific issues were already recorded for off-palette paint;
            // only a genuinely paintless rect is "invisible"
            if matches!(style.fill, Paint::None) && matches!(style.stroke, Paint::None) {
                self.issue(node, IssueKind::Invisible);
            }
            return;
        }
        let (px, py) = map.point(x, y);
        let (qx, qy) = map.point(x + w, y + h);
        if let Some(color) = fill {
            self.elements.push(VectorElement {
                kind: ElementKind::Rect {
                    x: px,
                    y: py,
                    w: qx - px,
                    h: qy - py,
                },
                color,
                stroke_width: 1.0,
            });
        }
        if let Some(color) = stroke {
            let width = map.length(style.stroke_width);
            let corners = [(px, py), (qx, py), (qx, qy), (px, qy), (px, py)];
            for pair in corners.windows(2) {
                self.elements.push(VectorElement {
                    kind: ElementKind::Segment {
                        x1: pair[0].0,
                        y1: pair[0].1,
                        x2: pair[1].0,
                        y2: pair[1].1,
                    },
                    color,
                    stroke_width: width,
                });
            }
        }
    }

    fn visit_circle(&mut self, node: roxmltree::Node, inherited: &Style, map: &CoordMap) {
        let Some(style) = self.apply_style(node, inherited) else {
            return;
        };
        let (Some(cx), Some(cy), Some(r)) = (
            self.number_attr(node, "cx", 0.0),
            self.number_attr(node, "cy", 0.0),
            self.number_attr(node, "r", 0.0),
        ) else {
            return;
        };
        if r <= 0.0 {
            self.issue(
                node,
                IssueKind::BadNumber {
                    attribute: "r".to_string(),
                    value: r.to_string(),
                },
            );
            return;
        }
        let diameter = map.length(2.0 * r);
        if diameter > 14.0 {
            self.issue(node, IssueKind::CircleTooLarge { diameter });
            return;
        }
        let Some(color) = self.fill_class(node, &style) else {
            if matches!(style.fill, Paint::None) {
                self.issue(node, IssueKind::Invisible);
            }
            return;
        };
        let (cx, cy) = map.point(cx, cy);
        self.elements.push(VectorElement {
            kind: ElementKind::Dot { cx, cy, diameter },
            color,
            stroke_width: 1.0,
        });
    }

    fn visit_path(&mut self, node: roxmltree::Node, inherited: &Style, map: &CoordMap) {
        let Some(style) = self.apply_style(node, inherited) else {
            return;
        };
        let data = node.attribute("d").unwrap_or("");
        let segments = match parse_path_data(data) {
            Ok(segments) => segments,
            Err(PathError::UnsupportedCommand(c)) => {
                self.issue(node, IssueKind::UnsupportedPathCommand { command: c });
                return;
            }
            Err(PathError::BadData) => {
                self.issue(
                    node,
                    IssueKind::BadNumber {
                        attribute: "d".to_string(),
                        value: truncate_for_report(data),
                    },
                );
                return;
            }
        };
        if segments.is_empty() {
            return;
        }
        if node.attribute("fill").is_some() && !matches!(style.fill, Paint::None) {
            self.issue(node, IssueKind::FillIgnored);
        }
        let Some(color) = self.stroke_class(node, &style) else {
            return;
        };
        let width = map.length(style.stroke_width);
        for ((x1, y1), (x2, y2)) in segments {
            let (x1, y1) = map.point(x1, y1);
            let (x2, y2) = map.point(x2, y2);
            self.elements.push(VectorElement {
                kind: ElementKind::Segment { x1, y1, x2, y2 },
                color,
                stroke_width: width,
            });
        }
    }
}

fn truncate_for_report(s: &str) -> String {
    if s.len() <= 40 {
        s.to_string()
    } else {
        let cut = s
            .char_indices()
            .take_while(|(i, _)| *i <= 40)
            .last()
            .map(|(i, _)| i)
            .unwrap_or(0);
        format!("{}...", &s[..cut])
    }
}

/// Parse a unitless or `px`-suffixed length. `None` for anything else.
fn parse_length(raw: &str) -> Option<f64> {
    let s = raw.trim();
    let s = s.strip_suffix("px").unwrap_or(s);
    let v: f64 = s.trim().parse().ok()?;
    v.is_finite().then_some(v)
}

fn parse_view_box(raw: &str) -> Option<(f64, f64, f64, f64)> {
    let nums = parse_number_list(raw)?;
    if nums.len() != 4 {
        return None;
    }
    let (x, y, w, h) = (nums[0], nums[1], nums[2], nums[3]);
    (w > 0.0 && h > 0.0).then_some((x, y, w, h))
}

/// Whitespace/comma separated floats, e.g. polyline points or viewBox.
fn parse_number_list(raw: &str) -> Option<Vec<f64>> {
    let mut out = Vec::new();
    for token in raw.split(|c: char| c.is_whitespace() || c == ',') {
        if token.is_empty() {
            continue;
        }
        let v: f64 = token.parse().ok()?;
        if !v.is_finite() {
            return None;
        }
        out.push(v);
    }
    Some(out)
}

/// Parse a color into a paint. `None` return means unparseable.
fn parse_color_value(raw: &str, tolerance: u8) -> Option<Paint> {
    let s = raw.trim();
    if s.eq_ignore_ascii_case("none") {
        return Some(Paint::None);
    }
    let rgb = parse_rgb(s)?;
    Some(Paint::Color {
        class: classify_color(rgb.0, rgb.1, rgb.2, tolerance),
        rgb,
        raw: raw.to_string(),
    })
}

fn parse_rgb(s: &str) -> Option<(u8, u8, u8)> {
    if let Some(hex) = s.strip_prefix('#') {
        return parse_hex(hex);
    }
    let lower = s.to_ascii_lowercase();
    if let Some(args) = lower
        .strip_prefix("rgb(")
        .or_else(|| lower.strip_prefix("rgba("))
        .and_then(|rest| rest.strip_suffix(')'))
    {
        let parts: Vec<&str> = args.split(',').map(str::trim).collect();
        if parts.len() < 3 {
            return None;
        }
        let mut channels = [0u8; 3];
        for (slot, part) in channels.iter_mut().zip(&parts) {
            *slot = if let Some(pct) = part.strip_suffix('%') {
                let v: f64 = pct.trim().parse().ok()?;
                (v.clamp(0.0, 100.0) * 255.0 / 100.0).round() as u8
            } else {
                let v: f64 = part.parse().ok()?;
                if !v.is_finite() {
                    return None;
                }
                v.clamp(0.0, 255.0).round() as u8
            };
        }
        return Some((channels[0], channels[1], channels[2]));
    }
    named_color(&lower)
}

fn parse_hex(hex: &str) -> Option<(u8, u8, u8)> {
    let digits: Vec<u8> = hex
        .chars()
        .map(|c| c.to_digit(16).map(|d| d as u8))
        .collect::<Option<_>>()?;
    match digits.len() {
        3 => Some((digits[0] * 17, digits[1] * 17, digits[2] * 17)),
        6 => Some((
            digits[0] * 16 + digits[1],
            digits[2] * 16 + digits[3],
            digits[4] * 16 + digits[5],
        )),
        _ => None,
    }
}

fn named_color(name: &str) -> Option<(u8, u8, u8)> {
    Some(match name {
        "black" => (0, 0, 0),
        "white" => (255, 255, 255),
        "red" => (255, 0, 0),
        "lime" => (0, 255, 0),
        // CSS "green" is the dark variant, deliberately distinct from lime
        "green" => (0, 128, 0),
        "blue" => (0, 0, 255),
        "yellow" => (255, 255, 0),
        "cyan" | "aqua" => (0, 255, 255),
        "magenta" | "fuchsia" => (255, 0, 255),
        "gray" | "grey" => (128, 128, 128),
        "silver" => (192, 192, 192),
        "maroon" => (128, 0, 0),
        "olive" => (128, 128, 0),
        "navy" => (0, 0, 128),
        "teal" => (0, 128, 128),
        "purple" => (128, 0, 128),
        "orange" => (255, 165, 0),
        _ => return None,
    })
}

enum PathError {
    UnsupportedCommand(char),
    BadData,
}

/// An absolute line segment: start point to end point.
type PathSegment = ((f64, f64), (f64, f64));

/// Interpret path data into absolute line segments. Only move, line,
/// horizontal/vertical line, and close commands are supported; any other
/// command rejects the whole path.
fn parse_path_data(data: &str) -> Result<Vec<PathSegment>, PathError> {
    let tokens = tokenize_path(data)?;
    let mut segments = Vec::new();
    let mut pos = (0.0f64, 0.0f64);
    let mut subpath_start = (0.0f64, 0.0f64);
    let mut started = false;

    let mut i = 0;
    let mut command: Option<char> = None;
    while i < tokens.len() {
        if let PathToken::Command(c) = tokens[i] {
            command = Some(c);
            i += 1;
            if matches!(c, 'Z' | 'z') {
                if started && pos != subpath_start {
                    segments.push((pos, subpath_start));
                }
                pos = subpath_start;
                // a command must follow a close; implicit repeats are
                // only valid for coordinate commands
                command = None;
                continue;
            }
        }
        let Some(c) = command else {
            return Err(PathError::BadData);
        };
        let relative = c.is_ascii_lowercase();
        match c.to_ascii_uppercase() {
            'M' => {
                let x = take_number(&tokens, &mut i)?;
                let y = take_number(&tokens, &mut i)?;
                pos = if relative && started {
                    (pos.0 + x, pos.1 + y)
                } else {
                    (x, y)
                };
                subpath_start = pos;
                started = true;
                // subsequent coordinate pairs are implicit linetos
                command = Some(if relative { 'l' } else { 'L' });
            }
            'L' => {
                let x = take_number(&tokens, &mut i)?;
                let y = take_number(&tokens, &mut i)?;
                let next = if relative { (pos.0 + x, pos.1 + y) } else { (x, y) };
                segments.push((pos, next));
                pos = next;
            }
            'H' => {
                let x = take_number(&tokens, &mut i)?;
                let next = if relative { (pos.0 + x, pos.1) } else { (x, pos.1) };
                segments.push((pos, next));
                pos = next;
            }
            'V' => {
                let y = take_number(&tokens, &mut i)?;
                let next = if relative { (pos.0, pos.1 + y) } else { (pos.0, y) };
                segments.push((pos, next));
                pos = next;
            }
            other => return Err(PathError::UnsupportedCommand(other)),
        }
        if !started {
            // first command wasn't a move
            return Err(PathError::BadData);
        }
    }
    Ok(segments)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum PathToken {
    Command(char),
    Number(f64),
}

fn tokenize_path(data: &str) -> Result<Vec<PathToken>, PathError> {
    let bytes = data.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\n' | b'\r' | b',' => i += 1,
            b'A'..=b'Z' | b'a'..=b'z' => {
                let c = b as char;
                if !matches!(c, 'M' | 'm' | 'L' | 'l' | 'H' | 'h' | 'V' | 'v' | 'Z' | 'z') {
                    return Err(PathError::UnsupportedCommand(c));
                }
                tokens.push(PathToken::Command(c));
                i += 1;
            }
            b'+' | b'-' | b'.' | b'0'..=b'9' => {
                let start = i;
                i += 1; // sign or first digit
                let mut seen_dot = bytes[start] == b'.';
                while i < bytes.len() {
                    match bytes[i] {
                        b'0'..=b'9' => i += 1,
                        b'.' if !seen_dot => {
                            seen_dot = true;
                            i += 1;
                        }
                        b'e' | b'E' => {
                            i += 1;
                            if i < bytes.len() && matches!(bytes[i], b'+' | b'-') {
                                i += 1;
                            }
                            while i < bytes.len() && bytes[i].is_ascii_digit() {
                                i += 1;
                            }
                            break;
                        }
                        _ => break,
                    }
                }
                let text = std::str::from_utf8(&bytes[start..i]).map_err(|_| PathError::BadData)?;
                let v: f64 = text.parse().map_err(|_| PathError::BadData)?;
                if !v.is_finite() {
                    return Err(PathError::BadData);
                }
                tokens.push(PathToken::Number(v));
            }
            _ => return Err(PathError::BadData),
        }
    }
    Ok(tokens)
}

fn take_number(tokens: &[PathToken], i: &mut usize) -> Result<f64, PathError> {
    match tokens.get(*i) {
        Some(PathToken::Number(v)) => {
            *i += 1;
            Ok(*v)
        }
        _ => Err(PathError::BadData),
    }
}
