pub mod extract;
pub mod graph;
pub mod harness;
pub mod raster;
pub mod scorer;
pub mod svg;
pub mod synth;
pub mod validate;
