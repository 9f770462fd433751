//! Scene files, result documents and SVG rendering.

pub mod result;
pub mod scene_format;
pub mod svg;

pub use result::{OracleFile, ResultFile, StageStats};
pub use scene_format::{parse_scene, serialize_scene, SceneFile, SceneFileError, FORMAT_VERSION};
pub use svg::{render_svg, Overlay, SvgLayers, PATH_NODES};
