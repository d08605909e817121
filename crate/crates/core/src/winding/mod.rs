//! Winding angles, point indices and exact index fields of closed loops.

mod angle;
mod field;
mod index;
mod sampled;
mod stream;

pub use angle::{closed_winding_angle, winding_angle};
pub use field::{
    index_field, index_histogram, total_winding, total_winding_of, winding_histogram, CellId,
    CellShape, ExactArea, IndexField, IndexHistogram, SplitCell,
};
pub use index::{chord_angle, path_winding, point_index, point_winding, PointIndex, WindingSample};
pub use sampled::{for_each_sample, total_winding_sampled, SampledTotal};
pub use stream::{stream_winding, StreamedWinding};
