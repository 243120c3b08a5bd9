//! Dataset ingestion: IDX image files, sensor time series, windowing and a
//! synthetic sensor generator.

mod idx;
mod sensor;
mod synth;

pub use idx::{load_idx, parse_idx, IdxImageSet, IDX3_MAGIC};
pub use sensor::{
    load_sensor_csv, make_windows, make_windows_all, parse_sensor_csv, write_sensor_csv, NodeSeries, SensorSeries,
    SplitMethod, SplitSpec,
};
pub use synth::synth_sensor_rooms;
