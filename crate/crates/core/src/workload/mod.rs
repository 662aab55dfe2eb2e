//! Workloads: edge streams, survival-time schedules, generators and replay.

pub mod digest;
pub mod generate;
pub mod record;
pub mod replay;
pub mod schedule;
pub mod stream;

pub use generate::{gen_random_dynamic, gen_star_of_lines, GenError};
pub use record::{MetricsRecord, OpClass, OpStats, CSV_HEADER};
pub use replay::{
    query_battery, replay, ConnectivityStructure, OracleStructure, QueryMode, ReplayConfig,
    ReplayError, StructureError, StructureStats, VerifyOptions, SMALL_GRAPH_VERTICES,
};
pub use schedule::{schedule, EdgeEvent, EventOp, ScheduleError, Survival, WorkloadSchedule};
pub use stream::{
    parse_stream, parse_stream_str, read_stream_file, write_stream, RawEdge, StreamError,
};
