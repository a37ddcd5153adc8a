//! Exact piecewise-linear maps of `[0, 1]`, covering ladders and itinerary tracing.

pub mod ladder;
pub mod plmap;
pub mod trace;

pub use ladder::{build_ladder, build_ladder_with, coding_schedule, Ladder, LadderOptions, LadderVariant, Schedule, ScheduleTag};
pub use plmap::{fmt_q, parse_q, q, q_to_f64, FixedPointSet, PLMap, RatInterval, Q};
pub use trace::{orbit, trace_point, verify_trace, Refinement, TraceLevel, TraceReport};
