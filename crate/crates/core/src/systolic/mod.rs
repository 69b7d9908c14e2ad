//! The extended systolic array: functional evaluation, cycle-level traces,
//! the pair occupancy model and trace renderers.

mod functional;
mod render;
mod schedule;
mod trace;

pub use functional::{apply_plan, sort_functional, zip_functional, PairResult, PlanMismatch};
pub use render::{key_token, render_json, render_text, token};
pub use schedule::{pair_cycles, schedule_cycles};
pub use trace::{
    run_pair, trace_sort, trace_zip, CounterId, CounterUpdate, CycleTrace, Instr, Job, KeyState, Payload, PeEvent,
    Routing, TaggedKey, UopInput, UopResult, UopTrace, ValueToken,
};
