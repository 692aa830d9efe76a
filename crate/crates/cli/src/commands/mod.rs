pub mod correlate;
pub mod evaluate;
pub mod extract;
pub mod registry;
pub mod report;
pub mod select;
pub mod synth;
pub mod train;
pub mod windows;
