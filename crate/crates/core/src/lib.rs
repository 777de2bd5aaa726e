//! Exact learning of hidden weighted graphs from thresholded composite
//! queries: an instrumented oracle, the layer-by-layer and no-threshold
//! reconstruction algorithms, an instance generator and an experiment harness.

pub mod gen;
pub mod graph;
pub mod harness;
pub mod ntr;
pub mod oracle;
pub mod recon;
