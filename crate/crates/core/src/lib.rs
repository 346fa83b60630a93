//! Region labeling for reverse-nearest-neighbor heat maps.
//!
//! Every client has an NN-circle: the ball around it whose radius is the
//! distance to its nearest facility. A new facility at point `q` captures
//! exactly the clients whose circles contain `q`, so the plane splits into
//! regions of constant RNN set. This crate labels those regions with
//! their RNN sets and influence values under L∞, L1 and L2.

pub mod dataset;
pub mod geometry;
pub mod index;
pub mod influence;
pub mod nn;
pub mod oracle;
pub mod rnnset;
pub mod sink;
pub mod sweep;
pub mod locate;
pub mod regions;
pub mod baseline;
pub mod l2;
pub mod render;
pub mod pipeline;
pub mod export;
