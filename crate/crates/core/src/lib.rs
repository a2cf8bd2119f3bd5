//! Graph codings into differential fields.
//!
//! A graph is turned into a coded graph by attaching small cycle gadgets,
//! the coded graph into a streamed presentation of a differential field in
//! which the coded edges are witnessed by elliptic-curve points, and both
//! steps are undone by decoders that recover the graph exactly.

pub mod exact;
pub mod curve;
pub mod gadgets;
pub mod graph;
pub mod presentation;
pub mod encoder;
pub mod decoder;
pub mod transfer;
pub mod cli;
