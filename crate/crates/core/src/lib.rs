//! Simulator for the batch dynamic CONGEST model and a library of batch
//! update algorithms running on it.
//!
//! The communication graph is fixed; a sequence of [`graph::BatchUpdate`]s
//! rewrites the edge labelling. For each batch every node runs a
//! [`sim::NodeProgram`] on its incident old/new labels and its auxiliary
//! state, and the engine reports rounds, traffic and auxiliary state size.
//!
//! Algorithms:
//! * [`universal`]: broadcast-everything update for any problem and the
//!   diameter-independent update for radius-`r` problems;
//! * [`clique`]: low-outdegree orientation of the changed edges and
//!   k-clique enumeration;
//! * [`mst`]: minimum spanning tree maintenance on Euler tour forests
//!   ([`ett`]) and distributed matroid bases ([`matroid`]);
//! * [`cclique`]: congested clique routing, universal update, dynamic
//!   matrix multiplication and triangle counting.
//!
//! [`oracles`] holds the sequential references everything is checked
//! against and [`harness`] drives whole experiments.

pub mod cclique;
pub mod clique;
pub mod ett;
pub mod graph;
pub mod harness;
pub mod matroid;
pub mod mst;
pub mod oracles;
pub mod primitives;
pub mod sim;
pub mod universal;
