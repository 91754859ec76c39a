//! Flat-foldability decision for crease patterns on polygonal paper.
//!
//! Pipeline: parse -> [`pattern::build_pattern`] -> [`local_fold::reconstruct`]
//! -> [`arrangement::build`] -> [`decomposition`] -> [`fold_dp::dp_solve`].
//! [`pipeline::analyze`] wires the stages together.

pub mod arrangement;
pub mod decomposition;
pub mod fold_dp;
pub mod geom;
pub mod local_fold;
pub mod pattern;
pub mod pipeline;
pub mod svg;
pub mod testgen;
