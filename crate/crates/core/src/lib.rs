pub mod cli;
pub mod datagen;
pub mod decoder;
pub mod evalharness;
pub mod potentials;
pub mod proofgraph;
pub mod reasoner;
pub mod theory;
