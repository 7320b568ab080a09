pub mod lattice;
pub mod layers;
pub mod selftest;
pub mod spectrum;
