//! Choquet rationalizability for finite strategic-form games.

pub mod capacity;
pub mod cli;
pub mod corpus;
pub mod extended;
pub mod game;
pub mod lp;
pub mod rational;
pub mod solver;
pub mod types;
