//! Bell inequalities and nonlocal games.
//!
//! Converts full-correlation and setting-uniform weighted-sum Bell
//! inequalities into nonlocal games and back, computes exact classical values
//! by enumeration, quantum values for two-party XOR games (vector
//! optimization) and see-saw lower bounds for general games, and referees
//! seeded Monte-Carlo plays of a game.

pub mod catalog;
pub mod classical;
pub mod cli;
pub mod io;
pub mod linalg;
pub mod model;
pub mod quantum;
pub mod rng;
pub mod simulate;
pub mod transform;
