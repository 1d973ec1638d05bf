pub mod error;
pub mod field;
pub mod poly;
pub mod complex;
pub mod diffmod;
pub mod deform;
pub mod rigidity;
pub mod betti;
pub mod io;
pub mod gallery;
pub mod report;
pub mod cli;
