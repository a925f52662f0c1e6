pub mod algebroid;
pub mod exact;
pub mod expr;
pub mod geometry;
pub mod io;
pub mod jj;
pub mod liealg;
pub mod poisson;
pub mod pw;
pub mod sampling;
pub mod structures;
