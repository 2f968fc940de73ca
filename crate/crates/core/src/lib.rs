pub mod adjustment;
pub mod algebroid;
pub mod connection;
pub mod conventions;
pub mod dsl;
pub mod extension;
pub mod fixtures;
pub mod geometry;
pub mod pullback;
pub mod report;
pub mod symexpr;
pub mod testing;
