//! Storage, file formats, data generation and the HTTP API around
//! `flowboat-core`.

pub mod analysis;
pub mod api;
pub mod catalog_file;
pub mod datagen;
pub mod records;
pub mod store;
pub mod tasks;

pub use flowboat_core as core;
