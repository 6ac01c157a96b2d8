//! Configurations in free groups, their E-function coordinates, the partial
//! action of the free group on them, and finite-dimensional tests for the
//! associated operator relations.

pub mod action;
pub mod analysis;
pub mod config;
pub mod efunc;
pub mod freegroup;
pub mod matrep;
pub mod model;
