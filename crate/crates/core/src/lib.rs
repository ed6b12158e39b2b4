//! Exact symbolic engine for (-2)-shifted polyvectors, flat right connections,
//! the right de Rham BV operator and order-by-order quantisation.

pub mod algebra;
pub mod connection;
pub mod polyvector;
pub mod quantisation;
pub mod toy_models;
