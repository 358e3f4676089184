//! Core of the stageseat ticketing service: domain records, the transactional
//! store, seat booking with the coin ledger, review sentiment, catalog search
//! with recommendations, and admin reports.

pub mod admin;
pub mod analytics;
pub mod booking;
pub mod catalog;
pub mod domain;
pub mod policy;
pub mod reviews;
pub mod seed;
pub mod sentiment;
pub mod store;

#[cfg(test)]
mod testutil;

pub use domain::*;
pub use policy::Policy;
