//! Mobility indicators from origin-destination matrices, restriction-tier
//! impact statistics, least-squares inference and energy-based GDP
//! nowcasting.

pub mod calendar;
pub mod geo;
pub mod impact;
pub mod indicators;
pub mod nowcast;
pub mod odm;
pub mod reference;
pub mod regress;
pub mod scenario;
mod text;
pub mod timeline;
