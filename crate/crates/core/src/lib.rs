pub mod andor;
pub mod bench;
pub mod geometry;
pub mod motion;
pub mod network;
pub mod oracle;
pub mod scenarios;
pub mod sim;
