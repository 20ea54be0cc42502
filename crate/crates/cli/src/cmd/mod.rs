pub mod analyze;
pub mod construct;
pub mod noise;
pub mod protocol2;
pub mod search;
pub mod verify;
