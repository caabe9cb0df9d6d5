pub mod colorlab;
pub mod gaplab;
pub mod ipslab;
