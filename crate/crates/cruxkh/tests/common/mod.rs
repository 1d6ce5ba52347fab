//! Shared test support: an independent brute-force Khovanov oracle.

pub mod oracle;
