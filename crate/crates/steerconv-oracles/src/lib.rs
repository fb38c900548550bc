pub mod brute;
pub mod checks;
pub mod report;
pub mod suite;
