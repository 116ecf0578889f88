pub mod bench;
pub mod catalog;
pub mod cli;
pub mod datasets;
pub mod edk;
pub mod kita;
pub mod planted;
pub mod predictor;
pub mod record;
pub mod search;
pub mod triangle;
pub mod value;
