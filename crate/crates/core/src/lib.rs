pub mod alist;
pub mod constraint;
pub mod error;
pub mod llr;
pub mod matrix;
pub mod minsum;
pub mod rll;
pub mod trellis;
pub mod construction;
pub mod pipeline;
pub mod config;
pub mod oracle;
