pub mod cli;
pub mod document;
pub mod parser;
pub mod registry;
