pub mod calc;
pub mod cli;
pub mod combinator;
pub mod corelang;
pub mod form;
pub mod grammar;
pub mod number;
pub mod pasqualish;
