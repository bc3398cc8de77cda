pub mod clause;
pub mod lang;
pub mod oracle;
pub mod problem;
pub mod rewrite;
pub mod solver;
