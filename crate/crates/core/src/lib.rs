//! Laboratory for compressed Tseitin formulas on cylinder graphs, the
//! compressed cop-robber game, Weisfeiler–Leman refinement on CFI graphs and
//! resolution lifting gadgets.

pub mod graph;
pub mod cnf;
pub mod tseitin;
pub mod resolution;
pub mod game;
pub mod lifting;
pub mod wl;
