//! Context-free grammars, automata over free groups, Parikh images and the
//! integer feasibility solver behind them.

pub mod cfg;
pub mod fautomaton;
pub mod ilp;
pub mod parikh;
pub mod semilinear;

pub use cfg::{cfg_empty, cfg_intersect_nfa, cfg_member, free_word_problem_cfg, parse_cfg, rid_cfg, Cfg, Symbol};
pub use fautomaton::{fautomaton_to_cfg, FAutomaton};
pub use ilp::{ilp_feasible, ilp_feasible_with, Constraint, IlpInstance, IlpOptions, Relation};
pub use parikh::{parikh_member, parikh_member_with, ParikhEncoding};
pub use semilinear::{semilinear_member, LinearSet, SemilinearSet};
