//! Deterministic parity tree automata over full binary trees, and the
//! canonical names that order the languages they recognize.
//!
//! An automaton here is a finite set of ranked states with a total
//! transition function: reading a letter at a tree node sends one state to
//! each of the two children. A run over an infinite input tree is accepting
//! when, along every path, the highest rank repeating forever is even.
//!
//! The crate builds up from that model in layers:
//!
//! - [`automaton`]: the machine representation, a line-oriented text format,
//!   alphabet extension, subautomata, and Graphviz export.
//! - [`parity_game`]: two independent solvers for parity games (a recursive
//!   attractor decomposition and small progress measures), used as mutual
//!   oracles for the emptiness check.
//! - [`productive`]: emptiness via a two-player game, productive states, and
//!   the normal form all structural analyses assume.
//! - [`patterns`]: the structural patterns that calibrate a language's
//!   position — flowers, weak flowers, splits, and replication.
//! - [`ordinal`]: ordinals below w^(w*3)+3 in Cantor normal form and the
//!   Mostowski-Rabin index lattice.
//! - [`name`]: canonical names `C(alpha)`, `D(alpha)`, `E(alpha)`, their
//!   order, and the algebra of composition operations on names.
//! - [`builder`]: constructions realizing each name as an actual automaton,
//!   and the composition operations on machines.
//! - [`canonical`]: the decision procedure assigning every automaton the
//!   canonical name of its language, plus the derived classifications.

pub mod automaton;
pub mod builder;
pub mod canonical;
pub mod embed;
pub mod name;
pub mod ordinal;
pub mod parity_game;
pub mod patterns;
pub mod productive;

pub use automaton::{DetTreeAutomaton, Edge, Letter, StateId};
pub use builder::{
    build, build_flower, build_weak_flower, compose_automata, leftmost_states, BuildError,
    ComposeOp,
};
pub use canonical::{canonicalize, classify, wadge_compare, ClassificationReport, TopologicalClass};
pub use embed::{admits_oracle, Admittance};
pub use name::{
    and_name, arrow_name, bminus_oplus_name, components, krep_name, name_leq, name_validate,
    oplus_name, or_name, recompose, CanonicalName, NameError, NameLetter, NameOrder, SimpleName,
};
pub use ordinal::{Index, Ordinal};
pub use patterns::{
    component_flower, condensation, lift_ranks, pattern_report, Condensation, PatternReport,
    WeakFlowerMax,
};
pub use productive::{normalize, nonempty_states, productive_states, NormalizedAutomaton};
