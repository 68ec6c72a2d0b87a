//! Decision procedure for the Lambek calculus with bracket modalities and
//! empty antecedents.

pub mod cfg;
pub mod decider;
pub mod derivation;
pub mod oracle;
pub mod pentus;
pub mod proofnet;
pub mod sisterhood;
pub mod syntax;
pub mod translation;

pub use derivation::{check_derivation, Derivation, Hole, Rule};
pub use oracle::{prove, ProofOutcome, SearchBudget};
pub use syntax::{parse_sequent, print_sequent, Formula, Item, MetaFormula, Metrics, Sequent};
pub use translation::{translate, Conn, Literal, OmegaParams, OmegaString};
pub use proofnet::{
    check_net, decode, encode, enumerate_nets, is_planar, net_to_derivation, regions, respects_sisterhood, CodeWord,
    ProofNet, ProofStructure, Violation,
};
pub use sisterhood::{Dfa, DfaStats};
pub use cfg::{intersect, Grammar, Symbol};
pub use pentus::{build_grammar, build_grammar_with, PentusGrammar, SplitPreference};
pub use decider::{bench_family, decide, decide_str, DecideError, DecideOptions, Decision};
