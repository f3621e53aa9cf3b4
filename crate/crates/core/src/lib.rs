//! First-order logic over metafinite structures and its correspondence with
//! constant-depth arithmetic circuits: parsing and model checking of FO_R
//! sentences, compilation to numbered tree-like circuits, circuit
//! normalization, and the translation of circuits back into sentences.

pub mod circuit;
pub mod circuit_to_formula;
pub mod compiler;
pub mod gen;
pub mod logic;
pub mod model_checker;
pub mod normalize;
pub mod rational;
pub mod rewrite;
pub mod structure;

pub use circuit::{Circuit, CircuitError, Gate, GateId, GateKind};
pub use circuit_to_formula::{build_sentence, build_val_terms, descriptor_from_circuit, FamilyDescriptor, ReverseError};
pub use compiler::{compile, compile_numbered, gate_oracle, tss_of, CompileError, GateOracle, GateRecord};
pub use logic::{parse_formula, print_formula, Formula, IndexTerm, LogicError, Node, NumberTerm, Signature};
pub use model_checker::{holds, satisfies, Assignment, EvalError};
pub use normalize::{eliminate_aux_gates, level_paths, make_tree_like, NormalizeError};
pub use rational::Rational;
pub use rewrite::{absorb_sums, build_aux_interpretation, eliminate_max, RewriteError};
pub use structure::{decode, encoded_length, parse_structure, recover_universe_size, ArbInterpretation, RStructure, StructureError, Table};
