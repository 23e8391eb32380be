//! Reversible pebble transducers with equality tests: semantics, syntactic
//! checks, and the constructions around them (equality elimination, reversal,
//! composition, uniformization, two-way conversions).

pub mod analysis;
pub mod builtins;
pub mod compose;
pub mod guard;
pub mod machine;
pub mod op;
pub mod runner;
pub mod symbol;
pub mod transforms;
pub mod uniformize;

pub use guard::{satisfiable, shift_test, test_of_op, Atom, AtomKind, Test};
pub use machine::{Builder, Configuration, State, StateId, Transducer, Transition};
pub use op::{apply_op, reverse_op, shift_op, PebbleOp};
pub use symbol::Symbol;
