//! Lexicographic composition of choice functions under exclusion constraints.
//!
//! A choice function `C` picks a subset of every finite input. Given two of
//! them and an exclusion function `E`, the lexicographic composition lets
//! `C1` choose first and `C2` choose from what `E` leaves behind:
//!
//! ```text
//! L_E(C1, C2)(Y) = C1(Y) ∪ C2(Y ∖ E(C1(Y)))
//! ```
//!
//! The crate evaluates such compositions over a finite ground set, checks
//! path independence and its relatives exhaustively, classifies exclusion
//! functions as threshold-linear with cardinal reuse, and builds explicit
//! counterexamples when an exclusion function fails to preserve a property.
//!
//! ```
//! use lexichoice_core::{ChoiceFunction, ExclusionFunction, GroundSet, ItemSet, LinearOrder};
//! use lexichoice_core::compose::lex_compose;
//!
//! let g = GroundSet::new(3).unwrap();
//! let c1 = ChoiceFunction::responsive(&g, LinearOrder::from_acceptable(&[0, 1, 2], 3).unwrap(), 1).unwrap();
//! let c2 = ChoiceFunction::responsive(&g, LinearOrder::from_acceptable(&[1, 2], 3).unwrap(), 1).unwrap();
//! let c = lex_compose(&c1, &c2, &ExclusionFunction::identity(&g)).unwrap();
//! assert_eq!(c.eval(ItemSet::full(3)).unwrap(), ItemSet::from_items([0, 1]));
//! ```

pub mod battery;
pub mod choice;
pub mod compose;
pub mod contracts;
pub mod error;
pub mod exclusion;
pub mod families;
pub mod order;
pub mod partition;
pub mod props;
pub mod set;
pub mod tlcr;
pub mod witness;

pub use choice::{ChoiceFunction, ChoiceRule, ChoiceTable, ProcedureKind};
pub use compose::CompositionTree;
pub use error::{Error, Result};
pub use exclusion::{Decomposition, ExclusionFunction, ExclusionRule};
pub use families::Domain;
pub use order::LinearOrder;
pub use partition::EquivalencePartition;
pub use props::{Property, PropertyVerdict, TlcrClassification, Violation};
pub use set::{GroundSet, ItemSet, SetValue};
pub use tlcr::{Threshold, TlcrParams};
pub use witness::{Breach, Witness, WitnessCondition};
