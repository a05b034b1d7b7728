//! Goal-directed recipe planning.
//!
//! The pipeline runs in five stages:
//!
//! 1. [`knowledge`] expands food classes and cooking actions into a database of
//!    rewrite processes ([`KnowledgeBase`]).
//! 2. [`selection`] chains backwards from a requested dish to the processes and
//!    ingredients that produce it.
//! 3. [`scheduling`] builds the precedence graph between the selected processes,
//!    removes zero-cost ghost processes, and enumerates every permissible order.
//! 4. [`compression`] packs independent processes into the passive time of
//!    others and keeps the fastest plan.
//! 5. [`realization`] renders the plan as text with timestamps and passive
//!    intervals.
//!
//! [`oracle`] holds brute-force reference implementations used to check the
//! enumeration and the optimizer, and [`format`] reads and writes the on-disk
//! knowledge-base, database and supplies files.

pub mod compression;
pub mod format;
pub mod knowledge;
pub mod oracle;
pub mod realization;
pub mod scheduling;
pub mod selection;

pub use compression::{Combination, Optimized, PlanItem, RecipePlan};
pub use knowledge::{
    CookingActionSpec, DescriptiveString, FoodClass, Indicator, KnowledgeBase, KnowledgeError,
    Process, ProcessId, Seconds, Synonym,
};
pub use realization::{PassiveInterval, RenderedRecipe};
pub use scheduling::{PermissibleOrder, RequiresGraph, ScheduleError};
pub use selection::{InsufficientIngredients, SelectError, SelectedContent, Selection};
