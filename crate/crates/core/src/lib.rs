//! Asymmetry networks and the context algebra for partially specified
//! conditional probability tables.
//!
//! A conditional probability table is represented by a partition of the
//! parents' joint state space, with one distribution per partition element.
//! Partition elements are built as *braces* using two operators: collect
//! (`+`, union of same-typed braces) and cross (`x`, product of disjointly
//! typed braces). A brace bound to a distribution is an asymmetry mapping,
//! and a set of mappings with disjoint braces is a factored CPT. Factored
//! CPTs can be lifted into an explicit context, aligned to a larger parent
//! set, combined, and expanded to a dense table.
//!
//! The `.acpt` text format and the `acpt` command-line tool live in
//! [`dsl`] and [`cli`].

pub mod algebra;
pub mod cli;
pub mod dsl;
pub mod error;
pub mod factored;
pub mod network;
pub mod par;
pub mod report;
pub mod types;

pub use algebra::{
    amap, atoms, atoms_with, braces_disjoint, braces_equal, canonicalize, canonicalize_with,
    collect, cross, element_type_of, enumerate_space, whole_element, Atom, AtomSet, Element,
    ElementType,
};
pub use error::{Error, Result};
pub use factored::{
    align_parents, combine, compression_stats, expand_to_cpt, lift_context, validate_factored,
    CombinePolicy, CompressionStats, DenseCpt, FactorMapping, FactoredCpt,
};
pub use network::{
    is_subnetwork, network_to_factored, subnetwork_to_factored, validate_network,
    validate_partition, validate_subnetwork, AsymmetryNetwork, AsymmetrySubnetwork,
    ConditioningPartition, PartitionElement,
};
pub use par::Execution;
pub use report::{Coverage, ValidationReport, Violation};
pub use types::{
    distributions_equal, normalize, variable_types_disjoint, StateSpace, StateSpaces,
    TypedDistribution, VariableType, DEFAULT_TOLERANCE,
};

/// Default cap on the number of atoms any single enumeration may produce.
pub const DEFAULT_MAX_ATOMS: usize = 1_000_000;

/// Resource limits and execution mode shared by the enumerating operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Config {
    pub max_atoms: usize,
    pub execution: Execution,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            max_atoms: DEFAULT_MAX_ATOMS,
            execution: Execution::default(),
        }
    }
}

impl Config {
    pub fn with_max_atoms(mut self, max_atoms: usize) -> Self {
        self.max_atoms = max_atoms;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }
}
