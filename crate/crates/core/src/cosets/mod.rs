//! Double cosets in finite groups, the wreath product `D ≀ Z₂`, and the
//! closed-form classification of the structures defined by `w_a`.

mod classify;
mod group;
pub mod library;
mod partition;
mod wreath;

pub use classify::{
    classify_wa_pair, intersection_type, probe_family, probe_intersection, Cell, IntersectionType,
    PairClassification, ProbeResult, WitnessKind,
};
pub use group::{ElementRef, FiniteGroup, GroupSpec, Subgroup, MAX_ORDER};
pub use partition::{
    coset_membership_equiv, double_cosets, in_double_coset, left_cosets, pm_by_union, pm_by_wreath_orbits,
    pm_double_cosets, right_cosets, CosetPartition, PartitionJson, PartitionKind,
};
pub use wreath::{wreath_mul, WreathElement};
