//! Finite groups with `u64`-coded elements, and the subgroup algorithms used
//! throughout: closure, normal closure, core, derived subgroup, quotients and
//! composition factors.

mod composition;
mod groups;
mod subgroup;

pub use composition::{
    composition_factors, conjugacy_class, psl2_family_member, psl2_order, CompositionOptions, FactorDescriptor,
    FactorKind,
};
pub use groups::{AddQuotient, FinGroup, ProductGroup, TableGroup};
pub use subgroup::{
    abelianization, closure, core, cosets, derived_subgroup, extend, from_elements,
    intersection, is_normal_in, normal_closure, quotient_group, Subgroup,
};
