//! Irreducible modules for the subconstituent algebra: the primary module,
//! a full decomposition of the standard module, and verification of the
//! tridiagonal-pair and Askey–Wilson structure on each summand.

mod decompose;
mod primary;
mod verify;

pub use decompose::{decompose, DecomposeOptions, ModuleGroup, ModuleInvariants, TModule, TModuleDecomposition};
pub use primary::{primary_module, PrimaryModule};
pub use verify::{td_relation_residual, verify_relations, verify_tridiagonal_pair, RelationsReport, TridiagonalPairRecord};
