//! Elements of the ε-graded groups of duality generators: direct sum, the
//! graded tensor product with its sign convention, lagrangian verification,
//! sublagrangian reduction, and normal forms.
//!
//! A generator is a carrier with an ε-symmetric duality: either a group
//! representation with an invariant form, or a local system on a complex
//! with a flat stalk duality (equivalent through holonomy). The class of a
//! generator is computed by iterating meataxe splitting and sublagrangian
//! reduction until the residue is anisotropic, then reading one invariant
//! per surviving isotypic component: a signed multiplicity for types whose
//! reference trace form has nonzero signature, and a multiplicity mod 2
//! otherwise. The anisotropy search is exact where single rational quadrics
//! decide it; anything weaker downgrades the result to non-certified instead
//! of guessing.

pub mod isotropy;

use crate::exactla::{
    kernel, rat, Rational, RationalMatrix, Signature, Subquotient, Subspace, SymmetricForm,
};
use crate::repcat::{
    average_invariant_form, classify_type, endomorphism_algebra, group_closure, hom_space,
    meataxe_split, ClassifyConfig, DualityStructure, Epsilon, MatrixGroupRep, MeataxeOutcome,
    RepError, RepKind, RepTypeResult,
};
use crate::sheaves::{holonomy, LocalSystem, SheafError, SimplicialComplex};
use isotropy::{isotropic_vector, Isotropy};
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LGroupError {
    #[error("ε mismatch: {0} vs {1}")]
    EpsilonMismatch(u8, u8),
    #[error("generators live over different groups/bases")]
    BaseMismatch,
    #[error("subspace is not invariant under the monodromy")]
    NotInvariantSubspace,
    #[error("subspace is not isotropic")]
    NotIsotropic,
    #[error("subspace is not lagrangian")]
    NotLagrangian,
    #[error("manifold parity constraint violated: {0}")]
    Parity(String),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Sheaf(#[from] SheafError),
    #[error(transparent)]
    LinAlg(#[from] crate::exactla::LinAlgError),
}
