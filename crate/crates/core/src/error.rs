//! Error type shared by the whole crate.
//!
//! Validators report the first problem they find, in a deterministic order,
//! with enough context to locate the offending input entry.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate identifier `{id}`")]
    DuplicateId { id: String },

    #[error("`{context}` refers to unknown identifier `{missing}`")]
    DanglingReference { context: String, missing: String },

    #[error("no composition entry for `{first}` followed by `{then}`")]
    MissingComposition { first: String, then: String },

    #[error("associativity fails on the triple (`{f}`, `{g}`, `{h}`)")]
    BrokenAssociativity { f: String, g: String, h: String },

    #[error("`{first}` (into {mid1}) cannot be followed by `{then}` (out of {mid2})")]
    NotComposable {
        first: String,
        then: String,
        mid1: String,
        mid2: String,
    },

    #[error("composition entry `{first}` then `{then}` is invalid: {detail}")]
    BadComposition {
        first: String,
        then: String,
        detail: String,
    },

    #[error("{what} would need {requested} entries, over the limit of {limit} (see REEDY_LIMIT)")]
    SizeLimit {
        what: String,
        requested: usize,
        limit: usize,
    },

    #[error("not a functor: {detail}")]
    NotAFunctor { detail: String },

    #[error("degree violation on `{morphism}`: {detail}")]
    DegreeViolation { morphism: String, detail: String },

    #[error("the {subcategory} subcategory is not closed: composite of `{first}` and `{then}` is `{composite}`")]
    NotClosed {
        subcategory: String,
        first: String,
        then: String,
        composite: String,
    },

    #[error("`{morphism}` has no (inverse, direct) factorization")]
    FactorizationMissing { morphism: String },

    #[error("`{morphism}` factors ambiguously: ({inv1}, {dir1}) and ({inv2}, {dir2})")]
    FactorizationAmbiguous {
        morphism: String,
        inv1: String,
        dir1: String,
        inv2: String,
        dir2: String,
    },

    #[error("not a Reedy functor: `{morphism}` leaves the {subcategory} subcategory")]
    NotReedy {
        morphism: String,
        subcategory: String,
    },

    #[error("bad anchor: {detail}")]
    BadAnchor { detail: String },

    #[error("diagram is not functorial on the pair (`{first}`, `{then}`)")]
    NotFunctorial { first: String, then: String },

    #[error("diagram provides no function for morphism `{morphism}`")]
    MissingFunction { morphism: String },

    #[error("bad element in `{context}`: {detail}")]
    BadElement { context: String, detail: String },

    #[error("shape mismatch: {detail}")]
    ShapeMismatch { detail: String },

    #[error("not natural at `{morphism}`")]
    NotNatural { morphism: String },

    #[error("precondition failed: {detail}")]
    PreconditionFailed { detail: String },

    #[error("generation failed for seed {seed} after {attempts} attempts")]
    GenerationFailed { seed: u64, attempts: u32 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
