//! PPMI word embeddings and token-level language identification for
//! code-mixed text.
//!
//! The toolkit covers the full path from a token-annotated corpus to a
//! trained tagger:
//!
//! 1. [`corpus`] — tagged corpus files, preprocessing, train/test splits
//! 2. [`cooccurrence`] — vocabulary and sparse word–context counting
//! 3. [`ppmi`] — positive pointwise mutual information transform
//! 4. [`svd`] — randomized truncated SVD and embedding extraction
//! 5. [`classifier`] — linear softmax / SVM token taggers over windowed
//!    embedding features
//! 6. [`metrics`] — precision/recall/F1 reports and the code-mixing index
//! 7. [`analysis`] — bilingual vs monolingual association strength
//! 8. [`pipeline`] — end-to-end orchestration with run manifests, plus a
//!    synthetic two-language corpus generator for experiments
//!
//! Every randomized step takes an explicit seed; identical inputs and
//! configuration reproduce identical artifacts byte for byte.

pub mod analysis;
pub mod classifier;
pub mod cooccurrence;
pub mod corpus;
pub mod error;
pub mod metrics;
pub mod pipeline;
pub mod ppmi;
pub mod svd;

pub use error::{Error, Result};
