//! Snapshot ingestion: parsing registry metadata into [`ModelRecord`]s,
//! extracting traits from tags, card storage and the live registry client.

pub mod card_store;
pub mod dna;
pub mod fetch;
pub mod record;
pub mod snapshot;
pub mod traits;

pub use card_store::{attach_cards, CardStore};
pub use dna::canonical_metadata_string;
pub use fetch::{CardFetch, FetchConfig, RegistryClient, ResumeToken};
pub use record::{ModelRecord, ModelRecordBuilder, ParentRelation, RelationKind, BACKFILL_DATE};
pub use snapshot::{parse_snapshot, write_snapshot, ParseOptions, ParseReport, Snapshot};
pub use traits::{extract_traits, ExtractedTraits};

use crate::error::Result;

/// Fetch the registry listing; see [`RegistryClient::fetch_snapshot`].
pub fn fetch_snapshot<F>(config: FetchConfig, resume: Option<ResumeToken>, on_page: F) -> Result<ResumeToken>
where
    F: FnMut(Vec<serde_json::Value>, &ResumeToken) -> Result<()>,
{
    RegistryClient::new(config)?.fetch_snapshot(resume, on_page)
}

/// Fetch model cards; see [`RegistryClient::fetch_cards`].
pub fn fetch_cards<S: AsRef<str>>(model_ids: &[S], config: FetchConfig) -> Result<CardFetch> {
    RegistryClient::new(config)?.fetch_cards(model_ids)
}
