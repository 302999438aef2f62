//! Model-card storage kept apart from the metadata snapshot.
//!
//! Two layouts are supported:
//! * a directory holding one `<percent-encoded model_id>.md` file per card;
//! * an archive: one concatenated UTF-8 data file plus a tab-separated index
//!   of `model_id<TAB>byte_offset<TAB>byte_length` lines.

use std::collections::HashMap;
use std::fs;
use std::io::{BufRead, BufReader, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use percent_encoding::{percent_decode_str, utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};

use super::record::ModelRecord;
use crate::error::{Error, Result};

const FILE_NAME_SET: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'_').remove(b'.');

pub fn card_file_name(model_id: &str) -> String {
    format!("{}.md", utf8_percent_encode(model_id, FILE_NAME_SET))
}

pub fn model_id_from_file_name(name: &str) -> Option<String> {
    let stem = name.strip_suffix(".md")?;
    percent_decode_str(stem).decode_utf8().ok().map(|s| s.into_owned())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CardStore {
    Directory(PathBuf),
    Archive { data: PathBuf, index: PathBuf },
}

impl CardStore {
    /// A directory path is a directory store; a file path `X` is an archive
    /// whose index lives at `X.idx`.
    pub fn open(path: impl AsRef<Path>) -> Self {
        let path = path.as_ref();
        if path.is_dir() {
            CardStore::Directory(path.to_path_buf())
        } else {
            let mut index = path.as_os_str().to_owned();
            index.push(".idx");
            CardStore::Archive { data: path.to_path_buf(), index: PathBuf::from(index) }
        }
    }

    /// Load every card in the store.
    pub fn load_all(&self) -> Result<HashMap<String, String>> {
        match self {
            CardStore::Directory(dir) => {
                let mut cards = HashMap::new();
                for entry in fs::read_dir(dir)? {
                    let entry = entry?;
                    let name = entry.file_name();
                    let Some(id) = name.to_str().and_then(model_id_from_file_name) else {
                        continue;
                    };
                    cards.insert(id, fs::read_to_string(entry.path())?);
                }
                Ok(cards)
            }
            CardStore::Archive { data, index } => {
                let mut file = fs::File::open(data)?;
                let mut cards = HashMap::new();
                for (n, line) in BufReader::new(fs::File::open(index)?).lines().enumerate() {
                    let line = line?;
                    if line.is_empty() {
                        continue;
                    }
                    let bad = || Error::InvalidInput(format!("card index line {}: {line:?}", n + 1));
                    let mut parts = line.split('\t');
                    let (Some(id), Some(off), Some(len), None) = (parts.next(), parts.next(), parts.next(), parts.next()) else {
                        return Err(bad());
                    };
                    let off: u64 = off.parse().map_err(|_| bad())?;
                    let len: usize = len.parse().map_err(|_| bad())?;
                    file.seek(SeekFrom::Start(off))?;
                    let mut bytes = vec![0; len];
                    file.read_exact(&mut bytes)?;
                    let text = String::from_utf8(bytes).map_err(|_| bad())?;
                    cards.insert(id.to_string(), text);
                }
                Ok(cards)
            }
        }
    }

    /// Write cards to this store, replacing existing entries with the same id.
    /// Archives are rewritten from scratch.
    pub fn write<'a>(&self, cards: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<()> {
        match self {
            CardStore::Directory(dir) => {
                fs::create_dir_all(dir)?;
                for (id, text) in cards {
                    fs::write(dir.join(card_file_name(id)), text)?;
                }
            }
            CardStore::Archive { data, index } => {
                let mut data_out = std::io::BufWriter::new(fs::File::create(data)?);
                let mut index_out = std::io::BufWriter::new(fs::File::create(index)?);
                let mut offset = 0u64;
                for (id, text) in cards {
                    if id.contains(['\t', '\n']) {
                        return Err(Error::InvalidInput(format!("model id {id:?} cannot be indexed")));
                    }
                    data_out.write_all(text.as_bytes())?;
                    writeln!(index_out, "{id}\t{offset}\t{}", text.len())?;
                    offset += text.len() as u64;
                }
                data_out.flush()?;
                index_out.flush()?;
            }
        }
        Ok(())
    }
}

/// Attach cards to records that do not already carry inline card text.
/// Returns the number of records that received a card.
pub fn attach_cards(records: &mut [ModelRecord], cards: &HashMap<String, String>) -> usize {
    let mut attached = 0;
    for r in records.iter_mut().filter(|r| r.card_text.is_none()) {
        if let Some(text) = cards.get(&r.model_id) {
            r.card_text = Some(text.clone());
            attached += 1;
        }
    }
    attached
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_names_round_trip() {
        for id in ["meta-llama/Llama-3.1-8B", "a b/c%d", "org/ünï"] {
            let name = card_file_name(id);
            assert!(!name.contains('/'));
            assert_eq!(model_id_from_file_name(&name).as_deref(), Some(id));
        }
    }

    #[test]
    fn directory_and_archive_stores_agree() {
        let tmp = tempfile::tempdir().unwrap();
        let cards = [("org/a", "# A\nhello"), ("org/b", "ünïcode card")];
        let dir = CardStore::Directory(tmp.path().join("cards"));
        dir.write(cards).unwrap();
        let archive = CardStore::open(tmp.path().join("cards.txt"));
        archive.write(cards).unwrap();
        let a = dir.load_all().unwrap();
        let b = archive.load_all().unwrap();
        assert_eq!(a, b);
        assert_eq!(a["org/b"], "ünïcode card");
        assert_eq!(CardStore::open(tmp.path().join("cards")), dir);
    }
}
