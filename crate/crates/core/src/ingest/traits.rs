//! Trait extraction from registry tags.

use std::collections::BTreeSet;

use super::record::{ParentRelation, RelationKind};

const LICENSE_PREFIX: &str = "license:";
const ARXIV_PREFIX: &str = "arxiv:";
const BASE_MODEL_PREFIX: &str = "base_model:";

/// ISO-639-1 codes plus the ISO-639-2/3 codes that show up as bare tags.
/// Bare tags not listed here are never read as languages.
static ISO_639: &[&str] = &[
    // 639-1
    "aa", "ab", "ae", "af", "ak", "am", "an", "ar", "as", "av", "ay", "az", "ba", "be", "bg", "bh", "bi", "bm", "bn", "bo", "br", "bs",
    "ca", "ce", "ch", "co", "cr", "cs", "cu", "cv", "cy", "da", "de", "dv", "dz", "ee", "el", "en", "eo", "es", "et", "eu", "fa", "ff",
    "fi", "fj", "fo", "fr", "fy", "ga", "gd", "gl", "gn", "gu", "gv", "ha", "he", "hi", "ho", "hr", "ht", "hu", "hy", "hz", "ia", "id",
    "ie", "ig", "ii", "ik", "io", "is", "it", "iu", "ja", "jv", "ka", "kg", "ki", "kj", "kk", "kl", "km", "kn", "ko", "kr", "ks", "ku",
    "kv", "kw", "ky", "la", "lb", "lg", "li", "ln", "lo", "lt", "lu", "lv", "mg", "mh", "mi", "mk", "ml", "mn", "mr", "ms", "mt", "my",
    "na", "nb", "nd", "ne", "ng", "nl", "nn", "no", "nr", "nv", "ny", "oc", "oj", "om", "or", "os", "pa", "pi", "pl", "ps", "pt", "qu",
    "rm", "rn", "ro", "ru", "rw", "sa", "sc", "sd", "se", "sg", "si", "sk", "sl", "sm", "sn", "so", "sq", "sr", "ss", "st", "su", "sv",
    "sw", "ta", "te", "tg", "th", "ti", "tk", "tl", "tn", "to", "tr", "ts", "tt", "tw", "ty", "ug", "uk", "ur", "uz", "ve", "vi", "vo",
    "wa", "wo", "xh", "yi", "yo", "za", "zh", "zu", // 639-2/3
    "ace", "ady", "afr", "ain", "ajp", "akk", "als", "alt", "amh", "ang", "apc", "ara", "arb", "arq", "ary", "arz", "ast", "awa", "aze",
    "bak", "ban", "bar", "bcl", "bel", "bem", "ben", "bho", "bjn", "bpy", "bug", "bul", "bxr", "cat", "cbk", "ceb", "ces", "chr", "ckb",
    "cmn", "crh", "csb", "cym", "dan", "deu", "diq", "dsb", "egl", "ell", "eng", "epo", "est", "eus", "ext", "fas", "fil", "fin", "fra",
    "fur", "gan", "gle", "glg", "glk", "gom", "gsw", "guj", "hak", "hau", "haw", "heb", "hif", "hil", "hin", "hrv", "hsb", "hun", "hye",
    "ibo", "ilo", "ind", "isl", "ita", "jbo", "jpn", "kab", "kan", "kat", "kaz", "kbd", "kea", "khm", "kir", "kmr", "kor", "krc", "ksh",
    "lad", "lao", "lat", "lav", "lij", "lit", "lld", "lmo", "ltg", "lzh", "mad", "mai", "mal", "mar", "mhr", "min", "mkd", "mlt", "mni",
    "mon", "mrj", "msa", "mwl", "mya", "mzn", "nah", "nan", "nap", "nds", "nep", "new", "nld", "nor", "nso", "pag", "pam", "pan", "pap",
    "pcd", "pcm", "pdc", "pes", "pfl", "pms", "pnb", "pnt", "pol", "por", "prs", "quz", "ron", "rue", "rus", "sah", "sat", "scn", "sco",
    "sgs", "shn", "sin", "slk", "slv", "smn", "som", "spa", "sqi", "srn", "srp", "stq", "swa", "swe", "swh", "szl", "tam", "tat", "tel",
    "tet", "tgk", "tgl", "tha", "tpi", "tum", "tur", "tzm", "udm", "ukr", "urd", "uzb", "vec", "vep", "vie", "vls", "war", "wuu", "xal",
    "xho", "xmf", "yor", "yue", "zea", "zho", "zsm", "zul",
];

pub fn is_iso639(code: &str) -> bool {
    ISO_639.contains(&code)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExtractedTraits {
    pub license: Option<String>,
    pub languages: BTreeSet<String>,
    pub arxiv_ids: BTreeSet<String>,
    pub parent_relations: Vec<ParentRelation>,
    pub warnings: Vec<String>,
}

/// Split tags into license, languages, arXiv ids and parent relations.
///
/// The first `license:` tag wins; later ones produce a warning. Parent
/// relations keep declaration order with exact duplicates removed. Anything
/// unrecognised stays in the raw tag list only.
pub fn extract_traits<S: AsRef<str>>(raw_tags: &[S]) -> ExtractedTraits {
    let mut out = ExtractedTraits::default();
    for tag in raw_tags {
        let tag = tag.as_ref().trim();
        if let Some(value) = tag.strip_prefix(LICENSE_PREFIX) {
            let value = value.trim().to_lowercase();
            if value.is_empty() {
                continue;
            }
            match &out.license {
                None => out.license = Some(value),
                Some(kept) if *kept == value => {}
                Some(kept) => out.warnings.push(format!("ignoring license {value:?}; already set to {kept:?}")),
            }
        } else if let Some(id) = tag.strip_prefix(ARXIV_PREFIX) {
            if !id.is_empty() {
                out.arxiv_ids.insert(id.to_string());
            }
        } else if let Some(rest) = tag.strip_prefix(BASE_MODEL_PREFIX) {
            let Some((kind, parent)) = rest.split_once(':') else {
                continue;
            };
            let Ok(kind) = kind.parse::<RelationKind>() else {
                continue;
            };
            if parent.is_empty() {
                continue;
            }
            let relation = ParentRelation { parent_id: parent.to_string(), kind };
            if !out.parent_relations.contains(&relation) {
                out.parent_relations.push(relation);
            }
        } else if (2..=3).contains(&tag.len()) && tag.bytes().all(|b| b.is_ascii_alphabetic()) {
            let code = tag.to_ascii_lowercase();
            if is_iso639(&code) {
                out.languages.insert(code);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefixes_map_to_traits() {
        let t = extract_traits(&["license:apache-2.0", "en", "arxiv:2401.00001"]);
        assert_eq!(t.license.as_deref(), Some("apache-2.0"));
        assert_eq!(t.languages, BTreeSet::from(["en".to_string()]));
        assert_eq!(t.arxiv_ids, BTreeSet::from(["2401.00001".to_string()]));
        assert!(t.parent_relations.is_empty());
        assert!(t.warnings.is_empty());
    }

    #[test]
    fn merge_parents_keep_order() {
        let t = extract_traits(&["base_model:merge:A/x", "base_model:merge:B/y"]);
        let parents: Vec<_> = t.parent_relations.iter().map(|r| (r.parent_id.as_str(), r.kind)).collect();
        assert_eq!(parents, [("A/x", RelationKind::Merge), ("B/y", RelationKind::Merge)]);
    }

    #[test]
    fn first_license_wins_with_one_warning() {
        let t = extract_traits(&["license:mit", "license:gpl-3.0"]);
        assert_eq!(t.license.as_deref(), Some("mit"));
        assert_eq!(t.warnings.len(), 1);
    }

    #[test]
    fn finetune_tag_with_dotted_parent() {
        let t = extract_traits(&["base_model:finetune:Qwen/Qwen1.5-72B"]);
        assert_eq!(t.parent_relations, vec![ParentRelation { parent_id: "Qwen/Qwen1.5-72B".into(), kind: RelationKind::Finetune }]);
    }

    #[test]
    fn non_language_short_tags_are_ignored() {
        let t = extract_traits(&["gg", "pt", "xyz", "EN", "4b", "base_model:Qwen/Qwen1.5-72B"]);
        assert_eq!(t.languages, BTreeSet::from(["en".to_string(), "pt".to_string()]));
        // bare base_model: without a kind is not a lineage declaration
        assert!(t.parent_relations.is_empty());
    }

    #[test]
    fn duplicate_lineage_declarations_collapse() {
        let t = extract_traits(&["base_model:finetune:A/x", "base_model:quantized:A/x", "base_model:finetune:A/x"]);
        assert_eq!(t.parent_relations.len(), 2);
    }

    #[test]
    fn unknown_and_other_licenses_are_kept_literally() {
        assert_eq!(extract_traits(&["license:other"]).license.as_deref(), Some("other"));
        assert_eq!(extract_traits(&["license:unknown"]).license.as_deref(), Some("unknown"));
    }
}
