//! Advisory corpus: parsing, agency-name normalization, and validation.
//!
//! A corpus arrives as two files: a line-delimited advisory stream (one
//! flat JSON object per line) and an agency registry table (CSV). The
//! registry maps every way an agency is written in the wild — canonical
//! identifier, display name, or alias — onto one canonical identifier,
//! with country qualifiers disambiguating acronym collisions such as
//! NCSC-UK vs NCSC-NZ. Matching is case-insensitive and
//! whitespace-normalized but otherwise exact: no fuzzy matching, since a
//! silently misattributed agency is worse than a loud
//! [`CorpusError::UnknownAgency`].

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::AgencyId;

/// Threat category recorded per advisory.
///
/// Retained as descriptive metadata only; graph construction never reads
/// it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThreatType {
    #[serde(rename = "APT")]
    Apt,
    #[serde(rename = "ransomware")]
    Ransomware,
    #[serde(rename = "infrastructure-exploitation")]
    InfrastructureExploitation,
    #[serde(rename = "other")]
    Other,
}

impl fmt::Display for ThreatType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ThreatType::Apt => "APT",
            ThreatType::Ransomware => "ransomware",
            ThreatType::InfrastructureExploitation => "infrastructure-exploitation",
            ThreatType::Other => "other",
        };
        f.write_str(s)
    }
}

/// One advisory: identifier, publication date, threat category, and the
/// normalized set of co-signing agencies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdvisoryRecord {
    pub advisory_id: String,
    pub published: NaiveDate,
    pub threat_type: ThreatType,
    /// Canonical agency identifiers; duplicates collapse at parse time.
    pub agencies: BTreeSet<AgencyId>,
}

impl AdvisoryRecord {
    /// Number of co-authoring agencies (the advisory's clique size).
    pub fn coauthor_count(&self) -> usize {
        self.agencies.len()
    }
}

/// Registry entry: how one agency presents itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AgencyEntry {
    pub display_name: String,
    /// ISO-3166 alpha-2 country code.
    pub country: String,
    pub aliases: BTreeSet<String>,
}

/// Canonical agency identifiers with their display names, country
/// qualifiers, and alias lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AgencyRegistry {
    entries: BTreeMap<AgencyId, AgencyEntry>,
    /// Normalized lookup key -> canonical id. Built once at load.
    #[serde(skip)]
    lookup: BTreeMap<String, AgencyId>,
    /// Bare acronym (qualifier stripped) -> qualified ids sharing it.
    #[serde(skip)]
    stems: BTreeMap<String, Vec<AgencyId>>,
}

/// Violations found by [`validate_corpus`]; data, not errors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    DuplicateAdvisoryId { advisory_id: String },
    UnknownAgency { advisory_id: String, agency: AgencyId },
    EmptyAgencySet { advisory_id: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateAdvisoryId { advisory_id } => {
                write!(f, "{advisory_id}: duplicate advisory_id")
            }
            Violation::UnknownAgency {
                advisory_id,
                agency,
            } => write!(f, "{advisory_id}: agency {agency} not in registry"),
            Violation::EmptyAgencySet { advisory_id } => {
                write!(f, "{advisory_id}: empty agency set")
            }
        }
    }
}

/// Outcome of corpus validation; empty when clean.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// The parsed corpus: advisories in file order, the registry they were
/// normalized against, and a free-text provenance note.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusDataset {
    pub advisories: Vec<AdvisoryRecord>,
    pub registry: AgencyRegistry,
    pub provenance: String,
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("schema error at line {line}: {message}")]
    Schema { line: usize, message: String },
    #[error("registry error: {message}")]
    Registry { message: String },
    #[error("unknown agency {raw:?}{}", advisory_context(.advisory_id))]
    UnknownAgency {
        raw: String,
        advisory_id: Option<String>,
    },
    #[error(
        "ambiguous agency {raw:?}: matches {}{}",
        candidates.join(", "),
        advisory_context(.advisory_id)
    )]
    AmbiguousAgency {
        raw: String,
        candidates: Vec<AgencyId>,
        advisory_id: Option<String>,
    },
}

fn advisory_context(advisory_id: &Option<String>) -> String {
    match advisory_id {
        Some(id) => format!(" (advisory {id})"),
        None => String::new(),
    }
}

/// Case-fold and collapse whitespace runs; the registry's matching key.
fn normalize_key(raw: &str) -> String {
    raw.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

/// Bare acronym of a qualified identifier: the prefix before a final
/// `-XX` country qualifier (two ASCII letters). `NCSC-UK` -> `ncsc`;
/// `SK-CERT` has no qualifier and therefore no stem.
fn qualifier_stem(id: &str) -> Option<String> {
    let (prefix, suffix) = id.rsplit_once('-')?;
    if !prefix.is_empty()
        && suffix.len() == 2
        && suffix.chars().all(|c| c.is_ascii_alphabetic())
    {
        Some(normalize_key(prefix))
    } else {
        None
    }
}

impl AgencyRegistry {
    /// Builds a registry from `(canonical_id, entry)` pairs, checking
    /// well-formedness: ids unique and non-empty, country codes
    /// two-letter uppercase, and no display name or alias mapping to two
    /// different canonical identifiers.
    pub fn from_entries<I>(pairs: I) -> Result<Self, CorpusError>
    where
        I: IntoIterator<Item = (AgencyId, AgencyEntry)>,
    {
        let mut entries: BTreeMap<AgencyId, AgencyEntry> = BTreeMap::new();
        for (id, entry) in pairs {
            if id.trim().is_empty() {
                return Err(CorpusError::Registry {
                    message: "empty canonical_id".into(),
                });
            }
            if entry.country.len() != 2
                || !entry.country.chars().all(|c| c.is_ascii_uppercase())
            {
                return Err(CorpusError::Registry {
                    message: format!(
                        "{id}: country {:?} is not an ISO-3166 alpha-2 code",
                        entry.country
                    ),
                });
            }
            if entries.insert(id.clone(), entry).is_some() {
                return Err(CorpusError::Registry {
                    message: format!("duplicate canonical_id {id}"),
                });
            }
        }

        let mut lookup: BTreeMap<String, AgencyId> = BTreeMap::new();
        let mut claim = |key: String, id: &AgencyId| -> Result<(), CorpusError> {
            if key.is_empty() {
                return Err(CorpusError::Registry {
                    message: format!("{id}: empty name or alias"),
                });
            }
            match lookup.get(&key) {
                Some(owner) if owner != id => Err(CorpusError::Registry {
                    message: format!(
                        "{key:?} maps to both {owner} and {id}"
                    ),
                }),
                _ => {
                    lookup.insert(key, id.clone());
                    Ok(())
                }
            }
        };
        for (id, entry) in &entries {
            claim(normalize_key(id), id)?;
            claim(normalize_key(&entry.display_name), id)?;
            for alias in &entry.aliases {
                claim(normalize_key(alias), id)?;
            }
        }

        let mut stems: BTreeMap<String, Vec<AgencyId>> = BTreeMap::new();
        for id in entries.keys() {
            if let Some(stem) = qualifier_stem(id) {
                stems.entry(stem).or_default().push(id.clone());
            }
        }
        stems.retain(|_, ids| ids.len() >= 2);
        // A bare acronym shared by several qualified entries must stay
        // ambiguous; an alias claiming it would quietly pick a winner.
        for stem in stems.keys() {
            if let Some(owner) = lookup.get(stem) {
                return Err(CorpusError::Registry {
                    message: format!(
                        "{stem:?} is an alias of {owner} but is shared by \
                         multiple qualified identifiers"
                    ),
                });
            }
        }

        Ok(AgencyRegistry {
            entries,
            lookup,
            stems,
        })
    }

    /// Reads the registry CSV (`canonical_id,display_name,country,aliases`
    /// with semicolon-separated aliases).
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self, CorpusError> {
        let mut csv_reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(reader);
        {
            let headers = csv_reader.headers().map_err(|e| CorpusError::Registry {
                message: format!("unreadable header: {e}"),
            })?;
            let expected = ["canonical_id", "display_name", "country", "aliases"];
            if headers.iter().collect::<Vec<_>>() != expected {
                return Err(CorpusError::Registry {
                    message: format!(
                        "header must be {}, got {:?}",
                        expected.join(","),
                        headers.iter().collect::<Vec<_>>().join(",")
                    ),
                });
            }
        }
        let mut pairs = Vec::new();
        for (i, row) in csv_reader.records().enumerate() {
            let row = row.map_err(|e| CorpusError::Registry {
                message: format!("row {}: {e}", i + 2),
            })?;
            if row.len() != 4 {
                return Err(CorpusError::Registry {
                    message: format!("row {}: expected 4 columns", i + 2),
                });
            }
            let aliases = row[3]
                .split(';')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect();
            pairs.push((
                row[0].trim().to_string(),
                AgencyEntry {
                    display_name: row[1].trim().to_string(),
                    country: row[2].trim().to_string(),
                    aliases,
                },
            ));
        }
        Self::from_entries(pairs)
    }

    pub fn from_csv_path<P: AsRef<Path>>(path: P) -> Result<Self, CorpusError> {
        Self::from_csv_reader(File::open(path)?)
    }

    pub fn entries(&self) -> &BTreeMap<AgencyId, AgencyEntry> {
        &self.entries
    }

    pub fn get(&self, id: &str) -> Option<&AgencyEntry> {
        self.entries.get(id)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Re-emits the registry table in canonical CSV form.
    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record(["canonical_id", "display_name", "country", "aliases"])
            .expect("in-memory write");
        for (id, entry) in &self.entries {
            let aliases = entry
                .aliases
                .iter()
                .map(String::as_str)
                .collect::<Vec<_>>()
                .join(";");
            writer
                .write_record([id, &entry.display_name, &entry.country, &aliases])
                .expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush"))
            .expect("csv output is utf-8")
    }
}

/// Resolves a raw agency string to its canonical identifier.
///
/// Matching tries the canonical id, display name, and aliases, all after
/// trimming, whitespace collapse, and case folding. A bare acronym shared
/// by several qualified entries (e.g. `NCSC` when NCSC-UK and NCSC-NZ are
/// both registered) is rejected as ambiguous rather than guessed.
/// Idempotent on resolvable input: canonical identifiers resolve to
/// themselves.
pub fn normalize_agency(
    raw: &str,
    registry: &AgencyRegistry,
) -> Result<AgencyId, CorpusError> {
    let key = normalize_key(raw);
    if let Some(id) = registry.lookup.get(&key) {
        return Ok(id.clone());
    }
    if let Some(ids) = registry.stems.get(&key) {
        return Err(CorpusError::AmbiguousAgency {
            raw: raw.to_string(),
            candidates: ids.clone(),
            advisory_id: None,
        });
    }
    Err(CorpusError::UnknownAgency {
        raw: raw.to_string(),
        advisory_id: None,
    })
}

/// Raw advisory line as it appears on disk, before normalization.
#[derive(Debug, Deserialize)]
struct RawAdvisory {
    advisory_id: String,
    published: String,
    threat_type: String,
    agencies: Vec<String>,
}

/// Attaches the advisory identifier to agency-resolution failures so the
/// operator knows which record needs a registry fix.
fn attach_advisory(err: CorpusError, advisory_id: &str) -> CorpusError {
    match err {
        CorpusError::UnknownAgency { raw, .. } => CorpusError::UnknownAgency {
            raw,
            advisory_id: Some(advisory_id.to_string()),
        },
        CorpusError::AmbiguousAgency {
            raw, candidates, ..
        } => CorpusError::AmbiguousAgency {
            raw,
            candidates,
            advisory_id: Some(advisory_id.to_string()),
        },
        other => other,
    }
}

fn parse_threat_type(raw: &str) -> Option<ThreatType> {
    match raw {
        "APT" => Some(ThreatType::Apt),
        "ransomware" => Some(ThreatType::Ransomware),
        "infrastructure-exploitation" => Some(ThreatType::InfrastructureExploitation),
        "other" => Some(ThreatType::Other),
        _ => None,
    }
}

/// Parses the line-delimited advisory stream against a registry.
///
/// Every agency string is normalized to canonical form and duplicate
/// mentions within one advisory collapse into the set. Record order is
/// preserved. Unknown or ambiguous agencies abort the parse with the
/// advisory identifier attached; cross-record invariants such as
/// advisory-id uniqueness are left to [`validate_corpus`], which reports
/// them as data instead of failing fast.
pub fn parse_corpus<R: BufRead>(
    reader: R,
    registry: AgencyRegistry,
    provenance: impl Into<String>,
) -> Result<CorpusDataset, CorpusError> {
    let mut advisories = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawAdvisory =
            serde_json::from_str(&line).map_err(|e| CorpusError::Schema {
                line: line_no,
                message: e.to_string(),
            })?;
        if raw.advisory_id.trim().is_empty() {
            return Err(CorpusError::Schema {
                line: line_no,
                message: "empty advisory_id".into(),
            });
        }
        let published = NaiveDate::parse_from_str(&raw.published, "%Y-%m-%d")
            .map_err(|e| CorpusError::Schema {
                line: line_no,
                message: format!("bad date {:?}: {e}", raw.published),
            })?;
        let threat_type =
            parse_threat_type(&raw.threat_type).ok_or_else(|| CorpusError::Schema {
                line: line_no,
                message: format!("unknown threat_type {:?}", raw.threat_type),
            })?;
        if raw.agencies.is_empty() {
            return Err(CorpusError::Schema {
                line: line_no,
                message: "agencies must be non-empty".into(),
            });
        }
        let mut agencies = BTreeSet::new();
        for raw_agency in &raw.agencies {
            let canonical = normalize_agency(raw_agency, &registry)
                .map_err(|e| attach_advisory(e, &raw.advisory_id))?;
            agencies.insert(canonical);
        }
        advisories.push(AdvisoryRecord {
            advisory_id: raw.advisory_id,
            published,
            threat_type,
            agencies,
        });
    }
    Ok(CorpusDataset {
        advisories,
        registry,
        provenance: provenance.into(),
    })
}

/// Loads corpus and registry files from disk.
pub fn load_corpus<P: AsRef<Path>, Q: AsRef<Path>>(
    corpus_path: P,
    registry_path: Q,
) -> Result<CorpusDataset, CorpusError> {
    let registry = AgencyRegistry::from_csv_path(&registry_path)?;
    let file = File::open(&corpus_path)?;
    let provenance = format!(
        "corpus: {}; registry: {}",
        corpus_path.as_ref().display(),
        registry_path.as_ref().display()
    );
    parse_corpus(BufReader::new(file), registry, provenance)
}

/// Checks every corpus invariant and reports violations as data.
pub fn validate_corpus(corpus: &CorpusDataset) -> ValidationReport {
    let mut violations = Vec::new();
    let mut seen_ids: BTreeSet<&str> = BTreeSet::new();
    for advisory in &corpus.advisories {
        if !seen_ids.insert(&advisory.advisory_id) {
            violations.push(Violation::DuplicateAdvisoryId {
                advisory_id: advisory.advisory_id.clone(),
            });
        }
        if advisory.agencies.is_empty() {
            violations.push(Violation::EmptyAgencySet {
                advisory_id: advisory.advisory_id.clone(),
            });
        }
        for agency in &advisory.agencies {
            if !corpus.registry.entries.contains_key(agency) {
                violations.push(Violation::UnknownAgency {
                    advisory_id: advisory.advisory_id.clone(),
                    agency: agency.clone(),
                });
            }
        }
    }
    ValidationReport { violations }
}

impl CorpusDataset {
    /// Distinct agencies appearing in at least one advisory.
    pub fn distinct_agencies(&self) -> BTreeSet<AgencyId> {
        self.advisories
            .iter()
            .flat_map(|a| a.agencies.iter().cloned())
            .collect()
    }

    /// Re-emits the advisories as canonical line-delimited records.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for advisory in &self.advisories {
            let value = serde_json::json!({
                "advisory_id": advisory.advisory_id,
                "published": advisory.published.format("%Y-%m-%d").to_string(),
                "threat_type": advisory.threat_type.to_string(),
                "agencies": advisory.agencies.iter().collect::<Vec<_>>(),
            });
            out.push_str(&value.to_string());
            out.push('\n');
        }
        out
    }
}
