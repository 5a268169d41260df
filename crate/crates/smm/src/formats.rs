//! Scenario documents, event streams and plant ledgers on disk.
//!
//! Scenarios and ledgers are single JSON documents. Event streams are
//! newline-delimited JSON, one record per line. Ingestion is strict: the
//! first invalid record aborts with its file and line.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use smm_core::scenario::{ErrorClass, RecordError, SCHEMA_VERSION};
use smm_core::synth::PlantLedger;
use smm_core::{LevelId, Record, Scenario, TeamId};
use thiserror::Error;

/// Where in a source file an error was found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Location {
    pub path: PathBuf,
    pub line: Option<usize>,
    pub column: Option<usize>,
    /// JSON pointer into the document, for errors found after parsing.
    pub pointer: Option<String>,
}

impl Location {
    fn file(path: &Path) -> Self {
        Self {
            path: path.to_path_buf(),
            line: None,
            column: None,
            pointer: None,
        }
    }

    fn at(path: &Path, line: usize, column: usize) -> Self {
        Self {
            line: Some(line),
            column: Some(column),
            ..Self::file(path)
        }
    }

    fn pointer(path: &Path, pointer: String) -> Self {
        Self {
            pointer: Some(pointer),
            ..Self::file(path)
        }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.path.display())?;
        if let Some(line) = self.line {
            write!(f, ":{line}")?;
            if let Some(col) = self.column {
                write!(f, ":{col}")?;
            }
        }
        if let Some(p) = &self.pointer {
            write!(f, "#{p}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{location}: parse error: {message}")]
    Parse {
        location: Box<Location>,
        message: String,
    },
    #[error("{location}: unknown schema_version {version} (supported: {SCHEMA_VERSION})")]
    UnknownVersion {
        location: Box<Location>,
        version: String,
    },
    #[error("{location}: dangling reference `{key}`: {message}")]
    DanglingReference {
        location: Box<Location>,
        key: String,
        message: String,
    },
    #[error(
        "{location}: ordinal {found} does not follow {previous} for team {team} level {level}"
    )]
    OrdinalRegression {
        location: Box<Location>,
        team: TeamId,
        level: LevelId,
        previous: u64,
        found: u64,
    },
    #[error("{location}: unknown agent `{agent}`")]
    UnknownAgent {
        location: Box<Location>,
        agent: String,
    },
    #[error("{location}: t = {t} is outside [0, {duration}]")]
    OutOfRangeTime {
        location: Box<Location>,
        t: f64,
        duration: f64,
    },
    #[error("{location}: unknown target element `{element}`")]
    UnknownElement {
        location: Box<Location>,
        element: String,
    },
}

impl IngestError {
    pub fn location(&self) -> Option<&Location> {
        match self {
            IngestError::Io { .. } => None,
            IngestError::Parse { location, .. }
            | IngestError::UnknownVersion { location, .. }
            | IngestError::DanglingReference { location, .. }
            | IngestError::OrdinalRegression { location, .. }
            | IngestError::UnknownAgent { location, .. }
            | IngestError::OutOfRangeTime { location, .. }
            | IngestError::UnknownElement { location, .. } => Some(location.as_ref()),
        }
    }

    pub fn is_io(&self) -> bool {
        matches!(self, IngestError::Io { .. })
    }

    /// Short name of the error kind, e.g. `OrdinalRegression`.
    pub fn name(&self) -> &'static str {
        match self {
            IngestError::Io { .. } => "Io",
            IngestError::Parse { .. } => "ParseError",
            IngestError::UnknownVersion { .. } => "UnknownVersion",
            IngestError::DanglingReference { .. } => "DanglingReference",
            IngestError::OrdinalRegression { .. } => "OrdinalRegression",
            IngestError::UnknownAgent { .. } => "UnknownAgent",
            IngestError::OutOfRangeTime { .. } => "OutOfRangeTime",
            IngestError::UnknownElement { .. } => "UnknownElement",
        }
    }
}

fn read(path: &Path) -> Result<String, IngestError> {
    fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn json_error(path: &Path, e: &serde_json::Error) -> IngestError {
    IngestError::Parse {
        location: Box::new(Location::at(path, e.line(), e.column())),
        message: e.to_string(),
    }
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str, path: &Path) -> Result<Scenario, IngestError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| json_error(path, &e))?;
    match value.get("schema_version") {
        Some(v) if v.as_u64() == Some(u64::from(SCHEMA_VERSION)) => {}
        Some(v) => {
            return Err(IngestError::UnknownVersion {
                location: Box::new(Location::pointer(path, "/schema_version".into())),
                version: v.to_string(),
            })
        }
        None => {
            return Err(IngestError::Parse {
                location: Box::new(Location::pointer(path, "/schema_version".into())),
                message: "missing field `schema_version`".into(),
            })
        }
    }
    let scenario: Scenario = serde_json::from_str(text).map_err(|e| json_error(path, &e))?;
    scenario.validate().map_err(|e| {
        let location = Box::new(Location::pointer(path, e.pointer()));
        match e.class() {
            ErrorClass::UnknownVersion => IngestError::UnknownVersion {
                location,
                version: scenario.schema_version.to_string(),
            },
            ErrorClass::Dangling => IngestError::DanglingReference {
                key: e.pointer().rsplit('/').next().unwrap_or_default().into(),
                location,
                message: e.to_string(),
            },
            ErrorClass::Malformed => IngestError::Parse {
                location,
                message: e.to_string(),
            },
        }
    })?;
    Ok(scenario)
}

pub fn load_scenario(path: &Path) -> Result<Scenario, IngestError> {
    parse_scenario(&read(path)?, path)
}

/// Parses a newline-delimited record stream and validates every record
/// against the scenario. Blank lines are allowed and ignored.
pub fn parse_events(
    reader: impl BufRead,
    path: &Path,
    scenario: &Scenario,
) -> Result<Vec<Record>, IngestError> {
    let mut records = Vec::new();
    let mut last: BTreeMap<(TeamId, LevelId), u64> = BTreeMap::new();
    for (index, line) in reader.lines().enumerate() {
        let line_no = index + 1;
        let line = line.map_err(|source| IngestError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record: Record = serde_json::from_str(&line).map_err(|e| IngestError::Parse {
            location: Box::new(Location::at(path, line_no, e.column())),
            message: e.to_string(),
        })?;
        let location = || Box::new(Location::at(path, line_no, 1));
        scenario.check_record(&record).map_err(|e| match e {
            RecordError::InvalidTeam(_) => IngestError::Parse {
                location: location(),
                message: e.to_string(),
            },
            RecordError::UnknownLevel(level) => IngestError::DanglingReference {
                location: location(),
                key: level.to_string(),
                message: e.to_string(),
            },
            RecordError::OutOfRangeTime { t, duration } => IngestError::OutOfRangeTime {
                location: location(),
                t,
                duration,
            },
            RecordError::UnknownAgent(agent) => IngestError::UnknownAgent {
                location: location(),
                agent: agent.to_string(),
            },
            RecordError::UnknownElement(element) => IngestError::UnknownElement {
                location: location(),
                element,
            },
        })?;
        if let Record::Update(e) = &record {
            if let Some(previous) = last.insert((e.team, e.level), e.ordinal) {
                if e.ordinal <= previous {
                    return Err(IngestError::OrdinalRegression {
                        location: location(),
                        team: e.team,
                        level: e.level,
                        previous,
                        found: e.ordinal,
                    });
                }
            }
        }
        records.push(record);
    }
    Ok(records)
}

pub fn load_events(path: &Path, scenario: &Scenario) -> Result<Vec<Record>, IngestError> {
    let file = File::open(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_events(BufReader::new(file), path, scenario)
}

pub fn load_ledger(path: &Path) -> Result<PlantLedger, IngestError> {
    let text = read(path)?;
    serde_json::from_str(&text).map_err(|e| json_error(path, &e))
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json_document<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("in-memory values serialize");
    s.push('\n');
    s
}

pub fn write_events(records: &[Record], mut out: impl Write) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn events_to_string(records: &[Record]) -> String {
    let mut buf = Vec::new();
    write_events(records, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), IngestError> {
    fs::write(path, contents).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn save_scenario(scenario: &Scenario, path: &Path) -> Result<(), IngestError> {
    write_file(path, to_json_document(scenario).as_bytes())
}

pub fn save_ledger(ledger: &PlantLedger, path: &Path) -> Result<(), IngestError> {
    write_file(path, to_json_document(ledger).as_bytes())
}

pub fn save_events(records: &[Record], path: &Path) -> Result<(), IngestError> {
    let file = File::create(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_events(records, BufWriter::new(file)).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })
}
