//! On-disk formats.
//!
//! * Knowledge-base file (JSON): actions, food classes, synonyms and
//!   hand-written processes. Compiled by [`compile_kb`].
//! * Database file (JSON): the compiled `can_make` and `skills`.
//! * Supplies file: one descriptive string per line, `#` starts a comment line.
//!
//! Both JSON files carry `"format": 1` and reject unknown keys.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::knowledge::{
    produce_content_with_mode, CookingActionSpec, DescriptiveString, FoodClass, Indicator,
    KnowledgeBase, KnowledgeError, Process, ProcessId, Seconds, StateMode, Synonym,
};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported format version {0} (expected {FORMAT_VERSION})")]
    Version(u32),
    #[error("{}{path}: {message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Invalid {
        line: Option<usize>,
        path: String,
        message: String,
    },
}

impl FormatError {
    fn invalid(text: &str, needle: &str, path: String, message: impl ToString) -> Self {
        Self::Invalid {
            line: line_of(text, needle),
            path,
            message: message.to_string(),
        }
    }
}

fn syntax(e: serde_json::Error) -> FormatError {
    FormatError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

/// 1-based line of the first occurrence of `needle` as a JSON string.
fn line_of(text: &str, needle: &str) -> Option<usize> {
    let quoted = serde_json::to_string(needle).ok()?;
    let at = text.find(&quoted)?;
    Some(text[..at].matches('\n').count() + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum IndicatorRecord {
    Flag(bool),
    Seconds(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionRecord {
    pub name: String,
    pub state_word: String,
    pub direction: String,
    #[serde(default)]
    pub extra_inputs: Vec<String>,
    #[serde(default)]
    pub active_seconds: Option<Seconds>,
    #[serde(default)]
    pub disables: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FoodRecord {
    pub root: String,
    #[serde(default)]
    pub state: String,
    #[serde(default)]
    indicators: BTreeMap<String, IndicatorRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynonymRecord {
    pub name: String,
    pub definition: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessRecord {
    /// Optional handle; defaults to `process_<n>` in file order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub input: Vec<String>,
    pub output: Vec<String>,
    pub time: Seconds,
    #[serde(default)]
    pub f_time: Seconds,
    #[serde(default)]
    pub direction: String,
}

/// Knowledge-base source file. When `actions` is absent the built-in chop,
/// boil and fry actions are used.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KnowledgeBaseFile {
    pub format: u32,
    #[serde(default)]
    pub state_mode: StateMode,
    #[serde(default)]
    pub actions: Option<Vec<ActionRecord>>,
    #[serde(default)]
    pub foods: Vec<FoodRecord>,
    #[serde(default)]
    pub synonyms: Vec<SynonymRecord>,
    #[serde(default)]
    pub processes: Vec<ProcessRecord>,
}

fn strings(
    text: &str,
    values: &[String],
    path: impl Fn(usize) -> String,
) -> Result<Vec<DescriptiveString>, FormatError> {
    values
        .iter()
        .enumerate()
        .map(|(i, v)| DescriptiveString::new(v).map_err(|e| FormatError::invalid(text, v, path(i), e)))
        .collect()
}

/// Validated contents of a knowledge-base file, ready for production.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnowledgeSource {
    pub state_mode: StateMode,
    pub actions: Vec<CookingActionSpec>,
    pub foods: Vec<FoodClass>,
    pub synonyms: Vec<Synonym>,
    pub processes: Vec<Process>,
}

impl KnowledgeSource {
    pub fn produce(&self) -> Result<KnowledgeBase, KnowledgeError> {
        produce_content_with_mode(
            &self.foods,
            &self.actions,
            &self.synonyms,
            &self.processes,
            self.state_mode,
        )
    }
}

/// Parses and validates a knowledge-base file.
pub fn parse_kb(text: &str) -> Result<KnowledgeSource, FormatError> {
    let file: KnowledgeBaseFile = serde_json::from_str(text).map_err(syntax)?;
    if file.format != FORMAT_VERSION {
        return Err(FormatError::Version(file.format));
    }

    let actions = match &file.actions {
        None => CookingActionSpec::builtin(),
        Some(records) => {
            let mut names = HashSet::new();
            let mut out = Vec::with_capacity(records.len());
            for (i, a) in records.iter().enumerate() {
                let path = format!("actions[{i}]");
                if !names.insert(a.name.trim().to_string()) {
                    return Err(FormatError::invalid(text, &a.name, path, "duplicate action name"));
                }
                let extra = strings(text, &a.extra_inputs, |k| format!("{path}.extra_inputs[{k}]"))?;
                let spec = CookingActionSpec::new(
                    &a.name,
                    &a.state_word,
                    &a.direction,
                    extra,
                    a.active_seconds,
                    a.disables.iter().map(|d| d.trim().to_string()),
                )
                .map_err(|e| FormatError::invalid(text, &a.name, path.clone(), e))?;
                out.push(spec);
            }
            out
        }
    };

    let mut seen = HashSet::new();
    let mut foods = Vec::with_capacity(file.foods.len());
    for (i, f) in file.foods.iter().enumerate() {
        let path = format!("foods[{i}]");
        let mut food = FoodClass::new(&f.root, &f.state);
        if food.root.is_empty() {
            return Err(FormatError::invalid(text, &f.root, path, "root is empty"));
        }
        if !seen.insert((food.root.clone(), food.state.clone())) {
            return Err(FormatError::invalid(
                text,
                &f.root,
                path,
                format!("duplicate food class `{} {}`", food.state, food.root),
            ));
        }
        for (action, value) in &f.indicators {
            let indicator = match value {
                IndicatorRecord::Flag(false) => Indicator::Disabled,
                IndicatorRecord::Seconds(s) if *s > 0 => Indicator::seconds(*s),
                _ => {
                    return Err(FormatError::invalid(
                        text,
                        action,
                        format!("{path}.indicators.{action}"),
                        "indicator must be false or a positive number of seconds",
                    ))
                }
            };
            food.indicators.insert(action.trim().to_string(), indicator);
        }
        foods.push(food);
    }

    let mut synonyms = Vec::with_capacity(file.synonyms.len());
    for (i, s) in file.synonyms.iter().enumerate() {
        let path = format!("synonyms[{i}]");
        let name = DescriptiveString::new(&s.name)
            .map_err(|e| FormatError::invalid(text, &s.name, format!("{path}.name"), e))?;
        let definition = strings(text, &s.definition, |k| format!("{path}.definition[{k}]"))?;
        synonyms.push(
            Synonym::new(name, definition).map_err(|e| FormatError::invalid(text, &s.name, path, e))?,
        );
    }

    let mut processes = Vec::with_capacity(file.processes.len());
    for (i, p) in file.processes.iter().enumerate() {
        let path = format!("processes[{i}]");
        let id = match &p.name {
            Some(name) if !name.trim().is_empty() => name.trim().to_string(),
            _ => format!("process_{}", i + 1),
        };
        let input = strings(text, &p.input, |k| format!("{path}.input[{k}]"))?;
        let output = strings(text, &p.output, |k| format!("{path}.output[{k}]"))?;
        let process = Process::new(ProcessId::new(id.clone()), input, output, p.time, p.f_time, p.direction.clone())
            .map_err(|e| FormatError::invalid(text, &id, path, e))?;
        processes.push(process);
    }

    Ok(KnowledgeSource {
        state_mode: file.state_mode,
        actions,
        foods,
        synonyms,
        processes,
    })
}

/// Parses a knowledge-base file and runs production over it.
pub fn compile_kb(text: &str) -> Result<KnowledgeBase, FormatError> {
    let source = parse_kb(text)?;
    source.produce().map_err(|e| {
        let needle = match &e {
            KnowledgeError::DuplicateProcessId(id) => id.clone(),
            KnowledgeError::InvalidFoodClass(root, _) => root.clone(),
            KnowledgeError::InvalidAction(name, _) => name.clone(),
            _ => String::new(),
        };
        FormatError::invalid(text, &needle, "knowledge base".to_string(), e)
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SkillRecord {
    id: String,
    input: Vec<String>,
    output: Vec<String>,
    time: Seconds,
    f_time: Seconds,
    direction: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatabaseFile {
    format: u32,
    can_make: Vec<String>,
    skills: Vec<SkillRecord>,
}

/// Serializes a compiled knowledge base. Output is deterministic.
pub fn write_db(kb: &KnowledgeBase) -> String {
    let file = DatabaseFile {
        format: FORMAT_VERSION,
        can_make: kb.can_make().iter().map(|s| s.to_string()).collect(),
        skills: kb
            .skills()
            .iter()
            .map(|p| SkillRecord {
                id: p.id().to_string(),
                input: p.input().iter().map(|s| s.to_string()).collect(),
                output: p.output().iter().map(|s| s.to_string()).collect(),
                time: p.time(),
                f_time: p.f_time(),
                direction: p.direction().to_string(),
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("database serializes");
    out.push('\n');
    out
}

pub fn parse_db(text: &str) -> Result<KnowledgeBase, FormatError> {
    let file: DatabaseFile = serde_json::from_str(text).map_err(syntax)?;
    if file.format != FORMAT_VERSION {
        return Err(FormatError::Version(file.format));
    }
    let can_make = strings(text, &file.can_make, |i| format!("can_make[{i}]"))?;
    let mut skills = Vec::with_capacity(file.skills.len());
    for (i, s) in file.skills.iter().enumerate() {
        let path = format!("skills[{i}]");
        let input = strings(text, &s.input, |k| format!("{path}.input[{k}]"))?;
        let output = strings(text, &s.output, |k| format!("{path}.output[{k}]"))?;
        skills.push(
            Process::new(ProcessId::new(s.id.clone()), input, output, s.time, s.f_time, s.direction.clone())
                .map_err(|e| FormatError::invalid(text, &s.id, path, e))?,
        );
    }
    KnowledgeBase::new(can_make, skills).map_err(|e| {
        let needle = match &e {
            KnowledgeError::DuplicateProcessId(id) | KnowledgeError::NotInCanMake(id) => id.clone(),
            _ => String::new(),
        };
        FormatError::invalid(text, &needle, "database".to_string(), e)
    })
}

/// One string per non-blank line; lines starting with `#` are comments.
/// Duplicates (after normalization) are dropped.
pub fn parse_supplies(text: &str) -> BTreeSet<DescriptiveString> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .filter_map(|l| DescriptiveString::new(l).ok())
        .collect()
}
