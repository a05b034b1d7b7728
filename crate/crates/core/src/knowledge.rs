//! Representation types and the production of the process database.
//!
//! A [`Process`] rewrites a set of [`DescriptiveString`]s into another set. Most
//! processes are not written by hand: [`produce_content`] grows them from
//! [`FoodClass`] seeds by applying every compatible [`CookingActionSpec`] until
//! no action is left enabled, then adds one ghost process per [`Synonym`] and
//! finally any hand-written processes.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::num::NonZeroU64;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Durations are whole seconds.
pub type Seconds = u64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KnowledgeError {
    #[error("descriptive string is empty")]
    EmptyString,
    #[error("process `{0}`: {1}")]
    InvalidProcess(String, String),
    #[error("synonym `{0}`: {1}")]
    InvalidSynonym(String, String),
    #[error("action `{0}`: {1}")]
    InvalidAction(String, String),
    #[error("food class `{0}`: {1}")]
    InvalidFoodClass(String, String),
    #[error("action `{action}` is disabled for `{class}`")]
    IndicatorDisabled { action: String, class: String },
    #[error("duplicate process id `{0}`")]
    DuplicateProcessId(String),
    #[error("string `{0}` is used by a process but missing from can_make")]
    NotInCanMake(String),
}

/// Lowercases and collapses runs of whitespace to a single space.
pub fn normalize(text: &str) -> String {
    text.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// A partial description of a state of affairs, e.g. `chopped carrot`.
///
/// Always stored normalized, so `"  Chopped   Carrot"` and `"chopped carrot"`
/// are the same string.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct DescriptiveString(String);

impl DescriptiveString {
    pub fn new(text: &str) -> Result<Self, KnowledgeError> {
        let text = normalize(text);
        if text.is_empty() {
            return Err(KnowledgeError::EmptyString);
        }
        Ok(Self(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for DescriptiveString {
    type Error = KnowledgeError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Self::new(&value)
    }
}

impl TryFrom<&str> for DescriptiveString {
    type Error = KnowledgeError;

    fn try_from(value: &str) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<DescriptiveString> for String {
    fn from(value: DescriptiveString) -> Self {
        value.0
    }
}

impl fmt::Display for DescriptiveString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Opaque handle naming a process inside one knowledge base.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProcessId(String);

impl ProcessId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ProcessId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ProcessId {
    fn from(value: &str) -> Self {
        Self(value.to_string())
    }
}

impl From<String> for ProcessId {
    fn from(value: String) -> Self {
        Self(value)
    }
}

/// A rewrite step from `input` to `output`.
///
/// `time` is the full duration; the last `f_time` seconds of it leave the cook
/// free. A process with zero time, zero free time and no direction is a ghost:
/// it only bridges vocabulary and is removed before scheduling.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Process {
    id: ProcessId,
    input: BTreeSet<DescriptiveString>,
    output: BTreeSet<DescriptiveString>,
    time: Seconds,
    f_time: Seconds,
    direction: String,
}

impl Process {
    pub fn new(
        id: impl Into<ProcessId>,
        input: impl IntoIterator<Item = DescriptiveString>,
        output: impl IntoIterator<Item = DescriptiveString>,
        time: Seconds,
        f_time: Seconds,
        direction: impl Into<String>,
    ) -> Result<Self, KnowledgeError> {
        let id = id.into();
        let input: BTreeSet<_> = input.into_iter().collect();
        let output: BTreeSet<_> = output.into_iter().collect();
        let invalid = |why: &str| KnowledgeError::InvalidProcess(id.to_string(), why.to_string());
        if input.is_empty() {
            return Err(invalid("input set is empty"));
        }
        if output.is_empty() {
            return Err(invalid("output set is empty"));
        }
        if f_time > time {
            return Err(invalid("f_time exceeds time"));
        }
        let direction = direction.into().trim().to_string();
        Ok(Self {
            id,
            input,
            output,
            time,
            f_time,
            direction,
        })
    }

    pub fn ghost(
        id: impl Into<ProcessId>,
        input: impl IntoIterator<Item = DescriptiveString>,
        output: impl IntoIterator<Item = DescriptiveString>,
    ) -> Result<Self, KnowledgeError> {
        Self::new(id, input, output, 0, 0, "")
    }

    pub fn id(&self) -> &ProcessId {
        &self.id
    }

    pub fn input(&self) -> &BTreeSet<DescriptiveString> {
        &self.input
    }

    pub fn output(&self) -> &BTreeSet<DescriptiveString> {
        &self.output
    }

    pub fn time(&self) -> Seconds {
        self.time
    }

    pub fn f_time(&self) -> Seconds {
        self.f_time
    }

    pub fn direction(&self) -> &str {
        &self.direction
    }

    pub fn is_ghost(&self) -> bool {
        self.time == 0 && self.f_time == 0 && self.direction.is_empty()
    }

    /// True if this process consumes something `other` produces.
    pub fn requires(&self, other: &Process) -> bool {
        self.input.iter().any(|s| other.output.contains(s))
    }

    fn same_content(&self, other: &Process) -> bool {
        self.input == other.input
            && self.output == other.output
            && self.time == other.time
            && self.f_time == other.f_time
            && self.direction == other.direction
    }

    fn with_id(mut self, id: ProcessId) -> Self {
        self.id = id;
        self
    }
}

/// Per-action compatibility of a food class: either disabled, or the time the
/// action takes on that class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Indicator {
    Disabled,
    Duration(NonZeroU64),
}

impl Indicator {
    /// `0` maps to `Disabled`.
    pub fn seconds(seconds: Seconds) -> Self {
        NonZeroU64::new(seconds).map_or(Self::Disabled, Self::Duration)
    }

    pub fn duration(&self) -> Option<Seconds> {
        match self {
            Self::Disabled => None,
            Self::Duration(d) => Some(d.get()),
        }
    }
}

/// How an action changes the state word of a food class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateMode {
    /// `raw carrot` chopped becomes `chopped carrot`.
    #[default]
    Replace,
    /// `raw carrot` chopped becomes `chopped raw carrot`.
    Prepend,
}

/// A root noun with a state and the actions it is still compatible with.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FoodClass {
    pub root: String,
    pub state: String,
    pub indicators: BTreeMap<String, Indicator>,
}

impl FoodClass {
    pub fn new(root: &str, state: &str) -> Self {
        Self {
            root: normalize(root),
            state: normalize(state),
            indicators: BTreeMap::new(),
        }
    }

    pub fn with(mut self, action: &str, seconds: Seconds) -> Self {
        self.indicators
            .insert(action.to_string(), Indicator::seconds(seconds));
        self
    }

    pub fn indicator(&self, action: &str) -> Indicator {
        self.indicators
            .get(action)
            .copied()
            .unwrap_or(Indicator::Disabled)
    }

    /// `state root`, or just `root` when the state is empty.
    pub fn description(&self) -> Result<DescriptiveString, KnowledgeError> {
        DescriptiveString::new(&format!("{} {}", self.state, self.root))
    }
}

/// Data describing one cooking action (chop, boil, fry, ...).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CookingActionSpec {
    pub name: String,
    pub state_word: String,
    /// `{root}` and `{seconds}` are substituted.
    pub direction_template: String,
    pub extra_inputs: BTreeSet<DescriptiveString>,
    /// Seconds of the action that need the cook; the rest is free time.
    /// `None` means the whole action is active.
    pub active_seconds: Option<Seconds>,
    /// Always contains `name`.
    pub disables: BTreeSet<String>,
}

impl CookingActionSpec {
    pub fn new(
        name: &str,
        state_word: &str,
        direction_template: &str,
        extra_inputs: impl IntoIterator<Item = DescriptiveString>,
        active_seconds: Option<Seconds>,
        disables: impl IntoIterator<Item = String>,
    ) -> Result<Self, KnowledgeError> {
        let name = name.trim().to_string();
        if name.is_empty() {
            return Err(KnowledgeError::InvalidAction(
                name,
                "name is empty".to_string(),
            ));
        }
        let mut disables: BTreeSet<String> = disables.into_iter().collect();
        disables.insert(name.clone());
        Ok(Self {
            state_word: normalize(state_word),
            direction_template: direction_template.trim().to_string(),
            extra_inputs: extra_inputs.into_iter().collect(),
            active_seconds,
            disables,
            name,
        })
    }

    pub fn chop() -> Self {
        Self::new("chop", "chopped", "chop the {root}", [], None, [])
            .expect("built-in action is valid")
    }

    pub fn boil() -> Self {
        let water = DescriptiveString::new("boiling water").expect("non-empty");
        Self::new(
            "boil",
            "boiled",
            "boil the {root} for {seconds}",
            [water],
            Some(30),
            [],
        )
        .expect("built-in action is valid")
    }

    /// Frying also rules out boiling afterwards.
    pub fn fry() -> Self {
        Self::new(
            "fry",
            "fried",
            "fry the {root} for {seconds}",
            [],
            Some(120),
            ["boil".to_string()],
        )
        .expect("built-in action is valid")
    }

    pub fn builtin() -> Vec<Self> {
        vec![Self::chop(), Self::boil(), Self::fry()]
    }

    fn free_time(&self, time: Seconds) -> Seconds {
        match self.active_seconds {
            None => 0,
            Some(active) => time.saturating_sub(active),
        }
    }

    fn direction(&self, root: &str, time: Seconds) -> String {
        self.direction_template
            .replace("{root}", root)
            .replace("{seconds}", &time.to_string())
    }
}

/// A name that the production rules cannot build, defined by strings they can.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Synonym {
    name: DescriptiveString,
    definition: BTreeSet<DescriptiveString>,
}

impl Synonym {
    pub fn new(
        name: DescriptiveString,
        definition: impl IntoIterator<Item = DescriptiveString>,
    ) -> Result<Self, KnowledgeError> {
        let definition: BTreeSet<_> = definition.into_iter().collect();
        if definition.is_empty() {
            return Err(KnowledgeError::InvalidSynonym(
                name.to_string(),
                "definition is empty".to_string(),
            ));
        }
        if definition.contains(&name) {
            return Err(KnowledgeError::InvalidSynonym(
                name.to_string(),
                "name appears in its own definition".to_string(),
            ));
        }
        Ok(Self { name, definition })
    }

    pub fn name(&self) -> &DescriptiveString {
        &self.name
    }

    pub fn definition(&self) -> &BTreeSet<DescriptiveString> {
        &self.definition
    }
}

/// Every recognised string plus every recognised process.
///
/// `skills` order matters: selection takes the first producer of a string.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KnowledgeBase {
    can_make: BTreeSet<DescriptiveString>,
    skills: Vec<Process>,
}

impl KnowledgeBase {
    pub fn new(
        can_make: impl IntoIterator<Item = DescriptiveString>,
        skills: Vec<Process>,
    ) -> Result<Self, KnowledgeError> {
        let can_make: BTreeSet<_> = can_make.into_iter().collect();
        let mut ids = HashSet::new();
        for p in &skills {
            if !ids.insert(p.id()) {
                return Err(KnowledgeError::DuplicateProcessId(p.id().to_string()));
            }
            if let Some(s) = p.input().iter().chain(p.output()).find(|s| !can_make.contains(*s)) {
                return Err(KnowledgeError::NotInCanMake(s.to_string()));
            }
        }
        Ok(Self { can_make, skills })
    }

    pub fn can_make(&self) -> &BTreeSet<DescriptiveString> {
        &self.can_make
    }

    pub fn skills(&self) -> &[Process] {
        &self.skills
    }

    pub fn recognises(&self, s: &DescriptiveString) -> bool {
        self.can_make.contains(s)
    }

    pub fn process(&self, id: &ProcessId) -> Option<&Process> {
        self.skills.iter().find(|p| p.id() == id)
    }

    /// Processes whose output contains `s`, in skills order.
    pub fn producers<'a>(
        &'a self,
        s: &'a DescriptiveString,
    ) -> impl Iterator<Item = &'a Process> + 'a {
        self.skills.iter().filter(move |p| p.output().contains(s))
    }
}

/// Applies one action to a food class, yielding the process and the successor
/// class. The process id is provisional (`<action>_<root>`).
pub fn apply_action(
    action: &CookingActionSpec,
    food: &FoodClass,
    mode: StateMode,
) -> Result<(Process, FoodClass), KnowledgeError> {
    let time = food
        .indicator(&action.name)
        .duration()
        .ok_or_else(|| KnowledgeError::IndicatorDisabled {
            action: action.name.clone(),
            class: food
                .description()
                .map(String::from)
                .unwrap_or_else(|_| food.root.clone()),
        })?;

    let mut next = food.clone();
    next.state = match mode {
        StateMode::Replace => action.state_word.clone(),
        StateMode::Prepend => normalize(&format!("{} {}", action.state_word, food.state)),
    };
    for disabled in &action.disables {
        next.indicators.insert(disabled.clone(), Indicator::Disabled);
    }

    let mut input = action.extra_inputs.clone();
    input.insert(food.description()?);
    let process = Process::new(
        ProcessId::new(id_slug(&[&action.name, &food.root])),
        input,
        [next.description()?],
        time,
        action.free_time(time),
        action.direction(&food.root, time),
    )?;
    Ok((process, next))
}

fn id_slug(parts: &[&str]) -> String {
    parts
        .iter()
        .filter(|p| !p.is_empty())
        .map(|p| p.split_whitespace().collect::<Vec<_>>().join("_"))
        .collect::<Vec<_>>()
        .join("_")
}

struct IdAllocator {
    taken: HashSet<ProcessId>,
}

impl IdAllocator {
    /// First free id among the candidates, then the last candidate with a
    /// numeric suffix.
    fn allocate(&mut self, candidates: &[String]) -> ProcessId {
        for c in candidates {
            let id = ProcessId::new(c.clone());
            if self.taken.insert(id.clone()) {
                return id;
            }
        }
        let base = candidates.last().expect("at least one candidate");
        let mut n = 2;
        loop {
            let id = ProcessId::new(format!("{base}_{n}"));
            if self.taken.insert(id.clone()) {
                return id;
            }
            n += 1;
        }
    }
}

/// Builds the knowledge base with state replacement.
pub fn produce_content(
    foods: &[FoodClass],
    actions: &[CookingActionSpec],
    synonyms: &[Synonym],
    custom: &[Process],
) -> Result<KnowledgeBase, KnowledgeError> {
    produce_content_with_mode(foods, actions, synonyms, custom, StateMode::Replace)
}

pub fn produce_content_with_mode(
    foods: &[FoodClass],
    actions: &[CookingActionSpec],
    synonyms: &[Synonym],
    custom: &[Process],
    mode: StateMode,
) -> Result<KnowledgeBase, KnowledgeError> {
    let known: HashSet<&str> = actions.iter().map(|a| a.name.as_str()).collect();
    for a in actions {
        if let Some(unknown) = a.disables.iter().find(|d| !known.contains(d.as_str())) {
            return Err(KnowledgeError::InvalidAction(
                a.name.clone(),
                format!("disables unknown action `{unknown}`"),
            ));
        }
    }
    for f in foods {
        if let Some(unknown) = f.indicators.keys().find(|k| !known.contains(k.as_str())) {
            return Err(KnowledgeError::InvalidFoodClass(
                f.root.clone(),
                format!("indicator for unknown action `{unknown}`"),
            ));
        }
    }

    let mut can_make = BTreeSet::new();
    for f in foods {
        can_make.insert(f.description()?);
    }

    let mut ids = IdAllocator {
        taken: HashSet::new(),
    };
    let mut skills: Vec<Process> = Vec::new();
    let mut seen: HashSet<FoodClass> = foods.iter().cloned().collect();
    let mut worklist: VecDeque<FoodClass> = foods.iter().cloned().collect();

    while let Some(food) = worklist.pop_front() {
        for action in actions {
            if food.indicator(&action.name) == Indicator::Disabled {
                continue;
            }
            let (process, next) = apply_action(action, &food, mode)?;
            if !skills.iter().any(|p| p.same_content(&process)) {
                let id = ids.allocate(&[
                    id_slug(&[&action.name, &food.root]),
                    id_slug(&[&action.name, &food.state, &food.root]),
                ]);
                skills.push(process.with_id(id));
            }
            if seen.insert(next.clone()) {
                worklist.push_back(next);
            }
        }
    }

    for syn in synonyms {
        let id = ids.allocate(&[id_slug(&["ghost", syn.name().as_str()])]);
        skills.push(Process::ghost(
            id,
            syn.definition().iter().cloned(),
            [syn.name().clone()],
        )?);
    }

    for p in custom {
        if !ids.taken.insert(p.id().clone()) {
            return Err(KnowledgeError::DuplicateProcessId(p.id().to_string()));
        }
        skills.push(p.clone());
    }

    for p in &skills {
        can_make.extend(p.input().iter().cloned());
        can_make.extend(p.output().iter().cloned());
    }

    KnowledgeBase::new(can_make, skills)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(s: &str) -> DescriptiveString {
        DescriptiveString::new(s).unwrap()
    }

    #[test]
    fn description_joins_state_and_root() {
        assert_eq!(FoodClass::new("carrot", "raw").description().unwrap(), ds("raw carrot"));
        assert_eq!(FoodClass::new("water", "").description().unwrap(), ds("water"));
        assert_eq!(
            FoodClass::new("carrot", "chopped").description().unwrap(),
            ds("chopped carrot")
        );
    }

    #[test]
    fn strings_are_normalized() {
        assert_eq!(ds("  Vegetable   DAHL "), ds("vegetable dahl"));
        assert_eq!(DescriptiveString::new("   "), Err(KnowledgeError::EmptyString));
    }

    #[test]
    fn chop_replaces_state_and_disables_itself() {
        let carrot = FoodClass::new("carrot", "raw").with("chop", 120);
        let (p, next) = apply_action(&CookingActionSpec::chop(), &carrot, StateMode::Replace).unwrap();
        assert_eq!(p.input(), &BTreeSet::from([ds("raw carrot")]));
        assert_eq!(p.output(), &BTreeSet::from([ds("chopped carrot")]));
        assert_eq!((p.time(), p.f_time()), (120, 0));
        assert_eq!(p.direction(), "chop the carrot");
        assert_eq!(next.description().unwrap(), ds("chopped carrot"));
        assert_eq!(next.indicator("chop"), Indicator::Disabled);
    }

    #[test]
    fn boil_adds_water_and_free_time() {
        let lentils = FoodClass::new("lentils", "").with("boil", 2700);
        let (p, next) = apply_action(&CookingActionSpec::boil(), &lentils, StateMode::Replace).unwrap();
        assert_eq!(p.input(), &BTreeSet::from([ds("lentils"), ds("boiling water")]));
        assert_eq!((p.time(), p.f_time()), (2700, 2670));
        assert_eq!(p.direction(), "boil the lentils for 2700");
        assert_eq!(next.description().unwrap(), ds("boiled lentils"));
    }

    #[test]
    fn boil_free_time_clamps_at_zero() {
        let egg = FoodClass::new("egg", "").with("boil", 20);
        let (p, _) = apply_action(&CookingActionSpec::boil(), &egg, StateMode::Replace).unwrap();
        assert_eq!((p.time(), p.f_time()), (20, 0));
    }

    #[test]
    fn fry_disables_boil_too() {
        let x = FoodClass::new("tofu", "").with("fry", 420).with("boil", 300);
        let (p, next) = apply_action(&CookingActionSpec::fry(), &x, StateMode::Replace).unwrap();
        assert_eq!((p.time(), p.f_time()), (420, 300));
        assert_eq!(next.indicator("fry"), Indicator::Disabled);
        assert_eq!(next.indicator("boil"), Indicator::Disabled);
    }

    #[test]
    fn disabled_indicator_is_an_error() {
        let x = FoodClass::new("tofu", "");
        assert!(matches!(
            apply_action(&CookingActionSpec::chop(), &x, StateMode::Replace),
            Err(KnowledgeError::IndicatorDisabled { .. })
        ));
    }

    #[test]
    fn prepend_mode_accumulates_states() {
        let carrot = FoodClass::new("carrot", "peeled").with("chop", 60);
        let (p, _) = apply_action(&CookingActionSpec::chop(), &carrot, StateMode::Prepend).unwrap();
        assert_eq!(p.output(), &BTreeSet::from([ds("chopped peeled carrot")]));
    }

    #[test]
    fn empty_production_is_empty() {
        let kb = produce_content(&[], &[], &[], &[]).unwrap();
        assert!(kb.can_make().is_empty());
        assert!(kb.skills().is_empty());
    }

    #[test]
    fn synonym_becomes_ghost() {
        let chips = Synonym::new(ds("chips"), [ds("fried sliced potato")]).unwrap();
        let kb = produce_content(&[], &[], &[chips], &[]).unwrap();
        let ghost = &kb.skills()[0];
        assert!(ghost.is_ghost());
        assert_eq!(ghost.output(), &BTreeSet::from([ds("chips")]));
        assert!(kb.recognises(&ds("fried sliced potato")));
    }

    #[test]
    fn synonym_cannot_define_itself() {
        assert!(Synonym::new(ds("chips"), [ds("chips")]).is_err());
        assert!(Synonym::new(ds("chips"), []).is_err());
    }

    #[test]
    fn process_invariants() {
        assert!(Process::new("p", [ds("a")], [ds("b")], 10, 11, "x").is_err());
        assert!(Process::new("p", [], [ds("b")], 10, 1, "x").is_err());
        assert!(Process::new("p", [ds("a")], [], 10, 1, "x").is_err());
        let p = Process::new("p", [ds("a")], [ds("a")], 10, 1, "x").unwrap();
        let q = Process::new("q", [ds("b")], [ds("c")], 0, 0, "").unwrap();
        assert!(p.requires(&p));
        assert!(!q.requires(&q));
        assert!(q.is_ghost());
    }

    #[test]
    fn custom_id_collision_is_rejected() {
        let p = Process::new("mix", [ds("a")], [ds("b")], 10, 0, "mix").unwrap();
        assert_eq!(
            produce_content(&[], &[], &[], &[p.clone(), p]),
            Err(KnowledgeError::DuplicateProcessId("mix".into()))
        );
    }

    #[test]
    fn indicator_for_unknown_action_is_rejected() {
        let f = FoodClass::new("carrot", "raw").with("peel", 30);
        assert!(matches!(
            produce_content(&[f], &CookingActionSpec::builtin(), &[], &[]),
            Err(KnowledgeError::InvalidFoodClass(..))
        ));
    }
}
