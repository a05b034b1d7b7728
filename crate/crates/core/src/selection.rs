//! Backward chaining from a dish to the processes and ingredients that make it.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::knowledge::{DescriptiveString, KnowledgeBase, Process, ProcessId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SelectError {
    #[error("dish name is empty")]
    EmptyDish,
    #[error("knowledge base derives `{0}` from itself")]
    CyclicKnowledgeBase(String),
}

/// Ingredients drawn from the supplies plus the processes that turn them into
/// the dish.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectedContent {
    /// In the order selection reached them.
    pub ingred_list: Vec<DescriptiveString>,
    pub action_list: Vec<Process>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InsufficientIngredients {
    /// Sorted, deduplicated, never empty.
    pub needed: Vec<DescriptiveString>,
}

impl InsufficientIngredients {
    pub const MESSAGE: &'static str = "Insufficient ingredients, you need:";
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selection {
    Selected(SelectedContent),
    Insufficient(InsufficientIngredients),
}

/// How to pick among several producers of the same string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProducerChoice {
    /// First producer in skills order.
    #[default]
    First,
    /// Uniform choice driven by a seeded generator.
    Seeded(u64),
}

pub fn select_content(
    dish: &DescriptiveString,
    supplies: &BTreeSet<DescriptiveString>,
    kb: &KnowledgeBase,
) -> Result<Selection, SelectError> {
    select_content_with(dish, supplies, kb, ProducerChoice::First)
}

pub fn select_content_with(
    dish: &DescriptiveString,
    supplies: &BTreeSet<DescriptiveString>,
    kb: &KnowledgeBase,
    choice: ProducerChoice,
) -> Result<Selection, SelectError> {
    if dish.as_str().is_empty() {
        return Err(SelectError::EmptyDish);
    }
    let mut rng = match choice {
        ProducerChoice::First => None,
        ProducerChoice::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
    };

    let mut looking_for = VecDeque::from([dish.clone()]);
    let mut enqueued: HashSet<DescriptiveString> = HashSet::from([dish.clone()]);
    let mut ingred_list = Vec::new();
    let mut needed = BTreeSet::new();
    let mut action_list: Vec<Process> = Vec::new();
    let mut chosen: HashMap<DescriptiveString, ProcessId> = HashMap::new();

    while let Some(item) = looking_for.pop_front() {
        if supplies.contains(&item) {
            ingred_list.push(item);
            continue;
        }
        if !kb.recognises(&item) {
            needed.insert(item);
            continue;
        }
        let producers: Vec<&Process> = kb.skills().iter().filter(|p| p.output().contains(&item)).collect();
        let producer = match (&mut rng, producers.as_slice()) {
            (_, []) => None,
            (Some(rng), many) => many.choose(rng).copied(),
            (None, [first, ..]) => Some(*first),
        };
        let Some(producer) = producer else {
            // Recognised but nothing makes it: a raw ingredient the user lacks.
            needed.insert(item);
            continue;
        };
        chosen.insert(item, producer.id().clone());
        if !action_list.iter().any(|p| p.id() == producer.id()) {
            action_list.push(producer.clone());
        }
        for input in producer.input() {
            if enqueued.insert(input.clone()) {
                looking_for.push_back(input.clone());
            }
        }
    }

    if !needed.is_empty() {
        return Ok(Selection::Insufficient(InsufficientIngredients {
            needed: needed.into_iter().collect(),
        }));
    }
    check_acyclic(dish, &chosen, &action_list)?;
    Ok(Selection::Selected(SelectedContent {
        ingred_list,
        action_list,
    }))
}

/// The derivation graph (string -> chosen producer -> its inputs) must not loop
/// back on itself, otherwise the dish can never actually be reached.
fn check_acyclic(
    dish: &DescriptiveString,
    chosen: &HashMap<DescriptiveString, ProcessId>,
    actions: &[Process],
) -> Result<(), SelectError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }
    let by_id: HashMap<&ProcessId, &Process> = actions.iter().map(|p| (p.id(), p)).collect();
    let mut marks: HashMap<&DescriptiveString, Mark> = HashMap::new();
    // Explicit stack: (string, next input index to visit).
    let mut stack: Vec<(&DescriptiveString, usize)> = vec![(dish, 0)];
    marks.insert(dish, Mark::Open);
    while let Some((s, next)) = stack.pop() {
        let inputs: Vec<&DescriptiveString> = chosen
            .get(s)
            .and_then(|id| by_id.get(id))
            .map(|p| p.input().iter().collect())
            .unwrap_or_default();
        if next >= inputs.len() {
            marks.insert(s, Mark::Done);
            continue;
        }
        stack.push((s, next + 1));
        let child = inputs[next];
        match marks.get(child) {
            Some(Mark::Open) => {
                return Err(SelectError::CyclicKnowledgeBase(child.to_string()));
            }
            Some(Mark::Done) => {}
            None => {
                marks.insert(child, Mark::Open);
                stack.push((child, 0));
            }
        }
    }
    Ok(())
}
