//! Packing processes into each other's free time.
//!
//! A process with free time can host independent processes that fit into it
//! ("while boiling the pasta, chop the herbs"). [`concurrent_compression`]
//! walks one permissible order from the back, gives each host the contiguous
//! run of successors that fit, and skips an insertion when the host itself is
//! about to fit into a predecessor. [`optimize`] runs that over every
//! permissible order and keeps the shortest plan.

use std::collections::{BTreeSet, HashMap};

use crate::knowledge::{DescriptiveString, Process, ProcessId, Seconds};
use crate::scheduling::{for_each_order, PermissibleOrder, RequiresGraph, ScheduleError};

/// A host process with others performed during its free time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Combination {
    host: Process,
    host_original_direction: String,
    insertees: Vec<Process>,
    remaining_f_time: Seconds,
}

impl Combination {
    /// Checks capacity; independence is the caller's business since it needs
    /// the precedence graph (see [`RecipePlan::check_coherence`]).
    pub fn new(host: Process, insertees: Vec<Process>) -> Option<Self> {
        let used: Seconds = insertees.iter().map(Process::time).sum();
        let remaining_f_time = host.f_time().checked_sub(used)?;
        Some(Self {
            host_original_direction: host.direction().to_string(),
            host,
            insertees,
            remaining_f_time,
        })
    }

    pub fn host(&self) -> &Process {
        &self.host
    }

    pub fn host_original_direction(&self) -> &str {
        &self.host_original_direction
    }

    pub fn insertees(&self) -> &[Process] {
        &self.insertees
    }

    pub fn remaining_f_time(&self) -> Seconds {
        self.remaining_f_time
    }

    pub fn effective_input(&self) -> BTreeSet<DescriptiveString> {
        self.members().flat_map(|p| p.input().iter().cloned()).collect()
    }

    pub fn effective_output(&self) -> BTreeSet<DescriptiveString> {
        self.members().flat_map(|p| p.output().iter().cloned()).collect()
    }

    /// Host first, then insertees in order.
    pub fn members(&self) -> impl Iterator<Item = &Process> {
        std::iter::once(&self.host).chain(&self.insertees)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanItem {
    Bare(Process),
    Combined(Combination),
}

impl PlanItem {
    pub fn host(&self) -> &Process {
        match self {
            Self::Bare(p) => p,
            Self::Combined(c) => c.host(),
        }
    }

    /// Wall-clock length of the item: the host's time.
    pub fn time(&self) -> Seconds {
        self.host().time()
    }

    /// Free time left at the end of the item.
    pub fn remaining_f_time(&self) -> Seconds {
        match self {
            Self::Bare(p) => p.f_time(),
            Self::Combined(c) => c.remaining_f_time(),
        }
    }

    pub fn members(&self) -> Box<dyn Iterator<Item = &Process> + '_> {
        match self {
            Self::Bare(p) => Box::new(std::iter::once(p)),
            Self::Combined(c) => Box::new(c.members()),
        }
    }

    /// True iff this item needs something `other` produces, judged on the
    /// precedence graph across all members.
    pub fn requires(&self, other: &PlanItem, graph: &RequiresGraph) -> bool {
        self.members()
            .any(|a| other.members().any(|b| graph.requires(a.id(), b.id())))
    }
}

/// Ordered plan items; the makespan is the sum of top-level times.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RecipePlan {
    items: Vec<PlanItem>,
}

/// Which coherence rule a plan breaks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoherenceViolation {
    /// `required` is carried by an item after the one carrying `by`.
    Order { by: ProcessId, required: ProcessId },
    /// A host and one of its insertees are dependent.
    DependentCombination { host: ProcessId, insertee: ProcessId },
    /// Insertees take longer than the host's free time.
    Capacity { host: ProcessId },
    /// The plan does not cover the graph exactly once.
    Coverage(ProcessId),
}

impl RecipePlan {
    pub fn new(items: Vec<PlanItem>) -> Self {
        Self { items }
    }

    pub fn items(&self) -> &[PlanItem] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn total_time(&self) -> Seconds {
        total_time(self)
    }

    pub fn processes(&self) -> impl Iterator<Item = &Process> {
        self.items.iter().flat_map(PlanItem::members)
    }

    /// Ids of top-level processes (hosts and bare items) in plan order.
    pub fn top_level(&self) -> Vec<&ProcessId> {
        self.items.iter().map(|i| i.host().id()).collect()
    }

    /// Checks ordering, host/insertee independence, capacity, and that every
    /// node of `graph` appears exactly once.
    pub fn check_coherence(&self, graph: &RequiresGraph) -> Result<(), CoherenceViolation> {
        // (item index, position inside the item; 0 = host)
        let mut place: HashMap<&ProcessId, (usize, usize)> = HashMap::new();
        for (i, item) in self.items.iter().enumerate() {
            for (k, p) in item.members().enumerate() {
                if place.insert(p.id(), (i, k)).is_some() || !graph.contains(p.id()) {
                    return Err(CoherenceViolation::Coverage(p.id().clone()));
                }
            }
        }
        if let Some(missing) = graph.nodes().iter().find(|id| !place.contains_key(id)) {
            return Err(CoherenceViolation::Coverage(missing.clone()));
        }

        for (a, b) in graph.edges() {
            let (ia, ka) = place[a];
            let (ib, kb) = place[b];
            let order_ok = ib < ia || (ib == ia && ka != 0 && kb != 0 && kb < ka);
            if ib == ia && (ka == 0 || kb == 0) {
                let (host, insertee) = if ka == 0 { (a, b) } else { (b, a) };
                return Err(CoherenceViolation::DependentCombination {
                    host: host.clone(),
                    insertee: insertee.clone(),
                });
            }
            if !order_ok {
                return Err(CoherenceViolation::Order {
                    by: a.clone(),
                    required: b.clone(),
                });
            }
        }

        for item in &self.items {
            if let PlanItem::Combined(c) = item {
                let used: Seconds = c.insertees().iter().map(Process::time).sum();
                if used > c.host().f_time() || c.remaining_f_time() != c.host().f_time() - used {
                    return Err(CoherenceViolation::Capacity {
                        host: c.host().id().clone(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Sum of the times of processes not inserted into another.
pub fn total_time(plan: &RecipePlan) -> Seconds {
    plan.items.iter().map(PlanItem::time).sum()
}

/// Insertion rule: `p1` fits into the remaining free time and the two are
/// independent.
pub fn can_insert(p1: &Process, p2_remaining_f_time: Seconds, independent: bool) -> bool {
    p1.time() <= p2_remaining_f_time && independent
}

/// One decision taken during compression, in the order taken.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompressionEvent {
    /// `insertee` went into `host`, leaving `remaining` seconds of free time.
    Inserted {
        host: ProcessId,
        insertee: ProcessId,
        remaining: Seconds,
    },
    /// `insertee` fitted into `host` but was held back because `host` is
    /// expected to fit into `future_host`.
    Forgone {
        host: ProcessId,
        insertee: ProcessId,
        future_host: ProcessId,
    },
}

struct Slot {
    host: usize,
    insertees: Vec<usize>,
    remaining: Seconds,
}

pub fn concurrent_compression(
    order: &PermissibleOrder,
    processes: &[Process],
    graph: &RequiresGraph,
) -> Result<RecipePlan, ScheduleError> {
    concurrent_compression_traced(order, processes, graph).map(|(plan, _)| plan)
}

/// [`concurrent_compression`] plus the list of insertion decisions.
pub fn concurrent_compression_traced(
    order: &PermissibleOrder,
    processes: &[Process],
    graph: &RequiresGraph,
) -> Result<(RecipePlan, Vec<CompressionEvent>), ScheduleError> {
    let order = PermissibleOrder::new(order.ids().to_vec(), graph)?;
    let by_id: HashMap<&ProcessId, &Process> = processes.iter().map(|p| (p.id(), p)).collect();
    let procs: Vec<&Process> = order
        .ids()
        .iter()
        .map(|id| {
            by_id
                .get(id)
                .copied()
                .ok_or_else(|| ScheduleError::UnknownProcess(id.clone()))
        })
        .collect::<Result<_, _>>()?;
    let dependent = |a: usize, b: usize| !graph.independent(procs[a].id(), procs[b].id());

    let mut list: Vec<Slot> = (0..procs.len())
        .map(|i| Slot {
            host: i,
            insertees: Vec::new(),
            remaining: procs[i].f_time(),
        })
        .collect();
    let mut events = Vec::new();

    for i in (0..list.len()).rev() {
        let host = list[i].host;
        let mut remaining = list[i].remaining;

        // Contiguous run of bare successors that fit.
        let mut concurrents = Vec::new();
        for slot in &list[i + 1..] {
            if !slot.insertees.is_empty() {
                break;
            }
            let q = slot.host;
            if !can_insert(procs[q], remaining, !dependent(host, q)) {
                break;
            }
            concurrents.push(q);
            remaining -= procs[q].time();
        }
        if concurrents.is_empty() {
            continue;
        }

        // Would the host itself fit into something to its left?
        let mut future_host = None;
        let mut required = procs[host].time();
        for slot in list[..i].iter().rev() {
            let before = slot.host;
            if dependent(host, before) {
                break;
            }
            if procs[before].f_time() >= required {
                future_host = Some(before);
                break;
            }
            required += procs[before].time();
        }

        if let Some(future) = future_host {
            let mut dropped: Vec<usize> = Vec::new();
            concurrents.retain(|&q| {
                let drop = dependent(q, future)
                    || dropped.iter().any(|&d| graph.requires(procs[q].id(), procs[d].id()));
                if drop {
                    dropped.push(q);
                    remaining += procs[q].time();
                    events.push(CompressionEvent::Forgone {
                        host: procs[host].id().clone(),
                        insertee: procs[q].id().clone(),
                        future_host: procs[future].id().clone(),
                    });
                }
                !drop
            });
        }
        if concurrents.is_empty() {
            continue;
        }

        let mut running = list[i].remaining;
        for &q in &concurrents {
            running -= procs[q].time();
            events.push(CompressionEvent::Inserted {
                host: procs[host].id().clone(),
                insertee: procs[q].id().clone(),
                remaining: running,
            });
        }
        list.retain(|slot| !concurrents.contains(&slot.host) || slot.host == host);
        let slot = &mut list[i];
        slot.insertees = concurrents;
        slot.remaining = remaining;
    }

    let items = list
        .into_iter()
        .map(|slot| {
            if slot.insertees.is_empty() {
                PlanItem::Bare(procs[slot.host].clone())
            } else {
                PlanItem::Combined(Combination {
                    host: procs[slot.host].clone(),
                    host_original_direction: procs[slot.host].direction().to_string(),
                    insertees: slot.insertees.iter().map(|&q| procs[q].clone()).collect(),
                    remaining_f_time: slot.remaining,
                })
            }
        })
        .collect();
    Ok((RecipePlan::new(items), events))
}

/// The fastest compressed plan over all permissible orders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Optimized {
    pub plan: RecipePlan,
    pub total: Seconds,
    /// The order that produced `plan`.
    pub order: PermissibleOrder,
    /// Compressed total of every permissible order, in enumeration order.
    pub totals: Vec<Seconds>,
}

/// Compresses every permissible order and keeps the first plan with the
/// smallest total. `action_list` must already be ghost-free and `graph` must
/// be the stitched graph over it.
pub fn optimize(action_list: &[Process], graph: &RequiresGraph, limit: usize) -> Result<Optimized, ScheduleError> {
    if let Some(ghost) = action_list.iter().find(|p| p.is_ghost()) {
        return Err(ScheduleError::NotPermissible(format!(
            "ghost `{}` must be removed before optimizing",
            ghost.id()
        )));
    }
    let ids: Vec<ProcessId> = action_list.iter().map(|p| p.id().clone()).collect();
    let mut best: Option<(RecipePlan, Seconds, PermissibleOrder)> = None;
    let mut totals = Vec::new();
    for_each_order(&ids, graph, |ids| {
        if totals.len() == limit {
            return Err(ScheduleError::OrderExplosion {
                reached: limit + 1,
                limit,
            });
        }
        let order = PermissibleOrder::new(ids.to_vec(), graph)?;
        let plan = concurrent_compression(&order, action_list, graph)?;
        let total = plan.total_time();
        totals.push(total);
        if best.as_ref().is_none_or(|(_, t, _)| total < *t) {
            best = Some((plan, total, order));
        }
        Ok(())
    })?;
    let (plan, total, order) = best.expect("at least one order is enumerated");
    Ok(Optimized {
        plan,
        total,
        order,
        totals,
    })
}
