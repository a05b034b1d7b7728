//! Brute-force reference answers for small instances.
//!
//! Nothing here shares code with the enumeration or compression paths it is
//! used to check: orders come from filtering raw permutations, and the minimum
//! makespan comes from trying every flat assignment of processes to hosts.

use std::collections::BTreeSet;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::compression::{optimize, Combination, PlanItem, RecipePlan};
use crate::knowledge::{Process, ProcessId, Seconds};
use crate::realization::hms;
use crate::scheduling::{PermissibleOrder, RequiresGraph, ScheduleError};

pub const MAX_ORDER_ORACLE: usize = 8;
pub const MAX_MAKESPAN_ORACLE: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{n} processes exceed the oracle limit of {max}")]
    TooLarge { n: usize, max: usize },
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn extend(n: usize, current: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                current.push(i);
                extend(n, current, used, out);
                current.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(n, &mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

/// Every permutation of `set` in which each required process comes earlier.
pub fn all_orders_bruteforce(
    set: &[ProcessId],
    graph: &RequiresGraph,
) -> Result<BTreeSet<PermissibleOrder>, OracleError> {
    if set.len() > MAX_ORDER_ORACLE {
        return Err(OracleError::TooLarge {
            n: set.len(),
            max: MAX_ORDER_ORACLE,
        });
    }
    let mut out = BTreeSet::new();
    for perm in permutations(set.len()) {
        let order: Vec<ProcessId> = perm.iter().map(|&i| set[i].clone()).collect();
        // nothing may require a process placed after it
        let ok = (0..order.len())
            .all(|i| (i + 1..order.len()).all(|j| !graph.requires(&order[i], &order[j])));
        if ok {
            out.insert(PermissibleOrder::new(order, graph)?);
        }
    }
    Ok(out)
}

/// Exhaustive minimum over every coherent flat plan: each process is either
/// top-level or inserted into exactly one top-level host it is independent of,
/// insertees fit the host's free time, and the top-level items can be ordered
/// under the merged precedence. Insertions need not be contiguous.
pub fn min_makespan_bruteforce(
    processes: &[Process],
    graph: &RequiresGraph,
) -> Result<(Seconds, RecipePlan), OracleError> {
    let n = processes.len();
    if n > MAX_MAKESPAN_ORACLE {
        return Err(OracleError::TooLarge {
            n,
            max: MAX_MAKESPAN_ORACLE,
        });
    }
    let requires = |a: usize, b: usize| graph.requires(processes[a].id(), processes[b].id());

    // Digit i of `code` in base n + 1 is the host of process i; n means top level.
    let base = n + 1;
    let count = (0..n).fold(1usize, |acc, _| acc * base);
    let mut best: Option<(Seconds, Vec<usize>, Vec<usize>)> = None;
    let mut assignment = vec![n; n];
    for code in 0..count {
        let mut rest = code;
        for slot in assignment.iter_mut() {
            *slot = rest % base;
            rest /= base;
        }
        if let Some((total, order)) = evaluate(processes, &assignment, &requires) {
            if best.as_ref().is_none_or(|(t, _, _)| total < *t) {
                best = Some((total, assignment.clone(), order));
            }
        }
    }
    let (total, assignment, order) = best.ok_or(ScheduleError::CyclicPrecedence)?;
    Ok((total, witness(processes, &assignment, &order, &requires)))
}

/// Makespan and a top-level order (host indices) if the assignment is
/// coherent.
fn evaluate(
    processes: &[Process],
    assignment: &[usize],
    requires: &impl Fn(usize, usize) -> bool,
) -> Option<(Seconds, Vec<usize>)> {
    let n = processes.len();
    let mut load = vec![0; n];
    for (i, &host) in assignment.iter().enumerate() {
        if host == n {
            continue;
        }
        if host == i || assignment[host] != n || requires(i, host) || requires(host, i) {
            return None;
        }
        load[host] += processes[i].time();
    }
    if (0..n).any(|h| load[h] > processes[h].f_time()) {
        return None;
    }

    let item_of = |i: usize| if assignment[i] == n { i } else { assignment[i] };
    let hosts: Vec<usize> = (0..n).filter(|&i| assignment[i] == n).collect();
    // item edges: x needs y first
    let needs = |x: usize, y: usize| {
        x != y
            && (0..n).any(|a| item_of(a) == x && (0..n).any(|b| item_of(b) == y && requires(a, b)))
    };
    let mut placed: Vec<usize> = Vec::with_capacity(hosts.len());
    let mut remaining = hosts.clone();
    while !remaining.is_empty() {
        let next = remaining
            .iter()
            .position(|&x| remaining.iter().all(|&y| !needs(x, y)))?;
        placed.push(remaining.remove(next));
    }
    let total = hosts.iter().map(|&h| processes[h].time()).sum();
    Some((total, placed))
}

fn witness(
    processes: &[Process],
    assignment: &[usize],
    order: &[usize],
    requires: &impl Fn(usize, usize) -> bool,
) -> RecipePlan {
    let n = processes.len();
    let items = order
        .iter()
        .map(|&h| {
            let mut inner: Vec<usize> = (0..n).filter(|&i| assignment[i] == h).collect();
            // insertees of one host may depend on each other; keep them ordered
            let mut sorted = Vec::with_capacity(inner.len());
            while !inner.is_empty() {
                let next = inner
                    .iter()
                    .position(|&x| inner.iter().all(|&y| x == y || !requires(x, y)))
                    .expect("precedence is acyclic");
                sorted.push(inner.remove(next));
            }
            if sorted.is_empty() {
                PlanItem::Bare(processes[h].clone())
            } else {
                let insertees = sorted.iter().map(|&i| processes[i].clone()).collect();
                PlanItem::Combined(
                    Combination::new(processes[h].clone(), insertees).expect("capacity was checked"),
                )
            }
        })
        .collect();
    RecipePlan::new(items)
}

/// Optimizer result next to the exhaustive minimum for one instance, with
/// enough of the instance to replay it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    pub instance_id: String,
    pub processes: Vec<Process>,
    /// `(a, b)` where `a` requires `b`.
    pub requires: Vec<(ProcessId, ProcessId)>,
    pub optimizer_makespan: Seconds,
    pub optimizer_plan: RecipePlan,
    pub oracle_makespan: Seconds,
    pub witness_plan: RecipePlan,
    pub agrees: bool,
}

#[derive(Serialize)]
struct ReportRecord<'a> {
    format: u32,
    instance_id: &'a str,
    processes: Vec<ProcessRecord<'a>>,
    requires: Vec<[&'a str; 2]>,
    optimizer_makespan: Seconds,
    optimizer_plan: Vec<ItemRecord<'a>>,
    oracle_makespan: Seconds,
    witness_plan: Vec<ItemRecord<'a>>,
    agrees: bool,
}

#[derive(Serialize)]
struct ProcessRecord<'a> {
    id: &'a str,
    time: Seconds,
    f_time: Seconds,
}

#[derive(Serialize)]
struct ItemRecord<'a> {
    host: &'a str,
    insertees: Vec<&'a str>,
    remaining_f_time: Seconds,
}

fn item_records(plan: &RecipePlan) -> Vec<ItemRecord<'_>> {
    plan.items()
        .iter()
        .map(|item| ItemRecord {
            host: item.host().id().as_str(),
            insertees: item.members().skip(1).map(|p| p.id().as_str()).collect(),
            remaining_f_time: item.remaining_f_time(),
        })
        .collect()
}

fn plan_lines(out: &mut String, plan: &RecipePlan) {
    for item in plan.items() {
        match item {
            PlanItem::Bare(p) => out.push_str(&format!("  {}\n", p.id())),
            PlanItem::Combined(c) => {
                let inner: Vec<&str> = c.insertees().iter().map(|p| p.id().as_str()).collect();
                out.push_str(&format!(
                    "  {} <- {} (free {})\n",
                    c.host().id(),
                    inner.join(", "),
                    c.remaining_f_time()
                ));
            }
        }
    }
}

impl OracleReport {
    /// Runs both the optimizer and the exhaustive search.
    pub fn check(
        instance_id: impl Into<String>,
        processes: &[Process],
        graph: &RequiresGraph,
        limit: usize,
    ) -> Result<Self, OracleError> {
        let (oracle_makespan, witness_plan) = min_makespan_bruteforce(processes, graph)?;
        let optimized = optimize(processes, graph, limit)?;
        Ok(Self {
            instance_id: instance_id.into(),
            processes: processes.to_vec(),
            requires: graph.edges().map(|(a, b)| (a.clone(), b.clone())).collect(),
            optimizer_makespan: optimized.total,
            optimizer_plan: optimized.plan,
            oracle_makespan,
            witness_plan,
            agrees: optimized.total == oracle_makespan,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("instance: {}\n", self.instance_id));
        out.push_str("processes:\n");
        for p in &self.processes {
            out.push_str(&format!("  {} time {} free {}\n", p.id(), p.time(), p.f_time()));
        }
        out.push_str("requires:\n");
        for (a, b) in &self.requires {
            out.push_str(&format!("  {a} -> {b}\n"));
        }
        out.push_str(&format!(
            "optimizer makespan: {} ({})\n",
            self.optimizer_makespan,
            hms(self.optimizer_makespan)
        ));
        out.push_str("optimizer plan:\n");
        plan_lines(&mut out, &self.optimizer_plan);
        out.push_str(&format!(
            "oracle makespan: {} ({})\n",
            self.oracle_makespan,
            hms(self.oracle_makespan)
        ));
        out.push_str("witness plan:\n");
        plan_lines(&mut out, &self.witness_plan);
        out.push_str(&format!("agrees: {}\n", if self.agrees { "yes" } else { "no" }));
        out
    }

    pub fn to_json(&self) -> String {
        let record = ReportRecord {
            format: 1,
            instance_id: &self.instance_id,
            processes: self
                .processes
                .iter()
                .map(|p| ProcessRecord {
                    id: p.id().as_str(),
                    time: p.time(),
                    f_time: p.f_time(),
                })
                .collect(),
            requires: self.requires.iter().map(|(a, b)| [a.as_str(), b.as_str()]).collect(),
            optimizer_makespan: self.optimizer_makespan,
            optimizer_plan: item_records(&self.optimizer_plan),
            oracle_makespan: self.oracle_makespan,
            witness_plan: item_records(&self.witness_plan),
            agrees: self.agrees,
        };
        serde_json::to_string_pretty(&record).expect("report serializes")
    }

    /// Writes `<instance_id>.txt` and `<instance_id>.json` under `dir`.
    pub fn persist(&self, dir: &Path) -> io::Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let stem: String = self
            .instance_id
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
            .collect();
        let text = dir.join(format!("{stem}.txt"));
        let json = dir.join(format!("{stem}.json"));
        fs::write(&text, self.to_text())?;
        fs::write(&json, self.to_json() + "\n")?;
        Ok((text, json))
    }
}
