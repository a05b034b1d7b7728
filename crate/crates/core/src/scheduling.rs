//! Precedence between selected processes and enumeration of permissible orders.
//!
//! `requires(a, b)` holds when `a` consumes something `b` produces, so `b` has to
//! finish before `a` starts. A permissible order is a linear extension of that
//! relation; [`find_all_lists`] produces every one of them.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::knowledge::{Process, ProcessId};

/// Orders enumerated before [`find_all_lists`] gives up.
pub const DEFAULT_ORDER_LIMIT: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("precedence between processes is cyclic")]
    CyclicPrecedence,
    #[error("more than {limit} permissible orders (stopped at {reached})")]
    OrderExplosion { reached: usize, limit: usize },
    #[error("unknown process `{0}`")]
    UnknownProcess(ProcessId),
    #[error("duplicate process `{0}`")]
    DuplicateProcess(ProcessId),
    #[error("order is not permissible: {0}")]
    NotPermissible(String),
}

/// True iff `p1` consumes something `p2` produces.
pub fn requires(p1: &Process, p2: &Process) -> bool {
    p1.requires(p2)
}

/// Directed graph over process ids; an edge `(a, b)` means `a` requires `b`.
///
/// Nodes keep the order they were given in, which is the tie-break order used
/// by enumeration. Always acyclic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequiresGraph {
    nodes: Vec<ProcessId>,
    index: HashMap<ProcessId, usize>,
    edges: BTreeSet<(usize, usize)>,
}

impl RequiresGraph {
    /// Builds a graph from explicit edges, rejecting unknown ids, duplicates and
    /// cycles.
    pub fn from_edges<'a>(
        nodes: impl IntoIterator<Item = ProcessId>,
        edges: impl IntoIterator<Item = (&'a ProcessId, &'a ProcessId)>,
    ) -> Result<Self, ScheduleError> {
        let mut graph = Self::with_nodes(nodes)?;
        for (a, b) in edges {
            let a = graph.position(a)?;
            let b = graph.position(b)?;
            graph.edges.insert((a, b));
        }
        graph.check_acyclic()?;
        Ok(graph)
    }

    fn with_nodes(nodes: impl IntoIterator<Item = ProcessId>) -> Result<Self, ScheduleError> {
        let nodes: Vec<ProcessId> = nodes.into_iter().collect();
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, id) in nodes.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(ScheduleError::DuplicateProcess(id.clone()));
            }
        }
        Ok(Self {
            nodes,
            index,
            edges: BTreeSet::new(),
        })
    }

    fn position(&self, id: &ProcessId) -> Result<usize, ScheduleError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| ScheduleError::UnknownProcess(id.clone()))
    }

    fn check_acyclic(&self) -> Result<(), ScheduleError> {
        let n = self.nodes.len();
        let mut pending = vec![0usize; n];
        let mut dependents = vec![Vec::new(); n];
        for &(a, b) in &self.edges {
            pending[a] += 1;
            dependents[b].push(a);
        }
        let mut ready: Vec<usize> = (0..n).filter(|&i| pending[i] == 0).collect();
        let mut placed = 0;
        while let Some(b) = ready.pop() {
            placed += 1;
            for &a in &dependents[b] {
                pending[a] -= 1;
                if pending[a] == 0 {
                    ready.push(a);
                }
            }
        }
        if placed == n {
            Ok(())
        } else {
            Err(ScheduleError::CyclicPrecedence)
        }
    }

    pub fn nodes(&self) -> &[ProcessId] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, id: &ProcessId) -> bool {
        self.index.contains_key(id)
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (&ProcessId, &ProcessId)> + '_ {
        self.edges
            .iter()
            .map(|&(a, b)| (&self.nodes[a], &self.nodes[b]))
    }

    /// Edge lookup; unknown ids never require anything.
    pub fn requires(&self, a: &ProcessId, b: &ProcessId) -> bool {
        match (self.index.get(a), self.index.get(b)) {
            (Some(&a), Some(&b)) => self.edges.contains(&(a, b)),
            _ => false,
        }
    }

    pub fn independent(&self, a: &ProcessId, b: &ProcessId) -> bool {
        !self.requires(a, b) && !self.requires(b, a)
    }

    /// Ids `a` requires.
    pub fn requirements_of<'a>(&'a self, a: &ProcessId) -> impl Iterator<Item = &'a ProcessId> + 'a {
        let a = self.index.get(a).copied();
        self.edges
            .iter()
            .filter(move |&&(x, _)| Some(x) == a)
            .map(|&(_, b)| &self.nodes[b])
    }
}

/// Edge `(a, b)` for every ordered pair of distinct processes where `a`
/// requires `b`.
pub fn build_requires_graph(action_list: &[Process]) -> Result<RequiresGraph, ScheduleError> {
    let mut graph = RequiresGraph::with_nodes(action_list.iter().map(|p| p.id().clone()))?;
    for (i, a) in action_list.iter().enumerate() {
        for (j, b) in action_list.iter().enumerate() {
            if i != j && requires(a, b) {
                graph.edges.insert((i, j));
            }
        }
    }
    graph.check_acyclic()?;
    Ok(graph)
}

/// Removes every ghost and links whatever required a ghost directly to
/// whatever that ghost required. Ghost-to-ghost chains collapse one ghost at a
/// time, so the stitched edges follow every ghost-only path.
pub fn remove_and_stitch(action_list: &[Process], graph: &RequiresGraph) -> (Vec<Process>, RequiresGraph) {
    let mut edges: BTreeSet<(usize, usize)> = graph.edges.clone();
    let ghosts: Vec<usize> = action_list
        .iter()
        .filter(|p| p.is_ghost())
        .filter_map(|p| graph.index.get(p.id()).copied())
        .collect();

    for &g in &ghosts {
        let below: Vec<usize> = edges.iter().filter(|e| e.0 == g).map(|e| e.1).collect();
        let above: Vec<usize> = edges.iter().filter(|e| e.1 == g).map(|e| e.0).collect();
        for &a in &above {
            for &b in &below {
                if a != b {
                    edges.insert((a, b));
                }
            }
        }
        edges.retain(|&(a, b)| a != g && b != g);
    }

    let kept: Vec<Process> = action_list.iter().filter(|p| !p.is_ghost()).cloned().collect();
    let mut stitched = RequiresGraph::with_nodes(kept.iter().map(|p| p.id().clone()))
        .expect("ids were unique in the source graph");
    for (a, b) in edges {
        let a = stitched.index.get(&graph.nodes[a]).copied();
        let b = stitched.index.get(&graph.nodes[b]).copied();
        if let (Some(a), Some(b)) = (a, b) {
            stitched.edges.insert((a, b));
        }
    }
    (kept, stitched)
}

/// True iff `x` requires no member of `set` other than itself.
pub fn no_requirements(x: &ProcessId, set: &[ProcessId], graph: &RequiresGraph) -> bool {
    set.iter().all(|s| s == x || !graph.requires(x, s))
}

/// A total order of processes in which every requirement points backwards.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PermissibleOrder(Vec<ProcessId>);

impl PermissibleOrder {
    /// Checks the order against `graph` before wrapping it.
    pub fn new(order: Vec<ProcessId>, graph: &RequiresGraph) -> Result<Self, ScheduleError> {
        let mut position = HashMap::with_capacity(order.len());
        for (i, id) in order.iter().enumerate() {
            if !graph.contains(id) {
                return Err(ScheduleError::UnknownProcess(id.clone()));
            }
            if position.insert(id, i).is_some() {
                return Err(ScheduleError::DuplicateProcess(id.clone()));
            }
        }
        for (a, b) in graph.edges() {
            if let (Some(pa), Some(pb)) = (position.get(a), position.get(b)) {
                if pb > pa {
                    return Err(ScheduleError::NotPermissible(format!("`{a}` comes before `{b}`")));
                }
            }
        }
        Ok(Self(order))
    }

    pub fn ids(&self) -> &[ProcessId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<ProcessId> {
        self.0
    }
}

impl fmt::Display for PermissibleOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<&str> = self.0.iter().map(ProcessId::as_str).collect();
        write!(f, "[{}]", ids.join(", "))
    }
}

/// Members of `set` not in `prefix` that could come next.
pub fn possible_next(set: &[ProcessId], prefix: &[ProcessId], graph: &RequiresGraph) -> Vec<ProcessId> {
    let rest: Vec<ProcessId> = set.iter().filter(|s| !prefix.contains(s)).cloned().collect();
    rest.iter()
        .filter(|x| no_requirements(x, &rest, graph))
        .cloned()
        .collect()
}

/// Breadth-wise expansion: every permissible prefix of length `len`.
pub fn permissible_prefixes(set: &[ProcessId], graph: &RequiresGraph, len: usize) -> Vec<Vec<ProcessId>> {
    let mut paths: Vec<Vec<ProcessId>> = vec![Vec::new()];
    for _ in 0..len.min(set.len()) {
        paths = paths
            .iter()
            .flat_map(|path| {
                possible_next(set, path, graph).into_iter().map(move |next| {
                    let mut longer = path.clone();
                    longer.push(next);
                    longer
                })
            })
            .collect();
    }
    paths
}

/// Every linear extension of `graph` restricted to `set`, each exactly once.
///
/// Depth-first with candidates tried in `set` order, so the first order
/// returned is the one a greedy scan of `set` would build. Fails with
/// [`ScheduleError::OrderExplosion`] instead of truncating.
pub fn find_all_lists(
    set: &[ProcessId],
    graph: &RequiresGraph,
    limit: usize,
) -> Result<Vec<PermissibleOrder>, ScheduleError> {
    let mut orders = Vec::new();
    for_each_order(set, graph, |order| {
        orders.push(PermissibleOrder(order.to_vec()));
        if orders.len() > limit {
            Err(ScheduleError::OrderExplosion {
                reached: orders.len(),
                limit,
            })
        } else {
            Ok(())
        }
    })?;
    Ok(orders)
}

/// Streams linear extensions to `visit` in the same order [`find_all_lists`]
/// returns them. Stops at the first error from `visit`.
pub fn for_each_order<F>(set: &[ProcessId], graph: &RequiresGraph, mut visit: F) -> Result<(), ScheduleError>
where
    F: FnMut(&[ProcessId]) -> Result<(), ScheduleError>,
{
    let m = set.len();
    let mut local = HashMap::with_capacity(m);
    for (i, id) in set.iter().enumerate() {
        if !graph.contains(id) {
            return Err(ScheduleError::UnknownProcess(id.clone()));
        }
        if local.insert(id, i).is_some() {
            return Err(ScheduleError::DuplicateProcess(id.clone()));
        }
    }
    let mut pending = vec![0usize; m];
    let mut dependents = vec![Vec::new(); m];
    for (a, b) in graph.edges() {
        if let (Some(&a), Some(&b)) = (local.get(a), local.get(b)) {
            if a != b {
                pending[a] += 1;
                dependents[b].push(a);
            }
        }
    }

    struct Search<'a, F> {
        set: &'a [ProcessId],
        pending: Vec<usize>,
        dependents: Vec<Vec<usize>>,
        used: Vec<bool>,
        current: Vec<ProcessId>,
        found: usize,
        visit: F,
    }

    impl<F> Search<'_, F>
    where
        F: FnMut(&[ProcessId]) -> Result<(), ScheduleError>,
    {
        fn run(&mut self) -> Result<(), ScheduleError> {
            if self.current.len() == self.set.len() {
                self.found += 1;
                return (self.visit)(&self.current);
            }
            for i in 0..self.set.len() {
                if self.used[i] || self.pending[i] != 0 {
                    continue;
                }
                self.used[i] = true;
                self.current.push(self.set[i].clone());
                for k in 0..self.dependents[i].len() {
                    self.pending[self.dependents[i][k]] -= 1;
                }
                let result = self.run();
                for k in 0..self.dependents[i].len() {
                    self.pending[self.dependents[i][k]] += 1;
                }
                self.current.pop();
                self.used[i] = false;
                result?;
            }
            Ok(())
        }
    }

    let mut search = Search {
        set,
        pending,
        dependents,
        used: vec![false; m],
        current: Vec::with_capacity(m),
        found: 0,
        visit: &mut visit,
    };
    search.run()?;
    if search.found == 0 {
        return Err(ScheduleError::CyclicPrecedence);
    }
    Ok(())
}
