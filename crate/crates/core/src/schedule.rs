//! Schedules: sequences of gate bouts whose prefix unions are stages.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::circuit::{Dag, GateId, QuantumCircuit};
use crate::error::{Error, Result};

/// A nonempty antichain of gates fired together.
pub type Bout = BTreeSet<GateId>;

pub const DEFAULT_SCHEDULE_LIMIT: usize = 1000;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub bouts: Vec<Bout>,
}

impl Schedule {
    pub fn new(bouts: Vec<Bout>) -> Self {
        Schedule { bouts }
    }

    /// One singleton bout per gate, in the given order.
    pub fn linear<I, S>(gates: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<GateId>,
    {
        Schedule {
            bouts: gates.into_iter().map(|g| [g.into()].into_iter().collect()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bouts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bouts.is_empty()
    }

    pub fn is_linear(&self) -> bool {
        self.bouts.iter().all(|b| b.len() == 1)
    }
}

pub(crate) fn bout_indices(dag: &Dag, bout: &Bout) -> Result<Vec<usize>> {
    bout.iter().map(|g| dag.index(g)).collect()
}

/// True iff every prefix union is a stage and the bouts cover every gate once.
pub fn validate_schedule(c: &QuantumCircuit, x: &Schedule) -> Result<bool> {
    let dag = c.dag()?;
    validate_with_dag(&dag, x)
}

pub(crate) fn validate_with_dag(dag: &Dag, x: &Schedule) -> Result<bool> {
    let mut done: BTreeSet<usize> = BTreeSet::new();
    for bout in &x.bouts {
        if bout.is_empty() {
            return Ok(false);
        }
        let idx = bout_indices(dag, bout)?;
        // every bout gate must be ready with respect to the previous prefix
        if idx.iter().any(|&g| done.contains(&g) || !dag.prereqs[g].is_subset(&done)) {
            return Ok(false);
        }
        done.extend(idx);
    }
    Ok(done.len() == dag.len())
}

pub(crate) fn require_valid(dag: &Dag, x: &Schedule) -> Result<()> {
    if validate_with_dag(dag, x)? {
        Ok(())
    } else {
        Err(Error::InvalidSchedule("bouts do not form a schedule of the circuit".into()))
    }
}

/// Fires every ready gate at each step.
pub fn greedy_schedule(c: &QuantumCircuit) -> Result<Schedule> {
    let dag = c.dag()?;
    Ok(greedy_with_dag(c, &dag))
}

pub(crate) fn greedy_with_dag(c: &QuantumCircuit, dag: &Dag) -> Schedule {
    let mut done = BTreeSet::new();
    let mut bouts = Vec::new();
    while done.len() < dag.len() {
        let ready = dag.ready(&done);
        debug_assert!(!ready.is_empty(), "acyclic circuits always have a ready gate");
        bouts.push(c.indices_to_ids(ready.iter().copied()));
        done.extend(ready);
    }
    Schedule { bouts }
}

/// Depth-first enumeration of the linear extensions of a strict partial
/// order given by strict-prerequisite sets. Ready elements are tried in the
/// order of `rank` (smaller first).
pub struct LinearExtensions<'a> {
    prereqs: &'a [BTreeSet<usize>],
    rank: Vec<usize>,
    placed: BTreeSet<usize>,
    current: Vec<usize>,
    frames: Vec<(Vec<usize>, usize)>,
    started: bool,
    exhausted: bool,
}

impl<'a> LinearExtensions<'a> {
    pub fn new(prereqs: &'a [BTreeSet<usize>], rank: Vec<usize>) -> Self {
        LinearExtensions {
            prereqs,
            rank,
            placed: BTreeSet::new(),
            current: Vec::new(),
            frames: Vec::new(),
            started: false,
            exhausted: false,
        }
    }

    fn candidates(&self) -> Vec<usize> {
        let mut ready: Vec<usize> = (0..self.prereqs.len())
            .filter(|g| !self.placed.contains(g) && self.prereqs[*g].is_subset(&self.placed))
            .collect();
        ready.sort_by_key(|&g| self.rank[g]);
        ready
    }

    /// Extends `current` to a full order taking the first candidate each time.
    fn descend(&mut self) {
        while self.current.len() < self.prereqs.len() {
            let cands = self.candidates();
            let g = cands[0];
            self.frames.push((cands, 0));
            self.placed.insert(g);
            self.current.push(g);
        }
    }

    /// Moves to the next sibling choice; false when the search is over.
    fn backtrack(&mut self) -> bool {
        while let Some((cands, choice)) = self.frames.last_mut() {
            let old = cands[*choice];
            self.placed.remove(&old);
            self.current.pop();
            *choice += 1;
            if *choice < cands.len() {
                let g = cands[*choice];
                self.placed.insert(g);
                self.current.push(g);
                return true;
            }
            self.frames.pop();
        }
        false
    }
}

impl Iterator for LinearExtensions<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.exhausted {
            return None;
        }
        if !self.started {
            self.started = true;
        } else if !self.backtrack() {
            self.exhausted = true;
            return None;
        }
        self.descend();
        Some(self.current.clone())
    }
}

/// Linear extensions of the prerequisite order as singleton-bout schedules,
/// ties broken lexicographically on gate id. At most `limit` are returned
/// (default 1000).
pub fn enumerate_linear_schedules(c: &QuantumCircuit, limit: Option<usize>) -> Result<Vec<Schedule>> {
    let dag = c.dag()?;
    let limit = limit.unwrap_or(DEFAULT_SCHEDULE_LIMIT);
    let mut by_id: Vec<usize> = (0..dag.len()).collect();
    by_id.sort_by(|&a, &b| c.gates[a].id.cmp(&c.gates[b].id));
    let mut rank = vec![0; dag.len()];
    for (r, &g) in by_id.iter().enumerate() {
        rank[g] = r;
    }
    Ok(LinearExtensions::new(&dag.prereqs, rank)
        .take(limit)
        .map(|order| Schedule::linear(order.into_iter().map(|g| c.gates[g].id.clone())))
        .collect())
}

/// Replaces bout `t` by the two bouts `b1; b2`.
pub fn split_bout(x: &Schedule, t: usize, b1: &Bout, b2: &Bout) -> Result<Schedule> {
    let bout = x
        .bouts
        .get(t)
        .ok_or_else(|| Error::InvalidSplit(format!("schedule has no bout {t}")))?;
    if b1.is_empty() || b2.is_empty() {
        return Err(Error::InvalidSplit("both parts must be nonempty".into()));
    }
    if !b1.is_disjoint(b2) {
        return Err(Error::InvalidSplit("parts overlap".into()));
    }
    let union: Bout = b1.union(b2).cloned().collect();
    if &union != bout {
        return Err(Error::InvalidSplit(format!("parts do not cover bout {t}")));
    }
    let mut bouts = x.bouts.clone();
    bouts.splice(t..=t, [b1.clone(), b2.clone()]);
    Ok(Schedule { bouts })
}
