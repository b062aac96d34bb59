//! In-process bulk-synchronous simulator for networked agents.
//!
//! Each round every agent publishes at most one vector per communication
//! block, the harness delivers it to the agent's neighbors on that block's
//! graph, and then every agent computes from its own inbox only. Agents
//! never see each other's state during the compute phase, so the result is
//! the same for any scheduling order or degree of parallelism.

mod programs;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Mutex;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::Vector;
use crate::mixing::NeighborRead;

pub use programs::{alg1_agents, alg2_agents, stacked_from_agents, minmax_from_agents, Alg1Agent, Alg2Agent};

/// Values delivered to one agent this round.
#[derive(Debug)]
pub struct Inbox<'g> {
    agent: usize,
    graphs: &'g [&'g Graph],
    /// Per block: sender → value. Includes the agent's own value.
    values: Vec<BTreeMap<usize, Vector>>,
    illegal: Mutex<Vec<NeighborRead>>,
}

impl Inbox<'_> {
    pub fn agent(&self) -> usize {
        self.agent
    }

    /// Value sent by `j` on `block`. Reading from a non-neighbor is recorded
    /// and yields `None`, as does a neighbor that sent nothing.
    pub fn get(&self, block: usize, j: usize) -> Option<&Vector> {
        let legal = j == self.agent || self.graphs.get(block).is_some_and(|g| g.has_edge(self.agent, j));
        if !legal {
            self.illegal.lock().expect("inbox lock").push(NeighborRead { block, reader: self.agent, source: j });
            return None;
        }
        self.values.get(block).and_then(|m| m.get(&j))
    }

    /// Senders heard from on `block`, ascending.
    pub fn senders(&self, block: usize) -> impl Iterator<Item = usize> + '_ {
        self.values.get(block).into_iter().flat_map(|m| m.keys().copied())
    }
}

/// An agent as seen by the harness.
pub trait AgentProgram: Send {
    /// Vector sent to every neighbor on `block` this round, if any.
    fn publish(&self, block: usize) -> Option<Vector>;

    fn compute(&mut self, round: usize, inbox: &Inbox<'_>) -> Result<()>;

    /// Flat copy of the state, compared bitwise by
    /// [`sequential_equivalence`].
    fn snapshot(&self) -> Vec<f64>;
}

/// Order of the compute phase within a round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    Sequential,
    /// A fixed pseudo-random permutation drawn from the seed (never the
    /// identity when there are at least two agents).
    Permuted(u64),
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// The first non-neighbor read aborts the run.
    Strict,
    /// Non-neighbor reads are counted and the run continues.
    Audit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RoundAudit {
    pub round: usize,
    pub messages: u64,
    pub bytes: u64,
    pub illegal_attempts: u64,
}

pub const AUDIT_HEADER: &str = "round,messages,bytes,illegal_attempts";

pub fn audits_to_csv(audits: &[RoundAudit]) -> String {
    let mut out = String::from(AUDIT_HEADER);
    out.push('\n');
    for a in audits {
        let _ = writeln!(out, "{},{},{},{}", a.round, a.messages, a.bytes, a.illegal_attempts);
    }
    out
}

fn permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    if n > 1 && order.iter().enumerate().all(|(k, &i)| k == i) {
        order.reverse();
    }
    order
}

/// Runs `rounds` bulk-synchronous rounds. `graphs[b]` is the communication
/// graph of block `b`.
pub fn run_synchronous<A: AgentProgram>(
    graphs: &[&Graph],
    mut agents: Vec<A>,
    rounds: usize,
    schedule: Schedule,
    mode: Mode,
) -> Result<(Vec<A>, Vec<RoundAudit>)> {
    let n = agents.len();
    for g in graphs {
        if g.n() != n {
            return Err(Error::DimensionMismatch { context: "agents vs communication graph", expected: g.n(), found: n });
        }
    }
    let adjacency: Vec<Vec<Vec<usize>>> = graphs.iter().map(|g| g.neighbors()).collect();
    let mut audits = Vec::with_capacity(rounds);
    for round in 0..rounds {
        let mut audit = RoundAudit { round, ..Default::default() };
        let mut inboxes: Vec<Inbox<'_>> = (0..n)
            .map(|i| Inbox { agent: i, graphs, values: vec![BTreeMap::new(); graphs.len()], illegal: Mutex::new(Vec::new()) })
            .collect();
        for (b, adj) in adjacency.iter().enumerate() {
            for (i, agent) in agents.iter().enumerate() {
                let Some(value) = agent.publish(b) else { continue };
                for &j in &adj[i] {
                    audit.messages += 1;
                    audit.bytes += (value.len() * std::mem::size_of::<f64>()) as u64;
                    inboxes[j].values[b].insert(i, value.clone());
                }
                inboxes[i].values[b].insert(i, value);
            }
        }
        let results: Vec<Result<()>> = match schedule {
            Schedule::Parallel => agents
                .par_iter_mut()
                .zip(inboxes.par_iter())
                .map(|(agent, inbox)| agent.compute(round, inbox))
                .collect(),
            Schedule::Sequential => agents.iter_mut().zip(&inboxes).map(|(a, inbox)| a.compute(round, inbox)).collect(),
            Schedule::Permuted(seed) => {
                let mut out: Vec<Option<Result<()>>> = (0..n).map(|_| None).collect();
                for i in permutation(n, seed) {
                    out[i] = Some(agents[i].compute(round, &inboxes[i]));
                }
                out.into_iter().map(|r| r.expect("every agent computed")).collect()
            }
        };
        let illegal: Vec<NeighborRead> = inboxes.iter_mut().flat_map(|ib| std::mem::take(ib.illegal.get_mut().expect("inbox lock"))).collect();
        audit.illegal_attempts = illegal.len() as u64;
        if mode == Mode::Strict {
            if let Some(r) = illegal.first() {
                return Err(Error::Locality { block: r.block, reader: r.reader, source_agent: r.source });
            }
        }
        for r in results {
            r?;
        }
        audits.push(audit);
    }
    Ok((agents, audits))
}

/// Runs the agents from `factory` once in index order and once in a
/// permuted order and reports whether the final states agree bit for bit.
pub fn sequential_equivalence<A: AgentProgram>(
    factory: impl Fn() -> Vec<A>,
    graphs: &[&Graph],
    rounds: usize,
    seed: u64,
) -> Result<bool> {
    let (a, _) = run_synchronous(graphs, factory(), rounds, Schedule::Sequential, Mode::Strict)?;
    let (b, _) = run_synchronous(graphs, factory(), rounds, Schedule::Permuted(seed), Mode::Strict)?;
    let bits = |agents: &[A]| -> Vec<u64> { agents.iter().flat_map(|x| x.snapshot()).map(f64::to_bits).collect() };
    Ok(bits(&a) == bits(&b))
}
