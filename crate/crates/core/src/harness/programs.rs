//! The decentralized solvers written as harness agents.
//!
//! Round 0 exchanges the starting point and takes the first step; every
//! later round exchanges the current iterate and takes one more. Agents
//! keep the previous neighbor mix themselves, so only current iterates are
//! ever sent.

use super::{AgentProgram, Inbox};
use crate::error::{Error, Result};
use crate::inclusion::{check_step, max_lipschitz, AgentInclusion, InitVariant, LocalState, StackedIterate};
use crate::linalg::{Matrix, Vector};
use crate::minmax::{self, AgentSaddleProblem, LocalSaddleState, MinMaxState};
use crate::mixing::{weighted_sum, BlockMixing, Mixer, MixingMatrix};

fn mix_from_inbox(inbox: &Inbox<'_>, block: usize, weights: &[(usize, f64)], dim: usize) -> Vector {
    let missing = Vector::zeros(dim);
    weighted_sum(weights, dim, |j| inbox.get(block, j).unwrap_or(&missing).as_slice().to_vec())
}

/// One agent of the inclusion solver.
#[derive(Debug, Clone)]
pub struct Alg1Agent {
    pub id: usize,
    agent: AgentInclusion,
    weights: Vec<(usize, f64)>,
    tau: f64,
    variant: InitVariant,
    x0: Vector,
    state: Option<LocalState>,
}

impl Alg1Agent {
    pub fn local(&self) -> Option<&LocalState> {
        self.state.as_ref()
    }

    pub fn current_x(&self) -> &Vector {
        self.state.as_ref().map_or(&self.x0, |s| &s.x)
    }
}

impl AgentProgram for Alg1Agent {
    fn publish(&self, block: usize) -> Option<Vector> {
        (block == 0).then(|| self.current_x().clone())
    }

    fn compute(&mut self, _round: usize, inbox: &Inbox<'_>) -> Result<()> {
        let wx = mix_from_inbox(inbox, 0, &self.weights, self.x0.len());
        self.state = Some(match &self.state {
            None => LocalState::init(&self.agent, self.tau, &self.x0, wx, self.variant),
            Some(s) => s.advance(&self.agent, self.tau, wx),
        });
        Ok(())
    }

    fn snapshot(&self) -> Vec<f64> {
        match &self.state {
            None => self.x0.as_slice().to_vec(),
            Some(s) => [&s.u, &s.x, &s.prev_x, &s.prev_wx, &s.bx, &s.v, &s.prev_v]
                .iter()
                .flat_map(|v| v.iter().copied())
                .collect(),
        }
    }
}

/// Agents for the inclusion solver, with the same step check as
/// [`crate::inclusion::alg1_init`].
pub fn alg1_agents(
    agents: &[AgentInclusion],
    w: &MixingMatrix,
    x0: &Matrix,
    tau: f64,
    variant: InitVariant,
) -> Result<Vec<Alg1Agent>> {
    if agents.len() != w.n() || x0.nrows() != w.n() {
        return Err(Error::DimensionMismatch { context: "agents vs mixing matrix", expected: w.n(), found: agents.len().min(x0.nrows()) });
    }
    check_step(w.lambda_min(), max_lipschitz(agents), tau)?;
    Ok(agents
        .iter()
        .enumerate()
        .map(|(i, a)| Alg1Agent {
            id: i,
            agent: a.clone(),
            weights: w.row(i).to_vec(),
            tau,
            variant,
            x0: x0.row(i).transpose(),
            state: None,
        })
        .collect())
}

/// Stacked view of agents that have taken at least one step.
pub fn stacked_from_agents(agents: &[Alg1Agent]) -> Option<StackedIterate> {
    let states: Option<Vec<LocalState>> = agents.iter().map(|a| a.state.clone()).collect();
    states.map(|agents| StackedIterate { agents })
}

/// One agent of the min-max solver. Block 0 carries `x` over `W₁`, block 1
/// carries `y` over `W₂`.
#[derive(Debug, Clone)]
pub struct Alg2Agent {
    pub id: usize,
    problem: AgentSaddleProblem,
    weights_x: Vec<(usize, f64)>,
    weights_y: Vec<(usize, f64)>,
    tau: f64,
    variant: InitVariant,
    x0: Vector,
    y0: Vector,
    state: Option<LocalSaddleState>,
}

impl Alg2Agent {
    pub fn local(&self) -> Option<&LocalSaddleState> {
        self.state.as_ref()
    }
}

impl AgentProgram for Alg2Agent {
    fn publish(&self, block: usize) -> Option<Vector> {
        match (block, &self.state) {
            (0, None) => Some(self.x0.clone()),
            (1, None) => Some(self.y0.clone()),
            (0, Some(s)) => Some(s.x.z.clone()),
            (1, Some(s)) => Some(s.y.z.clone()),
            _ => None,
        }
    }

    fn compute(&mut self, _round: usize, inbox: &Inbox<'_>) -> Result<()> {
        let wx = mix_from_inbox(inbox, 0, &self.weights_x, self.x0.len());
        let wy = mix_from_inbox(inbox, 1, &self.weights_y, self.y0.len());
        self.state = Some(match &self.state {
            None => LocalSaddleState::init(&self.problem, self.tau, (&self.x0, &self.y0), (wx, wy), self.variant),
            Some(s) => s.advance(&self.problem, self.tau, wx, wy),
        });
        Ok(())
    }

    fn snapshot(&self) -> Vec<f64> {
        match &self.state {
            None => self.x0.iter().chain(self.y0.iter()).copied().collect(),
            Some(s) => [&s.x, &s.y]
                .iter()
                .flat_map(|b| [&b.u, &b.z, &b.prev_z, &b.prev_wz, &b.g, &b.v, &b.prev_v])
                .flat_map(|v| v.iter().copied())
                .collect(),
        }
    }
}

pub fn alg2_agents(
    problems: &[AgentSaddleProblem],
    bm: &BlockMixing,
    x0: &Matrix,
    y0: &Matrix,
    tau: f64,
    variant: InitVariant,
) -> Result<Vec<Alg2Agent>> {
    let n = bm.agents();
    if problems.len() != n || x0.nrows() != n || y0.nrows() != n {
        return Err(Error::DimensionMismatch { context: "agents vs mixing matrices", expected: n, found: problems.len() });
    }
    check_step(bm.lambda_min(), minmax::max_lipschitz(problems), tau)?;
    Ok(problems
        .iter()
        .enumerate()
        .map(|(i, pr)| Alg2Agent {
            id: i,
            problem: pr.clone(),
            weights_x: bm.w1.row(i).to_vec(),
            weights_y: bm.w2.row(i).to_vec(),
            tau,
            variant,
            x0: x0.row(i).transpose(),
            y0: y0.row(i).transpose(),
            state: None,
        })
        .collect())
}

pub fn minmax_from_agents(agents: &[Alg2Agent]) -> Option<MinMaxState> {
    let states: Option<Vec<LocalSaddleState>> = agents.iter().map(|a| a.state.clone()).collect();
    states.map(|agents| MinMaxState { agents })
}
