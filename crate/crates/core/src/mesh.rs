//! Mesh-adaptive driver: split the box, run a capped quadratic-model search in
//! every piece, and recurse only into pieces whose lower bound is still too
//! far below the best value seen anywhere.
//!
//! Each sub-box starts with a fresh model set. Siblings run in parallel, all
//! reading the global upper bound as it was before the level started, so
//! results do not depend on scheduling. Refinement then proceeds depth-first
//! in ascending order of the sub-box upper bounds.

use std::time::Instant;

use rayon::prelude::*;

use crate::domain::SearchBox;
use crate::envelope2d::{algorithm1, Algorithm1Options, SampleND};
use crate::error::{Error, Result};
use crate::result::{HistoryRow, OptResult, Status};

pub const DEFAULT_MAX_DEPTH: usize = 12;

/// Final state of one sub-box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoxStatus {
    /// Bounds unresolved when the depth cap was reached.
    Active,
    /// The capped run closed its own gap.
    Converged,
    /// Skipped because its lower bound was already within `eps` of the
    /// global upper bound.
    Pruned,
    /// Subdivided; see its children in the trace.
    Refined,
}

impl BoxStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoxStatus::Active => "active",
            BoxStatus::Converged => "converged",
            BoxStatus::Pruned => "pruned",
            BoxStatus::Refined => "refined",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubBox {
    pub bounds: SearchBox,
    pub lower: f64,
    pub upper: f64,
    pub best: Vec<f64>,
    pub status: BoxStatus,
    pub depth: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeshOptions {
    pub gamma: f64,
    pub eps: f64,
    /// Model cap per sub-box; `None` runs each box to convergence.
    pub n_q: Option<usize>,
    /// `0` means a single run on the whole box.
    pub max_depth: usize,
    /// Iteration cap for each sub-box run.
    pub max_iter: usize,
}

impl MeshOptions {
    pub fn new(gamma: f64, eps: f64, n_q: Option<usize>) -> Self {
        Self {
            gamma,
            eps,
            n_q,
            max_depth: DEFAULT_MAX_DEPTH,
            max_iter: 10_000,
        }
    }
}

/// Driver state shared across the recursion.
#[derive(Debug)]
pub struct MeshState {
    pub upper: f64,
    pub xbest: Vec<f64>,
    pub evaluations: usize,
    pub vertex_computations: usize,
    pub gamma_violated: bool,
    pub depth_capped: bool,
    /// Every sub-box touched, in the order its status became final.
    pub trace: Vec<SubBox>,
    pub history: Vec<HistoryRow>,
    /// Lower bound per box id over the leaves of the box tree; infinite once
    /// a box is refined.
    leaves: Vec<f64>,
    /// Running global lower bound.
    lower: f64,
    start: Instant,
}

/// Splits a box at its midpoints into `2^d` equal children.
pub fn partition(bx: &SearchBox) -> Result<Vec<SearchBox>> {
    match bx.dim() {
        1 | 2 => Ok(bx.partition()),
        d => Err(Error::UnsupportedDimension(d)),
    }
}

/// One capped run inside `bounds`, stopping early against `global_upper`.
pub fn run_subbox<F>(
    f: &F,
    bounds: &SearchBox,
    depth: usize,
    opts: &MeshOptions,
    global_upper: f64,
) -> Result<(SubBox, OptResult)>
where
    F: Fn(&[f64]) -> Result<SampleND> + Sync,
{
    let mut a = Algorithm1Options::new(opts.gamma, opts.eps);
    a.max_iter = opts.max_iter;
    a.model_cap = opts.n_q;
    a.global_upper = global_upper.is_finite().then_some(global_upper);
    let r = algorithm1(f, bounds, &a)?;
    let sb = SubBox {
        bounds: bounds.clone(),
        lower: r.lower,
        upper: r.upper,
        best: r.xbest.clone(),
        status: if r.status == Status::Converged {
            BoxStatus::Converged
        } else {
            BoxStatus::Active
        },
        depth,
        evaluations: r.evaluations,
    };
    Ok((sb, r))
}

impl MeshState {
    fn absorb(&mut self, sb: &SubBox, r: &OptResult) {
        self.evaluations += r.evaluations;
        self.vertex_computations += r.vertex_computations;
        self.gamma_violated |= r.gamma_violated;
        if r.upper < self.upper {
            self.upper = r.upper;
            self.xbest = r.xbest.clone();
        }
        let leaves = self.leaves.iter().cloned().fold(f64::INFINITY, f64::min);
        self.lower = self.lower.max(leaves.min(self.upper));
        self.history.push(HistoryRow {
            iter: self.history.len(),
            x: sb.best.clone(),
            f: sb.upper,
            lower: self.lower,
            upper: self.upper,
            evals: self.evaluations,
            regions: 0,
            vertices: self.vertex_computations,
            elapsed: self.start.elapsed().as_secs_f64(),
        });
    }

    /// Refines `bounds` (already run, with lower bound `lower`) and returns
    /// the resulting lower bound over the box.
    fn refine<F>(&mut self, f: &F, mut sb: SubBox, id: usize, opts: &MeshOptions) -> Result<f64>
    where
        F: Fn(&[f64]) -> Result<SampleND> + Sync,
    {
        if sb.status == BoxStatus::Converged || self.upper - sb.lower <= opts.eps {
            if sb.status != BoxStatus::Converged {
                sb.status = BoxStatus::Pruned;
            }
            let l = sb.lower;
            self.trace.push(sb);
            return Ok(l);
        }
        if sb.depth >= opts.max_depth {
            self.depth_capped = true;
            let l = sb.lower;
            self.trace.push(sb);
            return Ok(l);
        }
        let snapshot = self.upper;
        let children = partition(&sb.bounds)?;
        let runs: Vec<Result<(SubBox, OptResult)>> = children
            .par_iter()
            .map(|c| run_subbox(f, c, sb.depth + 1, opts, snapshot))
            .collect();
        let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
        let parent_lower = self.leaves[id];
        let mut runs: Vec<_> = runs
            .into_iter()
            .map(|(c, r)| {
                self.leaves.push(c.lower.max(parent_lower));
                (self.leaves.len() - 1, c, r)
            })
            .collect();
        self.leaves[id] = f64::INFINITY;
        for (_, c, r) in &runs {
            self.absorb(c, r);
        }
        runs.sort_by(|a, b| a.1.upper.total_cmp(&b.1.upper));
        let mut lower = f64::INFINITY;
        for (child, c, _) in runs {
            lower = lower.min(self.refine(f, c, child, opts)?);
        }
        sb.status = BoxStatus::Refined;
        // A box's own lower bound stays valid after refinement.
        let lower = lower.max(sb.lower);
        sb.lower = lower;
        self.trace.push(sb);
        Ok(lower)
    }
}

/// Runs the mesh driver and also returns the box-tree trace.
pub fn algorithm2_traced<F>(f: F, bx: &SearchBox, opts: &MeshOptions) -> Result<(OptResult, Vec<SubBox>)>
where
    F: Fn(&[f64]) -> Result<SampleND> + Sync,
{
    if !(opts.gamma > 0.0) || !(opts.eps > 0.0) {
        return Err(Error::InvalidArgument("gamma and eps must be positive".into()));
    }
    if opts.n_q.is_some_and(|n| n < 2) {
        return Err(Error::InvalidArgument("n_q must be at least 2".into()));
    }
    if bx.dim() > 2 {
        return Err(Error::UnsupportedDimension(bx.dim()));
    }
    let start = Instant::now();
    let (root, r) = run_subbox(&f, bx, 0, opts, f64::INFINITY)?;
    if opts.max_depth == 0 {
        let mut root = root;
        if r.status != Status::Converged {
            root.status = BoxStatus::Active;
        }
        return Ok((r, vec![root]));
    }
    let mut state = MeshState {
        upper: f64::INFINITY,
        xbest: Vec::new(),
        evaluations: 0,
        vertex_computations: 0,
        gamma_violated: false,
        depth_capped: false,
        trace: Vec::new(),
        history: Vec::new(),
        leaves: vec![root.lower],
        lower: f64::NEG_INFINITY,
        start,
    };
    state.absorb(&root, &r);
    let lower = state.lower.max(state.refine(&f, root, 0, opts)?.min(state.upper));
    let status = if state.upper - lower <= opts.eps {
        Status::Converged
    } else {
        Status::Budget
    };
    if let Some(last) = state.history.last_mut() {
        last.lower = lower;
    }
    let result = OptResult {
        xbest: state.xbest,
        fbest: state.upper,
        lower,
        upper: state.upper,
        status,
        evaluations: state.evaluations,
        vertex_computations: state.vertex_computations,
        gamma_violated: state.gamma_violated,
        history: state.history,
    };
    Ok((result, state.trace))
}

/// Mesh-adaptive global minimization over a box of dimension 1 or 2.
pub fn algorithm2<F>(f: F, bx: &SearchBox, opts: &MeshOptions) -> Result<OptResult>
where
    F: Fn(&[f64]) -> Result<SampleND> + Sync,
{
    algorithm2_traced(f, bx, opts).map(|(r, _)| r)
}
