//! Multivariate quadratic underestimators and the box-constrained minimization
//! of their upper envelope.
//!
//! In `d` dimensions each sample contributes
//! `q_k(x) = f_k + g_k . (x - x_k) - gamma/2 |x - x_k|^2`. All models share the
//! curvature `-gamma`, so `q_k - q_l` is affine and the region where `q_k`
//! dominates is a convex polygon (for `d = 2`). Minimizing the concave `q_k`
//! over that polygon is attained at a vertex, so the envelope minimum is the
//! smallest vertex value over all regions.
//!
//! Regions are maintained incrementally: adding a model adds one half-plane to
//! every existing region and creates one new region by full enumeration.

use std::time::Instant;

use crate::domain::SearchBox;
use crate::envelope1d::{envelope_min, EnvelopeState1D, Model1D, Sample1D};
use crate::error::{Error, Result};
use crate::result::{HistoryRow, OptResult, Status};

/// Feasibility slack for vertices, relative to `1 + |b|` of a unit-normal
/// half-plane.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Line pairs whose unit normals have `|cross| <` this are treated as parallel.
pub const PARALLEL_TOL: f64 = 1e-12;

const TIE_TOL: f64 = 1e-12;

/// `q(x) = value + gradient . (x - center) - gamma/2 |x - center|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelND {
    pub center: Vec<f64>,
    pub value: f64,
    pub gradient: Vec<f64>,
    pub gamma: f64,
}

impl ModelND {
    pub fn value_at(&self, x: &[f64]) -> f64 {
        let mut lin = 0.0;
        let mut sq = 0.0;
        for ((xi, ci), gi) in x.iter().zip(&self.center).zip(&self.gradient) {
            let d = xi - ci;
            lin += gi * d;
            sq += d * d;
        }
        self.value + lin - 0.5 * self.gamma * sq
    }
}

/// The model built from several branch gradients at a point where branches
/// meet: the minimum over the branches of their linearizations. Only used for
/// evaluation; the envelope minimization assumes one gradient per sample.
pub fn general_model_value(center: &[f64], value: f64, gradients: &[Vec<f64>], gamma: f64, x: &[f64]) -> f64 {
    let sq: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
    let lin = gradients
        .iter()
        .map(|g| {
            g.iter()
                .zip(x.iter().zip(center))
                .map(|(gi, (a, b))| gi * (a - b))
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min);
    value + lin - 0.5 * gamma * sq
}

/// Half-plane `a . x <= b` with `|a| = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlane {
    pub a: [f64; 2],
    pub b: f64,
}

impl HalfPlane {
    /// Normalizes `a . x <= b`; `None` when `a` vanishes.
    pub fn new(a: [f64; 2], b: f64) -> Option<Self> {
        let n = a[0].hypot(a[1]);
        (n > 0.0 && n.is_finite()).then(|| Self {
            a: [a[0] / n, a[1] / n],
            b: b / n,
        })
    }

    pub fn slack(&self, x: [f64; 2]) -> f64 {
        self.b - (self.a[0] * x[0] + self.a[1] * x[1])
    }

    pub fn contains(&self, x: [f64; 2]) -> bool {
        self.slack(x) >= -FEASIBILITY_TOL * (1.0 + self.b.abs())
    }

    /// Intersection of the two boundary lines, `None` for (near-)parallel lines.
    pub fn intersect(&self, other: &HalfPlane) -> Option<[f64; 2]> {
        let det = self.a[0] * other.a[1] - self.a[1] * other.a[0];
        if det.abs() < PARALLEL_TOL {
            return None;
        }
        Some([
            (self.b * other.a[1] - other.b * self.a[1]) / det,
            (self.a[0] * other.b - other.a[0] * self.b) / det,
        ])
    }
}

/// Where `q_k >= q_l` holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dominance {
    HalfPlane(HalfPlane),
    /// Identical linear parts and `q_k >= q_l` everywhere.
    Everywhere,
    /// Identical linear parts and `q_k < q_l` everywhere.
    Nowhere,
}

/// The set `{x : q_k(x) >= q_l(x)}` for two models of equal curvature.
pub fn dominance_constraint(mk: &ModelND, ml: &ModelND) -> Result<Dominance> {
    if mk.center.len() != 2 || ml.center.len() != 2 {
        return Err(Error::UnsupportedDimension(mk.center.len()));
    }
    // With y = x - c_k and delta = c_l - c_k:
    // q_k - q_l = c0 + (g_k - g_l - gamma delta) . y
    let gamma = mk.gamma;
    let delta = [ml.center[0] - mk.center[0], ml.center[1] - mk.center[1]];
    let c0 = (mk.value - ml.value)
        + ml.gradient[0] * delta[0]
        + ml.gradient[1] * delta[1]
        + 0.5 * gamma * (delta[0] * delta[0] + delta[1] * delta[1]);
    let a = [
        ml.gradient[0] - mk.gradient[0] + gamma * delta[0],
        ml.gradient[1] - mk.gradient[1] + gamma * delta[1],
    ];
    let scale = 1.0
        + mk.gradient[0].abs().max(mk.gradient[1].abs())
        + ml.gradient[0].abs().max(ml.gradient[1].abs())
        + gamma * delta[0].abs().max(delta[1].abs());
    if a[0].hypot(a[1]) <= 1e-14 * scale {
        return Ok(if c0 >= 0.0 {
            Dominance::Everywhere
        } else {
            Dominance::Nowhere
        });
    }
    let b = c0 + a[0] * mk.center[0] + a[1] * mk.center[1];
    Ok(Dominance::HalfPlane(HalfPlane::new(a, b).expect("nonzero normal")))
}

/// The four faces of a 2D box as half-planes, with line ids `0..4`.
fn box_planes(bx: &SearchBox) -> [HalfPlane; 4] {
    let (lo, hi) = (bx.lo(), bx.hi());
    [
        HalfPlane {
            a: [-1.0, 0.0],
            b: -lo[0],
        },
        HalfPlane {
            a: [1.0, 0.0],
            b: hi[0],
        },
        HalfPlane {
            a: [0.0, -1.0],
            b: -lo[1],
        },
        HalfPlane {
            a: [0.0, 1.0],
            b: hi[1],
        },
    ]
}

const BOX_LINES: usize = 4;

/// A vertex of a dominance region and the two lines defining it. Line ids
/// `0..4` are the box faces; `4 + l` is the constraint against model `l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vertex {
    pub point: [f64; 2],
    pub lines: (usize, usize),
}

/// The polygon on which model `owner` is the largest, with its feasible
/// vertices and cached minimum of `q_owner`.
#[derive(Debug, Clone)]
pub struct QPRegion {
    pub owner: usize,
    /// `(line id, half-plane)` for every dominance constraint.
    pub constraints: Vec<(usize, HalfPlane)>,
    pub vertices: Vec<Vertex>,
    pub minimum: Option<([f64; 2], f64)>,
    /// Skipped by later envelope minimizations; `minimum` keeps the last
    /// computed (still valid, possibly stale) lower bound.
    pub pruned: bool,
    /// Set when some constraint excludes the whole plane.
    pub infeasible: bool,
}

impl QPRegion {
    pub fn new(owner: usize) -> Self {
        Self {
            owner,
            constraints: Vec::new(),
            vertices: Vec::new(),
            minimum: None,
            pruned: false,
            infeasible: false,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.infeasible || self.vertices.is_empty()
    }

    fn line(&self, id: usize, planes: &[HalfPlane; 4]) -> HalfPlane {
        if id < BOX_LINES {
            planes[id]
        } else {
            self.constraints
                .iter()
                .find(|(cid, _)| *cid == id)
                .map(|(_, h)| *h)
                .expect("vertex references a known line")
        }
    }

    fn feasible(&self, x: [f64; 2], planes: &[HalfPlane; 4]) -> bool {
        planes.iter().all(|h| h.contains(x)) && self.constraints.iter().all(|(_, h)| h.contains(x))
    }

    fn refresh_minimum(&mut self, model: &ModelND) {
        self.minimum = best_vertex(&self.vertices, model);
    }
}

/// Smallest `q` over the vertices; ties broken lexicographically.
fn best_vertex(vertices: &[Vertex], model: &ModelND) -> Option<([f64; 2], f64)> {
    let mut best: Option<([f64; 2], f64)> = None;
    for v in vertices {
        let val = model.value_at(&v.point);
        best = match best {
            None => Some((v.point, val)),
            Some((p, b)) => {
                let tol = TIE_TOL * (1.0 + b.abs());
                if val < b - tol || (val <= b + tol && lex_less(v.point, p)) {
                    Some((v.point, val))
                } else {
                    Some((p, b))
                }
            }
        };
    }
    best
}

fn lex_less(a: [f64; 2], b: [f64; 2]) -> bool {
    a[0] < b[0] || (a[0] == b[0] && a[1] < b[1])
}

/// All feasible pairwise intersections of the region's constraint lines and
/// the box faces, together with the number of 2x2 solves performed.
pub fn enumerate_vertices_counted(region: &QPRegion, bx: &SearchBox) -> (Vec<Vertex>, usize) {
    let planes = box_planes(bx);
    if region.infeasible {
        return (Vec::new(), 0);
    }
    let mut lines: Vec<(usize, HalfPlane)> = planes.iter().cloned().enumerate().collect();
    lines.extend(region.constraints.iter().cloned());
    let mut out = Vec::new();
    let mut solves = 0;
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let Some(x) = lines[i].1.intersect(&lines[j].1) else {
                continue;
            };
            solves += 1;
            if region.feasible(x, &planes) {
                out.push(Vertex {
                    point: x,
                    lines: (lines[i].0, lines[j].0),
                });
            }
        }
    }
    (out, solves)
}

/// Feasible vertices of the region inside the box (`d = 2`).
pub fn enumerate_vertices(region: &QPRegion, bx: &SearchBox) -> Vec<Vertex> {
    enumerate_vertices_counted(region, bx).0
}

/// Minimum of the concave `q_owner` over the region, or `None` when the region
/// is empty.
pub fn solve_region_qp(region: &QPRegion, model: &ModelND, bx: &SearchBox) -> Option<([f64; 2], f64)> {
    best_vertex(&enumerate_vertices(region, bx), model)
}

/// The dominance regions of a set of models over a 2D box.
#[derive(Debug, Clone)]
pub struct Envelope2D {
    pub bounds: SearchBox,
    pub gamma: f64,
    pub models: Vec<ModelND>,
    pub regions: Vec<QPRegion>,
    /// Cumulative 2x2 solves spent on vertices.
    pub vertex_computations: usize,
}

impl Envelope2D {
    pub fn new(bounds: SearchBox, gamma: f64) -> Result<Self> {
        if bounds.dim() != 2 {
            return Err(Error::UnsupportedDimension(bounds.dim()));
        }
        Ok(Self {
            bounds,
            gamma,
            models: Vec::new(),
            regions: Vec::new(),
            vertex_computations: 0,
        })
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.models
            .iter()
            .map(|m| m.value_at(x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Number of regions that are neither empty nor pruned.
    pub fn live_regions(&self) -> usize {
        self.regions.iter().filter(|r| !r.pruned && !r.is_empty()).count()
    }

    /// Adds a model: cuts every live region with one new half-plane and
    /// builds the new model's region by full enumeration.
    pub fn add_model(&mut self, model: ModelND) -> Result<()> {
        if model.center.len() != 2 || model.gradient.len() != 2 {
            return Err(Error::UnsupportedDimension(model.center.len()));
        }
        let planes = box_planes(&self.bounds);
        let new_id = self.models.len();
        let new_line = BOX_LINES + new_id;

        for region in self.regions.iter_mut().filter(|r| !r.pruned && !r.is_empty()) {
            let owner = &self.models[region.owner];
            let h = match dominance_constraint(owner, &model)? {
                Dominance::Everywhere => continue,
                Dominance::Nowhere => {
                    region.infeasible = true;
                    region.vertices.clear();
                    region.minimum = None;
                    continue;
                }
                Dominance::HalfPlane(h) => h,
            };
            region.constraints.push((new_line, h));
            if region.vertices.iter().all(|v| h.contains(v.point)) {
                continue;
            }
            // The new vertices lie on edges of the current polygon, and every
            // edge line defines at least one of the current vertices.
            let mut edge_lines: Vec<usize> = region.vertices.iter().flat_map(|v| [v.lines.0, v.lines.1]).collect();
            edge_lines.sort_unstable();
            edge_lines.dedup();
            let mut fresh = Vec::new();
            for id in edge_lines {
                let line = region.line(id, &planes);
                let Some(x) = h.intersect(&line) else {
                    continue;
                };
                self.vertex_computations += 1;
                if region.feasible(x, &planes) {
                    fresh.push(Vertex {
                        point: x,
                        lines: (id.min(new_line), id.max(new_line)),
                    });
                }
            }
            region.vertices.retain(|v| h.contains(v.point));
            region.vertices.extend(fresh);
            region.refresh_minimum(owner);
        }

        let mut region = QPRegion::new(new_id);
        for (l, other) in self.models.iter().enumerate() {
            match dominance_constraint(&model, other)? {
                Dominance::Everywhere => {}
                Dominance::Nowhere => region.infeasible = true,
                Dominance::HalfPlane(h) => region.constraints.push((BOX_LINES + l, h)),
            }
        }
        if !region.infeasible {
            let (vertices, solves) = enumerate_vertices_counted(&region, &self.bounds);
            self.vertex_computations += solves;
            region.vertices = vertices;
            region.refresh_minimum(&model);
        }
        self.models.push(model);
        self.regions.push(region);
        Ok(())
    }

    /// Marks live regions whose minimum exceeds `threshold` as pruned.
    pub fn prune_above(&mut self, threshold: f64) {
        for r in &mut self.regions {
            if let Some((_, v)) = r.minimum {
                if !r.pruned && v > threshold {
                    r.pruned = true;
                }
            }
        }
    }

    /// `(argmin over live regions, lower bound)`. The lower bound also covers
    /// pruned regions through their cached minima. The argmin is `None` when
    /// every non-empty region is pruned.
    pub fn minimum(&self) -> Result<(Option<[f64; 2]>, f64)> {
        let mut best: Option<([f64; 2], f64)> = None;
        let mut pruned_floor = f64::INFINITY;
        let mut any = false;
        for r in &self.regions {
            let Some((p, v)) = r.minimum else { continue };
            if r.is_empty() && !r.pruned {
                continue;
            }
            any = true;
            if r.pruned {
                pruned_floor = pruned_floor.min(v);
                continue;
            }
            best = match best {
                None => Some((p, v)),
                Some((bp, bv)) => {
                    let tol = TIE_TOL * (1.0 + bv.abs());
                    if v < bv - tol || (v <= bv + tol && lex_less(p, bp)) {
                        Some((p, v))
                    } else {
                        Some((bp, bv))
                    }
                }
            };
        }
        if !any {
            return Err(Error::Internal("every dominance region is empty".into()));
        }
        let lower = best.map_or(pruned_floor, |(_, v)| v.min(pruned_floor));
        Ok((best.map(|(p, _)| p), lower))
    }
}

/// `(argmin, min)` of the upper envelope of `models` over the box, `d` in
/// `{1, 2}`.
pub fn envelope_min_nd(models: &[ModelND], bx: &SearchBox) -> Result<(Vec<f64>, f64)> {
    if models.is_empty() {
        return Err(Error::InvalidArgument("envelope of zero models".into()));
    }
    match bx.dim() {
        1 => {
            let m1: Vec<Model1D> = models
                .iter()
                .map(|m| Model1D {
                    center: m.center[0],
                    value: m.value,
                    slope_left: m.gradient[0],
                    slope_right: m.gradient[0],
                    gamma: m.gamma,
                })
                .collect();
            let (x, l) = envelope_min(&m1, bx.lo()[0], bx.hi()[0]);
            Ok((vec![x], l))
        }
        2 => {
            let mut env = Envelope2D::new(bx.clone(), models[0].gamma)?;
            for m in models {
                env.add_model(m.clone())?;
            }
            let (p, l) = env.minimum()?;
            let p = p.ok_or_else(|| Error::Internal("no live region".into()))?;
            Ok((p.to_vec(), l))
        }
        d => Err(Error::UnsupportedDimension(d)),
    }
}

/// Value and gradient of the objective at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleND {
    pub value: f64,
    pub gradient: Vec<f64>,
}

/// Settings for [`algorithm1`].
#[derive(Debug, Clone, PartialEq)]
pub struct Algorithm1Options {
    pub gamma: f64,
    pub eps: f64,
    pub max_iter: usize,
    /// Stop once this many models exist (the per-box cap of the mesh driver).
    pub model_cap: Option<usize>,
    /// Upper bound known from elsewhere; enables the early stop
    /// `min(u, u_s) - l_s <= eps` and region pruning against it.
    pub global_upper: Option<f64>,
}

impl Algorithm1Options {
    pub fn new(gamma: f64, eps: f64) -> Self {
        Self {
            gamma,
            eps,
            max_iter: 10_000,
            model_cap: None,
            global_upper: None,
        }
    }
}

enum Envelope {
    One(EnvelopeState1D),
    Two(Envelope2D),
}

fn checked(x: &[f64], s: SampleND, d: usize) -> Result<SampleND> {
    if s.gradient.len() != d {
        return Err(Error::DimensionMismatch(format!(
            "objective returned a gradient of length {}, expected {d}",
            s.gradient.len()
        )));
    }
    if let Some(&bad) = std::iter::once(&s.value).chain(&s.gradient).find(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            point: x.to_vec(),
            value: bad,
        });
    }
    Ok(s)
}

/// Global minimization of `f` over a box of dimension 1 or 2 with quadratic
/// underestimators, starting from the box center.
pub fn algorithm1<F>(mut f: F, bx: &SearchBox, opts: &Algorithm1Options) -> Result<OptResult>
where
    F: FnMut(&[f64]) -> Result<SampleND>,
{
    let d = bx.dim();
    if d > 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    if !(opts.gamma > 0.0 && opts.gamma.is_finite()) || !(opts.eps > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "gamma and eps must be positive (got {} and {})",
            opts.gamma, opts.eps
        )));
    }
    let gamma = opts.gamma;
    let mut env = if d == 1 {
        Envelope::One(EnvelopeState1D::new(bx.lo()[0], bx.hi()[0], gamma)?)
    } else {
        Envelope::Two(Envelope2D::new(bx.clone(), gamma)?)
    };
    let mut centers: Vec<Vec<f64>> = Vec::new();
    let add = |env: &mut Envelope, x: &[f64], s: &SampleND| -> Result<()> {
        match env {
            Envelope::One(e) => {
                e.insert(x[0], &Sample1D::smooth(s.value, s.gradient[0]));
                Ok(())
            }
            Envelope::Two(e) => e.add_model(ModelND {
                center: x.to_vec(),
                value: s.value,
                gradient: s.gradient.clone(),
                gamma,
            }),
        }
    };

    let start = Instant::now();
    let x0 = bx.center();
    let s0 = checked(&x0, f(&x0)?, d)?;
    add(&mut env, &x0, &s0)?;
    centers.push(x0.clone());
    let mut evals = 1;
    let mut upper = s0.value;
    let mut xbest = x0.clone();
    let mut last = (x0, s0.value);
    let mut lower = f64::NEG_INFINITY;
    let mut gamma_violated = false;
    let mut history = Vec::new();
    let mut iter = 0;

    let status = loop {
        let cap = opts.global_upper.map_or(upper, |g| g.min(upper));
        let (next, lnew, regions, vertices) = match &mut env {
            Envelope::One(e) => {
                let (x, l) = e.envelope_min();
                (Some(vec![x]), l, 0, 0)
            }
            Envelope::Two(e) => {
                e.prune_above(cap - opts.eps);
                let (p, l) = e.minimum()?;
                (p.map(|p| p.to_vec()), l, e.live_regions(), e.vertex_computations)
            }
        };
        if lnew > upper + 1e-10 * (1.0 + upper.abs()) {
            gamma_violated = true;
        }
        lower = lower.max(lnew).min(upper);
        history.push(HistoryRow {
            iter,
            x: last.0.clone(),
            f: last.1,
            lower,
            upper,
            evals,
            regions,
            vertices,
            elapsed: start.elapsed().as_secs_f64(),
        });
        if cap - lower <= opts.eps {
            break Status::Converged;
        }
        if opts.model_cap.is_some_and(|c| centers.len() >= c) || iter >= opts.max_iter {
            break Status::Budget;
        }
        let Some(x) = next else {
            break Status::Converged;
        };
        let coincident = centers
            .iter()
            .any(|c| c.iter().zip(&x).all(|(a, b)| (a - b).abs() <= 1e-14 * (1.0 + b.abs())));
        if coincident {
            break Status::Stalled;
        }
        let s = checked(&x, f(&x)?, d)?;
        evals += 1;
        if s.value < lnew - 1e-10 * (1.0 + lnew.abs()) {
            gamma_violated = true;
        }
        add(&mut env, &x, &s)?;
        centers.push(x.clone());
        if s.value < upper {
            upper = s.value;
            xbest = x.clone();
        }
        last = (x, s.value);
        iter += 1;
    };
    if gamma_violated {
        log::warn!("curvature bound gamma = {gamma} is violated by the objective");
    }
    let vertex_computations = match &env {
        Envelope::One(_) => 0,
        Envelope::Two(e) => e.vertex_computations,
    };
    Ok(OptResult {
        xbest,
        fbest: upper,
        lower,
        upper,
        status,
        evaluations: evals,
        vertex_computations,
        gamma_violated,
        history,
    })
}
