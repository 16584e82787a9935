//! The colored trees `T_c`, evaluated lazily.
//!
//! A vertex is joined to its parent: the containing cube of the same color
//! at the nearest lower level. No tree is ever materialized; distances come
//! from walking both endpoints towards their lowest common ancestor.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::boxes::to_f64;
use crate::cubes::{pattern_coordinate, realize, CubeId};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::params::Params;

pub const DEFAULT_SCAN_CAP: u32 = 64;

/// Default vertex budget for [`brute_force_edges`].
pub const DEFAULT_VERTEX_BUDGET: u128 = 200_000;

/// Path from a vertex towards the root side, one parent step at a time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AncestorChain {
    pub vertices: Vec<CubeId>,
}

impl AncestorChain {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Parent of `id`: the containing cube at the largest level below `id.k`.
///
/// At each level `j = k−1, k−2, …` the only candidate is the cell holding
/// the center of `id`, since same-level cubes are disjoint. The scan stops
/// with [`Error::ScanExhausted`] after `scan_cap` levels.
pub fn parent(params: &Params, id: &CubeId, scan_cap: u32) -> Result<CubeId> {
    id.check(params)?;
    parent_in(&Lattice::new(params), id, scan_cap)
}

fn parent_in(lattice: &Lattice, id: &CubeId, scan_cap: u32) -> Result<CubeId> {
    'levels: for m in 1..=scan_cap {
        let pm = lattice.p_pow(m)?;
        let mut gamma = Vec::with_capacity(id.gamma.len());
        for &g in &id.gamma {
            let cell = lattice.cell_below(id.c, g, pm)?;
            if !lattice.contains(id.c, cell, g, pm)? {
                continue 'levels;
            }
            gamma.push(cell);
        }
        return Ok(CubeId::new(id.c, id.k - i64::from(m), gamma));
    }
    Err(Error::ScanExhausted {
        level_reached: id.k - i64::from(scan_cap),
    })
}

/// Follows parents from `id` until the first vertex at or below
/// `floor_level`.
pub fn ancestor_chain(
    params: &Params,
    id: &CubeId,
    floor_level: i64,
    scan_cap: u32,
) -> Result<AncestorChain> {
    id.check(params)?;
    let lattice = Lattice::new(params);
    let mut vertices = vec![id.clone()];
    while let Some(last) = vertices.last().filter(|v| v.k > floor_level) {
        let next = parent_in(&lattice, last, scan_cap)?;
        vertices.push(next);
    }
    Ok(AncestorChain { vertices })
}

/// Lowest common ancestor of two vertices together with the number of edges
/// from each endpoint to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Meet {
    pub vertex: CubeId,
    pub steps_from_u: u64,
    pub steps_from_v: u64,
}

pub fn meet(params: &Params, u: &CubeId, v: &CubeId, scan_cap: u32) -> Result<Meet> {
    u.check(params)?;
    v.check(params)?;
    if u.c != v.c {
        return Err(Error::ColorMismatch {
            left: u.c,
            right: v.c,
        });
    }
    let lattice = Lattice::new(params);
    let (mut a, mut b) = (u.clone(), v.clone());
    let (mut steps_a, mut steps_b) = (0u64, 0u64);
    // Parents strictly lower the level, so the endpoint with the higher
    // level cannot be an ancestor of the other and must move.
    while a != b {
        if a.k >= b.k {
            a = parent_in(&lattice, &a, scan_cap)?;
            steps_a += 1;
        } else {
            b = parent_in(&lattice, &b, scan_cap)?;
            steps_b += 1;
        }
    }
    Ok(Meet {
        vertex: a,
        steps_from_u: steps_a,
        steps_from_v: steps_b,
    })
}

/// Number of edges on the unique path between `u` and `v` in `T_c`.
pub fn tree_distance(params: &Params, u: &CubeId, v: &CubeId, scan_cap: u32) -> Result<u64> {
    let m = meet(params, u, v, scan_cap)?;
    Ok(m.steps_from_u + m.steps_from_v)
}

/// Finite window of vertices of one color: levels `k_min..=k_max`, every
/// lattice coordinate in `[-gamma_bound, gamma_bound]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Window {
    pub c: usize,
    pub k_min: i64,
    pub k_max: i64,
    pub gamma_bound: i128,
}

impl Window {
    pub fn vertex_count(&self, n: usize) -> u128 {
        if self.k_min > self.k_max || self.gamma_bound < 0 {
            return 0;
        }
        let levels = (self.k_max - self.k_min + 1) as u128;
        let side = (2 * self.gamma_bound + 1) as u128;
        side.checked_pow(n as u32)
            .and_then(|s| s.checked_mul(levels))
            .unwrap_or(u128::MAX)
    }

    pub fn contains(&self, id: &CubeId) -> bool {
        id.c == self.c
            && (self.k_min..=self.k_max).contains(&id.k)
            && id.gamma.iter().all(|g| g.abs() <= self.gamma_bound)
    }

    fn vertices(&self, n: usize) -> Vec<CubeId> {
        let mut out = Vec::new();
        if self.vertex_count(n) == 0 {
            return out;
        }
        let side = 2 * self.gamma_bound + 1;
        for k in self.k_min..=self.k_max {
            let mut gamma = vec![-self.gamma_bound; n];
            loop {
                out.push(CubeId::new(self.c, k, gamma.clone()));
                let mut axis = 0;
                while axis < n {
                    gamma[axis] += 1;
                    if gamma[axis] - -self.gamma_bound < side {
                        break;
                    }
                    gamma[axis] = -self.gamma_bound;
                    axis += 1;
                }
                if axis == n {
                    break;
                }
            }
        }
        out
    }
}

/// Edges among the vertices of a window, found by testing the edge
/// definition directly. Edges are stored as `(child, parent)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeSet {
    pub window: Window,
    pub vertices: Vec<CubeId>,
    pub edges: BTreeSet<(CubeId, CubeId)>,
}

impl EdgeSet {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Whether `a` and `b` are adjacent, in either orientation.
    pub fn contains_edge(&self, a: &CubeId, b: &CubeId) -> bool {
        self.edges.contains(&(a.clone(), b.clone())) || self.edges.contains(&(b.clone(), a.clone()))
    }
}

/// Enumerates every vertex of `window` and joins it to the cube containing
/// it at the highest lower level, searching every cube of each level that
/// meets its bounding box.
///
/// A vertex whose nearest containing level lies inside the window but whose
/// container falls outside the `γ` bound gets no edge, and neither does one
/// whose container lies below `k_min`. Intended as a test oracle for
/// [`parent`]; it shares none of its integer arithmetic.
pub fn brute_force_edges(params: &Params, window: &Window, vertex_budget: u128) -> Result<EdgeSet> {
    let n = params.n();
    if window.c >= params.colors() {
        return Err(Error::ColorMismatch {
            left: window.c,
            right: params.colors() - 1,
        });
    }
    let count = window.vertex_count(n);
    if count > vertex_budget {
        return Err(Error::ResourceLimit {
            what: "window vertices",
            requested: count,
            budget: vertex_budget,
        });
    }
    let vertices = window.vertices(n);
    let found: Vec<Option<(CubeId, CubeId)>> = vertices
        .par_iter()
        .map(|v| {
            let inner = realize(params, v);
            for j in (window.k_min..v.k).rev() {
                if let Some(outer) = containing_at_level(params, &inner, v.c, j)? {
                    return Ok(window.contains(&outer).then(|| (v.clone(), outer)));
                }
            }
            Ok(None)
        })
        .collect::<Result<_>>()?;
    Ok(EdgeSet {
        window: *window,
        vertices,
        edges: found.into_iter().flatten().collect(),
    })
}

fn containing_at_level(
    params: &Params,
    inner: &crate::boxes::RationalBox,
    c: usize,
    level: i64,
) -> Result<Option<CubeId>> {
    let ranges: Vec<(i128, i128)> = inner
        .lo()
        .iter()
        .zip(inner.hi())
        .map(|(lo, hi)| {
            let from = pattern_coordinate(params, c, level, lo).floor().to_integer();
            let to = pattern_coordinate(params, c, level, hi).floor().to_integer();
            match (from.to_i128(), to.to_i128()) {
                (Some(a), Some(b)) => Ok((a - 1, b + 1)),
                _ => Err(Error::Overflow("window coordinates exceed 128 bits".into())),
            }
        })
        .collect::<Result<_>>()?;
    let mut gamma: Vec<i128> = ranges.iter().map(|r| r.0).collect();
    loop {
        let candidate = CubeId::new(c, level, gamma.clone());
        if realize(params, &candidate).contains_box(inner) {
            return Ok(Some(candidate));
        }
        let mut axis = 0;
        while axis < gamma.len() {
            gamma[axis] += 1;
            if gamma[axis] <= ranges[axis].1 {
                break;
            }
            gamma[axis] = ranges[axis].0;
            axis += 1;
        }
        if axis == gamma.len() {
            return Ok(None);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubtreeFormat {
    Dot,
    Json,
}

#[derive(Serialize)]
struct JsonNode<'a> {
    c: usize,
    k: i64,
    gamma: &'a [i128],
    lo: Vec<f64>,
    hi: Vec<f64>,
}

#[derive(Serialize)]
struct JsonSubtree<'a> {
    nodes: Vec<JsonNode<'a>>,
    edges: Vec<[usize; 2]>,
}

/// Spans `ids` by their pairwise tree paths and renders the result.
///
/// The union of the pairwise paths is the union of the paths from each id
/// to the common ancestor of the whole set.
pub fn export_subtree(
    params: &Params,
    ids: &[CubeId],
    format: SubtreeFormat,
    scan_cap: u32,
) -> Result<String> {
    for id in ids {
        id.check(params)?;
        if id.c != ids[0].c {
            return Err(Error::ColorMismatch {
                left: ids[0].c,
                right: id.c,
            });
        }
    }
    let lattice = Lattice::new(params);
    let mut root = ids.first().cloned();
    if let Some(r) = root.as_mut() {
        for id in &ids[1..] {
            *r = meet(params, r, id, scan_cap)?.vertex;
        }
    }

    let mut nodes = BTreeSet::new();
    let mut edges = BTreeSet::new();
    if let Some(root) = &root {
        for id in ids {
            let mut cur = id.clone();
            nodes.insert(cur.clone());
            while &cur != root {
                let up = parent_in(&lattice, &cur, scan_cap)?;
                edges.insert((cur, up.clone()));
                nodes.insert(up.clone());
                cur = up;
            }
        }
    }

    // BTreeSet order is (c, k, γ), so nodes are listed level by level.
    let nodes: Vec<CubeId> = nodes.into_iter().collect();
    let index: BTreeMap<&CubeId, usize> = nodes.iter().enumerate().map(|(i, v)| (v, i)).collect();
    match format {
        SubtreeFormat::Json => {
            let doc = JsonSubtree {
                nodes: nodes
                    .iter()
                    .map(|v| {
                        let b = realize(params, v);
                        JsonNode {
                            c: v.c,
                            k: v.k,
                            gamma: &v.gamma,
                            lo: b.lo_f64(),
                            hi: b.hi_f64(),
                        }
                    })
                    .collect(),
                edges: edges.iter().map(|(a, b)| [index[a], index[b]]).collect(),
            };
            serde_json::to_string_pretty(&doc).map_err(|e| Error::Overflow(e.to_string()))
        }
        SubtreeFormat::Dot => {
            let decimals = |xs: &[num_rational::BigRational]| {
                xs.iter().map(|x| to_f64(x).to_string()).collect::<Vec<_>>().join(",")
            };
            let mut out = String::from("graph subtree {\n");
            for v in &nodes {
                let b = realize(params, v);
                let gamma: Vec<String> = v.gamma.iter().map(|g| g.to_string()).collect();
                out.push_str(&format!(
                    "  \"{}\" [c={}, k={}, gamma=\"{}\", lo=\"{}\", hi=\"{}\"];\n",
                    v.node_name(),
                    v.c,
                    v.k,
                    gamma.join(","),
                    decimals(b.lo()),
                    decimals(b.hi()),
                ));
            }
            for (a, b) in &edges {
                out.push_str(&format!(
                    "  \"{}\" -- \"{}\" [weight=1];\n",
                    a.node_name(),
                    b.node_name()
                ));
            }
            out.push_str("}\n");
            Ok(out)
        }
    }
}
