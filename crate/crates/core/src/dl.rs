//! Finite balls of the Diestel-Leader graph `DL(p, q) = T_p ⋈ T_q` as an
//! exact distance and geodesic oracle.
//!
//! `(u, v)` and `(u', v')` are adjacent when `u ~ u'` in `T_p` and `v ~ v'`
//! in `T_q`; heights force one side up and the other down. Every edge has
//! length one, which is the `N_1` product length.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::horo::{HoroPoint, HoroSpace};
use crate::norms::AdmissibleNorm;
use crate::tree::{sorted_graph, TreeSpace, TreeVertex};

pub type DlPoint = HoroPoint<TreeVertex, TreeVertex>;
pub type DlSpace = HoroSpace<TreeSpace, TreeSpace>;

pub const DEFAULT_VERTEX_BUDGET: usize = 5_000_000;
pub const DEFAULT_GEODESIC_BUDGET: usize = 1_000_000;

pub fn dl_space(p: u32, q: u32) -> Result<DlSpace> {
    HoroSpace::new(TreeSpace::new(p)?, TreeSpace::new(q)?, AdmissibleNorm::l1())
}

/// The `p + q` neighbours of `x`.
pub fn dl_neighbors(p: u32, q: u32, x: &DlPoint) -> Vec<DlPoint> {
    let mut out = Vec::with_capacity((p + q) as usize);
    let up_p = x.p.parent();
    for d in 0..q {
        out.push(HoroPoint::raw(up_p.clone(), x.q.descend(x.q.height() - 1, |_| d)));
    }
    let up_q = x.q.parent();
    for d in 0..p {
        out.push(HoroPoint::raw(x.p.descend(x.p.height() - 1, |_| d), up_q.clone()));
    }
    out
}

fn relative_int(u: &TreeVertex, v: &TreeVertex) -> i64 {
    2 * (u.confluence_level(v) - u.height().max(v.height()))
}

/// `|Δh| + d_r(x_p, y_p) + d_r(x_q, y_q)` in integers.
pub fn coarse_int(x: &DlPoint, y: &DlPoint) -> i64 {
    (x.p.height() - y.p.height()).abs() + relative_int(&x.p, &y.p) + relative_int(&x.q, &y.q)
}

#[derive(Debug, Clone)]
pub struct DlGraph {
    pub p: u32,
    pub q: u32,
    pub radius: i64,
    pub vertices: Vec<DlPoint>,
    pub adjacency: Vec<Vec<usize>>,
    /// Distance from the origin (vertex 0).
    pub depth: Vec<i64>,
    index: HashMap<DlPoint, usize>,
}

impl DlGraph {
    pub fn ball(p: u32, q: u32, radius: i64) -> Result<Self> {
        DlGraph::ball_with_budget(p, q, radius, DEFAULT_VERTEX_BUDGET)
    }

    pub fn ball_with_budget(p: u32, q: u32, radius: i64, budget: usize) -> Result<Self> {
        TreeSpace::new(p)?;
        TreeSpace::new(q)?;
        if radius < 0 {
            return Err(GeomError::Precondition(format!("radius {radius} < 0")));
        }
        let origin = HoroPoint::raw(TreeVertex::root(), TreeVertex::root());
        let mut index = HashMap::from([(origin.clone(), 0usize)]);
        let mut vertices = vec![origin];
        let mut depth = vec![0i64];
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            if depth[i] == radius {
                continue;
            }
            for n in dl_neighbors(p, q, &vertices[i]) {
                if index.contains_key(&n) {
                    continue;
                }
                if vertices.len() >= budget {
                    return Err(GeomError::Budget {
                        what: "DL ball vertex count",
                        limit: budget,
                    });
                }
                index.insert(n.clone(), vertices.len());
                vertices.push(n);
                depth.push(depth[i] + 1);
                queue.push_back(vertices.len() - 1);
            }
        }
        let adjacency = vertices
            .iter()
            .map(|v| {
                let mut ns: Vec<usize> = dl_neighbors(p, q, v)
                    .iter()
                    .filter_map(|n| index.get(n).copied())
                    .collect();
                ns.sort_unstable();
                ns
            })
            .collect();
        Ok(DlGraph {
            p,
            q,
            radius,
            vertices,
            adjacency,
            depth,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn index_of(&self, x: &DlPoint) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn point(&self, i: usize) -> &DlPoint {
        &self.vertices[i]
    }

    pub fn serialize(&self, i: usize) -> String {
        let x = &self.vertices[i];
        format!("{}|{}", x.p.serialize(self.p), x.q.serialize(self.q))
    }

    pub fn coarse(&self, i: usize, j: usize) -> i64 {
        coarse_int(&self.vertices[i], &self.vertices[j])
    }

    /// Margin rule `d(o, x) + d(o, y) + coarse(x, y) <= 2 radius`. Under it
    /// every geodesic from `x` to `y` stays in the ball.
    pub fn margin_ok(&self, i: usize, j: usize) -> bool {
        self.depth[i] + self.depth[j] + self.coarse(i, j) <= 2 * self.radius
    }

    fn locate(&self, x: &DlPoint) -> Result<usize> {
        self.index_of(x).ok_or_else(|| {
            GeomError::OutsideBall(format!(
                "{}|{} is not in the radius-{} ball",
                x.p.serialize(self.p),
                x.q.serialize(self.q),
                self.radius
            ))
        })
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        if !self.margin_ok(i, j) {
            return Err(GeomError::OutsideBall(format!(
                "pair ({}, {}) violates the ball margin: {} + {} + {} > 2 * {}",
                self.serialize(i),
                self.serialize(j),
                self.depth[i],
                self.depth[j],
                self.coarse(i, j),
                self.radius
            )));
        }
        Ok(())
    }

    /// Unchecked BFS from `source` inside the ball.
    pub fn bfs_from(&self, source: usize) -> Vec<Option<i64>> {
        let mut dist = vec![None; self.len()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(i) = queue.pop_front() {
            let di = dist[i].expect("visited");
            for &j in &self.adjacency[i] {
                if dist[j].is_none() {
                    dist[j] = Some(di + 1);
                    queue.push_back(j);
                }
            }
        }
        dist
    }

    pub fn bfs_distance(&self, x: &DlPoint, y: &DlPoint) -> Result<i64> {
        let (i, j) = (self.locate(x)?, self.locate(y)?);
        self.check_pair(i, j)?;
        Ok(self.bfs_from(i)[j].expect("margin rule keeps the pair connected"))
    }

    /// Every minimal path from `x` to `y`, as vertex index sequences in
    /// lexicographic order.
    pub fn all_geodesics(&self, x: &DlPoint, y: &DlPoint, budget: usize) -> Result<Vec<Vec<usize>>> {
        let (i, j) = (self.locate(x)?, self.locate(y)?);
        self.check_pair(i, j)?;
        self.geodesics_between(i, j, budget)
    }

    /// As [`DlGraph::all_geodesics`] on indices; the margin rule is the
    /// caller's responsibility.
    pub fn geodesics_between(&self, i: usize, j: usize, budget: usize) -> Result<Vec<Vec<usize>>> {
        let from_i = self.bfs_from(i);
        let from_j = self.bfs_from(j);
        let d = from_i[j].ok_or_else(|| GeomError::OutsideBall("endpoints disconnected inside the ball".into()))?;
        let on_geodesic = |v: usize| match (from_i[v], from_j[v]) {
            (Some(a), Some(b)) => a + b == d,
            _ => false,
        };
        // Count first so that the budget is checked before allocating.
        let mut count: HashMap<usize, u128> = HashMap::from([(j, 1u128)]);
        let mut by_level: Vec<Vec<usize>> = vec![Vec::new(); d as usize + 1];
        for v in 0..self.len() {
            if on_geodesic(v) {
                by_level[from_i[v].expect("on geodesic") as usize].push(v);
            }
        }
        for level in (0..d as usize).rev() {
            for &v in &by_level[level] {
                let c: u128 = self.adjacency[v]
                    .iter()
                    .filter(|&&w| from_i[w] == Some(level as i64 + 1) && on_geodesic(w))
                    .map(|w| count.get(w).copied().unwrap_or(0))
                    .sum();
                count.insert(v, c);
            }
        }
        let total = count.get(&i).copied().unwrap_or(0);
        if total > budget as u128 {
            return Err(GeomError::Budget {
                what: "geodesic enumeration",
                limit: budget,
            });
        }
        let mut out = Vec::with_capacity(total as usize);
        let mut stack = vec![i];
        self.extend_geodesics(&mut stack, j, &from_i, &on_geodesic, &mut out);
        Ok(out)
    }

    fn extend_geodesics(
        &self,
        stack: &mut Vec<usize>,
        target: usize,
        from_i: &[Option<i64>],
        on_geodesic: &dyn Fn(usize) -> bool,
        out: &mut Vec<Vec<usize>>,
    ) {
        let v = *stack.last().expect("nonempty");
        if v == target {
            out.push(stack.clone());
            return;
        }
        let next = from_i[v].expect("on geodesic") + 1;
        for &w in &self.adjacency[v] {
            if from_i[w] == Some(next) && on_geodesic(w) {
                stack.push(w);
                self.extend_geodesics(stack, target, from_i, on_geodesic, out);
                stack.pop();
            }
        }
    }

    pub fn path_points(&self, path: &[usize]) -> Vec<DlPoint> {
        path.iter().map(|&i| self.vertices[i].clone()).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Out {
            p: u32,
            q: u32,
            radius: i64,
            vertices: Vec<String>,
            edges: Vec<[usize; 2]>,
        }
        let (vertices, edges) = sorted_graph((0..self.len()).map(|i| self.serialize(i)).collect(), &self.adjacency);
        serde_json::to_value(Out {
            p: self.p,
            q: self.q,
            radius: self.radius,
            vertices,
            edges,
        })
        .expect("graph serializes")
    }
}
