//! The (p+1)-regular tree pointed at a distinguished upward end.
//!
//! A vertex is stored in end-pointed (horocyclic) coordinates: its height `n`
//! and the digits selecting the branch at every level `>= n`. Each vertex has
//! one parent (height `n + 1`, forgets the digit at level `n`) and `p`
//! children (height `n - 1`, one per digit at level `n - 1`). Zero digits are
//! omitted, so two vertices are equal iff their coordinates are equal.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::scalar::BigScalar;
use crate::space::Space;

pub const DEFAULT_VERTEX_BUDGET: usize = 5_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeVertex {
    height: i64,
    digits: BTreeMap<i64, u32>,
}

impl TreeVertex {
    /// The base vertex `(0, {})`.
    pub fn root() -> Self {
        TreeVertex::at_height(0)
    }

    pub fn at_height(height: i64) -> Self {
        TreeVertex {
            height,
            digits: BTreeMap::new(),
        }
    }

    /// Builds a canonical vertex; zero digits are dropped and levels below
    /// the height are rejected.
    pub fn new(height: i64, digits: impl IntoIterator<Item = (i64, u32)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (level, d) in digits {
            if level < height {
                return Err(GeomError::Precondition(format!(
                    "digit level {level} below vertex height {height}"
                )));
            }
            if d != 0 {
                map.insert(level, d);
            }
        }
        Ok(TreeVertex { height, digits: map })
    }

    pub fn height(&self) -> i64 {
        self.height
    }

    pub fn digit(&self, level: i64) -> u32 {
        self.digits.get(&level).copied().unwrap_or(0)
    }

    pub fn digits(&self) -> &BTreeMap<i64, u32> {
        &self.digits
    }

    pub fn max_digit(&self) -> u32 {
        self.digits.values().copied().max().unwrap_or(0)
    }

    pub fn parent(&self) -> TreeVertex {
        let mut digits = self.digits.clone();
        digits.remove(&self.height);
        TreeVertex {
            height: self.height + 1,
            digits,
        }
    }

    /// Ancestor at height `t >= height`.
    pub fn ancestor(&self, t: i64) -> TreeVertex {
        debug_assert!(t >= self.height);
        TreeVertex {
            height: t,
            digits: self.digits.range(t..).map(|(&l, &d)| (l, d)).collect(),
        }
    }

    /// Child selecting digit `d` at level `height - 1`; `d` is not range
    /// checked here (see [`TreeSpace::child`]).
    fn child_unchecked(&self, d: u32) -> TreeVertex {
        let mut digits = self.digits.clone();
        if d != 0 {
            digits.insert(self.height - 1, d);
        }
        TreeVertex {
            height: self.height - 1,
            digits,
        }
    }

    /// Descendant at height `t <= height` following the given digits for the
    /// levels `height - 1` down to `t`, zeros afterwards.
    pub fn descend(&self, t: i64, mut digit_at: impl FnMut(i64) -> u32) -> TreeVertex {
        let mut v = self.clone();
        while v.height > t {
            let level = v.height - 1;
            v = v.child_unchecked(digit_at(level));
        }
        v
    }

    /// Lowest height at which the upward rays of `u` and `v` have merged.
    pub fn confluence_level(&self, other: &TreeVertex) -> i64 {
        let floor = self.height.max(other.height);
        let differs = |a: &TreeVertex, b: &TreeVertex| {
            a.digits
                .range(floor..)
                .filter(|(&l, &d)| b.digit(l) != d)
                .map(|(&l, _)| l)
                .max()
        };
        match differs(self, other).max(differs(other, self)) {
            Some(level) => floor.max(level + 1),
            None => floor,
        }
    }

    pub fn tree_distance(&self, other: &TreeVertex) -> i64 {
        let h = self.confluence_level(other);
        (h - self.height) + (h - other.height)
    }

    /// Point of the vertical through `self` at height `t`: ancestors above,
    /// all-zeros descent below.
    pub fn vertical_at(&self, t: i64) -> TreeVertex {
        if t >= self.height {
            self.ancestor(t)
        } else {
            TreeVertex {
                height: t,
                digits: self.digits.clone(),
            }
        }
    }

    /// Vertex sequence of the geodesic from `self` to `other`.
    pub fn geodesic_to(&self, other: &TreeVertex) -> Vec<TreeVertex> {
        let top = self.confluence_level(other);
        let mut path: Vec<TreeVertex> = (self.height..=top).map(|t| self.ancestor(t)).collect();
        let mut down: Vec<TreeVertex> = (other.height..top).map(|t| other.ancestor(t)).collect();
        down.reverse();
        path.extend(down);
        path
    }

    pub fn serialize(&self, p: u32) -> String {
        let body = self
            .digits
            .iter()
            .map(|(l, d)| format!("{l}:{d}"))
            .collect::<Vec<_>>()
            .join(",");
        format!("T{p}(h={};{body})", self.height)
    }
}

/// The tree `T_p` with its declared hyperbolicity constant.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeSpace {
    p: u32,
    delta: BigScalar,
}

impl TreeSpace {
    /// Tree with `p` children per vertex; trees are 0-hyperbolic but the
    /// product constants assume `delta >= 1`, so `delta = 1` is declared.
    pub fn new(p: u32) -> Result<Self> {
        TreeSpace::with_delta(p, BigScalar::one())
    }

    pub fn with_delta(p: u32, delta: BigScalar) -> Result<Self> {
        if p < 2 {
            return Err(GeomError::InvalidBranching(p));
        }
        if delta < BigScalar::one() {
            return Err(GeomError::InvalidConstant {
                name: "delta",
                value: delta.to_string(),
            });
        }
        Ok(TreeSpace { p, delta })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn parent(&self, v: &TreeVertex) -> TreeVertex {
        v.parent()
    }

    pub fn child(&self, v: &TreeVertex, d: u32) -> Result<TreeVertex> {
        if d >= self.p {
            return Err(GeomError::DigitOutOfRange { digit: d, p: self.p });
        }
        Ok(v.child_unchecked(d))
    }

    pub fn validate(&self, v: &TreeVertex) -> Result<()> {
        match v.digits.iter().find(|(_, &d)| d >= self.p) {
            Some((_, &d)) => Err(GeomError::DigitOutOfRange { digit: d, p: self.p }),
            None => Ok(()),
        }
    }

    pub fn neighbors(&self, v: &TreeVertex) -> Vec<TreeVertex> {
        let mut out = Vec::with_capacity(self.p as usize + 1);
        out.push(v.parent());
        out.extend((0..self.p).map(|d| v.child_unchecked(d)));
        out
    }

    pub fn confluence_level(&self, u: &TreeVertex, v: &TreeVertex) -> i64 {
        u.confluence_level(v)
    }

    pub fn tree_distance(&self, u: &TreeVertex, v: &TreeVertex) -> i64 {
        u.tree_distance(v)
    }

    /// `2 * (confluence - max height)`.
    pub fn relative_distance_int(&self, u: &TreeVertex, v: &TreeVertex) -> i64 {
        2 * (u.confluence_level(v) - u.height.max(v.height))
    }

    pub fn generate_ball(&self, center: &TreeVertex, radius: i64) -> Result<TreeBall> {
        self.generate_ball_with_budget(center, radius, DEFAULT_VERTEX_BUDGET)
    }

    pub fn generate_ball_with_budget(&self, center: &TreeVertex, radius: i64, budget: usize) -> Result<TreeBall> {
        if radius < 0 {
            return Err(GeomError::Precondition(format!("radius {radius} < 0")));
        }
        let mut index: HashMap<TreeVertex, usize> = HashMap::new();
        let mut vertices = vec![center.clone()];
        let mut dist = vec![0i64];
        index.insert(center.clone(), 0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            if dist[i] == radius {
                continue;
            }
            for n in self.neighbors(&vertices[i]) {
                if !index.contains_key(&n) {
                    if vertices.len() >= budget {
                        return Err(GeomError::Budget {
                            what: "tree ball vertex count",
                            limit: budget,
                        });
                    }
                    index.insert(n.clone(), vertices.len());
                    vertices.push(n);
                    dist.push(dist[i] + 1);
                    queue.push_back(vertices.len() - 1);
                }
            }
        }
        let adjacency = vertices
            .iter()
            .map(|v| self.neighbors(v).iter().filter_map(|n| index.get(n).copied()).collect())
            .collect();
        Ok(TreeBall {
            p: self.p,
            center: center.clone(),
            radius,
            vertices,
            adjacency,
            index,
        })
    }

    pub fn serialize(&self, v: &TreeVertex) -> String {
        v.serialize(self.p)
    }
}

fn int_height(t: f64) -> Result<i64> {
    if t.fract() != 0.0 || !t.is_finite() {
        return Err(GeomError::NonIntegralHeight(t));
    }
    Ok(t as i64)
}

impl Space for TreeSpace {
    type Point = TreeVertex;

    fn delta(&self) -> &BigScalar {
        &self.delta
    }

    fn base_point(&self) -> TreeVertex {
        TreeVertex::root()
    }

    fn distance(&self, x: &TreeVertex, y: &TreeVertex) -> f64 {
        x.tree_distance(y) as f64
    }

    fn height(&self, x: &TreeVertex) -> f64 {
        x.height as f64
    }

    fn segment_top(&self, x: &TreeVertex, y: &TreeVertex) -> f64 {
        x.confluence_level(y) as f64
    }

    fn vertical_at(&self, anchor: &TreeVertex, t: f64) -> Result<TreeVertex> {
        Ok(anchor.vertical_at(int_height(t)?))
    }

    fn geodesic_point(&self, x: &TreeVertex, y: &TreeVertex, s: f64) -> Result<TreeVertex> {
        let s = int_height(s)?;
        let top = x.confluence_level(y);
        let up = top - x.height;
        let total = up + (top - y.height);
        if s < 0 || s > total {
            return Err(GeomError::Precondition(format!("arc length {s} outside [0, {total}]")));
        }
        Ok(if s <= up {
            x.ancestor(x.height + s)
        } else {
            y.ancestor(top - (s - up))
        })
    }

    fn geodesic(&self, x: &TreeVertex, y: &TreeVertex, _samples: usize) -> Vec<TreeVertex> {
        x.geodesic_to(y)
    }

    fn distance_to_vertical(&self, anchor: &TreeVertex, w: &TreeVertex) -> f64 {
        // t -> d(w, V(t)) is convex; the minimum lies within the window
        // |t - h(w)| <= d(w, V(h(w))).
        let reach = w.tree_distance(&anchor.vertical_at(w.height));
        (w.height - reach..=w.height + reach)
            .map(|t| w.tree_distance(&anchor.vertical_at(t)))
            .min()
            .unwrap_or(0) as f64
    }

    fn distance_to_geodesic(&self, u: &TreeVertex, v: &TreeVertex, w: &TreeVertex) -> f64 {
        // Gromov product, exact in trees.
        ((w.tree_distance(u) + w.tree_distance(v) - u.tree_distance(v)) / 2) as f64
    }

    fn height_grid(&self, lo: f64, hi: f64) -> Vec<f64> {
        let (a, b) = (lo.ceil() as i64, hi.floor() as i64);
        (a..=b).map(|t| t as f64).collect()
    }

    fn tolerance(&self) -> f64 {
        0.0
    }

    fn discrete(&self) -> bool {
        true
    }

    fn format_point(&self, x: &TreeVertex) -> String {
        x.serialize(self.p)
    }
}

/// Finite ball of the tree with adjacency lists, used as a BFS oracle.
#[derive(Debug, Clone)]
pub struct TreeBall {
    pub p: u32,
    pub center: TreeVertex,
    pub radius: i64,
    pub vertices: Vec<TreeVertex>,
    pub adjacency: Vec<Vec<usize>>,
    index: HashMap<TreeVertex, usize>,
}

impl TreeBall {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn index_of(&self, v: &TreeVertex) -> Option<usize> {
        self.index.get(v).copied()
    }

    /// BFS distances from `source` inside the ball.
    pub fn bfs(&self, source: usize) -> Vec<Option<i64>> {
        let mut dist = vec![None; self.vertices.len()];
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

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Out {
            p: u32,
            radius: i64,
            vertices: Vec<String>,
            edges: Vec<[usize; 2]>,
        }
        let (vertices, edges) = sorted_graph(
            self.vertices.iter().map(|v| v.serialize(self.p)).collect(),
            &self.adjacency,
        );
        serde_json::to_value(Out {
            p: self.p,
            radius: self.radius,
            vertices,
            edges,
        })
        .expect("ball serializes")
    }
}

/// Renumbers vertices by sorted label and returns `(labels, edges)` with
/// `i < j` edges in lexicographic order.
pub(crate) fn sorted_graph(labels: Vec<String>, adjacency: &[Vec<usize>]) -> (Vec<String>, Vec<[usize; 2]>) {
    let mut order: Vec<usize> = (0..labels.len()).collect();
    order.sort_by(|&a, &b| labels[a].cmp(&labels[b]));
    let mut rank = vec![0usize; labels.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    let mut edges: Vec<[usize; 2]> = adjacency
        .iter()
        .enumerate()
        .flat_map(|(i, ns)| ns.iter().map(move |&j| (i, j)))
        .filter(|&(i, j)| rank[i] < rank[j])
        .map(|(i, j)| [rank[i], rank[j]])
        .collect();
    edges.sort_unstable();
    let sorted = order.into_iter().map(|i| labels[i].clone()).collect();
    (sorted, edges)
}

impl fmt::Display for TreeVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(h={};", self.height)?;
        let body = self
            .digits
            .iter()
            .map(|(l, d)| format!("{l}:{d}"))
            .collect::<Vec<_>>()
            .join(",");
        write!(f, "{body})")
    }
}
