//! Analysis of product paths: extremal heights, coarse monotone pieces,
//! fitting by vertical geodesics, the two geodesic types and dead ends.

use std::fmt;

use serde::Serialize;

use crate::dl::{coarse_int, dl_neighbors, DlGraph};
use crate::error::{GeomError, Result};
use crate::horo::{HoroPoint, HoroSpace, ProductVertical};
use crate::ledger::ThresholdId;
use crate::scalar::BigScalar;
use crate::space::{relative_distance, Space};

pub const DEFAULT_MIN_TYPE_STEPS: usize = 20;

type Hp<L, R> = HoroPoint<<L as Space>::Point, <R as Space>::Point>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathStats {
    pub length: f64,
    pub h_plus: f64,
    pub h_minus: f64,
    /// Smallest index attaining `h_plus`.
    pub argmax: usize,
    /// Smallest index attaining `h_minus`.
    pub argmin: usize,
}

pub fn path_stats<L: Space, R: Space>(space: &HoroSpace<L, R>, path: &[Hp<L, R>]) -> Result<PathStats> {
    let heights: Vec<f64> = path.iter().map(|x| space.height(x)).collect();
    let (h_plus, argmax, h_minus, argmin) = extremes(&heights).ok_or(GeomError::TooShort { len: 0, min: 1 })?;
    Ok(PathStats {
        length: space.path_length(path),
        h_plus,
        h_minus,
        argmax,
        argmin,
    })
}

/// Same statistics for a path inside one component.
pub fn component_path_stats<S: Space>(space: &S, path: &[S::Point]) -> Result<PathStats> {
    let heights: Vec<f64> = path.iter().map(|x| space.height(x)).collect();
    let (h_plus, argmax, h_minus, argmin) = extremes(&heights).ok_or(GeomError::TooShort { len: 0, min: 1 })?;
    Ok(PathStats {
        length: path.windows(2).map(|w| space.distance(&w[0], &w[1])).sum(),
        h_plus,
        h_minus,
        argmax,
        argmin,
    })
}

fn extremes(h: &[f64]) -> Option<(f64, usize, f64, usize)> {
    let first = *h.first()?;
    let (mut hi, mut hi_i, mut lo, mut lo_i) = (first, 0, first, 0);
    for (i, &v) in h.iter().enumerate().skip(1) {
        if v > hi {
            hi = v;
            hi_i = i;
        }
        if v < lo {
            lo = v;
            lo_i = i;
        }
    }
    Some((hi, hi_i, lo, lo_i))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Monotonicity {
    Inc,
    Dec,
}

impl fmt::Display for Monotonicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Monotonicity::Inc => "inc",
            Monotonicity::Dec => "dec",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MonotoneSegment {
    pub label: Monotonicity,
    /// First and last point index; consecutive segments share an endpoint.
    pub start: usize,
    pub end: usize,
}

/// Renders labels as `[dec,inc,dec]`.
pub fn pattern_string(segments: &[MonotoneSegment]) -> String {
    let labels: Vec<String> = segments.iter().map(|s| s.label.to_string()).collect();
    format!("[{}]", labels.join(","))
}

/// Greedy left-to-right partition of `(t, h)` samples into maximal
/// `C`-coarsely monotone pieces: a piece is increasing when `t_j > t_i + C`
/// implies `h_j > h_i` inside it, decreasing symmetrically. Each piece takes
/// the label that reaches farther, `inc` on ties.
pub fn monotone_decomposition_raw(samples: &[(f64, f64)], coarseness: &BigScalar) -> Vec<MonotoneSegment> {
    let c = coarseness.to_f64();
    if samples.len() <= 1 {
        return vec![MonotoneSegment {
            label: Monotonicity::Inc,
            start: 0,
            end: 0,
        }];
    }
    let last = samples.len() - 1;
    let mut out = Vec::new();
    let mut start = 0;
    while start < last {
        let inc = reach(samples, start, c, |new, old| new > old);
        let dec = reach(samples, start, c, |new, old| new < old);
        let (label, mut end) = if dec > inc {
            (Monotonicity::Dec, dec)
        } else {
            (Monotonicity::Inc, inc)
        };
        if end == start {
            // A flat step longer than C fits neither label.
            end = start + 1;
        }
        out.push(MonotoneSegment { label, start, end });
        start = end;
    }
    out
}

/// Last index `e` such that `samples[start..=e]` satisfies the order.
fn reach(samples: &[(f64, f64)], start: usize, c: f64, ok: impl Fn(f64, f64) -> bool) -> usize {
    // `extreme` tracks the max (or min) height over the indices whose
    // parameter is already more than C behind the candidate.
    let mut behind = start;
    let mut extreme: Option<f64> = None;
    let mut end = start;
    for e in start + 1..samples.len() {
        let (te, he) = samples[e];
        while behind < e && te > samples[behind].0 + c {
            let h = samples[behind].1;
            extreme = Some(match extreme {
                None => h,
                Some(x) if ok(x, h) => x,
                Some(_) => h,
            });
            behind += 1;
        }
        if let Some(x) = extreme {
            if !ok(he, x) {
                break;
            }
        }
        end = e;
    }
    end
}

/// Monotone decomposition of a product path parametrized by `N`-length.
pub fn monotone_decomposition<L: Space, R: Space>(
    space: &HoroSpace<L, R>,
    path: &[Hp<L, R>],
    coarseness: &BigScalar,
) -> Vec<MonotoneSegment> {
    let mut t = 0.0;
    let mut samples = Vec::with_capacity(path.len());
    for (i, x) in path.iter().enumerate() {
        if i > 0 {
            t += space.step_length(&path[i - 1], x);
        }
        samples.push((t, space.height(x)));
    }
    monotone_decomposition_raw(&samples, coarseness)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeightBoundReport {
    /// `h(x) - d_r(x_q, y_q) / 2`, with `h(x) <= h(y)`.
    pub predicted_h_minus: f64,
    /// `h(y) + d_r(x_p, y_p) / 2`.
    pub predicted_h_plus: f64,
    pub h_minus: f64,
    pub h_plus: f64,
    pub low_deviation: f64,
    pub high_deviation: f64,
    /// Both deviations `<= 4 C0`, compared exactly.
    pub certified: bool,
}

/// Compares the extremal heights of a geodesic with their predictions. When
/// `oracle_length` is given the path must have that length.
pub fn verify_height_bounds<L: Space, R: Space>(
    space: &HoroSpace<L, R>,
    path: &[Hp<L, R>],
    oracle_length: Option<f64>,
) -> Result<HeightBoundReport> {
    let stats = path_stats(space, path)?;
    if let Some(d) = oracle_length {
        if (stats.length - d).abs() > space.tolerance() + 1e-9 * d.abs() {
            return Err(GeomError::Integrity(format!(
                "path length {} differs from the oracle distance {d}",
                stats.length
            )));
        }
    }
    let (a, b) = (&path[0], path.last().expect("nonempty"));
    let (x, y) = if space.height(a) <= space.height(b) {
        (a, b)
    } else {
        (b, a)
    };
    let predicted_h_minus = space.height(x) - space.dr_q(x, y) / 2.0;
    let predicted_h_plus = space.height(y) + space.dr_p(x, y) / 2.0;
    let low_deviation = (stats.h_minus - predicted_h_minus).abs();
    let high_deviation = (stats.h_plus - predicted_h_plus).abs();
    let bound = space.ledger().threshold(ThresholdId::C0x4);
    let within = |v: f64| bound.cmp_f64(v).is_some_and(|o| o.is_ge());
    Ok(HeightBoundReport {
        predicted_h_minus,
        predicted_h_plus,
        h_minus: stats.h_minus,
        h_plus: stats.h_plus,
        low_deviation,
        high_deviation,
        certified: within(low_deviation) && within(high_deviation),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ShapeCase {
    /// `h(x) <= h(y) - 7 C0`: down, up, down.
    Type1,
    /// `h(x) >= h(y) + 7 C0`: up, down, up.
    Type2,
    Either,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeFit<P, Q> {
    pub kind: ShapeCase,
    pub v1: ProductVertical<P, Q>,
    pub corner: ProductVertical<P, Q>,
    pub v2: ProductVertical<P, Q>,
    pub kappa: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeReport<P, Q> {
    pub case: ShapeCase,
    pub type1: Option<ShapeFit<P, Q>>,
    pub type2: Option<ShapeFit<P, Q>>,
    /// Smallest `kappa` among the fits allowed by `case`.
    pub kappa_eff: f64,
    /// `kappa_eff <= 196 C0 C_N`, compared exactly.
    pub certified: bool,
}

impl<P, Q> ShapeReport<P, Q> {
    pub fn best(&self) -> Option<&ShapeFit<P, Q>> {
        let allowed: Vec<&ShapeFit<P, Q>> = match self.case {
            ShapeCase::Type1 => self.type1.iter().collect(),
            ShapeCase::Type2 => self.type2.iter().collect(),
            ShapeCase::Either => self.type1.iter().chain(self.type2.iter()).collect(),
        };
        allowed.into_iter().min_by(|a, b| a.kappa.total_cmp(&b.kappa))
    }
}

fn mixed_vertical<P: Clone, Q: Clone>(p_anchor: &P, q_anchor: &Q) -> ProductVertical<P, Q> {
    ProductVertical::new(p_anchor.clone(), q_anchor.clone())
}

fn first_index(h: &[f64], from: usize, better: impl Fn(f64, f64) -> bool) -> usize {
    let mut best = from;
    for i in from + 1..h.len() {
        if better(h[i], h[best]) {
            best = i;
        }
    }
    best
}

fn union_kappa<L: Space, R: Space>(
    space: &HoroSpace<L, R>,
    path: &[Hp<L, R>],
    verticals: &[&ProductVertical<L::Point, R::Point>],
) -> f64 {
    path.iter()
        .map(|w| {
            verticals
                .iter()
                .map(|v| space.distance_to_vertical(v, w))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

fn fit_type1<L: Space, R: Space>(
    space: &HoroSpace<L, R>,
    path: &[Hp<L, R>],
    h: &[f64],
) -> Result<ShapeFit<L::Point, R::Point>> {
    let m = first_index(h, 0, |a, b| a < b);
    let n = first_index(h, m, |a, b| a > b);
    let (x, y) = (&path[0], path.last().expect("nonempty"));
    let v1 = mixed_vertical(&path[m].p, &x.q);
    let corner = mixed_vertical(&path[m].p, &path[n].q);
    let v2 = mixed_vertical(&y.p, &path[n].q);
    let kappa = union_kappa(space, path, &[&v1, &corner, &v2]);
    Ok(ShapeFit {
        kind: ShapeCase::Type1,
        v1,
        corner,
        v2,
        kappa,
    })
}

fn fit_type2<L: Space, R: Space>(
    space: &HoroSpace<L, R>,
    path: &[Hp<L, R>],
    h: &[f64],
) -> Result<ShapeFit<L::Point, R::Point>> {
    let n = first_index(h, 0, |a, b| a > b);
    let m = first_index(h, n, |a, b| a < b);
    let (x, y) = (&path[0], path.last().expect("nonempty"));
    let v1 = mixed_vertical(&x.p, &path[n].q);
    let corner = mixed_vertical(&path[m].p, &path[n].q);
    let v2 = mixed_vertical(&path[m].p, &y.q);
    let kappa = union_kappa(space, path, &[&v1, &corner, &v2]);
    Ok(ShapeFit {
        kind: ShapeCase::Type2,
        v1,
        corner,
        v2,
        kappa,
    })
}

/// Fits the path by `V1 ∪ corner ∪ V2`. The first leg's vertical runs
/// through the first extremal point, the last leg's through the path's
/// extreme on the far side, and `kappa` is the largest distance from a path
/// point to the union.
pub fn classify_shape<L: Space, R: Space>(
    space: &HoroSpace<L, R>,
    path: &[Hp<L, R>],
) -> Result<ShapeReport<L::Point, R::Point>> {
    if path.is_empty() {
        return Err(GeomError::TooShort { len: 0, min: 1 });
    }
    let h: Vec<f64> = path.iter().map(|x| space.height(x)).collect();
    let gap = BigScalar::from_f64(h[path.len() - 1] - h[0])
        .ok_or_else(|| GeomError::Precondition("non-finite height".into()))?;
    let seven = space.ledger().threshold(ThresholdId::C0x7);
    let case = if gap >= seven {
        ShapeCase::Type1
    } else if gap <= -seven.clone() {
        ShapeCase::Type2
    } else {
        ShapeCase::Either
    };
    let type1 = fit_type1(space, path, &h).ok();
    let type2 = fit_type2(space, path, &h).ok();
    let mut report = ShapeReport {
        case,
        type1,
        type2,
        kappa_eff: f64::INFINITY,
        certified: false,
    };
    if let Some(best) = report.best() {
        let kappa = best.kappa;
        let bound = space.ledger().threshold(ThresholdId::C0x196Cn);
        report.kappa_eff = kappa;
        report.certified = bound.cmp_f64(kappa).is_some_and(|o| o.is_ge());
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeReport {
    /// Largest distance of the p projection to its endpoint geodesic and of
    /// the q projection to the fitted q vertical.
    pub hp_kappa: f64,
    pub hq_kappa: f64,
    pub scale: f64,
    pub is_hp_type: bool,
    pub is_hq_type: bool,
}

/// Types of a path at scale `scale`. The component geodesic is the one
/// joining the projection's endpoints; the component vertical runs through
/// the projection's lowest point.
pub fn classify_type<L: Space, R: Space>(
    space: &HoroSpace<L, R>,
    path: &[Hp<L, R>],
    scale: f64,
    min_steps: usize,
) -> Result<TypeReport> {
    if path.len() < min_steps + 1 || path.is_empty() {
        return Err(GeomError::TooShort {
            len: path.len().saturating_sub(1),
            min: min_steps,
        });
    }
    let (left, right) = (space.left(), space.right());
    let ps: Vec<&L::Point> = path.iter().map(|x| &x.p).collect();
    let qs: Vec<&R::Point> = path.iter().map(|x| &x.q).collect();

    let lowest = |hs: Vec<f64>| first_index(&hs, 0, |a, b| a < b);
    let low_q = lowest(qs.iter().map(|q| right.height(q)).collect());
    let low_p = lowest(ps.iter().map(|p| left.height(p)).collect());

    let p_geo = ps
        .iter()
        .map(|w| left.distance_to_geodesic(ps[0], ps[ps.len() - 1], w))
        .fold(0.0, f64::max);
    let q_vert = qs
        .iter()
        .map(|w| right.distance_to_vertical(qs[low_q], w))
        .fold(0.0, f64::max);
    let q_geo = qs
        .iter()
        .map(|w| right.distance_to_geodesic(qs[0], qs[qs.len() - 1], w))
        .fold(0.0, f64::max);
    let p_vert = ps
        .iter()
        .map(|w| left.distance_to_vertical(ps[low_p], w))
        .fold(0.0, f64::max);

    let hp_kappa = p_geo.max(q_vert);
    let hq_kappa = q_geo.max(p_vert);
    let tol = space.tolerance().max(1e-9 * scale.abs());
    Ok(TypeReport {
        hp_kappa,
        hq_kappa,
        scale,
        is_hp_type: hp_kappa <= scale + tol,
        is_hq_type: hq_kappa <= scale + tol,
    })
}

/// Largest `| d(α(i), α(j)) - |t_i - t_j| |` for each projection, with `t`
/// the `N`-length parameter.
pub fn projection_slack<L: Space, R: Space>(space: &HoroSpace<L, R>, path: &[Hp<L, R>]) -> (f64, f64) {
    let mut t = vec![0.0];
    for w in path.windows(2) {
        t.push(t.last().expect("nonempty") + space.step_length(&w[0], &w[1]));
    }
    let (mut sp, mut sq) = (0.0f64, 0.0f64);
    for i in 0..path.len() {
        for j in i + 1..path.len() {
            let dt = t[j] - t[i];
            sp = sp.max((space.left().distance(&path[i].p, &path[j].p) - dt).abs());
            sq = sq.max((space.right().distance(&path[i].q, &path[j].q) - dt).abs());
        }
    }
    (sp, sq)
}

/// `d_r` of the endpoint projections, `(p, q)`.
pub fn endpoint_relative_distances<L: Space, R: Space>(
    space: &HoroSpace<L, R>,
    x: &Hp<L, R>,
    y: &Hp<L, R>,
) -> (f64, f64) {
    (
        relative_distance(space.left(), &x.p, &y.p),
        relative_distance(space.right(), &x.q, &y.q),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeadEnd {
    pub vertex: String,
    pub depth: i64,
    /// One geodesic from the origin, as serialized points.
    pub geodesic: Vec<String>,
    pub neighbor_depths: Vec<i64>,
}

/// Vertices `v` none of whose neighbours is farther from the origin, so no
/// geodesic from `o` to `v` extends. Vertices on the sphere of the ball
/// qualify only when all their neighbours are inside it; a missing
/// neighbour would be at depth `radius + 1`.
pub fn dead_end_census(g: &DlGraph) -> Result<Vec<DeadEnd>> {
    if g.radius < 3 {
        return Err(GeomError::Precondition(format!(
            "dead-end census needs radius >= 3, got {}",
            g.radius
        )));
    }
    let degree = (g.p + g.q) as usize;
    let mut order: Vec<usize> = (0..g.len())
        .filter(|&i| g.depth[i] > 0 && (g.depth[i] < g.radius || g.adjacency[i].len() == degree))
        .collect();
    order.sort_by_key(|&i| g.serialize(i));
    let mut out = Vec::new();
    for v in order {
        let dv = g.depth[v];
        let neighbor_depths: Vec<i64> = g.adjacency[v].iter().map(|&u| g.depth[u]).collect();
        if neighbor_depths.iter().all(|&d| d <= dv) {
            out.push(DeadEnd {
                vertex: g.serialize(v),
                depth: dv,
                geodesic: origin_geodesic(g, v).into_iter().map(|i| g.serialize(i)).collect(),
                neighbor_depths,
            });
        }
    }
    Ok(out)
}

/// Lexicographically first geodesic from the origin to `v` by stepping to
/// the smallest-index neighbour one level closer.
fn origin_geodesic(g: &DlGraph, v: usize) -> Vec<usize> {
    let mut path = vec![v];
    let mut cur = v;
    while g.depth[cur] > 0 {
        cur = *g.adjacency[cur]
            .iter()
            .find(|&&u| g.depth[u] == g.depth[cur] - 1)
            .expect("BFS predecessor");
        path.push(cur);
    }
    path.reverse();
    path
}

/// `true` when no neighbour `u` of `y` has `coarse(x, u) > coarse(x, y)`.
pub fn is_coarse_dead_end(g: &DlGraph, x: usize, y: usize) -> bool {
    let (px, py) = (g.point(x), g.point(y));
    let d = coarse_int(px, py);
    dl_neighbors(g.p, g.q, py).iter().all(|u| coarse_int(px, u) <= d)
}

/// One census row: the pair, oracle and coarse distances, and the analysis
/// of the lexicographically first geodesic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusRow {
    pub x: String,
    pub y: String,
    pub bfs_dist: i64,
    pub coarse_dist: i64,
    pub hplus: f64,
    pub hminus: f64,
    pub pattern: String,
    pub type_flags: String,
    pub kappa_eff: f64,
    pub dead_end: bool,
}

pub const CENSUS_HEADER: &str = "x,y,bfs_dist,coarse_dist,hplus,hminus,pattern,type_flags,kappa_eff,dead_end";

impl CensusRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},\"{}\",{},{},{}",
            self.x,
            self.y,
            self.bfs_dist,
            self.coarse_dist,
            self.hplus,
            self.hminus,
            self.pattern,
            self.type_flags,
            self.kappa_eff,
            self.dead_end
        )
    }
}

/// `Hp`, `Hq`, `Hp+Hq` or `-`.
pub fn type_flags(report: &TypeReport) -> String {
    match (report.is_hp_type, report.is_hq_type) {
        (true, true) => "Hp+Hq".into(),
        (true, false) => "Hp".into(),
        (false, true) => "Hq".into(),
        (false, false) => "-".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dl::{dl_space, DEFAULT_GEODESIC_BUDGET};
    use crate::tree::TreeVertex;

    fn tv(h: i64, digits: &[(i64, u32)]) -> TreeVertex {
        TreeVertex::new(h, digits.iter().copied()).unwrap()
    }

    fn labels(segs: &[MonotoneSegment]) -> Vec<Monotonicity> {
        segs.iter().map(|s| s.label).collect()
    }

    #[test]
    fn stats_of_vertical_and_point() {
        let s = dl_space(2, 2).unwrap();
        let v = s.vertical_through(&s.base_point());
        let path: Vec<_> = (0..=5).map(|t| v.at(&s, t as f64).unwrap()).collect();
        let st = path_stats(&s, &path).unwrap();
        assert_eq!((st.h_plus, st.h_minus, st.length), (5.0, 0.0, 5.0));
        let st = path_stats(&s, &path[..1]).unwrap();
        assert_eq!((st.length, st.h_plus), (0.0, st.h_minus));
        assert!(path_stats(&s, &[]).is_err());
    }

    #[test]
    fn decomposition_examples() {
        let zero = BigScalar::zero();
        let inc: Vec<(f64, f64)> = (0..6).map(|i| (i as f64, i as f64)).collect();
        assert_eq!(
            labels(&monotone_decomposition_raw(&inc, &zero)),
            vec![Monotonicity::Inc]
        );

        let vee: Vec<(f64, f64)> = [0, -1, -2, -1, 0, 1, 0]
            .iter()
            .enumerate()
            .map(|(i, &h)| (i as f64, h as f64))
            .collect();
        let segs = monotone_decomposition_raw(&vee, &zero);
        assert_eq!(
            labels(&segs),
            vec![Monotonicity::Dec, Monotonicity::Inc, Monotonicity::Dec]
        );
        assert_eq!((segs[0].end, segs[1].end), (2, 5));

        let stair: Vec<(f64, f64)> = [0, 3, 2, 5, 4, 7, 6, 9]
            .iter()
            .enumerate()
            .map(|(i, &h)| (i as f64, h as f64))
            .collect();
        assert_eq!(monotone_decomposition_raw(&stair, &BigScalar::one()).len(), 1);
        assert!(monotone_decomposition_raw(&stair, &zero).len() > 1);

        let one = monotone_decomposition_raw(&[(0.0, 3.0)], &zero);
        assert_eq!(one.len(), 1);
    }

    #[test]
    fn dl_geodesic_with_both_merges() {
        let s = dl_space(2, 2).unwrap();
        let g = DlGraph::ball(2, 2, 6).unwrap();
        let x = HoroPoint::raw(tv(0, &[(1, 1)]), tv(0, &[]));
        let y = HoroPoint::raw(tv(0, &[]), tv(0, &[(0, 1)]));
        let paths = g.all_geodesics(&x, &y, DEFAULT_GEODESIC_BUDGET).unwrap();
        assert!(paths.len() > 1);
        for p in &paths {
            let pts = g.path_points(p);
            let segs = monotone_decomposition(&s, &pts, &BigScalar::zero());
            // Equal heights admit both orders.
            assert!(["[dec,inc,dec]", "[inc,dec,inc]"].contains(&pattern_string(&segs).as_str()));
            let hb = verify_height_bounds(&s, &pts, Some(g.bfs_distance(&x, &y).unwrap() as f64)).unwrap();
            assert_eq!((hb.low_deviation, hb.high_deviation), (0.0, 0.0));
            assert!(hb.certified);
            let shape = classify_shape(&s, &pts).unwrap();
            assert_eq!(shape.case, ShapeCase::Either);
            assert_eq!(shape.kappa_eff, 0.0);
            assert!(shape.certified);
        }
    }

    #[test]
    fn non_geodesic_is_rejected() {
        let s = dl_space(2, 2).unwrap();
        let v = s.vertical_through(&s.base_point());
        let path: Vec<_> = [0, 1, 0].iter().map(|&t| v.at(&s, t as f64).unwrap()).collect();
        assert!(matches!(
            verify_height_bounds(&s, &path, Some(0.0)),
            Err(GeomError::Integrity(_))
        ));
    }

    #[test]
    fn types_of_lines() {
        let s = dl_space(2, 2).unwrap();
        let v = s.vertical_through(&s.base_point());
        let vertical: Vec<_> = (-10..=10).map(|t| v.at(&s, t as f64).unwrap()).collect();
        let r = classify_type(&s, &vertical, 0.0, DEFAULT_MIN_TYPE_STEPS).unwrap();
        assert!(r.is_hp_type && r.is_hq_type);
        assert!(classify_type(&s, &vertical[..5], 0.0, DEFAULT_MIN_TYPE_STEPS).is_err());

        // Up along the p-ray, then down a different p-branch: q stays on
        // one vertical.
        let top = tv(3, &[]);
        let mut path: Vec<_> = (0..=3)
            .map(|t| HoroPoint::raw(tv(0, &[]).ancestor(t), tv(-t, &[])))
            .collect();
        let down_p = tv(0, &[(2, 1)]);
        for t in (0..3).rev() {
            path.push(HoroPoint::raw(down_p.ancestor(t), tv(-t, &[])));
        }
        assert_eq!(path[3].p, top);
        let r = classify_type(&s, &path, 0.0, 1).unwrap();
        assert!(r.is_hp_type && !r.is_hq_type);
    }

    #[test]
    fn dead_ends_exist_at_radius_four() {
        let g = DlGraph::ball(2, 2, 4).unwrap();
        let found = dead_end_census(&g).unwrap();
        assert!(!found.is_empty());
        for d in &found {
            assert!(d.neighbor_depths.iter().all(|&n| n <= d.depth));
            assert_eq!(d.geodesic.len() as i64, d.depth + 1);
        }
        assert!(dead_end_census(&DlGraph::ball(2, 2, 2).unwrap()).is_err());
    }

    #[test]
    fn monotone_dl_geodesics_project_isometrically() {
        let s = dl_space(2, 3).unwrap();
        let v = s.vertical_through(&s.base_point());
        let path: Vec<_> = (0..=6).map(|t| v.at(&s, -(t as f64)).unwrap()).collect();
        assert_eq!(projection_slack(&s, &path), (0.0, 0.0));
    }
}
