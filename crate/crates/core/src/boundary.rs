//! Boundary directions of `DL(p, q)` from the origin and finite-horizon
//! asymptotic comparison of rays.
//!
//! A ray whose height falls has its `p` side converging to an end of `T_p`
//! other than `a_p` while its `q` side climbs to `a_q`; it is labelled
//! `UP[p=...]` after the `p`-cylinder. Rising rays are labelled
//! `DOWN[q=...]` symmetrically. Cylinders at depth `k` are the digit words
//! at levels `-1, ..., -k`.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::json;

use crate::component::ComponentKind;
use crate::dl::{coarse_int, DlPoint, DlSpace};
use crate::error::{GeomError, Result};
use crate::horo::HoroPoint;
use crate::tree::TreeVertex;

pub const DEFAULT_HORIZON: usize = 50;
pub const DEFAULT_WINDOW: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    /// `p` end free, `q` end at `a_q`.
    Up,
    /// `p` end at `a_p`, `q` end free.
    Down,
}

/// Depth-`k` cell of the boundary.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoundaryPoint {
    pub side: Side,
    /// Digits at levels `-1, ..., -k` of the free component.
    pub word: Vec<u32>,
}

impl BoundaryPoint {
    pub fn depth(&self) -> usize {
        self.word.len()
    }

    /// The all-zero cell keeps the distinguished end in its closure.
    pub fn flagged(&self) -> bool {
        self.word.iter().all(|&d| d == 0)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({ "cell": self.to_string(), "depth": self.depth(), "flagged": self.flagged() })
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wide = self.word.iter().any(|&d| d > 9);
        let digits: Vec<String> = self.word.iter().map(|d| d.to_string()).collect();
        let body = digits.join(if wide { "," } else { "" });
        match self.side {
            Side::Up => write!(f, "UP[p={body}]"),
            Side::Down => write!(f, "DOWN[q={body}]"),
        }
    }
}

fn words(base: u32, k: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..base).map(move |d| {
                    let mut v = w.clone();
                    v.push(d);
                    v
                })
            })
            .collect();
    }
    out
}

/// All depth-`k` cells: `p^k` UP cells then `q^k` DOWN cells.
pub fn enumerate_cells(left: ComponentKind, right: ComponentKind, k: usize) -> Result<Vec<BoundaryPoint>> {
    let (ComponentKind::Tree(p), ComponentKind::Tree(q)) = (left, right) else {
        return Err(GeomError::Unsupported(
            "cell enumeration needs two tree components; continuous boundaries have no finite cylinders".into(),
        ));
    };
    if k == 0 {
        return Err(GeomError::Precondition("depth must be at least 1".into()));
    }
    let up = words(p, k)
        .into_iter()
        .map(|word| BoundaryPoint { side: Side::Up, word });
    let down = words(q, k)
        .into_iter()
        .map(|word| BoundaryPoint { side: Side::Down, word });
    Ok(up.chain(down).collect())
}

/// Way a ray witness continues after its prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Heading {
    /// Height increases: `p` climbs, `q` descends.
    Rising,
    /// Height decreases: `p` descends, `q` climbs.
    Falling,
}

/// A finite path followed by a vertical continuation. The descending side
/// picks `digits[level]` when it steps down to `level`, and `0` for levels
/// not listed.
#[derive(Debug, Clone, PartialEq)]
pub struct RayWitness {
    pub prefix: Vec<DlPoint>,
    pub heading: Heading,
    pub digits: BTreeMap<i64, u32>,
}

impl RayWitness {
    pub fn new(space: &DlSpace, prefix: Vec<DlPoint>, heading: Heading, digits: BTreeMap<i64, u32>) -> Result<Self> {
        if prefix.is_empty() {
            return Err(GeomError::Precondition("ray prefix is empty".into()));
        }
        let bound = match heading {
            Heading::Rising => space.right().p(),
            Heading::Falling => space.left().p(),
        };
        if let Some((_, &d)) = digits.iter().find(|(_, &d)| d >= bound) {
            return Err(GeomError::DigitOutOfRange { digit: d, p: bound });
        }
        for (i, w) in prefix.windows(2).enumerate() {
            if coarse_int(&w[0], &w[1]) != 1 {
                return Err(GeomError::Precondition(format!(
                    "prefix jumps between steps {i} and {}",
                    i + 1
                )));
            }
        }
        Ok(RayWitness {
            prefix,
            heading,
            digits,
        })
    }

    /// Vertical ray from `start`, stepping down along `word` at levels
    /// `-1, -2, ...` and along `0` elsewhere.
    pub fn vertical(space: &DlSpace, start: DlPoint, heading: Heading, word: &[u32]) -> Result<Self> {
        let digits = word.iter().enumerate().map(|(i, &d)| (-(i as i64) - 1, d)).collect();
        RayWitness::new(space, vec![start], heading, digits)
    }

    fn step(&self, x: &DlPoint) -> DlPoint {
        let digit = |level: i64| self.digits.get(&level).copied().unwrap_or(0);
        match self.heading {
            Heading::Rising => HoroPoint::raw(x.p.parent(), x.q.descend(x.q.height() - 1, digit)),
            Heading::Falling => HoroPoint::raw(x.p.descend(x.p.height() - 1, digit), x.q.parent()),
        }
    }

    /// The first `n + 1` points.
    pub fn points(&self, n: usize) -> Vec<DlPoint> {
        let mut out: Vec<DlPoint> = self.prefix.iter().take(n + 1).cloned().collect();
        while out.len() < n + 1 {
            let next = self.step(out.last().expect("nonempty"));
            out.push(next);
        }
        out
    }

    /// Fails unless the first `n + 1` points form a geodesic.
    pub fn verify(&self, n: usize) -> Result<Vec<DlPoint>> {
        let pts = self.points(n);
        for (i, x) in pts.iter().enumerate() {
            let d = coarse_int(&pts[0], x);
            if d != i as i64 {
                return Err(GeomError::Integrity(format!(
                    "ray witness is not geodesic: point {i} lies at distance {d} from the start"
                )));
            }
        }
        Ok(pts)
    }
}

fn read_word(v: &TreeVertex, k: usize) -> Vec<u32> {
    (1..=k as i64).map(|j| v.digit(-j)).collect()
}

/// Depth-`k` label of a ray, read after `k + horizon` steps past the prefix.
/// The heights must be strictly monotone over the last `window` steps and
/// the free component must have passed below level `-k`.
pub fn ray_direction(
    space: &DlSpace,
    ray: &RayWitness,
    k: usize,
    horizon: usize,
    window: usize,
) -> Result<BoundaryPoint> {
    if window == 0 || window > horizon {
        return Err(GeomError::Inconclusive(format!(
            "window {window} does not fit in horizon {horizon}"
        )));
    }
    let n = ray.prefix.len() - 1 + k + horizon;
    let pts = ray.verify(n)?;
    let h: Vec<i64> = pts.iter().map(|x| x.p.height()).collect();
    let tail = &h[n - window..];
    let rising = tail.windows(2).all(|w| w[1] == w[0] + 1);
    let falling = tail.windows(2).all(|w| w[1] == w[0] - 1);
    let last = &pts[n];
    space.left().validate(&last.p)?;
    space.right().validate(&last.q)?;
    let deep = -(k as i64);
    match (rising, falling) {
        (false, true) if last.p.height() <= deep => Ok(BoundaryPoint {
            side: Side::Up,
            word: read_word(&last.p, k),
        }),
        (true, false) if last.q.height() <= deep => Ok(BoundaryPoint {
            side: Side::Down,
            word: read_word(&last.q, k),
        }),
        _ => Err(GeomError::Inconclusive(format!(
            "heights {:?} over the last {window} steps do not settle below level {deep}",
            tail
        ))),
    }
}

/// Distance from `x` to the sampled points of a ray; candidates are pruned by
/// the height gap, which bounds the distance from below.
fn distance_to_samples(x: &DlPoint, samples: &[DlPoint]) -> i64 {
    let hx = x.p.height();
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by_key(|&i| (samples[i].p.height() - hx).abs());
    let mut best = i64::MAX;
    for i in order {
        if (samples[i].p.height() - hx).abs() >= best {
            break;
        }
        best = best.min(coarse_int(x, &samples[i]));
    }
    best
}

fn tail_settles(from: &[DlPoint], to: &[DlPoint], horizon: usize, window: usize) -> bool {
    let profile: Vec<i64> = (horizon - window..=horizon)
        .map(|n| distance_to_samples(&from[n], to))
        .collect();
    profile.windows(2).all(|w| w[1] <= w[0])
}

/// Whether two rays look asymptotic up to `horizon`: the distance from each
/// ray's points to the other ray must be non-increasing over the last
/// `window` parameters, in both directions.
pub fn asymptotic(r1: &RayWitness, r2: &RayWitness, horizon: usize, window: usize) -> Result<bool> {
    if window == 0 || window >= horizon {
        return Err(GeomError::Inconclusive(format!(
            "horizon {horizon} too small for window {window}"
        )));
    }
    let reach = horizon + window;
    let a = r1.points(reach);
    let b = r2.points(reach);
    Ok(tail_settles(&a, &b, horizon, window) && tail_settles(&b, &a, horizon, window))
}

/// Origin-based vertical ray with the given label; the convenience inverse of
/// [`ray_direction`].
pub fn vertical_ray_for(space: &DlSpace, cell: &BoundaryPoint) -> Result<RayWitness> {
    let heading = match cell.side {
        Side::Up => Heading::Falling,
        Side::Down => Heading::Rising,
    };
    RayWitness::vertical(space, space.base_point(), heading, &cell.word)
}

pub fn format_ray(space: &DlSpace, ray: &RayWitness) -> String {
    let start = space.format_point(&ray.prefix[0]);
    let heading = match ray.heading {
        Heading::Rising => "rising",
        Heading::Falling => "falling",
    };
    let digits: Vec<String> = ray.digits.iter().map(|(l, d)| format!("{l}:{d}")).collect();
    format!("{start} +{} {heading} [{}]", ray.prefix.len() - 1, digits.join(","))
}

/// Vertical ray whose line passes through the origin, started at product
/// height `offset`. The descending side follows `word` at levels
/// `-1, -2, ...`; `filler` picks the digits of the climbing side's start
/// when that start lies below the origin.
pub fn offset_vertical_ray(
    space: &DlSpace,
    heading: Heading,
    word: &[u32],
    offset: i64,
    filler: &[u32],
) -> Result<RayWitness> {
    let along = |level: i64| {
        if level < 0 {
            word.get((-level - 1) as usize).copied().unwrap_or(0)
        } else {
            0
        }
    };
    let pick = |level: i64| filler.get((-level - 1) as usize).copied().unwrap_or(0);
    let root = TreeVertex::root();
    let start = match heading {
        Heading::Falling if offset >= 0 => HoroPoint::raw(TreeVertex::at_height(offset), root.descend(-offset, pick)),
        Heading::Falling => HoroPoint::raw(root.descend(offset, along), TreeVertex::at_height(-offset)),
        Heading::Rising if offset <= 0 => HoroPoint::raw(root.descend(offset, pick), TreeVertex::at_height(-offset)),
        Heading::Rising => HoroPoint::raw(TreeVertex::at_height(offset), root.descend(-offset, along)),
    };
    space.left().validate(&start.p)?;
    space.right().validate(&start.q)?;
    RayWitness::vertical(space, start, heading, word)
}

/// Outcome of comparing the asymptotic relation on a family of rays with
/// equality of their labels at depth `horizon`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionReport {
    /// Depth-`k` cell of each ray, `None` when inconclusive.
    pub cells: Vec<Option<BoundaryPoint>>,
    /// Depth-`horizon` label of each ray.
    pub fine_labels: Vec<Option<BoundaryPoint>>,
    pub matrix: Vec<Vec<bool>>,
    pub inconclusive: usize,
    pub reflexive: bool,
    pub symmetric: bool,
    pub transitive: bool,
    /// Asymptotic exactly when the fine labels agree.
    pub matches_labels: bool,
    pub classes: usize,
}

impl PartitionReport {
    pub fn passes(&self) -> bool {
        self.inconclusive == 0 && self.reflexive && self.symmetric && self.transitive && self.matches_labels
    }
}

pub fn partition_check(
    space: &DlSpace,
    rays: &[RayWitness],
    k: usize,
    horizon: usize,
    window: usize,
) -> Result<PartitionReport> {
    if window == 0 || window >= horizon {
        return Err(GeomError::Inconclusive(format!(
            "horizon {horizon} too small for window {window}"
        )));
    }
    let mut inconclusive = 0;
    let mut label = |depth: usize, r: &RayWitness| match ray_direction(space, r, depth, horizon, window) {
        Ok(b) => Ok(Some(b)),
        Err(GeomError::Inconclusive(_)) => {
            inconclusive += 1;
            Ok(None)
        }
        Err(e) => Err(e),
    };
    let cells = rays.iter().map(|r| label(k, r)).collect::<Result<Vec<_>>>()?;
    let fine_labels = rays.iter().map(|r| label(horizon, r)).collect::<Result<Vec<_>>>()?;
    let n = rays.len();
    let mut matrix = vec![vec![false; n]; n];
    for i in 0..n {
        for j in i..n {
            let a = asymptotic(&rays[i], &rays[j], horizon, window)?;
            matrix[i][j] = a;
            if i != j {
                matrix[j][i] = asymptotic(&rays[j], &rays[i], horizon, window)?;
            }
        }
    }
    let reflexive = (0..n).all(|i| matrix[i][i]);
    let symmetric = (0..n).all(|i| (0..n).all(|j| matrix[i][j] == matrix[j][i]));
    let transitive = (0..n).all(|i| {
        (0..n)
            .filter(|&j| matrix[i][j])
            .all(|j| (0..n).all(|l| !matrix[j][l] || matrix[i][l]))
    });
    let matches_labels = (0..n).all(|i| {
        (0..n).all(|j| match (&fine_labels[i], &fine_labels[j]) {
            (Some(a), Some(b)) => matrix[i][j] == (a == b),
            _ => false,
        })
    });
    let mut seen: Vec<&BoundaryPoint> = fine_labels.iter().flatten().collect();
    seen.sort();
    seen.dedup();
    let classes = seen.len();
    Ok(PartitionReport {
        cells,
        fine_labels,
        matrix,
        inconclusive,
        reflexive,
        symmetric,
        transitive,
        matches_labels,
        classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dl::dl_space;

    fn v(h: i64, d: &[(i64, u32)]) -> TreeVertex {
        TreeVertex::new(h, d.iter().copied()).unwrap()
    }

    #[test]
    fn cell_counts() {
        let c = enumerate_cells(ComponentKind::Tree(2), ComponentKind::Tree(3), 2).unwrap();
        assert_eq!(c.iter().filter(|b| b.side == Side::Up).count(), 4);
        assert_eq!(c.iter().filter(|b| b.side == Side::Down).count(), 9);
        assert_eq!(c.iter().filter(|b| b.flagged()).count(), 2);
        let c = enumerate_cells(ComponentKind::Tree(2), ComponentKind::Tree(2), 1).unwrap();
        assert_eq!(c.len(), 4);
        assert_eq!(c[1].to_string(), "UP[p=1]");
        assert!(matches!(
            enumerate_cells(ComponentKind::Plane, ComponentKind::Tree(2), 1),
            Err(GeomError::Unsupported(_))
        ));
    }

    #[test]
    fn vertical_labels() {
        let s = dl_space(2, 3).unwrap();
        let o = s.base_point();
        let down = RayWitness::vertical(&s, o.clone(), Heading::Falling, &[]).unwrap();
        let b = ray_direction(&s, &down, 3, DEFAULT_HORIZON, DEFAULT_WINDOW).unwrap();
        assert_eq!(b.to_string(), "UP[p=000]");
        assert!(b.flagged());
        let up = RayWitness::vertical(&s, o, Heading::Rising, &[1]).unwrap();
        let b = ray_direction(&s, &up, 3, DEFAULT_HORIZON, DEFAULT_WINDOW).unwrap();
        assert_eq!(b.to_string(), "DOWN[q=100]");
    }

    #[test]
    fn bent_ray_takes_its_final_branch() {
        let s = dl_space(2, 2).unwrap();
        // Down two steps with p-digits 1, 1, then up forever.
        let o = s.base_point();
        let a = HoroPoint::raw(v(-1, &[(-1, 1)]), v(1, &[]));
        let b = HoroPoint::raw(v(-2, &[(-1, 1), (-2, 1)]), v(2, &[]));
        let mut digits = BTreeMap::new();
        digits.insert(1, 1);
        let ray = RayWitness::new(&s, vec![o, a, b], Heading::Rising, digits).unwrap();
        let cell = ray_direction(&s, &ray, 2, DEFAULT_HORIZON, DEFAULT_WINDOW).unwrap();
        assert_eq!(cell.side, Side::Down);
        assert_eq!(cell.word, vec![0, 0]);
    }

    #[test]
    fn non_geodesic_witness_is_rejected() {
        let s = dl_space(2, 2).unwrap();
        let o = s.base_point();
        let a = HoroPoint::raw(v(-1, &[]), v(1, &[]));
        // Back to the origin: a path but not a geodesic.
        let ray = RayWitness::new(&s, vec![o.clone(), a, o], Heading::Falling, BTreeMap::new()).unwrap();
        assert!(matches!(ray.verify(5), Err(GeomError::Integrity(_))));
    }

    #[test]
    fn short_horizon_is_inconclusive() {
        let s = dl_space(2, 2).unwrap();
        let r = RayWitness::vertical(&s, s.base_point(), Heading::Falling, &[]).unwrap();
        assert!(matches!(asymptotic(&r, &r, 5, 10), Err(GeomError::Inconclusive(_))));
        assert!(matches!(
            ray_direction(&s, &r, 2, 5, 10),
            Err(GeomError::Inconclusive(_))
        ));
    }

    #[test]
    fn asymptotic_examples() {
        let s = dl_space(2, 2).unwrap();
        let o = s.base_point();
        let r = RayWitness::vertical(&s, o.clone(), Heading::Falling, &[1, 0, 1]).unwrap();
        assert!(asymptotic(&r, &r, DEFAULT_HORIZON, DEFAULT_WINDOW).unwrap());
        // Same downward branch entered from higher up.
        let top = HoroPoint::raw(v(3, &[]), v(-3, &[(-1, 1), (-3, 1)]));
        let r2 = RayWitness::vertical(&s, top, Heading::Falling, &[1, 0, 1]).unwrap();
        assert!(asymptotic(&r, &r2, DEFAULT_HORIZON, DEFAULT_WINDOW).unwrap());
        let other = RayWitness::vertical(&s, o.clone(), Heading::Falling, &[1, 1]).unwrap();
        assert!(!asymptotic(&r, &other, DEFAULT_HORIZON, DEFAULT_WINDOW).unwrap());
        let rising = RayWitness::vertical(&s, o, Heading::Rising, &[]).unwrap();
        assert!(!asymptotic(&r, &rising, DEFAULT_HORIZON, DEFAULT_WINDOW).unwrap());
    }

    #[test]
    fn cell_round_trip() {
        let s = dl_space(2, 3).unwrap();
        for cell in enumerate_cells(ComponentKind::Tree(2), ComponentKind::Tree(3), 2).unwrap() {
            let ray = vertical_ray_for(&s, &cell).unwrap();
            assert_eq!(ray_direction(&s, &ray, 2, 20, 5).unwrap(), cell);
        }
    }

    #[test]
    fn offset_rays_share_labels() {
        let s = dl_space(2, 3).unwrap();
        let mut rays = Vec::new();
        for off in -2..=2 {
            rays.push(offset_vertical_ray(&s, Heading::Falling, &[1], off, &[2, 1]).unwrap());
            rays.push(offset_vertical_ray(&s, Heading::Rising, &[2, 1], off, &[1]).unwrap());
        }
        rays.push(offset_vertical_ray(&s, Heading::Falling, &[0, 1], 1, &[]).unwrap());
        let rep = partition_check(&s, &rays, 2, 20, 5).unwrap();
        assert!(rep.passes(), "{rep:?}");
        assert_eq!(rep.classes, 3);
        assert_eq!(rep.cells[0].as_ref().unwrap().to_string(), "UP[p=10]");
        assert_eq!(rep.cells[1].as_ref().unwrap().to_string(), "DOWN[q=21]");
    }
}
