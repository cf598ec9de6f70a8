//! Runtime choice between the concrete components, so that products can be
//! assembled from parsed input.

use crate::error::{GeomError, Result};
use crate::plane::{PlanePoint, PlaneSpace};
use crate::scalar::BigScalar;
use crate::space::Space;
use crate::tree::{TreeSpace, TreeVertex};

#[derive(Debug, Clone, PartialEq)]
pub enum ComponentPoint {
    Tree { p: u32, vertex: TreeVertex },
    Plane(PlanePoint),
}

impl ComponentPoint {
    pub fn kind(&self) -> ComponentKind {
        match self {
            ComponentPoint::Tree { p, .. } => ComponentKind::Tree(*p),
            ComponentPoint::Plane(_) => ComponentKind::Plane,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentKind {
    Tree(u32),
    Plane,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnySpace {
    Tree(TreeSpace),
    Plane(PlaneSpace),
}

impl AnySpace {
    pub fn for_kind(kind: ComponentKind, delta: Option<BigScalar>) -> Result<Self> {
        let delta = delta.unwrap_or_else(BigScalar::one);
        Ok(match kind {
            ComponentKind::Tree(p) => AnySpace::Tree(TreeSpace::with_delta(p, delta)?),
            ComponentKind::Plane => AnySpace::Plane(PlaneSpace::with_delta(delta)?),
        })
    }

    pub fn kind(&self) -> ComponentKind {
        match self {
            AnySpace::Tree(t) => ComponentKind::Tree(t.p()),
            AnySpace::Plane(_) => ComponentKind::Plane,
        }
    }

    pub fn is_tree(&self) -> bool {
        matches!(self, AnySpace::Tree(_))
    }

    /// Rejects points of another kind or with out-of-range digits.
    pub fn check(&self, x: &ComponentPoint) -> Result<()> {
        if x.kind() != self.kind() {
            return Err(GeomError::Precondition(format!(
                "point of kind {:?} given to a {:?} component",
                x.kind(),
                self.kind()
            )));
        }
        match (self, x) {
            (AnySpace::Tree(t), ComponentPoint::Tree { vertex, .. }) => t.validate(vertex),
            _ => Ok(()),
        }
    }

    fn tree<'a>(&'a self, p: &'a ComponentPoint) -> (&'a TreeSpace, &'a TreeVertex) {
        match (self, p) {
            (AnySpace::Tree(t), ComponentPoint::Tree { vertex, .. }) => (t, vertex),
            _ => panic!("component kind mismatch: {:?} vs {:?}", self.kind(), p.kind()),
        }
    }

    fn plane<'a>(&'a self, p: &ComponentPoint) -> (&'a PlaneSpace, PlanePoint) {
        match (self, p) {
            (AnySpace::Plane(s), ComponentPoint::Plane(pt)) => (s, *pt),
            _ => panic!("component kind mismatch: {:?} vs {:?}", self.kind(), p.kind()),
        }
    }

    fn wrap_tree(&self, v: TreeVertex) -> ComponentPoint {
        match self {
            AnySpace::Tree(t) => ComponentPoint::Tree { p: t.p(), vertex: v },
            AnySpace::Plane(_) => unreachable!("tree vertex in plane component"),
        }
    }
}

macro_rules! dispatch {
    ($self:ident, $x:ident, |$s:ident, $a:ident| $tree:expr, |$ps:ident, $pa:ident| $plane:expr) => {
        match $self {
            AnySpace::Tree(_) => {
                let ($s, $a) = $self.tree($x);
                $tree
            }
            AnySpace::Plane(_) => {
                let ($ps, $pa) = $self.plane($x);
                $plane
            }
        }
    };
}

impl Space for AnySpace {
    type Point = ComponentPoint;

    fn delta(&self) -> &BigScalar {
        match self {
            AnySpace::Tree(t) => t.delta(),
            AnySpace::Plane(s) => s.delta(),
        }
    }

    fn base_point(&self) -> ComponentPoint {
        match self {
            AnySpace::Tree(t) => self.wrap_tree(t.base_point()),
            AnySpace::Plane(s) => ComponentPoint::Plane(s.base_point()),
        }
    }

    fn distance(&self, x: &ComponentPoint, y: &ComponentPoint) -> f64 {
        dispatch!(self, x, |t, a| t.distance(a, self.tree(y).1), |s, a| s
            .distance(&a, &self.plane(y).1))
    }

    fn height(&self, x: &ComponentPoint) -> f64 {
        dispatch!(self, x, |t, a| t.height(a), |s, a| s.height(&a))
    }

    fn segment_top(&self, x: &ComponentPoint, y: &ComponentPoint) -> f64 {
        dispatch!(self, x, |t, a| t.segment_top(a, self.tree(y).1), |s, a| s
            .segment_top(&a, &self.plane(y).1))
    }

    fn vertical_at(&self, anchor: &ComponentPoint, t: f64) -> Result<ComponentPoint> {
        dispatch!(
            self,
            anchor,
            |ts, a| ts.vertical_at(a, t).map(|v| self.wrap_tree(v)),
            |s, a| s.vertical_at(&a, t).map(ComponentPoint::Plane)
        )
    }

    fn geodesic_point(&self, x: &ComponentPoint, y: &ComponentPoint, s: f64) -> Result<ComponentPoint> {
        dispatch!(
            self,
            x,
            |t, a| t.geodesic_point(a, self.tree(y).1, s).map(|v| self.wrap_tree(v)),
            |ps, a| ps.geodesic_point(&a, &self.plane(y).1, s).map(ComponentPoint::Plane)
        )
    }

    fn geodesic(&self, x: &ComponentPoint, y: &ComponentPoint, samples: usize) -> Vec<ComponentPoint> {
        dispatch!(
            self,
            x,
            |t, a| t
                .geodesic(a, self.tree(y).1, samples)
                .into_iter()
                .map(|v| self.wrap_tree(v))
                .collect(),
            |s, a| s
                .geodesic(&a, &self.plane(y).1, samples)
                .into_iter()
                .map(ComponentPoint::Plane)
                .collect()
        )
    }

    fn distance_to_vertical(&self, anchor: &ComponentPoint, w: &ComponentPoint) -> f64 {
        dispatch!(
            self,
            anchor,
            |t, a| t.distance_to_vertical(a, self.tree(w).1),
            |s, a| s.distance_to_vertical(&a, &self.plane(w).1)
        )
    }

    fn distance_to_geodesic(&self, u: &ComponentPoint, v: &ComponentPoint, w: &ComponentPoint) -> f64 {
        dispatch!(
            self,
            u,
            |t, a| t.distance_to_geodesic(a, self.tree(v).1, self.tree(w).1),
            |s, a| s.distance_to_geodesic(&a, &self.plane(v).1, &self.plane(w).1)
        )
    }

    fn height_grid(&self, lo: f64, hi: f64) -> Vec<f64> {
        match self {
            AnySpace::Tree(t) => t.height_grid(lo, hi),
            AnySpace::Plane(s) => s.height_grid(lo, hi),
        }
    }

    fn tolerance(&self) -> f64 {
        match self {
            AnySpace::Tree(t) => t.tolerance(),
            AnySpace::Plane(s) => s.tolerance(),
        }
    }

    fn discrete(&self) -> bool {
        self.is_tree()
    }

    fn format_point(&self, x: &ComponentPoint) -> String {
        dispatch!(self, x, |t, a| t.format_point(a), |s, a| s.format_point(&a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dispatch_matches_concrete() {
        let t = AnySpace::for_kind(ComponentKind::Tree(2), None).unwrap();
        let a = t.base_point();
        let b = ComponentPoint::Tree {
            p: 2,
            vertex: TreeVertex::new(0, [(0, 1)]).unwrap(),
        };
        assert_eq!(t.distance(&a, &b), 2.0);
        assert_eq!(t.format_point(&b), "T2(h=0;0:1)");

        let s = AnySpace::for_kind(ComponentKind::Plane, None).unwrap();
        let u = ComponentPoint::Plane(PlanePoint::new(0.0, 0.0).unwrap());
        let v = ComponentPoint::Plane(PlanePoint::new(0.0, 3.0).unwrap());
        assert!((s.distance(&u, &v) - 3.0).abs() < 1e-12);
        assert!(s.check(&a).is_err());
        assert!(t.check(&b).is_ok());
    }

    #[test]
    fn check_rejects_large_digits() {
        let t = AnySpace::for_kind(ComponentKind::Tree(2), None).unwrap();
        let bad = ComponentPoint::Tree {
            p: 2,
            vertex: TreeVertex::new(0, [(0, 2)]).unwrap(),
        };
        // Kind matches (p = 2) but the digit is out of range.
        assert!(t.check(&bad).is_err());
    }
}
