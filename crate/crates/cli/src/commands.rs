use std::cmp::Ordering;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use horobowtie::boundary::{self, offset_vertical_ray, partition_check, Heading, Side};
use horobowtie::census::{self, CensusOptions, GeodesicScope};
use horobowtie::dl::{coarse_int, DlGraph, DlPoint, DEFAULT_GEODESIC_BUDGET};
use horobowtie::geodesy::{
    classify_shape, classify_type, monotone_decomposition, pattern_string, type_flags, verify_height_bounds,
    CENSUS_HEADER,
};
use horobowtie::horoball::{exponential_law, DEFAULT_LAW_DX};
use horobowtie::ledger::ThresholdId;
use horobowtie::parse::parse_horo;
use horobowtie::{
    AdmissibleNorm, AnySpace, BigScalar, ComponentKind, ComponentPoint, GeomError, HoroPoint, HoroSpace, PlaneSpace,
    TreeVertex,
};

use crate::output::{csv_field, emit, emit_with_summary, json_text, SCHEMA};
use crate::{Format, Global, Verdict};

type Product = HoroSpace<AnySpace, AnySpace>;
type Point = HoroPoint<ComponentPoint, ComponentPoint>;

fn delta_of(g: &Global) -> Result<Option<BigScalar>> {
    g.delta
        .as_deref()
        .map(|s| s.parse::<BigScalar>().context("parsing --delta"))
        .transpose()
}

fn norm_of(g: &Global) -> Result<AdmissibleNorm> {
    Ok(g.norm.parse::<AdmissibleNorm>()?)
}

fn product(g: &Global, left: ComponentKind, right: ComponentKind) -> Result<Product> {
    let delta = delta_of(g)?;
    let l = AnySpace::for_kind(left, delta.clone())?;
    let r = AnySpace::for_kind(right, delta)?;
    Ok(HoroSpace::new(l, r, norm_of(g)?)?)
}

#[derive(Args, Debug)]
pub struct PairArgs {
    /// First point, e.g. `T2(h=0;)|T2(h=0;)` or `P(x=0,z=0)|P(x=0,z=0)`.
    pub x: String,
    pub y: String,
}

fn parse_pair(g: &Global, a: &PairArgs) -> Result<(Product, Point, Point)> {
    let (xl, xr) = parse_horo(&a.x)?;
    let (yl, yr) = parse_horo(&a.y)?;
    if xl.kind() != yl.kind() || xr.kind() != yr.kind() {
        return Err(GeomError::Precondition(format!(
            "points live in different products: {:?}|{:?} vs {:?}|{:?}",
            xl.kind(),
            xr.kind(),
            yl.kind(),
            yr.kind()
        ))
        .into());
    }
    let space = product(g, xl.kind(), xr.kind())?;
    space.left().check(&xl)?;
    space.right().check(&xr)?;
    space.left().check(&yl)?;
    space.right().check(&yr)?;
    let x = space.make_point(xl, xr)?;
    let y = space.make_point(yl, yr)?;
    Ok((space, x, y))
}

fn tree_pair(x: &Point) -> Option<(u32, u32, DlPoint)> {
    match (&x.p, &x.q) {
        (ComponentPoint::Tree { p, vertex: a }, ComponentPoint::Tree { p: q, vertex: b }) => {
            Some((*p, *q, HoroPoint::raw(a.clone(), b.clone())))
        }
        _ => None,
    }
}

/// Smallest ball around the origin whose margin rule admits the pair.
fn ball_for(g: &Global, x: &DlPoint, y: &DlPoint, p: u32, q: u32) -> Result<DlGraph> {
    let o = HoroPoint::raw(TreeVertex::root(), TreeVertex::root());
    let need = coarse_int(&o, x) + coarse_int(&o, y) + coarse_int(x, y);
    let radius = (need + 1) / 2;
    Ok(DlGraph::ball_with_budget(p, q, radius, g.budget)?)
}

fn finite(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

pub fn distance(g: &Global, a: &PairArgs) -> Result<Verdict> {
    let (space, x, y) = parse_pair(g, a)?;
    let coarse = space.coarse_distance(&x, &y);
    let plan = space.build_path(&x, &y)?;
    let cert = space.certify_plan(&plan)?;
    let bfs = match (tree_pair(&x), tree_pair(&y)) {
        (Some((p, q, dx)), Some((_, _, dy))) if space.norm().is_l1() => {
            let ball = ball_for(g, &dx, &dy, p, q)?;
            Some(ball.bfs_distance(&dx, &dy)?)
        }
        _ => None,
    };
    let bracket = space.ledger().threshold(ThresholdId::C0x15).log2_approx();
    let record = json!({
        "schema": SCHEMA,
        "x": space.format_point(&x),
        "y": space.format_point(&y),
        "norm": space.norm().name(),
        "coarse": coarse,
        "delta_h": space.delta_h(&x, &y),
        "dr_p": space.dr_p(&x, &y),
        "dr_q": space.dr_q(&x, &y),
        "bfs": bfs,
        "built_path_length": plan.total_length,
        "path_certified": cert.holds,
        "certified_bracket_log2": finite(bracket),
    });
    let ok = cert.holds && bfs.is_none_or(|d| d as f64 == coarse);
    let text = match g.format {
        Format::Json => json_text(&record),
        Format::Csv => format!(
            "x,y,coarse,bfs,built_path_length,delta_h,dr_p,dr_q,path_certified\n{},{},{},{},{},{},{},{},{}\n",
            csv_field(&space.format_point(&x)),
            csv_field(&space.format_point(&y)),
            coarse,
            bfs.map(|d| d.to_string()).unwrap_or_default(),
            plan.total_length,
            space.delta_h(&x, &y),
            space.dr_p(&x, &y),
            space.dr_q(&x, &y),
            cert.holds
        ),
    };
    emit(g.out.as_deref(), &text)?;
    Ok(if ok { Verdict::Pass } else { Verdict::Fail })
}

const MAX_LISTED_POINTS: usize = 64;

pub fn path(g: &Global, a: &PairArgs) -> Result<Verdict> {
    let (space, x, y) = parse_pair(g, a)?;
    let plan = space.build_path(&x, &y)?;
    let cert = space.certify_plan(&plan)?;
    let text = match g.format {
        Format::Json => {
            let segments: Vec<Value> = plan
                .segments
                .iter()
                .map(|s| {
                    let pts: Vec<String> = s.points.iter().map(|p| space.format_point(p)).collect();
                    let mut v = json!({
                        "role": s.role.to_string(),
                        "length": s.length,
                        "samples": pts.len(),
                        "start": pts.first(),
                        "end": pts.last(),
                    });
                    if pts.len() <= MAX_LISTED_POINTS {
                        v["points"] = json!(pts);
                    }
                    v
                })
                .collect();
            let corners: Vec<String> = plan.corners.iter().map(|c| space.format_point(c)).collect();
            json_text(&json!({
                "schema": SCHEMA,
                "x": space.format_point(&x),
                "y": space.format_point(&y),
                "reversed": plan.reversed,
                "total_length": plan.total_length,
                "coarse": plan.coarse,
                "corners": corners,
                "segments": segments,
                "certificate": {
                    "holds": cert.holds,
                    "length": cert.length,
                    "coarse": cert.coarse,
                    "rhs_log2": finite(cert.rhs_log2),
                },
            }))
        }
        Format::Csv => {
            let mut rows: Vec<(String, String, f64)> = Vec::new();
            for seg in &plan.segments {
                for p in &seg.points {
                    let text = space.format_point(p);
                    if rows.last().is_some_and(|r| r.1 == text) {
                        continue;
                    }
                    rows.push((seg.role.to_string(), text, space.height(p)));
                }
            }
            if plan.reversed {
                rows.reverse();
            }
            let mut s = String::from("index,role,point,height\n");
            for (i, (role, text, h)) in rows.iter().enumerate() {
                s.push_str(&format!("{i},{role},{},{h}\n", csv_field(text)));
            }
            s
        }
    };
    emit(g.out.as_deref(), &text)?;
    Ok(if cert.holds { Verdict::Pass } else { Verdict::Fail })
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub pair: PairArgs,

    /// Scale for the type labels.
    #[arg(long, default_value_t = 0.0)]
    pub scale: f64,

    /// Fewest steps a path needs before it is typed.
    #[arg(long, default_value_t = 1)]
    pub min_steps: usize,

    #[arg(long, default_value_t = DEFAULT_GEODESIC_BUDGET)]
    pub geodesic_budget: usize,
}

fn classify_record(space: &Product, path: &[Point], a: &ClassifyArgs, source: &str) -> Result<(Value, bool)> {
    let shape = classify_shape(space, path)?;
    let segments = monotone_decomposition(space, path, &BigScalar::zero());
    let heights = verify_height_bounds(space, path, None)?;
    let ty = match classify_type(space, path, a.scale, a.min_steps) {
        Ok(t) => Some(t),
        Err(GeomError::TooShort { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let pts: Vec<String> = path.iter().map(|p| space.format_point(p)).collect();
    let listed = if pts.len() <= MAX_LISTED_POINTS {
        json!(pts)
    } else {
        Value::Null
    };
    let ok = shape.certified && heights.certified;
    Ok((
        json!({
            "source": source,
            "steps": path.len() - 1,
            "path": listed,
            "pattern": pattern_string(&segments),
            "shape_case": shape.case,
            "kappa_eff": shape.kappa_eff,
            "shape_certified": shape.certified,
            "type_flags": ty.as_ref().map(type_flags),
            "hp_kappa": ty.as_ref().map(|t| t.hp_kappa),
            "hq_kappa": ty.as_ref().map(|t| t.hq_kappa),
            "h_plus": heights.h_plus,
            "h_minus": heights.h_minus,
            "predicted_h_plus": heights.predicted_h_plus,
            "predicted_h_minus": heights.predicted_h_minus,
            "heights_certified": heights.certified,
        }),
        ok,
    ))
}

pub fn classify(g: &Global, a: &ClassifyArgs) -> Result<Verdict> {
    let (space, x, y) = parse_pair(g, &a.pair)?;
    let mut records = Vec::new();
    let mut ok = true;
    match (tree_pair(&x), tree_pair(&y)) {
        (Some((p, q, dx)), Some((_, _, dy))) if space.norm().is_l1() => {
            let ball = ball_for(g, &dx, &dy, p, q)?;
            for idx in ball.all_geodesics(&dx, &dy, a.geodesic_budget)? {
                let path: Vec<Point> = idx
                    .iter()
                    .map(|&i| {
                        let v = ball.point(i);
                        HoroPoint::raw(
                            ComponentPoint::Tree { p, vertex: v.p.clone() },
                            ComponentPoint::Tree {
                                p: q,
                                vertex: v.q.clone(),
                            },
                        )
                    })
                    .collect();
                let (r, good) = classify_record(&space, &path, a, "geodesic")?;
                ok &= good;
                records.push(r);
            }
        }
        _ => {
            let plan = space.build_path(&x, &y)?;
            let (r, good) = classify_record(&space, &plan.points(), a, "built_path")?;
            ok &= good;
            records.push(r);
        }
    }
    let text = match g.format {
        Format::Json => json_text(&json!({
            "schema": SCHEMA,
            "x": space.format_point(&x),
            "y": space.format_point(&y),
            "scale": a.scale,
            "records": records,
        })),
        Format::Csv => {
            let mut s = String::from("source,steps,pattern,shape_case,kappa_eff,type_flags,h_plus,h_minus\n");
            for r in &records {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    r["source"].as_str().unwrap_or(""),
                    r["steps"],
                    csv_field(r["pattern"].as_str().unwrap_or("")),
                    r["shape_case"].as_str().unwrap_or(""),
                    r["kappa_eff"],
                    r["type_flags"].as_str().unwrap_or(""),
                    r["h_plus"],
                    r["h_minus"]
                ));
            }
            s
        }
    };
    emit(g.out.as_deref(), &text)?;
    Ok(if ok { Verdict::Pass } else { Verdict::Fail })
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Scope {
    None,
    First,
    All,
}

#[derive(Args, Debug)]
pub struct CensusArgs {
    #[arg(long, default_value_t = 2)]
    pub p: u32,

    #[arg(long, default_value_t = 2)]
    pub q: u32,

    #[arg(long, default_value_t = 4)]
    pub radius: i64,

    /// Which geodesics of each pair to analyse.
    #[arg(long, value_enum, default_value_t = Scope::First)]
    pub scope: Scope,

    #[arg(long, default_value_t = DEFAULT_GEODESIC_BUDGET)]
    pub geodesic_budget: usize,
}

pub fn dl_census(g: &Global, a: &CensusArgs) -> Result<Verdict> {
    for (name, v) in [("p", a.p), ("q", a.q)] {
        if !(2..=5).contains(&v) {
            return Err(GeomError::Precondition(format!("--{name} must lie in [2, 5], got {v}")).into());
        }
    }
    let scope = match a.scope {
        Scope::None => GeodesicScope::None,
        Scope::First => GeodesicScope::First,
        Scope::All => GeodesicScope::All,
    };
    let opts = CensusOptions {
        scope,
        geodesic_budget: a.geodesic_budget,
        rows: true,
    };
    let report = census::dl_census(a.p, a.q, a.radius, g.budget, opts)?;
    let summary = json!({ "schema": SCHEMA, "summary": report.summary });
    let text = match g.format {
        Format::Csv => {
            let mut s = String::from(CENSUS_HEADER);
            s.push('\n');
            for r in &report.rows {
                s.push_str(&r.to_csv());
                s.push('\n');
            }
            s
        }
        Format::Json => json_text(&json!({
            "schema": SCHEMA,
            "summary": report.summary,
            "rows": report.rows,
            "dead_ends": report.dead_ends,
        })),
    };
    emit_with_summary(g.out.as_deref(), &text, &summary)?;
    Ok(if report.summary.passes() {
        Verdict::Pass
    } else {
        Verdict::Fail
    })
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Horizontal separation of the two endpoints at height 0.
    #[arg(long, default_value_t = DEFAULT_LAW_DX)]
    pub dx: f64,

    #[arg(long, default_value_t = 2.0)]
    pub from: f64,

    #[arg(long, default_value_t = 8.0)]
    pub to: f64,

    #[arg(long, default_value_t = 1.0)]
    pub step: f64,
}

pub const SLOPE_RANGE: (f64, f64) = (0.95, 1.05);

pub fn bounds_sweep(g: &Global, a: &SweepArgs) -> Result<Verdict> {
    let ordered = matches!(a.from.partial_cmp(&a.to), Some(Ordering::Less | Ordering::Equal));
    if a.step.is_nan() || a.step <= 0.0 || !ordered {
        bail!(GeomError::Precondition(format!(
            "empty sweep range: from {} to {} by {}",
            a.from, a.to, a.step
        )));
    }
    let count = ((a.to - a.from) / a.step + 1e-9).floor() as usize + 1;
    let deficits: Vec<f64> = (0..count).map(|i| a.from + a.step * i as f64).collect();
    let space = match delta_of(g)? {
        Some(d) => PlaneSpace::with_delta(d)?,
        None => PlaneSpace::new(),
    };
    let law = exponential_law(&space, a.dx, &deficits)?;
    let all_hold = law.all_hold();
    let slope_ok = law.slope >= SLOPE_RANGE.0 && law.slope <= SLOPE_RANGE.1;
    let bound_log2 = |c: &horobowtie::horoball::BoundCertificate| {
        if c.rhs.is_negative() || c.rhs.is_zero() {
            None
        } else {
            Some(c.rhs.log2_approx())
        }
    };
    let summary = json!({
        "schema": SCHEMA,
        "dx": law.dx,
        "slope": law.slope,
        "intercept": law.intercept,
        "slope_range": [SLOPE_RANGE.0, SLOPE_RANGE.1],
        "slope_ok": slope_ok,
        "all_hold": all_hold,
        "points": law.points.len(),
        "skipped_same_height": law.skipped_same_height,
    });
    let text = match g.format {
        Format::Csv => {
            let mut s = String::from("delta_h,capped_excess,bound_value,bound_value_log2,holds\n");
            for p in &law.points {
                let c = &p.certificate;
                s.push_str(&format!(
                    "{},{},{},{},{}\n",
                    p.delta_h,
                    p.excess,
                    c.rhs.to_f64(),
                    bound_log2(c).map(|v| v.to_string()).unwrap_or_default(),
                    c.holds
                ));
            }
            s
        }
        Format::Json => {
            let points: Vec<Value> = law
                .points
                .iter()
                .map(|p| {
                    json!({
                        "delta_h": p.delta_h,
                        "capped_excess": p.excess,
                        "capped_length": p.capped_length,
                        "certificate": p.certificate.to_json(),
                        "same_height": p.same_height.as_ref().map(|c| c.to_json()),
                    })
                })
                .collect();
            let mut v = summary.clone();
            v["sweep"] = json!(points);
            json_text(&v)
        }
    };
    emit_with_summary(g.out.as_deref(), &text, &summary)?;
    if g.format == Format::Csv && g.out.is_none() {
        eprintln!(
            "slope {:.4} (required [{}, {}]), intercept {:.4}, all certificates hold: {all_hold}",
            law.slope, SLOPE_RANGE.0, SLOPE_RANGE.1, law.intercept
        );
    }
    Ok(if all_hold && slope_ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    })
}

#[derive(Args, Debug)]
pub struct BoundaryArgs {
    /// Product, as `T<p>xT<q>`; `P` stands for the plane.
    #[arg(long, default_value = "T2xT3")]
    pub space: String,

    #[arg(long, default_value_t = 2)]
    pub depth: usize,

    #[arg(long, default_value_t = boundary::DEFAULT_HORIZON)]
    pub horizon: usize,

    #[arg(long, default_value_t = boundary::DEFAULT_WINDOW)]
    pub window: usize,

    /// Number of sampled vertical rays.
    #[arg(long, default_value_t = 200)]
    pub rays: usize,
}

fn parse_kind(s: &str) -> Result<ComponentKind> {
    if s == "P" {
        return Ok(ComponentKind::Plane);
    }
    let p = s
        .strip_prefix('T')
        .and_then(|r| r.parse::<u32>().ok())
        .ok_or_else(|| GeomError::Precondition(format!("unknown component `{s}` (expected T<p> or P)")))?;
    if p < 2 {
        return Err(GeomError::InvalidBranching(p).into());
    }
    Ok(ComponentKind::Tree(p))
}

fn parse_space(s: &str) -> Result<(ComponentKind, ComponentKind)> {
    let (l, r) = s
        .split_once('x')
        .ok_or_else(|| GeomError::Precondition(format!("product `{s}` should look like T2xT3")))?;
    Ok((parse_kind(l)?, parse_kind(r)?))
}

pub fn boundary(g: &Global, a: &BoundaryArgs) -> Result<Verdict> {
    let (lk, rk) = parse_space(&a.space)?;
    let cells = boundary::enumerate_cells(lk, rk, a.depth)?;
    let (ComponentKind::Tree(p), ComponentKind::Tree(q)) = (lk, rk) else {
        unreachable!("enumeration rejects continuous components");
    };
    let space = horobowtie::dl::dl_space(p, q)?;
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let mut rays = Vec::with_capacity(a.rays);
    for _ in 0..a.rays {
        let heading = if rng.gen_bool(0.5) {
            Heading::Falling
        } else {
            Heading::Rising
        };
        let (free, climbing) = match heading {
            Heading::Falling => (p, q),
            Heading::Rising => (q, p),
        };
        let len = rng.gen_range(0..=3);
        let word: Vec<u32> = (0..len).map(|_| rng.gen_range(0..free)).collect();
        let filler: Vec<u32> = (0..3).map(|_| rng.gen_range(0..climbing)).collect();
        let offset = rng.gen_range(-3..=3);
        rays.push(offset_vertical_ray(&space, heading, &word, offset, &filler)?);
    }
    let report = partition_check(&space, &rays, a.depth, a.horizon, a.window)?;
    let up = cells.iter().filter(|c| c.side == Side::Up).count();
    let down = cells.len() - up;
    let counts_ok = up == (p as usize).pow(a.depth as u32) && down == (q as usize).pow(a.depth as u32);
    let label = |b: &Option<boundary::BoundaryPoint>| b.as_ref().map(|c| c.to_string());
    let summary = json!({
        "schema": SCHEMA,
        "space": a.space,
        "depth": a.depth,
        "horizon": a.horizon,
        "window": a.window,
        "up_cells": up,
        "down_cells": down,
        "counts_ok": counts_ok,
        "rays": rays.len(),
        "classes": report.classes,
        "inconclusive": report.inconclusive,
        "reflexive": report.reflexive,
        "symmetric": report.symmetric,
        "transitive": report.transitive,
        "matches_labels": report.matches_labels,
    });
    let text = match g.format {
        Format::Csv => {
            let mut s = String::from("index,ray,cell,label\n");
            for (i, r) in rays.iter().enumerate() {
                s.push_str(&format!(
                    "{i},{},{},{}\n",
                    csv_field(&boundary::format_ray(&space, r)),
                    label(&report.cells[i]).unwrap_or_else(|| "inconclusive".into()),
                    csv_field(&label(&report.fine_labels[i]).unwrap_or_else(|| "inconclusive".into()))
                ));
            }
            s
        }
        Format::Json => {
            let mut v = summary.clone();
            v["cells"] = json!(cells.iter().map(|c| c.to_json()).collect::<Vec<_>>());
            v["ray_cells"] = json!(rays
                .iter()
                .enumerate()
                .map(|(i, r)| json!({
                    "ray": boundary::format_ray(&space, r),
                    "cell": label(&report.cells[i]),
                }))
                .collect::<Vec<_>>());
            v["matrix"] = json!(report
                .matrix
                .iter()
                .map(|row| row.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>())
                .collect::<Vec<_>>());
            json_text(&v)
        }
    };
    emit_with_summary(g.out.as_deref(), &text, &summary)?;
    Ok(if report.inconclusive > 0 {
        Verdict::Inconclusive
    } else if report.passes() && counts_ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    })
}
