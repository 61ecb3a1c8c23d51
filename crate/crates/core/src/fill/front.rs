//! Advancing-front filling: shrink a ring inward by one spacing per
//! generation, stitching each new ring to the previous one.

use super::ear::{ear_clip, EarRule};
use super::height::HeightField;
use super::FillError;
use crate::analysis::LocalFrame;
use crate::geom2d::{self, Vec2};
use crate::mesh::{Point, TriangleMesh, Vector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontParams {
    /// Target spacing between generations and between ring points.
    pub ds: f64,
    /// Neighbouring candidates closer than `merge_radius_factor * ds` merge.
    pub merge_radius_factor: f64,
    /// A ring with diameter at most `medium_factor * ds` is closed directly.
    pub medium_factor: f64,
    /// Below `small_factor * ds` the closing step adds no vertex.
    pub small_factor: f64,
}

/// One ring of the front in world coordinates, in either orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontRing {
    pub points: Vec<Point>,
    pub generation: usize,
}

/// Vertex of a stitching triangle: a point of the old ring or the new one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrontRef {
    Old(usize),
    New(usize),
}

#[derive(Debug, Clone)]
pub struct FrontStep {
    pub next: FrontRing,
    /// Triangles covering the band between the rings, each oriented like the
    /// old ring.
    pub triangles: Vec<[FrontRef; 3]>,
    /// Old ring positions that produced each new point (contiguous, cyclic).
    pub sources: Vec<Vec<usize>>,
}

pub fn diameter(points: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            d = d.max((points[i] - points[j]).norm());
        }
    }
    d
}

fn collapse(reason: &str) -> FillError {
    FillError::FrontCollapse(reason.to_string())
}

/// Longest step along a bisector, in spacings.
const MAX_MITER: f64 = 2.5;

/// Inward step at vertex `i` of a counter-clockwise polygon that keeps the
/// new point one spacing from both incident edges (a miter), capped at
/// [`MAX_MITER`] spacings.
fn inward_step(xy: &[Vec2], i: usize, ds: f64) -> Vec2 {
    let n = xy.len();
    let unit_left = |e: Vec2| {
        let l = e.norm();
        if l > 0.0 {
            Vec2::new(-e.y, e.x) / l
        } else {
            Vec2::zeros()
        }
    };
    let sum = unit_left(xy[i] - xy[(i + n - 1) % n]) + unit_left(xy[(i + 1) % n] - xy[i]);
    // |sum| = 2 cos(turn / 2)
    let miter = (2.0 / sum.norm()).min(MAX_MITER);
    inward_bisector(xy, i) * (ds * miter)
}

/// Unit inward direction at vertex `i` of a counter-clockwise polygon.
fn inward_bisector(xy: &[Vec2], i: usize) -> Vec2 {
    let n = xy.len();
    let prev = xy[(i + n - 1) % n];
    let next = xy[(i + 1) % n];
    let e0 = xy[i] - prev;
    let e1 = next - xy[i];
    let left = |e: Vec2| {
        let l = e.norm();
        if l > 0.0 {
            Vec2::new(-e.y, e.x) / l
        } else {
            Vec2::zeros()
        }
    };
    let b = left(e0) + left(e1);
    if b.norm() > 1e-12 {
        b.normalize()
    } else {
        // straight reversal: turn left of the incoming edge
        left(e0)
    }
}

/// Computes the next ring one spacing inside `front`.
///
/// Heights come from `field` when given, otherwise from the mean height of
/// the source points. Fails with [`FillError::FrontTooSmall`] when the ring
/// should be closed instead and [`FillError::FrontCollapse`] when no valid
/// inner ring exists.
pub fn advance_ring(
    front: &FrontRing,
    frame: &LocalFrame,
    params: &FrontParams,
    field: Option<&HeightField>,
) -> Result<FrontStep, FillError> {
    let n = front.points.len();
    if n < 3 {
        return Err(FillError::RingTooShort);
    }
    let d_old = diameter(&front.points);
    let limit = params.medium_factor * params.ds;
    if d_old <= limit {
        return Err(FillError::FrontTooSmall { diameter: d_old, limit });
    }
    let local: Vec<(Vec2, f64)> = front.points.iter().map(|p| frame.to_local(p)).collect();
    // work on a counter-clockwise copy; `flip` maps between the two
    let mirrored = geom2d::signed_area(&local.iter().map(|l| l.0).collect::<Vec<_>>()) < 0.0;
    let flip = |q: Vec2| if mirrored { Vec2::new(q.x, -q.y) } else { q };
    let xy: Vec<Vec2> = local.iter().map(|l| flip(l.0)).collect();
    if geom2d::signed_area(&xy) <= 0.0 {
        return Err(collapse("ring has no area"));
    }
    let mut placed = Err(collapse("no smoothing level tried"));
    for iterations in SMOOTHING_LEVELS {
        placed = place_ring(&xy, &taubin(&xy, iterations), params);
        if placed.is_ok() {
            break;
        }
    }
    let (clusters, new_xy, triangles) = placed?;
    let new_points: Vec<Point> = clusters
        .iter()
        .zip(&new_xy)
        .map(|(c, &q)| {
            let q = flip(q);
            let h = match field {
                Some(f) => f.eval(q),
                None => c.iter().map(|&i| local[i].1).sum::<f64>() / c.len() as f64,
            };
            frame.to_world(q, h)
        })
        .collect();
    if diameter(&new_points) >= d_old {
        return Err(collapse("inner ring is not smaller"));
    }
    Ok(FrontStep {
        next: FrontRing {
            points: new_points,
            generation: front.generation + 1,
        },
        triangles,
        sources: clusters,
    })
}

/// Clusters of old ring positions, new ring points and band triangles.
type Placement = (Vec<Vec<usize>>, Vec<Vec2>, Vec<[FrontRef; 3]>);

/// Sharpest turns allowed along a new ring. Offsets of a staircase rim
/// show up as alternating turns beyond both limits; a convex limit below
/// what the point count forces is raised.
const MAX_CONVEX_TURN_DEGREES: f64 = 150.0;
const MAX_REFLEX_TURN_DEGREES: f64 = 90.0;
/// Needle corners blunted per ring before the ring counts as jagged.
const MAX_CORNER_REPAIRS: usize = 4;

/// Signed turning angle of a closed polygon at vertex `i`.
fn turn_angle(xy: &[Vec2], i: usize) -> f64 {
    let n = xy.len();
    let e0 = xy[i] - xy[(i + n - 1) % n];
    let e1 = xy[(i + 1) % n] - xy[i];
    (e0.x * e1.y - e0.y * e1.x).atan2(e0.dot(&e1))
}

/// The shortest run of vertices enclosed between two crossing edges of a
/// closed polygon, as `(first vertex, count)`.
fn shortest_loop(xy: &[Vec2]) -> Option<(usize, usize)> {
    let k = xy.len();
    let mut best: Option<(usize, usize)> = None;
    for a in 0..k {
        for b in (a + 2)..k {
            if (b + 1) % k == a {
                continue;
            }
            if geom2d::segments_intersect(xy[a], xy[(a + 1) % k], xy[b], xy[(b + 1) % k]) {
                // vertices a+1..=b on one side, b+1..=a on the other
                let inside = (a + 1, b - a);
                let outside = ((b + 1) % k, k - (b - a));
                let run = if inside.1 <= outside.1 { inside } else { outside };
                if best.is_none_or(|x| run.1 < x.1) {
                    best = Some(run);
                }
            }
        }
    }
    best
}

/// Smoothing passes tried in turn; zero uses the ring as it is.
const SMOOTHING_LEVELS: [usize; 6] = [0, 1, 2, 4, 8, 16];

/// Taubin smoothing of a closed polygon, which shrinks far less than plain
/// Laplacian passes.
fn taubin(xy: &[Vec2], iterations: usize) -> Vec<Vec2> {
    let n = xy.len();
    let mut p = xy.to_vec();
    for _ in 0..iterations {
        for factor in [0.5, -0.53] {
            p = (0..n)
                .map(|i| {
                    let avg = (p[(i + n - 1) % n] + p[(i + 1) % n]) * 0.5;
                    p[i] + (avg - p[i]) * factor
                })
                .collect();
        }
    }
    p
}

/// Points one spacing inside `base` (the ring, possibly smoothed), merged
/// into clusters of consecutive ring positions and checked against the
/// old ring `xy`.
fn place_ring(xy: &[Vec2], base: &[Vec2], params: &FrontParams) -> Result<Placement, FillError> {
    let n = xy.len();
    if geom2d::signed_area(base) <= 0.0 {
        return Err(collapse("smoothed ring is not counter-clockwise"));
    }
    let cand: Vec<Vec2> = (0..n).map(|i| base[i] + inward_step(base, i, params.ds)).collect();

    let merge_r = params.merge_radius_factor * params.ds;
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let centre = |c: &[usize]| c.iter().map(|&i| cand[i]).sum::<Vec2>() / c.len() as f64;
    loop {
        let k_len = clusters.len();
        if k_len < 3 {
            return Err(collapse("front merged to fewer than three points"));
        }
        let centres: Vec<Vec2> = clusters.iter().map(|c| centre(c)).collect();
        let mut worst: Option<(f64, usize)> = None;
        for k in 0..k_len {
            let k1 = (k + 1) % k_len;
            let gap = centres[k1] - centres[k];
            let old_edge = base[clusters[k1][0]] - base[*clusters[k].last().expect("non-empty")];
            let dist = gap.norm();
            if dist < merge_r || gap.dot(&old_edge) <= 0.0 {
                if worst.is_none_or(|(d, _)| dist < d) {
                    worst = Some((dist, k));
                }
            }
        }
        let Some((_, k)) = worst else { break };
        let k1 = (k + 1) % k_len;
        let tail = std::mem::take(&mut clusters[k1]);
        clusters[k].extend(tail);
        clusters.remove(k1);
    }

    // cut the loops that sharp corners make: the shorter run between two
    // crossing edges becomes one point
    while let Some((start, len)) = shortest_loop(&clusters.iter().map(|c| centre(c)).collect::<Vec<_>>()) {
        if clusters.len() - len + 1 < 3 {
            return Err(collapse("front merged to fewer than three points"));
        }
        let k_len = clusters.len();
        let run: Vec<usize> = (0..len).flat_map(|t| clusters[(start + t) % k_len].clone()).collect();
        let keep: Vec<Vec<usize>> = (len..k_len).map(|t| clusters[(start + t) % k_len].clone()).collect();
        clusters = std::iter::once(run).chain(keep).collect();
    }

    // blunt needle corners by merging them into their nearer neighbour; a
    // ring that needs many of these is left to a smoother base
    let reflex = -MAX_REFLEX_TURN_DEGREES.to_radians();
    let mut repairs = 0;
    loop {
        let k_len = clusters.len();
        if k_len < 3 {
            return Err(collapse("front merged to fewer than three points"));
        }
        let centres: Vec<Vec2> = clusters.iter().map(|c| centre(c)).collect();
        let convex = MAX_CONVEX_TURN_DEGREES.max(360.0 / k_len as f64 + 30.0).to_radians();
        let Some(a) = (0..k_len).find(|&a| !(reflex..=convex).contains(&turn_angle(&centres, a))) else {
            break;
        };
        repairs += 1;
        if repairs > MAX_CORNER_REPAIRS.max(n / 8) {
            return Err(collapse("inner ring has too many spikes"));
        }
        let (prev, next) = ((a + k_len - 1) % k_len, (a + 1) % k_len);
        let into_prev = (centres[a] - centres[prev]).norm() <= (centres[a] - centres[next]).norm();
        let (keep, gone) = if into_prev { (prev, a) } else { (a, next) };
        let tail = std::mem::take(&mut clusters[gone]);
        clusters[keep].extend(tail);
        clusters.remove(gone);
    }

    let k_len = clusters.len();
    let new_xy: Vec<Vec2> = clusters.iter().map(|c| centre(c)).collect();
    if !geom2d::polygon_is_simple(&new_xy) || geom2d::signed_area(&new_xy) <= 0.0 {
        return Err(collapse("inner ring is not a simple counter-clockwise polygon"));
    }
    if new_xy.iter().any(|&q| !geom2d::point_in_polygon(q, &xy)) {
        return Err(collapse("inner ring leaves the outer ring"));
    }
    for a in 0..k_len {
        let (q0, q1) = (new_xy[a], new_xy[(a + 1) % k_len]);
        for i in 0..n {
            if geom2d::segments_intersect(q0, q1, xy[i], xy[(i + 1) % n]) {
                return Err(collapse("inner ring crosses the outer ring"));
            }
        }
    }
    let mut owner = vec![0usize; n];
    for (k, c) in clusters.iter().enumerate() {
        for &i in c {
            owner[i] = k;
        }
    }
    let triangles = stitch(xy, &new_xy, &owner)?;
    Ok((clusters, new_xy, triangles))
}

/// How far the zip may stray from the cluster ownership path.
const STITCH_WINDOW: usize = 4;

/// Whether the open segment `a`-`b` avoids every edge of `poly` that does
/// not end at `skip`.
fn clear_of(a: Vec2, b: Vec2, poly: &[Vec2], skip: Option<usize>) -> bool {
    let n = poly.len();
    (0..n).all(|e| {
        let f = (e + 1) % n;
        skip.is_some_and(|s| s == e || s == f) || !geom2d::segments_intersect(a, b, poly[e], poly[f])
    })
}

/// Zips the band between the old ring `xy` and the new ring `inner`.
///
/// Each step adds a triangle on an old edge or on a new edge. Among zips
/// near the path given by `owner` (old position to new position), the one
/// with the shortest total diagonal length is taken, using only positively
/// oriented triangles and diagonals inside the band.
fn stitch(xy: &[Vec2], inner: &[Vec2], owner: &[usize]) -> Result<Vec<[FrontRef; 3]>, FillError> {
    let n = xy.len();
    let mut last = collapse("no zip start tried");
    for attempt in 0..STITCH_STARTS.min(n) {
        match stitch_from(xy, inner, owner, attempt * n / STITCH_STARTS.min(n)) {
            Ok(t) => return Ok(t),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// Old ring positions tried as the start of the zip.
const STITCH_STARTS: usize = 8;

/// [`stitch`] with the zip starting at old position `s`.
fn stitch_from(xy: &[Vec2], inner: &[Vec2], owner: &[usize], s: usize) -> Result<Vec<[FrontRef; 3]>, FillError> {
    let (n, k) = (xy.len(), inner.len());
    let old_at = |i: usize| (s + i) % n;
    let j0 = owner[s];
    // ownership unrolled into a non-decreasing offset from j0
    let mut expected = vec![0usize; n + 1];
    for i in 1..n {
        let off = (owner[old_at(i)] + k - j0) % k;
        expected[i] = if off < expected[i - 1] { off + k } else { off };
    }
    expected[n] = k;
    let new_at = |j: usize| (j0 + j) % k;
    let diagonal_ok = |i: usize, j: usize| {
        let (a, b) = (xy[old_at(i)], inner[new_at(j)]);
        let mid = (a + b) * 0.5;
        clear_of(a, b, xy, Some(old_at(i)))
            && clear_of(a, b, inner, Some(new_at(j)))
            && geom2d::point_in_polygon(mid, xy)
            && !geom2d::point_in_polygon(mid, inner)
    };
    let in_window = |i: usize, j: usize| j + STITCH_WINDOW >= expected[i] && j <= expected[i] + STITCH_WINDOW;
    let idx = |i: usize, j: usize| i * (k + 1) + j;
    let mut cost = vec![f64::INFINITY; (n + 1) * (k + 1)];
    // back pointer: true when the state was reached by an old-edge step
    let mut from_old = vec![false; (n + 1) * (k + 1)];
    if !diagonal_ok(0, 0) {
        return Err(collapse("no valid starting diagonal"));
    }
    cost[0] = 0.0;
    let tri_ok = |t: [Vec2; 3]| geom2d::orient(t[0], t[1], t[2]) > 0.0;
    for i in 0..=n {
        for j in 0..=k {
            if !in_window(i, j) || (i, j) == (0, 0) {
                continue;
            }
            let closing = (i, j) == (n, k);
            if !closing && !diagonal_ok(i, j) {
                continue;
            }
            let d = (xy[old_at(i)] - inner[new_at(j)]).norm();
            let mut best = f64::INFINITY;
            if i > 0 && cost[idx(i - 1, j)].is_finite() && tri_ok([xy[old_at(i - 1)], xy[old_at(i)], inner[new_at(j)]]) {
                best = cost[idx(i - 1, j)];
                from_old[idx(i, j)] = true;
            }
            if j > 0
                && cost[idx(i, j - 1)] < best
                && tri_ok([xy[old_at(i)], inner[new_at(j)], inner[new_at(j - 1)]])
            {
                best = cost[idx(i, j - 1)];
                from_old[idx(i, j)] = false;
            }
            if best.is_finite() {
                cost[idx(i, j)] = best + d;
            }
        }
    }
    if !cost[idx(n, k)].is_finite() {
        return Err(collapse("band cannot be zipped"));
    }
    let mut triangles = Vec::with_capacity(n + k);
    let (mut i, mut j) = (n, k);
    while (i, j) != (0, 0) {
        if from_old[idx(i, j)] {
            triangles.push([FrontRef::Old(old_at(i - 1)), FrontRef::Old(old_at(i)), FrontRef::New(new_at(j))]);
            i -= 1;
        } else {
            triangles.push([FrontRef::Old(old_at(i)), FrontRef::New(new_at(j)), FrontRef::New(new_at(j - 1))]);
            j -= 1;
        }
    }
    triangles.reverse();
    Ok(triangles)
}

/// Result of filling one ring in the mesh.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FrontOutcome {
    pub new_vertices: Vec<usize>,
    pub new_faces: usize,
    pub generations: usize,
}

/// Closes a ring of mesh vertices: ear clipping when its diameter is below
/// `small_factor * ds`, otherwise a centroid fan when every fan triangle is
/// positively oriented in the frame, with ear clipping as the fallback.
pub fn close_ring(
    mesh: &mut TriangleMesh,
    ring: &[usize],
    frame: &LocalFrame,
    ds: f64,
    small_factor: f64,
    field: Option<&HeightField>,
) -> Result<FrontOutcome, FillError> {
    if ring.len() < 3 {
        return Err(FillError::RingTooShort);
    }
    let points: Vec<Point> = ring.iter().map(|&v| mesh.vertex(v)).collect();
    let d = diameter(&points);
    if ring.len() > 3 && d >= small_factor * ds {
        let xy: Vec<Vec2> = points.iter().map(|p| frame.project(p)).collect();
        let sign = geom2d::signed_area(&xy).signum();
        let c2 = xy.iter().sum::<Vec2>() / xy.len() as f64;
        let m = xy.len();
        let fan_ok = sign != 0.0 && (0..m).all(|i| sign * geom2d::orient(xy[i], xy[(i + 1) % m], c2) > 0.0);
        if fan_ok {
            let centroid = Point::from(points.iter().map(|p| p.coords).sum::<Vector>() / m as f64);
            let c = match field {
                Some(f) => frame.to_world(frame.project(&centroid), f.eval(frame.project(&centroid))),
                None => centroid,
            };
            let id = mesh.add_vertex(c)?;
            for i in 0..m {
                mesh.add_face([ring[i], ring[(i + 1) % m], id])?;
            }
            return Ok(FrontOutcome {
                new_vertices: vec![id],
                new_faces: m,
                generations: 0,
            });
        }
    }
    let faces = ear_clip(mesh, ring, frame, EarRule::MinMaxDihedral)?;
    Ok(FrontOutcome {
        new_vertices: Vec::new(),
        new_faces: faces,
        generations: 0,
    })
}

/// Fills the ring of mesh vertices by advancing fronts until the remaining
/// ring is small, the generation cap is reached or the front collapses, then
/// closes what is left.
pub fn fill_by_fronts(
    mesh: &mut TriangleMesh,
    ring: &[usize],
    frame: &LocalFrame,
    params: &FrontParams,
    field: Option<&HeightField>,
) -> Result<FrontOutcome, FillError> {
    let start: Vec<Point> = ring.iter().map(|&v| mesh.vertex(v)).collect();
    let cap = (diameter(&start) / (2.0 * params.ds)).ceil() as usize + 2;
    let mut out = FrontOutcome::default();
    let mut ids = ring.to_vec();
    let mut front = FrontRing {
        points: start,
        generation: 0,
    };
    while front.generation < cap {
        let step = match advance_ring(&front, frame, params, field) {
            Ok(step) => step,
            Err(FillError::FrontTooSmall { .. }) => break,
            Err(FillError::FrontCollapse(reason)) => {
                log::debug!("front collapse at generation {}: {reason} (ring diameter {:.2} ds)", front.generation, diameter(&front.points) / params.ds);
                break;
            }
            Err(e) => return Err(e),
        };
        let mut new_ids = Vec::with_capacity(step.next.points.len());
        for p in &step.next.points {
            let id = mesh.add_vertex(*p)?;
            new_ids.push(id);
            out.new_vertices.push(id);
        }
        for t in &step.triangles {
            let face = t.map(|r| match r {
                FrontRef::Old(i) => ids[i],
                FrontRef::New(k) => new_ids[k],
            });
            mesh.add_face(face)?;
            out.new_faces += 1;
        }
        ids = new_ids;
        front = step.next;
    }
    out.generations = front.generation;
    let closing = close_ring(mesh, &ids, frame, params.ds, params.small_factor, field)?;
    out.new_vertices.extend(closing.new_vertices);
    out.new_faces += closing.new_faces;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat_frame() -> LocalFrame {
        LocalFrame::new(Point::origin(), Vector::z(), Vector::x())
    }

    fn params(ds: f64) -> FrontParams {
        FrontParams {
            ds,
            merge_radius_factor: 0.5,
            medium_factor: 2.5,
            small_factor: 1.5,
        }
    }

    fn circle(n: usize, r: f64) -> Vec<Point> {
        (0..n)
            .map(|i| {
                let a = i as f64 * std::f64::consts::TAU / n as f64;
                Point::new(r * a.cos(), r * a.sin(), 0.0)
            })
            .collect()
    }

    #[test]
    fn circle_shrinks_by_one_spacing() {
        let pts = circle(32, 1.0);
        let ds = (pts[1] - pts[0]).norm();
        let front = FrontRing { points: pts, generation: 0 };
        let step = advance_ring(&front, &flat_frame(), &params(ds), None).unwrap();
        assert_eq!(step.next.generation, 1);
        for p in &step.next.points {
            let r = (p.x * p.x + p.y * p.y).sqrt();
            assert!(r < 1.0 - 0.5 * ds && r > 1.0 - 1.5 * ds, "radius {r}");
            assert_eq!(p.z, 0.0);
        }
        // band triangles cover the annulus between the two polygons
        let area_old = geom2d::signed_area(&front.points.iter().map(|p| Vec2::new(p.x, p.y)).collect::<Vec<_>>());
        let inner: Vec<Vec2> = step.next.points.iter().map(|p| Vec2::new(p.x, p.y)).collect();
        let pos = |r: FrontRef| match r {
            FrontRef::Old(i) => Vec2::new(front.points[i].x, front.points[i].y),
            FrontRef::New(k) => inner[k],
        };
        let band: f64 = step
            .triangles
            .iter()
            .map(|t| 0.5 * geom2d::orient(pos(t[0]), pos(t[1]), pos(t[2])))
            .sum();
        assert!((band - (area_old - geom2d::signed_area(&inner))).abs() < 1e-12);
    }

    #[test]
    fn ellipse_ring_stays_simple() {
        let pts: Vec<Point> = (0..40)
            .map(|i| {
                let a = i as f64 * std::f64::consts::TAU / 40.0;
                Point::new(2.0 * a.cos(), 0.5 * a.sin(), 0.0)
            })
            .collect();
        let ds = (0..40).map(|i| (pts[(i + 1) % 40] - pts[i]).norm()).sum::<f64>() / 40.0;
        let mut front = FrontRing { points: pts, generation: 0 };
        for _ in 0..3 {
            match advance_ring(&front, &flat_frame(), &params(ds), None) {
                Ok(step) => {
                    let xy: Vec<Vec2> = step.next.points.iter().map(|p| Vec2::new(p.x, p.y)).collect();
                    assert!(geom2d::polygon_is_simple(&xy));
                    assert!(geom2d::signed_area(&xy) > 0.0);
                    front = step.next;
                }
                Err(FillError::FrontTooSmall { .. }) | Err(FillError::FrontCollapse(_)) => break,
                Err(e) => panic!("{e}"),
            }
        }
        assert!(front.generation >= 1);
    }

    #[test]
    fn regular_twelve_gon_shrinks_by_ds() {
        let ds = 0.25;
        let front = FrontRing {
            points: circle(12, 4.0 * ds),
            generation: 0,
        };
        let step = advance_ring(&front, &flat_frame(), &params(ds), None).unwrap();
        assert!(step.next.points.len() <= 12);
        for p in &step.next.points {
            let r = (p.x * p.x + p.y * p.y).sqrt();
            assert!((r - 3.0 * ds).abs() <= 0.1 * ds, "radius {r}");
        }
    }

    #[test]
    fn ellipse_minor_axis_shrinks_by_two_spacings() {
        // semi-axes 4ds and 1.5ds, sampled at roughly ds
        let ds = 0.1;
        let n = 36;
        let pts: Vec<Point> = (0..n)
            .map(|i| {
                let a = i as f64 * std::f64::consts::TAU / n as f64;
                Point::new(4.0 * ds * a.cos(), 1.5 * ds * a.sin(), 0.0)
            })
            .collect();
        let front = FrontRing { points: pts, generation: 0 };
        let step = advance_ring(&front, &flat_frame(), &params(ds), None).unwrap();
        let xy: Vec<Vec2> = step.next.points.iter().map(|p| Vec2::new(p.x, p.y)).collect();
        assert!(geom2d::polygon_is_simple(&xy));
        let minor = xy.iter().map(|p| p.y).fold(f64::MIN, f64::max) - xy.iter().map(|p| p.y).fold(f64::MAX, f64::min);
        assert!((3.0 * ds - minor - 2.0 * ds).abs() <= 0.5 * ds, "minor axis {minor}");
    }

    #[test]
    fn small_ring_is_rejected() {
        let pts = circle(6, 1.0);
        let front = FrontRing { points: pts, generation: 0 };
        let r = advance_ring(&front, &flat_frame(), &params(1.0), None);
        assert!(matches!(r, Err(FillError::FrontTooSmall { .. })));
    }

    #[test]
    fn filling_a_disk_hole_closes_it() {
        // annulus of triangles around a 24-gon hole
        let n = 24;
        let inner = circle(n, 1.0);
        let outer = circle(n, 1.4);
        let mut verts = inner.clone();
        verts.extend(outer);
        let mut faces = Vec::new();
        for i in 0..n {
            let j = (i + 1) % n;
            faces.push([j, i, n + i]);
            faces.push([j, n + i, n + j]);
        }
        let mut mesh = TriangleMesh::new(verts, faces).unwrap();
        let loops = mesh.boundary_loops().unwrap();
        let hole = loops.iter().find(|l| l.vertices().contains(&0)).unwrap().vertices().to_vec();
        let ds = (inner[1] - inner[0]).norm();
        let out = fill_by_fronts(&mut mesh, &hole, &flat_frame(), &params(ds), None).unwrap();
        assert!(out.generations >= 1);
        assert_eq!(mesh.boundary_loops().unwrap().len(), 1);
        assert!(mesh.is_consistently_oriented());
        // a flat fill covers exactly the outer 24-gon
        let outer_area = 0.5 * n as f64 * 1.96 * (std::f64::consts::TAU / n as f64).sin();
        assert!((mesh.area() - outer_area).abs() < 1e-9);
    }
}
