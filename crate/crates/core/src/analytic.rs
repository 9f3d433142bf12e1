//! Analytic continuation of the two-valued fiber along contours and
//! adaptive contour integration.
//!
//! The fiber `w` with `w^2 = P(z)` is tracked by the continuity selector
//! (never jump sheets: prefer the square root closest to the previous
//! value), with node spacing controlled by the phase change of `P` and of
//! `z - b` for the nearest branch point `b`. Quadrature is adaptive
//! Gauss–Kronrod (7, 15) per segment; a straight segment ending at a branch
//! point is regularized by the substitution `z = e + t^2`.

use crate::geometry::QuotientCurve;
use crate::homology::{LiftedCycle, PlanarPath, Segment};
use crate::{tol, Error, Result, C64};

// QUADPACK dqk15 nodes and weights.
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// Continuously tracked fiber samples along one path.
#[derive(Debug, Clone)]
pub struct FiberTrack {
    /// Per segment: sorted parameters in [0, 1] with (z, w) samples.
    segments: Vec<TrackSegment>,
    /// Fiber value at the end of the path.
    pub end_fiber: C64,
    /// Largest parameter step accepted during tracking.
    pub max_step: f64,
}

#[derive(Debug, Clone)]
struct TrackSegment {
    params: Vec<f64>,
    w: Vec<C64>,
}

impl FiberTrack {
    /// Flattened (z, w) samples.
    pub fn nodes(&self, path: &PlanarPath) -> Vec<(C64, C64)> {
        let mut out = Vec::new();
        for (seg, tr) in path.segments.iter().zip(&self.segments) {
            for (s, w) in tr.params.iter().zip(&tr.w) {
                out.push((seg.at(*s), *w));
            }
        }
        out
    }

    /// Sheet-consistent fiber at parameter `s` of segment `idx`.
    fn fiber_at(&self, curve: &QuotientCurve, path: &PlanarPath, idx: usize, s: f64) -> C64 {
        let tr = &self.segments[idx];
        let pos = tr.params.partition_point(|p| *p < s);
        let near = if pos == 0 {
            0
        } else if pos >= tr.params.len() {
            tr.params.len() - 1
        } else if (s - tr.params[pos - 1]) < (tr.params[pos] - s) {
            pos - 1
        } else {
            pos
        };
        let z = path.segments[idx].at(s);
        let cand = curve.p(z).sqrt();
        if (cand - tr.w[near]).norm() > (cand + tr.w[near]).norm() {
            -cand
        } else {
            cand
        }
    }
}

fn nearest_branch(curve: &QuotientCurve, z: C64) -> (C64, f64) {
    let mut best = (C64::new(0.0, 0.0), f64::INFINITY);
    for e in &curve.branch_points {
        let d = (z - e).norm();
        if d < best.1 {
            best = (*e, d);
        }
    }
    best
}

fn arg_diff(a: C64, b: C64) -> f64 {
    (b / a).arg().abs()
}

/// Tracks the fiber along `path` starting from `w0`.
pub fn continue_fiber(curve: &QuotientCurve, path: &PlanarPath, w0: C64) -> Result<FiberTrack> {
    let scale = curve
        .branch_points
        .iter()
        .map(|e| e.norm())
        .fold(1.0f64, f64::max);
    let p0 = curve.p(path.start());
    let res = (w0 * w0 - p0).norm() / (1.0 + p0.norm());
    if res > tol::FIBER_SEED {
        return Err(Error::SeedOffCurve(res));
    }
    let mut segments = Vec::with_capacity(path.segments.len());
    let mut w = w0;
    let mut max_step = 0.0f64;
    for seg in &path.segments {
        let mut params = vec![0.0];
        let mut ws = vec![w];
        let mut stack = vec![(0.0f64, 1.0f64, curve.p(seg.at(0.0)), curve.p(seg.at(1.0)), 0u32)];
        // process intervals left to right: use an explicit ordered walker
        let mut s_lo = 0.0;
        let mut p_lo = curve.p(seg.at(0.0));
        stack.clear();
        stack.push((1.0, 0.0, C64::new(0.0, 0.0), C64::new(0.0, 0.0), 0));
        let mut pending: Vec<(f64, u32)> = vec![(1.0, 0)];
        while let Some((s_hi, depth)) = pending.pop() {
            let z_hi = seg.at(s_hi);
            let p_hi = curve.p(z_hi);
            let mid = 0.5 * (s_lo + s_hi);
            let z_mid = seg.at(mid);
            let (e_near, d_near) = nearest_branch(curve, z_mid);
            if d_near < 1e-13 * scale {
                return Err(Error::NearBranch(d_near));
            }
            let split = arg_diff(p_lo, p_hi) > tol::TRACK_ARG_P
                || arg_diff(seg.at(s_lo) - e_near, z_hi - e_near) > tol::TRACK_ARG_NEAREST;
            if split && depth < 48 {
                pending.push((s_hi, depth + 1));
                pending.push((mid, depth + 1));
                continue;
            }
            if split {
                return Err(Error::NoConvergence(
                    "fiber tracking exceeded bisection depth".into(),
                ));
            }
            let cand = p_hi.sqrt();
            let keep = if (cand - w).norm() > (cand + w).norm() { -cand } else { cand };
            max_step = max_step.max(s_hi - s_lo);
            params.push(s_hi);
            ws.push(keep);
            w = keep;
            s_lo = s_hi;
            p_lo = p_hi;
        }
        segments.push(TrackSegment { params, w: ws });
    }
    Ok(FiberTrack {
        segments,
        end_fiber: w,
        max_step,
    })
}

/// Fiber value at the start of `new_path`, continued from `cycle`'s data.
/// Used when reorienting a closed cycle: the reversed path starts at the
/// cycle's endpoint, whose fiber is the continuation result.
pub fn fiber_at_start(
    curve: &QuotientCurve,
    cycle: &LiftedCycle,
    new_path: &PlanarPath,
) -> Result<C64> {
    let track = continue_fiber(curve, &cycle.path, cycle.start_fiber)?;
    let _ = new_path;
    Ok(track.end_fiber)
}

fn gk15<F: FnMut(f64) -> C64>(f: &mut F, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let f0 = f(c);
    let mut ik = f0 * WGK[7];
    let mut ig = f0 * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        ik += (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            ig += (f1 + f2) * WG[j / 2];
        }
    }
    ik *= h;
    ig *= h;
    (ik, (ik - ig).norm())
}

fn adaptive<F: FnMut(f64) -> C64>(f: &mut F, a: f64, b: f64, tol_abs: f64) -> Result<C64> {
    let mut total = C64::new(0.0, 0.0);
    let mut stack = vec![(a, b, 0u32)];
    let mut used = 0usize;
    while let Some((lo, hi, depth)) = stack.pop() {
        let (val, err) = gk15(f, lo, hi);
        let budget = tol_abs * (hi - lo) / (b - a);
        if err <= budget.max(1e-16) || depth >= 52 {
            if depth >= 52 && err > 1e3 * budget.max(1e-16) {
                return Err(Error::NoConvergence(format!(
                    "interval error {err:.3e} at max depth"
                )));
            }
            total += val;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, depth + 1));
            stack.push((mid, hi, depth + 1));
        }
        used += 1;
        if used > 200_000 {
            return Err(Error::NoConvergence("refinement budget exceeded".into()));
        }
    }
    Ok(total)
}

fn branch_hit(curve: &QuotientCurve, z: C64) -> Option<C64> {
    let scale = curve
        .branch_points
        .iter()
        .map(|e| e.norm())
        .fold(1.0f64, f64::max);
    curve
        .branch_points
        .iter()
        .find(|e| (z - *e).norm() < 1e-10 * scale)
        .copied()
}

/// Integral of `f(z) dz / w` over a straight segment whose `to`-endpoint is
/// the branch point `e`, by the substitution `z = e + (from - e)(1 - t)^2`.
/// Returns the integral; the fiber vanishes at the endpoint.
fn integrate_into_branch(
    curve: &QuotientCurve,
    from: C64,
    e: C64,
    w_from: C64,
    f: &dyn Fn(C64) -> C64,
    tol_abs: f64,
) -> Result<C64> {
    // factor P = (z - e) * Ptilde; track v = sqrt(Ptilde) along the segment
    let ptilde = |z: C64| -> C64 {
        let mut acc = C64::new(1.0, 0.0);
        let mut skipped = false;
        for b in &curve.branch_points {
            if !skipped && (b - e).norm() < 1e-14 {
                skipped = true;
                continue;
            }
            acc *= z - b;
        }
        acc
    };
    let u0 = (from - e).sqrt();
    let mut v = w_from / u0;
    // v should satisfy v^2 = Ptilde(from)
    let r = (v * v - ptilde(from)).norm() / (1.0 + ptilde(from).norm());
    if r > 1e-8 {
        return Err(Error::SeedOffCurve(r));
    }
    // pre-track v on a coarse grid for sheet matching
    let m = 256;
    let mut vs = Vec::with_capacity(m + 1);
    for k in 0..=m {
        let t = k as f64 / m as f64;
        let z = e + (from - e) * (1.0 - t) * (1.0 - t);
        let cand = ptilde(z).sqrt();
        let keep = if (cand - v).norm() > (cand + v).norm() { -cand } else { cand };
        vs.push(keep);
        v = keep;
    }
    let mut g = |t: f64| -> C64 {
        let z = e + (from - e) * (1.0 - t) * (1.0 - t);
        let cand = ptilde(z).sqrt();
        let near = vs[((t * m as f64).round() as usize).min(m)];
        let vv = if (cand - near).norm() > (cand + near).norm() { -cand } else { cand };
        // dz = -2 (from - e)(1 - t) dt ; w = u0 (1 - t) vv
        f(z) * (-2.0) * (from - e) / (u0 * vv)
    };
    adaptive(&mut g, 0.0, 1.0, tol_abs)
}

/// Contour integral of `f(z) dz / w` along a lifted path.
///
/// Returns the value and the end fiber. Straight segments that terminate at
/// a branch point are handled by the `z = e + t^2` substitution.
pub fn integrate_fn(
    curve: &QuotientCurve,
    path: &PlanarPath,
    start_fiber: C64,
    f: &dyn Fn(C64) -> C64,
    tol_abs: f64,
) -> Result<(C64, C64)> {
    let nseg = path.segments.len().max(1);
    let tol_seg = tol_abs / nseg as f64;
    let mut value = C64::new(0.0, 0.0);
    let mut w = start_fiber;
    for (idx, seg) in path.segments.iter().enumerate() {
        match seg {
            Segment::Line { from, to } => {
                let hit_from = branch_hit(curve, *from);
                let hit_to = branch_hit(curve, *to);
                match (hit_from, hit_to) {
                    (None, Some(e)) => {
                        value += integrate_into_branch(curve, *from, e, w, f, tol_seg)?;
                        w = C64::new(0.0, 0.0);
                        // continuation through the branch point flips the sheet;
                        // the caller's next segment must start at the branch
                        // point, which only the split cut路径 uses.
                        continue;
                    }
                    (Some(e), None) => {
                        // reverse of the into-branch case, starting on the sheet
                        // that continues the incoming (zero) fiber; callers pass
                        // a seed via the next formula: w at `to` determines it.
                        // Integrate backwards and negate.
                        let w_to_sq = curve.p(*to);
                        // choose the branch continuously: no previous data, so
                        // the caller must have set start_fiber for z = to side.
                        let w_to = if (w * w - w_to_sq).norm() < 1e-6 * (1.0 + w_to_sq.norm()) {
                            w
                        } else {
                            w_to_sq.sqrt()
                        };
                        let v = integrate_into_branch(curve, *to, e, w_to, f, tol_seg)?;
                        value -= v;
                        w = w_to;
                        continue;
                    }
                    (Some(_), Some(_)) => {
                        return Err(Error::NearBranch(0.0));
                    }
                    (None, None) => {}
                }
                let sub = PlanarPath { segments: vec![seg.clone()], closed: false };
                let track = continue_fiber(curve, &sub, w)?;
                let mut g = |s: f64| -> C64 {
                    let z = seg.at(s);
                    let ww = track.fiber_at(curve, &sub, 0, s);
                    f(z) * seg.velocity(s) / ww
                };
                value += adaptive(&mut g, 0.0, 1.0, tol_seg)?;
                w = track.end_fiber;
            }
            Segment::Arc { .. } => {
                let sub = PlanarPath { segments: vec![seg.clone()], closed: false };
                let track = continue_fiber(curve, &sub, w)?;
                let mut g = |s: f64| -> C64 {
                    let z = seg.at(s);
                    let ww = track.fiber_at(curve, &sub, 0, s);
                    f(z) * seg.velocity(s) / ww
                };
                value += adaptive(&mut g, 0.0, 1.0, tol_seg)?;
                w = track.end_fiber;
            }
        }
        let _ = idx;
    }
    Ok((value, w))
}

/// Contour integral of the monic numerator with the given roots over a
/// lifted cycle: `∫ Π (z - ζ_j) dz / w`.
pub fn integrate(
    numerator_roots: &[C64],
    curve: &QuotientCurve,
    cycle: &LiftedCycle,
    tol_abs: f64,
) -> Result<C64> {
    let roots = numerator_roots.to_vec();
    let f = move |z: C64| -> C64 { roots.iter().fold(C64::new(1.0, 0.0), |acc, r| acc * (z - r)) };
    let (value, end) = integrate_fn(curve, &cycle.path, cycle.start_fiber, &f, tol_abs)?;
    if cycle.path.closed {
        let res = (end - cycle.start_fiber).norm() / (1.0 + cycle.start_fiber.norm());
        if res > 1e-9 && cycle.label != crate::homology::CycleLabel::GammaCircle {
            return Err(Error::NoConvergence(format!(
                "monodromy residual {res:.3e} on a closed cycle"
            )));
        }
    }
    Ok(value)
}

/// Signed intersection number of two lifted cycles on the same curve.
pub fn intersection_number(
    curve: &QuotientCurve,
    c1: &LiftedCycle,
    c2: &LiftedCycle,
) -> Result<i64> {
    let t1 = continue_fiber(curve, &c1.path, c1.start_fiber)?;
    let t2 = continue_fiber(curve, &c2.path, c2.start_fiber)?;
    let mut crossings: Vec<(C64, f64)> = Vec::new(); // (point, signed contribution)
    for (i, s1) in c1.path.segments.iter().enumerate() {
        for (j, s2) in c2.path.segments.iter().enumerate() {
            for (u, v) in segment_crossings(s1, s2) {
                let z = s1.at(u);
                if crossings.iter().any(|(p, _)| (p - z).norm() < 1e-11) {
                    continue;
                }
                let w1 = t1.fiber_at(curve, &c1.path, i, u);
                let w2 = t2.fiber_at(curve, &c2.path, j, v);
                if (w1 - w2).norm() > (w1 + w2).norm() {
                    continue; // opposite sheets
                }
                let d1 = s1.velocity(u);
                let d2 = s2.velocity(v);
                let cross = d1.re * d2.im - d1.im * d2.re;
                if cross.abs() < 1e-12 * d1.norm() * d2.norm() {
                    return Err(Error::Degenerate("tangential cycle crossing".into()));
                }
                crossings.push((z, cross.signum()));
            }
        }
    }
    let total: f64 = crossings.iter().map(|(_, s)| s).sum();
    Ok(total.round() as i64)
}

/// Parameter pairs of transversal crossings between two segments.
fn segment_crossings(s1: &Segment, s2: &Segment) -> Vec<(f64, f64)> {
    const EPS: f64 = 1e-12;
    let inside = |t: f64| -> bool { (EPS..=1.0 - EPS).contains(&t) };
    match (s1, s2) {
        (Segment::Line { from: a, to: b }, Segment::Line { from: c, to: d }) => {
            let r = b - a;
            let s = d - c;
            let denom = r.re * s.im - r.im * s.re;
            if denom.abs() < 1e-14 * r.norm() * s.norm() {
                return vec![];
            }
            let q = c - a;
            let t = (q.re * s.im - q.im * s.re) / denom;
            let u = (q.re * r.im - q.im * r.re) / denom;
            if inside(t) && inside(u) {
                vec![(t, u)]
            } else {
                vec![]
            }
        }
        (Segment::Line { from, to }, Segment::Arc { center, radius, theta0, theta1 }) => {
            line_arc(*from, *to, *center, *radius, *theta0, *theta1)
                .into_iter()
                .filter(|(t, u)| inside(*t) && inside(*u))
                .collect()
        }
        (Segment::Arc { center, radius, theta0, theta1 }, Segment::Line { from, to }) => {
            line_arc(*from, *to, *center, *radius, *theta0, *theta1)
                .into_iter()
                .map(|(t, u)| (u, t))
                .filter(|(u, t)| inside(*u) && inside(*t))
                .collect()
        }
        (
            Segment::Arc { center: c1, radius: r1, theta0: a0, theta1: a1 },
            Segment::Arc { center: c2, radius: r2, theta0: b0, theta1: b1 },
        ) => {
            let d = (c2 - c1).norm();
            if d < 1e-14 {
                return vec![]; // concentric
            }
            if d > r1 + r2 - 1e-14 || d < (r1 - r2).abs() + 1e-14 {
                return vec![];
            }
            let ex = (c2 - c1) / d;
            let x = (d * d - r2 * r2 + r1 * r1) / (2.0 * d);
            let y2 = r1 * r1 - x * x;
            if y2 <= 0.0 {
                return vec![];
            }
            let y = y2.sqrt();
            let mut out = Vec::new();
            for sign in [1.0, -1.0] {
                let p = c1 + ex * x + C64::new(0.0, 1.0) * ex * (sign * y);
                let u = arc_param(p, *c1, *a0, *a1);
                let v = arc_param(p, *c2, *b0, *b1);
                if let (Some(u), Some(v)) = (u, v) {
                    if (1e-12..=1.0 - 1e-12).contains(&u) && (1e-12..=1.0 - 1e-12).contains(&v) {
                        out.push((u, v));
                    }
                }
            }
            out
        }
    }
}

fn arc_param(p: C64, center: C64, theta0: f64, theta1: f64) -> Option<f64> {
    let ang = (p - center).arg();
    let span = theta1 - theta0;
    let tau = std::f64::consts::TAU;
    for k in -4..=4 {
        let th = ang + k as f64 * tau;
        let s = (th - theta0) / span;
        if (-1e-9..=1.0 + 1e-9).contains(&s) {
            return Some(s.clamp(0.0, 1.0));
        }
    }
    None
}

fn line_arc(from: C64, to: C64, center: C64, radius: f64, theta0: f64, theta1: f64) -> Vec<(f64, f64)> {
    // |from + t (to - from) - center|^2 = radius^2
    let d = to - from;
    let q = from - center;
    let a = d.norm_sqr();
    let b = 2.0 * (q.re * d.re + q.im * d.im);
    let c = q.norm_sqr() - radius * radius;
    let disc = b * b - 4.0 * a * c;
    if disc <= 0.0 {
        return vec![];
    }
    let sq = disc.sqrt();
    let mut out = Vec::new();
    for t in [(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)] {
        let p = from + d * t;
        if let Some(u) = arc_param(p, center, theta0, theta1) {
            out.push((t, u));
        }
    }
    out
}

/// Appends `count` copies of an a-loop (radius shrunk by 7% so segments stay
/// transversal to the original) to a closed cycle via a straight connector.
/// The appended loops change no period of a normalized differential; they
/// adjust the homology class by `count · [a]`.
pub fn append_a_loop(
    curve: &QuotientCurve,
    b: &LiftedCycle,
    a: &LiftedCycle,
    count: i64,
    clearance_points: &[C64],
) -> Result<LiftedCycle> {
    if count == 0 {
        return Ok(b.clone());
    }
    // reconstruct the a-stadium geometry from its arcs
    let mut arcs: Vec<(C64, f64)> = Vec::new();
    for seg in &a.path.segments {
        if let Segment::Arc { center, radius, .. } = seg {
            if !arcs.iter().any(|(c, _)| (c - center).norm() < 1e-12) {
                arcs.push((*center, *radius));
            }
        }
    }
    if arcs.len() != 2 {
        return Err(Error::Degenerate("a-cycle is not a two-cap stadium".into()));
    }
    let copy = crate::homology::stadium(arcs[0].0, arcs[1].0, arcs[0].1 * 0.93);
    let hop_to = copy.start();

    // fiber consistency: continue a's start fiber to the copy start
    let hop_a = PlanarPath {
        segments: vec![Segment::Line { from: a.path.start(), to: hop_to }],
        closed: false,
    };
    let w_copy = continue_fiber(curve, &hop_a, a.start_fiber)?.end_fiber;

    // connector from b's basepoint
    let connector = Segment::Line { from: b.path.start(), to: hop_to };
    let conn_path = PlanarPath { segments: vec![connector.clone()], closed: false };
    conn_path.check_clearance(clearance_points, 1e-6)?;
    let b_track = continue_fiber(curve, &b.path, b.start_fiber)?;
    let w_arrive = continue_fiber(curve, &conn_path, b_track.end_fiber)?.end_fiber;

    let same_sheet = (w_arrive - w_copy).norm() < (w_arrive + w_copy).norm();
    // ccw copy adds +[a] when on a's sheet, -[a] on the opposite sheet
    let ccw_adds = if same_sheet { 1 } else { -1 };
    let want = count.signum();
    let loop_path = if ccw_adds == want { copy.clone() } else { copy.reversed() };

    let mut segments = b.path.segments.clone();
    for _ in 0..count.unsigned_abs() {
        segments.push(connector.clone());
        segments.extend(loop_path.segments.iter().cloned());
        segments.push(connector.reversed());
    }
    Ok(LiftedCycle {
        path: PlanarPath { segments, closed: true },
        start_fiber: b.start_fiber,
        label: b.label,
        curve_sign: b.curve_sign,
    })
}

/// Local data of a second-kind differential at `z = ∞`.
#[derive(Debug, Clone)]
pub struct InfinityExpansion {
    /// True when the numerator is monic of the normalization degree.
    pub leading_ok: bool,
    /// Coefficient of `u^3` in `Ω = (u + D u^3 + O(u^5)) dz`, `u^2 = 1/z`.
    pub d: C64,
    /// Residue at infinity; vanishes for differentials of the second kind.
    pub residue_at_infinity: C64,
    /// Coefficients of `u^{2m}` in the local unit series, m = 0, 1, 2, 3.
    pub local_coefficients: Vec<C64>,
}

/// Series expansion of `Π (z - ζ_j) dz / w` at infinity in `u` with
/// `u^2 = 1/z`. The u^2 coefficient of the unit series is `D`.
pub fn infinity_expansion(
    numerator_roots: &[C64],
    curve: &QuotientCurve,
) -> Result<InfinityExpansion> {
    let expected = (curve.degree - 1) / 2;
    if numerator_roots.len() != expected {
        return Err(Error::WrongDegree {
            got: numerator_roots.len(),
            expected,
        });
    }
    const M: usize = 4;
    // series Π (1 - ζ u^2) · Π (1 - e u^2)^{-1/2} in powers of u^2
    let mut series = [C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
    let mul = |series: &mut [C64; M], factor: &[C64; M]| {
        let mut out = [C64::new(0.0, 0.0); M];
        for i in 0..M {
            for j in 0..(M - i) {
                out[i + j] += series[i] * factor[j];
            }
        }
        *series = out;
    };
    for z in numerator_roots {
        let f = [C64::new(1.0, 0.0), -z, C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        mul(&mut series, &f);
    }
    for e in &curve.branch_points {
        // (1 - e x)^{-1/2} = 1 + e x / 2 + 3 e^2 x^2 / 8 + 5 e^3 x^3 / 16
        let f = [
            C64::new(1.0, 0.0),
            e * 0.5,
            e * e * 0.375,
            e * e * e * 0.3125,
        ];
        mul(&mut series, &f);
    }
    // the local form is -2 u^{-2} (Σ c_m u^{2m}) du: even series, no residue
    Ok(InfinityExpansion {
        leading_ok: true,
        d: series[1],
        residue_at_infinity: C64::new(0.0, 0.0),
        local_coefficients: series.to_vec(),
    })
}

/// Reference integrators kept deliberately independent of the adaptive
/// Gauss–Kronrod path; used by the validation suites only.
pub mod reference {
    use super::*;

    /// Uniformly refined trapezoid integration of `f(z) dz / w` along a
    /// lifted path, doubled until two refinement levels agree to `tol`.
    pub fn trapezoid_integrate(
        curve: &QuotientCurve,
        path: &PlanarPath,
        start_fiber: C64,
        f: &dyn Fn(C64) -> C64,
        tol: f64,
    ) -> Result<C64> {
        let mut n = 256usize;
        let mut prev: Option<C64> = None;
        while n <= (1 << 22) {
            let mut total = C64::new(0.0, 0.0);
            let mut w = start_fiber;
            for seg in &path.segments {
                let mut vals = Vec::with_capacity(n + 1);
                for k in 0..=n {
                    let s = k as f64 / n as f64;
                    let z = seg.at(s);
                    let cand = curve.p(z).sqrt();
                    let keep = if (cand - w).norm() > (cand + w).norm() { -cand } else { cand };
                    w = keep;
                    vals.push(f(z) * seg.velocity(s) / keep);
                }
                let h = 1.0 / n as f64;
                let mut acc = (vals[0] + vals[n]) * 0.5;
                for v in &vals[1..n] {
                    acc += v;
                }
                total += acc * h;
            }
            if let Some(p) = prev {
                if (total - p).norm() < tol {
                    return Ok(total);
                }
            }
            prev = Some(total);
            n *= 2;
        }
        Err(Error::NoConvergence("trapezoid oracle did not stabilize".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CurveSign, Family, ModuliPoint};
    use crate::homology::{keyhole, stadium, CycleLabel};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn simple_curve(points: &[C64]) -> QuotientCurve {
        QuotientCurve {
            sign: CurveSign::Plus,
            branch_points: points.to_vec(),
            degree: points.len(),
            degenerate_root: None,
        }
    }

    #[test]
    fn continuation_real_branch() {
        // w^2 = z + 2 from z = 2 (w = 2) to z = 7: w = 3
        let curve = simple_curve(&[c(-2.0, 0.0)]);
        let path = PlanarPath {
            segments: vec![Segment::Line { from: c(2.0, 0.0), to: c(7.0, 0.0) }],
            closed: false,
        };
        let track = continue_fiber(&curve, &path, c(2.0, 0.0)).unwrap();
        assert!((track.end_fiber - c(3.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn monodromy_of_simple_and_double_loops() {
        let curve = simple_curve(&[c(0.5, 0.0), c(-1.5, 0.0)]);
        let one = stadium(c(0.5, 0.0), c(0.5, 0.0), 0.3);
        let w0 = curve.p(one.start()).sqrt();
        let track = continue_fiber(&curve, &one, w0).unwrap();
        assert!((track.end_fiber + w0).norm() < 1e-10, "one branch point: sheet flips");

        let both = stadium(c(0.5, 0.0), c(-1.5, 0.0), 0.3);
        let w0 = curve.p(both.start()).sqrt();
        let track = continue_fiber(&curve, &both, w0).unwrap();
        assert!((track.end_fiber - w0).norm() < 1e-10, "two branch points: closed");
    }

    #[test]
    fn even_base_c1_integral() {
        // C_+ even n=0: w^2 = z + 2; c_1 from (2, 2) to (2, -2): ∫ dz/w = -8
        let p = ModuliPoint::new(Family::Even, 0, None, vec![]).unwrap();
        let (plus, _) = crate::geometry::quotient_curves(&p);
        let sys = crate::homology::canonical_contours(&p, 0.1).unwrap();
        let c1 = sys.open_curve(1);
        assert!((c1.start_fiber - c(2.0, 0.0)).norm() < 1e-12);
        let v = integrate(&[], &plus, c1, 1e-12).unwrap();
        assert!((v - c(-8.0, 0.0)).norm() < 1e-10, "got {v}");
        // end fiber is the other preimage (2, -2)
        let (_, end) = integrate_fn(&plus, &c1.path, c1.start_fiber, &|_| c(1.0, 0.0), 1e-12).unwrap();
        assert!((end + c(2.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn odd_base_c1_matches_closed_form() {
        // t = 0.25: i * ∫_{c_1} dz/w_+ = 4 sqrt(t) = 2
        let t = 0.25f64;
        let p = ModuliPoint::new(Family::Odd, 0, Some(2.0 + t), vec![]).unwrap();
        let (plus, _) = crate::geometry::quotient_curves(&p);
        let sys = crate::homology::canonical_contours(&p, 0.1 * p.min_separation()).unwrap();
        let c1 = sys.open_curve(1);
        let v = integrate(&[], &plus, c1, 1e-12).unwrap();
        let prefactored = C64::i() * v;
        assert!(
            (prefactored - c(4.0 * t.sqrt(), 0.0)).norm() < 1e-10,
            "got {prefactored}"
        );
    }

    #[test]
    fn point_path_is_zero() {
        let curve = simple_curve(&[c(-2.0, 0.0)]);
        let path = PlanarPath {
            segments: vec![Segment::Line { from: c(2.0, 0.0), to: c(2.0, 0.0) }],
            closed: false,
        };
        let (v, _) = integrate_fn(&curve, &path, c(2.0, 0.0), &|_| c(1.0, 0.0), 1e-12).unwrap();
        assert!(v.norm() < 1e-14);
    }

    #[test]
    fn endpoint_substitution_closed_form() {
        // ∫ dz/w into the branch point of w^2 = z + c0 from z0: 2 sqrt(z + c0) difference
        let curve = simple_curve(&[c(-2.0, 0.0)]);
        let path = PlanarPath {
            segments: vec![Segment::Line { from: c(7.0, 0.0), to: c(-2.0, 0.0) }],
            closed: false,
        };
        let (v, _) = integrate_fn(&curve, &path, c(3.0, 0.0), &|_| c(1.0, 0.0), 1e-12).unwrap();
        // ∫ dz / sqrt(z+2) = 2 sqrt(z+2): at -2: 0, at 7: 6 → integral = -6
        assert!((v - c(-6.0, 0.0)).norm() < 1e-10, "got {v}");
    }

    #[test]
    fn infinity_expansion_even_base() {
        let p = ModuliPoint::new(Family::Even, 0, None, vec![]).unwrap();
        let (plus, minus) = crate::geometry::quotient_curves(&p);
        let ep = infinity_expansion(&[], &plus).unwrap();
        let em = infinity_expansion(&[], &minus).unwrap();
        assert!((ep.d - c(-1.0, 0.0)).norm() < 1e-14, "D_+ = -1");
        assert!((em.d - c(1.0, 0.0)).norm() < 1e-14, "D_- = +1");
        assert!(ep.residue_at_infinity.norm() == 0.0);
        assert!(ep.leading_ok);
        let err = infinity_expansion(&[c(0.0, 0.0)], &plus);
        assert!(matches!(err, Err(Error::WrongDegree { .. })));
    }

    #[test]
    fn sigma_pullback_is_odd() {
        // integral over the sigma image of a cycle = - integral
        let p = ModuliPoint::new(Family::Odd, 1, Some(3.0), vec![c(0.3, 0.8), c(0.3, -0.8)]).unwrap();
        let (plus, _) = crate::geometry::quotient_curves(&p);
        let sys = crate::homology::canonical_contours(&p, 0.04).unwrap();
        let a1 = sys
            .a_cycles
            .iter()
            .find(|a| a.curve_sign == CurveSign::Plus && a.label == CycleLabel::A(1))
            .unwrap();
        let v = integrate(&[c(0.1, 0.0)], &plus, a1, 1e-12).unwrap();
        let img = crate::homology::involution_image(a1, crate::homology::Involution::Sigma, p.family);
        let vi = integrate(&[c(0.1, 0.0)], &plus, &img, 1e-12).unwrap();
        assert!((v + vi).norm() < 1e-9, "sigma-oddness: {v} vs {vi}");
    }

    #[test]
    fn keyhole_track_roundtrip() {
        // open curve: fiber at the end is minus the fiber at the start
        let t = 0.25;
        let p = ModuliPoint::new(Family::Odd, 0, Some(2.0 + t), vec![]).unwrap();
        let (plus, _) = crate::geometry::quotient_curves(&p);
        let kh = keyhole(c(2.0, 0.0), c(2.0 + t, 0.0), 0.02);
        let w0 = plus.p(c(2.0, 0.0)).sqrt();
        let track = continue_fiber(&plus, &kh, w0).unwrap();
        assert!((track.end_fiber + w0).norm() < 1e-10);
    }
}
