//! Concrete planar contours for the canonical cycles, their lifts to the
//! quotient curves, and the intersection pairing.
//!
//! Shapes: a-cycles are counterclockwise racetracks around a branch-point
//! pair; b-cycles are racetracks around (anchor, base-point) segments,
//! corrected by appended a-loops until the pairing is symplectic; the open
//! curves are keyholes from ±2 around their winding set.

use crate::analytic;
use crate::geometry::{CurveSign, Family, ModuliPoint, QuotientCurve};
use crate::{Error, Result, C64};

/// One piece of a planar contour.
#[derive(Debug, Clone, PartialEq)]
pub enum Segment {
    Line { from: C64, to: C64 },
    /// Circular arc, traversed from `theta0` to `theta1` (counterclockwise
    /// when `theta1 > theta0`).
    Arc { center: C64, radius: f64, theta0: f64, theta1: f64 },
}

impl Segment {
    pub fn start(&self) -> C64 {
        match *self {
            Segment::Line { from, .. } => from,
            Segment::Arc { center, radius, theta0, .. } => {
                center + C64::from_polar(radius, theta0)
            }
        }
    }

    pub fn end(&self) -> C64 {
        match *self {
            Segment::Line { to, .. } => to,
            Segment::Arc { center, radius, theta1, .. } => center + C64::from_polar(radius, theta1),
        }
    }

    /// Point at parameter `s ∈ [0, 1]`.
    pub fn at(&self, s: f64) -> C64 {
        match *self {
            Segment::Line { from, to } => from + (to - from) * s,
            Segment::Arc { center, radius, theta0, theta1 } => {
                center + C64::from_polar(radius, theta0 + (theta1 - theta0) * s)
            }
        }
    }

    /// Derivative dz/ds at parameter `s`.
    pub fn velocity(&self, s: f64) -> C64 {
        match *self {
            Segment::Line { from, to } => to - from,
            Segment::Arc { center: _, radius, theta0, theta1 } => {
                let th = theta0 + (theta1 - theta0) * s;
                C64::new(0.0, theta1 - theta0) * C64::from_polar(radius, th)
            }
        }
    }

    /// Minimal distance from the segment to a point.
    pub fn distance_to(&self, p: C64) -> f64 {
        match *self {
            Segment::Line { from, to } => {
                let d = to - from;
                let len2 = d.norm_sqr();
                if len2 == 0.0 {
                    return (p - from).norm();
                }
                let t = ((p - from).re * d.re + (p - from).im * d.im) / len2;
                let t = t.clamp(0.0, 1.0);
                (p - (from + d * t)).norm()
            }
            Segment::Arc { center, radius, theta0, theta1 } => {
                let rel = p - center;
                let ang = rel.im.atan2(rel.re);
                let (lo, hi) = if theta0 <= theta1 { (theta0, theta1) } else { (theta1, theta0) };
                // reduce ang into [lo, lo + 2pi)
                let tau = std::f64::consts::TAU;
                let mut a = ang;
                while a < lo {
                    a += tau;
                }
                while a >= lo + tau {
                    a -= tau;
                }
                if a <= hi {
                    (rel.norm() - radius).abs()
                } else {
                    let e0 = center + C64::from_polar(radius, theta0);
                    let e1 = center + C64::from_polar(radius, theta1);
                    (p - e0).norm().min((p - e1).norm())
                }
            }
        }
    }

    fn reversed(&self) -> Segment {
        match *self {
            Segment::Line { from, to } => Segment::Line { from: to, to: from },
            Segment::Arc { center, radius, theta0, theta1 } => Segment::Arc {
                center,
                radius,
                theta0: theta1,
                theta1: theta0,
            },
        }
    }

    fn conjugated(&self) -> Segment {
        match *self {
            Segment::Line { from, to } => Segment::Line { from: from.conj(), to: to.conj() },
            Segment::Arc { center, radius, theta0, theta1 } => Segment::Arc {
                center: center.conj(),
                radius,
                theta0: -theta0,
                theta1: -theta1,
            },
        }
    }
}

/// A piecewise path in the z-plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarPath {
    pub segments: Vec<Segment>,
    pub closed: bool,
}

impl PlanarPath {
    pub fn start(&self) -> C64 {
        self.segments[0].start()
    }

    pub fn end(&self) -> C64 {
        self.segments.last().unwrap().end()
    }

    pub fn reversed(&self) -> PlanarPath {
        PlanarPath {
            segments: self.segments.iter().rev().map(Segment::reversed).collect(),
            closed: self.closed,
        }
    }

    pub fn conjugated(&self) -> PlanarPath {
        PlanarPath {
            segments: self.segments.iter().map(Segment::conjugated).collect(),
            closed: self.closed,
        }
    }

    /// Winding number of a closed path around `z0`, by summed argument
    /// increments over a flattened polyline.
    pub fn winding_number(&self, z0: C64) -> i64 {
        let mut total = 0.0;
        for seg in &self.segments {
            let steps = match seg {
                Segment::Line { .. } => 64,
                Segment::Arc { theta0, theta1, .. } => {
                    (64.0 * (theta1 - theta0).abs()).ceil() as usize + 8
                }
            };
            let mut prev = seg.at(0.0) - z0;
            for k in 1..=steps {
                let cur = seg.at(k as f64 / steps as f64) - z0;
                total += (cur / prev).arg();
                prev = cur;
            }
        }
        (total / std::f64::consts::TAU).round() as i64
    }

    /// Minimal distance from the whole path to a point.
    pub fn distance_to(&self, p: C64) -> f64 {
        self.segments
            .iter()
            .map(|s| s.distance_to(p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Checks that the path interior keeps `clearance` from each of `points`,
    /// except within `endpoint_slack` of the path endpoints (open curves may
    /// terminate next to a branch point).
    pub fn check_clearance(&self, points: &[C64], clearance: f64) -> Result<()> {
        for pt in points {
            let d = self.distance_to(*pt);
            if d < clearance * 0.98 {
                let at_end = (self.start() - pt).norm() < 1e-12 || (self.end() - pt).norm() < 1e-12;
                if !at_end {
                    return Err(Error::Clearance(format!(
                        "path at distance {d:.3e} from branch point {pt} (clearance {clearance:.3e})"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Counterclockwise racetrack at distance `rho` around the segment `[p, q]`.
pub fn stadium(p: C64, q: C64, rho: f64) -> PlanarPath {
    let phi = (q - p).arg();
    let lo = C64::from_polar(rho, phi - std::f64::consts::FRAC_PI_2);
    let hi = C64::from_polar(rho, phi + std::f64::consts::FRAC_PI_2);
    PlanarPath {
        segments: vec![
            Segment::Line { from: p + lo, to: q + lo },
            Segment::Arc {
                center: q,
                radius: rho,
                theta0: phi - std::f64::consts::FRAC_PI_2,
                theta1: phi + std::f64::consts::FRAC_PI_2,
            },
            Segment::Line { from: q + hi, to: p + hi },
            Segment::Arc {
                center: p,
                radius: rho,
                theta0: phi + std::f64::consts::FRAC_PI_2,
                theta1: phi + 3.0 * std::f64::consts::FRAC_PI_2,
            },
        ],
        closed: true,
    }
}

/// Open keyhole from `start` to the circle of radius `d` around `target`
/// (one counterclockwise turn) and back.
pub fn keyhole(start: C64, target: C64, d: f64) -> PlanarPath {
    let u = (target - start) / (target - start).norm();
    let entry = target - u * d;
    let th0 = (-u).arg();
    PlanarPath {
        segments: vec![
            Segment::Line { from: start, to: entry },
            Segment::Arc {
                center: target,
                radius: d,
                theta0: th0,
                theta1: th0 + std::f64::consts::TAU,
            },
            Segment::Line { from: entry, to: start },
        ],
        closed: false,
    }
}

/// Open keyhole from `start` out to the origin-centered circle of radius
/// `rho_big` (one counterclockwise turn) and back.
pub fn big_keyhole(start: C64, rho_big: f64) -> PlanarPath {
    let u = start / start.norm();
    let entry = u * rho_big;
    let th0 = u.arg();
    PlanarPath {
        segments: vec![
            Segment::Line { from: start, to: entry },
            Segment::Arc {
                center: C64::new(0.0, 0.0),
                radius: rho_big,
                theta0: th0,
                theta1: th0 + std::f64::consts::TAU,
            },
            Segment::Line { from: entry, to: start },
        ],
        closed: false,
    }
}

/// Rotate a closed path so it starts at its unique upward real-axis crossing.
fn rotate_to_positive_crossing(path: &PlanarPath) -> Result<PlanarPath> {
    for (idx, seg) in path.segments.iter().enumerate() {
        let crossing = match *seg {
            Segment::Line { from, to } => {
                if from.im < 0.0 && to.im > 0.0 {
                    Some(from.im / (from.im - to.im))
                } else {
                    None
                }
            }
            Segment::Arc { center, radius, theta0, theta1 } => {
                // upward crossing where sin(th) passes 0 with positive slope
                // of Im z: d Im/ds = (th1 - th0) r cos th
                let mut found = None;
                for k in -2..=2 {
                    let th = k as f64 * std::f64::consts::PI;
                    let (lo, hi) = (theta0.min(theta1), theta0.max(theta1));
                    if th > lo + 1e-12 && th < hi - 1e-12 {
                        let s = (th - theta0) / (theta1 - theta0);
                        let im_rate = (theta1 - theta0) * radius * th.cos();
                        if center.im + radius * th.sin() == center.im && im_rate > 0.0 && center.im.abs() < radius {
                            // center on the axis handled below via generic solve
                            found = Some(s);
                        }
                        let _ = im_rate;
                    }
                }
                // generic: solve Im(center) + r sin th = 0 on the range
                let tau = std::f64::consts::TAU;
                if found.is_none() && center.im.abs() <= radius {
                    let base = (-center.im / radius).asin();
                    let candidates = [base, std::f64::consts::PI - base];
                    'cand: for c in candidates {
                        for k in -3..=3 {
                            let th = c + k as f64 * tau;
                            let (lo, hi) = (theta0.min(theta1), theta0.max(theta1));
                            if th > lo + 1e-9 && th < hi - 1e-9 {
                                let im_rate = (theta1 - theta0) * th.cos();
                                if im_rate > 0.0 {
                                    found = Some((th - theta0) / (theta1 - theta0));
                                    break 'cand;
                                }
                            }
                        }
                    }
                }
                found
            }
        };
        if let Some(s) = crossing {
            if !(1e-9..=1.0 - 1e-9).contains(&s) {
                continue;
            }
            let (first, second) = split_segment(seg, s);
            let mut segments = vec![second];
            segments.extend_from_slice(&path.segments[idx + 1..]);
            segments.extend_from_slice(&path.segments[..idx]);
            segments.push(first);
            return Ok(PlanarPath { segments, closed: true });
        }
    }
    Err(Error::Degenerate(
        "closed contour has no upward real-axis crossing".into(),
    ))
}

fn split_segment(seg: &Segment, s: f64) -> (Segment, Segment) {
    match *seg {
        Segment::Line { from, to } => {
            let mid = from + (to - from) * s;
            (Segment::Line { from, to: mid }, Segment::Line { from: mid, to })
        }
        Segment::Arc { center, radius, theta0, theta1 } => {
            let mid = theta0 + (theta1 - theta0) * s;
            (
                Segment::Arc { center, radius, theta0, theta1: mid },
                Segment::Arc { center, radius, theta0: mid, theta1 },
            )
        }
    }
}

/// Label of a canonical cycle or open curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleLabel {
    A(usize),
    B(usize),
    /// `C(1)` is c_1, `C(-1)` is c_{-1}.
    C(i8),
    GammaCircle,
}

impl std::fmt::Display for CycleLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CycleLabel::A(i) => write!(f, "a{i}"),
            CycleLabel::B(i) => write!(f, "b{i}"),
            CycleLabel::C(s) => write!(f, "c{}", if *s > 0 { "+1" } else { "-1" }),
            CycleLabel::GammaCircle => write!(f, "gamma"),
        }
    }
}

/// A planar contour together with a starting fiber value on a quotient curve.
#[derive(Debug, Clone)]
pub struct LiftedCycle {
    pub path: PlanarPath,
    pub start_fiber: C64,
    pub label: CycleLabel,
    pub curve_sign: CurveSign,
}

/// The canonical cycles of one moduli point, on both curves.
#[derive(Debug, Clone)]
pub struct CycleSystem {
    /// a-cycles on `C_+` (indices 1..n), then on `C_-` (odd: 0..n, even: 1..n).
    pub a_cycles: Vec<LiftedCycle>,
    /// b-cycles in the order matching `a_cycles`.
    pub b_cycles: Vec<LiftedCycle>,
    /// c_1 then c_{-1}.
    pub open_curves: Vec<LiftedCycle>,
    /// Pairing of `[a_cycles | b_cycles]` against itself; same-curve entries
    /// only (cross-curve pairs vanish by definition).
    pub intersection: Vec<Vec<i64>>,
    /// Clearance used to build the contours.
    pub delta: f64,
}

impl CycleSystem {
    pub fn a_on(&self, sign: CurveSign) -> Vec<&LiftedCycle> {
        self.a_cycles.iter().filter(|c| c.curve_sign == sign).collect()
    }

    pub fn b_on(&self, sign: CurveSign) -> Vec<&LiftedCycle> {
        self.b_cycles.iter().filter(|c| c.curve_sign == sign).collect()
    }

    /// The open curve c_{+1} or c_{-1}.
    pub fn open_curve(&self, which: i8) -> &LiftedCycle {
        self.open_curves
            .iter()
            .find(|c| c.label == CycleLabel::C(which))
            .expect("open curve present")
    }
}

fn min_distance_to_others(seg_a: C64, seg_b: C64, all: &[C64]) -> f64 {
    let seg = Segment::Line { from: seg_a, to: seg_b };
    all.iter()
        .filter(|p| (*p - seg_a).norm() > 1e-13 && (*p - seg_b).norm() > 1e-13)
        .map(|p| seg.distance_to(*p))
        .fold(f64::INFINITY, f64::min)
}

/// Start fiber at a real-axis point by the real-form crossing conventions.
fn crossing_fiber(curve: &QuotientCurve, family: Family, z: C64) -> C64 {
    let p = curve.p(z);
    let w = p.sqrt();
    let want_imaginary = match (family, curve.sign) {
        (Family::Odd, CurveSign::Plus) => Some(false),  // w_+ / i < 0
        (Family::Odd, CurveSign::Minus) => None,        // w_- > 0
        (Family::Even, CurveSign::Plus) => None,        // w_+ > 0
        (Family::Even, CurveSign::Minus) => Some(true), // w_- / i > 0
    };
    if p.im.abs() > 1e-9 * p.norm().max(1e-300) {
        return w; // not a real-form crossing; principal branch
    }
    match want_imaginary {
        None => {
            if w.re < 0.0 {
                -w
            } else {
                w
            }
        }
        Some(positive_quotient) => {
            let quo = (w / C64::i()).re;
            if (quo > 0.0) != positive_quotient {
                -w
            } else {
                w
            }
        }
    }
}

/// Start fiber of the open curves: the branch with `w / i > 0` for the odd
/// family (both curves), `w > 0` on even `C_+`, `w / i > 0` on even `C_-`.
fn open_curve_fiber(curve: &QuotientCurve, family: Family, z: C64) -> C64 {
    let w = curve.p(z).sqrt();
    match (family, curve.sign) {
        (Family::Odd, _) | (Family::Even, CurveSign::Minus) => {
            if (w / C64::i()).re < 0.0 {
                -w
            } else {
                w
            }
        }
        (Family::Even, CurveSign::Plus) => {
            if w.re < 0.0 {
                -w
            } else {
                w
            }
        }
    }
}

struct RawCycles {
    a: Vec<LiftedCycle>,
    b: Vec<LiftedCycle>,
    open_curves: Vec<LiftedCycle>,
}

fn build_raw(p: &ModuliPoint, plus: &QuotientCurve, minus: &QuotientCurve, delta: f64) -> Result<RawCycles> {
    let refs = p.reference_points();
    let rho_a = crate::tol::A_RADIUS_DELTAS * delta;
    let rho_b = crate::tol::B_RADIUS_DELTAS * delta;
    let rho_c = crate::tol::C_RADIUS_DELTAS * delta;

    let pairs: Vec<(C64, C64)> = p.lambdas.chunks(2).map(|c| (c[0], c[1])).collect();

    let mut a = Vec::new();
    let mut b = Vec::new();

    let r_pt = p.r.map(|r| C64::new(r, 0.0));
    let two = C64::new(2.0, 0.0);
    let m_two = C64::new(-2.0, 0.0);

    // base points for b-cycle anchors
    let (base_plus, base_minus) = match p.family {
        Family::Odd => (r_pt.unwrap(), m_two),
        Family::Even => (m_two, two),
    };

    // a_i / b_i on C_+ for each conjugate pair
    for (i, (up, down)) in pairs.iter().enumerate() {
        let idx = i + 1;
        for curve in [plus, minus] {
            let path = rotate_to_positive_crossing(&stadium(*up, *down, rho_a))?;
            path.check_clearance(&curve.branch_points, rho_a.min(delta))?;
            if curve.sign == CurveSign::Plus || p.family == Family::Even {
                // crossing must land inside (-2, 2) for real-form points
                if p.real_form {
                    let x = path.start().re;
                    if !(-2.0 < x && x < 2.0) {
                        return Err(Error::Degenerate(format!(
                            "a-cycle {idx} crossing at {x} outside (-2, 2)"
                        )));
                    }
                }
            }
            let fiber = crossing_fiber(curve, p.family, path.start());
            a.push(LiftedCycle {
                path,
                start_fiber: fiber,
                label: CycleLabel::A(idx),
                curve_sign: curve.sign,
            });
            let base = if curve.sign == CurveSign::Plus { base_plus } else { base_minus };
            let d_loc = min_distance_to_others(*up, base, &refs);
            let rb = rho_b.min(0.45 * d_loc);
            if rb < 1e-3 * delta {
                return Err(Error::Clearance(format!(
                    "b-cycle corridor {idx} blocked (distance {d_loc:.3e})"
                )));
            }
            let path = stadium(*up, base, rb);
            path.check_clearance(&curve.branch_points, rb * 0.9)?;
            let fiber = curve.p(path.start()).sqrt();
            b.push(LiftedCycle {
                path,
                start_fiber: fiber,
                label: CycleLabel::B(idx),
                curve_sign: curve.sign,
            });
        }
    }

    // odd family: a_0 / b_0 on C_- around {2, R}
    if p.family == Family::Odd {
        let path = rotate_to_positive_crossing(&stadium(two, r_pt.unwrap(), rho_a))?;
        path.check_clearance(&minus.branch_points, rho_a.min(delta))?;
        let fiber = crossing_fiber(minus, p.family, path.start());
        a.push(LiftedCycle {
            path,
            start_fiber: fiber,
            label: CycleLabel::A(0),
            curve_sign: CurveSign::Minus,
        });
        let path = stadium(two, m_two, rho_b);
        path.check_clearance(&minus.branch_points, rho_b * 0.9)?;
        let fiber = minus.p(path.start()).sqrt();
        b.push(LiftedCycle {
            path,
            start_fiber: fiber,
            label: CycleLabel::B(0),
            curve_sign: CurveSign::Minus,
        });
    }

    // open curves
    let max_abs = p
        .reference_points()
        .iter()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max);
    let rho_big = 2.0 * max_abs + 2.0;
    let mut open_curves = Vec::new();
    match p.family {
        Family::Odd => {
            // c_1 on C_+ from 2 around R; c_-1 on C_+ from -2 around everything
            let path = keyhole(two, r_pt.unwrap(), rho_c);
            path.check_clearance(&plus.branch_points, rho_c * 0.9)?;
            let fiber = open_curve_fiber(plus, p.family, two);
            open_curves.push(LiftedCycle {
                path,
                start_fiber: fiber,
                label: CycleLabel::C(1),
                curve_sign: CurveSign::Plus,
            });
            let path = big_keyhole(m_two, rho_big);
            path.check_clearance(&plus.branch_points, rho_c * 0.9)?;
            let fiber = open_curve_fiber(plus, p.family, m_two);
            open_curves.push(LiftedCycle {
                path,
                start_fiber: fiber,
                label: CycleLabel::C(-1),
                curve_sign: CurveSign::Plus,
            });
        }
        Family::Even => {
            // c_1 on C_+ from 2 around {-2, lambdas}; c_-1 on C_- from -2 around {2, lambdas}
            let path = big_keyhole(two, rho_big);
            path.check_clearance(&plus.branch_points, rho_c * 0.9)?;
            let fiber = open_curve_fiber(plus, p.family, two);
            open_curves.push(LiftedCycle {
                path,
                start_fiber: fiber,
                label: CycleLabel::C(1),
                curve_sign: CurveSign::Plus,
            });
            let path = big_keyhole(m_two, rho_big);
            path.check_clearance(&minus.branch_points, rho_c * 0.9)?;
            let fiber = open_curve_fiber(minus, p.family, m_two);
            open_curves.push(LiftedCycle {
                path,
                start_fiber: fiber,
                label: CycleLabel::C(-1),
                curve_sign: CurveSign::Minus,
            });
        }
    }

    Ok(RawCycles { a, b, open_curves })
}

/// Builds the canonical cycle system at clearance `delta`.
///
/// The b-cycles are oriented so the pairing against their a-partners is +1,
/// then corrected by appended a-loops until the (b, b) block vanishes; the
/// final matrix is re-checked exactly.
pub fn canonical_contours(p: &ModuliPoint, delta: f64) -> Result<CycleSystem> {
    let min_sep = p.min_separation();
    if !(delta > 0.0) || delta > 0.5 * min_sep {
        return Err(Error::Clearance(format!(
            "delta {delta} not in (0, {}]",
            0.5 * min_sep
        )));
    }
    let (plus, minus) = crate::geometry::quotient_curves(p);
    if plus.degenerate_root.is_some() {
        return Err(Error::Degenerate(
            "canonical contours require a smooth curve; use the extension for nodal points".into(),
        ));
    }
    let raw = build_raw(p, &plus, &minus, delta)?;
    let mut a = raw.a;
    let mut b = raw.b;

    let curve_of = |sign: CurveSign| -> &QuotientCurve {
        match sign {
            CurveSign::Plus => &plus,
            CurveSign::Minus => &minus,
        }
    };

    // orient each b so that a_i · b_i = +1 on its curve
    for (ai, bi) in a.iter().zip(b.iter_mut()) {
        debug_assert_eq!(ai.curve_sign, bi.curve_sign);
        let n = analytic::intersection_number(curve_of(ai.curve_sign), ai, bi)?;
        match n {
            1 => {}
            -1 => {
                let rev = bi.path.reversed();
                let fiber = analytic::fiber_at_start(curve_of(bi.curve_sign), bi, &rev)?;
                bi.path = rev;
                bi.start_fiber = fiber;
            }
            other => {
                return Err(Error::Degenerate(format!(
                    "pairing a·b = {other} for {}",
                    bi.label
                )))
            }
        }
    }

    // kill b·b by appending a-loops: b_i <- b_i - eps_ij a_j for j > i
    let nb = b.len();
    for i in 0..nb {
        for j in (i + 1)..nb {
            if b[i].curve_sign != b[j].curve_sign {
                continue;
            }
            let eps = analytic::intersection_number(curve_of(b[i].curve_sign), &b[i], &b[j])?;
            if eps == 0 {
                continue;
            }
            let corrected = analytic::append_a_loop(
                curve_of(b[i].curve_sign),
                &b[i],
                &a[j],
                -eps,
                &curve_of(b[i].curve_sign).branch_points,
            )?;
            b[i] = corrected;
        }
    }

    // final pairing over [a | b]
    let all: Vec<&LiftedCycle> = a.iter().chain(b.iter()).collect();
    let dim = all.len();
    let mut intersection = vec![vec![0i64; dim]; dim];
    for i in 0..dim {
        for j in (i + 1)..dim {
            if all[i].curve_sign != all[j].curve_sign {
                continue;
            }
            let v = analytic::intersection_number(curve_of(all[i].curve_sign), all[i], all[j])?;
            intersection[i][j] = v;
            intersection[j][i] = -v;
        }
    }

    Ok(CycleSystem {
        a_cycles: a,
        b_cycles: b,
        open_curves: raw.open_curves,
        intersection,
        delta,
    })
}

/// Closed lift over the circle `|z| = mu`, clockwise, starting at `z = mu`.
/// Represents the next b-cycle of the boundary point; it closes through the
/// node, so the end fiber is minus the start fiber on the smooth curve.
pub fn large_circle(curve: &QuotientCurve, mu: f64, clockwise: bool) -> Result<LiftedCycle> {
    let max_abs = curve
        .branch_points
        .iter()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max);
    if mu <= max_abs {
        return Err(Error::TooSmall { radius: mu, required: max_abs });
    }
    let span = if clockwise { -std::f64::consts::TAU } else { std::f64::consts::TAU };
    let path = PlanarPath {
        segments: vec![Segment::Arc { center: C64::new(0.0, 0.0), radius: mu, theta0: 0.0, theta1: span }],
        closed: true,
    };
    let start_fiber = -curve.p(C64::new(mu, 0.0)).sqrt();
    Ok(LiftedCycle {
        path,
        start_fiber,
        label: CycleLabel::GammaCircle,
        curve_sign: curve.sign,
    })
}

/// Node path of the boundary point (p, μ, 0): from the node at `z = μ`
/// around the family base point and back, arriving on the opposite sheet.
pub fn node_path(curve: &QuotientCurve, family: Family, mu: f64, delta: f64) -> Result<LiftedCycle> {
    let base = match (family, curve.sign) {
        (Family::Odd, CurveSign::Plus) => {
            let r = curve
                .branch_points
                .iter()
                .cloned()
                .filter(|e| e.im.abs() < 1e-12 && e.re > 2.0)
                .fold(C64::new(f64::NEG_INFINITY, 0.0), |a, b| if b.re > a.re { b } else { a });
            r
        }
        (Family::Odd, CurveSign::Minus) => C64::new(-2.0, 0.0),
        (Family::Even, CurveSign::Plus) => C64::new(-2.0, 0.0),
        (Family::Even, CurveSign::Minus) => C64::new(2.0, 0.0),
    };
    let path = keyhole(C64::new(mu, 0.0), base, crate::tol::C_RADIUS_DELTAS * delta);
    let start_fiber = -curve.p(C64::new(mu, 0.0)).sqrt();
    Ok(LiftedCycle {
        path,
        start_fiber,
        label: CycleLabel::GammaCircle,
        curve_sign: curve.sign,
    })
}

/// Which involution to apply to a cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Involution {
    /// Hyperelliptic: (z, w) -> (z, -w).
    Sigma,
    /// Real structure: (z, w) -> (conj z, ∓ conj w) with the family sign.
    Rho,
}

/// Image of a lifted cycle under an involution of its curve.
pub fn involution_image(c: &LiftedCycle, which: Involution, family: Family) -> LiftedCycle {
    match which {
        Involution::Sigma => LiftedCycle {
            path: c.path.clone(),
            start_fiber: -c.start_fiber,
            label: c.label,
            curve_sign: c.curve_sign,
        },
        Involution::Rho => {
            let sign = match (family, c.curve_sign) {
                (Family::Odd, CurveSign::Plus) => -1.0,
                (Family::Odd, CurveSign::Minus) => 1.0,
                (Family::Even, CurveSign::Plus) => 1.0,
                (Family::Even, CurveSign::Minus) => -1.0,
            };
            LiftedCycle {
                path: c.path.conjugated(),
                start_fiber: c.start_fiber.conj() * sign,
                label: c.label,
                curve_sign: c.curve_sign,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{quotient_curves, ModuliPoint};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn stadium_winds_once_ccw() {
        let path = stadium(c(0.0, 1.0), c(0.0, -1.0), 0.4);
        assert_eq!(path.winding_number(c(0.0, 0.5)), 1);
        assert_eq!(path.winding_number(c(0.0, -0.9)), 1);
        assert_eq!(path.winding_number(c(3.0, 0.0)), 0);
        assert_eq!(path.reversed().winding_number(c(0.0, 0.5)), -1);
    }

    #[test]
    fn keyhole_winds_target_only() {
        let path = keyhole(c(2.0, 0.0), c(3.0, 0.0), 0.1);
        // open path; close it formally for winding by reusing endpoints
        let closed = PlanarPath { segments: path.segments.clone(), closed: true };
        assert_eq!(closed.winding_number(c(3.0, 0.0)), 1);
        assert_eq!(closed.winding_number(c(0.3, 0.8)), 0);
    }

    #[test]
    fn positive_crossing_rotation() {
        let path = rotate_to_positive_crossing(&stadium(c(2.0, 0.0), c(3.0, 0.0), 0.2)).unwrap();
        let start = path.start();
        assert!((start.im).abs() < 1e-12);
        assert!((start.re - 3.2).abs() < 1e-12);
        // ends where it starts
        assert!((path.end() - start).norm() < 1e-12);

        let path = rotate_to_positive_crossing(&stadium(c(0.3, 0.8), c(0.3, -0.8), 0.5)).unwrap();
        let start = path.start();
        assert!(start.im.abs() < 1e-12);
        assert!((start.re - 0.8).abs() < 1e-12, "start {start}");
    }

    #[test]
    fn odd_n1_windings_match_items() {
        let p = ModuliPoint::new(crate::geometry::Family::Odd, 1, Some(3.0), vec![c(0.3, 0.8), c(0.3, -0.8)])
            .unwrap();
        let sys = canonical_contours(&p, 0.05).unwrap();
        let lam = c(0.3, 0.8);
        let r = c(3.0, 0.0);
        for a in &sys.a_cycles {
            match a.label {
                CycleLabel::A(1) => {
                    assert_eq!(a.path.winding_number(lam), 1);
                    assert_eq!(a.path.winding_number(lam.conj()), 1);
                    assert_eq!(a.path.winding_number(r), 0);
                }
                CycleLabel::A(0) => {
                    assert_eq!(a.path.winding_number(r), 1);
                    assert_eq!(a.path.winding_number(c(2.0, 0.0)), 1);
                    assert_eq!(a.path.winding_number(lam), 0);
                    assert_eq!(a.path.winding_number(c(-2.0, 0.0)), 0);
                }
                _ => unreachable!(),
            }
        }
        // c_1 winds R once, lambdas zero; c_-1 winds R and lambdas once
        let c1 = sys.open_curve(1);
        let closed = PlanarPath { segments: c1.path.segments.clone(), closed: true };
        assert_eq!(closed.winding_number(r), 1);
        assert_eq!(closed.winding_number(lam), 0);
        let cm1 = sys.open_curve(-1);
        let closed = PlanarPath { segments: cm1.path.segments.clone(), closed: true };
        assert_eq!(closed.winding_number(r), 1);
        assert_eq!(closed.winding_number(lam), 1);
        assert_eq!(closed.winding_number(lam.conj()), 1);
    }

    #[test]
    fn large_circle_requirements() {
        let p = ModuliPoint::new(crate::geometry::Family::Odd, 0, Some(2.5), vec![]).unwrap();
        let (_, minus) = quotient_curves(&p);
        let lc = large_circle(&minus, 10.0, true).unwrap();
        // clockwise: winding -1 around the origin
        assert_eq!(lc.path.winding_number(c(0.0, 0.0)), -1);
        let err = large_circle(&minus, 1.25, true);
        assert!(matches!(err, Err(Error::TooSmall { .. })));
    }

    #[test]
    fn involutions_compose() {
        let p = ModuliPoint::new(crate::geometry::Family::Odd, 1, Some(3.0), vec![c(0.3, 0.8), c(0.3, -0.8)])
            .unwrap();
        let sys = canonical_contours(&p, 0.05).unwrap();
        let a1 = &sys.a_cycles[0];
        let twice = involution_image(
            &involution_image(a1, Involution::Sigma, p.family),
            Involution::Sigma,
            p.family,
        );
        assert_eq!(twice.path, a1.path);
        assert!((twice.start_fiber - a1.start_fiber).norm() < 1e-15);

        // rho fixes a conjugation-symmetric a-path set-wise: same segments up
        // to cyclic order; check via winding numbers and distances
        let rho = involution_image(a1, Involution::Rho, p.family);
        assert_eq!(rho.path.winding_number(c(0.3, 0.8)), a1.path.winding_number(c(0.3, 0.8)));
        for s in &rho.path.segments {
            assert!(a1.path.distance_to(s.start()) < 1e-9);
        }
    }
}
