//! Moduli points, the quotient curves `C_±`, and the spectral model of the
//! fibre-product curve upstairs.

use crate::{Error, Result, C64};

/// Which of the two curve families a moduli point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Curves `w_+^2 = (z-R)·Π(z-λ_i)`, `w_-^2 = (z^2-4)(z-R)·Π(z-λ_i)`;
    /// spectral genus `2n+1`.
    Odd,
    /// Curves `w_±^2 = (z±2)·Π(z-λ_i)`; spectral genus `2n`.
    Even,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Odd => "odd",
            Family::Even => "even",
        }
    }
}

/// Sign tag distinguishing the two quotient curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveSign {
    Plus,
    Minus,
}

impl CurveSign {
    pub fn as_str(self) -> &'static str {
        match self {
            CurveSign::Plus => "plus",
            CurveSign::Minus => "minus",
        }
    }
}

/// A point of the moduli space `M_n` (or its real form `M_{n,R}`), plus an
/// optional degeneration pair `(μ, ν)` describing the added branch value
/// `λ_{n+1} = μ + iν` of the next family member.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuliPoint {
    pub family: Family,
    pub n: usize,
    /// Only present for the odd family.
    pub r: Option<f64>,
    /// 2n branch values; for real-form points stored as
    /// (upper-half-plane value, its conjugate) per pair.
    pub lambdas: Vec<C64>,
    pub real_form: bool,
    /// Degeneration coordinates (μ, ν); ν = 0 marks the boundary point with
    /// a double branch value at μ.
    pub degeneration: Option<(f64, f64)>,
}

const TWO_GUARD: f64 = 1e-12;

impl ModuliPoint {
    /// Validates and constructs a moduli point. `real_form` is detected from
    /// the data: conjugate pairing with the upper-half-plane value first.
    pub fn new(family: Family, n: usize, r: Option<f64>, lambdas: Vec<C64>) -> Result<Self> {
        if lambdas.len() != 2 * n {
            return Err(Error::Parse(format!(
                "expected {} branch values, got {}",
                2 * n,
                lambdas.len()
            )));
        }
        match family {
            Family::Odd => {
                let r = r.ok_or_else(|| Error::Parse("odd family requires R".into()))?;
                if !(r > 2.0) {
                    return Err(Error::RejectRange(r));
                }
            }
            Family::Even => {
                if r.is_some() {
                    return Err(Error::Parse("even family takes no R".into()));
                }
            }
        }
        for (i, l) in lambdas.iter().enumerate() {
            if (l - C64::new(2.0, 0.0)).norm() < TWO_GUARD
                || (l + C64::new(2.0, 0.0)).norm() < TWO_GUARD
            {
                return Err(Error::RejectCollision(format!("lambda_{} = ±2", i + 1)));
            }
            if let Some(r) = r {
                if (l - C64::new(r, 0.0)).norm() < TWO_GUARD {
                    return Err(Error::RejectCollision(format!("lambda_{} = R", i + 1)));
                }
            }
        }
        // the pairs {λ_1,λ_2}, ..., {λ_{2n-1},λ_{2n}} must be mutually disjoint
        for i in 0..lambdas.len() {
            for j in (i + 1)..lambdas.len() {
                if (lambdas[i] - lambdas[j]).norm() < TWO_GUARD {
                    return Err(Error::RejectCollision(format!(
                        "lambda_{} = lambda_{}",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        let real_form = Self::detect_real_form(&lambdas)?;
        Ok(ModuliPoint {
            family,
            n,
            r,
            lambdas,
            real_form,
            degeneration: None,
        })
    }

    fn detect_real_form(lambdas: &[C64]) -> Result<bool> {
        let mut real = true;
        for pair in lambdas.chunks(2) {
            if (pair[1] - pair[0].conj()).norm() > 1e-9 {
                real = false;
            }
        }
        if real {
            for (k, pair) in lambdas.chunks(2).enumerate() {
                if pair[0].im <= 0.0 {
                    return Err(Error::RejectConjugacy(format!(
                        "pair {} must store the upper-half-plane value first",
                        k + 1
                    )));
                }
                if !(-2.0 < pair[0].re && pair[0].re < 2.0) {
                    return Err(Error::RejectConjugacy(format!(
                        "Re lambda of pair {} must lie in (-2, 2)",
                        k + 1
                    )));
                }
            }
        }
        Ok(real)
    }

    /// Construct without the real-form orientation checks. Used internally
    /// for finite-difference legs that temporarily flip a pair.
    pub(crate) fn new_unchecked(
        family: Family,
        n: usize,
        r: Option<f64>,
        lambdas: Vec<C64>,
        real_form: bool,
    ) -> Self {
        ModuliPoint {
            family,
            n,
            r,
            lambdas,
            real_form,
            degeneration: None,
        }
    }

    /// Attach degeneration coordinates (μ, ν).
    pub fn with_degeneration(mut self, mu: f64, nu: f64) -> Self {
        self.degeneration = Some((mu, nu));
        self
    }

    /// The point of `M_{n+1}` obtained by adjoining the degeneration pair
    /// `λ_{n+1} = μ + iν` (ν ≠ 0). The contour machinery treats the first
    /// element of the new pair as the anchor, so ν < 0 is allowed here.
    pub fn extended(&self) -> Result<ModuliPoint> {
        let (mu, nu) = self
            .degeneration
            .ok_or_else(|| Error::Parse("no degeneration pair to extend by".into()))?;
        let mut lambdas = self.lambdas.clone();
        lambdas.push(C64::new(mu, nu));
        lambdas.push(C64::new(mu, -nu));
        Ok(ModuliPoint {
            family: self.family,
            n: self.n + 1,
            r: self.r,
            lambdas,
            real_form: self.real_form,
            degeneration: None,
        })
    }

    /// All finite branch values relevant to either quotient curve, plus ±2.
    /// Used for clearance radii.
    pub fn reference_points(&self) -> Vec<C64> {
        let mut pts = vec![C64::new(-2.0, 0.0), C64::new(2.0, 0.0)];
        if let Some(r) = self.r {
            pts.push(C64::new(r, 0.0));
        }
        pts.extend_from_slice(&self.lambdas);
        if let Some((mu, nu)) = self.degeneration {
            pts.push(C64::new(mu, nu));
            if nu != 0.0 {
                pts.push(C64::new(mu, -nu));
            }
        }
        pts
    }

    /// Minimal pairwise separation of [`Self::reference_points`].
    pub fn min_separation(&self) -> f64 {
        let pts = self.reference_points();
        let mut best = f64::INFINITY;
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                let d = (pts[i] - pts[j]).norm();
                if d > 1e-300 && d < best {
                    best = d;
                }
            }
        }
        best
    }

    /// Serializes to the line-oriented record format with exact decimal
    /// round-trip.
    pub fn to_record(&self) -> String {
        let mut s = format!(
            "family={} n={} realform={}",
            self.family.as_str(),
            self.n,
            self.real_form
        );
        if let Some(r) = self.r {
            s.push_str(&format!(" R={r}"));
        }
        for l in &self.lambdas {
            s.push_str(&format!(" lambda={},{}", l.re, l.im));
        }
        if let Some((mu, nu)) = self.degeneration {
            s.push_str(&format!(" mu={mu} nu={nu}"));
        }
        s
    }

    /// Parses the record format produced by [`Self::to_record`].
    pub fn from_record(line: &str) -> Result<Self> {
        let mut family = None;
        let mut n = None;
        let mut r = None;
        let mut lambdas = Vec::new();
        let mut mu = None;
        let mut nu = None;
        for field in line.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("field `{field}` is not key=value")))?;
            match key {
                "family" => {
                    family = Some(match value {
                        "odd" => Family::Odd,
                        "even" => Family::Even,
                        other => return Err(Error::Parse(format!("unknown family `{other}`"))),
                    })
                }
                "n" => n = Some(value.parse::<usize>().map_err(|e| Error::Parse(e.to_string()))?),
                "R" => r = Some(value.parse::<f64>().map_err(|e| Error::Parse(e.to_string()))?),
                "lambda" => {
                    let (re, im) = value
                        .split_once(',')
                        .ok_or_else(|| Error::Parse(format!("lambda `{value}` is not re,im")))?;
                    lambdas.push(C64::new(
                        re.parse().map_err(|_| Error::Parse(format!("bad re `{re}`")))?,
                        im.parse().map_err(|_| Error::Parse(format!("bad im `{im}`")))?,
                    ));
                }
                "mu" => mu = Some(value.parse::<f64>().map_err(|e| Error::Parse(e.to_string()))?),
                "nu" => nu = Some(value.parse::<f64>().map_err(|e| Error::Parse(e.to_string()))?),
                "realform" => {} // derived, ignored on input
                other => return Err(Error::Parse(format!("unknown key `{other}`"))),
            }
        }
        let family = family.ok_or_else(|| Error::Parse("missing family".into()))?;
        let n = n.ok_or_else(|| Error::Parse("missing n".into()))?;
        let mut point = ModuliPoint::new(family, n, r, lambdas)?;
        match (mu, nu) {
            (Some(m), Some(v)) => point = point.with_degeneration(m, v),
            (None, None) => {}
            _ => return Err(Error::Parse("mu and nu must appear together".into())),
        }
        Ok(point)
    }
}

/// One of the two hyperelliptic quotient curves, `w^2 = Π (z - e_k)`.
#[derive(Debug, Clone)]
pub struct QuotientCurve {
    pub sign: CurveSign,
    /// Zeros of the defining polynomial; a degenerate root appears twice.
    pub branch_points: Vec<C64>,
    pub degree: usize,
    pub degenerate_root: Option<C64>,
}

impl QuotientCurve {
    /// Evaluates the defining polynomial `P(z)`.
    pub fn p(&self, z: C64) -> C64 {
        self.branch_points.iter().fold(C64::new(1.0, 0.0), |acc, e| acc * (z - e))
    }

    /// Branch points with the degenerate root listed once.
    pub fn distinct_branch_points(&self) -> Vec<C64> {
        match self.degenerate_root {
            None => self.branch_points.clone(),
            Some(root) => {
                let mut out = Vec::new();
                let mut skipped = false;
                for e in &self.branch_points {
                    if !skipped && (e - root).norm() < 1e-14 {
                        skipped = true;
                        continue;
                    }
                    out.push(*e);
                }
                out
            }
        }
    }

    /// Genus of the smooth model (odd degree: `(deg - 1) / 2`).
    pub fn genus(&self) -> usize {
        (self.degree - 1) / 2
    }

    /// Expected numerator degree of the normalized second-kind differential.
    pub fn numerator_degree(&self) -> usize {
        self.genus()
    }
}

/// Constructs the two quotient curves of a moduli point.
pub fn quotient_curves(p: &ModuliPoint) -> (QuotientCurve, QuotientCurve) {
    let mut extra = Vec::new();
    let mut degenerate_root = None;
    if let Some((mu, nu)) = p.degeneration {
        if nu == 0.0 {
            extra.push(C64::new(mu, 0.0));
            extra.push(C64::new(mu, 0.0));
            degenerate_root = Some(C64::new(mu, 0.0));
        } else {
            extra.push(C64::new(mu, nu));
            extra.push(C64::new(mu, -nu));
        }
    }
    let (plus_pts, minus_pts): (Vec<C64>, Vec<C64>) = match p.family {
        Family::Odd => {
            let r = C64::new(p.r.unwrap(), 0.0);
            let mut plus = vec![r];
            plus.extend_from_slice(&p.lambdas);
            plus.extend_from_slice(&extra);
            let mut minus = vec![C64::new(2.0, 0.0), C64::new(-2.0, 0.0), r];
            minus.extend_from_slice(&p.lambdas);
            minus.extend_from_slice(&extra);
            (plus, minus)
        }
        Family::Even => {
            let mut plus = vec![C64::new(-2.0, 0.0)];
            plus.extend_from_slice(&p.lambdas);
            plus.extend_from_slice(&extra);
            let mut minus = vec![C64::new(2.0, 0.0)];
            minus.extend_from_slice(&p.lambdas);
            minus.extend_from_slice(&extra);
            (plus, minus)
        }
    };
    let plus = QuotientCurve {
        sign: CurveSign::Plus,
        degree: plus_pts.len(),
        branch_points: plus_pts,
        degenerate_root,
    };
    let minus = QuotientCurve {
        sign: CurveSign::Minus,
        degree: minus_pts.len(),
        branch_points: minus_pts,
        degenerate_root,
    };
    (plus, minus)
}

/// Branch data of the fibre product `X` in the x-plane.
#[derive(Debug, Clone)]
pub struct SpectralModel {
    pub x_branch_points: Vec<C64>,
    pub genus: usize,
    pub has_zero_branch: bool,
}

impl SpectralModel {
    /// Defining polynomial of `X`: `y^2 = x · Π (x - x_k)` over the
    /// nonzero branch points.
    pub fn p(&self, x: C64) -> C64 {
        self.x_branch_points.iter().fold(C64::new(1.0, 0.0), |acc, e| acc * (x - e))
    }
}

const UNIT_MODULUS_TOL: f64 = 1e-9;

/// Solves `α + 1/α = λ`, returning the pair with `|α| > 1` first.
pub fn branch_value_roots(lambda: C64) -> Result<(C64, C64)> {
    let disc = (lambda * lambda - C64::new(4.0, 0.0)).sqrt();
    let a1 = (lambda + disc) / 2.0;
    let a2 = (lambda - disc) / 2.0;
    if (a1.norm() - 1.0).abs() < UNIT_MODULUS_TOL {
        return Err(Error::UnitModulus(lambda));
    }
    if a1.norm() > 1.0 {
        Ok((a1, a2))
    } else {
        Ok((a2, a1))
    }
}

/// Branch points of `X` in the x-plane, genus and the zero-branch flag.
pub fn spectral_model(p: &ModuliPoint) -> Result<SpectralModel> {
    let mut pts = vec![C64::new(0.0, 0.0)];
    if let Some(r) = p.r {
        let (big, small) = branch_value_roots(C64::new(r, 0.0))?;
        pts.push(big);
        pts.push(small);
    }
    for l in &p.lambdas {
        let (big, small) = branch_value_roots(*l)?;
        pts.push(big);
        pts.push(small);
    }
    if p.real_form {
        for pt in &pts[1..] {
            if (pt.norm() - 1.0).abs() < UNIT_MODULUS_TOL {
                return Err(Error::UnitModulus(*pt + 1.0 / *pt));
            }
        }
    }
    let genus = match p.family {
        Family::Odd => 2 * p.n + 1,
        Family::Even => 2 * p.n,
    };
    Ok(SpectralModel {
        x_branch_points: pts,
        genus,
        has_zero_branch: true,
    })
}

/// Images of an on-curve sample of `X` under the two quotient maps,
/// checked against the defining equations of `C_±`.
pub fn quotient_map_check(p: &ModuliPoint, x: C64, y_sample: C64) -> Result<((C64, C64), (C64, C64))> {
    let model = spectral_model(p)?;
    let scale = 1.0 + model.p(x).norm();
    let res = (y_sample * y_sample - model.p(x)).norm() / scale;
    if res > crate::tol::ON_CURVE {
        return Err(Error::OffCurve(res));
    }
    let z = x + 1.0 / x;
    let n = p.n as i32;
    let (w_plus, w_minus) = match p.family {
        Family::Odd => (
            y_sample / x.powi(n + 1),
            (x + 1.0) * (x - 1.0) * y_sample / x.powi(n + 2),
        ),
        Family::Even => (
            (x + 1.0) * y_sample / x.powi(n + 1),
            (x - 1.0) * y_sample / x.powi(n + 1),
        ),
    };
    Ok(((z, w_plus), (z, w_minus)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn validates_base_cases() {
        let p = ModuliPoint::new(Family::Odd, 0, Some(2.1), vec![]).unwrap();
        assert!(p.real_form);
        assert_eq!(spectral_model(&p).unwrap().genus, 1);

        let p = ModuliPoint::new(Family::Odd, 1, Some(3.0), vec![c(0.0, 1.0), c(0.0, -1.0)]).unwrap();
        assert!(p.real_form);

        let err = ModuliPoint::new(Family::Even, 1, None, vec![c(2.0, 0.0), c(2.0, 0.0)]);
        assert!(matches!(err, Err(Error::RejectCollision(_))));

        let err = ModuliPoint::new(Family::Odd, 0, Some(1.9), vec![]);
        assert!(matches!(err, Err(Error::RejectRange(_))));

        // lower-half-plane value first breaks the orientation convention
        let err = ModuliPoint::new(Family::Odd, 1, Some(3.0), vec![c(0.0, -1.0), c(0.0, 1.0)]);
        assert!(matches!(err, Err(Error::RejectConjugacy(_))));
    }

    #[test]
    fn quotient_curve_branch_sets() {
        let p = ModuliPoint::new(Family::Odd, 0, Some(2.1), vec![]).unwrap();
        let (cp, cm) = quotient_curves(&p);
        assert_eq!(cp.degree, 1);
        assert_eq!(cm.degree, 3);
        assert_eq!(cp.degree + 2, cm.degree);
        assert_relative_eq!(cp.branch_points[0].re, 2.1);

        let p = ModuliPoint::new(Family::Even, 0, None, vec![]).unwrap();
        let (cp, cm) = quotient_curves(&p);
        assert_eq!((cp.branch_points[0].re, cm.branch_points[0].re), (-2.0, 2.0));
        assert_eq!(cp.degree, cm.degree);

        let p = ModuliPoint::new(Family::Odd, 1, Some(3.0), vec![c(0.0, 1.0), c(0.0, -1.0)])
            .unwrap()
            .with_degeneration(0.5, 0.0);
        let (cp, cm) = quotient_curves(&p);
        assert_eq!(cp.degenerate_root, Some(c(0.5, 0.0)));
        assert_eq!(cm.degenerate_root, Some(c(0.5, 0.0)));
        assert_eq!(cp.branch_points.len(), 5);
        assert_eq!(cp.distinct_branch_points().len(), 4);
    }

    #[test]
    fn spectral_model_roots() {
        let p = ModuliPoint::new(Family::Odd, 0, Some(2.5), vec![]).unwrap();
        let m = spectral_model(&p).unwrap();
        assert_eq!(m.genus, 1);
        assert!(m.has_zero_branch);
        let mut nonzero: Vec<f64> = m.x_branch_points[1..].iter().map(|z| z.re).collect();
        nonzero.sort_by(f64::total_cmp);
        assert_relative_eq!(nonzero[0], 0.5, epsilon = 1e-14);
        assert_relative_eq!(nonzero[1], 2.0, epsilon = 1e-14);

        // alpha + 1/alpha = lambda back-substitution oracle
        let lam = c(0.0, 1.0);
        let (a, b) = branch_value_roots(lam).unwrap();
        assert!((a + 1.0 / a - lam).norm() < 1e-14);
        assert!((b + 1.0 / b - lam).norm() < 1e-14);
        assert!((a * b - c(1.0, 0.0)).norm() < 1e-14);

        let err = ModuliPoint::new(Family::Odd, 0, Some(2.0), vec![]);
        assert!(err.is_err()); // R = 2 rejected by range before unit modulus
        let err = branch_value_roots(c(2.0, 0.0));
        assert!(matches!(err, Err(Error::UnitModulus(_))));
    }

    #[test]
    fn inverse_closure_of_branch_pairs() {
        let p = ModuliPoint::new(
            Family::Odd,
            2,
            Some(3.0),
            vec![c(0.3, 0.8), c(0.3, -0.8), c(-0.9, 1.1), c(-0.9, -1.1)],
        )
        .unwrap();
        let m = spectral_model(&p).unwrap();
        let pts = &m.x_branch_points[1..];
        // closed under x -> 1/x and (real form) under x -> 1/conj(x), to 1e-12
        for z in pts {
            let inv = 1.0 / z;
            let best = pts.iter().map(|q| (q - inv).norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-12, "1/x closure failed: {best}");
            let invc = 1.0 / z.conj();
            let best = pts.iter().map(|q| (q - invc).norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-12, "1/conj(x) closure failed: {best}");
        }
    }

    #[test]
    fn quotient_map_fixed_points() {
        let p = ModuliPoint::new(Family::Odd, 0, Some(2.5), vec![]).unwrap();
        let m = spectral_model(&p).unwrap();
        let y = m.p(c(1.0, 0.0)).sqrt();
        let ((z, wp), _) = quotient_map_check(&p, c(1.0, 0.0), y).unwrap();
        assert!((z - c(2.0, 0.0)).norm() < 1e-14);
        assert!((wp - y).norm() < 1e-14);

        let y = m.p(c(-1.0, 0.0)).sqrt();
        let ((z, _), _) = quotient_map_check(&p, c(-1.0, 0.0), y).unwrap();
        assert!((z + c(2.0, 0.0)).norm() < 1e-14);

        let err = quotient_map_check(&p, c(1.0, 0.0), y + c(0.1, 0.0));
        assert!(matches!(err, Err(Error::OffCurve(_))));
    }

    #[test]
    fn record_round_trip() {
        let p = ModuliPoint::new(
            Family::Odd,
            1,
            Some(3.000000000000001),
            vec![c(0.1234567890123456, 0.75), c(0.1234567890123456, -0.75)],
        )
        .unwrap()
        .with_degeneration(0.5, 1e-17);
        let line = p.to_record();
        let q = ModuliPoint::from_record(&line).unwrap();
        assert_eq!(p, q);
    }
}
