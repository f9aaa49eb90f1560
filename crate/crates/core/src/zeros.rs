//! Zero location in rectangles via the argument principle.
//!
//! The winding number of f along a rectangle boundary is accumulated by phase
//! unwrapping: the boundary is sampled, and any single-step phase jump above
//! π/2 triggers adaptive bisection of that segment, so the final count is
//! integer-exact once every step is resolved. Rectangles are then subdivided
//! until each cell isolates one zero, which Newton iteration refines from the
//! cell center. Mirror verification re-refines from the reflected seed
//! 1−σ+it; for a function satisfying f(s) = W(s) f(1−s) with real
//! coefficients, every off-critical-line zero must have such a partner.

use num_complex::Complex64;
use serde::Serialize;

use crate::dh::DhSpec;
use crate::error::{Error, Result};
use crate::lfunc::EvalParams;
use crate::par;

/// Default |f| threshold below which a refined point counts as a zero.
pub const ZERO_TOL: f64 = 1e-9;
/// |σ − 1/2| threshold for the on-critical-line flag.
pub const LINE_TOL: f64 = 1e-6;
/// Zeros closer than this are considered the same zero.
pub const MERGE_RADIUS: f64 = 1e-7;

/// An axis-aligned search rectangle in the s-plane.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SearchRect {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub t_min: f64,
    pub t_max: f64,
    /// Boundary samples per edge used by the winding computation.
    pub boundary_samples: usize,
}

impl SearchRect {
    pub fn new(sigma_min: f64, sigma_max: f64, t_min: f64, t_max: f64) -> SearchRect {
        SearchRect {
            sigma_min,
            sigma_max,
            t_min,
            t_max,
            boundary_samples: 400,
        }
    }

    pub fn with_samples(mut self, samples: usize) -> SearchRect {
        self.boundary_samples = samples.max(8);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_min < self.sigma_max && self.t_min < self.t_max) {
            return Err(Error::InvalidInput(format!(
                "degenerate rectangle {self:?}"
            )));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.sigma_max - self.sigma_min
    }

    pub fn height(&self) -> f64 {
        self.t_max - self.t_min
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(
            0.5 * (self.sigma_min + self.sigma_max),
            0.5 * (self.t_min + self.t_max),
        )
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.sigma_min && z.re <= self.sigma_max && z.im >= self.t_min && z.im <= self.t_max
    }

    /// Outward nudge by `amount` on all sides, sample density preserved.
    pub fn nudged(&self, amount: f64) -> SearchRect {
        SearchRect {
            sigma_min: self.sigma_min - amount,
            sigma_max: self.sigma_max + amount,
            t_min: self.t_min - amount,
            t_max: self.t_max + amount,
            boundary_samples: self.boundary_samples,
        }
    }

    /// Split across the longer side at the given fraction. Children keep the
    /// parent's per-length sample density (floor 64 per edge).
    fn split(&self, frac: f64) -> (SearchRect, SearchRect) {
        let scale = |r: &SearchRect, parent: &SearchRect| {
            let density =
                parent.boundary_samples as f64 / parent.width().max(parent.height()).max(1e-12);
            let samples = (density * r.width().max(r.height())).ceil() as usize;
            r.with_samples(samples.clamp(64, 4000))
        };
        if self.width() >= self.height() {
            let cut = self.sigma_min + self.width() * frac;
            let a = SearchRect {
                sigma_max: cut,
                ..*self
            };
            let b = SearchRect {
                sigma_min: cut,
                ..*self
            };
            (scale(&a, self), scale(&b, self))
        } else {
            let cut = self.t_min + self.height() * frac;
            let a = SearchRect {
                t_max: cut,
                ..*self
            };
            let b = SearchRect {
                t_min: cut,
                ..*self
            };
            (scale(&a, self), scale(&b, self))
        }
    }

    /// Counterclockwise boundary polyline (no repeated closing point).
    fn boundary_points(&self) -> Vec<Complex64> {
        let m = self.boundary_samples;
        let mut pts = Vec::with_capacity(4 * m);
        for i in 0..m {
            let x = self.sigma_min + self.width() * i as f64 / m as f64;
            pts.push(Complex64::new(x, self.t_min));
        }
        for i in 0..m {
            let y = self.t_min + self.height() * i as f64 / m as f64;
            pts.push(Complex64::new(self.sigma_max, y));
        }
        for i in 0..m {
            let x = self.sigma_max - self.width() * i as f64 / m as f64;
            pts.push(Complex64::new(x, self.t_max));
        }
        for i in 0..m {
            let y = self.t_max - self.height() * i as f64 / m as f64;
            pts.push(Complex64::new(self.sigma_min, y));
        }
        pts
    }
}

/// A located zero.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ZeroRecord {
    pub location: Complex64,
    /// |f| at the refined location.
    pub final_residual: f64,
    pub newton_iters: u32,
    /// The independently refined partner at 1−σ+it, when verified.
    pub mirror: Option<Complex64>,
    pub on_critical_line: bool,
}

/// A subdivision cell whose zeros could not be pinned down.
#[derive(Clone, Debug, Serialize)]
pub struct UnresolvedCell {
    pub rect: SearchRect,
    pub winding: i64,
    pub detail: String,
}

/// Outcome of a rectangle scan: refined zeros plus any cells that failed to
/// resolve (reported, never silently dropped).
#[derive(Clone, Debug, Default, Serialize)]
pub struct ScanReport {
    pub zeros: Vec<ZeroRecord>,
    pub unresolved: Vec<UnresolvedCell>,
}

fn wrap_angle(x: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut y = x - two_pi * (x / two_pi).round();
    if y <= -std::f64::consts::PI {
        y += two_pi;
    }
    y
}

/// Phase difference along a segment, bisecting while any step exceeds π/2.
fn segment_phase<F>(
    f: &F,
    a: Complex64,
    pa: f64,
    b: Complex64,
    pb: f64,
    depth: u32,
    rect: &SearchRect,
) -> Result<f64>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    let d = wrap_angle(pb - pa);
    if d.abs() <= std::f64::consts::FRAC_PI_2 {
        return Ok(d);
    }
    let mid = 0.5 * (a + b);
    let v = f(mid)?;
    if depth >= 48 {
        // Unresolvable phase jump across a vanishing gap: a zero is sitting
        // on (or numerically on) the contour.
        if v.norm() < 1e-8 {
            return Err(Error::ZeroOnBoundary {
                near: mid,
                suggested: rect.nudged(1e-3),
            });
        }
        return Err(Error::PhaseUnresolvable(mid));
    }
    let pm = v.im.atan2(v.re);
    Ok(segment_phase(f, a, pa, mid, pm, depth + 1, rect)?
        + segment_phase(f, mid, pm, b, pb, depth + 1, rect)?)
}

/// Winding number of f around the rectangle boundary: the number of zeros
/// inside, with multiplicity.
pub fn winding_number<F>(f: &F, rect: &SearchRect) -> Result<i64>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    rect.validate()?;
    let pts = rect.boundary_points();
    let vals: Vec<Result<Complex64>> = par::par_map(&pts, |&p| f(p));
    let mut values = Vec::with_capacity(vals.len());
    for v in vals {
        values.push(v?);
    }
    // Cheap screen for zeros sitting essentially on the contour.
    let edge_scale = values.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
    for (p, v) in pts.iter().zip(&values) {
        if v.norm() < 1e-12 * (1.0 + edge_scale) {
            return Err(Error::ZeroOnBoundary {
                near: *p,
                suggested: rect.nudged(1e-3),
            });
        }
    }
    let phases: Vec<f64> = values.iter().map(|v| v.im.atan2(v.re)).collect();
    let mut total = 0.0f64;
    for i in 0..pts.len() {
        let j = (i + 1) % pts.len();
        total += segment_phase(f, pts[i], phases[i], pts[j], phases[j], 0, rect)?;
    }
    let turns = total / (2.0 * std::f64::consts::PI);
    let n = turns.round();
    if (turns - n).abs() > 0.25 {
        return Err(Error::PhaseUnresolvable(rect.center()));
    }
    Ok(n as i64)
}

/// Newton refinement from `start` with central-difference derivatives.
pub fn refine_newton<F>(f: &F, start: Complex64, zero_tol: f64) -> Result<ZeroRecord>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    let mut s = start;
    let mut iters = 0u32;
    let fail = |last: Complex64, residual: f64| Error::NonConvergent {
        start,
        last,
        residual,
    };
    for it in 1..=60u32 {
        iters = it;
        let v = f(s)?;
        if v.norm() < zero_tol {
            break;
        }
        let h = 1e-6 * s.norm().max(1.0);
        let d = (f(s + h)? - f(s - h)?) / (2.0 * h);
        if d.norm() < 1e-14 {
            return Err(fail(s, v.norm()));
        }
        let delta = v / d;
        if delta.norm() > 10.0 || !delta.re.is_finite() || !delta.im.is_finite() {
            return Err(fail(s, v.norm()));
        }
        s -= delta;
        if delta.norm() < 1e-11 {
            break;
        }
    }
    let residual = f(s)?.norm();
    if residual >= zero_tol {
        return Err(fail(s, residual));
    }
    Ok(ZeroRecord {
        location: s,
        final_residual: residual,
        newton_iters: iters,
        mirror: None,
        on_critical_line: (s.re - 0.5).abs() <= LINE_TOL,
    })
}

const SPLIT_FRACTIONS: [f64; 5] = [0.5, 0.53125, 0.46875, 0.5625, 0.4375];

struct ScanCtx<'a, F> {
    f: &'a F,
    zero_tol: f64,
}

fn scan_cell<F>(
    ctx: &ScanCtx<'_, F>,
    rect: SearchRect,
    count: i64,
    depth: u32,
) -> Result<ScanReport>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    let mut report = ScanReport::default();
    if count == 0 {
        return Ok(report);
    }
    if count == 1 && rect.diameter() <= 0.1 {
        match refine_newton(ctx.f, rect.center(), ctx.zero_tol) {
            Ok(rec) if rect.contains(rec.location) => {
                report.zeros.push(rec);
                return Ok(report);
            }
            // Escaped the cell or failed: fall through to further splitting.
            _ => {}
        }
    }
    if rect.diameter() <= 1e-5 || depth >= 60 {
        report.unresolved.push(UnresolvedCell {
            rect,
            winding: count,
            detail: "cell at size/depth limit without refined zero".into(),
        });
        return Ok(report);
    }
    for frac in SPLIT_FRACTIONS {
        let (a, b) = rect.split(frac);
        let wa = match winding_number(ctx.f, &a) {
            Ok(w) => w,
            Err(Error::ZeroOnBoundary { .. }) => continue,
            Err(e) => return Err(e),
        };
        let wb = match winding_number(ctx.f, &b) {
            Ok(w) => w,
            Err(Error::ZeroOnBoundary { .. }) => continue,
            Err(e) => return Err(e),
        };
        if wa + wb != count {
            // A zero straddling the shared edge escaped both counts; shift
            // the cut and try again.
            continue;
        }
        let (ra, rb) = par::join(
            || scan_cell(ctx, a, wa, depth + 1),
            || scan_cell(ctx, b, wb, depth + 1),
        );
        let (mut ra, rb) = (ra?, rb?);
        ra.zeros.extend(rb.zeros);
        ra.unresolved.extend(rb.unresolved);
        return Ok(ra);
    }
    report.unresolved.push(UnresolvedCell {
        rect,
        winding: count,
        detail: "no admissible split (zero pinned to every candidate cut)".into(),
    });
    Ok(report)
}

/// Find all zeros of f inside the rectangle: winding counts drive recursive
/// subdivision until each cell isolates one zero, Newton polishes it, and the
/// results are deduplicated (radius 1e−7) and sorted by t then σ.
pub fn find_zeros<F>(f: &F, rect: &SearchRect, zero_tol: f64) -> Result<ScanReport>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    rect.validate()?;
    let count = winding_number(f, rect)?;
    let ctx = ScanCtx { f, zero_tol };
    let mut report = scan_cell(&ctx, *rect, count, 0)?;
    report.zeros.sort_by(|a, b| {
        (a.location.im, a.location.re)
            .partial_cmp(&(b.location.im, b.location.re))
            .expect("finite zero coordinates")
    });
    report.zeros.dedup_by(|b, a| {
        if (a.location - b.location).norm() < MERGE_RADIUS {
            if b.final_residual < a.final_residual {
                *a = *b;
            }
            true
        } else {
            false
        }
    });
    Ok(report)
}

/// Verify the mirror partner of a zero across the critical line: refine from
/// the reflected seed 1−σ+it and require matching heights and a residual
/// below `zero_tol`. Returns the record with `mirror` attached.
pub fn mirror_check(
    spec: &DhSpec,
    record: &ZeroRecord,
    params: &EvalParams,
    zero_tol: f64,
) -> Result<ZeroRecord> {
    let z = record.location;
    let f = spec.evaluator(params);
    let seed = Complex64::new(1.0 - z.re, z.im);
    let mirror = refine_newton(&f, seed, zero_tol).map_err(|_| Error::MirrorNotFound(z))?;
    if (mirror.location.im - z.im).abs() >= 1e-6 {
        return Err(Error::MirrorNotFound(z));
    }
    if (mirror.location.re - (1.0 - z.re)).abs() >= 1e-5 {
        return Err(Error::MirrorNotFound(z));
    }
    Ok(ZeroRecord {
        mirror: Some(mirror.location),
        ..*record
    })
}

/// Locate the zero of f′ on the horizontal segment between a verified mirror
/// pair (σ+it, 1−σ+it): scan a thin box around the segment with the
/// central-difference derivative and return the zero whose real part lies
/// strictly between the pair.
pub fn derivative_zero_between(
    spec: &DhSpec,
    pair: (Complex64, Complex64),
    params: &EvalParams,
) -> Result<Complex64> {
    let (z1, z2) = pair;
    if (z1.im - z2.im).abs() > 1e-6 || (z1.re + z2.re - 1.0).abs() > 1e-4 {
        return Err(Error::InvalidMirrorPair(z1, z2));
    }
    let (lo, hi) = if z1.re < z2.re {
        (z1.re, z2.re)
    } else {
        (z2.re, z1.re)
    };
    if hi - lo < 1e-6 {
        // σ = 1/2: the segment is empty.
        return Err(Error::InvalidMirrorPair(z1, z2));
    }
    let t = 0.5 * (z1.im + z2.im);
    let rect = SearchRect::new(lo, hi, t - 0.05, t + 0.05).with_samples(300);
    let g = spec.derivative_evaluator(params);
    let report = find_zeros(&g, &rect, ZERO_TOL)?;
    let mid = 0.5 * (lo + hi);
    report
        .zeros
        .iter()
        .filter(|r| r.location.re > lo && r.location.re < hi && (r.location.im - t).abs() <= 0.05)
        .min_by(|a, b| {
            (a.location.re - mid)
                .abs()
                .partial_cmp(&(b.location.re - mid).abs())
                .expect("finite")
        })
        .map(|r| r.location)
        .ok_or(Error::DerivativeZeroNotFound(z1, z2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// (z − a)(z − b)(z − conj a): three explicit zeros to count and refine.
    fn cubic(a: Complex64, b: Complex64) -> impl Fn(Complex64) -> Result<Complex64> + Sync {
        move |z| Ok((z - a) * (z - b) * (z - a.conj()))
    }

    #[test]
    fn winding_counts_polynomial_zeros() {
        let f = cubic(c(0.3, 0.4), c(-0.2, -0.1));
        let rect = SearchRect::new(-1.0, 1.0, -1.0, 1.0);
        assert_eq!(winding_number(&f, &rect).unwrap(), 3);
        let rect_upper = SearchRect::new(-1.0, 1.0, 0.05, 1.0);
        assert_eq!(winding_number(&f, &rect_upper).unwrap(), 1);
    }

    #[test]
    fn winding_multiplicity() {
        let f = |z: Complex64| Ok((z - c(0.1, 0.2)).powu(3));
        let rect = SearchRect::new(-1.0, 1.0, -1.0, 1.0);
        assert_eq!(winding_number(&f, &rect).unwrap(), 3);
    }

    #[test]
    fn winding_additive_under_split() {
        let f = cubic(c(0.3, 0.4), c(-0.2, -0.1));
        let rect = SearchRect::new(-1.0, 1.0, -1.0, 1.0);
        let whole = winding_number(&f, &rect).unwrap();
        let (a, b) = rect.split(0.53);
        let partial = winding_number(&f, &a).unwrap() + winding_number(&f, &b).unwrap();
        assert_eq!(whole, partial);
    }

    #[test]
    fn zero_on_boundary_detected() {
        let z0 = c(0.5, 0.0);
        let f = move |z: Complex64| Ok(z - z0);
        // Boundary passes exactly through the zero.
        let rect = SearchRect::new(0.0, 0.5, -0.5, 0.5);
        match winding_number(&f, &rect) {
            Err(Error::ZeroOnBoundary { suggested, .. }) => {
                assert!(suggested.sigma_max > 0.5);
            }
            other => panic!("expected ZeroOnBoundary, got {other:?}"),
        }
    }

    #[test]
    fn find_zeros_polynomial() {
        let a = c(0.3, 0.4);
        let b = c(-0.2, -0.1);
        let f = cubic(a, b);
        let rect = SearchRect::new(-1.0, 1.0, -0.9, 0.95);
        let report = find_zeros(&f, &rect, 1e-12).unwrap();
        assert!(report.unresolved.is_empty());
        let mut found: Vec<Complex64> = report.zeros.iter().map(|r| r.location).collect();
        found.sort_by(|x, y| (x.im, x.re).partial_cmp(&(y.im, y.re)).unwrap());
        assert_eq!(found.len(), 3);
        for (z, e) in found.iter().zip([a.conj(), b, a]) {
            assert!((z - e).norm() < 1e-9, "{z} vs {e}");
        }
    }

    #[test]
    fn newton_refines_and_reports_failure() {
        let f = |z: Complex64| Ok(z * z - 2.0);
        let rec = refine_newton(&f, c(1.3, 0.2), 1e-12).unwrap();
        assert!((rec.location - c(2.0_f64.sqrt(), 0.0)).norm() < 1e-10);
        assert!(rec.final_residual < 1e-12);

        // No zero anywhere near: derivative of a constant-ish region is flat.
        let g = |_z: Complex64| Ok(c(1.0, 0.0));
        assert!(matches!(
            refine_newton(&g, c(0.0, 0.0), 1e-12),
            Err(Error::NonConvergent { .. })
        ));
    }

    #[test]
    fn newton_basin_stability() {
        let a = c(0.25, 0.75);
        let f = move |z: Complex64| Ok((z - a) * (z + 1.0));
        let base = refine_newton(&f, a + c(1e-4, -1e-4), 1e-12).unwrap();
        assert!((base.location - a).norm() < 1e-9);
    }

    #[test]
    fn grid_minima_oracle_matches_find_zeros() {
        // Dense-|f| local minima + Newton as an independent census.
        let a = c(0.31, 0.47);
        let b = c(-0.4, 0.22);
        let f = cubic(a, b);
        let rect = SearchRect::new(-0.95, 0.9, 0.05, 1.0);
        let report = find_zeros(&f, &rect, 1e-12).unwrap();

        let n = 80usize;
        let mut seeds = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let z = c(
                    rect.sigma_min + rect.width() * i as f64 / (n - 1) as f64,
                    rect.t_min + rect.height() * j as f64 / (n - 1) as f64,
                );
                seeds.push(z);
            }
        }
        let mut oracle: Vec<Complex64> = Vec::new();
        for &s in &seeds {
            if let Ok(rec) = refine_newton(&f, s, 1e-12) {
                if rect.contains(rec.location)
                    && !oracle.iter().any(|z| (z - rec.location).norm() < 1e-6)
                {
                    oracle.push(rec.location);
                }
            }
        }
        assert_eq!(report.zeros.len(), oracle.len());
        assert_eq!(winding_number(&f, &rect).unwrap() as usize, oracle.len());
    }
}
