//! Pre-images of rays {arg w = φ} under f, traced as polylines.
//!
//! On the curve arg f = φ the tangent direction is conj(g′)/|g′| with
//! g = e^{−iφ} f: moving along it keeps Im g stationary while |f| strictly
//! increases, so each connected component is parametrized by |f|. The tracer
//! is a predictor–corrector: predict along the tangent, then Newton-correct
//! transversally on the constraint Im g = 0. Marching the decreasing-|f|
//! direction ends at a zero of f, which is captured and appended by a direct
//! Newton polish once |f| drops below the capture threshold (arg f is
//! ill-conditioned that close to a zero, so the endpoint certifies |f| ≈ 0
//! instead of the ray residual; its recorded residual is 0 by convention).
//! Zeros of f′ are branch points of the curve family: the tracer flags them
//! and stops rather than jumping sheets.

use num_complex::Complex64;
use serde::Serialize;

use crate::dh::DhSpec;
use crate::error::{Error, Result};
use crate::lfunc::EvalParams;
use crate::par;
use crate::zeros::SearchRect;

/// Why a trace direction stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Termination {
    /// Left the search bounds.
    LeftBounds,
    /// Reached a zero of f (|f| below the endpoint tolerance).
    ReachedZero,
    /// Stalled at a branch point (|f′| ≈ 0).
    BranchPoint,
    /// Hit the step-count safety limit.
    StepLimit,
}

/// A traced pre-image component of the ray {arg w = φ}.
#[derive(Clone, Debug, Serialize)]
pub struct RayCurve {
    pub phi: f64,
    /// Points ordered by increasing |f|.
    pub points: Vec<Complex64>,
    /// |f| at each point; strictly monotone except at flagged branch indices.
    pub moduli: Vec<f64>,
    /// Wrapped |arg f − φ| at each point (0 by convention at a terminal zero).
    pub residuals: Vec<f64>,
    /// Maximum residual over non-terminal points.
    pub max_ray_residual: f64,
    /// Indices where |f′| dropped below the branch threshold.
    pub branch_points: Vec<usize>,
    /// Termination of the decreasing-|f| end (points[0]).
    pub start_termination: Termination,
    /// Termination of the increasing-|f| end (points.last()).
    pub end_termination: Termination,
}

const MIN_STEP: f64 = 1e-6;
const MAX_POINTS_PER_DIR: usize = 50_000;
const BRANCH_EPS: f64 = 1e-6;
const ZERO_CAPTURE: f64 = 1e-6;
const ZERO_ENDPOINT_TOL: f64 = 1e-10;
const CORRECTOR_REL_TOL: f64 = 1e-9;

fn wrap_angle(x: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut y = x - two_pi * (x / two_pi).round();
    if y <= -std::f64::consts::PI {
        y += two_pi;
    }
    y
}

struct Tracer<'a, F> {
    f: &'a F,
    phi: f64,
    e_phi: Complex64, // e^{−iφ}
    bounds: SearchRect,
}

struct DirectionTrace {
    points: Vec<Complex64>,
    moduli: Vec<f64>,
    residuals: Vec<f64>,
    branch: Vec<usize>,
    termination: Termination,
}

impl<'a, F> Tracer<'a, F>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    fn g(&self, s: Complex64) -> Result<Complex64> {
        Ok(self.e_phi * (self.f)(s)?)
    }

    fn g_prime(&self, s: Complex64) -> Result<Complex64> {
        let h = 1e-6 * s.norm().max(1.0);
        Ok(self.e_phi * ((self.f)(s + h)? - (self.f)(s - h)?) / (2.0 * h))
    }

    /// Newton-correct transversally to the curve, with the slope frozen at
    /// the tangent point. Returns the corrected point.
    fn correct(
        &self,
        start: Complex64,
        normal: Complex64,
        slope: f64,
    ) -> Result<Option<Complex64>> {
        let mut p = start;
        for _ in 0..8 {
            let gv = self.g(p)?;
            if gv.norm() == 0.0 {
                return Ok(Some(p));
            }
            if gv.im.abs() <= CORRECTOR_REL_TOL * gv.norm() && gv.re > 0.0 {
                return Ok(Some(p));
            }
            let du = -gv.im / slope;
            if !du.is_finite() || du.abs() > 1.0 {
                return Ok(None);
            }
            p += normal * du;
        }
        Ok(None)
    }

    /// March one direction: `sign` = +1 follows increasing |f|, −1 decreasing.
    fn march(&self, seed: Complex64, initial_step: f64, sign: f64) -> Result<DirectionTrace> {
        let mut out = DirectionTrace {
            points: Vec::new(),
            moduli: Vec::new(),
            residuals: Vec::new(),
            branch: Vec::new(),
            termination: Termination::StepLimit,
        };
        let max_step = initial_step;
        let mut step = initial_step;
        let mut s = seed;
        while out.points.len() < MAX_POINTS_PER_DIR {
            let gp = self.g_prime(s)?;
            if gp.norm() < BRANCH_EPS {
                out.branch.push(out.points.len().saturating_sub(1));
                out.termination = Termination::BranchPoint;
                break;
            }
            let tangent = gp.conj() / gp.norm();
            let normal = Complex64::i() * tangent;
            let predicted = s + tangent * (sign * step);
            match self.correct(predicted, normal, gp.norm())? {
                Some(p) if (p - s).norm() <= 3.0 * step + 1e-12 => {
                    if !self.bounds.contains(p) {
                        out.termination = Termination::LeftBounds;
                        break;
                    }
                    let v = (self.f)(p)?;
                    let m = v.norm();
                    // Capture the terminating zero once it is within reach of
                    // the next step (or |f| is small enough for arg f to lose
                    // conditioning): polish it by Newton and stop there.
                    if sign < 0.0 && (m < ZERO_CAPTURE || m < 2.0 * step * gp.norm()) {
                        if let Ok(rec) = crate::zeros::refine_newton(self.f, p, ZERO_ENDPOINT_TOL) {
                            if self.bounds.contains(rec.location) {
                                out.points.push(rec.location);
                                out.moduli.push(rec.final_residual);
                                out.residuals.push(0.0);
                                out.termination = Termination::ReachedZero;
                                break;
                            }
                        }
                    }
                    out.points.push(p);
                    out.moduli.push(m);
                    out.residuals
                        .push(wrap_angle(v.im.atan2(v.re) - self.phi).abs());
                    s = p;
                    step = (step * 1.5).min(max_step);
                }
                _ => {
                    // Corrector failed or jumped: shrink the step.
                    step *= 0.5;
                    if step < MIN_STEP {
                        out.branch.push(out.points.len().saturating_sub(1));
                        out.termination = Termination::BranchPoint;
                        break;
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Trace the pre-image component of the ray {arg w = φ} through `seed`.
///
/// The seed must satisfy |arg f(seed) − φ| < 0.1; it is first corrected onto
/// the curve, then marched both ways (toward the zero terminating the curve
/// and toward increasing |f|) until the bounds are left, a zero or branch
/// point is reached, or the step budget runs out.
pub fn trace_preimage<F>(
    f: &F,
    seed: Complex64,
    phi: f64,
    step: f64,
    bounds: &SearchRect,
) -> Result<RayCurve>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    bounds.validate()?;
    assert!(step > 0.0, "step must be positive");
    let tracer = Tracer {
        f,
        phi,
        e_phi: Complex64::from_polar(1.0, -phi),
        bounds: *bounds,
    };
    let v0 = f(seed)?;
    if v0.norm() == 0.0 {
        return Err(Error::SeedOffCurve {
            seed,
            arg: f64::NAN,
            phi,
        });
    }
    let arg0 = v0.im.atan2(v0.re);
    if wrap_angle(arg0 - phi).abs() >= 0.1 {
        return Err(Error::SeedOffCurve {
            seed,
            arg: arg0,
            phi,
        });
    }
    // Land the seed exactly on the curve before marching.
    let gp = tracer.g_prime(seed)?;
    let seed_on = if gp.norm() < BRANCH_EPS {
        seed
    } else {
        let tangent = gp.conj() / gp.norm();
        tracer
            .correct(seed, Complex64::i() * tangent, gp.norm())?
            .ok_or(Error::SeedOffCurve {
                seed,
                arg: arg0,
                phi,
            })?
    };

    let (down, up) = par::join(
        || tracer.march(seed_on, step, -1.0),
        || tracer.march(seed_on, step, 1.0),
    );
    let (down, up) = (down?, up?);

    let seed_val = f(seed_on)?;
    let n_down = down.points.len();
    let mut points: Vec<Complex64> = down.points.into_iter().rev().collect();
    let mut moduli: Vec<f64> = down.moduli.into_iter().rev().collect();
    let mut residuals: Vec<f64> = down.residuals.into_iter().rev().collect();
    points.push(seed_on);
    moduli.push(seed_val.norm());
    residuals.push(wrap_angle(seed_val.im.atan2(seed_val.re) - phi).abs());
    points.extend(up.points);
    moduli.extend(up.moduli);
    residuals.extend(up.residuals);

    let mut branch_points: Vec<usize> = Vec::new();
    for b in down.branch {
        // Down-direction indices count from the seed outward; flip them.
        branch_points.push(n_down.saturating_sub(1) - b.min(n_down.saturating_sub(1)));
    }
    for b in up.branch {
        branch_points.push(n_down + 1 + b);
    }
    branch_points.sort_unstable();

    let max_ray_residual = residuals
        .iter()
        .zip(&moduli)
        .filter(|(_, &m)| m > ZERO_CAPTURE)
        .map(|(&r, _)| r)
        .fold(0.0f64, f64::max);

    Ok(RayCurve {
        phi,
        points,
        moduli,
        residuals,
        max_ray_residual,
        branch_points,
        start_termination: down.termination,
        end_termination: up.termination,
    })
}

/// Trace the ray pre-image components passing through a small circle around
/// a verified zero. Near a simple zero, arg f(z₀ + r e^{iα}) ≈ arg f′(z₀) + α,
/// so the launch direction solving arg f = φ is computed directly; a dense
/// directional scan backs it up (and covers near-multiple zeros, where f′ is
/// small and the linearization is useless). Duplicate components are merged.
pub fn curves_through_zero(
    spec: &DhSpec,
    zero: Complex64,
    phi: f64,
    bounds: &SearchRect,
    params: &EvalParams,
) -> Result<Vec<RayCurve>> {
    let f = spec.evaluator(params);
    let radius = 1e-3;
    let h = 1e-6 * zero.norm().max(1.0);
    let d = (f(zero + h)? - f(zero - h)?) / (2.0 * h);
    let mut seeds = Vec::new();
    if d.norm() > BRANCH_EPS {
        let alpha = phi - d.arg();
        seeds.push(zero + Complex64::from_polar(radius, alpha));
    }
    for k in 0..64 {
        let alpha = 2.0 * std::f64::consts::PI * k as f64 / 64.0;
        let s = zero + Complex64::from_polar(radius, alpha);
        let v = f(s)?;
        if v.norm() > 0.0 && wrap_angle(v.im.atan2(v.re) - phi).abs() < 0.05 {
            seeds.push(s);
        }
    }
    let mut curves: Vec<RayCurve> = Vec::new();
    for seed in seeds {
        let curve = match trace_preimage(&f, seed, phi, 1e-2, bounds) {
            Ok(c) => c,
            Err(Error::SeedOffCurve { .. }) => continue,
            Err(e) => return Err(e),
        };
        let far = *curve.points.last().expect("non-empty curve");
        let duplicate = curves.iter().any(|c| {
            let cf = *c.points.last().expect("non-empty");
            (cf - far).norm() < 5e-2 && (c.points[0] - curve.points[0]).norm() < 5e-2
        });
        if !duplicate {
            curves.push(curve);
        }
    }
    Ok(curves)
}

/// Render curves as a standalone SVG: one polyline per curve, the critical
/// line σ = 1/2 dashed, and circles at zero endpoints.
pub fn curves_to_svg(curves: &[RayCurve], view: &SearchRect) -> String {
    let w = 800.0;
    let h = 600.0;
    let sx = |sigma: f64| (sigma - view.sigma_min) / view.width() * w;
    let sy = |t: f64| h - (t - view.t_min) / view.height() * h;
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    if view.sigma_min < 0.5 && view.sigma_max > 0.5 {
        svg.push_str(&format!(
            "<line x1=\"{0:.2}\" y1=\"0\" x2=\"{0:.2}\" y2=\"{h}\" stroke=\"#888\" stroke-dasharray=\"6 4\"/>\n",
            sx(0.5)
        ));
    }
    let colors = [
        "#c0392b", "#2980b9", "#27ae60", "#8e44ad", "#d35400", "#16a085",
    ];
    for (i, curve) in curves.iter().enumerate() {
        let color = colors[i % colors.len()];
        let pts: Vec<String> = curve
            .points
            .iter()
            .map(|p| format!("{:.3},{:.3}", sx(p.re), sy(p.im)))
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.2\"/>\n",
            pts.join(" ")
        ));
        for (end, term) in [
            (curve.points[0], curve.start_termination),
            (*curve.points.last().unwrap(), curve.end_termination),
        ] {
            if term == Termination::ReachedZero {
                svg.push_str(&format!(
                    "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"4\" fill=\"{color}\"/>\n",
                    sx(end.re),
                    sy(end.im)
                ));
            }
        }
    }
    svg.push_str("</svg>\n");
    svg
}
