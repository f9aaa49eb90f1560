//! Davenport–Heilbronn-type functions.
//!
//! Given a primitive complex Dirichlet character χ mod q with conjugate χ̄,
//! the root number ε(χ) = τ(χ)/(i^κ √q) is unimodular and non-real, so there
//! is a θ with ε(χ) = e^{2iθ}. The combination
//!
//!   f(s) = ½ sec θ [e^{−iθ} L(s; χ) + e^{iθ} L(s; χ̄)]
//!
//! has real Dirichlet coefficients sec θ·Re(e^{−iθ} χ(n)) and satisfies the
//! Riemann-type functional equation f(s) = W(s) f(1−s) with
//!
//!   W(s) = 2^s q^{1/2−s} π^{s−1} Γ(1−s) sin(π(s+κ)/2).
//!
//! The classical q = 5 function (χ(2) = i) is the special case with
//! tan θ = 0.284079…; the construction here works for any modulus admitting
//! a primitive complex character. W is evaluated in log space so that the
//! huge swings of Γ(1−s)·sin(π(s+κ)/2) at heights |t| ≫ 1 cancel before
//! exponentiation.

use num_complex::Complex64;
use serde::Serialize;

use crate::characters::Character;
use crate::error::{Error, Result};
use crate::lfunc::{dirichlet_l, log_gamma, EvalParams};
use crate::par;

/// ε(χ) = τ(χ)/(i^κ √q). Unimodular for primitive χ.
pub fn root_number(chi: &Character) -> Result<Complex64> {
    let tau = chi.gauss_sum()?;
    let q = chi.modulus() as f64;
    let denom = match chi.parity().kappa() {
        0 => Complex64::new(q.sqrt(), 0.0),
        _ => Complex64::new(0.0, q.sqrt()),
    };
    Ok(tau / denom)
}

/// Solve e^{−iθ} ε = e^{iθ} for θ: θ = Arg(ε)/2 ∈ (−π/2, π/2].
///
/// Requires ε off the real axis; ε = ±1 (real primitive characters) makes the
/// combination degenerate. Note the ratio Im ε / Re ε equals tan 2θ, not
/// tan θ.
pub fn theta_from_root_number(eps: Complex64) -> Result<f64> {
    assert!(
        (eps.norm() - 1.0).abs() < 1e-6,
        "root number must be unimodular, got |eps| = {}",
        eps.norm()
    );
    if eps.im.abs() < 1e-10 {
        return Err(Error::RealRootNumber(eps));
    }
    Ok(eps.arg() / 2.0)
}

/// A built Davenport–Heilbronn-type function.
#[derive(Clone, Debug)]
pub struct DhSpec {
    q: u64,
    chi: Character,
    chi_bar: Character,
    kappa: u32,
    epsilon: Complex64,
    theta: f64,
}

/// Summary of a built spec, shaped for JSON output.
#[derive(Serialize)]
pub struct DhSummary {
    pub modulus: u64,
    pub char_label: u64,
    pub conjugate_label: u64,
    pub kappa: u32,
    pub epsilon: Complex64,
    pub theta: f64,
    pub tan_theta: f64,
    pub coefficients: Vec<f64>,
}

impl DhSpec {
    /// Build from a primitive complex character.
    pub fn build(chi: &Character) -> Result<DhSpec> {
        let q = chi.modulus();
        let conductor = chi.conductor();
        if conductor != q {
            return Err(Error::NotPrimitive {
                modulus: q,
                label: chi.label(),
                conductor,
            });
        }
        if chi.is_real() {
            return Err(Error::RealCharacter {
                modulus: q,
                label: chi.label(),
            });
        }
        let epsilon = root_number(chi)?;
        let theta = theta_from_root_number(epsilon)?;
        let spec = DhSpec {
            q,
            chi: chi.clone(),
            chi_bar: chi.conjugate(),
            kappa: chi.parity().kappa(),
            epsilon,
            theta,
        };
        debug_assert!(spec.defining_relation_residual() < 1e-12);
        Ok(spec)
    }

    /// Same spec with θ replaced; the result no longer satisfies the
    /// functional equation. Negative-control diagnostics only.
    pub fn with_theta(mut self, theta: f64) -> DhSpec {
        self.theta = theta;
        self
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn chi(&self) -> &Character {
        &self.chi
    }

    pub fn chi_bar(&self) -> &Character {
        &self.chi_bar
    }

    pub fn kappa(&self) -> u32 {
        self.kappa
    }

    pub fn epsilon(&self) -> Complex64 {
        self.epsilon
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn tan_theta(&self) -> f64 {
        self.theta.tan()
    }

    /// |e^{−iθ} ε − e^{iθ}|.
    pub fn defining_relation_residual(&self) -> f64 {
        let e_m = Complex64::from_polar(1.0, -self.theta);
        let e_p = Complex64::from_polar(1.0, self.theta);
        (e_m * self.epsilon - e_p).norm()
    }

    /// n-th Dirichlet coefficient sec θ · Re(e^{−iθ} χ(n)); real by
    /// construction.
    pub fn coefficient(&self, n: u64) -> f64 {
        let e_m = Complex64::from_polar(1.0, -self.theta);
        (e_m * self.chi.value(n)).re / self.theta.cos()
    }

    /// f(s) = ½ sec θ [e^{−iθ} L(s; χ) + e^{iθ} L(s; χ̄)].
    pub fn eval(&self, s: Complex64, params: &EvalParams) -> Result<Complex64> {
        let l_chi = dirichlet_l(&self.chi, s, params)?;
        let l_bar = dirichlet_l(&self.chi_bar, s, params)?;
        let e_m = Complex64::from_polar(1.0, -self.theta);
        let e_p = Complex64::from_polar(1.0, self.theta);
        Ok(0.5 / self.theta.cos() * (e_m * l_chi + e_p * l_bar))
    }

    /// f′(s) by central differences with h = 1e−6·max(1, |s|).
    pub fn eval_derivative(&self, s: Complex64, params: &EvalParams) -> Result<Complex64> {
        let h = 1e-6 * s.norm().max(1.0);
        let plus = self.eval(s + h, params)?;
        let minus = self.eval(s - h, params)?;
        Ok((plus - minus) / (2.0 * h))
    }

    /// The gamma factor W(s) of this spec's functional equation.
    pub fn w(&self, s: Complex64) -> Result<Complex64> {
        eval_w(self.q, self.kappa, s)
    }

    /// Normalized functional-equation residual
    /// |f(s) − W(s) f(1−s)| / (|f(s)| + |W(s) f(1−s)| + ε).
    pub fn fe_residual(&self, s: Complex64, params: &EvalParams) -> Result<f64> {
        let lhs = self.eval(s, params)?;
        let w = self.w(s)?;
        let rhs = w * self.eval(Complex64::new(1.0, 0.0) - s, params)?;
        Ok((lhs - rhs).norm() / (lhs.norm() + rhs.norm() + 1e-300))
    }

    /// Closure form of `eval` for the zero finder and ray tracer.
    pub fn evaluator<'a>(
        &'a self,
        params: &'a EvalParams,
    ) -> impl Fn(Complex64) -> Result<Complex64> + Sync + 'a {
        move |s| self.eval(s, params)
    }

    /// Closure form of `eval_derivative`.
    pub fn derivative_evaluator<'a>(
        &'a self,
        params: &'a EvalParams,
    ) -> impl Fn(Complex64) -> Result<Complex64> + Sync + 'a {
        move |s| self.eval_derivative(s, params)
    }

    pub fn summary(&self) -> DhSummary {
        DhSummary {
            modulus: self.q,
            char_label: self.chi.label(),
            conjugate_label: self.chi_bar.label(),
            kappa: self.kappa,
            epsilon: self.epsilon,
            theta: self.theta,
            tan_theta: self.tan_theta(),
            coefficients: (1..=12).map(|n| self.coefficient(n)).collect(),
        }
    }
}

/// W(s) = 2^s q^{1/2−s} π^{s−1} Γ(1−s) sin(π(s+κ)/2), computed in log space.
///
/// Γ(1−s) decays and the sin factor grows like e^{π|t|/2}; summing logs before
/// exponentiating keeps the product in range over the whole working strip.
/// Zeros of the sin factor yield W = 0; poles of Γ(1−s) (s a positive integer)
/// are reported as `GammaPole` even where the product has a finite limit.
pub fn eval_w(q: u64, kappa: u32, s: Complex64) -> Result<Complex64> {
    let one_minus_s = Complex64::new(1.0, 0.0) - s;
    if one_minus_s.im == 0.0 && one_minus_s.re <= 0.0 && one_minus_s.re.fract() == 0.0 {
        return Err(Error::GammaPole(s));
    }
    let pi = std::f64::consts::PI;
    let z = (s + kappa as f64) * (pi / 2.0);
    let log_rest = s * std::f64::consts::LN_2
        + (Complex64::new(0.5, 0.0) - s) * (q as f64).ln()
        + (s - 1.0) * pi.ln()
        + log_gamma(one_minus_s)?;
    let log_sin = if z.im > 30.0 {
        // sin z ≈ (i/2) e^{−iz} for large positive Im z.
        Complex64::new(-std::f64::consts::LN_2, pi / 2.0) - Complex64::i() * z
    } else if z.im < -30.0 {
        Complex64::new(-std::f64::consts::LN_2, -pi / 2.0) + Complex64::i() * z
    } else {
        let sn = z.sin();
        if sn.norm() == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        sn.ln()
    };
    Ok((log_rest + log_sin).exp())
}

/// Deterministic evaluation grid: `n_total` points spread over
/// [σ0, σ1] × [t0, t1] at cell centers of a near-square lattice. Cell centers
/// keep the grid off the real axis and off integer σ, where the gamma factor
/// degenerates.
pub fn standard_grid(
    sigma_range: (f64, f64),
    t_range: (f64, f64),
    n_total: usize,
) -> Vec<Complex64> {
    assert!(n_total >= 1);
    let (s0, s1) = sigma_range;
    let (t0, t1) = t_range;
    let sigma_span = (s1 - s0).max(1e-12);
    let t_span = (t1 - t0).max(1e-12);
    let n_sigma =
        ((n_total as f64 * sigma_span / t_span).sqrt().round() as usize).clamp(1, n_total);
    let n_t = n_total.div_ceil(n_sigma);
    let mut out = Vec::with_capacity(n_sigma * n_t);
    for i in 0..n_sigma {
        let sigma = s0 + sigma_span * (i as f64 + 0.5) / n_sigma as f64;
        for j in 0..n_t {
            let t = t0 + t_span * (j as f64 + 0.5) / n_t as f64;
            out.push(Complex64::new(sigma, t));
        }
    }
    out
}

/// Functional-equation residuals over the standard grid; returns the
/// per-point values and their maximum.
pub fn residual_grid(
    spec: &DhSpec,
    sigma_range: (f64, f64),
    t_range: (f64, f64),
    n_total: usize,
    params: &EvalParams,
) -> Result<(Vec<(Complex64, f64)>, f64)> {
    let points = standard_grid(sigma_range, t_range, n_total);
    let residuals = par::par_map(&points, |&s| spec.fe_residual(s, params));
    let mut out = Vec::with_capacity(points.len());
    let mut max = 0.0f64;
    for (s, r) in points.into_iter().zip(residuals) {
        let r = r?;
        max = max.max(r);
        out.push((s, r));
    }
    Ok((out, max))
}
