//! Linear combinations of two functions satisfying the same functional
//! equation.
//!
//! Two Davenport–Heilbronn-type functions built from distinct conjugate pairs
//! mod the same q with the same parity share the gamma factor W(s), so both
//! satisfy f(s) = W(s)·conj(f(1−s̄)) (their series coefficients are real, so
//! the conjugate form coincides with f(s) = W(s) f(1−s)). The combination
//!
//!   F(s) = f₁(s₀)·f₂(s) − f₂(s₀)·f₁(s)
//!
//! vanishes at s₀ by construction, but satisfies the same functional equation
//! only when the constants f₁(s₀), f₂(s₀) are real: otherwise the conjugation
//! in the right-hand side lands on the conjugated constants and the two sides
//! differ. `ComboFunction::fe_residual` measures that failure.

use num_complex::Complex64;

use crate::characters::CharacterGroup;
use crate::dh::{eval_w, DhSpec};
use crate::error::{Error, Result};
use crate::lfunc::EvalParams;

/// Two distinct DH-type functions with identical modulus and parity, hence
/// identical W(s).
#[derive(Clone, Debug)]
pub struct SameFePair {
    pub f1: DhSpec,
    pub f2: DhSpec,
    /// Points where f1/f2 was sampled to witness independence.
    pub witness_points: (Complex64, Complex64),
    /// The two sampled ratios; they differ by more than 1e−6.
    pub witness_ratios: (Complex64, Complex64),
}

/// Build a same-functional-equation pair mod q from the first two conjugate
/// pairs (in label order) of primitive complex characters with equal parity.
pub fn build_same_fe_pair(q: u64, params: &EvalParams) -> Result<SameFePair> {
    let group = CharacterGroup::new(q);
    let mut reps: Vec<DhSpec> = Vec::new();
    for label in 0..group.count() {
        if group.conjugate_label(label) < label {
            continue; // keep the smaller label of each conjugate pair
        }
        let chi = group.character(label);
        if !chi.is_primitive() || chi.is_real() {
            continue;
        }
        reps.push(DhSpec::build(&chi)?);
    }
    let mut chosen: Option<(usize, usize)> = None;
    'outer: for i in 0..reps.len() {
        for j in (i + 1)..reps.len() {
            if reps[i].kappa() == reps[j].kappa() {
                chosen = Some((i, j));
                break 'outer;
            }
        }
    }
    let Some((i, j)) = chosen else {
        return Err(Error::NotEnoughPairs(q));
    };
    let f1 = reps[i].clone();
    let f2 = reps[j].clone();

    let pa = Complex64::new(2.0, 0.0);
    let pb = Complex64::new(3.0, 0.0);
    let ra = f1.eval(pa, params)? / f2.eval(pa, params)?;
    let rb = f1.eval(pb, params)? / f2.eval(pb, params)?;
    if (ra - rb).norm() <= 1e-6 {
        return Err(Error::InvalidInput(format!(
            "specs mod {q} are not independent: ratios {ra} and {rb}"
        )));
    }
    Ok(SameFePair {
        f1,
        f2,
        witness_points: (pa, pb),
        witness_ratios: (ra, rb),
    })
}

/// The combination F(s) = c₁·f₂(s) − c₂·f₁(s) with c_k = f_k(s₀): a function
/// with a built-in zero at s₀.
#[derive(Clone, Debug)]
pub struct ComboFunction {
    pub pair: SameFePair,
    pub s0: Complex64,
    pub c1: Complex64,
    pub c2: Complex64,
}

impl ComboFunction {
    pub fn new(pair: SameFePair, s0: Complex64, params: &EvalParams) -> Result<ComboFunction> {
        let c1 = pair.f1.eval(s0, params)?;
        let c2 = pair.f2.eval(s0, params)?;
        let combo = ComboFunction { pair, s0, c1, c2 };
        let at_zero = combo.eval(s0, params)?;
        debug_assert!(at_zero.norm() < 1e-9, "built-in zero check: {at_zero}");
        Ok(combo)
    }

    pub fn eval(&self, s: Complex64, params: &EvalParams) -> Result<Complex64> {
        let v2 = self.pair.f2.eval(s, params)?;
        let v1 = self.pair.f1.eval(s, params)?;
        Ok(self.c1 * v2 - self.c2 * v1)
    }

    /// Residual of the conjugate-form functional equation
    /// |F(s) − W(s)·conj(F(1−s̄))| / (|F(s)| + |W(s)·conj(F(1−s̄))| + ε).
    pub fn fe_residual(&self, s: Complex64, params: &EvalParams) -> Result<f64> {
        let lhs = self.eval(s, params)?;
        let w = eval_w(self.pair.f1.modulus(), self.pair.f1.kappa(), s)?;
        let inner = self.eval(Complex64::new(1.0, 0.0) - s.conj(), params)?;
        let rhs = w * inner.conj();
        Ok((lhs - rhs).norm() / (lhs.norm() + rhs.norm() + 1e-300))
    }
}
