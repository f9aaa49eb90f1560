//! Exact arithmetic on Dirichlet characters mod q.
//!
//! Character values are stored as rational turn angles: `Turn { num, den }`
//! means the root of unity e^{2πi·num/den}. All structural operations —
//! multiplicativity, conjugation, parity, conductor detection — are exact
//! integer arithmetic on turns; floating point enters only when a value is
//! converted to a complex number (Gauss sums, L-series coefficients).
//!
//! Enumeration order is fixed by the CRT decomposition of (ℤ/qℤ)*: the
//! component for 2^e (e ≥ 3) is generated by −1 then 5, the component for 4
//! by 3, and each odd prime power by its least primitive root, odd primes in
//! ascending order. A character's label is the mixed-radix index of its
//! exponent vector over these generators (first component most significant),
//! so labels are stable across runs and platforms.

use num_complex::Complex64;
use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};

/// An exact root of unity e^{2πi·num/den}, reduced so that 0 ≤ num < den and
/// gcd(num, den) = 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Turn {
    num: i64,
    den: i64,
}

impl Turn {
    pub const ZERO: Turn = Turn { num: 0, den: 1 };
    pub const HALF: Turn = Turn { num: 1, den: 2 };

    pub fn new(num: i64, den: i64) -> Turn {
        assert!(den > 0, "turn denominator must be positive");
        let n = num.rem_euclid(den);
        if n == 0 {
            return Turn::ZERO;
        }
        let g = n.gcd(&den);
        Turn {
            num: n / g,
            den: den / g,
        }
    }

    pub fn numer(self) -> i64 {
        self.num
    }

    pub fn denom(self) -> i64 {
        self.den
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    /// k·self mod 1, exact.
    pub fn scaled(self, k: i64) -> Turn {
        let k = k.rem_euclid(self.den);
        Turn::new(self.num * k, self.den)
    }

    /// e^{2πi·num/den}. Quarter turns are returned exactly so that values like
    /// χ(n) = −1 or ±i carry no trigonometric rounding.
    pub fn to_complex(self) -> Complex64 {
        match (self.num, self.den) {
            (0, 1) => Complex64::new(1.0, 0.0),
            (1, 2) => Complex64::new(-1.0, 0.0),
            (1, 4) => Complex64::new(0.0, 1.0),
            (3, 4) => Complex64::new(0.0, -1.0),
            (n, d) => {
                let (s, c) = (2.0 * std::f64::consts::PI * n as f64 / d as f64).sin_cos();
                Complex64::new(c, s)
            }
        }
    }
}

impl std::ops::Add for Turn {
    type Output = Turn;

    fn add(self, other: Turn) -> Turn {
        Turn::new(
            self.num * other.den + other.num * self.den,
            self.den * other.den,
        )
    }
}

impl std::ops::Neg for Turn {
    type Output = Turn;

    fn neg(self) -> Turn {
        Turn::new(-self.num, self.den)
    }
}

impl std::fmt::Debug for Turn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Parity flag κ: Even means χ(−1) = 1 (κ = 0), Odd means χ(−1) = −1 (κ = 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn kappa(self) -> u32 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

/// One cyclic factor of (ℤ/qℤ)* under the CRT decomposition.
#[derive(Clone, Debug)]
struct Component {
    prime_power: u64,
    order: u64,
    /// Discrete log base the component generator, indexed by residue mod
    /// prime_power; u32::MAX marks non-coprime residues.
    dlog: Vec<u32>,
}

const NO_DLOG: u32 = u32::MAX;

fn factorize(mut q: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= q {
        if q.is_multiple_of(p) {
            let mut e = 0;
            while q.is_multiple_of(p) {
                q /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if q > 1 {
        out.push((q, 1));
    }
    out
}

fn euler_phi_prime_power(p: u64, e: u32) -> u64 {
    p.pow(e - 1) * (p - 1)
}

/// Discrete-log table for the cyclic subgroup generated by `g` mod `m`.
/// Returns None unless `g` generates a subgroup of exactly `order` elements
/// with distinct powers.
fn dlog_table(g: u64, m: u64, order: u64) -> Option<Vec<u32>> {
    let mut table = vec![NO_DLOG; m as usize];
    let mut x = 1u64 % m;
    for k in 0..order {
        if table[x as usize] != NO_DLOG {
            return None; // repeated power: order of g is smaller than requested
        }
        table[x as usize] = k as u32;
        x = x * g % m;
    }
    if x != 1 % m {
        return None;
    }
    Some(table)
}

fn least_primitive_root(pe: u64, phi: u64) -> u64 {
    for g in 2..pe {
        if g.gcd(&pe) != 1 {
            continue;
        }
        if dlog_table(g, pe, phi).is_some() {
            return g;
        }
    }
    unreachable!("no primitive root mod {pe}");
}

/// The character group of (ℤ/qℤ)*, with the fixed component decomposition
/// described in the module docs.
pub struct CharacterGroup {
    modulus: u64,
    components: Vec<Component>,
}

impl CharacterGroup {
    pub fn new(modulus: u64) -> CharacterGroup {
        assert!(modulus >= 1, "modulus must be positive");
        let mut components = Vec::new();
        for (p, e) in factorize(modulus) {
            if p == 2 {
                match e {
                    1 => {}
                    2 => {
                        let dlog = dlog_table(3, 4, 2).expect("3 generates (Z/4)*");
                        components.push(Component {
                            prime_power: 4,
                            order: 2,
                            dlog,
                        });
                    }
                    _ => {
                        let m = 2u64.pow(e);
                        // {±1} × <5>: look up −1 first, then the power of 5.
                        let dlog_minus = dlog_table(m - 1, m, 2).expect("-1 has order 2");
                        components.push(Component {
                            prime_power: m,
                            order: 2,
                            dlog: dlog_minus,
                        });
                        let half_order = 2u64.pow(e - 2);
                        let dlog5 = dlog_table(5, m, half_order).expect("5 has order 2^(e-2)");
                        components.push(Component {
                            prime_power: m,
                            order: half_order,
                            dlog: dlog5,
                        });
                    }
                }
            } else {
                let pe = p.pow(e);
                let phi = euler_phi_prime_power(p, e);
                let g = least_primitive_root(pe, phi);
                let dlog = dlog_table(g, pe, phi).expect("primitive root table");
                components.push(Component {
                    prime_power: pe,
                    order: phi,
                    dlog,
                });
            }
        }
        CharacterGroup {
            modulus,
            components,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// φ(q) — the number of characters.
    pub fn count(&self) -> u64 {
        self.components.iter().map(|c| c.order).product()
    }

    fn exponents_of_label(&self, label: u64) -> Vec<u64> {
        let mut exps = vec![0u64; self.components.len()];
        let mut rest = label;
        for (i, c) in self.components.iter().enumerate().rev() {
            exps[i] = rest % c.order;
            rest /= c.order;
        }
        debug_assert_eq!(rest, 0);
        exps
    }

    fn label_of_exponents(&self, exps: &[u64]) -> u64 {
        let mut label = 0u64;
        for (c, &a) in self.components.iter().zip(exps) {
            label = label * c.order + a;
        }
        label
    }

    /// The character with the given enumeration label.
    pub fn character(&self, label: u64) -> Character {
        assert!(label < self.count(), "label {label} out of range");
        let exps = self.exponents_of_label(label);
        let q = self.modulus;
        let mut values: Vec<Option<Turn>> = vec![None; q as usize];
        for n in 0..q {
            let idx = (n % q) as usize;
            if q == 1 {
                values[idx] = Some(Turn::ZERO);
                continue;
            }
            if n.gcd(&q) != 1 {
                continue;
            }
            let Some(dl) = self.split_dlogs(n) else {
                continue;
            };
            let mut t = Turn::ZERO;
            for ((c, &a), &k) in self.components.iter().zip(&exps).zip(&dl) {
                t = t + Turn::new((a % c.order) as i64, c.order as i64).scaled(k as i64);
            }
            values[idx] = Some(t);
        }
        Character {
            modulus: q,
            label,
            orders: self.components.iter().map(|c| c.order).collect(),
            exponents: exps,
            values,
        }
    }

    /// Component dlogs of n, for n coprime to q. For 2^e (e ≥ 3) the residue
    /// decomposes as (−1)^a · 5^b; the −1 table only knows {1, −1}, so b is
    /// looked up first and a recovered from the remaining sign.
    fn split_dlogs(&self, n: u64) -> Option<Vec<u64>> {
        let mut out = Vec::with_capacity(self.components.len());
        let mut i = 0;
        while i < self.components.len() {
            let c = &self.components[i];
            let m = c.prime_power;
            let two_part = i + 1 < self.components.len()
                && self.components[i + 1].prime_power == m
                && c.order == 2;
            if two_part {
                let five = &self.components[i + 1];
                let r = n % m;
                // r = (−1)^a 5^b: try a = 0 then a = 1.
                let b0 = five.dlog[r as usize];
                if b0 != NO_DLOG {
                    out.push(0);
                    out.push(b0 as u64);
                } else {
                    let neg = (m - r) % m;
                    let b1 = five.dlog[neg as usize];
                    if b1 == NO_DLOG {
                        return None;
                    }
                    out.push(1);
                    out.push(b1 as u64);
                }
                i += 2;
            } else {
                let d = c.dlog[(n % m) as usize];
                if d == NO_DLOG {
                    return None;
                }
                out.push(d as u64);
                i += 1;
            }
        }
        Some(out)
    }

    /// All φ(q) characters in label order.
    pub fn enumerate(&self) -> Vec<Character> {
        (0..self.count()).map(|l| self.character(l)).collect()
    }

    pub fn conjugate_label(&self, label: u64) -> u64 {
        let exps = self.exponents_of_label(label);
        let conj: Vec<u64> = self
            .components
            .iter()
            .zip(&exps)
            .map(|(c, &a)| if a == 0 { 0 } else { c.order - a })
            .collect();
        self.label_of_exponents(&conj)
    }
}

/// A Dirichlet character mod q with exact root-of-unity values.
#[derive(Clone, Debug, PartialEq)]
pub struct Character {
    modulus: u64,
    label: u64,
    orders: Vec<u64>,
    exponents: Vec<u64>,
    values: Vec<Option<Turn>>,
}

impl Character {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn label(&self) -> u64 {
        self.label
    }

    /// Exact value at n ≥ 1 as a turn angle; None is the zero marker
    /// (gcd(n, q) > 1).
    pub fn value_turn(&self, n: u64) -> Option<Turn> {
        assert!(n >= 1, "character argument must be >= 1");
        self.values[(n % self.modulus) as usize]
    }

    /// χ(n) as a complex number; the zero marker maps to 0.
    pub fn value(&self, n: u64) -> Complex64 {
        match self.value_turn(n) {
            Some(t) => t.to_complex(),
            None => Complex64::new(0.0, 0.0),
        }
    }

    pub fn values(&self) -> &[Option<Turn>] {
        &self.values
    }

    /// κ = 0 for even (χ(−1) = 1), κ = 1 for odd. For q ≤ 2, χ(−1) is taken
    /// to be χ(1) = 1.
    pub fn parity(&self) -> Parity {
        if self.modulus <= 2 {
            return Parity::Even;
        }
        let t = self.values[(self.modulus - 1) as usize].expect("-1 is coprime to the modulus");
        if t.is_zero() {
            Parity::Even
        } else {
            debug_assert_eq!(t, Turn::HALF, "χ(-1) must be ±1");
            Parity::Odd
        }
    }

    pub fn is_principal(&self) -> bool {
        self.exponents.iter().all(|&a| a == 0)
    }

    /// Multiplicative order of the character in the dual group.
    pub fn order(&self) -> u64 {
        self.orders
            .iter()
            .zip(&self.exponents)
            .map(|(&d, &a)| if a == 0 { 1 } else { d / d.gcd(&a) })
            .fold(1u64, |acc, o| acc.lcm(&o))
    }

    /// A character is real iff it equals its conjugate, i.e. all values ±1.
    pub fn is_real(&self) -> bool {
        self.orders
            .iter()
            .zip(&self.exponents)
            .all(|(&d, &a)| a == 0 || 2 * a == d)
    }

    /// The conjugate character (all turn angles negated); involutive.
    pub fn conjugate(&self) -> Character {
        let conj_exps: Vec<u64> = self
            .orders
            .iter()
            .zip(&self.exponents)
            .map(|(&d, &a)| if a == 0 { 0 } else { d - a })
            .collect();
        let mut label = 0u64;
        for (&d, &a) in self.orders.iter().zip(&conj_exps) {
            label = label * d + a;
        }
        Character {
            modulus: self.modulus,
            label,
            orders: self.orders.clone(),
            exponents: conj_exps,
            values: self.values.iter().map(|v| v.map(|t| -t)).collect(),
        }
    }

    /// The least f | q such that χ is induced by a character mod f, detected
    /// exactly: χ must equal 1 on every n ≡ 1 (mod f) coprime to q.
    pub fn conductor(&self) -> u64 {
        let q = self.modulus;
        let mut divisors: Vec<u64> = (1..=q).filter(|d| q.is_multiple_of(*d)).collect();
        divisors.sort_unstable();
        'next: for f in divisors {
            let mut n = 1u64;
            while n < q.max(2) {
                if !n.is_multiple_of(q) && n.gcd(&q) == 1 && n % f == 1 % f {
                    match self.values[(n % q) as usize] {
                        Some(t) if t.is_zero() => {}
                        _ => continue 'next,
                    }
                }
                n += 1;
            }
            return f;
        }
        q
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus
    }

    /// Gauss sum τ(χ) = Σ_{k=1}^{q} χ(k)·e^{2πik/q}, with each term's angle
    /// formed exactly before conversion. Requires primitivity, which
    /// guarantees |τ(χ)| = √q.
    pub fn gauss_sum(&self) -> Result<Complex64> {
        let q = self.modulus;
        let conductor = self.conductor();
        if conductor != q {
            return Err(Error::NotPrimitive {
                modulus: q,
                label: self.label,
                conductor,
            });
        }
        let mut sum = Complex64::new(0.0, 0.0);
        for k in 1..=q {
            if let Some(t) = self.values[(k % q) as usize] {
                sum += (t + Turn::new(k as i64, q as i64)).to_complex();
            }
        }
        Ok(sum)
    }
}

/// All φ(q) Dirichlet characters mod q, in the fixed enumeration order.
pub fn enumerate_characters(q: u64) -> Vec<Character> {
    CharacterGroup::new(q).enumerate()
}
