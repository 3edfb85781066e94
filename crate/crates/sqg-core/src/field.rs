//! Band-limited real fields on the 2-torus, stored as Fourier series
//! coefficients, together with the `X^σ` norm family and the Fourier
//! multipliers used by the solver.
//!
//! Conventions: the torus is `[0,2π]²`, a field is
//! `θ(x) = Σ_{k≠0, |k|_∞ ≤ N} a_k e^{ik·x}` with `a_{-k} = conj(a_k)`
//! (real field) and `a_0 = 0` (zero mean). `|k|` in every norm and
//! multiplier is the Euclidean modulus; `|k|_∞` only bounds storage.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

/// A lattice wavevector. Ordered lexicographically, which fixes the
/// reduction order of every coefficient sum in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Wave(pub i64, pub i64);

impl Wave {
    /// Euclidean modulus |k|.
    pub fn modulus(self) -> f64 {
        libm::sqrt((self.0 * self.0 + self.1 * self.1) as f64)
    }

    /// Sup modulus |k|_∞.
    pub fn sup_modulus(self) -> i64 {
        self.0.abs().max(self.1.abs())
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0 && self.1 == 0
    }

    /// True on the canonical half-lattice: k₁>0, or k₁=0 and k₂>0.
    /// Exactly one of k, -k is canonical for k ≠ 0.
    pub fn is_canonical(self) -> bool {
        self.0 > 0 || (self.0 == 0 && self.1 > 0)
    }

    pub fn neg(self) -> Wave {
        Wave(-self.0, -self.1)
    }
}

impl fmt::Display for Wave {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.0, self.1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FieldError {
    /// The zero mode was supplied explicitly; fields are mean-zero.
    ZeroModeSupplied,
    /// A mode outside the truncation band |k|_∞ ≤ N.
    OutOfBand { k: Wave, n: u32 },
    /// Both (k,c) and (-k,d) supplied with d ≠ conj(c).
    SymmetryConflict { k: Wave },
    /// A multiplier symbol violating m(-k) = conj(m(k)).
    SymmetryBreaking { k: Wave },
    NegativeTime,
    /// Gevrey weight would overflow binary64 (rate·t·√2·N > 700).
    OverflowGuard,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::ZeroModeSupplied => write!(f, "zero mode supplied to a mean-zero field"),
            FieldError::OutOfBand { k, n } => write!(f, "mode {k} outside band |k|_inf <= {n}"),
            FieldError::SymmetryConflict { k } => {
                write!(f, "conflicting coefficients for modes +-{k}")
            }
            FieldError::SymmetryBreaking { k } => {
                write!(f, "multiplier violates the reality condition at {k}")
            }
            FieldError::NegativeTime => write!(f, "negative time"),
            FieldError::OverflowGuard => write!(f, "Gevrey weight exceeds the floating range"),
        }
    }
}

/// Values of the norms tracked along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormReport {
    /// ‖·‖_{X^{-1}}
    pub x_minus1: f64,
    /// ‖·‖_{X^{-1/2}}
    pub x_minus_half: f64,
    /// ‖·‖_{X^0} = Σ|a_k|
    pub x0: f64,
    /// ‖·‖_{X^1}
    pub x1: f64,
    /// 2π·sqrt(Σ|a_k|²) (Parseval)
    pub l2: f64,
    /// X^0 norm of e^{(t/2)|D|}·, the analyticity diagnostic.
    pub gevrey_half: f64,
}

/// Mean-zero, Hermitian-symmetric Fourier coefficient table on the
/// truncated lattice |k|_∞ ≤ N. Represents a real scalar field.
///
/// Immutable after construction; every operation returns a new field.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    n: u32,
    coeffs: BTreeMap<Wave, Complex64>,
}

impl SpectralField {
    /// The zero field at truncation radius `n`.
    pub fn zero(n: u32) -> Self {
        SpectralField {
            n,
            coeffs: BTreeMap::new(),
        }
    }

    /// Builds a field from explicit mode entries, applying Hermitian
    /// closure: each supplied (k, c) also sets (-k, conj(c)).
    pub fn from_modes(n: u32, entries: &[(Wave, Complex64)]) -> Result<Self, FieldError> {
        let mut coeffs: BTreeMap<Wave, Complex64> = BTreeMap::new();
        for &(k, c) in entries {
            if k.is_zero() {
                return Err(FieldError::ZeroModeSupplied);
            }
            if k.sup_modulus() > n as i64 {
                return Err(FieldError::OutOfBand { k, n });
            }
            for (kk, cc) in [(k, c), (k.neg(), c.conj())] {
                match coeffs.get(&kk) {
                    Some(&prev) if prev != cc => {
                        return Err(FieldError::SymmetryConflict { k: kk })
                    }
                    _ => {
                        coeffs.insert(kk, cc);
                    }
                }
            }
        }
        coeffs.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Ok(SpectralField { n, coeffs })
    }

    /// Internal constructor for maps already known to be Hermitian and
    /// mean-zero; validated in debug builds.
    pub(crate) fn from_map(n: u32, coeffs: BTreeMap<Wave, Complex64>) -> Self {
        let f = SpectralField { n, coeffs };
        debug_assert!(f.validate().is_ok());
        f
    }

    /// Truncation radius N.
    pub fn radius(&self) -> u32 {
        self.n
    }

    pub fn mode_count(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, k: Wave) -> Complex64 {
        self.coeffs.get(&k).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Stored (nonzero) modes in lexicographic order.
    pub fn modes(&self) -> impl Iterator<Item = (Wave, Complex64)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    /// Stored modes on the canonical half-lattice, lexicographically
    /// sorted. The mirror halves are implied by conjugation.
    pub fn canonical_modes(&self) -> impl Iterator<Item = (Wave, Complex64)> + '_ {
        self.coeffs
            .iter()
            .filter(|(k, _)| k.is_canonical())
            .map(|(&k, &c)| (k, c))
    }

    /// Checks the structural invariants: no zero mode, band bound, and
    /// a_{-k} = conj(a_k) exactly.
    pub fn validate(&self) -> Result<(), FieldError> {
        for (&k, &c) in &self.coeffs {
            if k.is_zero() {
                return Err(FieldError::ZeroModeSupplied);
            }
            if k.sup_modulus() > self.n as i64 {
                return Err(FieldError::OutOfBand { k, n: self.n });
            }
            if self.coeff(k.neg()) != c.conj() {
                return Err(FieldError::SymmetryConflict { k });
            }
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .values()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// ‖f‖_{X^σ} = Σ_{k≠0} |k|^σ |a_k|. Negative σ is fine: the lattice
    /// excludes k = 0 and |k| ≥ 1.
    pub fn x_norm(&self, sigma: f64) -> f64 {
        let mut sum = 0.0;
        for (&k, &c) in &self.coeffs {
            let w = if sigma == 0.0 {
                1.0
            } else if sigma == 1.0 {
                k.modulus()
            } else {
                libm::pow(k.modulus(), sigma)
            };
            sum += w * c.norm();
        }
        sum
    }

    /// ‖f‖_{L²(𝕋²)} = 2π·sqrt(Σ|a_k|²) by Parseval on [0,2π]².
    pub fn l2_norm(&self) -> f64 {
        let mut sum = 0.0;
        for c in self.coeffs.values() {
            sum += c.norm_sqr();
        }
        2.0 * core::f64::consts::PI * libm::sqrt(sum)
    }

    /// All tracked norms at trajectory time `t` (the Gevrey entry uses
    /// rate 1/2 at that time).
    pub fn norm_report(&self, t: f64) -> Result<NormReport, FieldError> {
        Ok(NormReport {
            x_minus1: self.x_norm(-1.0),
            x_minus_half: self.x_norm(-0.5),
            x0: self.x_norm(0.0),
            x1: self.x_norm(1.0),
            l2: self.l2_norm(),
            gevrey_half: self.gevrey(0.5, t)?.x_norm(0.0),
        })
    }

    /// Applies a Fourier multiplier a_k ↦ m(k)·a_k. The symbol must
    /// satisfy m(-k) = conj(m(k)) or the result would not be real.
    pub fn multiplier_apply<M>(&self, m: M) -> Result<Self, FieldError>
    where
        M: Fn(Wave) -> Complex64,
    {
        let mut coeffs = BTreeMap::new();
        for (&k, &c) in &self.coeffs {
            let mk = m(k);
            if mk != m(k.neg()).conj() {
                return Err(FieldError::SymmetryBreaking { k });
            }
            let v = mk * c;
            if v != Complex64::new(0.0, 0.0) {
                coeffs.insert(k, v);
            }
        }
        Ok(SpectralField { n: self.n, coeffs })
    }

    /// Dissipative semigroup e^{-κt|D|}: a_k ↦ e^{-κt|k|} a_k.
    pub fn semigroup(&self, t: f64, kappa: f64) -> Result<Self, FieldError> {
        if t < 0.0 {
            return Err(FieldError::NegativeTime);
        }
        self.multiplier_apply(|k| Complex64::new(libm::exp(-kappa * t * k.modulus()), 0.0))
    }

    /// Gevrey weight e^{rate·t|D|}: a_k ↦ e^{rate·t·|k|} a_k.
    /// Guarded so the largest weight stays within binary64.
    pub fn gevrey(&self, rate: f64, t: f64) -> Result<Self, FieldError> {
        if t < 0.0 {
            return Err(FieldError::NegativeTime);
        }
        if rate * t * core::f64::consts::SQRT_2 * self.n as f64 > 700.0 {
            return Err(FieldError::OverflowGuard);
        }
        self.multiplier_apply(|k| Complex64::new(libm::exp(rate * t * k.modulus()), 0.0))
    }

    /// Fractional Laplacian |D|^s: a_k ↦ |k|^s a_k.
    pub fn fractional_laplacian(&self, s: f64) -> Self {
        self.multiplier_apply(|k| Complex64::new(libm::pow(k.modulus(), s), 0.0))
            .expect("real symbol")
    }

    pub fn add(&self, other: &SpectralField) -> SpectralField {
        let mut coeffs = self.coeffs.clone();
        for (&k, &c) in &other.coeffs {
            let v = coeffs.get(&k).copied().unwrap_or(Complex64::new(0.0, 0.0)) + c;
            if v == Complex64::new(0.0, 0.0) {
                coeffs.remove(&k);
            } else {
                coeffs.insert(k, v);
            }
        }
        SpectralField {
            n: self.n.max(other.n),
            coeffs,
        }
    }

    pub fn sub(&self, other: &SpectralField) -> SpectralField {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> SpectralField {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&k, &c)| (k, c * s))
            .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
            .collect();
        SpectralField { n: self.n, coeffs }
    }
}

/// A pair of real fields; produced by the Riesz velocity u_θ = R^⊥θ.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub u1: SpectralField,
    pub u2: SpectralField,
}

impl VectorField {
    /// Max over modes of |k₁û₁(k) + k₂û₂(k)|; zero for divergence-free
    /// fields.
    pub fn divergence_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (k, c1) in self.u1.modes() {
            let d = (Complex64::new(k.0 as f64, 0.0) * c1
                + Complex64::new(k.1 as f64, 0.0) * self.u2.coeff(k))
            .norm();
            worst = worst.max(d);
        }
        for (k, c2) in self.u2.modes() {
            if self.u1.coeff(k) == Complex64::new(0.0, 0.0) {
                let d = (Complex64::new(k.1 as f64, 0.0) * c2).norm();
                worst = worst.max(d);
            }
        }
        worst
    }
}

/// Sup over modes of |a_k - b_k| (both fields' supports).
pub fn sup_coeff_distance(a: &SpectralField, b: &SpectralField) -> f64 {
    let mut worst = 0.0f64;
    for (k, c) in a.modes() {
        worst = worst.max((c - b.coeff(k)).norm());
    }
    for (k, c) in b.modes() {
        worst = worst.max((c - a.coeff(k)).norm());
    }
    worst
}

/// Physical-space samples of the field on a uniform `m × m` grid over
/// `[0,2π]²`, by direct series summation. Quadrature oracle for tests;
/// O(m²·modes).
pub fn sample_physical(f: &SpectralField, m: usize) -> Vec<f64> {
    let step = 2.0 * core::f64::consts::PI / m as f64;
    let mut out = Vec::with_capacity(m * m);
    for iy in 0..m {
        for ix in 0..m {
            let (x, y) = (ix as f64 * step, iy as f64 * step);
            let mut v = Complex64::new(0.0, 0.0);
            for (k, c) in f.modes() {
                let phase = k.0 as f64 * x + k.1 as f64 * y;
                v += c * Complex64::new(libm::cos(phase), libm::sin(phase));
            }
            out.push(v.re);
        }
    }
    out
}
