//! The quadratic SQG nonlinearity u_θ·∇θ = div(θ u_θ) in coefficient
//! space.
//!
//! Products of two N-band fields live exactly on the 2N band, so the
//! convolution is computed there and only then Galerkin-truncated back
//! to radius N. Two routes are provided: a brute-force direct sum
//! (the oracle, O(N⁴)) and a zero-padded FFT circular convolution on a
//! grid of size ≥ 4N+1, which is alias-free and therefore identical to
//! the direct sum up to roundoff.

use alloc::collections::BTreeMap;
use core::fmt;

use num_complex::Complex64;

use crate::fft::{transform_2d, FftPlan};
use crate::field::{SpectralField, VectorField, Wave};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonlinearError {
    /// Convolution operands must share the truncation radius.
    RadiusMismatch { left: u32, right: u32 },
    /// Target radius exceeds the working radius.
    BadTruncation { from: u32, to: u32 },
}

impl fmt::Display for NonlinearError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NonlinearError::RadiusMismatch { left, right } => {
                write!(f, "operand radii differ: {left} vs {right}")
            }
            NonlinearError::BadTruncation { from, to } => {
                write!(f, "cannot truncate radius {from} up to {to}")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvolutionMethod {
    Direct,
    Fast,
}

/// How to realize the exact product band: input radius `n`, working
/// radius `m ≥ 2n` (the product of two n-band fields fits there), and
/// the evaluation route.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvolutionPlan {
    pub n: u32,
    pub m: u32,
    pub method: ConvolutionMethod,
}

impl ConvolutionPlan {
    pub fn new(n: u32, method: ConvolutionMethod) -> Self {
        ConvolutionPlan { n, m: 2 * n, method }
    }

    pub fn convolve(
        &self,
        f: &SpectralField,
        g: &SpectralField,
    ) -> Result<ProductField, NonlinearError> {
        assert!(self.m >= 2 * self.n, "working radius must cover the product band");
        match self.method {
            ConvolutionMethod::Direct => convolve_direct(f, g),
            ConvolutionMethod::Fast => convolve_fast(f, g),
        }
    }
}

/// Raw product coefficients on the 2N band. Unlike [`SpectralField`]
/// this may carry a zero mode; it is dropped only by [`ProductField::truncate`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProductField {
    n: u32,
    coeffs: BTreeMap<Wave, Complex64>,
}

impl ProductField {
    /// Working radius (2N for a product of N-band fields).
    pub fn radius(&self) -> u32 {
        self.n
    }

    pub fn coeff(&self, k: Wave) -> Complex64 {
        self.coeffs.get(&k).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn zero_mode(&self) -> Complex64 {
        self.coeff(Wave(0, 0))
    }

    pub fn modes(&self) -> impl Iterator<Item = (Wave, Complex64)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    /// Σ_{k≠0} |k|^σ |c_k|; the zero mode never contributes.
    pub fn x_norm(&self, sigma: f64) -> f64 {
        let mut sum = 0.0;
        for (&k, &c) in &self.coeffs {
            if k.is_zero() {
                continue;
            }
            sum += libm::pow(k.modulus(), sigma) * c.norm();
        }
        sum
    }

    /// Applies a multiplier; mainly for the divergence symbol ik_j.
    pub fn multiplier_apply<M>(&self, m: M) -> ProductField
    where
        M: Fn(Wave) -> Complex64,
    {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&k, &c)| (k, m(k) * c))
            .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
            .collect();
        ProductField { n: self.n, coeffs }
    }

    pub fn add(&self, other: &ProductField) -> ProductField {
        let mut coeffs = self.coeffs.clone();
        for (&k, &c) in &other.coeffs {
            let v = coeffs.get(&k).copied().unwrap_or(Complex64::new(0.0, 0.0)) + c;
            if v == Complex64::new(0.0, 0.0) {
                coeffs.remove(&k);
            } else {
                coeffs.insert(k, v);
            }
        }
        ProductField {
            n: self.n.max(other.n),
            coeffs,
        }
    }

    /// Galerkin projection: keeps |k|_∞ ≤ target and drops the zero
    /// mode. X-norms never increase.
    pub fn truncate(&self, target: u32) -> Result<SpectralField, NonlinearError> {
        if target > self.n {
            return Err(NonlinearError::BadTruncation {
                from: self.n,
                to: target,
            });
        }
        let coeffs: BTreeMap<Wave, Complex64> = self
            .coeffs
            .iter()
            .filter(|(k, _)| !k.is_zero() && k.sup_modulus() <= target as i64)
            .map(|(&k, &c)| (k, c))
            .collect();
        Ok(SpectralField::from_map(target, coeffs))
    }

    /// The mean-zero part as a field at the full working radius.
    pub fn into_field(&self) -> SpectralField {
        self.truncate(self.n).expect("radius preserved")
    }
}

/// Riesz-transform velocity u_θ = R^⊥θ:
/// û₁(k) = i(k₂/|k|)θ̂(k), û₂(k) = -i(k₁/|k|)θ̂(k).
/// Divergence-free and |û(k)| = |θ̂(k)| componentwise in the Euclidean
/// sense. The symbol is never evaluated at k = 0 (mean-zero input).
pub fn riesz_velocity(theta: &SpectralField) -> VectorField {
    let u1 = theta
        .multiplier_apply(|k| Complex64::new(0.0, k.1 as f64 / k.modulus()))
        .expect("Riesz symbol is odd-imaginary");
    let u2 = theta
        .multiplier_apply(|k| Complex64::new(0.0, -k.0 as f64 / k.modulus()))
        .expect("Riesz symbol is odd-imaginary");
    VectorField { u1, u2 }
}

/// Exact discrete convolution c_k = Σ_{m+n=k} a_m b_n over the stored
/// bands. O(modes²); the test-suite oracle.
pub fn convolve_direct(
    f: &SpectralField,
    g: &SpectralField,
) -> Result<ProductField, NonlinearError> {
    check_radii(f, g)?;
    let out_radius = 2 * f.radius();
    let mut coeffs: BTreeMap<Wave, Complex64> = BTreeMap::new();
    for (km, a) in f.modes() {
        for (kn, b) in g.modes() {
            let k = Wave(km.0 + kn.0, km.1 + kn.1);
            *coeffs.entry(k).or_insert(Complex64::new(0.0, 0.0)) += a * b;
        }
    }
    Ok(ProductField {
        n: out_radius,
        coeffs: symmetrized(coeffs),
    })
}

/// Padded-FFT convolution. The grid is the next power of two ≥ 4N+1,
/// so the circular convolution has no wraparound on the 2N band and
/// matches [`convolve_direct`] to roundoff.
pub fn convolve_fast(
    f: &SpectralField,
    g: &SpectralField,
) -> Result<ProductField, NonlinearError> {
    check_radii(f, g)?;
    let need = 4 * f.radius() as usize + 1;
    let grid = need.next_power_of_two();
    convolve_fft(f, g, grid)
}

fn check_radii(f: &SpectralField, g: &SpectralField) -> Result<(), NonlinearError> {
    if f.radius() != g.radius() {
        return Err(NonlinearError::RadiusMismatch {
            left: f.radius(),
            right: g.radius(),
        });
    }
    Ok(())
}

/// Restores exact Hermitian symmetry destroyed by floating-point
/// summation order: each canonical pair is averaged with its mirror's
/// conjugate and the zero mode is projected onto the reals. The
/// adjustment is at roundoff scale for symmetric exact values.
fn symmetrized(raw: BTreeMap<Wave, Complex64>) -> BTreeMap<Wave, Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    let mut out = BTreeMap::new();
    for &k in raw.keys() {
        let kc = if k.is_canonical() { k } else { k.neg() };
        if kc.is_zero() {
            let v = Complex64::new(raw[&k].re, 0.0);
            if v != zero {
                out.insert(k, v);
            }
            continue;
        }
        if out.contains_key(&kc) {
            continue;
        }
        let v = 0.5
            * (raw.get(&kc).copied().unwrap_or(zero)
                + raw.get(&kc.neg()).copied().unwrap_or(zero).conj());
        if v != zero {
            out.insert(kc, v);
            out.insert(kc.neg(), v.conj());
        }
    }
    out
}

fn grid_index(k: Wave, grid: usize) -> usize {
    let g = grid as i64;
    let x = k.0.rem_euclid(g) as usize;
    let y = k.1.rem_euclid(g) as usize;
    y * grid + x
}

fn convolve_fft(
    f: &SpectralField,
    g: &SpectralField,
    grid: usize,
) -> Result<ProductField, NonlinearError> {
    let plan = FftPlan::new(grid);
    let mut a = alloc::vec![Complex64::new(0.0, 0.0); grid * grid];
    let mut b = alloc::vec![Complex64::new(0.0, 0.0); grid * grid];
    for (k, c) in f.modes() {
        a[grid_index(k, grid)] = c;
    }
    for (k, c) in g.modes() {
        b[grid_index(k, grid)] = c;
    }
    transform_2d(&plan, &mut a, false);
    transform_2d(&plan, &mut b, false);
    for (av, bv) in a.iter_mut().zip(&b) {
        *av *= bv;
    }
    transform_2d(&plan, &mut a, true);
    let scale = 1.0 / (grid * grid) as f64;
    let out_radius = 2 * f.radius() as i64;
    let mut coeffs = BTreeMap::new();
    for ky in -out_radius..=out_radius {
        for kx in -out_radius..=out_radius {
            let k = Wave(kx, ky);
            let c = a[grid_index(k, grid)] * scale;
            if c != Complex64::new(0.0, 0.0) {
                coeffs.insert(k, c);
            }
        }
    }
    Ok(ProductField {
        n: 2 * f.radius(),
        coeffs: symmetrized(coeffs),
    })
}

/// Circular convolution with an explicit period, by direct summation:
/// c_k = Σ a_m b_n over m+n ≡ k (mod period). Exposed so tests can
/// show that any period ≥ 4N+1 is alias-free.
pub fn convolve_circular(
    f: &SpectralField,
    g: &SpectralField,
    period: i64,
) -> Result<ProductField, NonlinearError> {
    check_radii(f, g)?;
    let out_radius = 2 * f.radius() as i64;
    let wrap = |x: i64| -> i64 {
        // representative of x mod period inside [-period/2, period/2)
        let r = x.rem_euclid(period);
        if r > period / 2 {
            r - period
        } else {
            r
        }
    };
    let mut coeffs: BTreeMap<Wave, Complex64> = BTreeMap::new();
    for (km, a) in f.modes() {
        for (kn, b) in g.modes() {
            let k = Wave(wrap(km.0 + kn.0), wrap(km.1 + kn.1));
            if k.0.abs() <= out_radius && k.1.abs() <= out_radius {
                *coeffs.entry(k).or_insert(Complex64::new(0.0, 0.0)) += a * b;
            }
        }
    }
    Ok(ProductField {
        n: 2 * f.radius(),
        coeffs: symmetrized(coeffs),
    })
}

/// div(θ u_θ) evaluated on the exact 2N product band, plus its
/// Galerkin truncation to radius N and the X⁰ mass dropped by that
/// projection (reported per step by the solver).
#[derive(Debug, Clone)]
pub struct TransportTerm {
    /// The divergence on the full 2N band (mean-zero by construction).
    pub extended: SpectralField,
    /// Galerkin truncation back to radius N.
    pub truncated: SpectralField,
    /// X⁰ mass of the dropped band.
    pub dropped_mass: f64,
}

/// Computes u_θ·∇θ = div(θ u_θ) = ik₁(θu₁)^ + ik₂(θu₂)^.
pub fn transport_term_full(theta: &SpectralField, method: ConvolutionMethod) -> TransportTerm {
    let plan = ConvolutionPlan::new(theta.radius(), method);
    let u = riesz_velocity(theta);
    let p1 = plan.convolve(theta, &u.u1).expect("same radius");
    let p2 = plan.convolve(theta, &u.u2).expect("same radius");
    let d1 = p1.multiplier_apply(|k| Complex64::new(0.0, k.0 as f64));
    let d2 = p2.multiplier_apply(|k| Complex64::new(0.0, k.1 as f64));
    let div = d1.add(&d2);
    // the divergence symbol kills the mean exactly
    debug_assert!(div.zero_mode().norm() == 0.0);
    let extended = div.into_field();
    let truncated = div.truncate(theta.radius()).expect("2N >= N");
    let dropped_mass = extended.x_norm(0.0) - truncated.x_norm(0.0);
    TransportTerm {
        extended,
        truncated,
        dropped_mass,
    }
}

/// The transport term truncated to the input band (fast path).
pub fn transport_term(theta: &SpectralField) -> SpectralField {
    transport_term_full(theta, ConvolutionMethod::Fast).truncated
}
