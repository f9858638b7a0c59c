//! Fourier-side boundary data on circle components.
//!
//! A `ComponentFunction` stores the truncated Fourier series of a function
//! on one boundary circle, modes k in [-M, M] in the circle's local angle.
//! The key structure is the pointwise splitting of L^2 along the rotating
//! line field nu_in^{-1/2} R: with sigma the component sign,
//!
//! ```text
//! (P_out c)_k = (c_k + sigma conj(c_{-1-k})) / 2
//! (P_in  c)_k = (c_k - sigma conj(c_{-1-k})) / 2
//! ```
//!
//! L^2_in is the range of P_in (equivalently the kernel of P_out); it is
//! the space of admissible traces for the spinor boundary condition. The
//! pairing k <-> -1-k is taken cyclically on the stored band, so the top
//! mode k = M pairs with itself and both projections stay exactly
//! idempotent, complementary and mutually annihilating at truncation.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::cell::RefCell;

use crate::error::{Error, Result};
use crate::geometry::{CircleDomain, ComponentSign};

/// Which side of the pointwise splitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    In,
    Out,
}

/// Relative aliasing mass that triggers a warning in `to_coefficients`.
pub const ALIAS_WARN: f64 = 1e-8;
/// Relative aliasing mass that is a hard error.
pub const ALIAS_ERROR: f64 = 1e-3;

/// Truncated Fourier series on boundary component `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentFunction {
    pub j: usize,
    pub sign: ComponentSign,
    cutoff: usize,
    /// coeffs[i] is the mode k = i - cutoff; length 2*cutoff + 1.
    coeffs: Vec<Complex64>,
}

impl ComponentFunction {
    pub fn zeros(j: usize, sign: ComponentSign, cutoff: usize) -> Self {
        ComponentFunction {
            j,
            sign,
            cutoff,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * cutoff + 1],
        }
    }

    /// Builds from (mode, value) pairs; modes outside [-M, M] are rejected.
    pub fn from_modes(
        j: usize,
        sign: ComponentSign,
        cutoff: usize,
        modes: &[(i64, Complex64)],
    ) -> Result<Self> {
        let mut f = Self::zeros(j, sign, cutoff);
        for &(k, v) in modes {
            if k.unsigned_abs() as usize > cutoff {
                return Err(Error::BadInput(format!(
                    "mode {k} outside cutoff band [-{cutoff}, {cutoff}]"
                )));
            }
            *f.coeff_mut(k) = v;
        }
        Ok(f)
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    #[inline]
    pub fn coeff(&self, k: i64) -> Complex64 {
        let i = k + self.cutoff as i64;
        debug_assert!(i >= 0 && (i as usize) < self.coeffs.len());
        self.coeffs[i as usize]
    }

    #[inline]
    pub fn coeff_mut(&mut self, k: i64) -> &mut Complex64 {
        let i = (k + self.cutoff as i64) as usize;
        &mut self.coeffs[i]
    }

    /// Pairing partner of mode k under k <-> -1-k, cyclic on the stored
    /// band so that k = M is self-paired.
    #[inline]
    fn partner(&self, k: i64) -> i64 {
        let m = self.cutoff as i64;
        if k == m {
            m
        } else {
            -1 - k
        }
    }

    /// Pointwise projection onto L^2_in / L^2_out in coefficient space.
    pub fn project(&self, side: Side) -> ComponentFunction {
        let sigma = self.sign.factor();
        let s = match side {
            Side::In => -sigma,
            Side::Out => sigma,
        };
        let mut out = ComponentFunction::zeros(self.j, self.sign, self.cutoff);
        let m = self.cutoff as i64;
        for k in -m..=m {
            let v = 0.5 * (self.coeff(k) + s * self.coeff(self.partner(k)).conj());
            *out.coeff_mut(k) = v;
        }
        out
    }

    /// The conjugate-flip (J c)_k = conj(c_{-1-k}), cyclic at the top mode.
    pub fn j_flip(&self) -> ComponentFunction {
        let mut out = ComponentFunction::zeros(self.j, self.sign, self.cutoff);
        let m = self.cutoff as i64;
        for k in -m..=m {
            *out.coeff_mut(k) = self.coeff(self.partner(k)).conj();
        }
        out
    }

    /// Keeps only the nonnegative modes.
    pub fn nonnegative_part(&self) -> ComponentFunction {
        let mut out = self.clone();
        let m = self.cutoff as i64;
        for k in -m..0 {
            *out.coeff_mut(k) = Complex64::new(0.0, 0.0);
        }
        out
    }

    /// Keeps only the strictly negative modes.
    pub fn negative_part(&self) -> ComponentFunction {
        let mut out = self.clone();
        let m = self.cutoff as i64;
        for k in 0..=m {
            *out.coeff_mut(k) = Complex64::new(0.0, 0.0);
        }
        out
    }

    /// L^2 norm in the normalized angle measure: sqrt(sum |c_k|^2).
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Norm of the projection onto the complementary side; zero exactly on
    /// members of the requested space.
    pub fn membership_residual(&self, side: Side) -> f64 {
        let other = match side {
            Side::In => Side::Out,
            Side::Out => Side::In,
        };
        self.project(other).l2_norm()
    }

    /// Series value at a point u on the unit circle of the local angle,
    /// u = e^{i theta}; uses conj(u) for the negative powers so the
    /// evaluation is stable exactly on |u| = 1.
    pub fn eval_on_circle(&self, u: Complex64) -> Complex64 {
        let m = self.cutoff as i64;
        let ubar = u.conj();
        let mut pos = Complex64::new(0.0, 0.0);
        for k in (0..=m).rev() {
            pos = pos * u + self.coeff(k);
        }
        let mut neg = Complex64::new(0.0, 0.0);
        for k in (1..=m).rev() {
            neg = neg * ubar + self.coeff(-k);
        }
        pos + neg * ubar
    }

    pub fn scale(&self, alpha: f64) -> ComponentFunction {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c *= alpha;
        }
        out
    }

    /// Multiplication by a complex scalar; note this is not an operation of
    /// the real-linear solver algebra, it is used when assembling the
    /// conjugate-function transform.
    pub fn scale_complex(&self, alpha: Complex64) -> ComponentFunction {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c *= alpha;
        }
        out
    }

    pub fn add(&self, other: &ComponentFunction) -> ComponentFunction {
        assert_eq!(self.cutoff, other.cutoff, "cutoff mismatch");
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &ComponentFunction) -> ComponentFunction {
        assert_eq!(self.cutoff, other.cutoff, "cutoff mismatch");
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a -= b;
        }
        out
    }
}

/// Real inner product sum_k Re(a_k)Re(b_k) + Im(a_k)Im(b_k) over the
/// stored band (Parseval pairing for the real-linear operator algebra).
pub fn real_dot(a: &ComponentFunction, b: &ComponentFunction) -> f64 {
    assert_eq!(a.cutoff, b.cutoff, "cutoff mismatch");
    a.coeffs
        .iter()
        .zip(&b.coeffs)
        .map(|(x, y)| x.re * y.re + x.im * y.im)
        .sum()
}

/// Smallest power of two >= 4(M+1): the default uniform node count for
/// sampling a component at cutoff M.
pub fn default_node_count(cutoff: usize) -> usize {
    (4 * (cutoff + 1)).next_power_of_two()
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Forward DFT without the aliasing gate: returns the component function,
/// the discarded mass, and the total sample norm (both in the normalized
/// angle measure).
pub(crate) fn to_coefficients_raw(
    j: usize,
    sign: ComponentSign,
    samples: &[Complex64],
    cutoff: usize,
) -> Result<(ComponentFunction, f64, f64)> {
    let p = samples.len();
    let min = 2 * cutoff + 2;
    if p < min || !p.is_power_of_two() {
        return Err(Error::BadSampleCount { min, got: p });
    }
    let mut buf = samples.to_vec();
    PLANNER.with(|pl| {
        let fft = pl.borrow_mut().plan_fft_forward(p);
        fft.process(&mut buf);
    });
    let scale = 1.0 / p as f64;
    let mut f = ComponentFunction::zeros(j, sign, cutoff);
    let m = cutoff as i64;
    for k in -m..=m {
        let bin = k.rem_euclid(p as i64) as usize;
        *f.coeff_mut(k) = buf[bin] * scale;
    }
    let total_sq: f64 = buf.iter().map(|c| (c * scale).norm_sqr()).sum();
    let kept_sq: f64 = f.coeffs.iter().map(|c| c.norm_sqr()).sum();
    let aliasing = (total_sq - kept_sq).max(0.0).sqrt();
    Ok((f, aliasing, total_sq.sqrt()))
}

/// Applies the aliasing policy: mass above `ALIAS_ERROR * reference` is an
/// error, above `ALIAS_WARN * reference` a warning. The reference norm is
/// chosen by the caller (own norm for standalone conversions, full
/// boundary norm for multi-component restriction).
pub(crate) fn alias_gate(j: usize, mass: f64, reference: f64) -> Result<()> {
    if mass > ALIAS_ERROR * reference {
        return Err(Error::Aliasing {
            component: j,
            mass,
            limit: ALIAS_ERROR,
        });
    }
    if mass > ALIAS_WARN * reference {
        log::warn!(
            "component {j}: aliasing mass {mass:.3e} above {ALIAS_WARN:.1e} x norm {reference:.3e}"
        );
    }
    Ok(())
}

/// Forward DFT of uniform samples into Fourier modes, keeping |k| <= M.
/// Requires a power-of-two sample count P >= 2M + 2. Returns the component
/// function and the discarded (aliasing) mass; masses above
/// `ALIAS_ERROR * norm` are an error, above `ALIAS_WARN * norm` a warning.
pub fn to_coefficients(
    j: usize,
    sign: ComponentSign,
    samples: &[Complex64],
    cutoff: usize,
) -> Result<(ComponentFunction, f64)> {
    let (f, aliasing, norm) = to_coefficients_raw(j, sign, samples, cutoff)?;
    alias_gate(j, aliasing, norm)?;
    Ok((f, aliasing))
}

/// Boundary data for a whole domain: one component function per circle,
/// all at the same cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFunction {
    components: Vec<ComponentFunction>,
}

impl BoundaryFunction {
    pub fn zeros(domain: &CircleDomain, cutoff: usize) -> Self {
        let components = (0..domain.n_components())
            .map(|j| {
                ComponentFunction::zeros(j, domain.sign(j).expect("index in range"), cutoff)
            })
            .collect();
        BoundaryFunction { components }
    }

    pub fn from_components(components: Vec<ComponentFunction>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::BadInput("boundary function needs components".into()));
        }
        let m = components[0].cutoff;
        for (i, c) in components.iter().enumerate() {
            if c.cutoff != m {
                return Err(Error::BadInput(format!(
                    "component {i} cutoff {} differs from {m}",
                    c.cutoff
                )));
            }
            if c.j != i {
                return Err(Error::BadInput(format!(
                    "component at position {i} labeled {}",
                    c.j
                )));
            }
        }
        Ok(BoundaryFunction { components })
    }

    pub fn components(&self) -> &[ComponentFunction] {
        &self.components
    }

    pub fn component(&self, j: usize) -> &ComponentFunction {
        &self.components[j]
    }

    pub fn component_mut(&mut self, j: usize) -> &mut ComponentFunction {
        &mut self.components[j]
    }

    pub fn cutoff(&self) -> usize {
        self.components[0].cutoff
    }

    pub fn project(&self, side: Side) -> BoundaryFunction {
        BoundaryFunction {
            components: self.components.iter().map(|c| c.project(side)).collect(),
        }
    }

    /// Arc-length weighted L^2 norm over the whole boundary.
    pub fn norm(&self, domain: &CircleDomain) -> f64 {
        let mut s = 0.0;
        for (j, c) in self.components.iter().enumerate() {
            let r = domain.circle(j).map(|c| c.radius).unwrap_or(1.0);
            s += 2.0 * std::f64::consts::PI * r * c.coeffs.iter().map(|x| x.norm_sqr()).sum::<f64>();
        }
        s.sqrt()
    }

    pub fn sub(&self, other: &BoundaryFunction) -> BoundaryFunction {
        BoundaryFunction {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }
}
