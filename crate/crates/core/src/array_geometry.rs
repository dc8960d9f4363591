//! Uniform linear array (ULA) geometry: steering vectors at half-wavelength
//! element spacing and the coherence (inner-product magnitude) between two
//! array responses.
//!
//! With elements spaced half a wavelength apart, the array response to a
//! planar wavefront arriving from angle `phi` (measured from broadside) has
//! element `k` equal to `exp(-j * pi * k * sin(phi)) / sqrt(n)`. The leading
//! `1/sqrt(n)` keeps every steering vector at unit Euclidean norm, so beam
//! gains read directly as correlations.

use nalgebra::DVector;
use num_complex::Complex64;

/// A physical angle, stored in radians.
///
/// Constructors reject non-finite input; everything downstream can then rely
/// on `sin` being well defined.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Angle {
    radians: f64,
}

impl Angle {
    /// Wraps an angle given in radians. Panics on NaN or infinite input.
    pub fn from_radians(radians: f64) -> Self {
        assert!(radians.is_finite(), "angle must be finite, got {radians}");
        Angle { radians }
    }

    /// Wraps an angle given in degrees. Panics on NaN or infinite input.
    pub fn from_degrees(degrees: f64) -> Self {
        Angle::from_radians(degrees.to_radians())
    }

    pub fn radians(self) -> f64 {
        self.radians
    }

    pub fn degrees(self) -> f64 {
        self.radians.to_degrees()
    }

    /// Sine of the angle, the quantity that actually enters array phases.
    pub fn sin(self) -> f64 {
        self.radians.sin()
    }
}

/// A unit-norm ULA response vector together with the angle it points at.
#[derive(Clone, Debug)]
pub struct SteeringVector {
    elements: DVector<Complex64>,
    angle: Angle,
}

impl SteeringVector {
    /// The complex element gains, length equal to the array size.
    pub fn elements(&self) -> &DVector<Complex64> {
        &self.elements
    }

    pub fn angle(&self) -> Angle {
        self.angle
    }

    /// Number of array elements.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Consumes the steering vector, returning the raw element vector.
    pub fn into_vector(self) -> DVector<Complex64> {
        self.elements
    }
}

/// Builds the unit-norm response of an `n`-element half-wavelength ULA to a
/// wavefront at `angle`. Panics if `n` is zero.
pub fn ula_response(angle: Angle, n: usize) -> SteeringVector {
    assert!(n >= 1, "array must have at least one element");
    let scale = 1.0 / (n as f64).sqrt();
    let s = angle.sin();
    let elements = DVector::from_fn(n, |k, _| {
        Complex64::from_polar(scale, -std::f64::consts::PI * k as f64 * s)
    });
    SteeringVector { elements, angle }
}

/// Coherence between two array responses: `|a(angle1)^H a(angle2)|`.
///
/// Equal angles give 1; for a fixed pair of distinct angles the coherence
/// decays like `1/n`, which is what makes large arrays able to separate
/// users by direction alone.
pub fn coherence(angle1: Angle, angle2: Angle, n: usize) -> f64 {
    let a1 = ula_response(angle1, n);
    let a2 = ula_response(angle2, n);
    a1.elements().dotc(a2.elements()).norm()
}
