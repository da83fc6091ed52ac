//! Points of the Riemann sphere in homogeneous coordinates, the Moebius
//! action on five-point configurations and the cross-ratio coordinates
//! `R_k` on the space of such configurations.

use std::ops::Index;

use num_complex::Complex64;

use crate::{Error, Result, Z5, Z5_ALL};

/// Relative threshold for projective coincidence of normalized points.
pub const PROJECTIVE_TOL: f64 = 1e-12;

/// A point `[z0 : z1]` of the sphere, standing for `z0 / z1`.
///
/// Stored normalized so that `max(|z0|, |z1|) = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint {
    z0: Complex64,
    z1: Complex64,
}

impl SpherePoint {
    pub fn new(z0: Complex64, z1: Complex64) -> Result<Self> {
        let scale = z0.norm().max(z1.norm());
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::DegenerateConfiguration(format!(
                "homogeneous pair ({z0}, {z1}) is not a point of the sphere"
            )));
        }
        Ok(Self {
            z0: z0 / scale,
            z1: z1 / scale,
        })
    }

    pub fn finite(z: Complex64) -> Self {
        Self::new(z, Complex64::new(1.0, 0.0)).expect("finite affine point")
    }

    pub fn infinity() -> Self {
        Self {
            z0: Complex64::new(1.0, 0.0),
            z1: Complex64::new(0.0, 0.0),
        }
    }

    pub fn components(&self) -> (Complex64, Complex64) {
        (self.z0, self.z1)
    }

    /// Affine value, `None` at infinity.
    pub fn value(&self) -> Option<Complex64> {
        if self.z1 == Complex64::new(0.0, 0.0) {
            None
        } else {
            Some(self.z0 / self.z1)
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.z1.norm() <= PROJECTIVE_TOL
    }

    pub fn projectively_eq(&self, other: &SpherePoint) -> bool {
        det(self, other).norm() <= PROJECTIVE_TOL
    }
}

/// `d(p, q) = p0 q1 - p1 q0`; vanishes iff the points coincide.
pub fn det(p: &SpherePoint, q: &SpherePoint) -> Complex64 {
    p.z0 * q.z1 - p.z1 * q.z0
}

/// Five sphere points indexed by `Z_5`, with consecutive points distinct.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonodromyPoint {
    points: [SpherePoint; 5],
}

impl MonodromyPoint {
    /// `points` is laid out as `[z_-2, z_-1, z_0, z_1, z_2]`.
    pub fn new(points: [SpherePoint; 5]) -> Result<Self> {
        let m = Self { points };
        for k in Z5_ALL {
            if m[k].projectively_eq(&m[k + 1]) {
                return Err(Error::AdjacencyViolation {
                    k: k.value(),
                    next: (k + 1).value(),
                });
            }
        }
        Ok(m)
    }

    pub fn from_values(values: [Complex64; 5]) -> Result<Self> {
        Self::new(values.map(SpherePoint::finite))
    }

    pub fn points(&self) -> &[SpherePoint; 5] {
        &self.points
    }
}

impl Index<Z5> for MonodromyPoint {
    type Output = SpherePoint;
    fn index(&self, k: Z5) -> &SpherePoint {
        &self.points[k.index()]
    }
}

/// Element of PSL(2, C), stored with unit determinant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusTransform {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

impl MoebiusTransform {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * c;
        let scale = a.norm().max(b.norm()).max(c.norm()).max(d.norm());
        if !(det.norm() > 1e-14 * scale * scale) {
            return Err(Error::DegenerateConfiguration(
                "Moebius matrix is singular".into(),
            ));
        }
        let s = det.sqrt();
        Ok(Self {
            a: a / s,
            b: b / s,
            c: c / s,
            d: d / s,
        })
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self {
            a: one,
            b: zero,
            c: zero,
            d: one,
        }
    }

    pub fn determinant(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply_point(&self, p: &SpherePoint) -> SpherePoint {
        let (z0, z1) = p.components();
        SpherePoint::new(self.a * z0 + self.b * z1, self.c * z0 + self.d * z1)
            .expect("invertible matrix maps a point to a point")
    }
}

/// The five values `R_k`, laid out like [`MonodromyPoint`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossRatioSet(pub [Complex64; 5]);

impl CrossRatioSet {
    pub fn get(&self, k: Z5) -> Complex64 {
        self.0[k.index()]
    }

    /// `max_k |R_{k-2} R_{k+2} - (1 - R_k)|`.
    pub fn quadratic_residual(&self) -> f64 {
        Z5_ALL
            .iter()
            .map(|&k| (self.get(k - 2) * self.get(k + 2) - (1.0 - self.get(k))).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<Z5> for CrossRatioSet {
    type Output = Complex64;
    fn index(&self, k: Z5) -> &Complex64 {
        &self.0[k.index()]
    }
}

/// `(p, q; r, s) = (p - r)(q - s) / ((p - s)(q - r))`, evaluated as a ratio
/// of determinants so that points at infinity need no special casing.
pub fn cross_ratio(
    p: &SpherePoint,
    q: &SpherePoint,
    r: &SpherePoint,
    s: &SpherePoint,
) -> Result<Complex64> {
    let den = det(p, s) * det(q, r);
    if den.norm() <= PROJECTIVE_TOL * PROJECTIVE_TOL {
        return Err(Error::DegenerateConfiguration(
            "cross ratio denominator vanishes".into(),
        ));
    }
    Ok(det(p, r) * det(q, s) / den)
}

/// `R_k = (z_{k+1}, z_{k-2}; z_{k-1}, z_{k+2})` for every `k`.
pub fn r_functions(m: &MonodromyPoint) -> Result<CrossRatioSet> {
    let mut out = [Complex64::new(0.0, 0.0); 5];
    for k in Z5_ALL {
        out[k.index()] = cross_ratio(&m[k + 1], &m[k - 2], &m[k - 1], &m[k + 2])?;
    }
    Ok(CrossRatioSet(out))
}

pub fn moebius_apply(t: &MoebiusTransform, m: &MonodromyPoint) -> MonodromyPoint {
    // Adjacency survives: d(Tp, Tq) = det(T) d(p, q) up to normalization.
    MonodromyPoint {
        points: m.points.map(|p| t.apply_point(&p)),
    }
}
