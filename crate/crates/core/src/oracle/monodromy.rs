use std::ops::Index;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{integrate_ray, omega_pow, CubicPotential, RaySolution, RaySpec, ScaledSolutionValue};
use crate::geometry::{r_functions, MonodromyPoint, SpherePoint};
use crate::{Error, Result, Z5, Z5_ALL};

/// Residual above which a Stokes set is rejected as an integration failure.
pub const RELATION_GUARD: f64 = 1e-6;

/// The five Stokes multipliers `sigma_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StokesSet(pub [Complex64; 5]);

impl StokesSet {
    pub fn get(&self, k: Z5) -> Complex64 {
        self.0[k.index()]
    }

    /// `max_k |-i sigma_{k+3} - 1 - sigma_k sigma_{k+1}|`.
    pub fn relation_residual(&self) -> f64 {
        let i = Complex64::new(0.0, 1.0);
        Z5_ALL
            .iter()
            .map(|&k| (-i * self.get(k + 3) - 1.0 - self.get(k) * self.get(k + 1)).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<Z5> for StokesSet {
    type Output = Complex64;
    fn index(&self, k: Z5) -> &Complex64 {
        &self.0[k.index()]
    }
}

fn wronskian(f: &ScaledSolutionValue, g: &ScaledSolutionValue) -> Complex64 {
    f.y * g.dy - f.dy * g.y
}

/// `sigma_k` from the three rays `k-1, k, k+1`:
/// `W(y_{k-1}, y_{k+1}) / W(y_k, y_{k+1})`. The scale factors of `y_{k+1}`
/// cancel, those of `y_{k-1}` and `y_k` do not.
///
/// Indices are lifted to Z with `y_{k+5} = -i y_k` (the monodromy of the
/// normalization factor around infinity), so for `k = -2` the left
/// neighbour is `y_{-3} = i y_2`. For `k = 2` the factor cancels.
fn sigma_from(k: Z5, prev: &ScaledSolutionValue, cur: &ScaledSolutionValue, next: &ScaledSolutionValue) -> Complex64 {
    let lift = if k.value() == -2 {
        Complex64::new(0.0, 1.0)
    } else {
        Complex64::new(1.0, 0.0)
    };
    lift * (prev.log_scale - cur.log_scale).exp() * wronskian(prev, next) / wronskian(cur, next)
}

/// The five subdominant solutions at `lambda = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Monodromy {
    pub potential: CubicPotential,
    pub rays: [RaySolution; 5],
}

impl Monodromy {
    pub fn compute(pot: &CubicPotential, template: &RaySpec) -> Result<Self> {
        template.validate()?;
        let rays: Vec<RaySolution> = Z5_ALL
            .par_iter()
            .map(|&k| integrate_ray(&template.on_ray(k), pot))
            .collect::<Result<_>>()?;
        Ok(Self {
            potential: *pot,
            rays: rays.try_into().expect("five rays"),
        })
    }

    fn ray(&self, k: Z5) -> &ScaledSolutionValue {
        &self.rays[k.index()].value
    }

    pub fn stokes(&self) -> StokesSet {
        StokesSet(Z5_ALL.map(|k| sigma_from(k, self.ray(k - 1), self.ray(k), self.ray(k + 1))))
    }

    /// Asymptotic values of the basis `(y_0, y_1)`:
    /// `w_k = [W(y_k, y_0) : W(y_k, y_1)]`, up to a common factor.
    pub fn asymptotic_values(&self) -> Result<MonodromyPoint> {
        let y0 = self.ray(Z5::new(0));
        let y1 = self.ray(Z5::new(1));
        let rel = (y0.log_scale - y1.log_scale).exp();
        let mut pts = [SpherePoint::infinity(); 5];
        for k in Z5_ALL {
            let yk = self.ray(k);
            pts[k.index()] = SpherePoint::new(wronskian(yk, y0) * rel, wronskian(yk, y1))?;
        }
        MonodromyPoint::new(pts)
    }

    pub fn max_error_estimate(&self) -> f64 {
        self.rays.iter().map(|r| r.error_estimate).fold(0.0, f64::max)
    }
}

/// Stokes multipliers of `pot`; rejects results whose quadratic relation
/// residual exceeds [`RELATION_GUARD`].
pub fn stokes_multipliers(pot: &CubicPotential, template: &RaySpec) -> Result<StokesSet> {
    let s = Monodromy::compute(pot, template)?.stokes();
    let residual = s.relation_residual();
    if !(residual <= RELATION_GUARD) {
        return Err(Error::RelationViolation { residual });
    }
    Ok(s)
}

pub fn asymptotic_values(pot: &CubicPotential, template: &RaySpec) -> Result<MonodromyPoint> {
    Monodromy::compute(pot, template)?.asymptotic_values()
}

/// A single multiplier `sigma_k`, integrating only the three rays it needs.
pub fn sigma(pot: &CubicPotential, k: Z5, template: &RaySpec) -> Result<Complex64> {
    template.validate()?;
    let vals: Vec<RaySolution> = [k - 1, k, k + 1]
        .par_iter()
        .map(|&j| integrate_ray(&template.on_ray(j), pot))
        .collect::<Result<_>>()?;
    Ok(sigma_from(k, &vals[0].value, &vals[1].value, &vals[2].value))
}

/// `Y_k(theta) = -R_0(omega^{-k} a, e^{6 theta / 5}) = i sigma_0(...)`.
pub fn y_oracle(k: Z5, a: Complex64, theta: Complex64, template: &RaySpec) -> Result<Complex64> {
    let pot = CubicPotential::new(a * omega_pow(-k.value()), (1.2 * theta).exp());
    Ok(Complex64::new(0.0, 1.0) * sigma(&pot, Z5::new(0), template)?)
}

/// Residuals of the rotation symmetry `R_k(w^{-1} a, w b) = R_{k-2}(a, b)`
/// and of the functional equation
/// `R_k(w^{-1} a, w b) R_k(w a, w^{-1} b) = 1 - R_k(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationResiduals {
    pub rotation: f64,
    pub sibuya: f64,
}

impl RotationResiduals {
    pub fn max(&self) -> f64 {
        self.rotation.max(self.sibuya)
    }
}

pub fn rotation_check(pot: &CubicPotential, template: &RaySpec) -> Result<RotationResiduals> {
    let w = omega_pow(1);
    let wi = omega_pow(-1);
    let i = Complex64::new(0.0, 1.0);
    let r_of = |p: CubicPotential| -> Result<[Complex64; 5]> {
        let s = Monodromy::compute(&p, template)?.stokes();
        Ok(s.0.map(|x| -i * x))
    };
    let base = r_of(*pot)?;
    let minus = r_of(CubicPotential::new(wi * pot.a, w * pot.b))?;
    let plus = r_of(CubicPotential::new(w * pot.a, wi * pot.b))?;
    let mut rotation: f64 = 0.0;
    let mut sibuya: f64 = 0.0;
    for k in Z5_ALL {
        let kk = k.index();
        rotation = rotation.max((minus[kk] - base[(k - 2).index()]).norm());
        sibuya = sibuya.max((minus[kk] * plus[kk] - (1.0 - base[kk])).norm());
    }
    Ok(RotationResiduals { rotation, sibuya })
}

/// Cross-ratio route to `R_k`, used to cross-check `sigma_k = i R_k`.
pub fn cross_ratio_route(m: &Monodromy) -> Result<[Complex64; 5]> {
    Ok(r_functions(&m.asymptotic_values()?)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::det;

    fn golden() -> f64 {
        (1.0 + 5f64.sqrt()) / 2.0
    }

    #[test]
    fn symmetric_point_multipliers() {
        let s = stokes_multipliers(&CubicPotential::real(0.0, 0.0), &RaySpec::default()).unwrap();
        for k in Z5_ALL {
            assert!((s[k] - Complex64::new(0.0, -golden())).norm() < 1e-8, "sigma_{k} = {}", s[k]);
        }
        assert!(s.relation_residual() < 1e-9);
    }

    #[test]
    fn generic_point_relation_and_dual_route() {
        let pot = CubicPotential::new(Complex64::new(1.3, -0.6), Complex64::new(-0.9, 1.4));
        let m = Monodromy::compute(&pot, &RaySpec::default()).unwrap();
        let s = m.stokes();
        assert!(s.relation_residual() < 1e-9, "{:e}", s.relation_residual());
        let r = cross_ratio_route(&m).unwrap();
        for k in Z5_ALL {
            let d = (s[k] - Complex64::new(0.0, 1.0) * r[k.index()]).norm();
            assert!(d < 1e-8, "k={k}: {d:e}");
        }
    }

    #[test]
    fn basis_points_are_zero_and_infinity() {
        let pot = CubicPotential::new(Complex64::new(0.4, 0.1), Complex64::new(0.7, 0.0));
        let w = asymptotic_values(&pot, &RaySpec::default()).unwrap();
        assert_eq!(w[Z5::new(0)].value(), Some(Complex64::new(0.0, 0.0)));
        assert!(w[Z5::new(1)].value().is_none());
    }

    #[test]
    fn symmetric_point_cross_ratios() {
        let w = asymptotic_values(&CubicPotential::real(0.0, 0.0), &RaySpec::default()).unwrap();
        let r = r_functions(&w).unwrap();
        for k in Z5_ALL {
            assert!((r[k] + golden()).norm() < 1e-9);
        }
    }

    #[test]
    fn rotation_at_symmetric_point() {
        let res = rotation_check(&CubicPotential::real(0.0, 0.0), &RaySpec::default()).unwrap();
        assert!(res.max() < 1e-10, "{res:?}");
    }

    #[test]
    fn y_oracle_limits_and_symmetries() {
        let spec = RaySpec::default();
        let zero = Complex64::new(0.0, 0.0);
        let y = y_oracle(Z5::new(0), zero, Complex64::new(-20.0, 0.0), &spec).unwrap();
        assert!((y - golden()).norm() < 1e-6);
        let th = Complex64::new(0.4, 0.0);
        let y0 = y_oracle(Z5::new(0), zero, th, &spec).unwrap();
        for k in Z5_ALL {
            let yk = y_oracle(k, zero, th, &spec).unwrap();
            assert!((yk - y0).norm() < 1e-10);
        }
        let a = Complex64::new(0.7, 0.0);
        for k in [Z5::new(1), Z5::new(2)] {
            let yp = y_oracle(k, a, th, &spec).unwrap();
            let ym = y_oracle(-k, a, th, &spec).unwrap();
            assert!((yp.conj() - ym).norm() < 1e-8 * ym.norm().max(1.0));
        }
    }

    #[test]
    fn vanishing_multiplier_iff_coincident_values() {
        // sigma_0 vanishes at an eigenvalue; look at how close w_{-1}, w_{1} get
        let pot = CubicPotential::real(0.0, -2.0);
        let m = Monodromy::compute(&pot, &RaySpec::default()).unwrap();
        let w = m.asymptotic_values().unwrap();
        let s0 = m.stokes()[Z5::new(0)].norm();
        let gap = det(&w[Z5::new(-1)], &w[Z5::new(1)]).norm();
        // both small or both order one together
        assert!((s0 < 0.1) == (gap < 0.1), "sigma={s0} gap={gap}");
    }
}
