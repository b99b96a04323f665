//! Neo-Hookean strain energies, stresses and second variations.
//!
//! Pressures follow the hydrostatic convention: the multiplier of the
//! constraint `det F - 1 = 0` is `-p`.

use crate::error::{Error, Result};
use crate::tensor3::{cofactor, ddot, det, Mat3};

/// Largest `|det F - 1|` accepted by the incompressible model.
pub const INCOMPRESSIBILITY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MaterialModel {
    /// `W = C/2 (I1 - 3)` with `det F = 1`.
    NeoHookeanIncompressible { c: f64 },
    /// `W = C/2 (I1 - 3) + D (det F - 1)^2`.
    NeoHookeanCompressible { c: f64, d: f64 },
}

impl MaterialModel {
    pub fn shear_constant(&self) -> f64 {
        match *self {
            MaterialModel::NeoHookeanIncompressible { c } => c,
            MaterialModel::NeoHookeanCompressible { c, .. } => c,
        }
    }

    pub fn is_incompressible(&self) -> bool {
        matches!(self, MaterialModel::NeoHookeanIncompressible { .. })
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            MaterialModel::NeoHookeanIncompressible { c } => c.is_finite() && c > 0.0,
            MaterialModel::NeoHookeanCompressible { c, d } => c.is_finite() && c > 0.0 && d.is_finite() && d > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameters(format!(
                "material constants must be positive: {self:?}"
            )))
        }
    }

    /// Same model with every constant multiplied by `k`.
    pub fn scaled(&self, k: f64) -> MaterialModel {
        match *self {
            MaterialModel::NeoHookeanIncompressible { c } => MaterialModel::NeoHookeanIncompressible { c: k * c },
            MaterialModel::NeoHookeanCompressible { c, d } => {
                MaterialModel::NeoHookeanCompressible { c: k * c, d: k * d }
            }
        }
    }
}

/// Hydrostatic pressure over a body.
#[derive(Debug, Clone, PartialEq)]
pub enum PressureField {
    Constant(f64),
    /// Values and slopes `dp/dr` on an increasing radial grid, interpolated by
    /// cubic Hermite segments.
    RadialProfile {
        radii: Vec<f64>,
        values: Vec<f64>,
        slopes: Vec<f64>,
    },
}

impl PressureField {
    pub fn validate(&self) -> Result<()> {
        match self {
            PressureField::Constant(p) if p.is_finite() => Ok(()),
            PressureField::Constant(p) => Err(Error::InvalidParameters(format!("pressure {p} is not finite"))),
            PressureField::RadialProfile { radii, values, slopes } => {
                let shaped = radii.len() >= 2 && radii.len() == values.len() && radii.len() == slopes.len();
                let increasing = radii.windows(2).all(|w| w[0] < w[1]);
                let finite = radii.iter().chain(values).chain(slopes).all(|v| v.is_finite());
                if shaped && increasing && finite {
                    Ok(())
                } else {
                    Err(Error::InvalidParameters("radial pressure profile is malformed".into()))
                }
            }
        }
    }

    /// Pressure at deformed radius `r` (ignored for a constant field).
    pub fn at(&self, r: f64) -> Result<f64> {
        match self {
            PressureField::Constant(p) => Ok(*p),
            PressureField::RadialProfile { radii, values, slopes } => {
                let n = radii.len();
                let span = radii[n - 1] - radii[0];
                let slack = 1e-12 * span.max(1.0);
                if !(r >= radii[0] - slack && r <= radii[n - 1] + slack) {
                    return Err(Error::InvalidParameters(format!(
                        "radius {r} outside the pressure profile [{}, {}]",
                        radii[0],
                        radii[n - 1]
                    )));
                }
                let k = radii.partition_point(|&x| x <= r).clamp(1, n - 1);
                let (r0, r1) = (radii[k - 1], radii[k]);
                let h = r1 - r0;
                let t = (r - r0) / h;
                let (t2, t3) = (t * t, t * t * t);
                Ok((2.0 * t3 - 3.0 * t2 + 1.0) * values[k - 1]
                    + (t3 - 2.0 * t2 + t) * h * slopes[k - 1]
                    + (-2.0 * t3 + 3.0 * t2) * values[k]
                    + (t3 - t2) * h * slopes[k])
            }
        }
    }

    /// Radial derivative `dp/dr` at `r`.
    pub fn slope_at(&self, r: f64) -> Result<f64> {
        match self {
            PressureField::Constant(_) => Ok(0.0),
            PressureField::RadialProfile { radii, values, slopes } => {
                self.at(r)?;
                let n = radii.len();
                let k = radii.partition_point(|&x| x <= r).clamp(1, n - 1);
                let (r0, r1) = (radii[k - 1], radii[k]);
                let h = r1 - r0;
                let t = (r - r0) / h;
                let t2 = t * t;
                Ok(
                    ((6.0 * t2 - 6.0 * t) * values[k - 1] + (-6.0 * t2 + 6.0 * t) * values[k]) / h
                        + (3.0 * t2 - 4.0 * t + 1.0) * slopes[k - 1]
                        + (3.0 * t2 - 2.0 * t) * slopes[k],
                )
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, PressureField::Constant(_))
    }

    /// Same field multiplied by `k`.
    pub fn scaled(&self, k: f64) -> PressureField {
        match self {
            PressureField::Constant(p) => PressureField::Constant(k * p),
            PressureField::RadialProfile { radii, values, slopes } => PressureField::RadialProfile {
                radii: radii.clone(),
                values: values.iter().map(|v| k * v).collect(),
                slopes: slopes.iter().map(|v| k * v).collect(),
            },
        }
    }
}

fn positive_jacobian(f: &Mat3) -> Result<f64> {
    let j = det(f);
    if j > 0.0 {
        Ok(j)
    } else {
        Err(Error::NonPositiveJacobian { jacobian: j })
    }
}

pub fn strain_energy(model: &MaterialModel, f: &Mat3) -> Result<f64> {
    let j = positive_jacobian(f)?;
    let i1 = ddot(f, f);
    match *model {
        MaterialModel::NeoHookeanIncompressible { c } => {
            let violation = (j - 1.0).abs();
            if violation > INCOMPRESSIBILITY_TOLERANCE {
                return Err(Error::ConstraintViolated { violation });
            }
            Ok(0.5 * c * (i1 - 3.0))
        }
        MaterialModel::NeoHookeanCompressible { c, d } => Ok(0.5 * c * (i1 - 3.0) + d * (j - 1.0).powi(2)),
    }
}

/// Incompressibility constraint `det F - 1`.
pub fn constraint_value(f: &Mat3) -> f64 {
    det(f) - 1.0
}

/// Derivative of the constraint, `cof F`.
pub fn constraint_gradient(f: &Mat3) -> Mat3 {
    cofactor(f)
}

/// First Piola-Kirchhoff stress. The pressure is ignored by the compressible model.
pub fn piola_stress(model: &MaterialModel, f: &Mat3, pressure: f64) -> Result<Mat3> {
    let j = positive_jacobian(f)?;
    let cof = cofactor(f);
    Ok(match *model {
        MaterialModel::NeoHookeanIncompressible { c } => *f * c - cof * pressure,
        MaterialModel::NeoHookeanCompressible { c, d } => *f * c + cof * (2.0 * d * (j - 1.0)),
    })
}

pub fn cauchy_stress(model: &MaterialModel, f: &Mat3, pressure: f64) -> Result<Mat3> {
    let p = piola_stress(model, f, pressure)?;
    Ok(p * f.transpose() * (1.0 / det(f)))
}

/// Complementary-type density `P : F - W`.
pub fn complementary_density(model: &MaterialModel, f: &Mat3, pressure: f64) -> Result<f64> {
    let p = piola_stress(model, f, pressure)?;
    Ok(ddot(&p, f) - strain_energy(model, f)?)
}

/// Second variation of `W - p (det F - 1)` at `F` in direction `G`.
///
/// Uses `det(F + tG) = det F + t cof F : G + t^2 F : cof G + t^3 det G`.
pub fn hessian_quadratic_form(model: &MaterialModel, f: &Mat3, pressure: f64, g: &Mat3) -> Result<f64> {
    let j = positive_jacobian(f)?;
    let second_det = 2.0 * ddot(f, &cofactor(g));
    Ok(match *model {
        MaterialModel::NeoHookeanIncompressible { c } => c * ddot(g, g) - pressure * second_det,
        MaterialModel::NeoHookeanCompressible { c, d } => {
            let first_det = ddot(&cofactor(f), g);
            c * ddot(g, g) + 2.0 * d * first_det * first_det + 2.0 * d * (j - 1.0) * second_det
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const UNIT: MaterialModel = MaterialModel::NeoHookeanIncompressible { c: 1.0 };

    fn triaxial(a: f64) -> Mat3 {
        let s = 1.0 / a.sqrt();
        Mat3::diag(a, s, s)
    }

    #[test]
    fn strain_energy_examples() {
        assert_eq!(strain_energy(&UNIT, &Mat3::IDENTITY).unwrap(), 0.0);
        assert!((strain_energy(&UNIT, &triaxial(4.0)).unwrap() - 6.75).abs() < 1e-14);
        let m = MaterialModel::NeoHookeanIncompressible { c: 2.5 };
        assert!((strain_energy(&m, &triaxial(4.0)).unwrap() - 16.875).abs() < 1e-13);
    }

    #[test]
    fn strain_energy_rejects_volume_change() {
        assert!(matches!(
            strain_energy(&UNIT, &Mat3::diag(2.0, 1.0, 1.0)),
            Err(Error::ConstraintViolated { .. })
        ));
        assert!(matches!(
            strain_energy(&UNIT, &Mat3::diag(1.0, 1.0, -1.0)),
            Err(Error::NonPositiveJacobian { .. })
        ));
        let comp = MaterialModel::NeoHookeanCompressible { c: 1.0, d: 3.0 };
        assert!((strain_energy(&comp, &Mat3::diag(2.0, 1.0, 1.0)).unwrap() - 4.5).abs() < 1e-14);
    }

    #[test]
    fn constraint_examples() {
        assert_eq!(constraint_value(&Mat3::IDENTITY), 0.0);
        assert!(constraint_value(&triaxial(0.81)).abs() < 1e-15);
        assert_eq!(constraint_value(&Mat3::diag(2.0, 1.0, 1.0)), 1.0);
        assert_eq!(constraint_gradient(&Mat3::IDENTITY), Mat3::IDENTITY);
        assert_eq!(
            constraint_gradient(&Mat3::diag(2.0, 3.0, 4.0)),
            Mat3::diag(12.0, 8.0, 6.0)
        );
    }

    #[test]
    fn piola_examples() {
        assert_eq!(piola_stress(&UNIT, &Mat3::IDENTITY, 1.0).unwrap(), Mat3::ZERO);
        let f = triaxial(0.81);
        assert_eq!(piola_stress(&UNIT, &f, 0.0).unwrap(), f);
        let p = piola_stress(&UNIT, &f, 0.3).unwrap();
        assert!((p[(0, 0)] - (0.81 - 0.3 / 0.81)).abs() < 1e-15);
        let sigma = cauchy_stress(&UNIT, &f, 0.3).unwrap();
        assert!((0.81 * p[(0, 0)] - sigma[(0, 0)]).abs() < 1e-15);
    }

    #[test]
    fn cauchy_examples() {
        assert_eq!(cauchy_stress(&UNIT, &Mat3::IDENTITY, 1.0).unwrap(), Mat3::ZERO);
        let s = cauchy_stress(&UNIT, &triaxial(0.81), 0.0).unwrap();
        for (got, want) in s.diagonal().iter().zip([0.6561, 1.0 / 0.81, 1.0 / 0.81]) {
            assert!((got - want).abs() < 1e-14);
        }
        // Normal contact stress of the compression example: -p + C a^2.
        let (c, a, p) = (1.7, 0.9, 0.4);
        let m = MaterialModel::NeoHookeanIncompressible { c };
        let s = cauchy_stress(&m, &triaxial(a), p).unwrap();
        assert!((s[(0, 0)] - (-p + c * a * a)).abs() < 1e-14);
    }

    #[test]
    fn complementary_examples() {
        assert_eq!(complementary_density(&UNIT, &Mat3::IDENTITY, 0.0).unwrap(), 3.0);
        assert_eq!(complementary_density(&UNIT, &Mat3::IDENTITY, 1.0).unwrap(), 0.0);
        assert!((complementary_density(&UNIT, &triaxial(4.0), 0.0).unwrap() - 9.75).abs() < 1e-13);
    }

    #[test]
    fn hessian_at_reference_without_pressure() {
        assert_eq!(
            hessian_quadratic_form(&UNIT, &Mat3::IDENTITY, 0.0, &Mat3::IDENTITY).unwrap(),
            3.0
        );
    }

    #[test]
    fn hessian_matches_second_difference() {
        let f = triaxial(0.7);
        let g = Mat3([[0.3, -0.2, 0.1], [0.05, -0.4, 0.2], [0.15, 0.1, 0.25]]);
        let p = 0.35;
        let h = 1e-4;
        let energy = |t: f64| {
            let ft = f + g * t;
            0.5 * ddot(&ft, &ft) - p * constraint_value(&ft)
        };
        let fd = (energy(h) - 2.0 * energy(0.0) + energy(-h)) / (h * h);
        let exact = hessian_quadratic_form(&UNIT, &f, p, &g).unwrap();
        assert!((fd - exact).abs() < 1e-6, "{fd} vs {exact}");

        let comp = MaterialModel::NeoHookeanCompressible { c: 1.2, d: 2.0 };
        let fc = Mat3::diag(1.1, 0.95, 1.02);
        let energy = |t: f64| {
            let ft = fc + g * t;
            0.6 * (ddot(&ft, &ft) - 3.0) + 2.0 * (det(&ft) - 1.0).powi(2)
        };
        let fd = (energy(h) - 2.0 * energy(0.0) + energy(-h)) / (h * h);
        let exact = hessian_quadratic_form(&comp, &fc, 0.0, &g).unwrap();
        assert!((fd - exact).abs() < 1e-6, "{fd} vs {exact}");
    }

    #[test]
    fn hessian_changes_sign_across_unit_pressure_at_reference() {
        // At F = I the skew shear pair gives 2 - 2p and the symmetric pair 2 + 2p.
        let g = Mat3([[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]);
        assert!(hessian_quadratic_form(&UNIT, &Mat3::IDENTITY, 0.99, &g).unwrap() > 0.0);
        assert!(hessian_quadratic_form(&UNIT, &Mat3::IDENTITY, 1.01, &g).unwrap() < 0.0);
        let g = Mat3([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]);
        assert!(hessian_quadratic_form(&UNIT, &Mat3::IDENTITY, -0.99, &g).unwrap() > 0.0);
        assert!(hessian_quadratic_form(&UNIT, &Mat3::IDENTITY, -1.01, &g).unwrap() < 0.0);
    }

    #[test]
    fn radial_profile_interpolates_cubics_exactly() {
        let radii: Vec<f64> = (0..5).map(|k| 1.0 + 0.25 * k as f64).collect();
        let cubic = |r: f64| r * r * r - 2.0 * r + 0.5;
        let slope = |r: f64| 3.0 * r * r - 2.0;
        let field = PressureField::RadialProfile {
            values: radii.iter().map(|&r| cubic(r)).collect(),
            slopes: radii.iter().map(|&r| slope(r)).collect(),
            radii,
        };
        field.validate().unwrap();
        for r in [1.0, 1.1, 1.37, 1.9, 2.0] {
            assert!((field.at(r).unwrap() - cubic(r)).abs() < 1e-13);
        }
        assert!(field.at(2.5).is_err());
    }
}
