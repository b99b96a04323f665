//! Parametric deformation families and their kinematic quantities.
//!
//! Stretch-and-bend maps report gradients in the local cylindrical frame
//! (e_r, e_theta, e_z), where they are diagonal. [`cartesian_gradient`] and
//! [`placement`] give the Cartesian view used for surface work and gaps.

use crate::error::{Error, Result};
use crate::quadrature::QuadratureRule;
use crate::tensor3::{det, sym_eigenvalues, Mat3, Vec3};

/// Points this far outside a box are still accepted as members.
pub const DOMAIN_TOLERANCE: f64 = 1e-12;
/// Smallest admissible deformed radius for stretch-and-bend maps.
pub const MIN_RADIUS: f64 = 1e-6;
/// Slack allowed on `integral of J <= image volume`.
pub const INJECTIVITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Box3 {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
    pub z_lo: f64,
    pub z_hi: f64,
}

impl Box3 {
    pub fn new(x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64, z_lo: f64, z_hi: f64) -> Result<Self> {
        let b = Box3 {
            x_lo,
            x_hi,
            y_lo,
            y_hi,
            z_lo,
            z_hi,
        };
        for axis in 0..3 {
            let (lo, hi) = (b.bound(axis, false), b.bound(axis, true));
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidParameters(format!(
                    "box bounds on axis {axis} must satisfy lo < hi (got {lo}, {hi})"
                )));
            }
        }
        Ok(b)
    }

    /// Unit cube.
    pub fn unit() -> Self {
        Box3 {
            x_lo: 0.0,
            x_hi: 1.0,
            y_lo: 0.0,
            y_hi: 1.0,
            z_lo: 0.0,
            z_hi: 1.0,
        }
    }

    /// Slab `(x_lo, x_hi) x (0, 1) x (0, 1)` of unit cross-section.
    pub fn slab(x_lo: f64, x_hi: f64) -> Result<Self> {
        Box3::new(x_lo, x_hi, 0.0, 1.0, 0.0, 1.0)
    }

    pub fn bound(&self, axis: usize, high: bool) -> f64 {
        match (axis, high) {
            (0, false) => self.x_lo,
            (0, true) => self.x_hi,
            (1, false) => self.y_lo,
            (1, true) => self.y_hi,
            (2, false) => self.z_lo,
            _ => self.z_hi,
        }
    }

    pub fn volume(&self) -> f64 {
        (self.x_hi - self.x_lo) * (self.y_hi - self.y_lo) * (self.z_hi - self.z_lo)
    }

    pub fn contains(&self, p: Vec3) -> bool {
        (0..3).all(|axis| {
            p[axis] >= self.bound(axis, false) - DOMAIN_TOLERANCE
                && p[axis] <= self.bound(axis, true) + DOMAIN_TOLERANCE
        })
    }

    pub fn center(&self) -> Vec3 {
        Vec3::new(
            0.5 * (self.x_lo + self.x_hi),
            0.5 * (self.y_lo + self.y_hi),
            0.5 * (self.z_lo + self.z_hi),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeformationMap {
    /// `x = aX + b, y = Y / sqrt(a), z = Z / sqrt(a)`.
    TriaxialStretch { a: f64, b: f64 },
    /// `r = sqrt(2aX + b), theta = A Y / sqrt(a), z = Z / (A sqrt(a))`.
    StretchBend { bend: f64, a: f64, b: f64 },
    /// `x = F0 X + t`.
    Homogeneous { gradient: Mat3, translation: Vec3 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    TriaxialStretch,
    StretchBend,
    Homogeneous,
}

impl DeformationMap {
    pub fn family(&self) -> Family {
        match self {
            DeformationMap::TriaxialStretch { .. } => Family::TriaxialStretch,
            DeformationMap::StretchBend { .. } => Family::StretchBend,
            DeformationMap::Homogeneous { .. } => Family::Homogeneous,
        }
    }

    /// True for families whose Jacobian is identically one.
    pub fn is_isochoric_family(&self) -> bool {
        !matches!(self, DeformationMap::Homogeneous { .. })
    }
}

/// Principal stretches in family order (not sorted).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StretchTriple {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
}

impl StretchTriple {
    pub fn max(&self) -> f64 {
        self.l1.max(self.l2).max(self.l3)
    }

    pub fn product(&self) -> f64 {
        self.l1 * self.l2 * self.l3
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.l1, self.l2, self.l3]
    }
}

/// Checks the family parameters against the owning domain.
pub fn validate(map: &DeformationMap, domain: &Box3) -> Result<()> {
    match *map {
        DeformationMap::TriaxialStretch { a, b } => {
            if !(a.is_finite() && a > 0.0 && b.is_finite()) {
                return Err(Error::InvalidParameters(format!(
                    "triaxial stretch needs a > 0 and finite b (a = {a}, b = {b})"
                )));
            }
        }
        DeformationMap::StretchBend { bend, a, b } => {
            if !(bend.is_finite() && bend > 0.0 && a.is_finite() && a > 0.0 && b.is_finite()) {
                return Err(Error::InvalidParameters(format!(
                    "stretch-and-bend needs A > 0, a > 0 and finite b (A = {bend}, a = {a}, b = {b})"
                )));
            }
            let r2_min = 2.0 * a * domain.x_lo + b;
            if r2_min < MIN_RADIUS * MIN_RADIUS {
                return Err(Error::InvalidParameters(format!(
                    "2aX + b = {r2_min} falls below the minimum radius squared on the body"
                )));
            }
        }
        DeformationMap::Homogeneous { gradient, translation } => {
            if !(gradient.is_finite() && translation.is_finite()) {
                return Err(Error::InvalidParameters(
                    "homogeneous map has non-finite entries".into(),
                ));
            }
            let j = det(&gradient);
            if j <= 0.0 {
                return Err(Error::NonPositiveJacobian { jacobian: j });
            }
        }
    }
    Ok(())
}

fn check_point(domain: &Box3, p: Vec3) -> Result<()> {
    if domain.contains(p) {
        Ok(())
    } else {
        Err(Error::OutOfDomain {
            x: p.x(),
            y: p.y(),
            z: p.z(),
        })
    }
}

/// Deformed radius `sqrt(2aX + b)` of a stretch-and-bend map.
pub fn radius_at(a: f64, b: f64, x: f64) -> Result<f64> {
    let r2 = 2.0 * a * x + b;
    if r2 < MIN_RADIUS * MIN_RADIUS {
        return Err(Error::InvalidParameters(format!(
            "deformed radius squared {r2} below minimum"
        )));
    }
    Ok(r2.sqrt())
}

/// Deformation gradient in the family's principal frame.
pub fn deformation_gradient(map: &DeformationMap, domain: &Box3, p: Vec3) -> Result<Mat3> {
    check_point(domain, p)?;
    match *map {
        DeformationMap::TriaxialStretch { a, .. } => {
            let s = 1.0 / a.sqrt();
            Ok(Mat3::diag(a, s, s))
        }
        DeformationMap::StretchBend { bend, a, b } => {
            let r = radius_at(a, b, p.x())?;
            let sa = a.sqrt();
            Ok(Mat3::diag(a / r, bend * r / sa, 1.0 / (bend * sa)))
        }
        DeformationMap::Homogeneous { gradient, .. } => Ok(gradient),
    }
}

/// Rotation taking the principal frame to Cartesian axes at `p`.
pub fn frame_rotation(map: &DeformationMap, p: Vec3) -> Mat3 {
    match *map {
        DeformationMap::StretchBend { bend, a, .. } => {
            let theta = bend * p.y() / a.sqrt();
            let (s, c) = theta.sin_cos();
            Mat3([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
        }
        _ => Mat3::IDENTITY,
    }
}

/// Deformation gradient with Cartesian components on both legs.
pub fn cartesian_gradient(map: &DeformationMap, domain: &Box3, p: Vec3) -> Result<Mat3> {
    let f = deformation_gradient(map, domain, p)?;
    Ok(frame_rotation(map, p) * f)
}

/// Deformed position `chi(X)` in Cartesian components.
pub fn placement(map: &DeformationMap, domain: &Box3, p: Vec3) -> Result<Vec3> {
    check_point(domain, p)?;
    match *map {
        DeformationMap::TriaxialStretch { a, b } => {
            let s = 1.0 / a.sqrt();
            Ok(Vec3::new(a * p.x() + b, p.y() * s, p.z() * s))
        }
        DeformationMap::StretchBend { bend, a, b } => {
            let r = radius_at(a, b, p.x())?;
            let sa = a.sqrt();
            let theta = bend * p.y() / sa;
            Ok(Vec3::new(r * theta.cos(), r * theta.sin(), p.z() / (bend * sa)))
        }
        DeformationMap::Homogeneous { gradient, translation } => Ok(gradient.mul_vec(&p) + translation),
    }
}

pub fn displacement(map: &DeformationMap, domain: &Box3, p: Vec3) -> Result<Vec3> {
    Ok(placement(map, domain, p)? - p)
}

pub fn principal_stretches(map: &DeformationMap, domain: &Box3, p: Vec3) -> Result<StretchTriple> {
    let f = deformation_gradient(map, domain, p)?;
    match map {
        DeformationMap::Homogeneous { .. } => {
            let e = sym_eigenvalues(&(f.transpose() * f))?;
            Ok(StretchTriple {
                l1: e[0].max(0.0).sqrt(),
                l2: e[1].max(0.0).sqrt(),
                l3: e[2].max(0.0).sqrt(),
            })
        }
        _ => {
            let d = f.diagonal();
            Ok(StretchTriple {
                l1: d[0],
                l2: d[1],
                l3: d[2],
            })
        }
    }
}

pub fn jacobian(map: &DeformationMap, domain: &Box3, p: Vec3) -> Result<f64> {
    let j = det(&deformation_gradient(map, domain, p)?);
    if j > 0.0 {
        Ok(j)
    } else {
        Err(Error::NonPositiveJacobian { jacobian: j })
    }
}

/// Volume of the deformed image `chi(domain)`, from closed-form geometry.
pub fn image_volume(map: &DeformationMap, domain: &Box3) -> Result<f64> {
    validate(map, domain)?;
    match *map {
        DeformationMap::TriaxialStretch { .. } => Ok(domain.volume()),
        DeformationMap::Homogeneous { gradient, .. } => Ok(det(&gradient) * domain.volume()),
        DeformationMap::StretchBend { bend, a, b } => {
            let r_lo2 = 2.0 * a * domain.x_lo + b;
            let r_hi2 = 2.0 * a * domain.x_hi + b;
            let sa = a.sqrt();
            // An angular span beyond one full turn covers the same annulus again.
            let span = (bend * (domain.y_hi - domain.y_lo) / sa).min(2.0 * std::f64::consts::PI);
            let height = (domain.z_hi - domain.z_lo) / (bend * sa);
            Ok(0.5 * (r_hi2 - r_lo2) * span * height)
        }
    }
}

/// Integral of the Jacobian over the domain by Gauss quadrature.
pub fn jacobian_integral(map: &DeformationMap, domain: &Box3, quad_order: usize) -> Result<f64> {
    let rule = QuadratureRule::new(quad_order)?;
    let mut total = 0.0;
    for (p, w) in rule.volume_points(domain) {
        total += w * jacobian(map, domain, p)?;
    }
    Ok(total)
}

/// Global injectivity test: `integral of J <= vol(chi(domain))`.
pub fn injectivity_check(map: &DeformationMap, domain: &Box3, quad_order: usize) -> Result<bool> {
    if quad_order < 2 {
        return Err(Error::InvalidParameters(
            "injectivity check needs quad_order >= 2".into(),
        ));
    }
    validate(map, domain)?;
    let integral = jacobian_integral(map, domain, quad_order)?;
    let image = image_volume(map, domain)?;
    Ok(integral <= image + INJECTIVITY_TOLERANCE * image.abs().max(1.0))
}
