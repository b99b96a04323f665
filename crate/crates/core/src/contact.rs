//! Two-body contact systems: gap, interface tractions, admissibility checks
//! and the equilibrium pressure of bent bodies.
//!
//! Faces follow a fixed layout. Body 1 carries the dead load on its `X = x_lo`
//! face, the bodies touch across the shared plane `body1.x_hi = body2.x_lo`,
//! and body 2 is held on its `X = x_hi` face.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::kinematics::{self, radius_at, Box3, DeformationMap};
use crate::material::{self, MaterialModel, PressureField};
use crate::quadrature::{Face, QuadratureRule};
use crate::tensor3::{cofactor, det, Mat3, Vec3};

/// `|gap|` at or below this value counts as closed contact.
pub const GAP_TOLERANCE: f64 = 1e-10;
/// Tolerance on Dirichlet, traction and action-reaction residuals (scaled by `max(1, C)`).
pub const TRACTION_TOLERANCE: f64 = 1e-10;
/// Tolerance on the pointwise equilibrium residual (scaled by `max(1, C)`).
pub const EQUILIBRIUM_TOLERANCE: f64 = 1e-8;
/// Sample points per axis for volumetric checks.
pub const SAMPLES_PER_AXIS: usize = 5;
/// Radial grid nodes used by [`solve_radial_pressure`].
pub const RADIAL_NODES: usize = 1025;

#[derive(Debug, Clone, PartialEq)]
pub struct BodySpec {
    pub domain: Box3,
    pub material: MaterialModel,
    pub map: DeformationMap,
    pub pressure: PressureField,
}

impl BodySpec {
    pub fn new(domain: Box3, material: MaterialModel, map: DeformationMap, pressure: PressureField) -> Result<Self> {
        let body = BodySpec {
            domain,
            material,
            map,
            pressure,
        };
        body.validate()?;
        Ok(body)
    }

    pub fn validate(&self) -> Result<()> {
        self.material.validate()?;
        kinematics::validate(&self.map, &self.domain)?;
        self.pressure.validate()?;
        if self.material.is_incompressible() {
            if let DeformationMap::Homogeneous { gradient, .. } = self.map {
                let violation = (det(&gradient) - 1.0).abs();
                if violation > material::INCOMPRESSIBILITY_TOLERANCE {
                    return Err(Error::ConstraintViolated { violation });
                }
            }
        }
        if let PressureField::RadialProfile { radii, .. } = &self.pressure {
            let DeformationMap::StretchBend { a, b, .. } = self.map else {
                return Err(Error::InvalidParameters(
                    "radial pressure profiles need a stretch-and-bend map".into(),
                ));
            };
            let (r_lo, r_hi) = (radius_at(a, b, self.domain.x_lo)?, radius_at(a, b, self.domain.x_hi)?);
            let slack = 1e-12 * r_hi.max(1.0);
            if radii[0] > r_lo + slack || radii[radii.len() - 1] < r_hi - slack {
                return Err(Error::InvalidParameters(format!(
                    "pressure profile does not cover radii [{r_lo}, {r_hi}]"
                )));
            }
        }
        Ok(())
    }

    pub fn with_pressure(&self, pressure: PressureField) -> Result<Self> {
        BodySpec::new(self.domain, self.material, self.map, pressure)
    }

    /// Pressure at a reference point.
    pub fn pressure_at(&self, p: Vec3) -> Result<f64> {
        match (&self.pressure, self.map) {
            (PressureField::Constant(v), _) => Ok(*v),
            (field, DeformationMap::StretchBend { a, b, .. }) => field.at(radius_at(a, b, p.x())?),
            _ => Err(Error::InvalidParameters(
                "radial pressure profiles need a stretch-and-bend map".into(),
            )),
        }
    }

    /// Principal-frame Cauchy stress at a reference point.
    pub fn cauchy_at(&self, p: Vec3) -> Result<Mat3> {
        let f = kinematics::deformation_gradient(&self.map, &self.domain, p)?;
        material::cauchy_stress(&self.material, &f, self.pressure_at(p)?)
    }

    /// Normal Cauchy traction on the `X = const` section through `p`.
    pub fn normal_traction_at(&self, p: Vec3) -> Result<f64> {
        let f = kinematics::deformation_gradient(&self.map, &self.domain, p)?;
        let sigma = material::cauchy_stress(&self.material, &f, self.pressure_at(p)?)?;
        // Nanson: the deformed normal is parallel to cof F N.
        let n = cofactor(&f).column(0);
        let n = n * (1.0 / n.norm());
        Ok(n.dot(&sigma.mul_vec(&n)))
    }

    fn stress_scale(&self) -> f64 {
        self.material.shear_constant().max(1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub body1: BodySpec,
    pub body2: BodySpec,
    pub gap_allowance: f64,
    pub cohesion: f64,
}

impl SystemSpec {
    pub fn new(body1: BodySpec, body2: BodySpec, gap_allowance: f64, cohesion: f64) -> Result<Self> {
        let s = SystemSpec {
            body1,
            body2,
            gap_allowance,
            cohesion,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.body1.validate()?;
        self.body2.validate()?;
        if (self.body1.domain.x_hi - self.body2.domain.x_lo).abs() > kinematics::DOMAIN_TOLERANCE {
            return Err(Error::InvalidParameters(
                "body 1 must end where body 2 starts (shared contact plane)".into(),
            ));
        }
        if !(self.gap_allowance.is_finite() && self.gap_allowance >= 0.0) {
            return Err(Error::InvalidParameters("gap allowance must be >= 0".into()));
        }
        if !(self.cohesion.is_finite() && self.cohesion >= 0.0) {
            return Err(Error::InvalidParameters("cohesion must be >= 0".into()));
        }
        Ok(())
    }

    /// Reference abscissa of the contact plane.
    pub fn contact_x(&self) -> f64 {
        self.body1.domain.x_hi
    }

    pub fn bodies(&self) -> [&BodySpec; 2] {
        [&self.body1, &self.body2]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Closed,
    Open,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Closed => "closed",
            Regime::Open => "open",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactEvaluation {
    /// Signed normal separation minus the allowance; `<= 0` is admissible.
    pub gap: f64,
    /// Normal traction of body 1 at the interface.
    pub traction_normal: f64,
    /// Normal traction of body 2 at the interface.
    pub traction_opposite: f64,
    pub complementarity_residual: f64,
    pub action_reaction_residual: f64,
    pub regime: Regime,
}

/// Named residuals of the admissibility conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    Dirichlet,
    Gap,
    Constraint,
    Equilibrium,
    Neumann,
    ContactTractionSign,
    Complementarity,
    ActionReaction,
}

impl Condition {
    pub const ALL: [Condition; 8] = [
        Condition::Dirichlet,
        Condition::Gap,
        Condition::Constraint,
        Condition::Equilibrium,
        Condition::Neumann,
        Condition::ContactTractionSign,
        Condition::Complementarity,
        Condition::ActionReaction,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Condition::Dirichlet => "dirichlet",
            Condition::Gap => "gap",
            Condition::Constraint => "constraint",
            Condition::Equilibrium => "equilibrium",
            Condition::Neumann => "neumann",
            Condition::ContactTractionSign => "contact_traction_sign",
            Condition::Complementarity => "complementarity",
            Condition::ActionReaction => "action_reaction",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of the kinematic and/or static checks. A `None` flag means that
/// half was not evaluated.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AdmissibilityReport {
    pub kinematic_ok: Option<bool>,
    pub static_ok: Option<bool>,
    pub residuals: BTreeMap<Condition, f64>,
    pub tolerances: BTreeMap<Condition, f64>,
}

impl AdmissibilityReport {
    fn record(&mut self, condition: Condition, residual: f64, tolerance: f64) -> bool {
        let prev = self.residuals.get(&condition).copied().unwrap_or(0.0);
        self.residuals.insert(condition, prev.max(residual));
        self.tolerances.insert(condition, tolerance);
        residual <= tolerance
    }

    pub fn residual(&self, condition: Condition) -> Option<f64> {
        self.residuals.get(&condition).copied()
    }

    /// First condition whose residual exceeds its tolerance.
    pub fn first_failure(&self) -> Option<(Condition, f64)> {
        self.residuals
            .iter()
            .find(|(c, r)| **r > self.tolerances[*c] || r.is_nan())
            .map(|(c, r)| (*c, *r))
    }

    pub fn merge(mut self, other: AdmissibilityReport) -> AdmissibilityReport {
        for (c, r) in other.residuals {
            let tol = other.tolerances[&c];
            self.record(c, r, tol);
        }
        self.kinematic_ok = self.kinematic_ok.or(other.kinematic_ok);
        self.static_ok = self.static_ok.or(other.static_ok);
        self
    }

    pub fn is_ok(&self) -> bool {
        self.kinematic_ok.unwrap_or(true) && self.static_ok.unwrap_or(true)
    }
}

/// Prescribed data on the held face of body 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DirichletData {
    /// Uniform displacement.
    Displacement(Vec3),
    /// Displacement produced by a designated placement of body 2.
    Placement(DeformationMap),
}

impl DirichletData {
    pub fn displacement(&self, domain: &Box3, p: Vec3) -> Result<Vec3> {
        match self {
            DirichletData::Displacement(u) => Ok(*u),
            DirichletData::Placement(map) => kinematics::displacement(map, domain, p),
        }
    }
}

/// Signed normal overlap of the interface; `<= 0` means separated or touching.
pub fn gap_value(system: &SystemSpec) -> Result<f64> {
    let (m1, m2) = (system.body1.map, system.body2.map);
    let x = system.contact_x();
    match (m1, m2) {
        (DeformationMap::TriaxialStretch { a: a1, b: b1 }, DeformationMap::TriaxialStretch { a: a2, b: b2 }) => {
            Ok((a1 * x + b1) - (a2 * x + b2))
        }
        (DeformationMap::StretchBend { a: a1, b: b1, .. }, DeformationMap::StretchBend { a: a2, b: b2, .. }) => {
            Ok(radius_at(a1, b1, x)? - radius_at(a2, b2, x)?)
        }
        (DeformationMap::Homogeneous { .. }, DeformationMap::Homogeneous { .. }) => {
            let c1 = system.body1.domain.center();
            let c2 = system.body2.domain.center();
            let p1 = Vec3::new(x, c1.y(), c1.z());
            let p2 = Vec3::new(x, c2.y(), c2.z());
            let x1 = kinematics::placement(&m1, &system.body1.domain, p1)?;
            let x2 = kinematics::placement(&m2, &system.body2.domain, p2)?;
            Ok(x1.x() - x2.x())
        }
        _ => Err(Error::FamilyMismatch),
    }
}

/// Normal Cauchy traction of `body` on its section `X = face_x`.
///
/// Triaxial states give `-p + C a^2`; bent states give `-p(r) + C a^2 / r^2`
/// at the deformed radius `r` of that section.
pub fn contact_traction(body: &BodySpec, face_x: f64) -> Result<f64> {
    let c = body.domain.center();
    body.normal_traction_at(Vec3::new(face_x, c.y(), c.z()))
}

pub fn evaluate_contact(system: &SystemSpec) -> Result<ContactEvaluation> {
    let gap = gap_value(system)? - system.gap_allowance;
    let x = system.contact_x();
    let t1 = contact_traction(&system.body1, x)?;
    let t2 = contact_traction(&system.body2, x)?;
    let regime = if gap.abs() <= GAP_TOLERANCE {
        Regime::Closed
    } else {
        Regime::Open
    };
    Ok(ContactEvaluation {
        gap,
        traction_normal: t1,
        traction_opposite: t2,
        complementarity_residual: gap * (t1 - system.cohesion),
        action_reaction_residual: (t1 - t2).abs(),
        regime,
    })
}

/// Uniform interior sample grid of a box.
pub fn sample_points(domain: &Box3) -> Vec<Vec3> {
    let n = SAMPLES_PER_AXIS;
    let coord = |axis: usize, k: usize| {
        let (lo, hi) = (domain.bound(axis, false), domain.bound(axis, true));
        lo + (hi - lo) * (k as f64 + 0.5) / n as f64
    };
    let mut out = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out.push(Vec3::new(coord(0, i), coord(1, j), coord(2, k)));
            }
        }
    }
    out
}

fn constraint_residual(body: &BodySpec) -> Result<f64> {
    if !body.material.is_incompressible() {
        return Ok(0.0);
    }
    let mut worst: f64 = 0.0;
    for p in sample_points(&body.domain) {
        let f = kinematics::deformation_gradient(&body.map, &body.domain, p)?;
        worst = worst.max(material::constraint_value(&f).abs());
    }
    Ok(worst)
}

/// Kinematic half of the admissibility check.
pub fn check_kinematic(system: &SystemSpec, data: &DirichletData) -> Result<AdmissibilityReport> {
    let mut report = AdmissibilityReport::default();
    let rule = QuadratureRule::new(4)?;
    let body2 = &system.body2;
    let (points, _) = rule.face_points(&body2.domain, Face::XHigh);
    let mut dirichlet: f64 = 0.0;
    for (p, _) in points {
        let u = kinematics::displacement(&body2.map, &body2.domain, p)?;
        dirichlet = dirichlet.max((u - data.displacement(&body2.domain, p)?).norm());
    }
    let mut ok = report.record(Condition::Dirichlet, dirichlet, TRACTION_TOLERANCE);
    let gap = gap_value(system)? - system.gap_allowance;
    ok &= report.record(Condition::Gap, gap.max(0.0), GAP_TOLERANCE);
    for body in system.bodies() {
        ok &= report.record(
            Condition::Constraint,
            constraint_residual(body)?,
            material::INCOMPRESSIBILITY_TOLERANCE,
        );
    }
    report.kinematic_ok = Some(ok);
    Ok(report)
}

/// Pointwise residual of `Div P = 0` over the sample grid.
///
/// Triaxial and homogeneous states with constant pressure are equilibrated
/// identically. Bent states are checked through the radial equation
/// `d(sigma_rr)/dr = (sigma_tt - sigma_rr) / r`.
pub fn equilibrium_residual(body: &BodySpec) -> Result<f64> {
    let DeformationMap::StretchBend { bend, a, b } = body.map else {
        return Ok(0.0);
    };
    let c = body.material.shear_constant();
    let mut worst: f64 = 0.0;
    for p in sample_points(&body.domain) {
        let r = radius_at(a, b, p.x())?;
        let hoop_minus_radial = c * (bend * bend * r * r / a - a * a / (r * r));
        let mut d_radial = -2.0 * c * a * a / (r * r * r);
        if body.material.is_incompressible() {
            d_radial -= body.pressure.slope_at(r)?;
        }
        worst = worst.max((d_radial - hoop_minus_radial / r).abs());
    }
    Ok(worst)
}

/// Static half of the admissibility check under the normal load `tau` on the loaded face.
pub fn check_static(system: &SystemSpec, tau: f64) -> Result<AdmissibilityReport> {
    let mut report = AdmissibilityReport::default();
    let mut ok = true;
    for body in system.bodies() {
        let scale = body.stress_scale();
        ok &= report.record(
            Condition::Equilibrium,
            equilibrium_residual(body)?,
            EQUILIBRIUM_TOLERANCE * scale,
        );
        ok &= report.record(
            Condition::Constraint,
            constraint_residual(body)?,
            material::INCOMPRESSIBILITY_TOLERANCE,
        );
    }
    let scale = system.body1.stress_scale().max(system.body2.stress_scale());
    let loaded = contact_traction(&system.body1, system.body1.domain.x_lo)?;
    ok &= report.record(Condition::Neumann, (loaded - tau).abs(), TRACTION_TOLERANCE * scale);
    let contact = evaluate_contact(system)?;
    let sign = (contact.traction_normal - system.cohesion)
        .max(contact.traction_opposite - system.cohesion)
        .max(0.0);
    ok &= report.record(Condition::ContactTractionSign, sign, TRACTION_TOLERANCE * scale);
    // An open interface carries exactly the cohesive traction.
    let slack = match contact.regime {
        Regime::Closed => 0.0,
        Regime::Open => (contact.traction_normal - system.cohesion).abs(),
    };
    ok &= report.record(Condition::Complementarity, slack, TRACTION_TOLERANCE * scale);
    ok &= report.record(
        Condition::ActionReaction,
        contact.action_reaction_residual,
        TRACTION_TOLERANCE * scale,
    );
    report.static_ok = Some(ok);
    Ok(report)
}

/// Both halves of the admissibility check.
pub fn check_admissible(system: &SystemSpec, data: &DirichletData, tau: f64) -> Result<AdmissibilityReport> {
    Ok(check_kinematic(system, data)?.merge(check_static(system, tau)?))
}

/// Equilibrium pressure of a bent incompressible body with the radial normal
/// traction fixed to `traction` on the section `X = anchor_x`.
pub fn solve_radial_pressure(body: &BodySpec, anchor_x: f64, traction: f64) -> Result<PressureField> {
    let DeformationMap::StretchBend { bend, a, b } = body.map else {
        return Err(Error::InvalidParameters(
            "radial pressure needs a stretch-and-bend map".into(),
        ));
    };
    if !body.material.is_incompressible() {
        return Err(Error::InvalidParameters(
            "radial pressure needs an incompressible material".into(),
        ));
    }
    if !traction.is_finite() {
        return Err(Error::InvalidParameters("boundary traction must be finite".into()));
    }
    let dom = &body.domain;
    if anchor_x < dom.x_lo - kinematics::DOMAIN_TOLERANCE || anchor_x > dom.x_hi + kinematics::DOMAIN_TOLERANCE {
        return Err(Error::InvalidParameters(format!(
            "anchor X = {anchor_x} outside the body"
        )));
    }
    let c = body.material.shear_constant();
    let (r_lo, r_hi) = (radius_at(a, b, dom.x_lo)?, radius_at(a, b, dom.x_hi)?);
    let r_anchor = radius_at(a, b, anchor_x)?;
    // d(sigma_rr)/dr; the pressure cancels from the hoop-minus-radial difference.
    let rate = |r: f64| c * (bend * bend * r / a - a * a / (r * r * r));
    let n = RADIAL_NODES;
    let radii: Vec<f64> = (0..n)
        .map(|k| r_lo + (r_hi - r_lo) * k as f64 / (n - 1) as f64)
        .collect();
    let rule = QuadratureRule::new(8)?;
    let integrate = |lo: f64, hi: f64| -> f64 { rule.interval(lo, hi).iter().map(|(r, w)| w * rate(*r)).sum() };
    // Integrate node by node outward from the anchor's cell.
    let k0 = radii.partition_point(|&r| r <= r_anchor).clamp(1, n - 1) - 1;
    let mut radial = vec![0.0; n];
    radial[k0] = traction + integrate(r_anchor, radii[k0]);
    for k in k0 + 1..n {
        radial[k] = radial[k - 1] + integrate(radii[k - 1], radii[k]);
    }
    for k in (0..k0).rev() {
        radial[k] = radial[k + 1] - integrate(radii[k], radii[k + 1]);
    }
    let values: Vec<f64> = radii
        .iter()
        .zip(&radial)
        .map(|(r, s)| c * a * a / (r * r) - s)
        .collect();
    let slopes: Vec<f64> = radii
        .iter()
        .map(|r| -2.0 * c * a * a / (r * r * r) - rate(*r))
        .collect();
    let field = PressureField::RadialProfile { radii, values, slopes };
    field.validate()?;
    Ok(field)
}
