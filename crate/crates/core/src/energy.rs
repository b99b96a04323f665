//! Potential and complementary energies of two-body contact systems.
//!
//! Energies are integrated over the full reference boxes. The held face of
//! body 2 is the Dirichlet face, the two faces on the contact plane form the
//! contact interface, and every other face is a Neumann face. Values are per
//! unit cross-section for the built-in slabs.

use nalgebra::{SMatrix, SVector};

use crate::contact::{self, BodySpec, Condition, DirichletData, SystemSpec};
use crate::error::{Error, Result};
use crate::kinematics::{self, Box3};
use crate::material::{self, MaterialModel};
use crate::quadrature::{Face, QuadratureRule};
use crate::tensor3::{cofactor, ddot, det, Mat3, Vec3};

/// Slack allowed on `E_c <= E_p` for admissible pairs.
pub const ENCLOSURE_TOLERANCE: f64 = 1e-9;
/// Largest Neumann data mismatch accepted for a static trial.
pub const NEUMANN_TOLERANCE: f64 = 1e-9;

const NEWTON_MAX_ITER: usize = 60;

/// Integral of `f` over `domain` by the tensor-product rule.
pub fn integrate_volume(f: impl Fn(Vec3) -> Result<f64>, domain: &Box3, rule: &QuadratureRule) -> Result<f64> {
    let mut total = 0.0;
    for (p, w) in rule.volume_points(domain) {
        let v = f(p)?;
        if !v.is_finite() {
            return Err(Error::NonFiniteIntegrand);
        }
        total += w * v;
    }
    Ok(total)
}

/// Integral over one face of `f(X, N)` with `N` the outward reference normal.
pub fn integrate_face(
    f: impl Fn(Vec3, Vec3) -> Result<f64>,
    domain: &Box3,
    face: Face,
    rule: &QuadratureRule,
) -> Result<f64> {
    let (points, normal) = rule.face_points(domain, face);
    let mut total = 0.0;
    for (p, w) in points {
        let v = f(p, normal)?;
        if !v.is_finite() {
            return Err(Error::NonFiniteIntegrand);
        }
        total += w * v;
    }
    Ok(total)
}

/// Neumann faces of body `index` (0 or 1).
fn neumann_faces(index: usize) -> &'static [Face] {
    const LOADED: [Face; 5] = [Face::XLow, Face::YLow, Face::YHigh, Face::ZLow, Face::ZHigh];
    if index == 0 {
        &LOADED
    } else {
        &Face::LATERAL
    }
}

/// Cartesian gradient, pressure and nominal stress of a body at `p`.
fn body_state(body: &BodySpec, p: Vec3) -> Result<(Mat3, f64, Mat3)> {
    let f = kinematics::cartesian_gradient(&body.map, &body.domain, p)?;
    let pressure = body.pressure_at(p)?;
    Ok((f, pressure, material::piola_stress(&body.material, &f, pressure)?))
}

/// Boundary data of the loaded system.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadData {
    /// Uniform normal dead load `tau` on the loaded face, other Neumann
    /// faces traction-free, prescribed displacement on the held face.
    Uniform { tau: f64, dirichlet: DirichletData },
    /// Tractions and held-face placement of a designated state.
    Designated(SystemSpec),
}

impl LoadData {
    /// Prescribed nominal traction on a Neumann face of body `index`.
    pub fn traction(&self, index: usize, face: Face, p: Vec3, normal: Vec3) -> Result<Vec3> {
        match self {
            LoadData::Uniform { tau, .. } => Ok(if index == 0 && face == Face::XLow {
                normal * *tau
            } else {
                Vec3::ZERO
            }),
            LoadData::Designated(state) => {
                let body = if index == 0 { &state.body1 } else { &state.body2 };
                Ok(body_state(body, p)?.2.mul_vec(&normal))
            }
        }
    }

    pub fn dirichlet(&self) -> DirichletData {
        match self {
            LoadData::Uniform { dirichlet, .. } => *dirichlet,
            LoadData::Designated(state) => DirichletData::Placement(state.body2.map),
        }
    }

    /// Normal Cauchy load on the loaded face.
    pub fn normal_load(&self) -> Result<f64> {
        match self {
            LoadData::Uniform { tau, .. } => Ok(*tau),
            LoadData::Designated(state) => contact::contact_traction(&state.body1, state.body1.domain.x_lo),
        }
    }
}

/// `sum of integral W dV - integral g_N . u dA - g * gap * a_C`.
///
/// The last term is the work against cohesion over the deformed contact area
/// `a_C` of the held body; it vanishes for closed contact and for
/// cohesionless interfaces.
pub fn potential_energy(system: &SystemSpec, load: &LoadData, rule: &QuadratureRule) -> Result<f64> {
    let mut total = 0.0;
    for (index, body) in system.bodies().into_iter().enumerate() {
        total += integrate_volume(
            |p| {
                let f = kinematics::deformation_gradient(&body.map, &body.domain, p)?;
                material::strain_energy(&body.material, &f)
            },
            &body.domain,
            rule,
        )?;
        for &face in neumann_faces(index) {
            total -= integrate_face(
                |p, n| {
                    let u = kinematics::displacement(&body.map, &body.domain, p)?;
                    Ok(load.traction(index, face, p, n)?.dot(&u))
                },
                &body.domain,
                face,
                rule,
            )?;
        }
    }
    if system.cohesion > 0.0 {
        let area = deformed_contact_area(&system.body2, rule)?;
        total -= system.cohesion * (contact::gap_value(system)? - system.gap_allowance) * area;
    }
    Ok(total)
}

/// Deformed area of a body's `X = x_lo` face, `integral of |cof F N| dA`.
pub fn deformed_contact_area(body: &BodySpec, rule: &QuadratureRule) -> Result<f64> {
    integrate_face(
        |p, n| {
            Ok(cofactor(&kinematics::deformation_gradient(&body.map, &body.domain, p)?)
                .mul_vec(&n)
                .norm())
        },
        &body.domain,
        Face::XLow,
        rule,
    )
}

/// Amplitudes of the self-equilibrated stresses added to a body.
///
/// Each is generated by a stress function that vanishes with its gradient on
/// the whole boundary, so it is divergence-free and traction-free.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SelfStress {
    /// Stress function in the `X-Y` plane.
    pub xy: f64,
    /// Stress function in the `X-Z` plane.
    pub xz: f64,
}

impl SelfStress {
    pub fn is_zero(&self) -> bool {
        self.xy == 0.0 && self.xz == 0.0
    }

    /// Nominal self-stress at `p`.
    pub fn stress(&self, domain: &Box3, p: Vec3) -> Mat3 {
        let mut s = Mat3::ZERO;
        for (amp, other) in [(self.xy, 1), (self.xz, 2)] {
            if amp == 0.0 {
                continue;
            }
            let (fx, dfx, ddfx) = bubble(p.x(), domain.x_lo, domain.x_hi);
            let (fo, dfo, ddfo) = bubble(p[other], domain.bound(other, false), domain.bound(other, true));
            // phi = amp fx fo; the stress is the Airy form in the (x, other) plane.
            s[(0, 0)] += amp * fx * ddfo;
            s[(other, other)] += amp * ddfx * fo;
            s[(0, other)] -= amp * dfx * dfo;
            s[(other, 0)] -= amp * dfx * dfo;
        }
        s
    }
}

/// `((t - lo)(hi - t))^2` with its first two derivatives.
fn bubble(t: f64, lo: f64, hi: f64) -> (f64, f64, f64) {
    let q = (t - lo) * (hi - t);
    let dq = hi + lo - 2.0 * t;
    (q * q, 2.0 * q * dq, 2.0 * dq * dq - 4.0 * q)
}

/// A statically admissible trial: the stress of `base` plus self-stresses,
/// with the gradient and pressure recovered from the constitutive law.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticTrial {
    pub base: SystemSpec,
    pub self_stress: [SelfStress; 2],
}

impl StaticTrial {
    /// The stress field of `system` itself.
    pub fn exact(system: &SystemSpec) -> StaticTrial {
        StaticTrial {
            base: system.clone(),
            self_stress: [SelfStress::default(); 2],
        }
    }

    pub fn body(&self, index: usize) -> &BodySpec {
        if index == 0 {
            &self.base.body1
        } else {
            &self.base.body2
        }
    }

    /// Cartesian gradient, pressure and nominal stress of body `index` at `p`.
    pub fn state(&self, index: usize, p: Vec3) -> Result<(Mat3, f64, Mat3)> {
        let body = self.body(index);
        let (f, pressure, stress) = body_state(body, p)?;
        let extra = &self.self_stress[index];
        if extra.is_zero() {
            return Ok((f, pressure, stress));
        }
        let target = stress + extra.stress(&body.domain, p);
        let (f, pressure) = invert_stress(&body.material, &target, f, pressure)?;
        Ok((f, pressure, target))
    }
}

/// Solves `C F - p cof F = target`, `det F = 1` by Newton's method from `(f, p)`.
pub fn invert_stress(model: &MaterialModel, target: &Mat3, mut f: Mat3, mut p: f64) -> Result<(Mat3, f64)> {
    let MaterialModel::NeoHookeanIncompressible { c } = *model else {
        return Err(Error::InvalidParameters(
            "stress inversion needs the incompressible model".into(),
        ));
    };
    let scale = target.max_abs().max(c);
    let mut residual = f64::INFINITY;
    for _ in 0..NEWTON_MAX_ITER {
        let cof = cofactor(&f);
        let r_stress = f * c - cof * p - *target;
        let r_det = det(&f) - 1.0;
        residual = r_stress.max_abs().max(r_det.abs() * scale);
        if r_stress.max_abs() <= 1e-13 * scale && r_det.abs() <= 1e-13 {
            return Ok((f, p));
        }
        let mut jac = SMatrix::<f64, 10, 10>::zeros();
        let mut rhs = SVector::<f64, 10>::zeros();
        for k in 0..9 {
            let (i, j) = (k / 3, k % 3);
            let mut g = Mat3::ZERO;
            g[(i, j)] = 1.0;
            // cof is quadratic, so the polarization difference is its exact derivative.
            let dcof = (cofactor(&(f + g)) - cofactor(&(f - g))) * 0.5;
            let col = g * c - dcof * p;
            for (row, v) in col.0.iter().flatten().enumerate() {
                jac[(row, k)] = *v;
            }
            jac[(9, k)] = cof[(i, j)];
            rhs[k] = -r_stress[(i, j)];
        }
        for (row, v) in cof.0.iter().flatten().enumerate() {
            jac[(row, 9)] = -v;
        }
        rhs[9] = -r_det;
        let step = jac
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Numerical("singular Jacobian in stress inversion".into()))?;
        f += Mat3::from_fn(|i, j| step[3 * i + j]);
        p += step[9];
    }
    // Past a fold of the stress map (p beyond the extensional-mode bound)
    // nearby targets have no preimage; such a stress is not a trial field.
    Err(Error::InadmissibleTrial {
        condition: "constitutive preimage of the trial stress".into(),
        residual,
    })
}

/// `integral over the held face of P N . u_D dA - sum of integral [P:(F - I) - W] dV`.
pub fn complementary_energy(trial: &StaticTrial, dirichlet: &DirichletData, rule: &QuadratureRule) -> Result<f64> {
    let mut total = 0.0;
    for index in 0..2 {
        let body = trial.body(index);
        total -= integrate_volume(
            |p| {
                let (f, _, stress) = trial.state(index, p)?;
                Ok(ddot(&stress, &(f - Mat3::IDENTITY)) - material::strain_energy(&body.material, &f)?)
            },
            &body.domain,
            rule,
        )?;
    }
    let body2 = trial.body(1);
    total += integrate_face(
        |p, n| {
            Ok(trial
                .state(1, p)?
                .2
                .mul_vec(&n)
                .dot(&dirichlet.displacement(&body2.domain, p)?))
        },
        &body2.domain,
        Face::XHigh,
        rule,
    )?;
    Ok(total)
}

/// `|surface work of P'' on u' - integral P'':Grad u' dV|` for a kinematic
/// system `u'` and a static trial `P''`.
///
/// Vanishes whenever `Div P'' = 0`; surface terms use the trial's own tractions.
pub fn divergence_identity_pair(kinematic: &SystemSpec, trial: &StaticTrial, rule: &QuadratureRule) -> Result<f64> {
    let mut surface = 0.0;
    let mut volume = 0.0;
    for (index, body) in kinematic.bodies().into_iter().enumerate() {
        let static_domain = &trial.body(index).domain;
        if static_domain != &body.domain {
            return Err(Error::InvalidParameters(
                "kinematic and static bodies occupy different domains".into(),
            ));
        }
        for face in Face::ALL {
            surface += integrate_face(
                |p, n| {
                    let u = kinematics::displacement(&body.map, &body.domain, p)?;
                    Ok(trial.state(index, p)?.2.mul_vec(&n).dot(&u))
                },
                &body.domain,
                face,
                rule,
            )?;
        }
        volume += integrate_volume(
            |p| {
                let grad_u = kinematics::cartesian_gradient(&body.map, &body.domain, p)? - Mat3::IDENTITY;
                Ok(ddot(&trial.state(index, p)?.2, &grad_u))
            },
            &body.domain,
            rule,
        )?;
    }
    Ok((surface - volume).abs())
}

/// Divergence identity with the system's own displacement and stress.
pub fn divergence_identity_residual(system: &SystemSpec, rule: &QuadratureRule) -> Result<f64> {
    divergence_identity_pair(system, &StaticTrial::exact(system), rule)
}

/// Largest mismatch between the trial's tractions and the prescribed Neumann data.
pub fn neumann_mismatch(trial: &StaticTrial, load: &LoadData, rule: &QuadratureRule) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for index in 0..2 {
        let domain = trial.body(index).domain;
        for &face in neumann_faces(index) {
            let (points, n) = rule.face_points(&domain, face);
            for (p, _) in points {
                let t = trial.state(index, p)?.2.mul_vec(&n);
                worst = worst.max((t - load.traction(index, face, p, n)?).norm());
            }
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyEnclosure {
    pub e_complementary: f64,
    pub e_potential: f64,
    /// `e_potential - e_complementary`.
    pub gap: f64,
}

fn inadmissible(condition: impl Into<String>, residual: f64) -> Error {
    Error::InadmissibleTrial {
        condition: condition.into(),
        residual,
    }
}

/// Checks both trials against `load` and returns the energy pair.
pub fn enclosure(
    kinematic: &SystemSpec,
    trial: &StaticTrial,
    load: &LoadData,
    rule: &QuadratureRule,
) -> Result<EnergyEnclosure> {
    let dirichlet = load.dirichlet();
    let kin = contact::check_kinematic(kinematic, &dirichlet)?;
    if let Some((c, r)) = kin.first_failure() {
        return Err(inadmissible(format!("kinematic {c}"), r));
    }
    let stat = contact::check_static(&trial.base, load.normal_load()?)?;
    if let Some((c, r)) = stat.first_failure() {
        return Err(inadmissible(format!("static {c}"), r));
    }
    let mismatch = neumann_mismatch(trial, load, rule)?;
    let scale = trial
        .base
        .body1
        .material
        .shear_constant()
        .max(trial.base.body2.material.shear_constant())
        .max(1.0);
    if mismatch > NEUMANN_TOLERANCE * scale {
        return Err(inadmissible(format!("static {}", Condition::Neumann), mismatch));
    }
    let e_potential = potential_energy(kinematic, load, rule)?;
    let e_complementary = complementary_energy(trial, &dirichlet, rule)?;
    Ok(EnergyEnclosure {
        e_complementary,
        e_potential,
        gap: e_potential - e_complementary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::DeformationMap;
    use crate::material::PressureField;

    fn body(x_lo: f64, x_hi: f64, c: f64, map: DeformationMap, p: f64) -> BodySpec {
        BodySpec::new(
            Box3::slab(x_lo, x_hi).unwrap(),
            MaterialModel::NeoHookeanIncompressible { c },
            map,
            PressureField::Constant(p),
        )
        .unwrap()
    }

    /// Closed triaxial state with equal stretches carrying normal load `tau`.
    fn triaxial_state(c1: f64, c2: f64, a: f64, b1: f64, tau: f64) -> SystemSpec {
        let m = DeformationMap::TriaxialStretch { a, b: b1 };
        SystemSpec::new(
            body(0.0, 0.5, c1, m, c1 * a * a - tau),
            body(0.5, 1.0, c2, m, c2 * a * a - tau),
            0.0,
            0.0,
        )
        .unwrap()
    }

    fn rule(order: usize) -> QuadratureRule {
        QuadratureRule::new(order).unwrap()
    }

    #[test]
    fn volume_integration_examples() {
        let r = rule(2);
        assert!((integrate_volume(|_| Ok(1.0), &Box3::unit(), &r).unwrap() - 1.0).abs() < 1e-15);
        let v = integrate_volume(|p| Ok(p.x() * p.x()), &Box3::unit(), &r).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-14);
        assert_eq!(
            integrate_volume(|_| Ok(f64::NAN), &Box3::unit(), &r),
            Err(Error::NonFiniteIntegrand)
        );
    }

    #[test]
    fn bent_strain_energy_converges() {
        let b = body(
            0.0,
            0.5,
            1.0,
            DeformationMap::StretchBend {
                bend: 1.0,
                a: 1.0,
                b: 1.0,
            },
            1.0,
        );
        let energy = |order| {
            integrate_volume(
                |p| material::strain_energy(&b.material, &kinematics::deformation_gradient(&b.map, &b.domain, p)?),
                &b.domain,
                &rule(order),
            )
            .unwrap()
        };
        assert!((energy(8) - energy(16)).abs() < 1e-9);
    }

    #[test]
    fn potential_energy_examples() {
        let uniform = |tau| LoadData::Uniform {
            tau,
            dirichlet: DirichletData::Displacement(Vec3::ZERO),
        };
        let id = triaxial_state(1.0, 1.0, 1.0, 0.0, 0.0);
        assert!(potential_energy(&id, &uniform(0.0), &rule(8)).unwrap().abs() < 1e-15);

        let a: f64 = 0.81;
        let w = 0.5 * (a * a + 2.0 / a - 3.0);
        let s = triaxial_state(1.0, 1.0, a, 0.0, 0.0);
        let e0 = potential_energy(&s, &uniform(0.0), &rule(8)).unwrap();
        assert!((e0 - w).abs() < 1e-10);
        assert!((e0 - 0.0626180).abs() < 1e-7);

        let b1 = 0.07;
        let s = triaxial_state(1.0, 1.0, a, b1, -0.1);
        let e = potential_energy(&s, &uniform(-0.1), &rule(8)).unwrap();
        assert!((e - (w - 0.1 * b1)).abs() < 1e-12);
    }

    #[test]
    fn complementary_energy_of_stress_free_state_is_zero() {
        let id = triaxial_state(1.0, 1.0, 1.0, 0.0, 0.0);
        let e = complementary_energy(
            &StaticTrial::exact(&id),
            &DirichletData::Displacement(Vec3::ZERO),
            &rule(8),
        );
        assert!(e.unwrap().abs() < 1e-15);
    }

    #[test]
    fn energies_agree_at_exact_triaxial_state() {
        let s = triaxial_state(1.0, 1.5, 0.81, 0.05, -0.1);
        let load = LoadData::Designated(s.clone());
        let enc = enclosure(&s, &StaticTrial::exact(&s), &load, &rule(8)).unwrap();
        assert!(enc.gap.abs() < 1e-9, "{enc:?}");
    }

    #[test]
    fn self_stress_is_equilibrated_and_traction_free() {
        let s = SelfStress { xy: 0.7, xz: -0.4 };
        let d = Box3::slab(0.0, 0.5).unwrap();
        let p = Vec3::new(0.13, 0.61, 0.27);
        let h = 1e-5;
        for i in 0..3 {
            let mut div = 0.0;
            for j in 0..3 {
                let mut e = [0.0; 3];
                e[j] = h;
                div += (s.stress(&d, p + Vec3(e))[(i, j)] - s.stress(&d, p - Vec3(e))[(i, j)]) / (2.0 * h);
            }
            assert!(div.abs() < 1e-8);
        }
        let r = rule(4);
        for face in Face::ALL {
            let (points, n) = r.face_points(&d, face);
            for (q, _) in points {
                assert!(s.stress(&d, q).mul_vec(&n).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn stress_inversion_recovers_constitutive_state() {
        let m = MaterialModel::NeoHookeanIncompressible { c: 1.3 };
        let f = Mat3([[0.9, 0.1, 0.0], [0.05, 1.1, 0.02], [0.0, -0.03, 1.0]]);
        let f = f * (1.0 / det(&f).cbrt());
        let target = material::piola_stress(&m, &f, 0.4).unwrap();
        let (g, p) = invert_stress(&m, &target, Mat3::IDENTITY, 0.0).unwrap();
        assert!((g - f).max_abs() < 1e-12 && (p - 0.4).abs() < 1e-12);
    }

    #[test]
    fn identity_holds_for_equilibrated_fields() {
        for tau in [-0.2, -0.1, 0.0] {
            let s = triaxial_state(1.0, 2.0, 0.81, 0.03, tau);
            assert!(divergence_identity_residual(&s, &rule(8)).unwrap() < 1e-9);
        }
        let trial = StaticTrial {
            self_stress: [SelfStress { xy: 0.5, xz: 0.2 }, SelfStress { xy: -0.3, xz: 0.0 }],
            ..StaticTrial::exact(&triaxial_state(1.0, 1.0, 0.9, 0.0, -0.05))
        };
        let kin = triaxial_state(1.0, 1.0, 0.8, 0.01, 0.0);
        assert!(divergence_identity_pair(&kin, &trial, &rule(10)).unwrap() < 1e-9);
    }

    #[test]
    fn identity_fails_for_unbalanced_bent_pressure() {
        let m = DeformationMap::StretchBend {
            bend: 1.0,
            a: 1.0,
            b: 1.0,
        };
        let s = SystemSpec::new(body(0.0, 0.5, 1.0, m, 1.0), body(0.5, 1.0, 1.0, m, 1.0), 0.0, 0.0).unwrap();
        assert!(divergence_identity_residual(&s, &rule(8)).unwrap() > 1e-3);
    }

    #[test]
    fn perturbed_static_trial_lowers_complementary_energy() {
        let s = triaxial_state(1.0, 1.0, 0.81, 0.0, -0.1);
        let load = LoadData::Designated(s.clone());
        let exact = complementary_energy(&StaticTrial::exact(&s), &load.dirichlet(), &rule(8)).unwrap();
        let trial = StaticTrial {
            self_stress: [SelfStress { xy: 2.0, xz: 0.0 }, SelfStress::default()],
            ..StaticTrial::exact(&s)
        };
        let enc = enclosure(&s, &trial, &load, &rule(8)).unwrap();
        assert!(
            enc.e_complementary < exact - 1e-8,
            "{} vs {}",
            enc.e_complementary,
            exact
        );
        assert!(enc.gap > 0.0);
    }

    #[test]
    fn perturbed_kinematic_trial_raises_potential_energy() {
        let s = triaxial_state(1.0, 1.0, 0.81, 0.0, -0.1);
        let load = LoadData::Designated(s.clone());
        let mut kin = s.clone();
        kin.body1.map = DeformationMap::TriaxialStretch { a: 0.85, b: -0.03 };
        let enc = enclosure(&kin, &StaticTrial::exact(&s), &load, &rule(8)).unwrap();
        assert!(enc.gap > 1e-6, "{enc:?}");
    }

    #[test]
    fn enclosure_names_the_failing_condition() {
        let s = triaxial_state(1.0, 1.0, 0.81, 0.0, -0.1);
        let load = LoadData::Designated(s.clone());
        let mut kin = s.clone();
        kin.body1.map = DeformationMap::TriaxialStretch { a: 0.81, b: 0.05 };
        match enclosure(&kin, &StaticTrial::exact(&s), &load, &rule(8)) {
            Err(Error::InadmissibleTrial { condition, residual }) => {
                assert_eq!(condition, "kinematic gap");
                assert!((residual - 0.05).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
