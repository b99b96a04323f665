//! Admissible ranges of the uniform dead load.
//!
//! Three independent routes are provided: the closed-form intervals of the
//! three worked examples, a bisection search over body pressures driven by
//! [`criteria_check`], and an exhaustive grid oracle.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::contact::{self, BodySpec, Regime, SystemSpec};
use crate::error::{Error, Result};
use crate::kinematics::{self, Box3, DeformationMap, MIN_RADIUS};
use crate::material::{self, MaterialModel, PressureField};
use crate::quadrature::QuadratureRule;
use crate::tensor3::{cofactor, ddot, Mat3, Vec3};

/// The quadratic form must exceed this multiple of `C` to count as positive.
pub const POSITIVITY_TOLERANCE: f64 = 1e-12;
/// Offset used when probing just inside or outside an open endpoint.
pub const ENDPOINT_PROBE: f64 = 1e-6;
/// Gauss nodes along `X` at which the criteria are sampled, besides both end faces.
pub const CRITERIA_NODES: usize = 32;
/// Smallest probe count accepted by [`criteria_check`].
pub const MIN_PROBES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadInterval {
    pub tau_lo: f64,
    pub tau_hi: f64,
    pub regime: Regime,
    /// True when a closed-contact interval has `tau_lo >= tau_hi`. Open-contact
    /// singletons are never empty.
    pub empty: bool,
}

impl LoadInterval {
    pub fn open_interval(tau_lo: f64, tau_hi: f64) -> Self {
        LoadInterval {
            tau_lo,
            tau_hi,
            regime: Regime::Closed,
            empty: !(tau_lo < tau_hi),
        }
    }

    /// The single admissible load of an open interface.
    pub fn singleton(tau: f64) -> Self {
        LoadInterval {
            tau_lo: tau,
            tau_hi: tau,
            regime: Regime::Open,
            empty: false,
        }
    }

    pub fn empty_closed() -> Self {
        LoadInterval {
            tau_lo: f64::NAN,
            tau_hi: f64::NAN,
            regime: Regime::Closed,
            empty: true,
        }
    }

    /// Membership with open endpoints; a singleton contains only its value.
    pub fn contains(&self, tau: f64) -> bool {
        match self.regime {
            Regime::Open => tau == self.tau_lo,
            Regime::Closed => !self.empty && self.tau_lo < tau && tau < self.tau_hi,
        }
    }

    pub fn width(&self) -> f64 {
        if self.empty {
            0.0
        } else {
            self.tau_hi - self.tau_lo
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriteriaResult {
    pub primal_ok: bool,
    pub complementary_ok: bool,
    /// Smallest value of the constrained quadratic form over unit probes.
    pub min_quadratic_value: f64,
    /// Smallest value over the whole constraint tangent space, extensional
    /// modes included.
    pub extensional_min: f64,
    pub pressure_window: (f64, f64),
}

/// Orthonormal basis (Frobenius) of the directions probed at gradient `f`.
///
/// Diagonal incompressible states use the off-diagonal shear directions,
/// which are tangent to the constraint because `cof F` is diagonal. Other
/// incompressible states use the orthogonal complement of `cof F`, and the
/// compressible model uses every direction.
fn probe_directions(model: &MaterialModel, f: &Mat3, shear_only: bool) -> Vec<Mat3> {
    let unit = |i: usize, j: usize| {
        let mut g = Mat3::ZERO;
        g[(i, j)] = 1.0;
        g
    };
    if !model.is_incompressible() {
        return (0..9).map(|k| unit(k / 3, k % 3)).collect();
    }
    if shear_only {
        return (0..9).filter(|k| k / 3 != k % 3).map(|k| unit(k / 3, k % 3)).collect();
    }
    let cof = cofactor(f);
    let normal = cof * (1.0 / cof.norm());
    let mut basis: Vec<Mat3> = Vec::new();
    for k in 0..9 {
        let mut g = unit(k / 3, k % 3);
        g = g - normal * ddot(&normal, &g);
        for b in &basis {
            g = g - *b * ddot(b, &g);
        }
        let n = g.norm();
        if n > 1e-8 {
            basis.push(g * (1.0 / n));
        }
    }
    basis
}

/// Orthonormal basis of the span of seeded random combinations of `dirs`.
fn random_span(dirs: &[Mat3], probe_count: usize, rng: &mut ChaCha8Rng) -> Vec<Mat3> {
    let mut basis: Vec<Mat3> = Vec::new();
    for _ in 0..probe_count {
        let mut g = Mat3::ZERO;
        for d in dirs {
            g += *d * rng.gen_range(-1.0..1.0);
        }
        for b in &basis {
            g = g - *b * ddot(b, &g);
        }
        let n = g.norm();
        if n > 1e-8 {
            basis.push(g * (1.0 / n));
        }
        if basis.len() == dirs.len() {
            break;
        }
    }
    basis
}

/// Smallest eigenvalue of the quadratic form restricted to `basis`.
fn ritz_minimum(model: &MaterialModel, f: &Mat3, pressure: f64, basis: &[Mat3]) -> Result<f64> {
    let n = basis.len();
    if n == 0 {
        return Ok(f64::INFINITY);
    }
    let mut h = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let plus = material::hessian_quadratic_form(model, f, pressure, &(basis[i] + basis[j]))?;
            let minus = material::hessian_quadratic_form(model, f, pressure, &(basis[i] - basis[j]))?;
            let v = 0.25 * (plus - minus);
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    Ok(SymmetricEigen::new(h)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min))
}

/// Reference points at which the criteria are evaluated: both `X` faces and
/// Gauss nodes in between, on the body's mid-line.
fn criteria_points(domain: &Box3) -> Result<Vec<Vec3>> {
    let c = domain.center();
    let rule = QuadratureRule::new(CRITERIA_NODES)?;
    let mut xs = vec![domain.x_lo];
    xs.extend(rule.interval(domain.x_lo, domain.x_hi).into_iter().map(|(x, _)| x));
    xs.push(domain.x_hi);
    Ok(xs.into_iter().map(|x| Vec3::new(x, c.y(), c.z())).collect())
}

/// Second-order criteria for one body.
///
/// The primal probes carry a bubble in `X` vanishing on the held and contact
/// faces; it is factored out, so both sides reduce to the pointwise form on
/// the probe span, with face points taken by continuity.
pub fn criteria_check(body: &BodySpec, probe_count: usize, seed: u64) -> Result<CriteriaResult> {
    if probe_count < MIN_PROBES {
        return Err(Error::InvalidParameters(format!(
            "probe_count must be at least {MIN_PROBES}"
        )));
    }
    body.validate()?;
    let shear_only = body.material.is_incompressible() && body.map.is_isochoric_family();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_value = f64::INFINITY;
    let mut extensional_min = f64::INFINITY;
    let mut lambda_max: f64 = 0.0;
    let mut last: Option<(Mat3, f64)> = None;
    let mut span: Option<Vec<Mat3>> = None;
    for p in criteria_points(&body.domain)? {
        let f = kinematics::deformation_gradient(&body.map, &body.domain, p)?;
        let pressure = body.pressure_at(p)?;
        lambda_max = lambda_max.max(kinematics::principal_stretches(&body.map, &body.domain, p)?.max());
        if last == Some((f, pressure)) {
            continue;
        }
        last = Some((f, pressure));
        let dirs = probe_directions(&body.material, &f, shear_only);
        let basis = match (&span, shear_only) {
            (Some(b), true) => b.clone(),
            _ => {
                let b = random_span(&dirs, probe_count, &mut rng);
                if shear_only {
                    span = Some(b.clone());
                }
                b
            }
        };
        min_value = min_value.min(ritz_minimum(&body.material, &f, pressure, &basis)?);
        let full = probe_directions(&body.material, &f, false);
        extensional_min = extensional_min.min(ritz_minimum(&body.material, &f, pressure, &full)?);
    }
    let c = body.material.shear_constant();
    let ok = min_value > POSITIVITY_TOLERANCE * c;
    Ok(CriteriaResult {
        primal_ok: ok,
        complementary_ok: ok,
        min_quadratic_value: min_value,
        extensional_min,
        pressure_window: (-c / lambda_max, c / lambda_max),
    })
}

/// Closed-form pressure window `(-C / lambda_max, C / lambda_max)`.
pub fn pressure_window(body: &BodySpec) -> Result<(f64, f64)> {
    let c = body.material.shear_constant();
    let lambda_max = match body.map {
        DeformationMap::TriaxialStretch { a, .. } => a.max(1.0 / a.sqrt()),
        DeformationMap::StretchBend { bend, a, b } => {
            let r_in = kinematics::radius_at(a, b, body.domain.x_lo)?;
            let r_out = kinematics::radius_at(a, b, body.domain.x_hi)?;
            (a / r_in).max(bend * r_out / a.sqrt()).max(1.0 / (bend * a.sqrt()))
        }
        DeformationMap::Homogeneous { .. } => return Err(Error::FamilyMismatch),
    };
    Ok((-c / lambda_max, c / lambda_max))
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameters(format!("{name} must be positive (got {v})")))
    }
}

/// Load range for two stretched slabs in frictionless, cohesionless contact.
pub fn load_interval_compression(c1: f64, c2: f64, a1: f64, a2: f64, contact_closed: bool) -> Result<LoadInterval> {
    for (name, v) in [("C1", c1), ("C2", c2), ("a1", a1), ("a2", a2)] {
        positive(name, v)?;
    }
    if !contact_closed {
        return Ok(LoadInterval::singleton(0.0));
    }
    let lower = (c1 * (a1.sqrt() - a1 * a1)).min(c2 * (a2.sqrt() - a2 * a2));
    Ok(LoadInterval::open_interval(-lower, 0.0))
}

/// Load range for two stretched slabs with interface cohesion `g`.
pub fn load_interval_cohesive(
    c1: f64,
    c2: f64,
    a1: f64,
    a2: f64,
    g: f64,
    contact_closed: bool,
) -> Result<LoadInterval> {
    for (name, v) in [("C1", c1), ("C2", c2), ("a1", a1), ("a2", a2), ("g", g)] {
        positive(name, v)?;
    }
    if !contact_closed {
        return Ok(LoadInterval::singleton(g));
    }
    let lower = (c1 * (a1.sqrt() - a1 * a1)).min(c2 * (a2.sqrt() - a2 * a2));
    let upper = g.min(c1 * (a1.sqrt() + a1 * a1)).min(c2 * (a2.sqrt() + a2 * a2));
    Ok(LoadInterval::open_interval(-lower, upper))
}

/// Load range for two slabs bent into concentric sectors with common bend `A`.
#[allow(clippy::too_many_arguments)]
pub fn load_interval_bending(
    c1: f64,
    c2: f64,
    bend: f64,
    a1: f64,
    a2: f64,
    b1: f64,
    b2: f64,
    contact_closed: bool,
) -> Result<LoadInterval> {
    for (name, v) in [("C1", c1), ("C2", c2), ("A", bend), ("a1", a1), ("a2", a2)] {
        positive(name, v)?;
    }
    let radius = |name: &str, r2: f64| -> Result<f64> {
        if r2.is_finite() && r2 > MIN_RADIUS * MIN_RADIUS {
            Ok(r2.sqrt())
        } else {
            Err(Error::InvalidParameters(format!(
                "{name}^2 = {r2} must exceed the minimum radius squared"
            )))
        }
    };
    let r0 = radius("r0", b1)?;
    let r1 = radius("r1", a1 + b1)?;
    let r2 = radius("r2", 2.0 * a2 + b2)?;
    if !contact_closed {
        return Ok(LoadInterval::singleton(0.0));
    }
    let term = |c: f64, a: f64, r_in: f64, r_out: f64| {
        let lambda_max = (a / r_in).max(bend * r_out / a.sqrt()).max(1.0 / (bend * a.sqrt()));
        c * (1.0 / lambda_max - a * a / (r1 * r1))
    };
    let lower = term(c1, a1, r0, r1).min(term(c2, a2, r1, r2));
    Ok(LoadInterval::open_interval(-lower, 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Example {
    /// Two stretched slabs, no cohesion.
    Compression,
    /// Two stretched slabs with interface cohesion.
    Cohesive,
    /// Two slabs under combined stretch and bending.
    Bending,
}

impl Example {
    pub fn name(self) -> &'static str {
        match self {
            Example::Compression => "compression",
            Example::Cohesive => "cohesive",
            Example::Bending => "bending",
        }
    }
}

/// Kinematic and material parameters of a two-slab example.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExampleParams {
    pub c1: f64,
    pub c2: f64,
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    /// Bend parameter `A`, used by the bending example only.
    pub bend: f64,
    pub cohesion: f64,
    pub gap_allowance: f64,
}

impl ExampleParams {
    /// Closed triaxial pair with `b2` chosen to close the interface.
    pub fn triaxial(c1: f64, c2: f64, a1: f64, a2: f64) -> Self {
        ExampleParams {
            c1,
            c2,
            a1,
            a2,
            b1: 0.0,
            b2: 0.5 * (a1 - a2),
            bend: 1.0,
            cohesion: 0.0,
            gap_allowance: 0.0,
        }
    }

    /// Closed bent pair with `b2` chosen to close the interface.
    pub fn bending(c1: f64, c2: f64, bend: f64, a1: f64, a2: f64, b1: f64) -> Self {
        ExampleParams {
            c1,
            c2,
            a1,
            a2,
            b1,
            b2: a1 + b1 - a2,
            bend,
            cohesion: 0.0,
            gap_allowance: 0.0,
        }
    }

    pub fn with_cohesion(mut self, g: f64) -> Self {
        self.cohesion = g;
        self
    }

    fn map(&self, example: Example, index: usize) -> DeformationMap {
        let (a, b) = if index == 0 {
            (self.a1, self.b1)
        } else {
            (self.a2, self.b2)
        };
        match example {
            Example::Bending => DeformationMap::StretchBend { bend: self.bend, a, b },
            _ => DeformationMap::TriaxialStretch { a, b },
        }
    }

    /// Body `index` (0 or 1) on its unit-section slab with constant pressure `p`.
    pub fn body(&self, example: Example, index: usize, p: f64) -> Result<BodySpec> {
        let (domain, c) = if index == 0 {
            (Box3::slab(0.0, 0.5)?, self.c1)
        } else {
            (Box3::slab(0.5, 1.0)?, self.c2)
        };
        BodySpec::new(
            domain,
            MaterialModel::NeoHookeanIncompressible { c },
            self.map(example, index),
            PressureField::Constant(p),
        )
    }

    pub fn system(&self, example: Example, p1: f64, p2: f64) -> Result<SystemSpec> {
        let g = if example == Example::Cohesive {
            self.cohesion
        } else {
            0.0
        };
        SystemSpec::new(
            self.body(example, 0, p1)?,
            self.body(example, 1, p2)?,
            self.gap_allowance,
            g,
        )
    }

    /// Interface regime of the kinematic parameters.
    pub fn regime(&self, example: Example) -> Result<Regime> {
        let gap = contact::gap_value(&self.system(example, 0.0, 0.0)?)? - self.gap_allowance;
        if gap > contact::GAP_TOLERANCE {
            return Err(Error::InvalidParameters(format!("bodies interpenetrate (gap {gap:e})")));
        }
        Ok(if gap.abs() <= contact::GAP_TOLERANCE {
            Regime::Closed
        } else {
            Regime::Open
        })
    }

    /// Cohesion bound on the interface traction for `example`.
    pub fn traction_cap(&self, example: Example) -> f64 {
        if example == Example::Cohesive {
            self.cohesion
        } else {
            0.0
        }
    }

    pub fn scaled(&self, k: f64) -> Self {
        ExampleParams {
            c1: k * self.c1,
            c2: k * self.c2,
            cohesion: k * self.cohesion,
            ..*self
        }
    }

    /// Exchanges `(C, a)` between the bodies, keeping `b1` and the interface gap.
    pub fn swapped(&self, example: Example) -> Self {
        let mut out = ExampleParams {
            c1: self.c2,
            c2: self.c1,
            a1: self.a2,
            a2: self.a1,
            ..*self
        };
        match example {
            // Radii at the shared face x = 1/2 are sqrt(a + b).
            Example::Bending => {
                let gap = (self.a1 + self.b1).sqrt() - (self.a2 + self.b2).sqrt();
                out.b2 = ((out.a1 + out.b1).sqrt() - gap).powi(2) - out.a2;
            }
            _ => {
                let gap = 0.5 * (self.a1 - self.a2) + self.b1 - self.b2;
                out.b2 = 0.5 * (out.a1 - out.a2) + out.b1 - gap;
            }
        }
        out
    }
}

/// The closed-form interval of `example`.
pub fn closed_form_interval(example: Example, params: &ExampleParams) -> Result<LoadInterval> {
    let closed = params.regime(example)? == Regime::Closed;
    let p = params;
    match example {
        Example::Compression => load_interval_compression(p.c1, p.c2, p.a1, p.a2, closed),
        Example::Cohesive => load_interval_cohesive(p.c1, p.c2, p.a1, p.a2, p.cohesion, closed),
        Example::Bending => load_interval_bending(p.c1, p.c2, p.bend, p.a1, p.a2, p.b1, p.b2, closed),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub probe_count: usize,
    pub seed: u64,
    /// Bisection stops when the bracket is narrower than this.
    pub tolerance: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            probe_count: 200,
            seed: 42,
            tolerance: 1e-12,
        }
    }
}

/// Pressure window of one body found by bisection on [`criteria_check`].
///
/// The form is affine in the pressure and positive at zero pressure, so the
/// admissible pressures form an interval around zero.
fn numeric_pressure_window(
    example: Example,
    params: &ExampleParams,
    index: usize,
    config: &SearchConfig,
) -> Result<(f64, f64)> {
    let ok = |p: f64| -> Result<bool> {
        let r = criteria_check(&params.body(example, index, p)?, config.probe_count, config.seed)?;
        Ok(r.primal_ok && r.complementary_ok)
    };
    if !ok(0.0)? {
        return Err(Error::InfeasibleProblem(format!(
            "body {} fails the criteria at zero pressure",
            index + 1
        )));
    }
    let c = if index == 0 { params.c1 } else { params.c2 };
    let mut ends = [0.0; 2];
    for (k, sign) in [-1.0, 1.0].into_iter().enumerate() {
        let (mut inside, mut outside) = (0.0, sign * c);
        let mut expansions = 0;
        while ok(outside)? {
            inside = outside;
            outside *= 2.0;
            expansions += 1;
            if expansions > 60 {
                return Err(Error::Numerical("pressure window is unbounded".into()));
            }
        }
        while (outside - inside).abs() > config.tolerance * c.max(1.0) {
            let mid = 0.5 * (inside + outside);
            if ok(mid)? {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        ends[k] = 0.5 * (inside + outside);
    }
    Ok((ends[0], ends[1]))
}

/// Load range from pressures admissible for the criteria of both bodies.
///
/// Each body's interface traction is affine in its pressure, so the search
/// reduces to two bisections for the pressure windows followed by the
/// intersection of the corresponding load ranges with `tau <= cap`.
pub fn numeric_load_bounds(example: Example, params: &ExampleParams, config: &SearchConfig) -> Result<LoadInterval> {
    let cap = params.traction_cap(example);
    if params.regime(example)? == Regime::Open {
        return Ok(LoadInterval::singleton(cap));
    }
    let mut lo = f64::NEG_INFINITY;
    let mut hi = cap;
    for index in 0..2 {
        let (p_lo, p_hi) = numeric_pressure_window(example, params, index, config)?;
        let body = params.body(example, index, 0.0)?;
        // Traction at zero pressure; the traction falls one-for-one with pressure.
        let free = contact::contact_traction(&body, 0.5)?;
        lo = lo.max(free - p_hi);
        hi = hi.min(free - p_lo);
    }
    if !(lo < hi) {
        return Err(Error::InfeasibleProblem(format!(
            "no pressure pair satisfies the criteria with closed contact (bounds {lo}, {hi})"
        )));
    }
    if example == Example::Bending {
        check_radial_equilibrium(params, 0.5 * (lo + hi))?;
    }
    Ok(LoadInterval::open_interval(lo, hi))
}

/// Builds the equilibrium pressure profiles for contact traction `tau` and
/// checks the radial equation on both bodies.
pub fn check_radial_equilibrium(params: &ExampleParams, tau: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for index in 0..2 {
        let body = params.body(Example::Bending, index, 0.0)?;
        let profile = contact::solve_radial_pressure(&body, 0.5, tau)?;
        let body = body.with_pressure(profile)?;
        worst = worst.max(contact::equilibrium_residual(&body)?);
    }
    if worst >= contact::EQUILIBRIUM_TOLERANCE * params.c1.max(params.c2).max(1.0) {
        return Err(Error::Numerical(format!("radial equilibrium residual {worst:e}")));
    }
    Ok(worst)
}

/// Oracle scan bracket `[-2M, cap + 2M]` with `M = max_i C_i lambda_max_i^2`.
pub fn oracle_bracket(example: Example, params: &ExampleParams) -> Result<(f64, f64)> {
    let mut m: f64 = 0.0;
    for index in 0..2 {
        let body = params.body(example, index, 0.0)?;
        let mut lambda_max: f64 = 0.0;
        for x in [body.domain.x_lo, body.domain.x_hi] {
            let p = Vec3::new(x, 0.5, 0.5);
            lambda_max = lambda_max.max(kinematics::principal_stretches(&body.map, &body.domain, p)?.max());
        }
        m = m.max(body.material.shear_constant() * lambda_max * lambda_max);
    }
    let cap = params.traction_cap(example);
    Ok((-2.0 * m, cap + 2.0 * m))
}

/// Exhaustive scan of loads and pressures.
///
/// A load `tau` on the grid is accepted when, for each body, some grid
/// pressure satisfies the criteria and gives an interface traction within
/// half a grid step of `tau` and not above the cohesion bound. The hull of
/// accepted loads is returned.
pub fn brute_force_oracle(
    example: Example,
    params: &ExampleParams,
    grid_n: usize,
    config: &SearchConfig,
) -> Result<LoadInterval> {
    if grid_n < 100 {
        return Err(Error::InvalidParameters("grid_n must be at least 100".into()));
    }
    let cap = params.traction_cap(example);
    if params.regime(example)? == Regime::Open {
        return Ok(LoadInterval::singleton(cap));
    }
    let (t_lo, t_hi) = oracle_bracket(example, params)?;
    let step = (t_hi - t_lo) / grid_n as f64;
    let p_span = 0.5 * (t_hi - t_lo - cap);
    let mut accepted_tractions: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for index in 0..2 {
        for j in 0..=grid_n {
            let p = -p_span + 2.0 * p_span * j as f64 / grid_n as f64;
            let body = params.body(example, index, p)?;
            let r = criteria_check(&body, config.probe_count, config.seed)?;
            if r.primal_ok && r.complementary_ok {
                let t = contact::contact_traction(&body, 0.5)?;
                if t <= cap {
                    accepted_tractions[index].push(t);
                }
            }
        }
        accepted_tractions[index].sort_by(f64::total_cmp);
    }
    let near = |list: &[f64], tau: f64| {
        let k = list.partition_point(|&t| t < tau - 0.5 * step);
        k < list.len() && list[k] <= tau + 0.5 * step
    };
    let mut hull: Option<(f64, f64)> = None;
    for k in 0..=grid_n {
        let tau = t_lo + step * k as f64;
        if tau <= cap && near(&accepted_tractions[0], tau) && near(&accepted_tractions[1], tau) {
            hull = Some(match hull {
                None => (tau, tau),
                Some((lo, _)) => (lo, tau),
            });
        }
    }
    Ok(match hull {
        Some((lo, hi)) => LoadInterval::open_interval(lo, hi),
        None => LoadInterval::empty_closed(),
    })
}

/// Grid resolution of [`brute_force_oracle`] for the given parameters.
pub fn oracle_resolution(example: Example, params: &ExampleParams, grid_n: usize) -> Result<f64> {
    let (lo, hi) = oracle_bracket(example, params)?;
    Ok((hi - lo) / grid_n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triaxial_body(c: f64, a: f64, p: f64) -> BodySpec {
        ExampleParams::triaxial(c, c, a, a)
            .body(Example::Compression, 0, p)
            .unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn zero_pressure_is_admissible() {
        let r = criteria_check(&triaxial_body(1.0, 1.0, 0.0), 200, 42).unwrap();
        assert!(r.primal_ok && r.complementary_ok);
        assert!(close(r.min_quadratic_value, 1.0, 1e-12));
    }

    #[test]
    fn criteria_reject_small_probe_sets() {
        assert!(matches!(
            criteria_check(&triaxial_body(1.0, 1.0, 0.0), 50, 42),
            Err(Error::InvalidParameters(_))
        ));
    }

    #[test]
    fn criteria_flip_at_window() {
        for (p, expected) in [(0.89, true), (0.91, false), (-0.89, true), (-0.91, false)] {
            let r = criteria_check(&triaxial_body(1.0, 0.81, p), 200, 42).unwrap();
            assert_eq!(r.primal_ok, expected, "p = {p}");
        }
    }

    #[test]
    fn extensional_modes_bind_earlier_on_the_negative_side() {
        let r = criteria_check(&triaxial_body(1.0, 0.81, -0.85), 200, 42).unwrap();
        assert!(r.primal_ok);
        assert!(r.extensional_min < 0.0);
    }

    #[test]
    fn window_examples() {
        let (lo, hi) = pressure_window(&triaxial_body(1.0, 0.81, 0.0)).unwrap();
        assert!(close(lo, -0.9, 1e-15) && close(hi, 0.9, 1e-15));
        assert_eq!(pressure_window(&triaxial_body(1.0, 1.0, 0.0)).unwrap(), (-1.0, 1.0));
        let bent = ExampleParams::bending(1.0, 1.0, 1.0, 1.0, 1.0, 1.0)
            .body(Example::Bending, 0, 0.0)
            .unwrap();
        let (lo, hi) = pressure_window(&bent).unwrap();
        assert!(close(hi, 0.5f64.sqrt(), 1e-15) && close(lo, -(0.5f64.sqrt()), 1e-15));
    }

    #[test]
    fn compression_examples() {
        let i = load_interval_compression(1.0, 1.0, 0.81, 0.81, true).unwrap();
        assert!(close(i.tau_lo, -0.2439, 1e-12) && i.tau_hi == 0.0 && !i.empty);
        assert!(load_interval_compression(1.0, 1.0, 1.0, 1.0, true).unwrap().empty);
        let open = load_interval_compression(2.0, 1.0, 0.7, 0.6, false).unwrap();
        assert_eq!((open.regime, open.tau_lo, open.tau_hi), (Regime::Open, 0.0, 0.0));
        assert!(load_interval_compression(1.0, 1.0, -1.0, 1.0, true).is_err());
    }

    #[test]
    fn cohesive_examples() {
        let i = load_interval_cohesive(1.0, 1.0, 1.0, 1.0, 0.5, true).unwrap();
        assert!(i.tau_lo == 0.0 && i.tau_hi == 0.5 && !i.empty);
        let i = load_interval_cohesive(1.0, 1.0, 0.81, 0.81, 10.0, true).unwrap();
        assert!(close(i.tau_lo, -0.2439, 1e-12) && close(i.tau_hi, 1.5561, 1e-12));
        assert_eq!(
            load_interval_cohesive(1.0, 1.0, 0.81, 0.81, 0.3, false).unwrap(),
            LoadInterval::singleton(0.3)
        );
    }

    #[test]
    fn bending_examples() {
        let i = load_interval_bending(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, true).unwrap();
        let expected = 1.0 / 3f64.sqrt() - 0.5;
        assert!(close(i.tau_lo, -expected, 1e-15) && i.tau_hi == 0.0);
        assert!(close(i.tau_lo, -0.07735, 1e-5));
        // Large a makes C a^2 / r1^2 exceed C / lambda_max.
        assert!(
            load_interval_bending(1.0, 1.0, 1.0, 4.0, 4.0, 1.0, 1.0, true)
                .unwrap()
                .empty
        );
        assert_eq!(
            load_interval_bending(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, false).unwrap(),
            LoadInterval::singleton(0.0)
        );
        assert!(load_interval_bending(1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 1.0, true).is_err());
    }

    #[test]
    fn numeric_examples() {
        let cfg = SearchConfig::default();
        let i = numeric_load_bounds(
            Example::Compression,
            &ExampleParams::triaxial(1.0, 1.0, 0.81, 0.81),
            &cfg,
        )
        .unwrap();
        assert!(close(i.tau_lo, -0.2439, 1e-6) && close(i.tau_hi, 0.0, 1e-6));
        let p = ExampleParams::triaxial(1.0, 1.0, 1.0, 1.0).with_cohesion(0.5);
        let i = numeric_load_bounds(Example::Cohesive, &p, &cfg).unwrap();
        assert!(close(i.tau_lo, 0.0, 1e-6) && close(i.tau_hi, 0.5, 1e-6));
        let p = ExampleParams::bending(1.0, 1.0, 1.0, 1.0, 1.0, 1.0);
        let i = numeric_load_bounds(Example::Bending, &p, &cfg).unwrap();
        assert!(close(i.tau_lo, -0.07735, 1e-5) && close(i.tau_hi, 0.0, 1e-6));
    }

    #[test]
    fn numeric_reports_degenerate_stretch_as_infeasible() {
        let p = ExampleParams::triaxial(1.0, 1.0, 1.0, 1.0);
        assert!(matches!(
            numeric_load_bounds(Example::Compression, &p, &SearchConfig::default()),
            Err(Error::InfeasibleProblem(_))
        ));
    }

    #[test]
    fn oracle_examples() {
        let cfg = SearchConfig::default();
        let p = ExampleParams::triaxial(1.0, 1.0, 0.81, 0.81);
        let i = brute_force_oracle(Example::Compression, &p, 1000, &cfg).unwrap();
        assert!(close(i.tau_lo, -0.2439, 2e-3) && close(i.tau_hi, 0.0, 2e-3), "{i:?}");
        let p = ExampleParams::triaxial(1.0, 1.0, 1.0, 1.0);
        assert!(brute_force_oracle(Example::Compression, &p, 1000, &cfg).unwrap().empty);
        let mut open = p;
        open.b1 = -0.1;
        assert_eq!(
            brute_force_oracle(Example::Compression, &open, 1000, &cfg).unwrap(),
            LoadInterval::singleton(0.0)
        );
        let p = ExampleParams::triaxial(1.0, 1.0, 1.0, 1.0).with_cohesion(0.5);
        let i = brute_force_oracle(Example::Cohesive, &p, 1000, &cfg).unwrap();
        let res = oracle_resolution(Example::Cohesive, &p, 1000).unwrap();
        assert!(
            close(i.tau_lo, 0.0, 2.0 * res) && close(i.tau_hi, 0.5, 2.0 * res),
            "{i:?}"
        );
    }
}
