use contact_bounds::bounds::{self, closed_form_interval, load_interval_compression, Example, ExampleParams};
use contact_bounds::cli::{self, BodyConfig, ExampleKind, ProblemConfig};
use contact_bounds::contact::{self, Condition, DirichletData};
use contact_bounds::energy::{self, LoadData};
use contact_bounds::kinematics::{self, Box3, DeformationMap};
use contact_bounds::material::{self, MaterialModel};
use contact_bounds::quadrature::QuadratureRule;
use contact_bounds::tensor3::{cofactor, ddot, det, inverse, sym_eigenvalues, Mat3, Vec3};
use proptest::prelude::*;

fn matrix() -> impl Strategy<Value = Mat3> {
    prop::array::uniform9(-2.0..2.0f64).prop_map(|e| Mat3::from_fn(|i, j| e[3 * i + j]))
}

/// Isochoric matrix: a random matrix with positive determinant rescaled to det 1.
fn isochoric() -> impl Strategy<Value = Mat3> {
    prop::array::uniform9(-0.4..0.4f64)
        .prop_map(|e| Mat3::IDENTITY + Mat3::from_fn(|i, j| e[3 * i + j]))
        .prop_filter("positive determinant", |m| det(m) > 0.2)
        .prop_map(|m| m * det(&m).cbrt().recip())
}

fn unit_point() -> impl Strategy<Value = Vec3> {
    (0.0..0.5f64, 0.0..1.0f64, 0.0..1.0f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn max_entry_diff(a: &Mat3, b: &Mat3) -> f64 {
    (*a - *b).max_abs()
}

proptest! {
    #[test]
    fn det_is_multiplicative(a in matrix(), b in matrix()) {
        let lhs = det(&(a * b));
        let rhs = det(&a) * det(&b);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1.0));
    }

    #[test]
    fn cofactor_is_det_times_inverse_transpose(m in matrix()) {
        prop_assume!(det(&m).abs() > 1e-2);
        let expected = inverse(&m).unwrap().transpose() * det(&m);
        prop_assert!(max_entry_diff(&cofactor(&m), &expected) < 1e-9);
    }

    #[test]
    fn ddot_is_symmetric_and_bilinear(a in matrix(), b in matrix(), c in matrix(), s in -3.0..3.0f64) {
        prop_assert_eq!(ddot(&a, &b), ddot(&b, &a));
        let lhs = ddot(&(a * s + c), &b);
        let rhs = s * ddot(&a, &b) + ddot(&c, &b);
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_of_diagonal_stretch_are_squares(x in 0.1..3.0f64, y in 0.1..3.0f64, z in 0.1..3.0f64) {
        let f = Mat3::diag(x, y, z);
        let mut got = sym_eigenvalues(&(f.transpose() * f)).unwrap();
        let mut want = [x * x, y * y, z * z];
        got.sort_by(f64::total_cmp);
        want.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(want) {
            prop_assert!((g - w).abs() <= 1e-12 * w);
        }
    }

    #[test]
    fn isochoric_families_have_unit_jacobian(a in 0.5..1.5f64, b in -0.5..0.5f64, bend in 0.5..1.5f64, p in unit_point()) {
        let slab = Box3::slab(0.0, 0.5).unwrap();
        let tri = DeformationMap::TriaxialStretch { a, b };
        prop_assert!((kinematics::jacobian(&tri, &slab, p).unwrap() - 1.0).abs() < 1e-12);
        let bent = DeformationMap::StretchBend { bend, a, b: b + 1.0 };
        prop_assert!((kinematics::jacobian(&bent, &slab, p).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn triaxial_gradient_is_uniform_and_matches_differences(a in 0.5..1.5f64, b in -0.5..0.5f64, p in unit_point(), q in unit_point()) {
        let slab = Box3::slab(0.0, 0.5).unwrap();
        let map = DeformationMap::TriaxialStretch { a, b };
        let fp = kinematics::cartesian_gradient(&map, &slab, p).unwrap();
        prop_assert_eq!(fp, kinematics::cartesian_gradient(&map, &slab, q).unwrap());
        let h = 1e-6;
        let center = slab.center();
        for j in 0..3 {
            let mut e = [0.0; 3];
            e[j] = h;
            let step = Vec3(e);
            let plus = kinematics::placement(&map, &slab, center + step).unwrap();
            let minus = kinematics::placement(&map, &slab, center - step).unwrap();
            let column = (plus - minus) * (0.5 / h);
            for i in 0..3 {
                prop_assert!((column[i] - fp[(i, j)]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn affine_maps_satisfy_injectivity_equality(a in 0.3..2.0f64, b in -1.0..1.0f64, shear in -1.0..1.0f64, t in -1.0..1.0f64) {
        let slab = Box3::slab(0.0, 0.5).unwrap();
        let maps = [
            DeformationMap::TriaxialStretch { a, b },
            DeformationMap::Homogeneous {
                gradient: Mat3([[a, shear, 0.0], [0.0, 1.0 / a, 0.0], [0.0, 0.0, 1.0]]),
                translation: Vec3::new(t, 0.0, 0.0),
            },
        ];
        for map in maps {
            prop_assert!(kinematics::injectivity_check(&map, &slab, 4).unwrap());
            let integral = kinematics::jacobian_integral(&map, &slab, 4).unwrap();
            let image = kinematics::image_volume(&map, &slab).unwrap();
            prop_assert!((integral - image).abs() < 1e-9);
        }
    }

    #[test]
    fn principal_stretches_are_roots_of_eigenvalues(a in 0.5..1.5f64, b in 0.5..2.0f64, bend in 0.5..1.5f64, p in unit_point()) {
        let slab = Box3::slab(0.0, 0.5).unwrap();
        let map = DeformationMap::StretchBend { bend, a, b };
        let f = kinematics::cartesian_gradient(&map, &slab, p).unwrap();
        let mut got = kinematics::principal_stretches(&map, &slab, p).unwrap().as_array();
        let mut want = sym_eigenvalues(&(f.transpose() * f)).unwrap().map(f64::sqrt);
        got.sort_by(f64::total_cmp);
        want.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(want) {
            prop_assert!((g - w).abs() < 1e-10);
        }
    }

    #[test]
    fn complementary_density_completes_the_work(f in isochoric(), c in 0.5..3.0f64, p in -2.0..2.0f64) {
        let model = MaterialModel::NeoHookeanIncompressible { c };
        let w = material::strain_energy(&model, &f).unwrap();
        let wc = material::complementary_density(&model, &f, p).unwrap();
        let work = ddot(&material::piola_stress(&model, &f, p).unwrap(), &f);
        prop_assert!((w + wc - work).abs() < 1e-14 * work.abs().max(1.0) * 10.0);
    }

    #[test]
    fn diagonal_states_have_symmetric_cauchy_stress(x in 0.5..2.0f64, y in 0.5..2.0f64, c in 0.5..3.0f64, p in -2.0..2.0f64) {
        let f = Mat3::diag(x, y, 1.0 / (x * y));
        let s = material::cauchy_stress(&MaterialModel::NeoHookeanIncompressible { c }, &f, p).unwrap();
        prop_assert!(max_entry_diff(&s, &s.transpose()) < 1e-10);
    }

    #[test]
    fn stress_and_energy_are_homogeneous_in_the_constant(f in isochoric(), c in 0.5..3.0f64, p in -2.0..2.0f64, k in 0.1..10.0f64) {
        let model = MaterialModel::NeoHookeanIncompressible { c };
        let scaled = model.scaled(k);
        let w = material::strain_energy(&model, &f).unwrap();
        prop_assert!((material::strain_energy(&scaled, &f).unwrap() - k * w).abs() <= 1e-13 * (k * w).abs().max(1.0));
        let pk = material::piola_stress(&scaled, &f, k * p).unwrap();
        let expected = material::piola_stress(&model, &f, p).unwrap() * k;
        prop_assert!(max_entry_diff(&pk, &expected) <= 1e-12 * k.max(1.0) * 10.0);
    }

    #[test]
    fn constraint_gradient_is_the_cofactor(f in matrix()) {
        prop_assert_eq!(material::constraint_gradient(&f), cofactor(&f));
    }

    #[test]
    fn linked_compression_pressures_balance_tractions(c1 in 0.5..3.0f64, c2 in 0.5..3.0f64, a in 0.5..0.99f64, tau in -0.5..0.0f64) {
        let params = ExampleParams::triaxial(c1, c2, a, a);
        let s = params.system(Example::Compression, c1 * a * a - tau, c2 * a * a - tau).unwrap();
        let eval = contact::evaluate_contact(&s).unwrap();
        prop_assert!(eval.action_reaction_residual < 1e-12);
        prop_assert!(eval.complementarity_residual.abs() <= 1e-10);
        let report = contact::check_admissible(&s, &DirichletData::Placement(s.body2.map), tau).unwrap();
        prop_assert!(report.is_ok(), "{:?}", report);
    }

    #[test]
    fn open_contact_without_cohesion_needs_zero_load(c in 0.5..3.0f64, a in 0.5..0.99f64, opening in 0.01..0.2f64, tau in -0.5..0.5f64) {
        let mut params = ExampleParams::triaxial(c, c, a, a);
        params.b2 += opening;
        let s = params.system(Example::Compression, c * a * a - tau, c * a * a - tau).unwrap();
        prop_assert_eq!(contact::evaluate_contact(&s).unwrap().regime, contact::Regime::Open);
        let ok = contact::check_static(&s, tau).unwrap().is_ok();
        prop_assert_eq!(ok, tau.abs() <= contact::TRACTION_TOLERANCE);
    }

    #[test]
    fn translation_leaves_residuals_unchanged(c in 0.5..3.0f64, a in 0.5..0.99f64, tau in -0.3..0.0f64, shift in -1.0..1.0f64) {
        let params = ExampleParams::triaxial(c, c, a, a);
        let moved = ExampleParams { b1: params.b1 + shift, b2: params.b2 + shift, ..params };
        let report = |p: &ExampleParams| {
            let s = p.system(Example::Compression, c * a * a - tau, c * a * a - tau).unwrap();
            contact::check_admissible(&s, &DirichletData::Placement(s.body2.map), tau).unwrap()
        };
        let (r0, r1) = (report(&params), report(&moved));
        for cond in Condition::ALL{
            prop_assert!((r0.residual(cond).unwrap() - r1.residual(cond).unwrap()).abs() <= 1e-12);
        }
    }

    #[test]
    fn intervals_scale_with_the_constants(c1 in 0.5..3.0f64, c2 in 0.5..3.0f64, a1 in 0.5..0.99f64, a2 in 0.5..0.99f64, g in 0.1..2.0f64) {
        let params = ExampleParams::triaxial(c1, c2, a1, a2).with_cohesion(g);
        for example in [Example::Compression, Example::Cohesive] {
            let base = closed_form_interval(example, &params).unwrap();
            for k in [0.5, 2.0, 10.0] {
                let scaled = closed_form_interval(example, &params.scaled(k)).unwrap();
                prop_assert!((scaled.tau_lo - k * base.tau_lo).abs() <= 1e-15 * (k * base.tau_lo).abs());
                prop_assert!((scaled.tau_hi - k * base.tau_hi).abs() <= 1e-15 * (k * base.tau_hi).abs());
            }
            prop_assert_eq!(closed_form_interval(example, &params.swapped(example)).unwrap(), base);
        }
    }

    #[test]
    fn empty_exactly_when_the_stretch_term_vanishes(c1 in 0.5..3.0f64, c2 in 0.5..3.0f64, a1 in 0.5..1.5f64, a2 in 0.5..1.5f64) {
        let i = load_interval_compression(c1, c2, a1, a2, true).unwrap();
        let term = (c1 * (a1.sqrt() - a1 * a1)).min(c2 * (a2.sqrt() - a2 * a2));
        prop_assert_eq!(i.empty, term <= 0.0);
    }

    #[test]
    fn potential_energy_is_affine_in_the_load(a in 0.6..0.99f64, da in -0.05..0.05f64, t0 in -0.5..0.5f64, dt in 0.01..0.2f64) {
        let rule = QuadratureRule::new(4).unwrap();
        let mut params = ExampleParams::triaxial(1.0, 1.0, a, a);
        params.a1 = a + da;
        params.b2 = 0.5 * (params.a1 - a) - 0.01;
        let s = params.system(Example::Compression, 0.0, 0.0).unwrap();
        let e = |tau: f64| {
            let load = LoadData::Uniform { tau, dirichlet: DirichletData::Placement(s.body2.map) };
            energy::potential_energy(&s, &load, &rule).unwrap()
        };
        let (e0, e1, e2) = (e(t0), e(t0 + dt), e(t0 + 2.0 * dt));
        prop_assert!((e2 - 2.0 * e1 + e0).abs() < 1e-13);
    }

    #[test]
    fn config_round_trips(
        example in prop_oneof![Just(0u8), Just(1u8), Just(2u8)],
        c1 in 0.5..3.0f64, c2 in 0.5..3.0f64, a in 0.5..0.99f64,
        g in 0.1..2.0f64, tau in prop::option::of(-0.5..0.0f64),
        seed in any::<u64>(), grid_n in 100usize..5000,
    ) {
        let (kind, b1) = match example {
            0 => (ExampleKind::Compression, None),
            1 => (ExampleKind::Cohesive, Some(0.25)),
            _ => (ExampleKind::Bending, Some(1.0 + a)),
        };
        let config = ProblemConfig {
            example: kind,
            family: None,
            bend: 1.0 + a / 3.0,
            body1: BodyConfig { c: c1, a, b: b1, pressure: None },
            body2: BodyConfig { c: c2, a, b: None, pressure: tau.map(|t| c2 * a * a - t) },
            d_allow: 0.0,
            g: if kind == ExampleKind::Cohesive { g } else { 0.0 },
            tau,
            u_d: None,
            quad_order: 8,
            grid_n,
            probe_count: 200,
            seed,
        };
        prop_assert_eq!(cli::parse_config(&cli::serialize_config(&config)).unwrap(), config);
    }
}

#[test]
fn lower_endpoint_extremum_sits_at_the_derivative_root() {
    // d/da (sqrt(a) - a^2) = 1/(2 sqrt(a)) - 2a; solve by bisection rather
    // than assuming the root.
    let derivative = |a: f64| 0.5 / a.sqrt() - 2.0 * a;
    let (mut lo, mut hi) = (0.1, 0.9);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if derivative(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    let lower = |a: f64| load_interval_compression(1.0, 1.0, a, a, true).unwrap().tau_lo;
    let samples: Vec<f64> = (1..400).map(|k| k as f64 / 400.0).collect();
    for w in samples.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        if x1 < root {
            assert!(lower(x1) < lower(x0), "decreasing below the root at {x0}");
        } else if x0 > root {
            assert!(lower(x1) > lower(x0), "increasing above the root at {x0}");
        }
    }
    assert!((root.powi(3) - 1.0 / 16.0).abs() < 1e-12);
}

#[test]
fn bending_windows_follow_the_largest_stretch() {
    let params = ExampleParams::bending(1.0, 1.0, 1.0, 1.0, 1.0, 1.0);
    for index in 0..2 {
        let body = params.body(Example::Bending, index, 0.0).unwrap();
        let (lo, hi) = bounds::pressure_window(&body).unwrap();
        assert_eq!(lo, -hi);
        let largest = (0..=100)
            .map(|k| {
                let x = body.domain.x_lo + (body.domain.x_hi - body.domain.x_lo) * k as f64 / 100.0;
                kinematics::principal_stretches(&body.map, &body.domain, Vec3::new(x, 0.5, 0.5))
                    .unwrap()
                    .max()
            })
            .fold(0.0, f64::max);
        assert!((hi - 1.0 / largest).abs() < 1e-12);
    }
}
