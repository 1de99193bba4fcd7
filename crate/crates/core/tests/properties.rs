mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{apply, c, gauss, random_special_unitary};
use squeeze_kit::domain::norm;
use squeeze_kit::kobayashi::{
    diag_lower_certificate, diag_lower_certificate_variant, diagonal_direction, disc_admissible, kobayashi_upper,
    sweep_point, trivial_lower, AnalyticDisc, CertificateVariant, DiscSearchConfig,
};
use squeeze_kit::normal_form::{is_pluriharmonic, levi_psd_sampled};
use squeeze_kit::squeezing::{squeezing_upper, Mode, SqueezeConfig};
use squeeze_kit::{CPoint, ComplexPoly, ContactOrder, DomainSpec, HermitianPolynomial, LeviQuery, ModelParams};

fn cvec(x: &[f64]) -> Vec<Complex64> {
    x.chunks(2).map(|p| c(p[0], p[1])).collect()
}

fn builtins() -> Vec<DomainSpec> {
    vec![
        DomainSpec::ball(1.0).unwrap(),
        DomainSpec::model(ModelParams::new(2)).unwrap(),
        DomainSpec::model(ModelParams::new(3)).unwrap(),
        DomainSpec::herbort().unwrap(),
        DomainSpec::convex_control().unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hermitian_values_are_real(x in prop::collection::vec(-1.0f64..1.0, 6)) {
        let z = cvec(&x);
        for dom in builtins() {
            let v = dom.rho().as_poly().evaluate(&z);
            prop_assert!(v.im.abs() <= 1e-12 * v.re.abs().max(1.0));
        }
    }

    #[test]
    fn levi_matrix_is_hermitian(x in prop::collection::vec(-1.0f64..1.0, 6), s in prop::collection::vec(-1.0f64..1.0, 6)) {
        let z = cvec(&x);
        for dom in builtins() {
            let h = dom.rho().levi_matrix(&z).unwrap();
            for j in 0..3 {
                for k in 0..3 {
                    prop_assert!((h[j][k] - h[k][j].conj()).norm() <= 1e-10 * (1.0 + h[j][k].norm()));
                }
            }
            if let Ok(q) = LeviQuery::new(z.clone(), cvec(&s)) {
                prop_assert!(dom.levi_form(&q).unwrap().is_finite());
            }
        }
    }

    #[test]
    fn ball_levi_form_is_squared_norm(x in prop::collection::vec(-1.0f64..1.0, 6), s in prop::collection::vec(-1.0f64..1.0, 6), r in 0.5f64..3.0) {
        let sigma = cvec(&s);
        prop_assume!(norm(&sigma) > 1e-6);
        let b = DomainSpec::ball(r).unwrap();
        let l = b.levi_form(&LeviQuery::new(cvec(&x), sigma.clone()).unwrap()).unwrap();
        prop_assert!((l - norm(&sigma).powi(2)).abs() <= 1e-12 * l.max(1.0));
    }

    #[test]
    fn contact_order_ignores_scaling(x in prop::collection::vec(-1.0f64..1.0, 4), re in 0.1f64..5.0, im in -5.0f64..5.0) {
        let mut dir = cvec(&x);
        dir.push(c(0.0, 0.0));
        prop_assume!(norm(&dir) > 1e-3);
        let scaled: Vec<Complex64> = dir.iter().map(|v| v * c(re, im)).collect();
        for dom in builtins() {
            prop_assert_eq!(dom.order_of_contact_along(&dir).unwrap(), dom.order_of_contact_along(&scaled).unwrap());
        }
    }
}

#[test]
fn model_leading_part_vanishes_on_axes_and_is_psh() {
    for k in 2..=4 {
        let params = ModelParams::new(k);
        let dom = DomainSpec::model(params).unwrap();
        let p = ComplexPoly::monomial(2, &[params.a as u8, params.b as u8], &[params.a as u8, params.b as u8], c(1.0, 0.0));
        assert_eq!(p.degree(), Some(2 * k));
        for t in [c(0.3, 0.1), c(-1.0, 2.0)] {
            assert_eq!(p.evaluate(&[t, c(0.0, 0.0)]).norm(), 0.0);
            assert_eq!(p.evaluate(&[c(0.0, 0.0), t]).norm(), 0.0);
        }
        assert!(levi_psd_sampled(&p, 512, 1));
        assert!(!is_pluriharmonic(&p));
        let axis = dom.order_of_contact_along(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(axis, ContactOrder::Finite(2 * params.m));
        assert!(2 * params.m > 4 * k);
    }
}

/// Every real quadratic form on `C^2` with coefficients in {-1, 0, 1} that
/// vanishes on both axes and is plurisubharmonic is pluriharmonic, so there
/// is no model domain with `k = 1`.
#[test]
fn no_degree_two_model_exists() {
    let one = c(1.0, 0.0);
    let ii = c(0.0, 1.0);
    let m = |h: [u8; 2], a: [u8; 2], coef: Complex64| ComplexPoly::monomial(2, &h, &a, coef);
    let basis: Vec<ComplexPoly> = vec![
        m([1, 0], [1, 0], one),
        m([0, 1], [0, 1], one),
        m([1, 0], [0, 1], one).add(&m([0, 1], [1, 0], one)),
        m([1, 0], [0, 1], ii).add(&m([0, 1], [1, 0], -ii)),
        m([2, 0], [0, 0], one).add(&m([0, 0], [2, 0], one)),
        m([2, 0], [0, 0], ii).add(&m([0, 0], [2, 0], -ii)),
        m([0, 2], [0, 0], one).add(&m([0, 0], [0, 2], one)),
        m([0, 2], [0, 0], ii).add(&m([0, 0], [0, 2], -ii)),
        m([1, 1], [0, 0], one).add(&m([0, 0], [1, 1], one)),
        m([1, 1], [0, 0], ii).add(&m([0, 0], [1, 1], -ii)),
    ];
    let probes = [c(1.0, 0.0), c(0.0, 1.0), c(0.6, -0.8)];
    let mut admissible = 0;
    let total = 3usize.pow(basis.len() as u32);
    for code in 0..total {
        let mut rest = code;
        let mut p = ComplexPoly::zero(2);
        for b in &basis {
            let coef = rest % 3;
            rest /= 3;
            if coef != 1 {
                p = p.add(&b.scale(c(coef as f64 - 1.0, 0.0)));
            }
        }
        let on_axes = probes.iter().all(|&t| {
            p.evaluate(&[t, c(0.0, 0.0)]).norm() < 1e-12 && p.evaluate(&[c(0.0, 0.0), t]).norm() < 1e-12
        });
        if !on_axes || is_pluriharmonic(&p) {
            continue;
        }
        let h = HermitianPolynomial::new(p).unwrap().levi_matrix(&[c(0.0, 0.0); 2]).unwrap();
        let psd = h[0][0].re >= 0.0 && h[1][1].re >= 0.0 && h[0][0].re * h[1][1].re - h[0][1].norm_sqr() >= 0.0;
        if psd {
            admissible += 1;
        }
    }
    assert_eq!(admissible, 0);
    assert!(ModelParams::new(1).validate().is_err());
}

const TOL: f64 = 1e-3;

#[test]
fn nested_balls_are_monotone() {
    let cfg = DiscSearchConfig::default();
    let (b1, b2) = (DomainSpec::ball(1.0).unwrap(), DomainSpec::ball(2.0).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..6 {
        let p: Vec<Complex64> = (0..3).map(|_| c(0.3 * gauss(&mut rng), 0.0)).collect();
        let p = CPoint(p.iter().map(|x| x * (0.6 / norm(&p).max(0.6))).collect());
        let z: Vec<Complex64> = (0..3)
            .map(|_| c(gauss(&mut rng), gauss(&mut rng)))
            .collect();
        let k1 = kobayashi_upper(&b1, &p, &z, &cfg).unwrap().value;
        let k2 = kobayashi_upper(&b2, &p, &z, &cfg).unwrap().value;
        assert!(k1 >= k2 * (1.0 - 2.0 * TOL), "{k1} < {k2}");
    }
}

#[test]
fn unitary_maps_preserve_upper_bounds() {
    let cfg = DiscSearchConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let model = DomainSpec::model(ModelParams::new(2)).unwrap();
    let cases = [
        (model.clone(), sweep_point(&model, 1e-3), vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]),
        (model.clone(), sweep_point(&model, 1e-3), diagonal_direction(3)),
        (model.clone(), CPoint(vec![c(0.05, 0.02), c(-0.03, 0.0), c(-0.01, 0.0)]), vec![c(0.3, 0.1), c(1.0, 0.0), c(0.2, -0.4)]),
        (DomainSpec::ball(1.0).unwrap(), CPoint::real(&[0.2, -0.3, 0.1]), vec![c(1.0, 0.0), c(0.0, 1.0), c(0.5, 0.0)]),
    ];
    for (dom, p, z) in cases {
        let base = kobayashi_upper(&dom, &p, &z, &cfg).unwrap().value;
        for _ in 0..3 {
            let u = random_special_unitary(&mut rng);
            let shift: Vec<Complex64> = (0..3).map(|_| c(gauss(&mut rng), 0.0)).collect();
            let moved = dom.transformed(&u, &shift).unwrap();
            let p2 = CPoint(apply(&u, p.coords()).iter().zip(&shift).map(|(a, b)| a + b).collect());
            let z2 = apply(&u, &z);
            let k = kobayashi_upper(&moved, &p2, &z2, &cfg).unwrap().value;
            assert!((k / base - 1.0).abs() <= 2.0 * TOL, "{} vs {base}", k);
        }
    }
}

#[test]
fn upper_bound_is_homogeneous() {
    let cfg = DiscSearchConfig::default();
    let model = DomainSpec::model(ModelParams::new(2)).unwrap();
    let p = sweep_point(&model, 1e-3);
    let z = vec![c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0)];
    let base = kobayashi_upper(&model, &p, &z, &cfg).unwrap().value;
    for l in [0.5, 2.0] {
        let zl: Vec<Complex64> = z.iter().map(|x| x * l).collect();
        let k = kobayashi_upper(&model, &p, &zl, &cfg).unwrap().value;
        assert!((k - l * base).abs() <= 2.0 * TOL * l * base);
    }
}

#[test]
fn shrinking_the_neighbourhood_never_lowers_the_bound() {
    let cfg = DiscSearchConfig::default();
    let model = DomainSpec::model(ModelParams::new(2)).unwrap();
    let small = model.with_locality_radius(0.3).unwrap();
    for delta in [1e-2, 1e-4] {
        let p = sweep_point(&model, delta);
        for z in [vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], diagonal_direction(3)] {
            let big = kobayashi_upper(&model, &p, &z, &cfg).unwrap().value;
            let shrunk = kobayashi_upper(&small, &p, &z, &cfg).unwrap().value;
            assert!(shrunk >= big * (1.0 - 2.0 * TOL), "{shrunk} < {big}");
        }
    }
}

#[test]
fn lower_estimates_never_exceed_upper_estimates() {
    let cfg = DiscSearchConfig::default();
    let e1 = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
    let mut checked = 0;
    for dom in builtins() {
        let deltas: &[f64] = if dom.dimension() == 3 { &[1e-2, 1e-3, 1e-5] } else { &[] };
        for &delta in deltas {
            let q = dom.q().coords().to_vec();
            let p = CPoint(vec![q[0], q[1], q[2] - delta]);
            for z in [e1.clone(), diagonal_direction(3)] {
                let upper = kobayashi_upper(&dom, &p, &z, &cfg).unwrap().value;
                let lower = trivial_lower(&dom, &p, &z).unwrap().value;
                assert!(lower <= upper, "{lower} > {upper}");
                checked += 1;
            }
            for variant in [CertificateVariant::Standard, CertificateVariant::PositiveTerms] {
                if let Ok(cert) = diag_lower_certificate_variant(&dom, delta, variant) {
                    let upper = kobayashi_upper(&dom, &cert.basepoint, &cert.direction, &cfg).unwrap().value;
                    assert!(cert.value <= upper, "{variant:?}: {} > {upper}", cert.value);
                    checked += 1;
                }
            }
        }
    }
    assert!(checked >= 30);
}

#[test]
fn refining_the_circle_keeps_admissible_discs_admissible() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let coarse = DiscSearchConfig { boundary_samples: 64, ..DiscSearchConfig::default() };
    let fine = DiscSearchConfig { boundary_samples: 256, ..DiscSearchConfig::default() };
    let domains = [DomainSpec::ball(1.0).unwrap(), DomainSpec::model(ModelParams::new(2)).unwrap(), DomainSpec::herbort().unwrap()];
    let mut found = 0;
    let mut attempts = 0;
    while found < 100 {
        attempts += 1;
        assert!(attempts < 100_000, "too few admissible discs");
        let dom = &domains[attempts % domains.len()];
        let p = if dom.q().coords()[2].re == 0.0 { sweep_point(dom, 1e-3) } else { CPoint::origin(3) };
        let degree = 1 + attempts % 3;
        let scale: f64 = 0.4 * rand::Rng::random::<f64>(&mut rng);
        let coeffs: Vec<Vec<Complex64>> = (0..degree)
            .map(|_| {
                (0..3)
                    .map(|_| c(gauss(&mut rng), gauss(&mut rng)) * scale)
                    .collect()
            })
            .collect();
        let disc = AnalyticDisc::new(p, coeffs).unwrap();
        if disc_admissible(dom, &disc, &coarse).unwrap().admissible() {
            found += 1;
            assert!(disc_admissible(dom, &disc, &fine).unwrap().admissible(), "{disc:?}");
        }
    }
}

#[test]
fn diagonal_certificate_grows_as_delta_shrinks() {
    let model = DomainSpec::model(ModelParams::new(2)).unwrap();
    let mut last = 0.0;
    for delta in [1e-2, 1e-3, 1e-4, 1e-5, 1e-6] {
        let v = diag_lower_certificate(&model, delta).unwrap().value;
        assert!(v > last);
        last = v;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closed_form_bound_increases_with_delta(a in -6.0f64..-0.7, b in -6.0f64..-0.7) {
        prop_assume!((a - b).abs() > 1e-3);
        let (lo, hi) = (10f64.powf(a.min(b)), 10f64.powf(a.max(b)));
        let cfg = SqueezeConfig { mode: Mode::ClosedForm, ..Default::default() };
        for dom in [DomainSpec::model(ModelParams::new(2)).unwrap(), DomainSpec::herbort().unwrap()] {
            let s_lo = squeezing_upper(&dom, lo, &cfg).unwrap();
            let s_hi = squeezing_upper(&dom, hi, &cfg).unwrap();
            prop_assert!(s_lo.raw_bound().unwrap() < s_hi.raw_bound().unwrap());
            prop_assert!(s_lo.bound <= s_hi.bound);
        }
    }

    #[test]
    fn bounds_lie_in_unit_interval(a in -6.0f64..-0.7) {
        let delta = 10f64.powf(a);
        let cfg = SqueezeConfig { mode: Mode::ClosedForm, ..Default::default() };
        for dom in builtins() {
            let b = squeezing_upper(&dom, delta, &cfg).unwrap();
            prop_assert!(b.bound > 0.0 && b.bound <= 1.0);
        }
    }
}

#[test]
fn numeric_bounds_lie_in_unit_interval() {
    let cfg = SqueezeConfig::default();
    for dom in builtins() {
        for delta in [1e-2, 1e-4] {
            let b = squeezing_upper(&dom, delta, &cfg).unwrap();
            assert!(b.bound > 0.0 && b.bound <= 1.0);
        }
    }
}
