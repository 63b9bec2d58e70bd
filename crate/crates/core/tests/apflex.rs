use num_complex::Complex64;
use proptest::prelude::*;
use rigidkit::apflex::{
    ap_flex_check, ap_rigidity_decision, bochner_fejer_kernel, bohr_spectrum,
    decompose_by_spectrum_components, extract_sampled, fejer_sequence, fejer_value,
    mean_convolution, phase_component_extract, ApVerdict, FrequencyAtom, KernelConfig, TrigField,
    Witness,
};
use rigidkit::framework::{generate_patch, CrystalFramework, PatchSpec};
use rigidkit::gallery::load_fixture;
use rigidkit::linalg::CVector;
use rigidkit::phase::{Coord, Phase};
use rigidkit::rum::{sample_spectrum, Component, SpectrumOptions};
use rigidkit::symbol::{
    build_symbol, null_space_at_phase, rigidity_residual_on_patch, translation_basis,
};

const TOL: f64 = 1e-8;

fn fixture(name: &str) -> CrystalFramework {
    load_fixture(name).unwrap().framework
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn patch() -> PatchSpec {
    PatchSpec::cube(2, -4, 4)
}

fn residual(fw: &CrystalFramework, g: &TrigField) -> f64 {
    let p = generate_patch(fw, &patch());
    rigidity_residual_on_patch(fw, &p, &g.velocity())
        .unwrap()
        .sup_norm
}

fn flex_atom(fw: &CrystalFramework, t: Phase, coeff: Complex64) -> FrequencyAtom {
    let b = null_space_at_phase(&build_symbol(fw), &t, TOL);
    FrequencyAtom {
        t,
        a: &b[0] * coeff,
    }
}

/// Phases on the spectrum of each fixture, parametrised by `s ∈ (0,1)`.
fn spectrum_phase(name: &str, branch: usize, s: (i64, i64)) -> Phase {
    let z = (0, 1);
    match (name, branch % 3) {
        ("rhombic", 0) => Phase::from_ratios(&[z, s]),
        ("rhombic", 1) => Phase::from_ratios(&[s, z]),
        ("rhombic", _) => Phase::from_ratios(&[s, s]),
        (_, 0) => Phase::from_ratios(&[s, z]),
        (_, 1) => Phase::from_ratios(&[(s.0, s.1 + 1), s]),
        _ => Phase::from_ratios(&[z, s]),
    }
}

fn table2_field() -> TrigField {
    let a = CVector::from_vec(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]);
    TrigField::new(
        2,
        4,
        vec![
            FrequencyAtom {
                t: Phase::from_ratios(&[(1, 3), (0, 1)]),
                a: a.clone(),
            },
            FrequencyAtom {
                t: Phase::from_ratios(&[(0, 1), (1, 4)]),
                a: a * c(2.0, 0.0),
            },
        ],
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn patch_and_atom_tests_agree(
        name in prop::sample::select(vec!["localflex", "rhombic"]),
        atoms in prop::collection::vec((0usize..3, 1i64..12, (-1.0f64..1.0, -1.0f64..1.0)), 1..4),
        bad in prop::option::of((1i64..9, 1i64..9, 0.2f64..1.0)),
    ) {
        let fw = fixture(name);
        let mut list: Vec<FrequencyAtom> = atoms
            .iter()
            .map(|&(b, p, (re, im))| {
                flex_atom(&fw, spectrum_phase(name, b, (p, 13)), c(re + 1.5, im))
            })
            .collect();
        if let Some((p, q, scale)) = bad {
            let t = Phase::from_ratios(&[(p, 10), (q, 11)]);
            let a = CVector::from_fn(fw.dof(), |i, _| c(scale * (i as f64 + 1.0), 0.3));
            list.push(FrequencyAtom { t, a });
        }
        let g = TrigField::new(2, fw.dof(), list).unwrap();
        let r = ap_flex_check(&fw, &g, &patch()).unwrap();
        prop_assert!(r.consistent, "{:?}", r);
        prop_assert_eq!(r.is_flex, bad.is_none());
        if bad.is_none() {
            prop_assert!(r.patch_residual <= 1e-10);
        }
    }

    #[test]
    fn convolving_a_flex_keeps_it_a_flex(
        name in prop::sample::select(vec!["localflex", "rhombic"]),
        atoms in prop::collection::vec((0usize..3, 1i64..12), 1..4),
        base in prop::collection::vec(0.05f64..0.95, 4),
    ) {
        let fw = fixture(name);
        let list: Vec<FrequencyAtom> = atoms
            .iter()
            .map(|&(b, p)| flex_atom(&fw, spectrum_phase(name, b, (p, 13)), c(1.0, 0.5)))
            .collect();
        let h = TrigField::new(2, fw.dof(), list).unwrap();
        let bases = [Phase::from_f64(&base[..2]), Phase::from_f64(&base[2..])];
        let k = bochner_fejer_kernel(&bases, 2, &KernelConfig::default()).unwrap();
        let g = mean_convolution(&h, &k).unwrap();
        let weights: f64 = k.atoms().iter().map(|a| a.a[0].norm()).sum();
        let rh = residual(&fw, &h);
        let rg = residual(&fw, &g);
        prop_assert!(rg <= 1e-9);
        prop_assert!(rg <= rh * weights + 1e-12);
    }

    #[test]
    fn kernel_weights_are_nonnegative(base in prop::collection::vec(0.01f64..0.99, 4), stage in 1usize..3) {
        let bases = [Phase::from_f64(&base[..2]), Phase::from_f64(&base[2..])];
        let k = bochner_fejer_kernel(&bases, stage, &KernelConfig::default()).unwrap();
        for a in k.atoms() {
            prop_assert!(a.a[0].im == 0.0 && a.a[0].re >= 0.0);
        }
        prop_assert_eq!(k.coefficient(&Phase::zero(2)).unwrap()[0], c(1.0, 0.0));
    }

    #[test]
    fn fejer_values_are_real(n in 1usize..12, p in 0i64..97, k in -200i64..200) {
        let lambda = Coord::ratio(p, 97);
        let terms = fejer_sequence(n, lambda);
        let v = fejer_value(&terms, k);
        let x = lambda.to_f64() * k as f64;
        let pairs: f64 = 1.0 + (1..=n)
            .map(|m| 2.0 * (1.0 - m as f64 / (n + 1) as f64) * (std::f64::consts::TAU * m as f64 * x).cos())
            .sum::<f64>();
        prop_assert!(v.im.abs() < 1e-12);
        prop_assert!((v.re - pairs).abs() < 1e-10);
        for t in &terms {
            prop_assert!(t.weight >= 0.0);
            prop_assert!(terms.iter().any(|s| s.m == -t.m && s.weight == t.weight));
        }
    }

    #[test]
    fn bohr_spectrum_of_a_flex_lies_in_the_sampled_spectrum(
        atoms in prop::collection::vec((0usize..3, 1i64..12), 1..4),
    ) {
        let fw = fixture("rhombic");
        let list: Vec<FrequencyAtom> = atoms
            .iter()
            .map(|&(b, p)| flex_atom(&fw, spectrum_phase("rhombic", b, (p, 13)), c(1.0, 0.0)))
            .collect();
        let g = TrigField::new(2, fw.dof(), list).unwrap();
        let report = sample_spectrum(&fw, &SpectrumOptions::new(64));
        for t in bohr_spectrum(&g, 1e-6).unwrap().frequencies {
            prop_assert!(report.near_hit(&t.to_f64(), 1.0), "{:?}", t);
        }
    }
}

#[test]
fn stage_two_weights_match_products_of_triangular_weights() {
    let alpha = [0.236_067_977_499_789_7, 0.414_213_562_373_095_1];
    let k = bochner_fejer_kernel(&[Phase::from_f64(&alpha)], 2, &KernelConfig::default()).unwrap();
    assert_eq!(k.len(), 49);
    for m1 in -3i64..=3 {
        for m2 in -3i64..=3 {
            let t = Phase::from_f64(&[
                (m1 as f64 * alpha[0] / 2.0).rem_euclid(1.0),
                (m2 as f64 * alpha[1] / 2.0).rem_euclid(1.0),
            ]);
            let expect = (1.0 - m1.abs() as f64 / 4.0) * (1.0 - m2.abs() as f64 / 4.0);
            let found = k.atoms().iter().find(|a| a.t.distance(&t) < 1e-9).unwrap();
            assert!((found.a[0].re - expect).abs() < 1e-12, "({}, {})", m1, m2);
        }
    }
}

#[test]
fn table2_field_is_a_flex() {
    let fw = fixture("localflex");
    let g = table2_field();
    let r = ap_flex_check(&fw, &g, &patch()).unwrap();
    assert!(r.is_flex && r.consistent && r.patch_residual <= 1e-10);
    let bohr = bohr_spectrum(&g, 1e-6).unwrap();
    assert_eq!(bohr.frequencies.len(), 2);
    let report = sample_spectrum(&fw, &SpectrumOptions::new(24));
    assert_eq!(report.hits.len(), 24 * 24);
    for t in &bohr.frequencies {
        assert!(report.near_hit(&t.to_f64(), 0.0));
    }
    let k = bochner_fejer_kernel(
        &[
            Phase::from_ratios(&[(1, 3), (0, 1)]),
            Phase::from_ratios(&[(0, 1), (1, 4)]),
        ],
        2,
        &KernelConfig::default(),
    )
    .unwrap();
    assert!(residual(&fw, &mean_convolution(&g, &k).unwrap()) <= 1e-10);
}

#[test]
fn extraction_decays_like_one_over_n() {
    let fw = fixture("localflex");
    let g = TrigField::new(
        2,
        4,
        vec![
            flex_atom(&fw, Phase::from_ratios(&[(1, 8), (0, 1)]), c(1.0, 0.0)),
            flex_atom(&fw, Phase::from_ratios(&[(3, 8), (5, 8)]), c(0.0, 2.0)),
            flex_atom(&fw, Phase::from_ratios(&[(0, 1), (7, 8)]), c(-1.0, 1.0)),
        ],
    )
    .unwrap();
    let target = Phase::from_ratios(&[(0, 1), (0, 1)]);
    let errors: Vec<f64> = [8, 16, 32, 64]
        .iter()
        .map(|&n| {
            let closed = phase_component_extract(&g, &target, Some(n)).unwrap();
            let sampled = extract_sampled(&g.velocity(), 2, &target, n).unwrap();
            assert!((&closed - &sampled).norm() < 1e-10);
            closed.norm()
        })
        .collect();
    for w in errors.windows(2) {
        assert!(w[1] / w[0] <= 0.6, "{:?}", errors);
    }
    let exact = phase_component_extract(&g, &Phase::from_ratios(&[(1, 8), (0, 1)]), None).unwrap();
    assert_eq!(&exact, &g.atoms()[0].a);
}

#[test]
fn star_flex_splits_by_axis() {
    let fw = fixture("star");
    let g = TrigField::new(
        2,
        fw.dof(),
        vec![
            flex_atom(&fw, Phase::from_ratios(&[(1, 2), (0, 1)]), c(1.0, 0.0)),
            flex_atom(&fw, Phase::from_ratios(&[(0, 1), (1, 2)]), c(1.0, 0.0)),
        ],
    )
    .unwrap();
    assert!(ap_flex_check(&fw, &g, &patch()).unwrap().is_flex);
    let comps = [Component::line(&[1, 0], 0.5), Component::line(&[0, 1], 0.5)];
    let parts = decompose_by_spectrum_components(&g, &comps).unwrap();
    assert_eq!(parts.len(), 2);
    assert_eq!(parts[0].field.axis_periods(4), vec![Some(2), Some(1)]);
    assert_eq!(parts[1].field.axis_periods(4), vec![Some(1), Some(2)]);
    let single = TrigField::new(2, fw.dof(), vec![g.atoms()[0].clone()]).unwrap();
    let one = decompose_by_spectrum_components(&single, &comps).unwrap();
    assert_eq!(one.len(), 1);
    assert_eq!(one[0].field, single);
}

fn sigma_min(s: &rigidkit::symbol::SymbolMatrix, t: &[f64]) -> f64 {
    rigidkit::linalg::singular_values(&s.eval_f64(t, true))
        .last()
        .copied()
        .unwrap_or(0.0)
}

/// Scans each row `t₁ = i/n` densely in `t₂`, refines every local minimum of
/// `σ_min` by ternary search, and looks for a null vector there.
fn row_minima_hit(s: &rigidkit::symbol::SymbolMatrix, n: i64) -> bool {
    let steps = 2048;
    for i in 0..n {
        let t1 = i as f64 / n as f64;
        let f = |t2: f64| sigma_min(s, &[t1, t2]);
        let vals: Vec<f64> = (0..steps).map(|j| f(j as f64 / steps as f64)).collect();
        for j in 0..steps {
            let (a, b, c) = (
                vals[(j + steps - 1) % steps],
                vals[j],
                vals[(j + 1) % steps],
            );
            if b > a || b > c || b > 1e-2 {
                continue;
            }
            let (mut lo, mut hi) = (
                (j as f64 - 1.0) / steps as f64,
                (j as f64 + 1.0) / steps as f64,
            );
            for _ in 0..100 {
                let m1 = lo + (hi - lo) / 3.0;
                let m2 = hi - (hi - lo) / 3.0;
                if f(m1) < f(m2) {
                    hi = m2;
                } else {
                    lo = m1;
                }
            }
            let t2 = (0.5 * (lo + hi)).rem_euclid(1.0);
            let t = Phase::from_f64(&[t1, t2]);
            if !t.is_zero()
                && t.distance(&Phase::zero(2)) > 1e-6
                && !null_space_at_phase(s, &t, TOL).is_empty()
            {
                return true;
            }
        }
    }
    false
}

fn brute_force_rigid(fw: &CrystalFramework, n: i64) -> bool {
    let s = build_symbol(fw);
    let trans = translation_basis(2, fw.num_vertices());
    for i in 0..n {
        for j in 0..n {
            let t = Phase::from_ratios(&[(i, n), (j, n)]);
            let null = null_space_at_phase(&s, &t, TOL);
            if t.is_zero() {
                if null.len() > trans.len() {
                    return false;
                }
            } else if !null.is_empty() {
                return false;
            }
        }
    }
    !row_minima_hit(&s, n)
}

#[test]
fn decision_agrees_with_brute_force_search() {
    for name in [
        "triangle",
        "localflex",
        "altgrid",
        "doublegrid",
        "rhombic",
        "star",
        "hex-c2v",
        "hex-5pi12",
        "octagon",
    ] {
        let fw = fixture(name);
        let d = ap_rigidity_decision(&fw, &SpectrumOptions::new(32));
        assert_eq!(
            d.verdict == ApVerdict::Rigid,
            brute_force_rigid(&fw, 32),
            "{}",
            name
        );
    }
}

#[test]
fn decision_examples() {
    let opts = SpectrumOptions::new(64);
    assert_eq!(
        ap_rigidity_decision(&fixture("triangle"), &opts).verdict,
        ApVerdict::Rigid
    );
    let dg = ap_rigidity_decision(&fixture("doublegrid"), &opts);
    assert_eq!(dg.verdict, ApVerdict::NotRigid);
    assert!(dg.singleton && dg.periodic_witness().is_some());
    let lf = ap_rigidity_decision(&fixture("localflex"), &opts);
    assert_eq!(lf.verdict, ApVerdict::NotRigid);
    assert!(lf
        .witnesses
        .iter()
        .any(|w| matches!(w, Witness::SpectrumHit { .. })));
    let (t, b) = lf.spectrum_witness().unwrap();
    let m = build_symbol(&fixture("localflex")).eval_f64(t, true);
    assert!((m * b).norm() < 1e-8);
}
