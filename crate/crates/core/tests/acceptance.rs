use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rigidkit::algebra::{ExactReal, LaurentPoly};
use rigidkit::apflex::{
    ap_flex_check, ap_rigidity_decision, bochner_fejer_kernel, extract_sampled, mean_convolution,
    phase_component_extract, ApVerdict, FrequencyAtom, KernelConfig, TrigField, Witness,
};
use rigidkit::framework::{
    generate_patch, rescale_to_sublattice, CrystalFramework, IntegerSublattice, PatchSpec,
};
use rigidkit::gallery::{list_fixtures, load_fixture, HEX_5PI12_POLYNOMIAL, OCTAGON_FACTORS};
use rigidkit::linalg::CVector;
use rigidkit::phase::Phase;
use rigidkit::rum::{
    crystal_polynomial, nontrivial_supercell_flexes, sample_spectrum, spectrum_csv,
    spectrum_rescale_image, spectrum_svg, supercell_flex_search, verify_factorization,
    SpectrumOptions, SpectrumReport,
};
use rigidkit::symbol::{
    build_symbol, null_space_at_phase, phase_periodic_field, rigidity_residual_on_patch,
};

const TAU: f64 = 1e-8;
const SEED: u64 = 20_131_108;

type Check = Result<String, String>;

fn fixture(name: &str) -> CrystalFramework {
    load_fixture(name).unwrap().framework
}

fn poly(text: &str, nvars: usize) -> LaurentPoly<ExactReal> {
    LaurentPoly::parse(text, nvars).unwrap_or_else(|e| panic!("{}: {}", text, e))
}

fn within(elapsed: Duration, limit: f64, what: &str) -> Check {
    let s = elapsed.as_secs_f64();
    if s < limit {
        Ok(format!("{} {:.2}s", what, s))
    } else {
        Err(format!("{} took {:.2}s, limit {}s", what, s, limit))
    }
}

fn spectrum(name: &str, n: usize) -> SpectrumReport {
    let mut opts = SpectrumOptions::new(n);
    opts.tolerance = TAU;
    opts.estimate_dimension = false;
    sample_spectrum(&fixture(name), &opts)
}

// Symbol regression against the printed matrices, with z̄ written as z^-1.

const PRINTED: [(&str, &[&[&str]]); 5] = [
    (
        "triangle",
        &[
            &["z^-1 - 1", "0"],
            &["1/2*(z^-1 - w^-1)", "sqrt(3)/2*(w^-1 - z^-1)"],
            &["1/2*(w^-1 - 1)", "sqrt(3)/2*(w^-1 - 1)"],
        ],
    ),
    (
        "localflex",
        &[
            &["z^-1 - 1", "0", "0", "0"],
            &["0", "w^-1 - 1", "0", "0"],
            &["-1/2*w^-1", "1/2*w^-1", "1/2", "-1/2"],
            &["1/2*z^-1", "-1/2*z^-1", "-1/2", "1/2"],
        ],
    ),
    (
        "altgrid",
        &[
            &["-1", "0", "z^-1*w", "0"],
            &["0", "-1", "0", "1"],
            &["z^-1 - 1", "z^-1 - 1", "0", "0"],
            &["z^-1", "0", "-1", "0"],
            &["0", "w^-1", "0", "-1"],
        ],
    ),
    (
        "doublegrid",
        &[
            &["-1/2", "1/2", "1/2", "-1/2"],
            &["z^-1 - 1", "0", "0", "0"],
            &["0", "w^-1 - 1", "0", "0"],
            &["z^-1 - w^-1", "w^-1 - z^-1", "0", "0"],
            &["0", "0", "z^-1 - 1", "0"],
            &["0", "0", "0", "w^-1 - 1"],
            &["0", "0", "z^-1 - w^-1", "w^-1 - z^-1"],
        ],
    ),
    (
        "rhombic",
        &[
            &["-1/2", "-sqrt(3)/2", "1/2", "sqrt(3)/2", "0", "0"],
            &["0", "-1", "0", "0", "0", "1"],
            &["1/2*w^-1", "sqrt(3)/2*w^-1", "0", "0", "-1/2", "-sqrt(3)/2"],
            &["0", "w^-1", "0", "-1", "0", "0"],
            &[
                "-1/2",
                "sqrt(3)/2",
                "0",
                "0",
                "1/2*w*z^-1",
                "-sqrt(3)/2*w*z^-1",
            ],
            &["1/2*z^-1", "-sqrt(3)/2*z^-1", "-1/2", "sqrt(3)/2", "0", "0"],
        ],
    ),
];

fn criterion_1() -> Check {
    let start = Instant::now();
    let mut entries = 0;
    for (name, rows) in PRINTED {
        let s = build_symbol(&fixture(name));
        let cols = rows[0].len();
        if (s.rows(), s.cols()) != (rows.len(), cols) {
            return Err(format!(
                "{}: shape {}x{}, printed {}x{}",
                name,
                s.rows(),
                s.cols(),
                rows.len(),
                cols
            ));
        }
        for (i, row) in rows.iter().enumerate() {
            for (j, text) in row.iter().enumerate() {
                let found = s.entry(i, j).ok_or(format!("{}: no exact entries", name))?;
                if *found != poly(text, 2) {
                    return Err(format!(
                        "{} entry ({}, {}): got {}, printed {}",
                        name, i, j, found, text
                    ));
                }
                entries += 1;
            }
        }
    }
    let time = within(start.elapsed(), 1.0, "runtime")?;
    Ok(format!(
        "{} entries over 5 fixtures match exactly; {}",
        entries, time
    ))
}

fn normalized_product(factors: &[&str], nvars: usize) -> LaurentPoly<ExactReal> {
    let p = factors
        .iter()
        .fold(LaurentPoly::one(nvars), |acc, f| acc.mul(&poly(f, nvars)));
    p.unit_normalize().unwrap().normalized
}

fn criterion_2() -> Check {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut passed = Vec::new();
    let cases: [(&str, Option<LaurentPoly<ExactReal>>); 5] = [
        (
            "rhombic",
            Some(normalized_product(&["z-1", "w-1", "z-w"], 2)),
        ),
        (
            "star",
            Some(normalized_product(&["z-1", "z+1", "w-1", "w+1"], 2)),
        ),
        (
            "hex-c2v",
            Some(normalized_product(&["z+1", "z-1", "z-1", "z-1"], 2)),
        ),
        (
            "hex-5pi12",
            Some(normalized_product(&[HEX_5PI12_POLYNOMIAL], 2)),
        ),
        ("localflex", None),
    ];
    for (name, expected) in cases {
        let p = crystal_polynomial(&fixture(name)).map_err(|e| format!("{}: {}", name, e))?;
        match (p.normalized_exact(), &expected) {
            (None, None) if p.is_zero() => passed.push(format!("{} identically zero", name)),
            (Some(got), Some(want)) if got == want => {
                passed.push(format!("{} = {}", name, p.factored()))
            }
            (got, _) => failures.push(format!(
                "{}: computed {} ({} terms), expected {}",
                name,
                got.map_or("0".to_string(), |g| g.to_string()),
                got.map_or(0, |g| g.len()),
                expected.as_ref().map_or("0".to_string(), |e| e.to_string())
            )),
        }
    }
    let time = within(start.elapsed(), 60.0, "runtime");
    if let Err(t) = &time {
        failures.push(t.clone());
    }
    if failures.is_empty() {
        Ok(format!("{}; {}", passed.join("; "), time.unwrap()))
    } else {
        Err(format!(
            "{} | passed: {}",
            failures.join(" | "),
            passed.join("; ")
        ))
    }
}

struct Outputs {
    text: Vec<String>,
}

fn criterion_3(out: &mut Outputs) -> Check {
    let start = Instant::now();
    let c = fixture("octagon");
    let factors: Vec<String> = OCTAGON_FACTORS.iter().map(|s| s.to_string()).collect();
    let check = verify_factorization(&c, &factors).map_err(|e| e.to_string())?;
    if !check.matches || check.max_deviation > 1e-8 {
        return Err(format!(
            "factorization deviation {:e} (matches {})",
            check.max_deviation, check.matches
        ));
    }
    let report = spectrum("octagon", 256);
    let roots = [3f64.sqrt() + 2f64.sqrt(), 3f64.sqrt() - 2f64.sqrt()];
    let mut worst: f64 = 0.0;
    for h in report.all_hits() {
        let (rz, rw) = (
            (std::f64::consts::TAU * h.t[0]).cos(),
            (std::f64::consts::TAU * h.t[1]).cos(),
        );
        let r = roots
            .iter()
            .map(|a| (rw - a * rz - (1.0 - a)).abs())
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(r);
    }
    out.text.push(format!("{:?}", check));
    out.text.push(spectrum_csv(&report));
    out.text
        .push(spectrum_svg(&report).map_err(|e| e.to_string())?);
    if worst > 1e-3 {
        return Err(format!(
            "a spectrum hit misses both relations by {:e}",
            worst
        ));
    }
    let time = within(start.elapsed(), 60.0, "runtime")?;
    Ok(format!(
        "max deviation {:e} over 200 points; {} hits, worst relation residual {:.2e}; {}",
        check.max_deviation,
        report.hit_count(),
        worst,
        time
    ))
}

fn grid_index_set(r: &SpectrumReport) -> Vec<Vec<usize>> {
    r.hits.iter().map(|h| h.index.clone().unwrap()).collect()
}

fn on_rhombic_lines(t: &[f64]) -> bool {
    let w = |x: f64| {
        let y = x.rem_euclid(1.0);
        y.min(1.0 - y)
    };
    w(t[0]) < 1e-6 || w(t[1]) < 1e-6 || w(t[0] - t[1]) < 1e-6
}

fn criterion_4(out: &mut Outputs) -> Check {
    let n = 256;
    let mut notes = Vec::new();
    let all: Vec<Vec<usize>> = (0..n)
        .flat_map(|i| (0..n).map(move |j| vec![i, j]))
        .collect();
    let lines: Vec<Vec<usize>> = all
        .iter()
        .filter(|ij| ij[0] == 0 || ij[1] == 0 || ij[0] == ij[1])
        .cloned()
        .collect();
    let cases: [(&str, Vec<Vec<usize>>); 5] = [
        ("triangle", vec![vec![0, 0]]),
        ("localflex", all.clone()),
        ("altgrid", vec![vec![0, 0], vec![n / 2, 0]]),
        ("doublegrid", vec![vec![0, 0]]),
        ("rhombic", lines),
    ];
    for (name, expected) in cases {
        let start = Instant::now();
        let r = spectrum(name, n);
        let got = grid_index_set(&r);
        if got != expected {
            let extra = got.iter().filter(|g| !expected.contains(g)).count();
            let missing = expected.iter().filter(|e| !got.contains(e)).count();
            return Err(format!(
                "{}: {} false hits, {} missed grid points",
                name, extra, missing
            ));
        }
        let stray: Vec<&Vec<f64>> = r
            .curve_points
            .iter()
            .map(|p| &p.t)
            .filter(|t| name != "localflex" && !(name == "rhombic" && on_rhombic_lines(t)))
            .collect();
        if !stray.is_empty() {
            return Err(format!(
                "{}: off-grid hits outside the spectrum, e.g. {:?}",
                name, stray[0]
            ));
        }
        within(start.elapsed(), 30.0, name)?;
        notes.push(format!(
            "{} {} ({:.1}s)",
            name,
            got.len(),
            start.elapsed().as_secs_f64()
        ));
        out.text.push(spectrum_csv(&r));
    }
    Ok(format!("grid hits: {}", notes.join(", ")))
}

fn criterion_5(out: &mut Outputs) -> Check {
    let start = Instant::now();
    let mut opts = SpectrumOptions::new(256);
    opts.tolerance = TAU;
    opts.estimate_dimension = false;
    let mut notes = Vec::new();
    for name in [
        "triangle",
        "doublegrid",
        "localflex",
        "altgrid",
        "rhombic",
        "star",
        "hex-c2v",
        "octagon",
        "hex-5pi12",
    ] {
        let c = fixture(name);
        let d = ap_rigidity_decision(&c, &opts);
        out.text.push(d.to_string());
        let spectral = d
            .witnesses
            .iter()
            .any(|w| matches!(w, Witness::SpectrumHit { .. }));
        let periodic = d.periodic_witness().is_some();
        let ok = match name {
            "triangle" => d.verdict == ApVerdict::Rigid && d.witnesses.is_empty(),
            "doublegrid" => d.verdict == ApVerdict::NotRigid && periodic,
            "hex-5pi12" => {
                let consistent =
                    (d.verdict == ApVerdict::Rigid) == (d.periodic.rigid && d.singleton);
                notes.push(format!(
                    "hex-5pi12 {} (periodic rank {} of {}, singleton {}, {} hits)",
                    d.verdict,
                    d.periodic.rank,
                    d.periodic.expected_rank,
                    d.singleton,
                    d.spectrum_hits
                ));
                consistent
            }
            _ => d.verdict == ApVerdict::NotRigid && spectral,
        };
        if let Some((t, b)) = d.spectrum_witness() {
            let r = (build_symbol(&c).eval_f64(t, true) * b).norm();
            if r > 1e-6 {
                return Err(format!("{}: spectrum witness residual {:e}", name, r));
            }
        }
        if !ok {
            return Err(format!(
                "{}: verdict {} with witnesses {:?}",
                name, d.verdict, d.witnesses
            ));
        }
    }
    let time = within(start.elapsed(), 120.0, "runtime")?;
    Ok(format!(
        "verdicts as expected; {}; {}",
        notes.join("; "),
        time
    ))
}

fn random_phase(rng: &mut ChaCha8Rng, d: usize) -> Phase {
    Phase::from_f64(&(0..d).map(|_| rng.gen::<f64>()).collect::<Vec<_>>())
}

fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let names = list_fixtures();
    let mut worst: f64 = 0.0;
    for trial in 0..100 {
        let name = names[rng.gen_range(0..names.len())];
        let c = fixture(name);
        let d = c.dim();
        let t = random_phase(&mut rng, d);
        let b = CVector::from_fn(c.dof(), |_, _| random_complex(&mut rng));
        let phi_b = build_symbol(&c).eval(&t, true) * &b;
        let patch = generate_patch(&c, &PatchSpec::cube(d, -2, 2));
        let res = rigidity_residual_on_patch(&c, &patch, &phase_periodic_field(&t, &b, d))
            .map_err(|e| e.to_string())?;
        for (pe, r) in patch.edges.iter().zip(&res.values) {
            let dev = (r - t.character(&pe.k) * phi_b[pe.edge]).norm();
            worst = worst.max(dev);
            if dev > 1e-10 {
                return Err(format!("trial {} on {}: deviation {:e}", trial, name, dev));
            }
        }
    }
    Ok(format!("100 triples, max deviation {:.2e}", worst))
}

fn line_phase(name: &str, rng: &mut ChaCha8Rng) -> Phase {
    let s: f64 = rng.gen();
    match (name, rng.gen_range(0..3)) {
        ("rhombic", 0) => Phase::from_f64(&[0.0, s]),
        ("rhombic", 1) => Phase::from_f64(&[s, 0.0]),
        ("rhombic", _) => Phase::from_f64(&[s, s]),
        _ => random_phase(rng, 2),
    }
}

fn flex_atom(c: &CrystalFramework, t: Phase, coeff: Complex64) -> Result<FrequencyAtom, String> {
    let b = null_space_at_phase(&build_symbol(c), &t, TAU);
    let v = b.first().ok_or(format!("no flex at {}", t))?;
    Ok(FrequencyAtom { t, a: v * coeff })
}

fn residual(c: &CrystalFramework, g: &TrigField) -> f64 {
    let p = generate_patch(c, &PatchSpec::cube(2, -4, 4));
    rigidity_residual_on_patch(c, &p, &g.velocity())
        .unwrap()
        .sup_norm
}

/// Atoms on a `(1/8)Z²` grid, with `N + 1 ≡ 1 (mod 8)` for every tested `N`,
/// so each excluded-phase term averages to exactly `(N+1)^{-r}`.
fn eighth_phases(name: &str) -> Vec<Phase> {
    let e = |a: i64, b: i64| Phase::from_ratios(&[(a, 8), (b, 8)]);
    match name {
        "rhombic" => vec![e(0, 3), e(5, 0), e(2, 2)],
        _ => vec![e(1, 0), e(3, 5), e(0, 7)],
    }
}

fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    let mut notes = Vec::new();
    for name in ["localflex", "rhombic"] {
        let c = fixture(name);
        let mut worst_check: f64 = 0.0;
        let mut worst_conv: f64 = 0.0;
        for _ in 0..20 {
            let atoms = (0..3)
                .map(|_| {
                    let t = line_phase(name, &mut rng);
                    flex_atom(&c, t, random_complex(&mut rng))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let g = TrigField::new(2, c.dof(), atoms).map_err(|e| e.to_string())?;
            let r = ap_flex_check(&c, &g, &PatchSpec::cube(2, -4, 4)).map_err(|e| e.to_string())?;
            if !r.is_flex || !r.consistent {
                return Err(format!("{}: trigonometric flex rejected: {:?}", name, r));
            }
            worst_check = worst_check.max(r.patch_residual);
            let bases: Vec<Phase> = g.atoms().iter().map(|a| a.t.clone()).collect();
            let k = bochner_fejer_kernel(&bases, 2, &KernelConfig::default())
                .map_err(|e| e.to_string())?;
            let conv = mean_convolution(&g, &k).map_err(|e| e.to_string())?;
            let rc = residual(&c, &conv);
            worst_conv = worst_conv.max(rc);
            if rc > 1e-9 {
                return Err(format!("{}: convolved residual {:e}", name, rc));
            }
        }
        let atoms = eighth_phases(name)
            .into_iter()
            .map(|t| flex_atom(&c, t, random_complex(&mut rng)))
            .collect::<Result<Vec<_>, _>>()?;
        let g = TrigField::new(2, c.dof(), atoms).map_err(|e| e.to_string())?;
        let excluded = [Phase::zero(2), Phase::from_ratios(&[(1, 2), (1, 2)])];
        for t in &excluded {
            if g.coefficient(t).is_some() {
                return Err(format!("{} is an atom", t));
            }
            let errors = [8usize, 16, 32, 64]
                .iter()
                .map(|&n| {
                    let closed =
                        phase_component_extract(&g, t, Some(n)).map_err(|e| e.to_string())?;
                    let sampled = extract_sampled(&g.velocity(), c.num_vertices(), t, n)
                        .map_err(|e| e.to_string())?;
                    if (&closed - &sampled).norm() > 1e-9 {
                        return Err(format!("closed form and samples disagree at N={}", n));
                    }
                    Ok(closed.norm())
                })
                .collect::<Result<Vec<f64>, String>>()?;
            let ratios: Vec<f64> = errors.windows(2).map(|w| w[1] / w[0]).collect();
            if ratios.iter().any(|r| r.is_nan() || *r > 0.6) {
                return Err(format!("{} at {}: decay ratios {:?}", name, t, ratios));
            }
            if t.is_zero() {
                notes.push(format!(
                    "{}: patch residual {:.1e}, convolved {:.1e}, decay ratios {}",
                    name,
                    worst_check,
                    worst_conv,
                    ratios
                        .iter()
                        .map(|r| format!("{:.3}", r))
                        .collect::<Vec<_>>()
                        .join("/")
                ));
            }
        }
    }
    Ok(notes.join("; "))
}

fn criterion_8() -> Check {
    let n = 256;
    let matrices = [
        vec![vec![2, 0], vec![0, 1]],
        vec![vec![1, 0], vec![0, 2]],
        vec![vec![1, 1], vec![0, 1]],
    ];
    let mut checked = 0;
    for name in ["altgrid", "triangle"] {
        let c = fixture(name);
        let base = spectrum(name, n);
        for m in &matrices {
            let s = IntegerSublattice::new(m.clone()).map_err(|e| e.to_string())?;
            let r = rescale_to_sublattice(&c, &s).map_err(|e| e.to_string())?;
            let mut opts = SpectrumOptions::new(n);
            opts.tolerance = TAU;
            opts.estimate_dimension = false;
            let rescaled = sample_spectrum(&r, &opts);
            for h in base.all_hits() {
                let image = spectrum_rescale_image(&s, &Phase::from_f64(&h.t));
                if !rescaled.near_hit(&image.to_f64(), 1.0) {
                    return Err(format!(
                        "{} M={:?}: {:?} maps to {} which is not a hit",
                        name, m, h.t, image
                    ));
                }
                checked += 1;
            }
        }
    }
    let s = IntegerSublattice::diagonal(&[2, 1]).map_err(|e| e.to_string())?;
    let found = supercell_flex_search(&fixture("altgrid"), &s, TAU).map_err(|e| e.to_string())?;
    let half = Phase::from_ratios(&[(1, 2), (0, 1)]);
    if !nontrivial_supercell_flexes(&found).any(|f| f.phase.same_as(&half)) {
        return Err("altgrid diag(2,1): no nontrivial flex at (-1, 1)".into());
    }
    Ok(format!(
        "{} hit images confirmed; altgrid diag(2,1) flex at omega = (-1, 1)",
        checked
    ))
}

fn criterion_9() -> Check {
    let start = Instant::now();
    let base = crystal_polynomial(&fixture("rhombic")).map_err(|e| e.to_string())?;
    let p = base
        .normalized_exact()
        .ok_or("rhombic polynomial vanishes")?;
    let lifted = LaurentPoly::from_terms(
        3,
        p.terms().map(|(e, c)| {
            let mut e = e.clone();
            e.push(0);
            (e, c.clone())
        }),
    );
    let expected = poly("(z3-1)^3", 3)
        .mul(&lifted)
        .unit_normalize()
        .unwrap()
        .normalized;
    let product = crystal_polynomial(&fixture("product-rhombic")).map_err(|e| e.to_string())?;
    match product.normalized_exact() {
        Some(q) if *q == expected => {}
        other => {
            return Err(format!(
                "product-rhombic polynomial {:?}",
                other.map(|q| q.to_string())
            ))
        }
    }
    let mut opts = SpectrumOptions::new(48);
    opts.tolerance = TAU;
    opts.estimate_dimension = false;
    let r = sample_spectrum(&fixture("product-octagon"), &opts);
    let circle = r
        .hits
        .iter()
        .filter(|h| matches!(h.index.as_deref(), Some([0, 0, _])))
        .count();
    if circle != 48 {
        return Err(format!(
            "product-octagon: {} of 48 circle points are hits",
            circle
        ));
    }
    let time = within(start.elapsed(), 180.0, "runtime")?;
    Ok(format!(
        "product-rhombic = unit * (z3-1)^3 * p_rhombic; product-octagon circle 48/48 ({} hits total); {}",
        r.hits.len(),
        time
    ))
}

fn report(n: usize, what: &str, r: &Check) -> bool {
    match r {
        Ok(detail) => println!("PASS criterion {:>2}: {}: {}", n, what, detail),
        Err(detail) => println!("FAIL criterion {:>2}: {}: {}", n, what, detail),
    }
    r.is_ok()
}

fn main() -> ExitCode {
    let mut ok = true;
    ok &= report(1, "symbol regression", &criterion_1());
    ok &= report(2, "crystal polynomials", &criterion_2());
    let mut first = Outputs { text: Vec::new() };
    ok &= report(3, "octagon factorization", &criterion_3(&mut first));
    ok &= report(4, "spectrum classification", &criterion_4(&mut first));
    ok &= report(5, "rigidity verdicts", &criterion_5(&mut first));
    ok &= report(6, "consistency identity", &criterion_6());
    ok &= report(7, "frequency components", &criterion_7());
    ok &= report(8, "rescaling", &criterion_8());
    ok &= report(9, "product frameworks", &criterion_9());
    let rerun = || {
        let mut second = Outputs { text: Vec::new() };
        let a = criterion_3(&mut second);
        let b = criterion_4(&mut second);
        let c = criterion_5(&mut second);
        (a.is_ok() && b.is_ok() && c.is_ok(), second)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(3)
        .build()
        .unwrap();
    let (rerun_ok, second) = pool.install(rerun);
    let determinism = if !rerun_ok {
        Err("criteria 3-5 changed outcome on rerun".to_string())
    } else if first.text.len() != second.text.len() {
        Err(format!(
            "{} outputs first, {} on rerun",
            first.text.len(),
            second.text.len()
        ))
    } else if let Some(i) = (0..first.text.len()).find(|&i| first.text[i] != second.text[i]) {
        Err(format!("output {} differs between runs", i))
    } else {
        let bytes: usize = first.text.iter().map(|s| s.len()).sum();
        Ok(format!(
            "{} outputs ({} bytes) identical across thread counts",
            first.text.len(),
            bytes
        ))
    };
    ok &= report(10, "determinism", &determinism);
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
