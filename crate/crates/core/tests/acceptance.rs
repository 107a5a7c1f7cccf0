// Acceptance suite. Each test exercises one numbered shipping criterion
// end to end and prints a single pass/fail line for the run log; the
// assertion message carries the detailed failures.

use cylmp::fractions::{
    bound_certificate, bounded_transform, frac_eval, BoundCertificate, FracElement,
};
use cylmp::gaussian::{
    classify_sigma_additivity, fourier, gaussian_marginal, mean_and_stderr, sample, wick_moment,
    wick_moment_enumeration, CovMatrix, CovarianceSpec, GaussianMeasure, Head, TailModel,
};
use cylmp::measures::{
    check_axioms, check_consistency, chebyshev_bound, continuity_witness, BoxRegion, FiniteMeasure,
    IndexSet, Interval, MomentValue,
};
use cylmp::moments::{
    carleman_report, moment_matrix, psd_check, psd_check_entries, quadrature_1d, verify_representation,
    CarlemanVerdict, MomentFunctional, PsdVerdict,
};
use cylmp::poly::{monomials_up_to, var, Character, Monomial, Poly, VarIndex};
use cylmp::rat::rational_to_f64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Prints the one-line verdict for a criterion and fails the test with the
/// collected diagnostics when anything went wrong.
fn conclude(number: u32, label: &str, failures: &[String]) {
    let pass = failures.is_empty();
    println!(
        "criterion {number:2}: {} - {label}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(
        pass,
        "criterion {number} ({label}) failed:\n{}",
        failures.join("\n")
    );
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn power_tail() -> TailModel {
    TailModel::PowerLaw {
        c: BigRational::one(),
        p: ratio(2, 1),
    }
}

fn random_rational(rng: &mut ChaCha8Rng, span: i64, den: i64) -> BigRational {
    BigRational::new(rng.gen_range(-span..=span).into(), rng.gen_range(1..=den).into())
}

/// `L * D * L^T` with a unit lower triangle and positive diagonal: an exact
/// rational positive definite matrix.
fn random_pd(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Vec<BigRational>> {
    let mut l = vec![vec![BigRational::zero(); dim]; dim];
    for (i, row) in l.iter_mut().enumerate() {
        for entry in row.iter_mut().take(i) {
            *entry = random_rational(rng, 3, 2);
        }
        row[i] = BigRational::one();
    }
    let diag: Vec<BigRational> = (0..dim)
        .map(|_| BigRational::new(rng.gen_range(1i64..=4).into(), rng.gen_range(1i64..=2).into()))
        .collect();
    let mut m = vec![vec![BigRational::zero(); dim]; dim];
    for i in 0..dim {
        for j in 0..=i {
            let mut sum = BigRational::zero();
            for k in 0..=j {
                sum += &l[i][k] * &diag[k] * &l[j][k];
            }
            m[i][j] = sum.clone();
            m[j][i] = sum;
        }
    }
    m
}

fn random_spec(rng: &mut ChaCha8Rng, head_len: usize) -> CovarianceSpec {
    if rng.gen_bool(0.5) {
        let diag: Vec<BigRational> = (0..head_len)
            .map(|_| BigRational::new(rng.gen_range(1i64..=4).into(), rng.gen_range(1i64..=2).into()))
            .collect();
        CovarianceSpec::diag(diag, power_tail()).expect("positive diagonal head")
    } else {
        CovarianceSpec::new(Head::Dense(random_pd(rng, head_len)), power_tail())
            .expect("constructed head is positive definite")
    }
}

#[test]
fn criterion_01_wick_dual_routes_and_monte_carlo() {
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let vars = vec![var(1), var(2), var(3), var(4)];
    let monomials = monomials_up_to(&vars, 8);
    let mc_monomials = [
        Monomial::var_pow(var(1), 2),
        Monomial::from_pairs([(var(1), 1), (var(2), 1)]),
        Monomial::from_pairs([(var(1), 2), (var(2), 2)]),
        Monomial::from_pairs([(var(3), 2), (var(4), 2)]),
        Monomial::from_pairs([(var(1), 1), (var(2), 1), (var(3), 1), (var(4), 1)]),
    ];
    let mut failures = Vec::new();

    for case in 0..20 {
        let entries = random_pd(&mut rng, 4);
        let cov = CovMatrix::new(vars.clone(), entries.clone()).expect("symmetric by build");
        for alpha in &monomials {
            let recursive = wick_moment(&cov, alpha).expect("degree under cap");
            let enumerated = wick_moment_enumeration(&cov, alpha).expect("degree under cap");
            if recursive != enumerated {
                failures.push(format!(
                    "case {case}: routes disagree on {alpha}: {recursive} vs {enumerated}"
                ));
            }
        }

        if case < 5 {
            let spec = CovarianceSpec::new(Head::Dense(entries), power_tail())
                .expect("positive definite head");
            let f = IndexSet::from_indices([1, 2, 3, 4]).expect("nonempty");
            let draws = sample(&spec, &f, 1_000_000, 7000 + case).expect("sampling succeeds");
            for alpha in &mc_monomials {
                let exact = rational_to_f64(&wick_moment(&cov, alpha).expect("under cap"));
                let values: Vec<f64> = draws
                    .iter()
                    .map(|x| {
                        alpha
                            .exponents()
                            .map(|(v, e)| x[(v.get() - 1) as usize].powi(e as i32))
                            .product()
                    })
                    .collect();
                let (mean, stderr) = mean_and_stderr(&values);
                if (mean - exact).abs() > 4.0 * stderr {
                    failures.push(format!(
                        "case {case}: monte carlo for {alpha} gave {mean} +- {stderr}, exact {exact}"
                    ));
                }
            }
        }
    }
    conclude(1, "wick moments: both routes and monte carlo", &failures);
}

#[test]
fn criterion_02_projective_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(1002);
    let mut failures = Vec::new();

    for case in 0..50 {
        let spec = random_spec(&mut rng, 4);
        let mu = GaussianMeasure::new(spec).expect("valid spec");
        let mut indices: Vec<u32> = (1..=6).collect();
        indices.shuffle(&mut rng);
        let g_len = rng.gen_range(2usize..=4);
        let f_len = rng.gen_range(1..g_len);
        let g = IndexSet::from_indices(indices[..g_len].to_vec()).expect("nonempty");
        let f = IndexSet::from_indices(indices[..f_len].to_vec()).expect("nonempty");

        match check_consistency(&mu, &f, &g, 6) {
            Ok(report) => {
                if !report.pass || !report.rows.iter().all(|row| row.exact_zero) {
                    failures.push(format!(
                        "case {case}: residual {} for {f} inside {g}",
                        report.max_residual
                    ));
                }
            }
            Err(e) => failures.push(format!("case {case}: {e}")),
        }
    }
    conclude(2, "projective consistency of nested marginals", &failures);
}

/// Splits an axis at the given ascending cut points into half-open pieces.
fn axis_pieces(cuts: &[BigRational]) -> Vec<Interval> {
    if cuts.is_empty() {
        return vec![Interval::full()];
    }
    let mut pieces = vec![Interval::up_to(cuts[0].clone(), false)];
    for pair in cuts.windows(2) {
        pieces.push(
            Interval::new(Some(pair[0].clone()), Some(pair[1].clone()), true, false)
                .expect("cuts are sorted"),
        );
    }
    pieces.push(Interval::from_on(cuts.last().unwrap().clone(), true));
    pieces
}

/// The product partition of the full space induced by per-axis cuts.
fn grid_partition(axes: &[Vec<BigRational>]) -> Vec<BoxRegion> {
    let mut cells: Vec<Vec<Interval>> = vec![Vec::new()];
    for cuts in axes {
        let pieces = axis_pieces(cuts);
        let mut next = Vec::new();
        for partial in &cells {
            for piece in &pieces {
                let mut cell = partial.clone();
                cell.push(piece.clone());
                next.push(cell);
            }
        }
        cells = next;
    }
    cells.into_iter().map(BoxRegion::new).collect()
}

fn random_cuts(rng: &mut ChaCha8Rng, count: usize) -> Vec<BigRational> {
    let mut cuts: Vec<BigRational> = (0..count).map(|_| random_rational(rng, 8, 4)).collect();
    cuts.sort();
    cuts.dedup();
    cuts
}

#[test]
fn criterion_03_cylinder_measure_axioms() {
    let mut rng = ChaCha8Rng::seed_from_u64(1003);
    let mut failures = Vec::new();

    for case in 0..20 {
        let spec = random_spec(&mut rng, 3);
        let mut indices: Vec<u32> = (1..=8).collect();
        indices.shuffle(&mut rng);
        let f_len = rng.gen_range(1usize..=4);
        let f = IndexSet::from_indices(indices[..f_len].to_vec()).expect("nonempty");
        let marginal = gaussian_marginal(&spec, &f).expect("valid marginal");
        let mass = marginal.moment(&Monomial::unit()).expect("unit moment");
        if mass != MomentValue::Exact(BigRational::one()) {
            failures.push(format!("case {case}: normalization of {f} is not exactly 1"));
        }
    }

    for case in 0..20 {
        let exact_backend = case < 14;
        let spec = if exact_backend {
            CovarianceSpec::diag(
                (0..2).map(|_| {
                    BigRational::new(
                        rng.gen_range(1i64..=4).into(),
                        rng.gen_range(1i64..=2).into(),
                    )
                }),
                power_tail(),
            )
            .expect("positive head")
        } else {
            CovarianceSpec::new(Head::Dense(random_pd(&mut rng, 2)), power_tail())
                .expect("positive definite head")
        };
        let mu = GaussianMeasure::new(spec).expect("valid spec");
        let f = IndexSet::from_indices([1, 2]).expect("nonempty");

        let first_count = rng.gen_range(1usize..=2);
        let second_count = rng.gen_range(0usize..=1);
        let axes = vec![
            random_cuts(&mut rng, first_count),
            random_cuts(&mut rng, second_count),
        ];
        let partition = grid_partition(&axes);
        let whole = BoxRegion::full(2);

        match check_axioms(&mu, &f, &partition, &whole, 5000 + case) {
            Ok(report) => {
                if !report.pass {
                    failures.push(format!(
                        "case {case}: additivity residual {} over tolerance {}",
                        report.residual, report.tolerance
                    ));
                }
                if exact_backend && report.residual > 1e-12 {
                    failures.push(format!(
                        "case {case}: exact backend residual {} above 1e-12",
                        report.residual
                    ));
                }
            }
            Err(e) => failures.push(format!("case {case}: {e}")),
        }
    }
    conclude(3, "normalization and box additivity", &failures);
}

#[test]
fn criterion_04_chebyshev_and_continuity() {
    let mut rng = ChaCha8Rng::seed_from_u64(1004);
    let mut failures = Vec::new();
    let n = 100_000usize;

    for case in 0..30 {
        let diag: Vec<BigRational> = (0..3)
            .map(|_| BigRational::new(rng.gen_range(1i64..=4).into(), rng.gen_range(1i64..=4).into()))
            .collect();
        let spec = CovarianceSpec::diag(diag, power_tail()).expect("positive head");
        let l = MomentFunctional::gaussian(spec.clone());

        let mut t = Poly::zero();
        let var_count = rng.gen_range(1usize..=3);
        let mut chosen: Vec<u32> = (1..=3).collect();
        chosen.shuffle(&mut rng);
        for &k in &chosen[..var_count] {
            let mut c = random_rational(&mut rng, 3, 2);
            if c.is_zero() {
                c = BigRational::one();
            }
            t = &t + &Poly::var(var(k)).scale(&c);
        }

        let support = IndexSet::new(t.support()).expect("nonempty form");
        let coeffs: Vec<(usize, f64)> = cylmp::measures::linear_coefficients(&t)
            .expect("degree-one form")
            .into_iter()
            .map(|(v, c)| (support.position(v).expect("in support"), rational_to_f64(&c)))
            .collect();
        let draws = sample(&spec, &support, n, 6000 + case).expect("sampling succeeds");

        for a_int in [1i64, 2, 4] {
            let a = BigRational::from_integer(a_int.into());
            let bound = rational_to_f64(&chebyshev_bound(&l, &t, &a).expect("linear form"));
            let hits = draws
                .iter()
                .filter(|x| {
                    coeffs
                        .iter()
                        .map(|&(pos, c)| c * x[pos])
                        .sum::<f64>()
                        .abs()
                        >= a_int as f64
                })
                .count();
            let p_hat = hits as f64 / n as f64;
            let stderr = (p_hat * (1.0 - p_hat) / n as f64).sqrt();
            if p_hat > bound + 4.0 * stderr {
                failures.push(format!(
                    "case {case}: tail {p_hat} above chebyshev bound {bound} for a = {a_int}"
                ));
            }
        }
    }

    let mu = GaussianMeasure::new(
        CovarianceSpec::diag([BigRational::one()], power_tail()).expect("positive head"),
    )
    .expect("valid spec");
    let witness = continuity_witness(&mu, &ratio(1, 25), &BigRational::one());
    match witness {
        Ok(MomentValue::Exact(ref q)) if *q == ratio(1, 5) => {}
        other => failures.push(format!("continuity witness came back as {other:?}")),
    }
    conclude(4, "chebyshev tails and continuity witness", &failures);
}

#[test]
fn criterion_05_sigma_additivity_classifier() {
    let mut failures = Vec::new();
    let cases: Vec<(TailModel, &str, String)> = vec![
        (
            TailModel::PowerLaw { c: BigRational::one(), p: ratio(1, 2) },
            "CylinderOnly",
            "power law p = 1/2".into(),
        ),
        (
            TailModel::PowerLaw { c: BigRational::one(), p: ratio(1, 1) },
            "CylinderOnly",
            "power law p = 1".into(),
        ),
        (
            TailModel::PowerLaw { c: BigRational::one(), p: ratio(3, 2) },
            "SigmaAdditive",
            "power law p = 3/2".into(),
        ),
        (
            TailModel::PowerLaw { c: BigRational::one(), p: ratio(2, 1) },
            "SigmaAdditive",
            "power law p = 2".into(),
        ),
        (
            TailModel::Geometric { c: BigRational::one(), r: ratio(1, 4) },
            "SigmaAdditive",
            "geometric r = 1/4".into(),
        ),
        (
            TailModel::Geometric { c: BigRational::one(), r: ratio(1, 2) },
            "SigmaAdditive",
            "geometric r = 1/2".into(),
        ),
        (
            TailModel::Geometric { c: BigRational::one(), r: ratio(3, 4) },
            "SigmaAdditive",
            "geometric r = 3/4".into(),
        ),
        (
            TailModel::Constant { c: BigRational::one() },
            "CylinderOnly",
            "constant tail".into(),
        ),
    ];
    for (tail, expected, label) in cases {
        let spec = CovarianceSpec::diag([BigRational::one()], tail).expect("valid spec");
        let got = classify_sigma_additivity(&spec);
        if got.kind() != expected {
            failures.push(format!("{label}: classified {} instead of {expected}", got.kind()));
        }
    }
    conclude(5, "sigma-additivity classifier verdicts", &failures);
}

#[test]
fn criterion_06_carleman_divergence() {
    let mut failures = Vec::new();

    for b in [ratio(1, 4), ratio(1, 1), ratio(4, 1)] {
        let spec = CovarianceSpec::diag([b.clone()], power_tail()).expect("positive head");
        let l = MomentFunctional::gaussian(spec);
        let report = carleman_report(&l, var(1), 50).expect("gaussian backend");
        if !matches!(report.verdict, CarlemanVerdict::Diverges { .. }) {
            failures.push(format!("b = {b}: verdict is not Diverges"));
        }
        let b_f = rational_to_f64(&b);
        for (k, term) in report.terms.iter().enumerate() {
            let n = (k + 1) as f64;
            if term * (2.0 * b_f * n).sqrt() < 1.0 {
                failures.push(format!("b = {b}: divergence floor broken at n = {n}"));
            }
        }
    }

    let unit = CovarianceSpec::diag([BigRational::one()], power_tail()).expect("positive head");
    let l = MomentFunctional::gaussian(unit);
    let report = carleman_report(&l, var(1), 3).expect("gaussian backend");
    let expected = 1.0 + 3.0f64.powf(-0.25) + 15.0f64.powf(-1.0 / 6.0);
    let got = report.partial_sums[2];
    if (got - expected).abs() > 1e-9 {
        failures.push(format!("partial sum at horizon 3 is {got}, expected {expected}"));
    }
    conclude(6, "carleman terms, verdicts, and partial sum", &failures);
}

#[test]
fn criterion_07_positivity_shadow() {
    let mut rng = ChaCha8Rng::seed_from_u64(1007);
    let mut failures = Vec::new();

    for case in 0..10 {
        let spec = random_spec(&mut rng, 3);
        let l = MomentFunctional::gaussian(spec);
        let mut indices: Vec<u32> = (1..=5).collect();
        indices.shuffle(&mut rng);
        let f_len = rng.gen_range(1usize..=3);
        let f = IndexSet::from_indices(indices[..f_len].to_vec()).expect("nonempty");
        let d = rng.gen_range(1u64..=3);
        let matrix = moment_matrix(&l, &f, d).expect("degree under cap");
        if !psd_check(&matrix).is_psd() {
            failures.push(format!("case {case}: gaussian moment matrix rejected"));
        }
    }

    let corrupted = vec![
        vec![BigRational::one(), ratio(2, 1)],
        vec![ratio(2, 1), BigRational::one()],
    ];
    match psd_check_entries(&corrupted) {
        Ok(PsdVerdict::NotPsd { witness, value }) => {
            let mut recomputed = BigRational::zero();
            for (i, row) in corrupted.iter().enumerate() {
                for (j, mij) in row.iter().enumerate() {
                    recomputed += &witness[i] * mij * &witness[j];
                }
            }
            if recomputed != value || !value.is_negative() {
                failures.push(format!(
                    "witness does not certify: quoted {value}, recomputed {recomputed}"
                ));
            }
        }
        other => failures.push(format!("corrupted matrix came back as {other:?}")),
    }
    conclude(7, "exact psd certificates for moment matrices", &failures);
}

#[test]
fn criterion_08_quadrature_representation() {
    let mut failures = Vec::new();
    let moments = vec![
        BigRational::one(),
        BigRational::zero(),
        BigRational::one(),
        BigRational::zero(),
        ratio(3, 1),
        BigRational::zero(),
    ];
    let nu = quadrature_1d(&moments, 3).expect("hankel matrix is positive definite");

    let root3 = 3.0f64.sqrt();
    let expected = [(-root3, 1.0 / 6.0), (0.0, 2.0 / 3.0), (root3, 1.0 / 6.0)];
    for ((node, weight), (want_node, want_weight)) in nu.atoms().iter().zip(expected) {
        if (node - want_node).abs() > 1e-10 {
            failures.push(format!("node {node} is not within 1e-10 of {want_node}"));
        }
        if (weight - want_weight).abs() > 1e-10 {
            failures.push(format!("weight {weight} is not within 1e-10 of {want_weight}"));
        }
    }

    let f = IndexSet::from_indices([1]).expect("nonempty");
    let l = MomentFunctional::gaussian(
        CovarianceSpec::diag([BigRational::one()], power_tail()).expect("positive head"),
    );
    let marginal = nu.over(var(1));
    match verify_representation(&marginal, &l, &f, 5) {
        Ok(report) if report.pass => {}
        Ok(report) => failures.push(format!(
            "degree-5 representation failed with residual {}",
            report.max_residual
        )),
        Err(e) => failures.push(format!("degree-5 check errored: {e}")),
    }
    match verify_representation(&marginal, &l, &f, 6) {
        Ok(report) => {
            if report.pass {
                failures.push("degree-6 check unexpectedly passed".into());
            }
            if (report.max_residual - 6.0).abs() > 1e-9 {
                failures.push(format!(
                    "degree-6 residual {} is not within 1e-9 of 6",
                    report.max_residual
                ));
            }
        }
        Err(e) => failures.push(format!("degree-6 check errored: {e}")),
    }
    conclude(8, "three-atom quadrature and its residuals", &failures);
}

#[test]
fn criterion_09_fraction_algebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(1009);
    let mut failures = Vec::new();

    for case in 0..1000 {
        let t = random_rational(&mut rng, 10_000, 100);
        if !bounded_transform(&t).circle_residual().is_zero() {
            failures.push(format!("case {case}: circle residual nonzero at t = {t}"));
        }
    }

    let grid: Vec<BigRational> = (-64i64..=64).map(|k| ratio(k, 16)).collect();
    for (element, expected_bound, label) in [
        (FracElement::a_generator(var(1)), BigRational::one(), "a1"),
        (FracElement::b_generator(var(1)), ratio(1, 2), "b1"),
    ] {
        let bound = match bound_certificate(&element) {
            BoundCertificate::Bounded(b) => b,
            BoundCertificate::Unbounded { .. } => {
                failures.push(format!("{label}: flagged unbounded"));
                continue;
            }
        };
        if bound != expected_bound {
            failures.push(format!("{label}: certified {bound} instead of {expected_bound}"));
        }
        let mut best = BigRational::zero();
        for x in &grid {
            let chi = Character::new([(var(1), x.clone())]);
            let value = frac_eval(&element, &chi).abs();
            if value > best {
                best = value;
            }
        }
        let gap = rational_to_f64(&(&bound - &best)).abs();
        if gap > 1e-12 {
            failures.push(format!("{label}: grid supremum misses the bound by {gap}"));
        }
    }

    let cubic = FracElement::new(
        Poly::term(Monomial::var_pow(var(1), 3), BigRational::one()),
        [(var(1), 1)],
    );
    match bound_certificate(&cubic) {
        BoundCertificate::Unbounded { var: v } if v == var(1) => {}
        other => failures.push(format!("cubic over one factor came back as {other:?}")),
    }
    conclude(9, "circle identity, sharp bounds, unbounded witness", &failures);
}

#[test]
fn criterion_10_fourier_transform() {
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let mut failures = Vec::new();
    let f = IndexSet::from_indices([1, 2, 3]).expect("nonempty");
    let n = 1_000_000usize;

    let specs = [
        CovarianceSpec::diag([BigRational::one(), ratio(1, 4), ratio(4, 1)], power_tail())
            .expect("positive head"),
        CovarianceSpec::new(Head::Dense(random_pd(&mut rng, 3)), power_tail())
            .expect("positive definite head"),
    ];
    for (which, spec) in specs.iter().enumerate() {
        let draws = sample(spec, &f, n, 8000 + which as u64).expect("sampling succeeds");
        for round in 0..5 {
            let y: Vec<(VarIndex, BigRational)> = (1..=3u32)
                .map(|k| (var(k), random_rational(&mut rng, 2, 2)))
                .collect();
            let y_f: Vec<f64> = y.iter().map(|(_, q)| rational_to_f64(q)).collect();
            let phi = fourier(spec, &y);
            let values: Vec<f64> = draws
                .iter()
                .map(|x| (y_f[0] * x[0] + y_f[1] * x[1] + y_f[2] * x[2]).cos())
                .collect();
            let (mean, stderr) = mean_and_stderr(&values);
            if (phi - mean).abs() > 4.0 * stderr {
                failures.push(format!(
                    "spec {which}, round {round}: fourier {phi} vs empirical {mean} +- {stderr}"
                ));
            }
        }
        if fourier(spec, &[]) != 1.0 {
            failures.push(format!("spec {which}: fourier at the origin is not exactly 1"));
        }
        let zero: Vec<(VarIndex, BigRational)> =
            (1..=3u32).map(|k| (var(k), BigRational::zero())).collect();
        if fourier(spec, &zero) != 1.0 {
            failures.push(format!("spec {which}: fourier at explicit zero is not exactly 1"));
        }
    }
    conclude(10, "fourier transform against empirical averages", &failures);
}
