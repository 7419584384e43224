//! End-to-end acceptance checks. Run with `--nocapture` to see one line per
//! criterion.

use chandet_core::channels::{cnot_matrix, depolarizing, z3_matrix};
use chandet_core::detect::{phase_gate, product_overlap, x_rotation};
use chandet_core::measure::estimate_witness;
use chandet_core::pptdetect::{noisy_transpose_superoperator, spa_noise};
use chandet_core::random::{random_channel, random_density, random_separable_state, random_sru};
use chandet_core::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn cnot() -> Channel {
    Channel::unitary(&cnot_matrix()).unwrap()
}

fn w_cnot() -> Witness {
    build_sru_witness(&cnot_matrix(), [2, 2], 0.5).unwrap()
}

fn eb_curve() -> Check {
    let w = eb_witness();
    let mut worst = 0.0f64;
    for k in 0..=10 {
        let p = k as f64 / 10.0;
        let v = e(evaluate_witness(&w, &e(depolarizing(p, &[2]))?))?;
        worst = worst.max((v - (p - 0.5)).abs());
        ensure(
            (v < 0.0) == (p < 0.5) || k == 5,
            format!("sign at p={p}: {v}"),
        )?;
    }
    ensure(worst <= 1e-9, format!("max deviation {worst:.3e}"))?;
    Ok(format!("max |Tr[W C] - (p - 1/2)| = {worst:.1e}"))
}

fn mu_c_bounds() -> Check {
    let p = 0.25;
    let w = eb_witness();
    let c = e(evaluate_witness(&w, &e(depolarizing(p, &[2]))?))?;
    let b = robustness_bounds(c, &w);
    let closed = (1.0 - 2.0 * p) / (2.0 - 2.0 * p);
    let reference = (2.0 - 4.0 * p) / (3.0 - 4.0 * p);
    ensure(
        (b.mu_c_lb - 1.0 / 3.0).abs() <= 1e-12,
        format!("mu_c lb {}", b.mu_c_lb),
    )?;
    ensure((b.mu_c_lb - closed).abs() <= 1e-12, "closed form mismatch")?;
    ensure(
        b.mu_c_lb <= reference,
        format!("lb {} above reference {reference}", b.mu_c_lb),
    )?;
    Ok(format!("mu_c lb = {:.12} <= {reference}", b.mu_c_lb))
}

fn alpha_cnot() -> Check {
    let u = cnot_matrix();
    let opt = e(alpha_sru_optimize(&u, [2, 2], 20, 0))?;
    let sigma1 = e(operator_schmidt(&u, 2, 2))?.leading();
    let target = 1.0 / 2f64.sqrt();
    ensure(
        (opt.alpha_sru - target).abs() <= 1e-6,
        format!("alpha {}", opt.alpha_sru),
    )?;
    ensure(
        (opt.alpha_sru - sigma1).abs() <= 1e-6,
        format!("sigma1 {sigma1}"),
    )?;
    let direct = product_overlap(&u, &phase_gate(), &x_rotation(std::f64::consts::FRAC_PI_4));
    ensure(
        direct >= target - 1e-10,
        format!("(S, exp(-i pi X/4)) gives {direct}"),
    )?;
    Ok(format!(
        "alpha_sru = {:.10}, sigma1 = {sigma1:.10}, maximizer = {direct:.10}",
        opt.alpha_sru
    ))
}

fn w_cnot_structure() -> Check {
    let terms = e(pauli_decompose(&w_cnot().operator))?;
    ensure(terms.len() == 16, format!("{} terms", terms.len()))?;
    let signs = [
        ("IXIX", -1.0),
        ("XXXI", -1.0),
        ("XIXX", -1.0),
        ("ZZIZ", -1.0),
        ("ZYIY", 1.0),
        ("YYXZ", 1.0),
        ("YZXY", 1.0),
        ("ZIZI", -1.0),
        ("ZXZX", -1.0),
        ("YXYI", 1.0),
        ("YIYX", 1.0),
        ("IZZZ", -1.0),
        ("IYZY", 1.0),
        ("XYYZ", 1.0),
        ("XZYY", 1.0),
    ];
    for t in &terms {
        if t.string.is_identity() {
            ensure(
                (t.coefficient - 7.0 / 16.0).abs() <= 1e-12,
                "identity coefficient",
            )?;
            continue;
        }
        let label = t.string.label();
        let sign = signs
            .iter()
            .find(|(l, _)| *l == label)
            .map(|(_, s)| *s)
            .ok_or(format!("unexpected string {label}"))?;
        ensure(
            (t.coefficient - sign / 16.0).abs() <= 1e-12,
            format!("{label}: {}", t.coefficient),
        )?;
    }
    let mut got: Vec<String> = group_settings(&terms).iter().map(|s| s.label()).collect();
    got.sort();
    let mut want = [
        "XXXX", "ZZZZ", "ZYZY", "YXYX", "YYXZ", "YZXY", "ZXZX", "XYYZ", "XZYY",
    ];
    want.sort();
    ensure(got == want, format!("settings {got:?}"))?;
    let v = e(evaluate_witness(&w_cnot(), &cnot()))?;
    ensure((v + 0.5).abs() <= 1e-10, format!("Tr[W C] = {v}"))?;
    Ok(format!("16 strings, 9 settings, Tr[W C] = {v:.12}"))
}

fn stabilizer() -> Check {
    let gens: Vec<PauliString> = ["XXXI", "IXIX", "ZIZI", "ZZIZ"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    let w = e(stabilizer_witness(&gens))?;
    let v = e(evaluate_witness(&w, &cnot()))?;
    ensure((v + 1.0).abs() <= 1e-10, format!("Tr = {v}"))?;
    let mut got: Vec<String> = group_settings(&e(pauli_decompose(&w.operator))?)
        .iter()
        .map(|s| s.label())
        .collect();
    got.sort();
    ensure(got == ["XXXX", "ZZZZ"], format!("settings {got:?}"))?;
    Ok(format!("Tr = {v:.12}, settings {got:?}"))
}

fn z3_analysis() -> Check {
    let u = z3_matrix();
    let s = e(operator_schmidt(&u, 3, 3))?;
    let r17 = 17f64.sqrt();
    let s1 = ((9.0 + r17) / 2.0).sqrt() / 3.0;
    let s2 = ((9.0 - r17) / 2.0).sqrt() / 3.0;
    ensure(s.rank == 2, format!("rank {}", s.rank))?;
    ensure(
        (s.sigmas[0] - s1).abs() <= 1e-9 && (s.sigmas[1] - s2).abs() <= 1e-9,
        format!("{:?}", s.sigmas),
    )?;
    let total: f64 = s.sigmas.iter().map(|x| x * x).sum();
    ensure(
        (total - 1.0).abs() <= 1e-10,
        format!("sum sigma^2 = {total}"),
    )?;
    let opt = e(alpha_sru_optimize(&u, [3, 3], 50, 0))?;
    ensure(
        (opt.alpha_sru - 0.786).abs() <= 0.01,
        format!("alpha_sru {}", opt.alpha_sru),
    )?;
    let a2 = opt.alpha_sru.powi(2);
    let w = e(build_sru_witness(&u, [3, 3], a2))?;
    let v = e(evaluate_witness(&w, &Channel::unitary(&u).unwrap()))?;
    let verdict = e(classify_violation(v, &w))?;
    ensure((v - (a2 - 1.0)).abs() <= 1e-10, format!("value {v}"))?;
    ensure(
        verdict == Verdict::NotSeparable,
        format!("verdict {}", verdict.as_str()),
    )?;
    Ok(format!(
        "sigma = ({:.9}, {:.9}), alpha_sru = {:.6}, value = {v:.6} < {:.6}",
        s.sigmas[0],
        s.sigmas[1],
        opt.alpha_sru,
        a2 - s1 * s1
    ))
}

fn npt_cnot() -> Check {
    let r = e(detect_npt(&cnot()))?;
    ensure(
        (r.lambda_minus + 0.5).abs() <= 1e-9,
        format!("lambda {}", r.lambda_minus),
    )?;
    ensure(r.noise_p == 8.0 / 9.0, format!("p {}", r.noise_p))?;
    ensure(
        r.expectation.abs() <= 1e-10,
        format!("expectation {}", r.expectation),
    )?;
    ensure(
        (r.threshold - 1.0 / 18.0).abs() <= 1e-15,
        format!("threshold {}", r.threshold),
    )?;
    ensure(r.verdict == NptVerdict::NptDetected, "not detected")?;
    let closed = (1.0 - r.noise_p) * r.lambda_minus + r.noise_p / 16.0;
    ensure(
        (closed - r.expectation).abs() <= 1e-10,
        format!("unital form {closed}"),
    )?;
    Ok(format!(
        "lambda = {:.12}, expectation = {:.1e}, threshold = {:.6}",
        r.lambda_minus, r.expectation, r.threshold
    ))
}

fn spa_minimality() -> Check {
    let at = e(hermitian_eig(
        spa_transpose(2).map_err(|e| e.to_string())?.choi().matrix(),
    ))?
    .min();
    ensure(at >= -1e-10, format!("min eig at threshold {at}"))?;
    let below = e(noisy_transpose_superoperator(2, spa_noise(2) - 0.01))?;
    let min = e(hermitian_eig(below.choi().matrix()))?.min();
    ensure(min < -1e-4, format!("min eig below threshold {min}"))?;
    Ok(format!("min eig {at:.1e} at p, {min:.6} at p - 0.01"))
}

fn soundness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let w = w_cnot();
    let mut worst_sru = f64::INFINITY;
    for _ in 0..200 {
        let sru = random_sru(2, 4, &mut rng);
        worst_sru = worst_sru.min(e(evaluate_witness(&w, &sru.channel))?);
    }
    ensure(worst_sru >= -1e-9, format!("SRU min {worst_sru}"))?;

    let eb = eb_witness();
    let mut worst_sep = f64::INFINITY;
    for _ in 0..500 {
        let rho = random_separable_state(2, 2, 4, &mut rng);
        worst_sep = worst_sep.min(e(eb.expectation(&rho))?);
    }
    ensure(worst_sep >= -1e-9, format!("separable min {worst_sep}"))?;

    let wp = e(ppt_witness(&cnot()))?.witness;
    let full = e(depolarizing(1.0, &[2, 2]))?;
    let mut worst_ppt = f64::INFINITY;
    let mut found = 0;
    for attempt in 0.. {
        if found == 20 {
            break;
        }
        let candidate = if attempt % 2 == 0 {
            random_sru(2, 4, &mut rng).channel
        } else {
            let m = random_channel(&[2, 2], 2, &mut rng);
            let mix = e(Superoperator::linear_combination(&[
                (0.1, m.superoperator()),
                (0.9, full.superoperator()),
            ]))?;
            e(kraus_from_choi(&mix.choi()))?
        };
        if e(hermitian_eig(e(ppt_conjugate(&candidate))?.choi.matrix()))?.min() < -1e-12 {
            continue;
        }
        found += 1;
        worst_ppt = worst_ppt.min(e(evaluate_ppt_witness(&wp, &candidate))?);
    }
    ensure(worst_ppt >= -1e-10, format!("PPT min {worst_ppt}"))?;
    Ok(format!(
        "min SRU {worst_sru:.3e}, separable {worst_sep:.3e}, PPT {worst_ppt:.3e}"
    ))
}

fn round_trips() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let shapes: [&[usize]; 5] = [&[2], &[3], &[2, 2], &[2, 3], &[3, 3]];
    let mut worst = 0.0f64;
    for k in 0..50 {
        let dims = shapes[k % shapes.len()];
        let ch = random_channel(dims, 1 + k % 4, &mut rng);
        let via_choi = e(kraus_from_choi(ch.choi()))?;
        let via_super = e(kraus_from_choi(&ch.superoperator().choi()))?;
        let rho = random_density(dims, &mut rng);
        let out = e(ch.apply(&rho))?;
        for other in [&via_choi, &via_super] {
            worst = worst.max(e(other.apply(&rho))?.max_abs_diff(&out));
            worst = worst.max(
                other
                    .superoperator()
                    .matrix()
                    .max_abs_diff(ch.superoperator().matrix()),
            );
        }
    }
    ensure(worst <= 1e-10, format!("max deviation {worst:.3e}"))?;
    Ok(format!("max deviation {worst:.1e} over 50 channels"))
}

fn shot_statistics() -> Check {
    let w = w_cnot();
    let ch = cnot();
    let mut worst = 0.0f64;
    for seed in 0..20 {
        let est = e(estimate_witness(&ch, &w, 100_000, seed))?;
        // The CNOT Choi state is a stabilizer state: every term is
        // deterministic and std_error is exactly zero.
        let dev = (est.value + 0.5).abs();
        ensure(
            dev <= 5.0 * est.std_error + 1e-12,
            format!("seed {seed}: {est:?}"),
        )?;
        worst = worst.max(dev);
    }

    let noisy = e(ch.then(&e(depolarizing(0.3, &[2, 2]))?))?;
    let n = 10_000;
    let mut ratio = 0.0;
    for seed in 0..20 {
        let small = e(estimate_witness(&noisy, &w, n, seed))?;
        let large = e(estimate_witness(&noisy, &w, 4 * n, seed))?;
        ratio += large.std_error / small.std_error / 20.0;
    }
    ensure((0.4..=0.6).contains(&ratio), format!("ratio {ratio}"))?;
    Ok(format!(
        "max |est + 1/2| = {worst:.1e}; std_error ratio N:4N = {ratio:.4}"
    ))
}

fn cartan() -> Check {
    let mut worst = 0.0f64;
    for seed in 0..50 {
        let u = haar_unitary(4, 1000 + seed).with_dims(vec![2, 2]).unwrap();
        let opt = e(alpha_sru_optimize(&u, [2, 2], 20, seed))?;
        let sigma1 = e(operator_schmidt(&u, 2, 2))?.leading();
        worst = worst.max((opt.alpha_sru - sigma1).abs());
    }
    ensure(worst <= 1e-6, format!("max |alpha - sigma1| = {worst:.3e}"))?;
    Ok(format!(
        "max |alpha_sru - sigma1| = {worst:.1e} over 50 unitaries"
    ))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 12] = [
        ("EB detection curve", eb_curve),
        ("mu_c bounds", mu_c_bounds),
        ("alpha_SRU(CNOT)", alpha_cnot),
        ("W_CNOT structure", w_cnot_structure),
        ("stabilizer witness", stabilizer),
        ("Z3 analysis", z3_analysis),
        ("NPT pipeline on CNOT", npt_cnot),
        ("SPA minimality", spa_minimality),
        ("witness soundness", soundness),
        ("conversion round trips", round_trips),
        ("shot statistics", shot_statistics),
        ("two-qubit Cartan property", cartan),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("[PASS] {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                println!("[FAIL] {:>2} {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
