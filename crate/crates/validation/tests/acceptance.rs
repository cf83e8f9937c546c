//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! with status 1 if any of them fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nonlocal_cli::{cauchy_steps, plateau_field, run, Command, Format, RunConfig};
use nonlocal_core::counterexample::{
    ladder, phi_profile, run_report, tabulate_u_n, u_n_knots, CounterexampleParams,
};
use nonlocal_core::fields::{inf_convolution, semiconcavity_check, Bump, FnField, InfConvParams, RadialField};
use nonlocal_core::fields::{c1_continuity_defect, RadialProfile, ScalarField};
use nonlocal_core::matrixcore::{pucci_extremal_trace, pucci_oracle_sample, random_orthogonal, Sign, SymMatrix};
use nonlocal_core::nonlocal::{
    hessian_auto, hessian_consistency, riesz_inf_ratio, tabulate_riesz_radial, InfSampling, PotentialHessian,
};
use nonlocal_core::quad::fractional_laplacian_dual;
use nonlocal_core::special::{compute_m0, m0_expression, Constants};
use nonlocal_core::{KernelParams64, QuadratureSpec64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }

    fn error(e: impl std::fmt::Display) -> Self {
        Outcome { pass: false, detail: format!("error: {e}") }
    }
}

type Check = fn() -> Outcome;

const SIGMA_GRID: [f64; 19] = [
    0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9,
];

fn kernel(n: usize, sigma: f64) -> KernelParams64 {
    KernelParams64::new(n, sigma, 1.0, 4.0).expect("valid kernel")
}

fn spec() -> QuadratureSpec64 {
    QuadratureSpec64::default()
}

fn c1_constant_identity() -> Outcome {
    const TOL: f64 = 1e-12;
    let mut worst = 0.0f64;
    for n in 2..=5 {
        for sigma in SIGMA_GRID {
            match Constants::<f64>::new(n, sigma) {
                Ok(c) => worst = worst.max(c.identity_defect(n, sigma)),
                Err(e) => return Outcome::error(e),
            }
        }
    }
    Outcome::new(worst <= TOL, format!("max relative defect {worst:.2e} (tol {TOL:.0e}) on n=2..5 x sigma=0.1..1.9"))
}

fn c2_m0() -> Outcome {
    const TOL: f64 = 1e-12;
    const CEILING: f64 = 4.75;
    let mut worst = 0.0f64;
    for n in 2..=5 {
        for sigma in SIGMA_GRID {
            let m0 = match compute_m0(n, sigma) {
                Ok(m) => m,
                Err(e) => return Outcome::error(e),
            };
            worst = worst.max((m0_expression(n, sigma, m0) - 0.5).abs());
        }
    }
    let (mut top, mut at) = (0.0f64, 0.0);
    for sigma in SIGMA_GRID {
        let m0 = compute_m0(3, sigma).unwrap();
        if m0 > top {
            top = m0;
            at = sigma;
        }
    }
    Outcome::new(
        worst <= TOL && top < CEILING,
        format!(
            "|expression - 1/2| max {worst:.2e} (tol {TOL:.0e}); n=3 max M0 = {top:.6} at sigma = {at} (ceiling {CEILING})"
        ),
    )
}

fn c3_phi_regularity() -> Outcome {
    const TOL: f64 = 1e-10;
    let mut jump = 0.0f64;
    let mut slope = 0.0f64;
    let mut branch = 0.0f64;
    let mut cases = 0;
    for n in [2usize, 3] {
        for sigma in [1.5, 1.6, 1.8] {
            if sigma * sigma <= n as f64 {
                continue;
            }
            for big_n in [16u64, 1024] {
                let p = match CounterexampleParams::new(n, sigma, 1.0, 4.0, big_n) {
                    Ok(p) => p,
                    Err(e) => return Outcome::error(e),
                };
                let phi = phi_profile(&p).unwrap();
                let (j, s) = c1_continuity_defect(&phi);
                jump = jump.max(j);
                slope = slope.max(s);
                let tau = p.tau();
                let (lo, hi) = ((1.0 / big_n as f64).ln(), (1.0 - tau).ln());
                for k in 0..1000 {
                    let r = (lo + (k as f64 + 0.5) / 1000.0 * (hi - lo)).exp();
                    let lhs = tau * phi.ddphi(r) + (1.0 - tau) * phi.dphi(r) / r;
                    let rhs = r.powf(-1.0 / tau);
                    branch = branch.max(((lhs - rhs) / rhs).abs());
                }
                cases += 1;
            }
        }
    }
    Outcome::new(
        jump <= TOL && slope <= TOL && branch <= TOL,
        format!(
            "{cases} cases: value jump {jump:.1e}, slope jump {slope:.1e}, branch identity relative {branch:.1e} at 1000 radii (tol {TOL:.0e})"
        ),
    )
}

fn random_sym(n: usize, rng: &mut ChaCha8Rng) -> SymMatrix<f64> {
    let mut d = SymMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            d.set(i, j, rng.random_range(-1.0..1.0));
        }
    }
    d
}

fn c4_pucci_lp() -> Outcome {
    const CASES: usize = 200;
    const TRIALS: usize = 100_000;
    const GAP: f64 = 0.05;
    const ROT_TOL: f64 = 1e-10;
    const ROUNDOFF: f64 = 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut below = true;
    let mut gap = 0.0f64;
    let mut rot = 0.0f64;
    let mut dual_exact = true;
    for k in 0..CASES {
        let n = 2 + k % 2;
        let sigma = rng.random_range(0.2..1.9);
        let p = kernel(n, sigma);
        let d = random_sym(n, &mut rng);
        let lp = match pucci_extremal_trace(&d, &p, Sign::Minus) {
            Ok(e) => e.value,
            Err(e) => return Outcome::error(e),
        };
        let oracle = pucci_oracle_sample(&d, &p, Sign::Minus, TRIALS, k as u64);
        below &= lp <= oracle + ROUNDOFF * lp.abs().max(1.0);
        gap = gap.max((oracle - lp) / lp.abs().max(1e-12 * d.frobenius()));

        let q: Vec<f64> = random_orthogonal(n, &mut rng);
        let rotated = d.conjugate(&q);
        for sign in [Sign::Minus, Sign::Plus] {
            let a = pucci_extremal_trace(&d, &p, sign).unwrap().value;
            let b = pucci_extremal_trace(&rotated, &p, sign).unwrap().value;
            rot = rot.max((a - b).abs());
        }
        let minus_neg = pucci_extremal_trace(&d.scale(-1.0), &p, Sign::Minus).unwrap().value;
        let plus = pucci_extremal_trace(&d, &p, Sign::Plus).unwrap().value;
        dual_exact &= minus_neg == -plus;
    }
    Outcome::new(
        below && gap <= GAP && rot <= ROT_TOL && dual_exact,
        format!(
            "{CASES} matrices: LP <= oracle (+{ROUNDOFF:.0e} relative roundoff) {below}, max gap {gap:.2e} of |LP| at {TRIALS} trials (tol {GAP}); rotation {rot:.1e} (tol {ROT_TOL:.0e}); duality exact {dual_exact}"
        ),
    )
}

fn c5_riesz_inversion() -> Outcome {
    const REL: f64 = 1e-2;
    let p = kernel(2, 1.5);
    let v = RadialField::new(2, Bump::new(1.0, 1.0));
    let mut knots: Vec<f64> = (0..=2000).map(|i| 20.0 * (i as f64 / 2000.0).powi(2)).collect();
    for k in 1..40 {
        let d = 1e-6 * 1.4f64.powi(k);
        knots.extend([1.0 - d, 1.0 + d]);
    }
    knots.sort_by(|a, b| a.total_cmp(b));
    knots.dedup();
    let (pot, _) = match tabulate_riesz_radial(&v, knots, &p, &spec().with_tol(1e-9)) {
        Ok(t) => t,
        Err(e) => return Outcome::error(e),
    };
    let mut worst = 0.0f64;
    for i in 0..10 {
        let r = 0.05 + 0.09 * i as f64;
        let x = [0.6 * r, 0.8 * r];
        let exact = v.eval(&x);
        match fractional_laplacian_dual(&pot, &x, &p, &spec()) {
            Ok(e) => worst = worst.max((e.value - exact).abs() / exact.abs()),
            Err(e) => return Outcome::error(e),
        }
    }
    Outcome::new(worst <= REL, format!("10 points, max relative error {worst:.2e} (tol {REL:.0e})"))
}

fn c6_hessian_consistency() -> Outcome {
    const REL: f64 = 5e-3;
    let p = kernel(2, 1.5);
    let v = RadialField::new(2, Bump::new(1.0, 1.0));
    let fd = PotentialHessian::FiniteDifference { step: 0.05, potential_tol: 1e-10 };
    let (mut bump_ok, mut bump_rel) = (true, 0.0f64);
    for i in 0..10 {
        let r = 0.05 + 0.09 * i as f64;
        let x = [0.6 * r, -0.8 * r];
        match hessian_consistency(&v, &x, &p, &spec(), fd) {
            Ok(c) => {
                bump_ok &= c.within_bounds() && c.relative <= REL;
                bump_rel = bump_rel.max(c.relative);
            }
            Err(e) => return Outcome::error(e),
        }
    }

    let ce = CounterexampleParams::new(2, 1.6, 1.0, 4.0, 16).unwrap();
    let phi = phi_profile(&ce).unwrap();
    let tab_spec = spec().with_tol(1e-8);
    let fine = tabulate_u_n(&ce, u_n_knots(&phi, 6.0, 1200, 1e-7, 1.15), &tab_spec);
    let coarse = tabulate_u_n(&ce, u_n_knots(&phi, 6.0, 600, 1e-7, 1.15), &tab_spec);
    let ((fine, _), (coarse, _)) = match (fine, coarse) {
        (Ok(f), Ok(c)) => (f, c),
        (Err(e), _) | (_, Err(e)) => return Outcome::error(e),
    };
    let k = ce.kernel();
    let (mut u_ok, mut u_rel) = (true, 0.0f64);
    for r in [0.08, 0.15, 0.22, 0.33, 0.42, 0.51, 0.60, 0.69, 0.78, 0.87] {
        let x = [0.6 * r, 0.8 * r];
        let c = match hessian_consistency(&fine, &x, &k, &spec(), PotentialHessian::Radial(&phi)) {
            Ok(c) => c,
            Err(e) => return Outcome::error(e),
        };
        let tab_err = match hessian_auto(&coarse, &x, &k, &spec()) {
            Ok(h) => (&c.rhs - &h.value).max_abs(),
            Err(e) => return Outcome::error(e),
        };
        u_ok &= c.relative <= REL && c.discrepancy <= c.rhs_bound + tab_err;
        u_rel = u_rel.max(c.relative);
    }
    Outcome::new(
        bump_ok && u_ok,
        format!(
            "bump: 10 points within certified bounds {bump_ok}, max relative {bump_rel:.1e}; u_N (N=16): 10 radii within bounds {u_ok}, max relative {u_rel:.1e} (tol {REL:.0e})"
        ),
    )
}

fn c7_inf_relation() -> Outcome {
    let p = kernel(3, 1.0);
    let bump = RadialField::new(3, Bump::new(-1.0, 1.0));
    let plateau = plateau_field(3);
    let fields: [(&str, &dyn ScalarField<f64>); 2] = [("-bump", &bump), ("-plateau", &plateau)];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, f) in fields {
        match riesz_inf_ratio(f, 1.0, &p, &spec().with_tol(1e-3), &InfSampling::default()) {
            Ok(r) => {
                ok &= r.holds;
                parts.push(format!("{name}: {:.4e} <= {:.4e} + {:.1e}", r.lhs, r.rhs, r.slack));
            }
            Err(e) => return Outcome::error(e),
        }
    }
    Outcome::new(ok, parts.join("; "))
}

fn c8_inf_convolution() -> Outcome {
    let n = 2;
    let p = kernel(n, 1.5);
    let h = 0.05;
    let step = 0.01;
    let cone = FnField::new(n, 1.0, |x: &[f64]| -(1.0 - x.iter().map(|v| v * v).sum::<f64>().sqrt()).max(0.0))
        .with_support(1.0);
    let ic = InfConvParams { h, epsilon: 0.05, search_radius: 0.5, grid_step: step, refine_levels: 3 };
    let uh = match inf_convolution(cone.clone(), ic) {
        Ok(u) => u,
        Err(e) => return Outcome::error(e),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let pts: Vec<Vec<f64>> = (0..400).map(|_| vec![rng.random_range(-1.4..1.4), rng.random_range(-1.4..1.4)]).collect();
    let vals = uh.eval_many(&pts);
    let above = pts.iter().zip(&vals).map(|(x, v)| v - cone.eval(x)).fold(f64::NEG_INFINITY, f64::max);
    let mut disp = 0.0f64;
    for x in pts.iter().take(100) {
        match uh.argmin(x) {
            Ok((_, y)) => disp = disp.max(x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum()),
            Err(e) => return Outcome::error(e),
        }
    }
    let disp_bound = 4.0 * h * cone.sup_bound() + ic.displacement_slack(cone.sup_bound());
    let semi = semiconcavity_check(&uh, h, 10_000, 11, 1.5, 2.0 * step * step / h);
    let steps = match cauchy_steps(&uh, h, &p, &spec()) {
        Ok(s) => s,
        Err(e) => return Outcome::error(e),
    };
    let cauchy = steps.iter().all(|&(_, d1, d2)| d2 < d1);
    let worst_ratio = steps.iter().map(|&(_, d1, d2)| d1 / d2).fold(f64::INFINITY, f64::min);
    Outcome::new(
        above <= 0.0 && disp <= disp_bound && semi.violations == 0 && cauchy,
        format!(
            "max(u_h - u) = {above:.1e}; max |x - y*|^2 = {disp:.2e} (bound {disp_bound:.2e}); semiconcavity {} violations in {} samples (tol {:.0e}); Cauchy-decreasing at 5 points {cauchy}, smallest step ratio {worst_ratio:.2}",
            semi.violations, semi.samples, semi.tol
        ),
    )
}

const FIT_TOL: f64 = 0.15;

fn ce_report() -> Result<nonlocal_core::counterexample::CeReport, String> {
    let l = ladder(2, 1.6, 1.0, 4.0, &[16, 64, 256, 1024]).map_err(|e| e.to_string())?;
    run_report(&l, &spec()).map_err(|e| e.to_string())
}

fn c9_abp_failure() -> Outcome {
    let r = match ce_report() {
        Ok(r) => r,
        Err(e) => return Outcome::error(e),
    };
    let cs: Vec<String> = r.rows.iter().map(|row| format!("{:.4}", row.c)).collect();
    let fit_ok = (r.c_exponent - r.c_exponent_target).abs() <= FIT_TOL;
    Outcome::new(
        r.c_increasing() && r.lower_bound_holds() && r.upper_bound_holds() && !r.flagged() && fit_ok,
        format!(
            "C = [{}] increasing {}; -u_N(0) >= c log(N/4) {}; norm bound {}; C exponent {:.3} vs 1 - 1/p0 = {:.3} (tol {FIT_TOL})",
            cs.join(", "),
            r.c_increasing(),
            r.lower_bound_holds(),
            r.upper_bound_holds(),
            r.c_exponent,
            r.c_exponent_target
        ),
    )
}

fn c10_sobolev_failure() -> Outcome {
    let r = match ce_report() {
        Ok(r) => r,
        Err(e) => return Outcome::error(e),
    };
    let fs: Vec<String> = r.rows.iter().map(|row| format!("{:.4}", row.f)).collect();
    let fit_ok = (r.f_exponent - r.f_exponent_target).abs() <= FIT_TOL;
    Outcome::new(
        r.f_increasing() && !r.flagged() && fit_ok,
        format!(
            "F = [{}] increasing {}; F exponent {:.3} vs 1/p0 = {:.3} (tol {FIT_TOL})",
            fs.join(", "),
            r.f_increasing(),
            r.f_exponent,
            r.f_exponent_target
        ),
    )
}

fn c11_determinism() -> Outcome {
    let dir = match tempfile::tempdir() {
        Ok(d) => d,
        Err(e) => return Outcome::error(e),
    };
    let mut runs: Vec<(Command, Format)> = Command::ALL.iter().map(|&c| (c, Format::Csv)).collect();
    runs.push((Command::Counterexample, Format::Json));
    let mut same = Vec::new();
    for (cmd, format) in runs {
        let path = dir.path().join(format!("{}.{format:?}", cmd.name()));
        let cfg = RunConfig { command: cmd, format, seed: 5, output_path: Some(path.clone()), ..RunConfig::default() };
        let mut bytes = Vec::new();
        for _ in 0..2 {
            if let Err(e) = run(&cfg) {
                return Outcome::error(e);
            }
            bytes.push(std::fs::read(&path).unwrap_or_default());
        }
        if bytes[0].is_empty() || bytes[0] != bytes[1] {
            return Outcome::new(false, format!("{} ({format:?}) differs between runs", cmd.name()));
        }
        same.push(format!("{} {format:?}", cmd.name()));
    }
    Outcome::new(true, format!("byte-identical reports: {}", same.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, Check); 11] = [
        ("constant identity", Duration::from_secs(1), c1_constant_identity),
        ("M0 check", Duration::from_secs(1), c2_m0),
        ("phi_N regularity", Duration::from_secs(5), c3_phi_regularity),
        ("Pucci LP exactness", Duration::from_secs(60), c4_pucci_lp),
        ("Riesz inversion", Duration::from_secs(300), c5_riesz_inversion),
        ("Hessian formula consistency", Duration::from_secs(600), c6_hessian_consistency),
        ("Riesz infimum relation", Duration::from_secs(300), c7_inf_relation),
        ("inf-convolution suite", Duration::from_secs(300), c8_inf_convolution),
        ("ABP failure reproduction", Duration::from_secs(1800), c9_abp_failure),
        ("W^{sigma,p0} failure reproduction", Duration::from_secs(1800), c10_sobolev_failure),
        ("determinism", Duration::from_secs(600), c11_determinism),
    ];
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let out = check();
        let elapsed = start.elapsed();
        let pass = out.pass && elapsed <= budget;
        if !pass {
            failed += 1;
        }
        println!(
            "{} {:>2} {name}: {} [{:.2} s, budget {} s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            out.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} of 11 criteria passed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
