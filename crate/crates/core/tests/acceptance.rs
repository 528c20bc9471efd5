//! Acceptance suite. Prints one `PASS`/`FAIL` line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::{PI, TAU};
use std::process::Command;
use std::time::Instant;

use dbar_cone::fixtures;
use dbar_cone::measure;
use dbar_cone::quadrature::{cauchy_transform_estimate, gauss_legendre};
use dbar_cone::solver::{self, SolveResult};
use dbar_cone::variety::act;
use dbar_cone::verify::{self, HolderOptions, ScalingIntegrand};
use dbar_cone::{QuadratureParams, Result, SparsePolynomial, Variety, ZeroOneForm, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_611;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn h_linear(n: usize, k: usize) -> SparsePolynomial {
    let mut e = vec![0u32; n];
    e[k] = 1;
    SparsePolynomial::new(n, [(e, c(1.0, 0.0))]).unwrap()
}

fn random_disk_point(rng: &mut ChaCha8Rng, r_min: f64, r_max: f64) -> C64 {
    C64::from_polar(rng.random_range(r_min..r_max), rng.random_range(0.0..TAU))
}

/// Points `t·p` with `p` on the link and `t ∈ [t_min, t_max]`.
fn random_points(variety: &Variety, count: usize, t_min: f64, t_max: f64, seed: u64) -> Vec<Vec<C64>> {
    let link = measure::sample_link(variety, count, seed).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    link.points
        .into_iter()
        .map(|p| {
            let t = rng.random_range(t_min..t_max);
            act(c(t, 0.0), variety.weights(), &p)
        })
        .collect()
}

/// `−(1/π)∫ f(z + r e^{iφ}) e^{−iφ} dr dφ` on a fixed polar grid around `z`,
/// split where the rays cross the circles `|u| = radii`.
fn polar_grid_cauchy(f: &dyn Fn(C64) -> C64, z: C64, radii: &[f64], n_phi: usize, n_r: usize) -> C64 {
    let (x, w) = gauss_legendre(n_r);
    let outer = radii.iter().copied().fold(0.0, f64::max);
    let mut total = c(0.0, 0.0);
    for j in 0..n_phi {
        let phi = TAU * j as f64 / n_phi as f64;
        let e = C64::from_polar(1.0, phi);
        // |z + r e|² = ρ² ⇒ r² + 2 Re(z̄ e) r + |z|² − ρ² = 0
        let b = (z.conj() * e).re;
        let mut cuts = vec![0.0];
        for &rho in radii {
            let disc = b * b - (z.norm_sqr() - rho * rho);
            if disc >= 0.0 {
                let r = -b + disc.sqrt();
                if r > 0.0 {
                    cuts.push(r);
                }
            }
        }
        cuts.push(outer + z.norm());
        cuts.sort_by(f64::total_cmp);
        let mut ray = c(0.0, 0.0);
        for seg in cuts.windows(2) {
            let (a, bnd) = (seg[0], seg[1]);
            let half = 0.5 * (bnd - a);
            for (xi, wi) in x.iter().zip(&w) {
                let r = a + half * (xi + 1.0);
                ray += f(z + e * r) * (wi * half);
            }
        }
        total += ray * e.conj();
    }
    -total * (TAU / n_phi as f64) / PI
}

fn line_oracle() -> Outcome {
    let start = Instant::now();
    let line = fixtures::line2();
    let (r0, radius) = (0.8, 1.6);
    let form = ZeroOneForm::bump_dbar(h_linear(2, 0), r0, radius).unwrap();
    let params = QuadratureParams::default();
    let f1 = |u: C64| form.eval(&[u, c(0.0, 0.0)])[0];
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst_solver = 0.0_f64;
    let mut worst_grid_vs_exact = 0.0_f64;
    for _ in 0..20 {
        let z1 = random_disk_point(&mut rng, 0.1, 0.7);
        let grid = polar_grid_cauchy(&f1, z1, &[r0, radius], 256, 32);
        let g = solver::solve(&line, &form, &[z1, c(0.0, 0.0)], &params).unwrap().value;
        worst_solver = worst_solver.max((g - grid).norm() / grid.norm());
        worst_grid_vs_exact = worst_grid_vs_exact.max((grid - z1).norm() / z1.norm());
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst_solver <= 1e-5 && secs <= 60.0,
        format!(
            "max rel err vs polar-grid oracle {worst_solver:.2e} (tol 1e-5), grid vs closed form {worst_grid_vs_exact:.2e}, {secs:.1}s (limit 60s)"
        ),
    )
}

fn origin_and_zero_form() -> Outcome {
    let params = QuadratureParams::default();
    let mut worst_origin = 0.0_f64;
    let mut worst_zero = 0.0_f64;
    for (i, fx) in fixtures::FIXTURES.iter().enumerate() {
        let v = (fx.build)();
        let n = v.ambient_dim();
        let bump = ZeroOneForm::bump_dbar(h_linear(n, 0), 0.5, 2.0).unwrap();
        let origin = vec![c(0.0, 0.0); n];
        worst_origin = worst_origin.max(solver::solve(&v, &bump, &origin, &params).unwrap().value.norm());
        let zero = ZeroOneForm::zero(n);
        for p in random_points(&v, 10, 0.05, 1.5, SEED + i as u64) {
            worst_zero = worst_zero.max(solver::solve(&v, &zero, &p, &params).unwrap().value.norm());
        }
    }
    outcome(
        worst_origin <= 1e-14 && worst_zero <= 1e-14,
        format!("max |g(0)| {worst_origin:.2e}, max |g| for λ = 0 {worst_zero:.2e} (tol 1e-14, 4 fixtures)"),
    )
}

fn scaled_consistency() -> Outcome {
    let v = fixtures::quadric_cone();
    let form = ZeroOneForm::bump_dbar(h_linear(3, 0), 0.5, 2.0).unwrap();
    let params = QuadratureParams::default();
    let points = random_points(&v, 50, 0.1, 1.2, SEED);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0xabc);
    let mut worst = 0.0_f64;
    for z in &points {
        let s = random_disk_point(&mut rng, 0.2, 1.5);
        let scaled = solver::solve_scaled(&v, &form, z, s, &params).unwrap().value;
        let direct = solver::solve(&v, &form, &act(s, v.weights(), z), &params).unwrap().value;
        worst = worst.max((scaled - direct).norm() / (1.0 + direct.norm()));
    }
    outcome(worst <= 1e-5, format!("max |Δ|/(1+|g|) {worst:.2e} over 50 pairs (tol 1e-5)"))
}

fn residual_check(method: &str) -> (f64, f64, usize, usize) {
    let v = fixtures::quadric_cone();
    let form = ZeroOneForm::bump_dbar(h_linear(3, 0), 0.5, 2.0).unwrap();
    let params = QuadratureParams::default();
    let solve = |z: &[C64]| -> Result<SolveResult> {
        match method {
            "solve" => solver::solve(&v, &form, z, &params),
            _ => solver::solve_l2(&v, &form, z, &params),
        }
    };
    let anchors = measure::sample_link(&v, 5, SEED).unwrap();
    let mut values = Vec::new();
    let mut noisy = 0;
    for (i, a) in anchors.points.iter().enumerate() {
        let r = verify::dbar_residual(&v, &form, &solve, a, 20, 1e-4, SEED + i as u64).unwrap();
        noisy += r.noisy;
        values.extend(r.samples.iter().map(|s| s.residual));
    }
    let max = values.iter().copied().fold(0.0, f64::max);
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    let median = 0.5 * (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2]);
    (median, max, values.len(), noisy)
}

fn dbar_residual() -> Outcome {
    let (m1, x1, n1, q1) = residual_check("solve");
    let (m2, x2, n2, q2) = residual_check("solve_l2");
    let ok = m1 <= 1e-3 && x1 <= 1e-2 && m2 <= 1e-3 && x2 <= 1e-2 && n1 == 100 && n2 == 100;
    outcome(
        ok,
        format!(
            "solve median {m1:.2e} max {x1:.2e} ({q1} noisy), solve_l2 median {m2:.2e} max {x2:.2e} ({q2} noisy), {n1}+{n2} points (tol median 1e-3, max 1e-2)"
        ),
    )
}

fn theta_transfer() -> Outcome {
    let cusp = fixtures::cusp();
    let cone = cusp.theta_cone().unwrap();
    let form = ZeroOneForm::bump_dbar(h_linear(2, 0), 0.5, 2.0).unwrap();
    let params = QuadratureParams::default();
    let points = random_points(&cone, 10, 0.1, 1.1, SEED);
    let mut worst = 0.0_f64;
    for z in &points {
        let t = solver::theta_transfer_at(&cusp, &form, z, &params).unwrap();
        worst = worst.max(t.discrepancy);
    }
    outcome(worst <= 1e-5, format!("max |h(Θ(z)) − g(z)|/(1+|g|) {worst:.2e} at 10 points (tol 1e-5)"))
}

fn measure_scaling() -> Outcome {
    let radii = [0.5, 1.0, 2.0, 4.0];
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, expected) in [("line2", 4.0), ("quadric-cone", 6.0)] {
        let v = fixtures::by_name(name).unwrap();
        let r = verify::measure_scaling_check(&v, &radii, 100_000, SEED, ScalingIntegrand::Moment).unwrap();
        ok &= (r.exponent - expected).abs() <= 0.2;
        parts.push(format!("{name} {:.4} ± {:.1e} (expect {expected})", r.exponent, r.exponent_std_error));
    }
    outcome(ok, format!("{} (tol ±0.2, 1e5 samples)", parts.join(", ")))
}

fn holder_constant(v: &Variety, form: &ZeroOneForm, n_pairs: usize, scales: &[f64]) -> (f64, f64) {
    let params = QuadratureParams::default();
    let solve = |z: &[C64]| solver::solve(v, form, z, &params);
    let opts = HolderOptions {
        theta: 0.5,
        radius: 2.0,
        n_pairs,
        scales: scales.to_vec(),
        seed: SEED,
        ..HolderOptions::default()
    };
    let r = verify::holder_report(v, form, &solve, &opts).unwrap();
    (r.empirical_constant, r.normalized_constant)
}

fn spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::MIN, f64::max);
    let min = values.iter().copied().fold(f64::MAX, f64::min);
    max / min
}

fn holder_stability() -> Outcome {
    let v = fixtures::quadric_cone();
    let form = ZeroOneForm::bump_dbar(h_linear(3, 0), 0.5, 2.0).unwrap();
    let (base, _) = holder_constant(&v, &form, 30, &[1.0]);
    let (doubled, _) = holder_constant(&v, &form, 60, &[1.0]);
    let (ten, _) = holder_constant(&v, &form, 30, &[1.0, 0.1]);
    let (hundred, _) = holder_constant(&v, &form, 30, &[1.0, 0.1, 0.01]);
    let forms = [
        ZeroOneForm::bump_dbar(h_linear(3, 0), 0.5, 2.0).unwrap(),
        ZeroOneForm::bump_dbar(h_linear(3, 2), 0.8, 1.8).unwrap(),
        ZeroOneForm::bump_dbar(
            SparsePolynomial::new(3, [(vec![1, 1, 0], c(0.5, 0.5)), (vec![0, 0, 2], c(-1.0, 0.0))]).unwrap(),
            0.6,
            2.0,
        )
        .unwrap(),
    ];
    let normalized: Vec<f64> = forms.iter().map(|f| holder_constant(&v, f, 30, &[1.0]).1).collect();
    let ratios = [
        spread(&[base, doubled]),
        spread(&[base, ten]),
        spread(&[base, hundred]),
        spread(&normalized),
    ];
    outcome(
        ratios.iter().all(|r| *r < 2.0),
        format!(
            "C base {base:.3}, 2× pairs {doubled:.3}, +10× {ten:.3}, +100× {hundred:.3}; C/sup|λ| over 3 forms [{:.3}, {:.3}, {:.3}]; spreads [{:.2}, {:.2}, {:.2}, {:.2}] (tol < 2)",
            normalized[0], normalized[1], normalized[2], ratios[0], ratios[1], ratios[2], ratios[3]
        ),
    )
}

fn l2_ratio() -> Outcome {
    let v = fixtures::quadric_cone();
    let form = ZeroOneForm::bump_dbar(h_linear(3, 0), 0.5, 2.0).unwrap();
    let params = QuadratureParams::default();
    let n = 4000;
    let a = verify::l2_report(&v, &form, 2.0, n, SEED, &params).unwrap();
    let b = verify::l2_report(&v, &form, 2.0, n, SEED + 1, &params).unwrap();
    let doubled = verify::l2_report(&v, &form.scaled(c(2.0, 0.0)), 2.0, n, SEED, &params).unwrap();
    let sigma_ab = a.ratio_std_error.hypot(b.ratio_std_error);
    let sigma_ad = a.ratio_std_error.hypot(doubled.ratio_std_error);
    let finite = a.ratio.is_finite() && a.ratio > 0.0 && !a.degenerate;
    let seed_ok = (a.ratio - b.ratio).abs() <= 3.0 * sigma_ab;
    let double_ok = (a.ratio - doubled.ratio).abs() <= 3.0 * sigma_ad;
    outcome(
        finite && seed_ok && double_ok,
        format!(
            "ratio {:.4} ± {:.1e}, other seed {:.4} (|Δ| {:.1e} vs 3σ {:.1e}), 2λ {:.4} (|Δ| {:.1e} vs 3σ {:.1e})",
            a.ratio,
            a.ratio_std_error,
            b.ratio,
            (a.ratio - b.ratio).abs(),
            3.0 * sigma_ab,
            doubled.ratio,
            (a.ratio - doubled.ratio).abs(),
            3.0 * sigma_ad
        ),
    )
}

fn quadrature_oracles() -> Outcome {
    let indicator = |u: C64| if u.norm() < 1.0 { c(1.0, 0.0) } else { c(0.0, 0.0) };
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0_f64;
    let mut halving_ok = true;
    let mut worst_halving = 0.0_f64;
    for _ in 0..20 {
        let z = random_disk_point(&mut rng, 0.05, 0.95);
        let default = cauchy_transform_estimate(indicator, 1.0, z, &QuadratureParams::default()).unwrap();
        worst = worst.max((default.value() - z.conj()).norm() / z.norm());
        let eps = 1e-3;
        let wide = QuadratureParams {
            singular_exclusion: Some(eps),
            ..Default::default()
        };
        let narrow = QuadratureParams {
            singular_exclusion: Some(eps / 2.0),
            ..Default::default()
        };
        let a = cauchy_transform_estimate(indicator, 1.0, z, &wide).unwrap();
        let b = cauchy_transform_estimate(indicator, 1.0, z, &narrow).unwrap();
        let change = (a.value() - b.value()).norm();
        let budget = a.error_estimate + b.error_estimate;
        halving_ok &= change < budget;
        worst_halving = worst_halving.max(change / budget);
    }
    outcome(
        worst <= 1e-6 && halving_ok,
        format!(
            "max rel err vs z̄ {worst:.2e} (tol 1e-6); ε-halving max change/(sum of error estimates) {worst_halving:.2e} (tol < 1)"
        ),
    )
}

fn cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let configs = [
        (
            "solve",
            r#"
seed = 11
[variety]
fixture = "quadric-cone"
[form]
kind = "bump-dbar"
h = [{ exponents = [1, 0, 0], re = 1.0 }]
r0 = 0.5
radius = 2.0
[job]
kind = "solve"
points = [[[0.5, 0.0], [0.5, 0.0], [0.5, 0.0]], [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]]
"#,
        ),
        (
            "scaling",
            r#"
seed = 5
[variety]
fixture = "quadric-cone"
[job]
kind = "scaling"
radii = [0.5, 1.0, 2.0]
samples = 5000
"#,
        ),
        (
            "holder",
            r#"
seed = 9
[variety]
fixture = "quadric-cone"
[form]
kind = "bump-dbar"
h = [{ exponents = [1, 0, 0], re = 1.0 }]
r0 = 0.5
radius = 2.0
[job]
kind = "holder"
radius = 2.0
pairs = 6
scales = [1.0, 0.1]
"#,
        ),
    ];
    let exe = env!("CARGO_BIN_EXE_dbar-cone");
    let mut identical = 0;
    let mut failures = Vec::new();
    for (name, text) in configs {
        let path = dir.path().join(format!("{name}.toml"));
        std::fs::write(&path, text).unwrap();
        let mut outputs = Vec::new();
        for threads in ["1", "4", "4"] {
            let out = Command::new(exe)
                .args(["run", path.to_str().unwrap(), "--reproducible", "--threads", threads])
                .output()
                .unwrap();
            if !out.status.success() {
                failures.push(format!("{name} exited with {:?}", out.status.code()));
            }
            outputs.push(out.stdout);
        }
        if outputs.windows(2).all(|w| w[0] == w[1]) && !outputs[0].is_empty() {
            identical += 1;
        } else {
            failures.push(format!("{name} differs"));
        }
    }
    outcome(
        identical == configs.len() && failures.is_empty(),
        format!(
            "{identical}/{} jobs byte-identical over 3 runs (threads 1, 4, 4){}",
            configs.len(),
            if failures.is_empty() { String::new() } else { format!("; {}", failures.join(", ")) }
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("line-oracle", line_oracle),
        ("origin-and-zero-form", origin_and_zero_form),
        ("scaled-consistency", scaled_consistency),
        ("dbar-residual", dbar_residual),
        ("theta-transfer", theta_transfer),
        ("measure-scaling", measure_scaling),
        ("holder-stability", holder_stability),
        ("l2-ratio", l2_ratio),
        ("quadrature-oracles", quadrature_oracles),
        ("cli-determinism", cli_determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let o = check();
        let status = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!("{status} {:>2} {name}: {} [{:.1}s]", i + 1, o.detail, start.elapsed().as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criterion/criteria failed");
        std::process::exit(1);
    }
}
