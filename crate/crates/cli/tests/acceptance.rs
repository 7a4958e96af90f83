//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use qfock_cli::commands::{verify, VerifyArgs};
use qfock_core::combinatorics::{constants, fuss_catalan, DEFAULT_SERIES_TOL};
use qfock_core::fockspace::{q_norm, FockVector, NormOptions, QContext};
use qfock_core::inequalities::{haagerup_ladder, keylem_check, tail_degree_cut, ultracontractivity_experiment};
use qfock_core::moments::{circular_moment, moment_vs_trace, StarWord};
use qfock_core::qcircular::{evaluate_expr, HoloPolynomial};

struct Line {
    pass: bool,
    detail: String,
}

fn line(pass: bool, detail: impl Into<String>) -> Line {
    Line { pass, detail: detail.into() }
}

/// `[n]_q!` as an explicit double product.
fn factorial_oracle(n: usize, q: f64) -> f64 {
    (1..=n).map(|j| (0..j).map(|i| q.powi(i as i32)).sum::<f64>()).product()
}

fn binom_u128(n: u128, k: u128) -> u128 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn identity_suite() -> Line {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    let mut runs = 0;
    for &q in &[-0.7, -0.3, 0.0, 0.3, 0.7] {
        for d in 1..=2 {
            let args = VerifyArgs { q, d, max_n: 4, trunc: 8, tol: 1e-10, seed: 0 };
            match verify(&args) {
                Ok(out) => {
                    let col = out.table.column("residual").unwrap();
                    let name = out.table.column("identity").unwrap();
                    for row in &out.table.rows {
                        if let qfock_cli::Cell::Num(r) = row[col] {
                            worst = worst.max(r);
                            if !(r < 1e-10) {
                                failures.push(format!("{:?} q={q} d={d}", row[name]));
                            }
                        }
                    }
                    runs += 1;
                }
                Err(e) => failures.push(format!("q={q} d={d}: {e}")),
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = failures.is_empty() && secs < 120.0;
    line(pass, format!("{runs} suites, max residual {worst:.2e}, {secs:.1} s (limit 120 s){}", fmt_fail(&failures)))
}

fn fmt_fail(f: &[String]) -> String {
    if f.is_empty() { String::new() } else { format!("; failing: {}", f.join(", ")) }
}

fn paper_moments() -> Line {
    let mut worst: f64 = 0.0;
    for &q in &[-0.5, 0.0, 0.5] {
        let ctx = QContext::new(q, 2, 4).unwrap();
        for (word, expected) in [("1* 2* 1 2", q), ("1* 1* 1 1", 1.0 + q)] {
            let c = moment_vs_trace(&ctx, &StarWord::parse(word).unwrap()).unwrap();
            worst = worst.max((c.combinatorial - expected).abs()).max((c.trace - expected).abs()).max(c.delta.abs());
        }
    }
    line(worst < 1e-10, format!("max deviation from q and 1+q over both engines {worst:.2e} (tol 1e-10)"))
}

fn all_star_words(len: usize) -> Vec<StarWord> {
    (0..4usize.pow(len as u32))
        .map(|mut code| {
            let letters = (0..len)
                .map(|_| {
                    let c = code % 4;
                    code /= 4;
                    (c / 2 + 1, c % 2 == 1)
                })
                .collect();
            StarWord::new(letters).unwrap()
        })
        .collect()
}

fn moment_oracle() -> Line {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for &q in &[-0.5, 0.0, 0.5] {
        let ctx = QContext::new(q, 2, 3).unwrap();
        for len in 1..=6 {
            for sw in all_star_words(len) {
                worst = worst.max(moment_vs_trace(&ctx, &sw).unwrap().delta.abs());
                count += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    line(
        worst < 1e-10 && secs < 60.0,
        format!("{count} star-words (d=2, length <= 6, q in {{-0.5, 0, 0.5}}), max |delta| {worst:.2e}, {secs:.1} s"),
    )
}

fn fuss_catalan_check() -> Line {
    let mut bad = Vec::new();
    let mut values = Vec::new();
    for m in 1..=3u128 {
        for n in 1..=3u128 {
            let expected = binom_u128(m * (n + 1), m - 1) / m;
            let got = circular_moment(0.0, &StarWord::pattern(m as usize, n as usize));
            values.push(format!("{got}"));
            if got != expected as f64 || fuss_catalan(m as u64, n as u64).unwrap() != expected {
                bad.push(format!("m={m} n={n}: {got} vs {expected}"));
            }
        }
    }
    line(bad.is_empty(), format!("exact values [{}]{}", values.join(", "), fmt_fail(&bad)))
}

fn l2_norms() -> Line {
    let mut worst: f64 = 0.0;
    for &q in &[-0.5, 0.5] {
        let ctx = QContext::new(q, 1, 8).unwrap();
        for n in 0..=8 {
            let v = evaluate_expr(&HoloPolynomial::power(1, n)).apply_vector(q, ctx.trunc(), &FockVector::vacuum());
            worst = worst.max((q_norm(q, &v).powi(2) - factorial_oracle(n, q)).abs());
        }
    }
    line(worst < 1e-10, format!("max |‖cⁿΩ‖² - [n]_q!| = {worst:.2e} for n <= 8 (tol 1e-10)"))
}

fn haagerup_sandwich() -> Line {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut spreads = Vec::new();
    let opts = NormOptions::default();
    for &q in &[-0.6, -0.3, 0.0, 0.3, 0.6] {
        let k = constants(q, DEFAULT_SERIES_TOL).unwrap();
        let mut scaled = Vec::new();
        for n in 1..=8usize {
            let r = haagerup_ladder(q, 1, &HoloPolynomial::power(1, n), &[n + 4, n + 6, n + 8], &opts).unwrap();
            let ratio = r.observed("ratio").unwrap();
            let root = ((n + 1) as f64).sqrt();
            if ratio < root / k.b_q - 1e-3 || ratio > k.a_prime * root {
                bad.push(format!("q={q} n={n} ratio={ratio:.6}"));
            }
            if n >= 4 {
                scaled.push(ratio / root);
            }
        }
        let (lo, hi) = scaled.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
        let spread = hi / lo - 1.0;
        if spread >= 0.5 {
            bad.push(format!("q={q}: ratio/√(n+1) spread {:.0}% over n=4..8", 100.0 * spread));
        }
        spreads.push(format!("{q}:{:.0}%", 100.0 * spread));
    }
    let secs = start.elapsed().as_secs_f64();
    line(
        bad.is_empty() && secs < 600.0,
        format!("ratio/√(n+1) spread over n=4..8 [{}], {secs:.1} s{}", spreads.join(" "), fmt_fail(&bad)),
    )
}

fn constants_check() -> Line {
    let c = constants(0.0, DEFAULT_SERIES_TOL).unwrap();
    let a = (2.0 + 15f64.sqrt()).sqrt();
    let mut bad = Vec::new();
    for (name, got, want) in [("C", c.c_q, 1.0), ("b", c.b_q, 1.0), ("D1", c.d1, 0.0), ("D2", c.d2, 1.0), ("A", c.a_haagerup, a)] {
        if (got - want).abs() >= 1e-10 {
            bad.push(format!("{name}={got}"));
        }
    }
    let grid: Vec<_> = (0..=9).map(|i| constants(i as f64 / 10.0, DEFAULT_SERIES_TOL).unwrap()).collect();
    for w in grid.windows(2) {
        let (x, y) = (&w[0], &w[1]);
        let fields = [(x.c_q, y.c_q), (x.b_q, y.b_q), (x.d1, y.d1), (x.d2, y.d2), (x.a_haagerup, y.a_haagerup), (x.a_prime, y.a_prime)];
        if fields.iter().any(|(a, b)| b < a) {
            bad.push(format!("not monotone between |q|={} and {}", x.q, y.q));
        }
    }
    for i in 1..=9 {
        let (p, m) = (constants(i as f64 / 10.0, DEFAULT_SERIES_TOL).unwrap(), constants(-(i as f64) / 10.0, DEFAULT_SERIES_TOL).unwrap());
        if p.c_q != m.c_q || p.b_q != m.b_q || p.a_haagerup != m.a_haagerup {
            bad.push(format!("q=±{} differ", i as f64 / 10.0));
        }
    }
    line(bad.is_empty(), format!("A(0) = {:.12}, A(0.9) = {:.6}{}", c.a_haagerup, grid[9].a_haagerup, fmt_fail(&bad)))
}

fn keylem_scan() -> Line {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut maxima = Vec::new();
    for &q in &[-0.5, 0.5] {
        let a = constants(q, DEFAULT_SERIES_TOL).unwrap().a_haagerup;
        for n in 1..=5 {
            let ctx = QContext::new(q, 2, n + 2).unwrap().with_headroom(2);
            let mut mx: f64 = 0.0;
            for seed in 0..20 {
                let r = keylem_check(&ctx, n, seed, &NormOptions::default()).unwrap();
                let ratio = r.observed("ratio").unwrap();
                mx = mx.max(ratio);
                if ratio > a {
                    bad.push(format!("q={q} n={n} seed={seed} ratio={ratio:.4}"));
                }
            }
            maxima.push(format!("q={q},n={n}:{mx:.3}"));
        }
        maxima.push(format!("A={a:.3}"));
    }
    let secs = start.elapsed().as_secs_f64();
    line(bad.is_empty(), format!("max ratios [{}], {secs:.1} s{}", maxima.join(" "), fmt_fail(&bad)))
}

fn ultra_check() -> Line {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut notes = Vec::new();
    let k = constants(0.5, DEFAULT_SERIES_TOL).unwrap();
    for &t in &[0.5, 1.0] {
        let cut = tail_degree_cut(t).unwrap();
        let ctx = QContext::new(0.5, 1, 2 * cut).unwrap();
        let r = ultracontractivity_experiment(&ctx, t, cut).unwrap();
        let psi = r.observed("psi_delta").unwrap();
        let coeff = r.observed("coefficient_delta").unwrap();
        let hh = r.observed("hh_norm_sq").unwrap();
        let chain = (1.0 - (-4.0 * t).exp()).powi(-4) / (k.b_q * k.b_q);
        let ratio = r.observed("ratio").unwrap();
        let (lo, hi) = (k.alpha() / t, k.beta() / t);
        if !(psi < 1e-10) {
            bad.push(format!("t={t} psi delta {psi:.2e}"));
        }
        if !(coeff < 1e-9) {
            bad.push(format!("t={t} coefficient delta {coeff:.2e}"));
        }
        if hh < chain {
            bad.push(format!("t={t} chain {chain} > {hh}"));
        }
        if ratio < lo || ratio > hi {
            bad.push(format!("t={t} ratio {ratio} outside [{lo}, {hi}]"));
        }
        notes.push(format!("t={t}: M={cut} ratio {ratio:.4} in [{lo:.4}, {hi:.2}]"));
    }
    let secs = start.elapsed().as_secs_f64();
    line(bad.is_empty() && secs < 300.0, format!("{}, {secs:.1} s{}", notes.join("; "), fmt_fail(&bad)))
}

fn run_cli(args: &[&str], dir: &Path) -> (i32, Vec<u8>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_qfock"))
        .args(args)
        .env("QFOCK_OUTPUT_DIR", dir)
        .output()
        .expect("binary runs");
    let file = std::fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .find(|p| p.file_name().unwrap() != "manifest.json")
        .map(|p| std::fs::read(p).unwrap())
        .unwrap_or_default();
    (out.status.code().unwrap_or(-1), out.stdout, file)
}

fn determinism() -> Line {
    let commands: [&[&str]; 5] = [
        &["verify", "--q", "0.3", "--d", "1", "--max-n", "3", "--trunc", "7"],
        &["haagerup", "--q=-0.3,0.3", "--d", "2", "--n-max", "1", "--trunc-ladder", "4,5", "--seeds", "1,2"],
        &["haagerup", "--q", "0.6", "--n-max", "4", "--format", "jsonl"],
        &["moments", "--q", "0.5", "--pattern", "2,2"],
        &["ultra", "--q", "0.5", "--t", "0.5,1", "--format", "jsonl"],
    ];
    let mut bad = Vec::new();
    for args in commands {
        let (a, b, c) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let first = run_cli(args, a.path());
        let second = run_cli(args, b.path());
        let manifest = a.path().join("manifest.json");
        let replay = run_cli(&["replay", manifest.to_str().unwrap()], c.path());
        let ok = first.0 == 0
            && !first.1.is_empty()
            && first == second
            && first.1 == first.2
            && replay == first;
        if !ok {
            bad.push(args.join(" "));
        }
    }
    line(bad.is_empty(), format!("{} commands rerun and replayed from manifest{}", commands.len(), fmt_fail(&bad)))
}

fn main() {
    let criteria: [(&str, fn() -> Line); 10] = [
        ("identity suite", identity_suite),
        ("paper moment values", paper_moments),
        ("moment oracle equivalence", moment_oracle),
        ("Fuss-Catalan specialization", fuss_catalan_check),
        ("L2 norms of powers", l2_norms),
        ("strong Haagerup sandwich", haagerup_sandwich),
        ("constants", constants_check),
        ("key-estimate scan", keylem_scan),
        ("ultracontractivity", ultra_check),
        ("CLI determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let l = f();
        failed += usize::from(!l.pass);
        println!("criterion {:>2} {:<28} {}  {}", i + 1, name, if l.pass { "PASS" } else { "FAIL" }, l.detail);
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
