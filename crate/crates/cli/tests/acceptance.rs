//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.
//! Runs without the libtest harness so the summary lines are always shown.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use clap::Parser;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use supercomplexity::coding::*;
use supercomplexity::numeric::{integrate_semi_infinite, Tolerance};
use supercomplexity::superstat::*;
use supercomplexity::toyuniv::{self, Bits, DEFAULT_STEP_BUDGET};
use supercomplexity::*;
use supercomplexity_cli::commands::{figure1_table, fuzz_rows, scan_rows, superstat_table};
use supercomplexity_cli::output::{Base, Cell, Table};
use supercomplexity_cli::{Cli, Command as Sub};

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {{
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($msg)+));
        }
    }};
}

fn num(t: &Table, row: usize, col: &str) -> f64 {
    match &t.rows[row][t.column(col).unwrap()] {
        Cell::Num(x) => *x,
        other => panic!("{col} is not numeric: {other:?}"),
    }
}

fn figure1() -> Outcome {
    let t = figure1_table(1, 64, Base::Bits).map_err(|e| e.to_string())?;
    ensure!(t.rows.len() == 64, "expected 64 rows");
    let mut devs = Vec::new();
    for i in 0..64 {
        let n = (i + 1) as f64;
        let (k, kp, km) = (num(&t, i, "k"), num(&t, i, "k_plus"), num(&t, i, "k_minus"));
        ensure!(k == n, "K({n}) = {k}");
        ensure!(kp <= n && n <= km, "sandwich fails at n = {n}: {kp} {km}");
        devs.push((((n - kp) / n), ((km - n) / n)));
    }
    let (p8, m8) = devs[7];
    ensure!(
        p8 >= 0.005 && m8 >= 0.005,
        "n = 8 deviations {p8:.3e} {m8:.3e} below 0.5%"
    );
    let (p64, m64) = devs[63];
    ensure!(
        p64 <= 1e-12 && m64 <= 1e-12,
        "n = 64 deviations {p64:.3e} {m64:.3e}"
    );
    // nonincreasing rather than strict: n 2^-n, and so the deviation, is equal at n = 1 and 2
    for w in devs.windows(2) {
        for (a, b) in [(w[0].0, w[1].0), (w[0].1, w[1].1)] {
            ensure!(b <= a, "deviation increases: {a:.17e} -> {b:.17e}");
        }
    }
    Ok(format!(
        "n=8 deviation +{:.3}% / -{:.3}%, n=64 {p64:.1e} / {m64:.1e}",
        100.0 * p8,
        100.0 * m8
    ))
}

fn efflog_suite() -> Outcome {
    let linear = (1..=10_000).map(|i| i as f64 / 10_000.0);
    let geometric = (0..=10_000).map(|i| 10f64.powf(-12.0 + 12.0 * i as f64 / 10_000.0));
    let mut worst_series = 0.0f64;
    let mut worst_round = 0.0f64;
    for (label, grid) in [
        ("linear", linear.collect::<Vec<_>>()),
        ("geometric", geometric.collect()),
    ] {
        let mut previous: Option<[f64; 3]> = None;
        for &x in &grid {
            let mut v = [0.0; 3];
            for (i, kind) in LogKind::ALL.into_iter().enumerate() {
                let closed = eff_log(kind, x).map_err(|e| e.to_string())?;
                let series = eff_log_series(kind, x, DEFAULT_K_MAX).map_err(|e| e.to_string())?;
                let back = eff_exp(kind, closed).map_err(|e| e.to_string())?;
                worst_series = worst_series.max((series - closed).abs());
                worst_round = worst_round.max((back - x).abs());
                v[i] = closed;
            }
            let [nat, plus, minus] = v;
            if x < 1.0 {
                ensure!(
                    minus < nat && nat < plus && plus < 0.0,
                    "ordering fails at {x}"
                );
            }
            if let Some(p) = previous {
                ensure!(
                    (0..3).all(|i| v[i] > p[i]),
                    "{label} grid not increasing at {x}"
                );
            }
            previous = Some(v);
        }
    }
    ensure!(worst_series <= 1e-10, "series error {worst_series:.3e}");
    ensure!(worst_round <= 1e-10, "round-trip error {worst_round:.3e}");
    Ok(format!(
        "series {worst_series:.1e}, round trip {worst_round:.1e}"
    ))
}

fn tail_bound(p: &Distribution) -> f64 {
    p.probs()
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| {
            let u = (x * x.ln()).abs();
            u.exp_m1() - u
        })
        .sum()
}

fn entropy_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for trial in 0..1000 {
        let n = rng.gen_range(1..=64);
        let p = Distribution::random(&mut rng, n).map_err(|e| e.to_string())?;
        let (h, hp, hm) = (
            entropy(LogKind::Natural, &p),
            entropy(LogKind::Plus, &p),
            entropy(LogKind::Minus, &p),
        );
        ensure!(hp <= h && h <= hm, "trial {trial}: sandwich {hp} {h} {hm}");
        let bound = tail_bound(&p) + 1e-12;
        ensure!(
            (hp - h).abs() <= bound && (hm - h).abs() <= bound,
            "trial {trial}: tail bound"
        );
    }
    let u = Distribution::uniform(1024).map_err(|e| e.to_string())?;
    let h = entropy(LogKind::Natural, &u);
    let rel = [LogKind::Plus, LogKind::Minus].map(|k| (entropy(k, &u) - h).abs() / h);
    ensure!(
        rel.iter().all(|&r| r <= 0.01),
        "uniform-1024 relative differences {rel:?}"
    );
    Ok(format!(
        "uniform-1024 relative difference {:.2e} / {:.2e}",
        rel[0], rel[1]
    ))
}

fn theorem1() -> Outcome {
    let rows = fuzz_rows(1000, 16, 42, 0).map_err(|e| e.to_string())?;
    let t1: Vec<&CheckRow> = rows.iter().filter(|r| r.check == "theorem1").collect();
    ensure!(
        t1.len() == 3000,
        "expected 1000 trials per kind, got {}",
        t1.len()
    );
    let mut worst = 0.0f64;
    for r in &t1 {
        worst = worst.max(r.gap.abs());
        ensure!(
            r.gap.abs() <= 1e-12,
            "{} ideal gap {:.3e} (seed {})",
            r.kind,
            r.gap,
            r.seed
        );
        match r.kind {
            LogKind::Minus => ensure!(
                r.kraft_sum <= 1.0 + 1e-12,
                "minus kraft {} (seed {})",
                r.kraft_sum,
                r.seed
            ),
            LogKind::Plus => ensure!(
                r.kraft_sum >= 1.0 - 1e-12,
                "plus kraft {} (seed {})",
                r.kraft_sum,
                r.seed
            ),
            LogKind::Natural => {}
        }
        // holds also covers the gap of randomly lengthened codes
        ensure!(r.holds, "{} fails at seed {}", r.kind, r.seed);
    }
    Ok(format!("3000 rows, worst ideal gap {worst:.1e}"))
}

fn theorem2() -> Outcome {
    let scan: Vec<CheckRow> = scan_rows().map_err(|e| e.to_string())?;
    let scan2: Vec<&CheckRow> = scan.iter().filter(|r| r.check == "theorem2").collect();
    ensure!(scan2.len() == 99 * 3 * 3, "grid size {}", scan2.len());
    ensure!(scan2.iter().all(|r| r.holds), "two-point grid violation");
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut min_slack = f64::INFINITY;
    for trial in 0..1000 {
        let n = rng.gen_range(2..=64);
        let p = Distribution::random(&mut rng, n).map_err(|e| e.to_string())?;
        let cprime = rng.gen_range(1.0..=10.0);
        for kind in LogKind::ALL {
            let c = theorem2_check(kind, &p, cprime).map_err(|e| e.to_string())?;
            ensure!(c.holds, "trial {trial} {kind}: {c:?}");
            min_slack = min_slack.min(c.rhs - c.mid);
        }
    }
    Ok(format!(
        "891 grid rows and 1000 random distributions, min slack {min_slack:.3e}"
    ))
}

fn superstat() -> Outcome {
    let mut worst = 0.0f64;
    for shape in [0.1, 0.5, 1.0] {
        let d = MixingDensity::new(Family::Plus, shape, 1.0).map_err(|e| e.to_string())?;
        for l in [0.0, 0.5, 1.0, 2.0, 5.0] {
            let got = laplace_forward(&d, l, 1e-10)
                .map_err(|e| e.to_string())?
                .value;
            let want = boltzmann(&d.boltzmann_spec(), l).map_err(|e| e.to_string())?;
            worst = worst.max((got - want).abs());
        }
    }
    ensure!(worst <= 1e-6, "laplace residual {worst:.3e}");
    let mut worst_norm = 0.0f64;
    for shape in [0.1, 0.5, 1.0] {
        let d = MixingDensity::new(Family::Plus, shape, 1.0).map_err(|e| e.to_string())?;
        let total = integrate_semi_infinite(
            |b| mixing_density(&d, b).unwrap(),
            Tolerance::relative(1e-12),
        )
        .map_err(|e| e.to_string())?
        .value;
        worst_norm = worst_norm.max((total - 1.0).abs());
    }
    ensure!(worst_norm <= 1e-8, "normalization error {worst_norm:.3e}");
    let spec = BoltzmannSpec::standard(1.0).map_err(|e| e.to_string())?;
    let mut worst_h = 0.0f64;
    let mut worst_alpha = 0.0f64;
    for i in 1..=50 {
        let x = i as f64 / 50.0;
        let r = entropic_form(&spec, ShapeMode::Fixed, Cutoff::Infinite, x, 1e-10)
            .map_err(|e| e.to_string())?;
        worst_h = worst_h.max((r.h + x * x.ln()).abs());
        worst_alpha = worst_alpha.max((r.alpha + 1.0).abs());
    }
    ensure!(
        worst_h <= 1e-8 && worst_alpha <= 1e-8,
        "entropic form errors {worst_h:.3e} {worst_alpha:.3e}"
    );
    // recorded, not asserted
    let cli = Cli::try_parse_from([
        "supercomplexity",
        "superstat",
        "--family",
        "minus",
        "--shape",
        "0.5",
        "--l",
        "1",
    ])
    .map_err(|e| e.to_string())?;
    let Sub::Superstat(args) = &cli.command else {
        unreachable!()
    };
    let t = superstat_table(args).map_err(|e| e.to_string())?;
    let residual = num(&t, 0, "laplace_residual");
    let status = match &t.rows[0][t.column("laplace_status").unwrap()] {
        Cell::Text(s) => s.clone(),
        other => format!("{other:?}"),
    };
    Ok(format!(
        "laplace {worst:.1e}, norm {worst_norm:.1e}, h {worst_h:.1e}, alpha {worst_alpha:.1e}; minus residual {residual} ({status})"
    ))
}

fn brute_force(max: usize) -> BTreeMap<Bits, Bits> {
    let mut out = BTreeMap::new();
    for n in 0..=max {
        for x in Bits::all_of_len(n) {
            if let Ok(y) = toyuniv::decode(&x) {
                out.insert(x, y);
            }
        }
    }
    out
}

fn toy_machine() -> Outcome {
    let brute = brute_force(14);
    let keys: BTreeSet<&Bits> = brute.keys().collect();
    for x in brute.keys() {
        for cut in 0..x.len() {
            ensure!(
                !keys.contains(&Bits::new(x.as_slice()[..cut].to_vec())),
                "{x} has an accepted prefix"
            );
        }
    }
    let generated: BTreeMap<Bits, Bits> = toyuniv::programs(14)
        .map_err(|e| e.to_string())?
        .into_iter()
        .collect();
    ensure!(
        generated == brute,
        "generator and brute force differ at 14 bits"
    );

    let mut previous: Option<toyuniv::EnumerationReport> = None;
    let mut z20 = 0.0;
    for max in [8u32, 12, 16, 20] {
        let r = toyuniv::enumerate(max, DEFAULT_STEP_BUDGET).map_err(|e| e.to_string())?;
        let total: f64 = r.per_output.values().map(|s| s.omega).sum();
        ensure!(total <= 1.0, "sum of omega {total} at {max}");
        if let Some(prev) = &previous {
            ensure!(
                r.z_partial >= prev.z_partial,
                "partition sum decreased at {max}"
            );
            for (y, s) in &prev.per_output {
                let now = r.get(y).ok_or(format!("{y} disappeared at {max}"))?;
                ensure!(now.omega >= s.omega, "omega({y}) decreased at {max}");
            }
        }
        if max == 16 {
            let ten = "10".parse::<Bits>().unwrap();
            ensure!(
                toyuniv::k_complexity(&r, &ten) == Some(7),
                "shortest(10) = {:?}",
                toyuniv::k_complexity(&r, &ten)
            );
            let rep = ten.repeat(10);
            let k = toyuniv::k_complexity(&r, &rep);
            ensure!(matches!(k, Some(k) if k <= 16), "shortest(10 x 10) = {k:?}");
        }
        for row in toyuniv::report_rows(&r, std::f64::consts::LN_2).map_err(|e| e.to_string())? {
            ensure!(
                row.k_plus <= row.k_nat && row.k_nat <= row.k_minus,
                "sandwich fails for {}",
                row.y
            );
        }
        z20 = r.z_partial;
        previous = Some(r);
    }
    Ok(format!(
        "{} programs up to 14 bits, Z(20) = {z20}",
        brute.len()
    ))
}

fn sha256(path: &Path) -> String {
    let bytes = std::fs::read(path).unwrap();
    format!("{:x}", Sha256::digest(bytes))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dist = dir.path().join("p.txt");
    let other = dir.path().join("q.txt");
    std::fs::write(&dist, "a 0.5\nb 0.25\nc 0.25\n").unwrap();
    std::fs::write(&other, "a 0.2\nb 0.3\nc 0.5\n").unwrap();
    let (p, q) = (dist.to_str().unwrap(), other.to_str().unwrap());
    let runs: Vec<(&str, Vec<&str>)> = vec![
        ("entropy", vec!["entropy", p, "--series", "30"]),
        ("relent", vec!["relent", p, q, "--series", "30"]),
        ("figure1", vec!["figure1"]),
        ("codecheck-file", vec!["codecheck", p]),
        (
            "codecheck-fuzz",
            vec![
                "codecheck",
                "--trials",
                "1000",
                "--seed",
                "7",
                "--threads",
                "4",
            ],
        ),
        ("codecheck-scan", vec!["codecheck", "--scan"]),
        ("enumerate", vec!["enumerate", "--max-len", "20"]),
        (
            "enumerate-json",
            vec!["enumerate", "--max-len", "16", "--format", "json"],
        ),
        (
            "enumerate-query",
            vec![
                "enumerate",
                "--max-len",
                "16",
                "--query",
                "10",
                "--series-literal",
            ],
        ),
        (
            "superstat",
            vec!["superstat", "--family", "plus", "--l", "2", "--x", "0.5"],
        ),
    ];
    let bin = env!("CARGO_BIN_EXE_supercomplexity");
    for (name, args) in &runs {
        let mut digests = Vec::new();
        for attempt in 0..2 {
            let out = dir.path().join(format!("{name}-{attempt}.out"));
            let status = Command::new(bin)
                .args(args)
                .arg("--out")
                .arg(&out)
                .status()
                .map_err(|e| e.to_string())?;
            ensure!(status.success(), "{name} exited with {status}");
            digests.push(sha256(&out));
        }
        ensure!(
            digests[0] == digests[1],
            "{name} output differs between runs"
        );
    }
    // thread count must not change fuzz output either
    let single = dir.path().join("fuzz-single.out");
    let status = Command::new(bin)
        .args([
            "codecheck",
            "--trials",
            "1000",
            "--seed",
            "7",
            "--threads",
            "1",
            "--out",
        ])
        .arg(&single)
        .status()
        .map_err(|e| e.to_string())?;
    ensure!(status.success(), "single-thread fuzz exited with {status}");
    ensure!(
        sha256(&single) == sha256(&dir.path().join("codecheck-fuzz-0.out")),
        "fuzz output depends on thread count"
    );
    Ok(format!("{} subcommand runs byte-identical", runs.len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 figure shape", figure1),
        ("2 effective logarithms", efflog_suite),
        ("3 entropy sandwich and limit", entropy_suite),
        ("4 first coding theorem", theorem1),
        ("5 second coding theorem", theorem2),
        ("6 superstatistics", superstat),
        ("7 toy machine", toy_machine),
        ("8 determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or(e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {name}: PASS ({detail}; {secs:.2}s)"),
            Err(detail) => {
                failed += 1;
                println!("criterion {name}: FAIL ({detail}; {secs:.2}s)");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
