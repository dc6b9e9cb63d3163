use std::collections::HashMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use supercomplexity::coding::{
    check_distribution, fuzz_trial, ideal_lengths, theorem1_gap, trial_seeds, CheckRow, CodeLengths,
};
use supercomplexity::efflog::eff_log_excess;
use supercomplexity::entropy::WeightMode;
use supercomplexity::superstat::*;
use supercomplexity::toyuniv::{self, Bits};
use supercomplexity::{
    entropy, entropy_series, rel_entropy, rel_entropy_series, Distribution, LogKind,
};

use crate::output::{Base, Cell, Table};
use crate::*;

pub fn execute(cli: &Cli) -> Result<Report> {
    let g = &cli.global;
    let plain = |table| Ok(Report { table, holds: true });
    match &cli.command {
        Command::Entropy(a) => plain(entropy_table(a, g.base)?),
        Command::Relent(a) => plain(relent_table(a, g.base)?),
        Command::Figure1(a) => plain(figure1_table(a.n_min, a.n_max, g.base)?),
        Command::Codecheck(a) => codecheck(a, g),
        Command::Enumerate(a) => plain(enumerate_table(a, g.base)?),
        Command::Superstat(a) => plain(superstat_table(a)?),
    }
}

pub fn read_distribution(path: &Path, input: &InputArgs) -> Result<Distribution> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mode = if input.counts {
        WeightMode::Counts
    } else {
        WeightMode::Probabilities
    };
    Distribution::parse(&text, mode, input.renormalize)
        .with_context(|| format!("parsing {}", path.display()))
}

pub fn entropy_table(a: &EntropyArgs, base: Base) -> Result<Table> {
    let p = match (&a.input, &a.probs) {
        (Some(path), _) => read_distribution(path, &a.input_args)?,
        (None, Some(probs)) if a.input_args.counts || a.input_args.renormalize => {
            let labels = (0..probs.len()).map(|i| format!("x{i}")).collect();
            Distribution::from_weights(labels, probs)?
        }
        (None, Some(probs)) => Distribution::from_probs(probs.clone())?,
        (None, None) => bail!("no distribution given"),
    };
    let mut columns = vec!["h_natural", "h_plus", "h_minus"];
    let mut row: Vec<Cell> = LogKind::ALL
        .iter()
        .map(|&k| base.scale(entropy(k, &p)).into())
        .collect();
    if let Some(k_max) = a.series {
        columns.extend(["series_plus", "series_minus"]);
        for kind in [LogKind::Plus, LogKind::Minus] {
            row.push(base.scale(entropy_series(kind, &p, k_max)?).into());
        }
    }
    let mut t = Table::new(&columns)
        .meta("base", base.name())
        .meta("outcomes", p.len() as u64);
    t.push(row);
    Ok(t)
}

pub fn relent_table(a: &RelentArgs, base: Base) -> Result<Table> {
    let p = read_distribution(&a.p, &a.input_args)?;
    let q = read_distribution(&a.q, &a.input_args)?;
    let sign = if a.negate { -1.0 } else { 1.0 };
    let mut columns = vec!["d_natural", "d_plus", "d_minus"];
    let mut row = Vec::new();
    for kind in LogKind::ALL {
        row.push(Cell::from(sign * base.scale(rel_entropy(kind, &p, &q)?)));
    }
    if let Some(k_max) = a.series {
        columns.extend(["series_plus", "series_minus"]);
        for kind in [LogKind::Plus, LogKind::Minus] {
            row.push(Cell::from(
                sign * base.scale(rel_entropy_series(kind, &p, &q, k_max)?),
            ));
        }
    }
    let mut t = Table::new(&columns)
        .meta("base", base.name())
        .meta("negated", a.negate);
    t.push(row);
    Ok(t)
}

pub const FIGURE1_N_MAX: u32 = 64;

/// One row per `n`: the length `n` of a literal description and the
/// effective complexities `-ln±(2^-n)`.
///
/// `K± = n ln 2 ∓ |ln±(2^-n) - ln(2^-n)|`, with the excess evaluated
/// without cancellation so the small-deviation tail stays accurate.
pub fn figure1_table(n_min: u32, n_max: u32, base: Base) -> Result<Table> {
    if !(1 <= n_min && n_min <= n_max && n_max <= FIGURE1_N_MAX) {
        bail!("need 1 <= n-min <= n-max <= {FIGURE1_N_MAX}, got {n_min}..{n_max}");
    }
    let mut t = Table::new(&["n", "k", "k_plus", "k_minus"]).meta("base", base.name());
    for n in n_min..=n_max {
        let x = (-(n as f64)).exp2();
        let ex_plus = eff_log_excess(LogKind::Plus, x)?.abs();
        let ex_minus = eff_log_excess(LogKind::Minus, x)?.abs();
        let (k, k_plus, k_minus) = match base {
            Base::Bits => {
                let n = n as f64;
                (n, n - base.scale(ex_plus), n + base.scale(ex_minus))
            }
            Base::Nats => {
                let k = n as f64 * std::f64::consts::LN_2;
                (k, k - ex_plus, k + ex_minus)
            }
        };
        t.push(vec![
            (n as u64).into(),
            k.into(),
            k_plus.into(),
            k_minus.into(),
        ]);
    }
    Ok(t)
}

pub const CODECHECK_COLUMNS: [&str; 7] =
    ["check", "kind", "n", "seed", "gap", "kraft_sum", "holds"];
pub const SCAN_CPRIMES: [f64; 3] = [1.0, 2.0, 10.0];

fn codecheck(a: &CodecheckArgs, g: &Global) -> Result<Report> {
    let rows = if let Some(trials) = a.trials {
        fuzz_rows(trials, a.n_max, g.seed, g.threads)?
    } else if a.scan {
        scan_rows()?
    } else if let Some(path) = &a.input {
        let p = read_distribution(path, &a.input_args)?;
        let supplied = match &a.lengths {
            Some(path) => Some(read_lengths(path, &p, g.base)?),
            None => None,
        };
        let mut rows = Vec::new();
        for kind in LogKind::ALL {
            let lengths = match &supplied {
                Some(l) => l.clone(),
                None => ideal_lengths(kind, &p)?,
            };
            let mut pair = check_distribution(kind, &p, &lengths, a.cprime, 0)?;
            if supplied.is_some() {
                // report the gap of the supplied lengths, not the ideal one
                pair[0].gap = theorem1_gap(kind, &p, &lengths)?;
            }
            rows.extend(pair);
        }
        rows
    } else {
        bail!("codecheck needs an input file, --trials or --scan");
    };
    let holds = rows.iter().all(|r| r.holds);
    let mut table = Table::new(&CODECHECK_COLUMNS)
        .meta("base", g.base.name())
        .meta("seed", g.seed);
    for r in rows {
        table.push(vec![
            r.check.into(),
            r.kind.name().into(),
            (r.n as u64).into(),
            r.seed.into(),
            g.base.scale(r.gap).into(),
            r.kraft_sum.into(),
            r.holds.into(),
        ]);
    }
    Ok(Report { table, holds })
}

/// Code lengths keyed by outcome label, converted to nats.
pub fn read_lengths(path: &Path, p: &Distribution, base: Base) -> Result<CodeLengths> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut by_label = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut cols = line.split_whitespace();
        let (Some(label), Some(value), None) = (cols.next(), cols.next(), cols.next()) else {
            bail!("{}:{}: expected `label length`", path.display(), idx + 1);
        };
        let len: f64 = value
            .parse()
            .with_context(|| format!("{}:{}: bad length", path.display(), idx + 1))?;
        let nats = match base {
            Base::Bits => len * std::f64::consts::LN_2,
            Base::Nats => len,
        };
        if by_label.insert(label.to_string(), nats).is_some() {
            bail!("{}: duplicate label {label}", path.display());
        }
    }
    let lengths = p
        .outcomes()
        .iter()
        .map(|o| {
            by_label
                .get(o)
                .copied()
                .with_context(|| format!("{}: no length for {o}", path.display()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CodeLengths::user(lengths)?)
}

/// Fuzz trials in parallel; rows come back in trial order.
pub fn fuzz_rows(trials: usize, n_max: usize, seed: u64, threads: usize) -> Result<Vec<CheckRow>> {
    let seeds = trial_seeds(seed, trials);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()?;
    let per_trial: Vec<Vec<CheckRow>> = pool.install(|| {
        seeds
            .par_iter()
            .map(|&s| fuzz_trial(s, n_max))
            .collect::<supercomplexity::Result<_>>()
    })?;
    Ok(per_trial.into_iter().flatten().collect())
}

/// Two-point distributions `{y, 1-y}`; the seed column holds the grid index.
pub fn scan_rows() -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let mut index = 0u64;
    for i in 1..=99 {
        let y = i as f64 / 100.0;
        let p = Distribution::from_probs(vec![y, 1.0 - y])?;
        for cprime in SCAN_CPRIMES {
            for kind in LogKind::ALL {
                rows.extend(check_distribution(
                    kind,
                    &p,
                    &ideal_lengths(kind, &p)?,
                    cprime,
                    index,
                )?);
            }
            index += 1;
        }
    }
    Ok(rows)
}

pub const ENUMERATE_COLUMNS: [&str; 6] =
    ["y", "omega", "shortest_bits", "k_nat", "k_plus", "k_minus"];

pub fn enumerate_table(a: &EnumerateArgs, base: Base) -> Result<Table> {
    let report = toyuniv::enumerate(a.max_len, a.step_budget)?;
    let z = toyuniv::partition_partial(&report, a.beta);
    let mut t = match &a.query {
        Some(y) => query_table(&report, y, a, base)?,
        None => {
            let mut t = Table::new(&ENUMERATE_COLUMNS);
            for r in toyuniv::report_rows(&report, a.beta)? {
                t.push(vec![
                    r.y.to_string().into(),
                    r.omega.into(),
                    (r.shortest_bits as u64).into(),
                    base.scale(r.k_nat).into(),
                    base.scale(r.k_plus).into(),
                    base.scale(r.k_minus).into(),
                ]);
            }
            t
        }
    };
    t.meta = vec![
        ("base", base.name().into()),
        ("max_len", (a.max_len as u64).into()),
        ("beta", a.beta.into()),
        ("program_count", report.program_count.into()),
        ("z_partial", z.into()),
    ];
    Ok(t)
}

fn query_table(
    report: &toyuniv::EnumerationReport,
    y: &Bits,
    a: &EnumerateArgs,
    base: Base,
) -> Result<Table> {
    let mut columns = vec!["y", "status"];
    columns.extend(&ENUMERATE_COLUMNS[1..]);
    if a.series_literal {
        columns.extend(["series_plus", "series_minus"]);
    }
    let mut t = Table::new(&columns);
    let mut row: Vec<Cell> = vec![y.to_string().into()];
    match report.get(y) {
        None => {
            row.push("not_found".into());
            row.resize(columns.len(), Cell::Empty);
        }
        Some(stats) => {
            row.push("found".into());
            row.push(report.omega_beta(y, a.beta).into());
            row.push((stats.shortest as u64).into());
            for kind in LogKind::ALL {
                row.push(
                    base.scale(toyuniv::algorithmic_entropy(kind, report, y, a.beta)?)
                        .into(),
                );
            }
            if a.series_literal {
                for kind in [LogKind::Plus, LogKind::Minus] {
                    let s = toyuniv::algorithmic_entropy_series_literal(
                        kind, report, y, a.beta, a.k_max,
                    )?;
                    row.push(base.scale(s).into());
                }
            }
        }
    }
    t.push(row);
    Ok(t)
}

pub const SUPERSTAT_COLUMNS: [&str; 11] = [
    "family",
    "l",
    "boltzmann",
    "laplace_value",
    "laplace_error",
    "laplace_residual",
    "laplace_status",
    "x",
    "inverse_length",
    "h",
    "alpha",
];

pub fn superstat_table(a: &SuperstatArgs) -> Result<Table> {
    let spec = match a.family {
        Family::Standard => BoltzmannSpec::standard(a.beta)?,
        Family::Plus => BoltzmannSpec::plus(a.shape, a.beta0)?,
        Family::Minus => BoltzmannSpec::minus(a.shape, a.beta0)?,
    };
    let mut row: Vec<Cell> = vec![format!("{:?}", a.family).to_lowercase().into()];
    match a.l {
        Some(l) => {
            let b = boltzmann(&spec, l)?;
            row.extend([l.into(), b.into()]);
            if a.family == Family::Standard {
                row.extend([Cell::Empty, Cell::Empty, Cell::Empty, "n/a".into()]);
            } else {
                let d = MixingDensity::new(a.family, a.shape, a.beta0)?;
                match laplace_forward(&d, l, a.rel_tol) {
                    Ok(i) => row.extend([
                        i.value.into(),
                        i.error.into(),
                        (i.value - b).abs().into(),
                        "ok".into(),
                    ]),
                    Err(supercomplexity::Error::Convergence {
                        estimate,
                        error_estimate,
                    }) => row.extend([
                        estimate.into(),
                        error_estimate.into(),
                        (estimate - b).abs().into(),
                        "diverged".into(),
                    ]),
                    Err(e) => return Err(e.into()),
                }
            }
        }
        None => row.extend(std::iter::repeat_n(Cell::Empty, 6)),
    }
    match a.x {
        Some(x) => {
            let mode = if a.self_identified {
                ShapeMode::SelfIdentified
            } else {
                ShapeMode::Fixed
            };
            let form = entropic_form(&spec, mode, a.ystar, x, a.abs_tol)?;
            row.extend([
                x.into(),
                inverse_length(&spec, x)?.into(),
                form.h.into(),
                form.alpha.into(),
            ]);
        }
        None => row.extend(std::iter::repeat_n(Cell::Empty, 4)),
    }
    let mut t = Table::new(&SUPERSTAT_COLUMNS)
        .meta("base", "nats")
        .meta("shape", a.shape)
        .meta("beta0", a.beta0)
        .meta("beta", a.beta)
        .meta("self_identified", a.self_identified);
    t.push(row);
    Ok(t)
}
