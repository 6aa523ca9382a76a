//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p pinorm --test acceptance`. The process exits
//! non-zero when any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use pinorm::bounds::{
    check_kp_exact, check_lemma_32, check_lemma_33, check_main2_sandwich, check_oracle_equivalence,
    check_tree_symmetry, default_branches, growth_checks, run_suite, CheckReport, Status, Suite, SuiteConfig,
};
use pinorm::constructions::Constants;
use pinorm::norms::Guard;
use pinorm::projective::CutPlaneOptions;
use pinorm::report::to_csv;

const SEED: u64 = 7;

struct Outcome {
    rows: Vec<CheckReport>,
    failures: Vec<String>,
}

impl Outcome {
    fn new(rows: Vec<CheckReport>) -> Self {
        let failures = rows
            .iter()
            .filter(|r| r.failed())
            .map(|r| format!("{} {} n={}: {} vs {}", r.suite, r.quantity, r.n, r.computed, r.bound))
            .collect();
        Self { rows, failures }
    }

    fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }
}

struct Criterion {
    id: u32,
    label: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn opts() -> CutPlaneOptions {
    CutPlaneOptions::default()
}

fn spectral_and_inf2() -> Outcome {
    let cfg = SuiteConfig { n_max: 256, ..SuiteConfig::default() };
    let mut out = Outcome::new(run_suite(Suite::Remark31, &cfg).unwrap());
    let margin: Vec<String> = out
        .rows
        .iter()
        .filter(|r| r.quantity == "spectral_h" && r.computed > PI - 1e-3)
        .map(|r| format!("spectral estimate n={} is {} > pi - 1e-3", r.n, r.computed))
        .collect();
    out.failures.extend(margin);
    for r in out.rows.iter().filter(|r| r.quantity == "inf2_p" && r.n <= 20) {
        if r.status == Status::Skipped {
            out.failures.push(format!("inf2_p n={} skipped", r.n));
        }
    }
    out
}

fn khintchine() -> Outcome {
    Outcome::new((1..=12).map(|n| check_lemma_32(n, 10_000, SEED).unwrap()).collect())
}

fn pn_form_norms() -> Outcome {
    let c = Constants::default();
    let rows: Vec<CheckReport> = (1..=8).map(|n| check_lemma_33(n, &c, Guard::default()).unwrap()).collect();
    let mut out = Outcome::new(rows);
    let n2 = out.rows[1].computed;
    out.require((n2 - 1.5).abs() <= 1e-12, format!("n=2 exact value is {n2}, expected 3/2 within 1e-12"));
    let skipped: Vec<String> =
        out.rows.iter().filter(|r| r.status == Status::Skipped).map(|r| format!("n={} skipped", r.n)).collect();
    out.failures.extend(skipped);
    out
}

fn scalar_chain() -> Outcome {
    Outcome::new(growth_checks("main2", 1_000_000, &Constants::default()).unwrap())
}

fn sandwich() -> Outcome {
    let c = Constants::default();
    Outcome::new((1..=3).flat_map(|n| check_main2_sandwich(n, &c, &opts()).unwrap()).collect())
}

fn kp_chain() -> Outcome {
    let c = Constants::default();
    let mut rows = growth_checks("kp", 10_000, &c).unwrap();
    rows.extend((1..=6).flat_map(|n| check_kp_exact(n, &c, &opts()).unwrap()));
    Outcome::new(rows)
}

fn tree() -> Outcome {
    let rows: Vec<CheckReport> =
        (1..=2).flat_map(|n| check_tree_symmetry(n, &default_branches(n).unwrap(), &opts()).unwrap()).collect();
    let mut out = Outcome::new(rows);
    let skipped = out.rows.iter().filter(|r| r.status == Status::Skipped).count();
    out.require(skipped == 0, format!("{skipped} rows skipped"));
    out
}

fn oracle() -> Outcome {
    Outcome::new(check_oracle_equivalence(200, 50, SEED, &opts()).unwrap())
}

const CRITERIA: [Criterion; 8] = [
    Criterion {
        id: 1,
        label: "spectral agreement of h_n and p_n, inf->2 bound",
        limit: Duration::from_secs(120),
        run: spectral_and_inf2,
    },
    Criterion {
        id: 2,
        label: "l1 norm of Rademacher sums below l2 of coefficients",
        limit: Duration::from_secs(60),
        run: khintchine,
    },
    Criterion {
        id: 3,
        label: "exact trilinear norm of P_n below pi sqrt(n)",
        limit: Duration::from_secs(120),
        run: pn_form_norms,
    },
    Criterion { id: 4, label: "harmonic scalar chain up to 10^6", limit: Duration::from_secs(30), run: scalar_chain },
    Criterion { id: 5, label: "certified sandwich for n <= 3", limit: Duration::from_secs(300), run: sandwich },
    Criterion { id: 6, label: "KP lower bound chain", limit: Duration::from_secs(180), run: kp_chain },
    Criterion { id: 7, label: "tree branch symmetry", limit: Duration::from_secs(180), run: tree },
    Criterion {
        id: 8,
        label: "ascent vs exact oracles, projective sandwich",
        limit: Duration::from_secs(300),
        run: oracle,
    },
];

fn line(id: u32, label: &str, ok: bool, elapsed: Option<Duration>, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    let time = elapsed.map(|d| format!(" [{:.2}s]", d.as_secs_f64())).unwrap_or_default();
    if detail.is_empty() {
        println!("criterion {id}: {verdict} {label}{time}");
    } else {
        println!("criterion {id}: {verdict} {label}{time}: {detail}");
    }
}

fn csv_for_all() -> String {
    let rows: Vec<CheckReport> = CRITERIA.iter().flat_map(|c| (c.run)().rows).collect();
    to_csv(&rows, false)
}

fn main() -> ExitCode {
    let mut all_ok = true;
    for c in &CRITERIA {
        let start = Instant::now();
        let mut out = (c.run)();
        let elapsed = start.elapsed();
        if elapsed > c.limit {
            out.failures.push(format!("runtime {:.1}s exceeds {}s", elapsed.as_secs_f64(), c.limit.as_secs()));
        }
        let ok = out.failures.is_empty();
        all_ok &= ok;
        line(c.id, c.label, ok, Some(elapsed), &out.failures.join("; "));
    }

    let start = Instant::now();
    let mut outputs = Vec::new();
    for threads in [1, 2, 8] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        outputs.push((threads, pool.install(csv_for_all)));
    }
    let differing: Vec<String> = outputs[1..]
        .iter()
        .filter(|(_, csv)| *csv != outputs[0].1)
        .map(|(t, _)| format!("{t} threads differ"))
        .collect();
    let ok = differing.is_empty();
    all_ok &= ok;
    line(9, "byte-identical CSV across 1, 2 and 8 threads", ok, Some(start.elapsed()), &differing.join("; "));

    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
