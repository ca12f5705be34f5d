//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every criterion prints exactly one `PASS`/`FAIL` line.

use std::io::Write as _;
use std::path::Path;
use std::time::{Duration, Instant};

use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;

use dline_core::cosets::library::{cyclic, dihedral, groups_up_to_12};
use dline_core::cosets::{
    classify_wa_pair, double_cosets, pm_by_union, pm_by_wreath_orbits, Cell, FiniteGroup, GroupSpec,
};
use dline_core::dline::{compose_diffeo, phi_ex, psi, same_structure, OriginAction, Verdict};
use dline_core::exact::Real;
use dline_core::germs::{
    compose, in_diff, make_wa, sandwich_smoothness, smoothness_at_zero, Germ, GermMap, Jet, Order,
};
use dline_core::join::{
    collapse_agreement, collapse_chain, glue_search, uniform_tolerances, verify_ck_numeric_refined, ChainAtlas,
    CollapseOrder, IntervalChart, NumericDiffeo, GRID_CELLS,
};

const D3_BUDGET: Duration = Duration::from_millis(1);
const GLUE_BUDGET: Duration = Duration::from_secs(1);
const CHAIN_BUDGET: Duration = Duration::from_secs(10);
const GAMMA_MASS_TOL: f64 = 1e-8;
const CHAIN_TOL: f64 = 1e-4;
const CHAIN_K: usize = 2;
const RANDOM_PAIRS: usize = 50;
const PROBE_CASES: usize = 20;
const SEED_RUNS: usize = 11;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn median_time(mut f: impl FnMut()) -> Duration {
    let mut times: Vec<Duration> = (0..SEED_RUNS)
        .map(|_| {
            let t = Instant::now();
            f();
            t.elapsed()
        })
        .collect();
    times.sort();
    times[SEED_RUNS / 2]
}

/// `s^i r^j` encoded as `3i + j`.
fn d3() -> FiniteGroup {
    let names = ["e", "r", "r2", "s", "sr", "sr2"].iter().map(|s| s.to_string()).collect();
    FiniteGroup::from_fn(names, |x, y| {
        let (i, j, k, l) = (x / 3, x % 3, y / 3, y % 3);
        let j = if k == 1 { (3 - j) % 3 } else { j };
        3 * ((i + k) % 2) + (j + l) % 3
    })
    .unwrap()
}

fn run_cli(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("dline").chain(args.iter().copied());
    let code = dline_core::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write_json<T: serde::Serialize>(dir: &Path, name: &str, value: &T) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

fn criterion_1() -> Outcome {
    let g = d3();
    let a = g.subgroup_by_names(&["e", "s"]).unwrap();
    let b = g.subgroup_by_names(&["e", "sr"]).unwrap();
    let spec = GroupSpec::from_group(&g, &[("A", &a), ("B", &b)]);
    let (g, named) = spec.build().unwrap();
    let (a, b) = (&named["A"], &named["B"]);
    let blocks = |p: dline_core::cosets::CosetPartition| -> Vec<Vec<String>> {
        let mut v: Vec<Vec<String>> = p
            .blocks()
            .iter()
            .map(|blk| {
                let mut names: Vec<String> = blk.iter().map(|&x| g.name(x).to_string()).collect();
                names.sort();
                names
            })
            .collect();
        v.sort();
        v
    };
    let ab = blocks(double_cosets(&g, a, b).unwrap());
    let aa = blocks(double_cosets(&g, a, a).unwrap());
    let want_ab = vec![vec!["e", "r", "s", "sr"], vec!["r2", "sr2"]];
    let want_aa = vec![vec!["e", "s"], vec!["r", "r2", "sr", "sr2"]];
    let ok = ab == want_ab && aa == want_aa;
    let elapsed = median_time(|| {
        std::hint::black_box(double_cosets(&g, a, b).unwrap());
        std::hint::black_box(double_cosets(&g, a, a).unwrap());
    });

    let dir = tempfile::tempdir().unwrap();
    let file = write_json(dir.path(), "d3.json", &spec);
    let (code, out, _) = run_cli(&["cosets", &file, "--C", "A", "--D", "B", "--json"]);
    let json: serde_json::Value = serde_json::from_str(&out).unwrap_or_default();
    let cli_blocks = json["blocks"].as_array().map_or(0, Vec::len);
    let cli_ok = code == 0 && cli_blocks == 2;
    outcome(
        ok && cli_ok && elapsed < D3_BUDGET,
        format!("AeB = {ab:?}, AeA = {aa:?}, cli exit {code} with {cli_blocks} blocks, median {elapsed:?}"),
    )
}

fn criterion_2() -> Outcome {
    let mut corpus = groups_up_to_12();
    corpus.push(("D3".into(), dihedral(3)));
    corpus.push(("Z6".into(), cyclic(6)));
    let (mut pairs, mut bad) = (0, Vec::new());
    for (name, g) in &corpus {
        for d in g.all_subgroups() {
            pairs += 1;
            let by_union = pm_by_union(g, &d).unwrap();
            let by_orbits = pm_by_wreath_orbits(g, &d).unwrap();
            if !by_union.same_blocks(&by_orbits) || !by_union.is_partition_of(g.order()) {
                bad.push(format!("{name} D={:?}", d.elements()));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("{} groups, {pairs} (group, D) pairs, mismatches {bad:?}", corpus.len()),
    )
}

fn expected_cells(a: (i64, i64), b: (i64, i64)) -> Vec<Cell> {
    // Cross-multiplied rational comparisons.
    let eq = a.0 * b.1 == b.0 * a.1;
    let inv = a.0 * b.0 == a.1 * b.1;
    let one = a.0 == a.1;
    match (eq, inv) {
        (true, true) if one => vec![Cell::FixPlus, Cell::FixMinus, Cell::ExPlus, Cell::ExMinus],
        (true, _) => vec![Cell::FixPlus, Cell::ExMinus],
        (_, true) => vec![Cell::FixMinus, Cell::ExPlus],
        _ => vec![],
    }
}

fn classify_matches(a: (i64, i64), b: (i64, i64)) -> Result<bool, String> {
    let ra = Real::from_ratio(a.0, a.1).map_err(|e| e.to_string())?;
    let rb = Real::from_ratio(b.0, b.1).map_err(|e| e.to_string())?;
    let c = classify_wa_pair(&ra, &rb, Order::Finite(2)).map_err(|e| e.to_string())?;
    let got: Vec<Cell> = c.cells.iter().filter(|(_, &v)| v).map(|(&k, _)| k).collect();
    let mut want = expected_cells(a, b);
    want.sort();
    Ok(got == want)
}

fn random_ratio(rng: &mut TestRunner) -> (i64, i64) {
    loop {
        let (p, q) = (1i64..=100, 1i64..=100).new_tree(rng).unwrap().current();
        if 10 * p > q && p < 10 * q {
            return (p, q);
        }
    }
}

fn criterion_3() -> Outcome {
    let mut rng = TestRunner::deterministic();
    let mut pairs = vec![((2, 1), (3, 1)), ((2, 1), (1, 2)), ((2, 1), (2, 1))];
    while pairs.len() < RANDOM_PAIRS + 3 {
        let a = random_ratio(&mut rng);
        // A third each of b = a, b = 1/a and an unrelated b.
        let b = match pairs.len() % 3 {
            0 => (a.0 * 7, a.1 * 7),
            1 => (a.1, a.0),
            _ => random_ratio(&mut rng),
        };
        pairs.push((a, b));
    }
    let mismatches: Vec<_> = pairs.iter().filter(|(a, b)| classify_matches(*a, *b) != Ok(true)).collect();
    let named = {
        let cells = |a: i64, b: (i64, i64)| {
            let c = classify_wa_pair(&Real::from_ratio(a, 1).unwrap(), &Real::from_ratio(b.0, b.1).unwrap(), Order::Finite(1))
                .unwrap();
            c.cells.iter().filter(|(_, &v)| v).map(|(&k, _)| k).collect::<Vec<_>>()
        };
        cells(2, (3, 1)).is_empty()
            && cells(2, (1, 2)) == vec![Cell::FixMinus, Cell::ExPlus]
            && cells(2, (2, 1)) == vec![Cell::FixPlus, Cell::ExMinus]
    };
    outcome(
        mismatches.is_empty() && named,
        format!("{} pairs ({} random, 3 named), mismatches {mismatches:?}, named cases {named}", pairs.len(), RANDOM_PAIRS),
    )
}

fn criterion_injectivity() -> Outcome {
    let grid: Vec<(i64, i64)> =
        vec![(1, 1), (9, 8), (5, 4), (4, 3), (3, 2), (5, 3), (2, 1), (7, 3), (5, 2), (3, 1), (4, 1), (5, 1), (7, 1), (10, 1)];
    let mut collisions = Vec::new();
    for &a in &grid {
        for &b in &grid {
            let c = classify_wa_pair(&Real::from_ratio(a.0, a.1).unwrap(), &Real::from_ratio(b.0, b.1).unwrap(), Order::Finite(1))
                .unwrap();
            if (a != b) == c.diffeomorphic() {
                collisions.push((a, b));
            }
        }
    }
    outcome(
        collisions.is_empty(),
        format!("{} values of a >= 1, {} ordered pairs, violations {collisions:?}", grid.len(), grid.len().pow(2)),
    )
}

fn wa_sandwich(f: &Germ, a: f64, b: f64) -> GermMap {
    let wa = GermMap::Exact(make_wa(a).unwrap());
    let wb = GermMap::Exact(make_wa(b).unwrap());
    compose(&wb, &compose(&GermMap::Exact(f.clone()), &wa))
}

fn criterion_4() -> Outcome {
    let mut notes = Vec::new();
    let f = Germ::polynomial(&[1.0, 1.0]).unwrap();
    let r = sandwich_smoothness(&Jet::of(&f.clone().into(), 2).unwrap(), 2.0, 0.5, 2).unwrap();
    let o = r.obstruction;
    // Brute force: (1/2) f(2x) = x + 2x^2 for x > 0 and f(x) = x + x^2 for x < 0.
    let oracle = (2.0, 4.0);
    let first = r.max_order == 1
        && o.as_ref().is_some_and(|o| o.order == 2 && o.neg == Some(oracle.0) && o.pos == Some(oracle.1));
    notes.push(format!("x+x^2: max_order {} obstruction {:?}", r.max_order, o.map(|o| (o.neg, o.pos))));

    let cubic = Germ::polynomial(&[1.0, 0.0, 1.0]).unwrap();
    let rc = sandwich_smoothness(&Jet::of(&cubic.into(), 2).unwrap(), 2.0, 0.5, 2).unwrap();
    let second = rc.is_diffeo && rc.max_order == 2;
    notes.push(format!("x+x^3: C^{}", rc.max_order));

    let fs: Vec<Germ> = vec![
        Germ::polynomial(&[1.0, 1.0]).unwrap(),
        Germ::polynomial(&[1.0, 0.0, 1.0]).unwrap(),
        Germ::polynomial(&[2.0, -1.0, 0.5]).unwrap(),
        Germ::polynomial(&[-1.0, 0.0, 3.0]).unwrap(),
        Germ::linear(3.0).unwrap(),
    ];
    let ab = [(2.0, 0.5), (4.0, 0.25), (3.0, 3.0), (0.5, 2.0)];
    let mut cases = 0;
    let mut mismatches = Vec::new();
    for f in &fs {
        for &(a, b) in &ab {
            cases += 1;
            let n = 3;
            let jet_path = sandwich_smoothness(&Jet::of(&f.clone().into(), n).unwrap(), a, b, n).unwrap();
            let germ_path = smoothness_at_zero(&wa_sandwich(f, a, b), Order::Finite(n)).unwrap();
            if (jet_path.max_order, jet_path.is_diffeo) != (germ_path.max_order, germ_path.is_diffeo) {
                mismatches.push(format!("{f} a={a} b={b}"));
            }
        }
    }
    notes.push(format!("{cases} probe cases, {} mismatches", mismatches.len()));
    outcome(first && second && cases == PROBE_CASES && mismatches.is_empty(), notes.join("; "))
}

fn criterion_5() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for a in [1.0f64, 4.0, 9.0] {
        let k = Order::Finite(2);
        let p = psi(a, k).unwrap();
        let s = a.sqrt();
        let order_two = compose_diffeo(&p, &p).unwrap().is_identity() && !p.is_identity();
        let exchange = p.origin_action() == OriginAction::Exchange;
        let exact = |m: &GermMap, c: f64| m.as_exact().is_some_and(|g| g.approx_eq(&Germ::linear(c).unwrap(), 0.0));
        let pres = exact(p.u_presentation(), -s) && exact(p.v_presentation(), -1.0 / s);
        let certified = in_diff(&phi_ex(&p).unwrap(), k).unwrap();
        pass &= order_two && exchange && pres && certified;
        notes.push(format!("a={a}: order 2 {order_two}, exchange {exchange}, presentations {pres}, Diff^2 {certified}"));
    }
    outcome(pass, notes.join("; "))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let g = NumericDiffeo::from_fn(0.0, 1.0, |x| x * x, Some(Box::new(|x| 2.0 * x))).unwrap();
    let glue = match glue_search(&g) {
        Ok(glue) => glue,
        Err(e) => return outcome(false, format!("glue failed: {e}")),
    };
    let elapsed = start.elapsed();
    let eps = glue.eps;
    let nodes: Vec<f64> = (1..GRID_CELLS).map(|i| i as f64 / GRID_CELLS as f64).collect();
    let id_ok = nodes.iter().filter(|&&x| x <= eps).all(|&x| glue.p.eval(x) == x);
    let g_ok = nodes.iter().filter(|&&x| x >= 1.0 - eps).all(|&x| glue.p.eval(x) == x * x);
    let min_dp = nodes.iter().map(|&x| glue.p.derivative(x)).fold(f64::INFINITY, f64::min);
    let mass = (glue.gamma_integral - 1.0).abs();
    outcome(
        id_ok && g_ok && min_dp > 0.0 && mass <= GAMMA_MASS_TOL && elapsed < GLUE_BUDGET,
        format!(
            "eps {eps}, p = id on (0, eps] {id_ok}, p = g on [1-eps, 1) {g_ok}, min p' {min_dp:.3e}, |∫γ - 1| {mass:.1e}, {elapsed:?}"
        ),
    )
}

fn quadratic(l: f64, r: f64) -> NumericDiffeo {
    let w = r - l;
    NumericDiffeo::from_fn(
        l,
        r,
        move |x| {
            let t = (x - l) / w;
            l + w * t * (1.0 + t) / 2.0
        },
        Some(Box::new(move |x| 0.5 + (x - l) / w)),
    )
    .unwrap()
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let images = [(0.0, 2.0), (1.0, 4.0), (3.0, 6.0), (5.0, 8.0)];
    let charts: Vec<IntervalChart> = images
        .iter()
        .enumerate()
        .map(|(i, &(l, r))| IntervalChart::identity(format!("U{i}"), l, r).unwrap())
        .collect();
    let transitions = vec![quadratic(1.0, 2.0), quadratic(3.0, 4.0), quadratic(5.0, 6.0)];
    let atlas = ChainAtlas::new(charts, transitions).unwrap();
    let tol = uniform_tolerances(CHAIN_TOL);
    let run = |order| collapse_chain(&atlas, CHAIN_K, &tol, order);
    let (ltr, mid) = match (run(CollapseOrder::LeftToRight), run(CollapseOrder::MiddleOut)) {
        (Ok(l), Ok(m)) => (l, m),
        (l, m) => return outcome(false, format!("collapse failed: {:?} / {:?}", l.err(), m.err())),
    };
    let base = ltr.cert.pass && mid.cert.pass;
    let worst = ltr.cert.max_residuals.iter().cloned().fold(0.0, f64::max);
    let refined = ltr
        .presentations
        .iter()
        .all(|t| verify_ck_numeric_refined(t, CHAIN_K, &tol, 1).is_ok_and(|c| c.pass));
    let agree = collapse_agreement(&ltr, &mid, CHAIN_K, &tol).is_ok_and(|cs| cs.iter().all(|c| c.pass));
    let elapsed = start.elapsed();
    outcome(
        base && refined && agree && elapsed < CHAIN_BUDGET,
        format!(
            "chart {:?}, certified {base} (max residual {worst:.1e}), refined x2 {refined}, left-to-right vs middle-out {agree}, {elapsed:?}",
            ltr.chart.image
        ),
    )
}

fn criterion_8() -> Outcome {
    let (code, out, _) = run_cli(&["classify", "--a", "2", "--b", "3", "--k", "1", "--json"]);
    let json: serde_json::Value = serde_json::from_str(&out).unwrap_or_default();
    let c = &json;
    let cites = c["fix_type"] == "empty" && c["ex_type"] == "empty";
    let all_empty = c["cells"].as_object().is_some_and(|m| m.values().all(|v| v == false));
    let (human_code, human, _) = run_cli(&["classify", "--a", "2", "--b", "3"]);
    let human_cites = human.contains("not diffeomorphic") && human.contains("empty");

    let dir = tempfile::tempdir().unwrap();
    let w2 = write_json(dir.path(), "w2.json", &make_wa(2.0).unwrap());
    let id = write_json(dir.path(), "id.json", &Germ::identity());
    let (scode, sout, _) = run_cli(&["structure", "same", "--h", &w2, "--g", &id, "--k", "2", "--json"]);
    let answer: serde_json::Value = serde_json::from_str(&sout).unwrap_or_default();
    let direct = same_structure(&make_wa(2.0).unwrap().into(), &Germ::identity().into(), Order::Finite(2)).unwrap();
    // g ∘ h⁻¹ = w_{1/2} and its inverse w_2: the C¹ obstruction is the slope pair (1, 2).
    let reports = [&direct.forward, &direct.inverse];
    let obstructions: Vec<_> = reports.iter().filter_map(|r| r.obstruction).collect();
    let slopes = reports.iter().any(|r| {
        r.obstruction.as_ref().is_some_and(|o| o.order == 1 && o.neg == Some(1.0) && o.pos == Some(2.0))
    });
    let verdict = direct.verdict == Verdict::False && answer["verdict"] == "false";
    outcome(
        code == 1 && human_code == 1 && cites && all_empty && human_cites && scode == 1 && verdict && slopes,
        format!(
            "classify exit {code}/{human_code}, types {}/{}, structure same exit {scode} verdict {}, obstructions {:?}",
            c["fix_type"], c["ex_type"], answer["verdict"], obstructions.iter().map(|o| (o.order, o.neg, o.pos)).collect::<Vec<_>>()
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("1 D3 double cosets", criterion_1),
        ("2 (D,±) union = wreath orbits", criterion_2),
        ("3 w_a classification grid", criterion_3),
        ("3' injectivity of a -> W_a on a >= 1", criterion_injectivity),
        ("4 sandwich jets", criterion_4),
        ("5 psi certification", criterion_5),
        ("6 glue", criterion_6),
        ("7 chain collapse", criterion_7),
        ("8 non-diffeomorphism certificate", criterion_8),
    ];
    let mut failed = 0;
    let stdout = std::io::stdout();
    for (name, check) in criteria {
        let o = check();
        failed += usize::from(!o.pass);
        let mut h = stdout.lock();
        writeln!(h, "{} criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail).unwrap();
    }
    println!("acceptance: {failed} failed");
    if failed > 0 {
        std::process::exit(1);
    }
}
