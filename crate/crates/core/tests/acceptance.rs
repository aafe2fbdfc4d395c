//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. All comparisons are exact; the only
//! tolerances are the wall-clock limits below.

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use ratcoord::automaton::{test_automata, VectorNfa};
use ratcoord::genfunc::{self, GfError, RationalGF};
use ratcoord::periodic_graph::{nets, PeriodicGraph};
use ratcoord::pipeline::{self, Method, PipelineOptions, SymbolicStatus};
use ratcoord::poly::ZPoly;
use ratcoord::semilinear::{validate_decomposition, Ambiguity, LinearSet, SemilinearSet, DEFAULT_BOX_BUDGET};

const NET_LIMIT: Duration = Duration::from_secs(10);
const EXAMPLE_LIMIT: Duration = Duration::from_secs(5);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn gf(num: &[i64], den: &[i64]) -> RationalGF {
    RationalGF::from_i64s(num, den).unwrap()
}

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn ls(base: &[i64], periods: &[&[i64]]) -> LinearSet {
    LinearSet::new(base.to_vec(), periods.iter().map(|p| p.to_vec()).collect()).unwrap()
}

fn timed(limit: Duration, f: impl FnOnce() -> Result<String, String>) -> Outcome {
    let start = Instant::now();
    let detail = f()?;
    let took = start.elapsed();
    ensure(took < limit, format!("took {took:.2?}, limit {limit:?}"))?;
    Ok(format!("{detail} ({took:.2?})"))
}

fn classic_net(g: &PeriodicGraph, slope: u64, want: &RationalGF) -> Outcome {
    timed(NET_LIMIT, || {
        let seq = g.bfs_coordination(1, 50).map_err(|e| e.to_string())?;
        let expect: Vec<u64> = (0..=50u64).map(|k| if k == 0 { 1 } else { slope * k }).collect();
        ensure(seq.values() == expect, format!("bfs gave {:?}", seq.values()))?;
        let opts = PipelineOptions {
            method: Method::Both,
            depth: 40,
            ..Default::default()
        };
        let r = pipeline::pipeline_coordination_gf(g, 1, &opts).map_err(|e| e.to_string())?;
        ensure(r.gf_fit.as_ref() == Some(want), format!("fit gave {:?}", r.gf_fit))?;
        ensure(r.symbolic_status == SymbolicStatus::Ok, format!("symbolic {:?}", r.symbolic_status))?;
        ensure(r.gf_symbolic.as_ref() == Some(want), format!("symbolic gave {:?}", r.gf_symbolic))?;
        ensure(r.all_agree(), format!("agreement {:?}", r.agreement))?;
        Ok(format!("c_k = {slope}k to depth 50, both paths give {want}"))
    })
}

fn criterion_1() -> Outcome {
    classic_net(&nets::square(), 4, &gf(&[1, 2, 1], &[1, -2, 1]))
}

fn criterion_2() -> Outcome {
    classic_net(&nets::honeycomb(), 3, &gf(&[1, 1, 1], &[1, -2, 1]))
}

fn criterion_3() -> Outcome {
    timed(EXAMPLE_LIMIT, || {
        let a2 = ls(&[2, 2], &[&[2, 0], &[1, 1], &[0, 2]]);
        let witness = match a2.check_unambiguous(a2.default_radius(), DEFAULT_BOX_BUDGET) {
            Ambiguity::AmbiguousWitness(w) => w,
            other => return Err(format!("no witness: {other:?}")),
        };
        ensure(
            a2.count_representations(&witness, DEFAULT_BOX_BUDGET) == Ok(2),
            "witness does not have two representations",
        )?;

        let original = SemilinearSet::new(2, vec![LinearSet::point(vec![0, 0]), a2.clone()]).unwrap();
        let split = SemilinearSet::new(
            2,
            vec![
                LinearSet::point(vec![0, 0]),
                ls(&[2, 2], &[&[2, 0], &[0, 2]]),
                ls(&[3, 3], &[&[2, 0], &[0, 2]]),
            ],
        )
        .unwrap();
        let (lo, hi) = (vec![0, 0], vec![20, 20]);
        ensure(
            validate_decomposition(&original, &split, &lo, &hi, DEFAULT_BOX_BUDGET) == Ok(true),
            "two-part decomposition rejected on [0,20]^2",
        )?;

        let target: BTreeSet<Vec<i64>> = (2..=20i64)
            .flat_map(|a| (2..=20i64).map(move |b| vec![a, b]))
            .filter(|v| (v[0] + v[1]) % 2 == 0)
            .collect();
        let single = SemilinearSet::new(2, vec![a2]).unwrap();
        let d = single
            .disambiguate(single.default_box().1[0], DEFAULT_BOX_BUDGET)
            .map_err(|e| e.to_string())?;
        ensure(d.is_certified(), "decomposition not certified")?;
        ensure(
            d.enumerate_in_box(&lo, &hi).unwrap() == target,
            "box-20 extension differs from {a,b >= 2, a+b even}",
        )?;
        let d_full = original
            .disambiguate(original.default_box().1[0], DEFAULT_BOX_BUDGET)
            .map_err(|e| e.to_string())?;
        let mut with_origin = target.clone();
        with_origin.insert(vec![0, 0]);
        ensure(
            d_full.is_certified() && d_full.enumerate_in_box(&lo, &hi).unwrap() == with_origin,
            "decomposition of {0} u A2 wrong on box 20",
        )?;
        ensure(
            validate_decomposition(&original, &d_full, &lo, &hi, DEFAULT_BOX_BUDGET) == Ok(true),
            "computed decomposition fails validation on [0,20]^2",
        )?;
        Ok(format!("witness {witness:?}; {} certified parts", d.parts().len()))
    })
}

/// Oracle equivalence at run length 8. Soundness: every oracle vector is a
/// member. Completeness: on a copy whose last coordinate counts run length,
/// the members with length <= 8 (enumerated in a box containing all of
/// them) are exactly the oracle set.
fn criterion_4() -> Outcome {
    const L: usize = 8;
    let mut checked = 0usize;
    let mut nfas = 0usize;
    for (name, a) in test_automata() {
        ensure(
            a.num_states() <= 3 && a.distinct_transitions().len() <= 8 && a.out_dim() <= 3,
            format!("{name} exceeds the test-automaton size limits"),
        )?;
        let image = a.parikh_image().map_err(|e| format!("{name}: {e}"))?;
        let oracle = a.run_parikh_oracle(L).map_err(|e| format!("{name}: {e}"))?;
        for v in &oracle {
            ensure(image.member(v) == Ok(true), format!("{name}: oracle vector {v:?} not a member"))?;
            checked += 1;
        }

        let counted: VectorNfa = if a.transitions().iter().all(|t| t.output.last() == Some(&1)) {
            a.clone()
        } else {
            a.with_length_coordinate()
        };
        let image = counted.parikh_image().map_err(|e| format!("{name}: {e}"))?;
        let oracle = counted.run_parikh_oracle(L).map_err(|e| format!("{name}: {e}"))?;
        let m = counted
            .transitions()
            .iter()
            .flat_map(|t| t.output.iter().map(|x| x.abs()))
            .max()
            .unwrap_or(0);
        let n = counted.out_dim();
        let mut lo = vec![-(L as i64) * m; n];
        let mut hi = vec![L as i64 * m; n];
        lo[n - 1] = 0;
        hi[n - 1] = L as i64;
        let members = image.enumerate_in_box(&lo, &hi).map_err(|e| e.to_string())?;
        ensure(
            members == oracle,
            format!(
                "{name}: {} members of length <= {L}, oracle has {}",
                members.len(),
                oracle.len()
            ),
        )?;
        checked += members.len();
        nfas += 1;
    }
    Ok(format!("{nfas} automata, {checked} vectors, 0 discrepancies"))
}

fn criterion_5() -> Outcome {
    let sets: Vec<(LinearSet, usize)> = vec![
        (ls(&[0], &[&[1]]), 0),
        (ls(&[0], &[&[2]]), 0),
        (ls(&[3], &[&[5]]), 0),
        (ls(&[2, 2], &[&[2, 0]]), 0),
        (ls(&[0, 0], &[&[1, 1], &[1, -1]]), 0),
        (ls(&[0, 0, 0], &[&[1, 0, 1], &[-1, 0, 1], &[0, 1, 1]]), 2),
        (ls(&[1, -1, 0], &[&[1, 0, 1], &[0, 1, 2], &[0, 0, 3]]), 2),
        (ls(&[0, 1], &[&[2, 1], &[3, 2]]), 1),
        (ls(&[4, 0], &[&[1, 3], &[1, 5]]), 0),
        (ls(&[0, 0, 2], &[&[1, 0, 1], &[0, 1, 1], &[0, 0, 1]]), 2),
        (ls(&[5, 5], &[]), 0),
        (ls(&[1, 2, 3], &[&[2, 1, 1], &[1, 1, 2]]), 1),
    ];
    for (l, axis) in &sets {
        let s = SemilinearSet::new(l.dim(), vec![l.clone()]).unwrap();
        ensure(
            l.check_unambiguous(l.default_radius(), DEFAULT_BOX_BUDGET) == Ambiguity::Unambiguous,
            format!("{l:?} not certified unambiguous"),
        )?;
        let r = l.default_radius().max(4);
        let certified = s
            .clone()
            .certify_against(&s, &vec![-r; l.dim()], &vec![r; l.dim()], DEFAULT_BOX_BUDGET)
            .map_err(|e| e.to_string())?;
        let series = genfunc::gf_semilinear_slice(&certified, *axis)
            .map_err(|e| e.to_string())?
            .series_coeffs(29);
        let counts: Vec<BigInt> = s
            .slice_counts(*axis, 29)
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(BigInt::from)
            .collect();
        ensure(series == counts, format!("{l:?} axis {axis}: {series:?} vs {counts:?}"))?;
    }
    Ok(format!("{} linear sets, 30 coefficients each", sets.len()))
}

fn corpus_gfs() -> Vec<RationalGF> {
    let p = |k: usize| ZPoly::one_minus_power(k);
    let prod = |fs: &[usize]| fs.iter().fold(ZPoly::one(), |acc, &k| &acc * &p(k));
    vec![
        gf(&[1, 2, 1], &[1, -2, 1]),
        gf(&[1, 1, 1], &[1, -2, 1]),
        gf(&[1, 4, 1], &[1, -2, 1]),
        gf(&[1, 3, 3, 1], &[1, -3, 3, -1]),
        gf(&[1, 2, 1], &[1, -1]),
        RationalGF::one(),
        gf(&[1, 0, 0, 1], &[1, 0, -1]),
        RationalGF::new(ZPoly::one(), prod(&[1, 1, 1, 1, 1, 1])).unwrap(),
        RationalGF::new(ZPoly::one(), prod(&[1, 2, 3])).unwrap(),
        RationalGF::new(ZPoly::from_i64s(&[1, 0, 1]), prod(&[2, 4])).unwrap(),
        gf(&[1, 4, 6, 6, 3, -2], &[1, 0, -2, 0, 1]),
        gf(&[1], &[1, 1]),
        gf(&[2, -1], &[1, -3]),
        gf(&[0, 1], &[1, -1, -1]),
        gf(&[1, 0, 0, 0, 0, 0, 0, 5], &[1]),
        gf(&[1, -1, 2], &[1, -1, 1, -1, 1, -1, 1]),
    ]
}

fn criterion_6() -> Outcome {
    let corpus = corpus_gfs();
    for q in &corpus {
        ensure(q.order() <= 6, format!("{q} has order above 6"))?;
        let prefix = q.series_coeffs(39);
        let fit = genfunc::fit_rational(&prefix, 6, 5).map_err(|e| format!("{q}: {e}"))?;
        ensure(&fit == q, format!("fit of {q} gave {fit}"))?;
    }
    let mut fib = vec![0i64, 1];
    while fib.len() < 40 {
        fib.push(fib[fib.len() - 1] + fib[fib.len() - 2]);
    }
    let f = genfunc::fit_rational(&ints(&fib), 6, 5).map_err(|e| e.to_string())?;
    ensure(f == gf(&[0, 1], &[1, -1, -1]), format!("Fibonacci fit gave {f}"))?;
    ensure(
        genfunc::to_quasi_polynomial(&f) == Err(GfError::NotQuasiPolynomial),
        "Fibonacci GF accepted as quasi-polynomial",
    )?;
    Ok(format!("{} generating functions recovered; Fibonacci pole rejected", corpus.len()))
}

fn write_net(name: &str, g: &PeriodicGraph) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("ratcoord-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(format!("{name}.pg"));
    std::fs::write(&path, g.to_text()).unwrap();
    path
}

fn verify_cli(path: &std::path::Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_ratcoord"))
        .arg("verify")
        .arg(path)
        .args(["--origin", "1", "--depth", "40", "--json"])
        .output()
        .expect("run ratcoord")
}

fn criterion_7() -> Outcome {
    let corpus = nets::corpus();
    for (name, g) in &corpus {
        for origin in 1..=g.num_orbits() {
            let r = pipeline::cross_verify(
                g,
                origin,
                &PipelineOptions {
                    depth: 40,
                    ..Default::default()
                },
            )
            .map_err(|e| e.to_string())?;
            ensure(
                r.symbolic_status == SymbolicStatus::Ok,
                format!("{name} from {origin}: symbolic {:?}", r.symbolic_status),
            )?;
            let series = r.gf_symbolic.as_ref().unwrap().series_coeffs(40);
            let bfs: Vec<BigInt> = r.sequence.values().iter().map(|&v| BigInt::from(v)).collect();
            ensure(series == bfs, format!("{name} from {origin}: symbolic series differs from BFS"))?;
            ensure(r.all_agree(), format!("{name} from {origin}: {:?}", r.agreement))?;
        }
        let out = verify_cli(&write_net(name, g));
        ensure(
            out.status.code() == Some(0),
            format!("{name}: verify exited with {:?}", out.status.code()),
        )?;
    }
    Ok(format!("{} nets, every origin orbit, 40 coefficients", corpus.len()))
}

fn criterion_8() -> Outcome {
    for (name, g) in [("square", nets::square()), ("honeycomb", nets::honeycomb())] {
        let path = write_net(name, &g);
        let runs: Vec<Vec<u8>> = (0..3).map(|_| verify_cli(&path).stdout).collect();
        ensure(!runs[0].is_empty(), format!("{name}: empty report"))?;
        ensure(runs.iter().all(|r| *r == runs[0]), format!("{name}: reports differ between runs"))?;
    }
    Ok("3 runs each on square and honeycomb, byte-identical".into())
}

fn panic_message(p: &(dyn std::any::Any + Send)) -> String {
    let msg = p
        .downcast_ref::<String>()
        .cloned()
        .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_default();
    format!("panic: {msg}")
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 square lattice", criterion_1),
        ("2 honeycomb", criterion_2),
        ("3 ambiguous linear set example", criterion_3),
        ("4 Parikh oracle equivalence", criterion_4),
        ("5 formula vs enumeration", criterion_5),
        ("6 round-trip fitting", criterion_6),
        ("7 end-to-end differences law", criterion_7),
        ("8 determinism", criterion_8),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, f) in criteria {
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| Err(panic_message(&*p)));
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
