//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails or overruns its time budget.

use std::collections::{BTreeMap, BTreeSet};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use cantorval::classifier::{self, DiffSpec, SCantorSpec, TopologicalType};
use cantorval::digits::{self, DigitSet};
use cantorval::geometry::{self, CoverLimits, Membership};
use cantorval::render::parse_row;
use cantorval::verifier::{self, prop_dod_grid_check, SweepOptions};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use TopologicalType::*;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn spec(l1: u32, r1: u32, l2: u32, r2: u32, p: u32) -> DiffSpec {
    DiffSpec::new(l1, r1, l2, r2, p).unwrap()
}

fn digits_of(p: u32, d: impl IntoIterator<Item = i64>) -> DigitSet {
    DigitSet::new(p, d).unwrap()
}

fn worked_examples() -> Check {
    let mut n = 0;
    let mut check = |got: TopologicalType, want: TopologicalType, what: &str| {
        n += 1;
        ensure(got == want, || format!("{what}: got {got}, want {want}"))
    };
    check(classifier::classify(spec(1, 1, 2, 1, 4)).unwrap(), FullInterval, "(1,1,2,1,4)")?;
    check(classifier::classify(spec(2, 1, 2, 1, 4)).unwrap(), FullInterval, "(2,1,2,1,4)")?;
    check(classifier::classify(spec(1, 1, 1, 1, 4)).unwrap(), CantorSet, "(1,1,1,1,4)")?;
    check(classifier::classify(spec(3, 2, 1, 3, 7)).unwrap(), LCantorval, "(3,2,1,3,7)")?;
    check(classifier::classify(spec(1, 3, 3, 2, 7)).unwrap(), RCantorval, "(1,3,3,2,7)")?;
    check(classifier::classify_symmetric(2, 1, 5).unwrap(), FullInterval, "symmetric (2,1,5)")?;
    check(classifier::classify_symmetric(1, 1, 5).unwrap(), CantorSet, "symmetric (1,1,5)")?;
    check(classifier::kraft_classify(1, 3).unwrap(), FullInterval, "kraft (1,3)")?;
    check(classifier::kraft_classify(2, 7).unwrap(), MCantorval, "kraft (2,7)")?;

    let l_digits: Vec<i64> = (-6..=2).chain([5, 6]).collect();
    let r_digits: Vec<i64> = [-6, -5].into_iter().chain(-2..=6).collect();
    let m_digits = vec![-6, -5, -4, -1, 0, 1, 4, 5, 6];
    let a27 = classifier::a_set(SCantorSpec::new(2, 2, 7).unwrap()).unwrap();
    for (got, want, what) in [
        (spec(3, 2, 1, 3, 7).difference_digits().unwrap(), l_digits, "L digits"),
        (spec(1, 3, 3, 2, 7).difference_digits().unwrap(), r_digits, "R digits"),
        (digits::minkowski_diff(&a27, &a27).unwrap(), m_digits, "M digits"),
    ] {
        ensure(got.digits() == want.as_slice(), || format!("{what}: got {got}"))?;
    }
    Ok(format!("{} classifications and 3 digit sets exact", n))
}

fn partition_and_mirror() -> Check {
    let specs = DiffSpec::enumerate(30);
    for &s in &specs {
        let fired = classifier::conditions(s).unwrap().branches().iter().filter(|&&b| b).count();
        ensure(fired == 1, || format!("{s}: {fired} branches fire"))?;
        let t = classifier::classify(s).unwrap();
        let m = classifier::mirror(classifier::classify(s.swapped()).unwrap());
        ensure(t == m, || format!("{s}: {t} but mirrored swap gives {m}"))?;
    }
    Ok(format!("{} specs with p <= 30", specs.len()))
}

fn interval_criterion() -> Check {
    let specs = DiffSpec::enumerate(30);
    let mut full = 0;
    for &s in &specs {
        let a = classifier::a_set(s.first()).unwrap();
        let b = classifier::a_set(s.second()).unwrap();
        let d = digits::minkowski_diff(&a, &b).unwrap();
        let by_class = classifier::classify(s).unwrap() == FullInterval;
        let by_delta = d.delta().unwrap() <= 2;
        let by_ratio = digits::is_full_interval(&d).unwrap();
        let by_sets = digits::full_diff_interval(&a, &b).unwrap();
        ensure(by_class == by_delta && by_delta == by_ratio && by_ratio == by_sets, || {
            format!("{s}: classify {by_class}, delta {by_delta}, ratio {by_ratio}, sets {by_sets}")
        })?;
        full += by_class as usize;
    }
    Ok(format!("{} specs agree ({} intervals)", specs.len(), full))
}

fn block_equivalences() -> Check {
    let specs = DiffSpec::enumerate(15);
    for &s in &specs {
        let c = classifier::conditions(s).unwrap();
        let (l, r) = classifier::lr_blocks(s).unwrap();
        let p = s.p as i64;
        ensure(c.s1 == (l.len() <= 1), || format!("{s}: s1 vs |L|"))?;
        ensure(c.s1_star == l.is_empty(), || format!("{s}: s1* vs L"))?;
        ensure(c.s2 == (r.len() <= 1), || format!("{s}: s2 vs |R|"))?;
        ensure(c.s2_star == r.is_empty(), || format!("{s}: s2* vs R"))?;
        let shifted: BTreeSet<i64> = l.iter().map(|x| x + p).collect();
        let meets = r.iter().any(|x| shifted.contains(&x));
        ensure(c.s3 == meets, || format!("{s}: s3 vs R ∩ (p+L)"))?;
        let mut expect = digits::range_set(-p + 1, p - 1);
        for x in l.iter().chain(r.iter()) {
            expect.remove(&x);
        }
        let got = s.difference_digits().unwrap().to_set();
        ensure(got == expect, || format!("{s}: A-B = {got:?}, blocks give {expect:?}"))?;
    }
    Ok(format!("{} specs with p <= 15", specs.len()))
}

fn sweep_consistency() -> Check {
    let out = Command::new(env!("CARGO_BIN_EXE_cantorval"))
        .args(["sweep", "--p-max", "10", "--verify", "--base-depth", "3", "--probe-depth", "6"])
        .env_remove("CANTORVAL_INTERVAL_BUDGET")
        .output()
        .map_err(|e| e.to_string())?;
    let text = String::from_utf8_lossy(&out.stdout);
    let mut rows: Vec<serde_json::Value> =
        text.lines().map(serde_json::from_str).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let summary = rows.pop().ok_or("no output")?;
    ensure(out.status.success(), || format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)))?;
    let falses = rows.iter().filter(|r| r["consistent"] == false).count();
    let skipped = rows.iter().filter(|r| r["consistent"] == "skipped").count();
    ensure(falses == 0, || format!("{falses} false rows"))?;
    ensure(rows.len() == DiffSpec::enumerate(10).len(), || format!("{} rows", rows.len()))?;
    let tallies = &summary["summary"]["tallies"];
    for t in TopologicalType::ALL {
        ensure(tallies[t.as_str()].as_u64().unwrap_or(0) > 0, || format!("no {t} rows"))?;
    }

    // The signatures must also be able to refute: every row fails the
    // predicate of at least one other type.
    let report = verifier::sweep(10, &SweepOptions::default()).map_err(|e| e.to_string())?;
    for row in &report.rows {
        let Some(sig) = &row.signature else { continue };
        let rejected = TopologicalType::ALL
            .iter()
            .filter(|&&t| t != row.predicted && !verifier::signature_matches(t, sig))
            .count();
        ensure(rejected > 0, || format!("{}: signature matches every type", row.spec))?;
    }
    Ok(format!("{} rows, 0 false, {skipped} skipped, tallies {tallies}", rows.len()))
}

fn difference_sets(p_max: u32) -> Vec<DigitSet> {
    let mut seen = BTreeSet::new();
    DiffSpec::enumerate(p_max)
        .into_iter()
        .map(|s| s.difference_digits().unwrap())
        .filter(|d| seen.insert((d.base(), d.digits().to_vec())))
        .collect()
}

/// A few grid points `k / p^depth` strictly inside `(lo, hi)`.
fn interior_samples(lo: &BigRational, hi: &BigRational, p: u32, depth: u32, rng: &mut ChaCha8Rng) -> Vec<BigRational> {
    let scale = BigRational::from_integer(BigInt::from(p).pow(depth));
    let first: BigInt = (lo * &scale).floor().to_integer() + 1;
    let last = (hi * &scale).ceil().to_integer() - 1;
    if first > last {
        return Vec::new();
    }
    let mid = (&first + &last) / 2;
    let mut ks = vec![first.clone(), last.clone(), mid];
    let span: i64 = (&last - &first).try_into().unwrap_or(i64::MAX);
    for _ in 0..2 {
        ks.push(&first + rng.gen_range(0..=span));
    }
    ks.sort();
    ks.dedup();
    ks.into_iter().map(|k| BigRational::new(k, BigInt::from(p).pow(depth))).collect()
}

fn geometry_soundness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let limits = CoverLimits::default();
    let sets = difference_sets(7);
    let (mut gap_samples, mut cert_samples, mut propagated) = (0usize, 0usize, 0usize);
    for a in &sets {
        let p = a.base();
        let covers = geometry::covers_upto(a, 6, &limits).map_err(|e| e.to_string())?;
        for n in 0..6 {
            ensure(covers[n + 1].is_subset_of(&covers[n]), || format!("{a}: cover {} not inside cover {n}", n + 1))?;
        }
        for n in 1..=5u32 {
            for g in &covers[n as usize].gaps().gaps {
                for x in interior_samples(&g.lo, &g.hi, p, n + 2, &mut rng) {
                    let m = geometry::member(&x, a).map_err(|e| e.to_string())?;
                    ensure(!m.is_in(), || format!("{a}: {x} inside gap {g} at depth {n} is a member"))?;
                    gap_samples += 1;
                }
            }
        }
        if !geometry::has_closure_property(a) {
            continue;
        }
        for n in 1..=5u32 {
            let cert = geometry::certified_intervals(a, n).map_err(|e| e.to_string())?;
            let unit = BigRational::new(1.into(), BigInt::from(p).pow(n + 2));
            for iv in cert.intervals() {
                let mid = (&iv.lo + &iv.hi) / BigRational::from_integer(2.into());
                let below = (&mid / &unit).floor() * &unit;
                let above = &below + &unit;
                for x in [iv.lo.clone(), iv.hi.clone(), below, above] {
                    let m = geometry::member(&x, a).map_err(|e| e.to_string())?;
                    ensure(m.is_in(), || format!("{a}: {x} in certified {iv} at depth {n} is not a member"))?;
                    cert_samples += 1;
                }
            }
        }
        // Every child of a bi-obtainable cell is bi-obtainable one level down.
        let mut points: Vec<BTreeSet<BigInt>> = Vec::new();
        for n in 0..=5 {
            let pts = geometry::representable_points(a, n, &limits).map_err(|e| e.to_string())?;
            points.push(pts.into_iter().collect());
        }
        let bi = |n: usize, k: &BigInt| points[n].contains(k) && points[n].contains(&(k + 1));
        for n in 1..5usize {
            for k in &points[n] {
                if !bi(n, k) {
                    continue;
                }
                for j in 0..p {
                    let child = k * BigInt::from(p) + j;
                    ensure(bi(n + 1, &child), || format!("{a}: cell {k} at depth {n} has child {child} not bi-obtainable"))?;
                    propagated += 1;
                }
                if rng.gen_ratio(1, 50) {
                    ensure(geometry::bi_obtainable(a, k, n as u32), || format!("{a}: search disagrees at {k}"))?;
                }
            }
        }
    }
    Ok(format!(
        "{} digit sets: {gap_samples} gap samples Out, {cert_samples} certificate samples In, {propagated} child cells",
        sets.len()
    ))
}

fn grid_equality() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let limits = CoverLimits::default();
    for case in 0..200 {
        let p: u32 = rng.gen_range(3..=7);
        let q = p as i64 - 1;
        let pick = |rng: &mut ChaCha8Rng| {
            let len = rng.gen_range(1..=4);
            let set: BTreeSet<i64> = (0..len).map(|_| rng.gen_range(-q..=q)).collect();
            digits_of(p, set)
        };
        let (a, b) = (pick(&mut rng), pick(&mut rng));
        let n: u32 = rng.gen_range(1..=3);
        ensure(prop_dod_grid_check(&a, &b, n).unwrap(), || format!("case {case}: {a} - {b} at depth {n}"))?;
        let d = digits::minkowski_diff(&a, &b).unwrap();
        if d.is_within_base() {
            // The geometry engine's own point set must agree as well.
            let pts: BTreeSet<BigInt> = geometry::representable_points(&d, n, &limits).unwrap().into_iter().collect();
            let pa = geometry::representable_points(&a, n, &limits).unwrap();
            let pb = geometry::representable_points(&b, n, &limits).unwrap();
            let direct: BTreeSet<BigInt> = pa.iter().flat_map(|x| pb.iter().map(move |y| x - y)).collect();
            ensure(pts == direct, || format!("case {case}: engine disagrees for {a} - {b}"))?;
        }
    }
    Ok("200 random pairs equal".into())
}

fn membership_facts() -> Check {
    let c = digits_of(3, [0, 2]);
    ensure(geometry::member(&rat(1, 4), &c).unwrap().is_in(), || "1/4 not In".into())?;
    ensure(!geometry::member(&rat(1, 2), &c).unwrap().is_in(), || "1/2 not Out".into())?;
    let mut checked = 0;
    let mut members = 0;
    for n in 0..=5u32 {
        let den = 3i64.pow(n);
        let next_cover = geometry::cover(&c, n + 1).unwrap();
        for k in 0..=den {
            let x = rat(k, den);
            let m = geometry::member(&x, &c).unwrap();
            // k/3^n has exactly two expansions: the finite one, and
            // (k-1)/3^n followed by 222... Either may use only 0 and 2.
            let exact = geometry::representable(&c, &BigInt::from(k), n).is_some()
                || geometry::representable(&c, &BigInt::from(k - 1), n).is_some();
            ensure(m.is_in() == exact, || format!("{x}: oracle {} vs expansion {exact}", m.label()))?;
            ensure(m.is_in() == next_cover.contains(&x), || format!("{x}: oracle vs cover at depth {}", n + 1))?;
            if let Membership::In(w) = &m {
                ensure(w.value(3) == x && w.digits_in(&c), || format!("{x}: bad witness {w:?}"))?;
            }
            checked += 1;
            members += m.is_in() as usize;
        }
    }
    Ok(format!("1/4 In, 1/2 Out, {checked} triadic points agree ({members} members)"))
}

fn figure_render() -> Check {
    let golden = include_str!("golden/figure1.svg");
    let out = Command::new(env!("CARGO_BIN_EXE_cantorval"))
        .args(["render", "--digits", "-4,0,2,3,4", "--p", "5", "--steps", "2"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || "render failed".into())?;
    let svg = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    ensure(svg == golden, || "output differs from the golden file".into())?;

    let (row1, _) = parse_row(&svg, 1).ok_or("row 1 missing")?;
    let ends: BTreeSet<BigRational> = row1.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect();
    let want: BTreeSet<BigRational> = [rat(-1, 1), rat(-3, 5), rat(-1, 5), rat(1, 1)].into_iter().collect();
    ensure(ends == want, || format!("row 1 endpoints {ends:?}"))?;

    let a = digits_of(5, [-4, 0, 2, 3, 4]);
    let mut ticks_checked = 0;
    for j in 0..=2 {
        let (bars, ticks) = parse_row(&svg, j).ok_or("row missing")?;
        let expected: Vec<BigRational> = bars
            .iter()
            .flat_map(|(lo, hi)| [lo.clone(), hi.clone()])
            .filter(|e| geometry::member(e, &a).unwrap().is_in())
            .collect();
        ensure(ticks == expected, || format!("row {j}: ticks {ticks:?} vs members {expected:?}"))?;
        ticks_checked += ticks.len();
    }
    Ok(format!("byte-identical, {ticks_checked} ticks agree with member"))
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Check); 9] = [
        ("worked examples exact", Duration::from_secs(1), worked_examples),
        ("partition and mirror, p <= 30", Duration::from_secs(10), partition_and_mirror),
        ("interval criterion, p <= 30", Duration::from_secs(10), interval_criterion),
        ("block equivalences, p <= 15", Duration::from_secs(5), block_equivalences),
        ("sweep signature consistency, p <= 10", Duration::from_secs(300), sweep_consistency),
        ("geometry soundness, p <= 7", Duration::from_secs(120), geometry_soundness),
        ("difference grid equality", Duration::from_secs(30), grid_equality),
        ("membership oracle facts", Duration::from_secs(30), membership_facts),
        ("figure render golden", Duration::from_secs(30), figure_render),
    ];
    let mut failed = BTreeMap::new();
    for (i, (title, budget, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let (status, detail) = match result {
            Ok(d) if took <= budget => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; took {took:.2?}, budget {budget:?}")),
            Err(e) => ("FAIL", e),
        };
        println!("{status} criterion {}: {title} ({took:.2?}) - {detail}", i + 1);
        if status == "FAIL" {
            failed.insert(i + 1, title);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 9 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed {:?}", failed.keys().collect::<Vec<_>>());
        ExitCode::FAILURE
    }
}
