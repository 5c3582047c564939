//! Acceptance criteria, one line each. Everything runs over exact
//! rationals, so every comparison has zero tolerance.

use std::io::Write;
use std::time::{Duration, Instant};

use setopt_core::instance::{discretize_map, instance_distance_squared};
use setopt_core::solver_direct::weak_threshold;
use setopt_core::vectorizer::covering_p_bound;
use setopt_core::verifier::{
    agreement_ratios, convex_experiment, hitting_oracle, random_params, run_suite, ConvexConfig, SuiteConfig,
};
use setopt_core::{
    brute_force_vp, make_example, solve_direct, Concept, ExactInstance, ExampleParams, Rational, Scalar, Vectorizer,
    VpKind,
};

type Outcome = Result<String, String>;

/// Name, check and time limit.
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn zero() -> Rational {
    q(0, 1)
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: setopt_core::Error) -> String {
    e.to_string()
}

fn example(name: &str, params: &ExampleParams) -> Result<ExactInstance, String> {
    make_example(name, params).map_err(err)
}

fn random_finite(seed: u64) -> Result<ExactInstance, String> {
    example("random_finite", &random_params(seed, false, 8, 6))
}

fn random_polytope(seed: u64) -> Result<ExactInstance, String> {
    example("random_finite", &random_params(seed, true, 8, 6))
}

fn c1() -> Outcome {
    let inst = example("mfdvp", &ExampleParams::default())?;
    let two = solve_direct(&inst, Concept::TypeTwo, &zero()).map_err(err)?.members;
    check(two == ["0", "1", "2"], || format!("type2 = {two:?}"))?;
    let v = Vectorizer::new(&inst).map_err(err)?;
    for p in 1..=6 {
        let m = v.membership(p, &zero(), VpKind::Min).map_err(err)?;
        check(!m.is_member("0"), || format!("0 is a Min member at p={p}"))?;
    }
    let w = v.membership(2, &zero(), VpKind::Weak).map_err(err)?;
    check(w.is_member("0"), || "0 not a weak member at p=2".into())?;
    let ps = v.minimal_p(0, &zero(), VpKind::Weak).map_err(err)?.p_star();
    check(ps == Some(2), || format!("p_star = {ps:?}"))?;
    Ok("type2 = {0,1,2}; 0 outside Min for p in 1..6; p_star(0) = 2".into())
}

fn c2() -> Outcome {
    let inst = example("t_one", &ExampleParams { grid: Some(9), ..Default::default() })?;
    check(inst.len() == 9, || format!("{} grid points", inst.len()))?;
    let one = solve_direct(&inst, Concept::TypeOne, &zero()).map_err(err)?.members;
    check(one == ["0.25"], || format!("type1 = {one:?}"))?;
    let two = solve_direct(&inst, Concept::TypeTwo, &zero()).map_err(err)?.members;
    check(two == inst.labels(), || format!("type2 = {two:?}"))?;
    let x = inst.index_of("0.5").map_err(err)?;
    let cert = Vectorizer::new(&inst).map_err(err)?.decide(x, 1, &zero(), VpKind::Min).map_err(err)?;
    check(cert.is_member(), || "0.5 not a Min member at p=1".into())?;
    check(cert.tuple == vec![vec![q(1, 1), q(0, 1)]], || format!("tuple {:?}", cert.tuple))?;
    check(cert.verify(&inst, &zero(), VpKind::Min).map_err(err)?, || "tuple certificate rejected".into())?;
    Ok("type1 = {0.25}; type2 = all 9; 0.5 in Min_1 via ((1,0))".into())
}

fn c3() -> Outcome {
    let inst = example("strict_min", &ExampleParams { grid: Some(5), ..Default::default() })?;
    let labels = inst.labels();
    check(labels == ["0", "0.25", "0.5", "0.75", "1"], || format!("grid {labels:?}"))?;
    let two = solve_direct(&inst, Concept::TypeTwo, &zero()).map_err(err)?.members;
    check(two == ["0"], || format!("type2 = {two:?}"))?;
    let v = Vectorizer::new(&inst).map_err(err)?;
    for eps in [q(1, 100), q(1, 10), q(1, 1)] {
        let m = v.membership(1, &eps, VpKind::Min).map_err(err)?.members;
        check(m == labels, || format!("Min_1 at eps={eps} is {m:?}"))?;
    }
    Ok("type2 = {0}; Min_1 = full grid at eps in {0.01, 0.1, 1}".into())
}

fn c4() -> Outcome {
    let mut polys = 0;
    for (seed, polytope) in (0..50).map(|s| (s, false)).chain((0..20).map(|s| (s, true))) {
        let inst = if polytope { random_polytope(seed)? } else { random_finite(seed)? };
        let v = Vectorizer::new(&inst).map_err(err)?;
        let sp = solve_direct(&inst, Concept::Weak, &zero()).map_err(err)?.members;
        let budgets: Vec<(&str, usize)> = if polytope {
            polys += 1;
            vec![("max |ext|", inst.max_image_len())]
        } else {
            let max_min = inst
                .images
                .iter()
                .map(|img| img.min_elements(&inst.cone, false).map(|m| m.len()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(err)?
                .into_iter()
                .max()
                .unwrap_or(1);
            vec![("|decisions| - 1", (inst.len() - 1).max(1)), ("max |Min|", max_min)]
        };
        for (name, p) in budgets {
            let vp = v.membership(p, &zero(), VpKind::Weak).map_err(err)?.members;
            check(vp == sp, || format!("seed {seed} polytope={polytope} p={p} ({name}): vp {vp:?} vs sp {sp:?}"))?;
        }
    }
    Ok(format!("50 finite instances at two budgets, {polys} polytope instances"))
}

fn c5() -> Outcome {
    let mut compared = 0;
    for seed in 0..50 {
        let inst = random_finite(seed)?;
        let v = Vectorizer::new(&inst).map_err(err)?;
        for eps in [zero(), q(1, 10), q(7, 10)] {
            for p in 1..=3 {
                for kind in [VpKind::Weak, VpKind::Min] {
                    let fast = v.membership(p, &eps, kind).map_err(err)?.members;
                    let slow = brute_force_vp(&inst, p, &eps, kind).map_err(err)?.members;
                    check(fast == slow, || {
                        format!("seed {seed} p={p} eps={eps} {}: {fast:?} vs oracle {slow:?}", kind.name())
                    })?;
                    compared += 1;
                }
            }
        }
    }
    Ok(format!("{compared} membership sets equal to the brute-force oracle"))
}

fn c6() -> Outcome {
    let only = [
        "solver_direct.chain",
        "solver_direct.eps_monotone",
        "solver_direct.threshold_law",
        "solver_direct.intersection_law",
        "vectorizer.monotone_in_p_and_inclusions",
    ];
    let config = SuiteConfig::<Rational> {
        only: Some(only.iter().map(|s| s.to_string()).collect()),
        ..Default::default()
    };
    let report = run_suite(&config);
    if let Some(f) = report.hard_failures().first() {
        return Err(format!(
            "{} on {}: {}",
            f.name,
            f.instance,
            serde_json::to_string(&f.counterexample).unwrap_or_default()
        ));
    }
    let names = report.summary().len();
    check(names == only.len(), || format!("{names} check groups ran"))?;
    Ok(format!("{} checks over 70 instances", report.checks.len()))
}

fn c7() -> Outcome {
    for seed in 0..20 {
        let inst = random_finite(seed)?;
        for eps in [q(1, 10), q(1, 2)] {
            let d = discretize_map(&inst, &eps).map_err(err)?;
            let dist = instance_distance_squared(&inst, &d).map_err(err)?;
            check(dist <= eps.clone() * eps.clone(), || format!("seed {seed} eps={eps}: distance^2 = {dist}"))?;
            let sp = solve_direct(&d, Concept::Weak, &zero()).map_err(err)?.members;
            let vp = Vectorizer::new(&d)
                .and_then(|v| v.membership(d.max_image_len(), &zero(), VpKind::Weak))
                .map_err(err)?
                .members;
            check(vp == sp, || format!("seed {seed} eps={eps}: discretized vp {vp:?} vs sp {sp:?}"))?;
        }
    }
    Ok("20 instances at eps in {0.1, 0.5}".into())
}

fn c8() -> Outcome {
    let inst = example("cantor", &ExampleParams { t: 6, n: Some(8), ..Default::default() })?;
    let weak = solve_direct(&inst, Concept::Weak, &zero()).map_err(err)?;
    check(weak.is_member("1"), || "1 is not weakly minimal".into())?;
    let mut seq = Vec::new();
    for t in 3..=6 {
        let small = example("cantor", &ExampleParams { t, n: Some(t + 2), ..Default::default() })?;
        let x = small.index_of("1").map_err(err)?;
        let ps = Vectorizer::new(&small).and_then(|v| v.minimal_p(x, &zero(), VpKind::Weak)).map_err(err)?.p_star();
        let oracle = hitting_oracle(&small, x).map_err(err)?;
        check(ps == oracle, || format!("T={t}: p_star {ps:?} vs oracle {oracle:?}"))?;
        let p = ps.ok_or_else(|| format!("T={t}: 1 is never a member"))?;
        if t <= 4 {
            // definition-level confirmation on the smaller truncations
            let at = brute_force_vp(&small, p, &zero(), VpKind::Weak).map_err(err)?;
            check(at.is_member("1"), || format!("T={t}: brute force excludes 1 at p={p}"))?;
            if p > 1 {
                let below = brute_force_vp(&small, p - 1, &zero(), VpKind::Weak).map_err(err)?;
                check(!below.is_member("1"), || format!("T={t}: brute force admits 1 at p={}", p - 1))?;
            }
        }
        seq.push(p);
    }
    check(seq.windows(2).all(|w| w[0] <= w[1]), || format!("p_star by T = {seq:?}"))?;
    Ok(format!("1 weakly minimal; p_star for T = 3..6: {seq:?}"))
}

fn c9() -> Outcome {
    let gamma = q(1, 2);
    let mut tested = 0;
    for seed in 0..50 {
        let inst = random_finite(seed)?;
        let v = Vectorizer::new(&inst).map_err(err)?;
        let th = weak_threshold(&inst).map_err(err)?;
        for x in (0..inst.len()).filter(|&x| th[x] <= zero()) {
            for eps in [q(1, 2), q(1, 1)] {
                let p = covering_p_bound(&inst, x, &eps, &gamma).map_err(err)?;
                let member = v.decide(x, p, &eps, VpKind::Weak).map_err(err)?.is_member();
                check(member, || format!("seed {seed} x={} eps={eps}: not a member at p={p}", inst.decisions[x].label))?;
                tested += 1;
            }
        }
    }
    Ok(format!("{tested} (x, eps) pairs"))
}

fn c10() -> Outcome {
    let report = convex_experiment::<Rational>(&ConvexConfig { count: 10, grid: 17, n: 1, ..Default::default() });
    let ratios = agreement_ratios(&report);
    check(ratios.len() == 10, || format!("only {} instances produced", ratios.len()))?;
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let soft = report.soft_failures().len();
    Ok(format!("agreement ratios {ratios:?} (mean {mean:.4}, {soft} soft findings)"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 mfdvp golden", c1, Duration::from_secs(1)),
        ("2 type-one example on 9-point grid", c2, Duration::from_secs(2)),
        ("3 strict Min example", c3, Duration::from_secs(1)),
        ("4 budget equalities", c4, Duration::from_secs(30)),
        ("5 oracle equivalence", c5, Duration::from_secs(60)),
        ("6 inclusions, chain and threshold law", c6, Duration::from_secs(120)),
        ("7 discretization", c7, Duration::from_secs(60)),
        ("8 truncated cantor sweep", c8, Duration::from_secs(60)),
        ("9 covering bound", c9, Duration::from_secs(10)),
        ("10 convex experiment", c10, Duration::from_secs(60)),
    ];
    assert!(Rational::default_tolerance() == zero(), "exact mode must compare without tolerance");
    let mut out = std::io::stdout();
    let mut failed = 0;
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let result = run();
        let t = start.elapsed();
        let (ok, detail) = match result {
            Ok(d) if t <= limit => (true, d),
            Ok(d) => (false, format!("{d}; took longer than {limit:?}")),
            Err(e) => (false, e),
        };
        failed += usize::from(!ok);
        let _ = writeln!(
            out,
            "criterion {name}: {} ({:.2}s) {detail}",
            if ok { "PASS" } else { "FAIL" },
            t.as_secs_f64()
        );
    }
    let _ = writeln!(out, "acceptance: {} passed, {failed} failed", 10 - failed);
    let _ = out.flush();
    if failed > 0 {
        std::process::exit(1);
    }
}
