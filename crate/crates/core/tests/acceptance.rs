//! The release gate: nine end-to-end checks, one verdict line each.
//! Everything here pins exact numbers; tolerances appear only where the
//! checked statement is itself about a tolerance.

use std::time::{Duration, Instant};

use num_traits::ToPrimitive;
use once_cell::sync::Lazy;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spg_core::corpus::{generate_game, run_suite, CorpusConfig, SuiteReport};
use spg_core::det::switching_strategy;
use spg_core::fixtures;
use spg_core::game::{GameGraph, VertexId};
use spg_core::markov::{build_mc, max_best_response, solve_expectations, MarkovChain};
use spg_core::optimality::{check_optimal_memoryless, exists_optimal_by_enumeration};
use spg_core::randomized::{build_rho_p, synthesize_epsilon_optimal};
use spg_core::rational::{rat, rat_int, Rational};
use spg_core::simulate::{simulate, SimConfig};
use spg_core::values::{solve_values, ExtValue};
use spg_core::analysis::graph_params;

static CORPUS: Lazy<SuiteReport> = Lazy::new(|| run_suite(&CorpusConfig::default()));

fn verdict(criterion: &str, ok: bool) {
    println!("acceptance {criterion}: {}", if ok { "pass" } else { "FAIL" });
    assert!(ok, "acceptance criterion failed: {criterion}");
}

fn fv(g: &GameGraph, sol: &spg_core::Solution, name: &str) -> ExtValue {
    sol.get(g.find(name).unwrap())
}

fn clean(report: &SuiteReport, prop: &str) -> bool {
    report.property(prop).is_some_and(|p| p.failed == 0 && p.passed > 0)
}

#[test]
fn criterion_1_two_vertex_game_values() {
    let t = Instant::now();
    let g = fixtures::fig1();
    let sol = solve_values(&g).unwrap();
    let values_ok = fv(&g, &sol, "v_Min") == ExtValue::Finite(-10)
        && fv(&g, &sol, "v_Max") == ExtValue::Finite(-10)
        && fv(&g, &sol, "smiley") == ExtValue::Finite(0);

    let dropped = fixtures::fig1_drop_max_exit();
    let sol2 = solve_values(&dropped).unwrap();
    let divergence_ok = fv(&dropped, &sol2, "v_Min") == ExtValue::MinusInf
        && fv(&dropped, &sol2, "v_Max") == ExtValue::MinusInf;

    let fast = t.elapsed() < Duration::from_secs(1);
    verdict("1 (two-vertex game values, with and without the -10 exit)", values_ok && divergence_ok && fast);
}

/// The two-state parametric chain: from s0 to s1 with probability p at
/// weight 0, exit at weight 0 otherwise; from s1 back to s0 with
/// probability q at weight -1, exit at weight -10 otherwise.
fn parametric_chain(p: &Rational, q: &Rational) -> MarkovChain {
    let one = Rational::from_integer(1.into());
    let s0 = VertexId(0);
    let s1 = VertexId(1);
    let t = VertexId(2);
    let mut row0 = vec![(s1, p.clone(), 0)];
    if *p != one {
        row0.push((t, &one - p, 0));
    }
    let mut row1 = vec![(s0, q.clone(), -1)];
    if *q != one {
        row1.push((t, &one - q, -10));
    }
    MarkovChain::new(vec![row0, row1, vec![]], vec![false, false, true]).unwrap()
}

#[test]
fn criterion_2_closed_form_chain_expectations() {
    let pairs = [(1, 3, 1, 1), (1, 2, 1, 1), (2, 3, 1, 2), (1, 5, 3, 4), (9, 10, 9, 10)];
    let mut ok = true;
    for (pn, pd, qn, qd) in pairs {
        let (p, q) = (rat(pn, pd), rat(qn, qd));
        let mc = parametric_chain(&p, &q);
        let x = solve_expectations(&mc).unwrap();
        // x(s0) = p (9q - 10) / (1 - pq), exactly.
        let expected = &p * (rat(9, 1) * &q - rat(10, 1)) / (rat(1, 1) - &p * &q);
        ok &= x.get(VertexId(0)) == Some(&expected);
    }

    // The same chain arises from the two-vertex game under rho_{1/3}, and
    // there the exact expectations are -1/2 and -3/2.
    let g = fixtures::fig1();
    let sol = solve_values(&g).unwrap();
    let s = switching_strategy(&g, &sol, 10).unwrap();
    let rho = build_rho_p(&g, &s.sigma1, &s.sigma2, &rat(1, 3)).unwrap();
    let (_, mvals) = max_best_response(&g, &rho).unwrap();
    ok &= mvals.get(g.find("v_Min").unwrap()) == Some(&rat(-1, 2));
    ok &= mvals.get(g.find("v_Max").unwrap()) == Some(&rat(-3, 2));

    verdict("2 (closed-form chain expectations at 5 rational parameter pairs)", ok);
}

#[test]
fn criterion_3_epsilon_optimal_synthesis() {
    let t = Instant::now();
    let eps = rat(1, 10);
    let mut ok = true;

    for (g, v0_name, n, dval) in
        [(fixtures::fig1(), "v_Min", 10u64, -10i64), (fixtures::fig2(), "v_2", 8, -8)]
    {
        let sol = solve_values(&g).unwrap();
        let v0 = g.find(v0_name).unwrap();
        let params = graph_params(&g, true).unwrap();
        let synth = synthesize_epsilon_optimal(&g, &sol, v0, n, &eps, &params).unwrap();
        let (_, mvals) = max_best_response(&g, &synth.strategy).unwrap();
        let mval = mvals.get(v0).unwrap();
        ok &= rat_int(dval) <= *mval && *mval <= rat_int(dval) + &eps;
    }

    let fast = t.elapsed() < Duration::from_secs(10);
    verdict("3 (epsilon-optimal synthesis within 1/10 on both example games)", ok && fast);
}

#[test]
fn criterion_4_probability_bound_constants() {
    let eps = rat(1, 10);
    let mut ok = true;

    let g2 = fixtures::fig2();
    let params2 = graph_params(&g2, true).unwrap();
    let b2 = spg_core::randomized::probability_bound(&params2, 5, 15, -8, &eps).unwrap();
    ok &= b2.a == 12 && b2.b == rat(257, 1);

    let g1 = fixtures::fig1();
    let params1 = graph_params(&g1, true).unwrap();
    let b1 = spg_core::randomized::probability_bound(&params1, 3, 10, -10, &eps).unwrap();
    ok &= b1.a == 2 && b1.b == rat(85, 1);

    verdict("4 (bound constants a=12, b=257 and a=2, b=85)", ok);
}

#[test]
fn criterion_5_conversion_dominates_on_corpus() {
    verdict(
        "5 (converted switching strategy dominates the mixed value, corpus-wide)",
        clean(&CORPUS, "conversion-dominates-expectation"),
    );
}

#[test]
fn criterion_6_epsilon_gap_on_corpus() {
    verdict(
        "6 (synthesized value within each tolerance of the game value, corpus-wide)",
        clean(&CORPUS, "epsilon-gap-within-tolerance"),
    );
}

#[test]
fn criterion_7_optimality_characterization() {
    let corpus_ok = clean(&CORPUS, "optimality-matches-brute-force");

    let g1 = fixtures::fig1();
    let no_memoryless = !check_optimal_memoryless(&g1).unwrap().exists
        && !exists_optimal_by_enumeration(&g1, 1 << 20).unwrap();

    let g3 = fixtures::fig3();
    let report = check_optimal_memoryless(&g3).unwrap();
    let sigma = report.optimal_strategy.clone().unwrap();
    let eval = spg_core::det::eval_pure_strategy(&g3, &sigma).unwrap();
    let sol3 = solve_values(&g3).unwrap();
    let optimal_ok = report.exists && g3.vertices().all(|v| eval[v.0] == sol3.get(v));

    verdict(
        "7 (optimal-memoryless decision matches brute force; examples decided)",
        corpus_ok && no_memoryless && optimal_ok,
    );
}

#[test]
fn criterion_8_structural_invariant_suites() {
    let ok = [
        "nc-strategy-verifies",
        "fake-value-bounds-conforming-payoffs",
        "nonnegative-support-cycles-use-switch-edge",
        "restricted-plays-stay-below-expectation",
        "restricted-cycles-non-positive",
        "converted-choice-is-nc",
        "mixed-strategy-reaches-targets",
        "best-response-matches-enumeration",
    ]
    .into_iter()
    .all(|p| clean(&CORPUS, p));
    verdict("8 (structural invariant suites, zero violations corpus-wide)", ok);
}

#[test]
fn criterion_9_monte_carlo_consistency() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2100);
    let mut checked = 0u32;
    let mut ok = true;
    let mut attempts = 0;
    while checked < 20 {
        attempts += 1;
        assert!(attempts < 500, "corpus should yield 20 usable chains quickly");
        let g = generate_game(&mut rng, 6, 3);
        let keep: Vec<bool> = {
            let att = spg_core::det::attractor(&g, None);
            g.vertices().map(|v| att.distance[v.0].is_some()).collect()
        };
        let Ok((pg, _)) = g.restrict(&keep) else { continue };
        let Ok(sol) = solve_values(&pg) else { continue };
        let Some(v0) = pg.vertices().find(|&v| !pg.is_target(v)) else { continue };
        if !sol.all_finite() {
            continue;
        }
        let n = (pg.n_vertices() as i64 - 1) * pg.max_abs_weight();
        let Ok(s) = switching_strategy(&pg, &sol, n.unsigned_abs() + 1) else { continue };
        let Ok(rho) = build_rho_p(&pg, &s.sigma1, &s.sigma2, &rat(1, 2)) else { continue };
        let Ok((tau, mvals)) = max_best_response(&pg, &rho) else { continue };
        let mc = build_mc(&pg, &rho, &tau).unwrap();

        let cfg = SimConfig { seed: 1000 + u64::from(checked), episodes: 100_000, step_cap: 10_000 };
        let report = simulate(&mc, v0, &cfg);
        let again = simulate(&mc, v0, &cfg);
        ok &= report == again
            && report.mean_tp.to_bits() == again.mean_tp.to_bits()
            && report.stderr.to_bits() == again.stderr.to_bits();

        let exact = mvals.get(v0).unwrap().to_f64().unwrap();
        ok &= (report.mean_tp - exact).abs() <= 4.0 * report.stderr;
        ok &= report.truncated == 0 && report.reach_fraction == 1.0;
        checked += 1;
    }
    let fast = t.elapsed() < Duration::from_secs(30);
    verdict("9 (Monte-Carlo agrees with exact expectations, reproducibly)", ok && fast);
}
