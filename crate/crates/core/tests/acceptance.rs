//! Acceptance suite. Runs every criterion at its stated size and tolerance,
//! prints one PASS/FAIL line each and exits nonzero if any fails.
//!
//! Reference values are recomputed here from first principles rather than
//! taken from the library.

use std::process::ExitCode;
use std::time::Instant;

use assign3d::axial::{
    axial_lower_bound, count_latin_squares, dfm_bound, exact_axial, greedy_axial,
};
use assign3d::bilinear::{
    bilinear_heuristic, bilinear_step_y, bilinear_step_z, bilinear_value, Direction,
};
use assign3d::matching::{brute_force_assignment, solve_assignment, BipartiteCosts};
use assign3d::perm::for_each_permutation;
use assign3d::planar::{
    bdapta, exact_planar, greedy_phase, is_complete_planar, lower_bound_rowmin,
    lower_bound_rowmin_streaming, make_schedule, Mode, PlanarOptions,
};
use assign3d::CostTensor;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn inverse_square_sum(n: usize) -> f64 {
    // Summed smallest term first.
    (1..=n).rev().map(|i| 1.0 / (i as f64 * i as f64)).sum()
}

fn matrix(t: &CostTensor) -> BipartiteCosts {
    BipartiteCosts::new(t.n(), t.pristine().to_vec()).unwrap()
}

fn matching_exactness() -> Outcome {
    let mut worst = 0.0f64;
    let mut bad = 0;
    for n in 2..=7 {
        for seed in 0..500 {
            let bc = matrix(&CostTensor::generate(n, 2, seed).unwrap());
            let fast = solve_assignment(&bc).unwrap();
            let slow = brute_force_assignment(&bc).unwrap();
            let rel = (fast.cost - slow.cost).abs() / slow.cost.max(f64::MIN_POSITIVE);
            worst = worst.max(rel);
            let same = fast.assignment == slow.assignment;
            if (same && fast.cost != slow.cost) || rel > 1e-9 {
                bad += 1;
            }
        }
    }
    outcome(
        bad == 0,
        format!("3000 instances, {bad} mismatches, worst relative gap {worst:.1e}"),
    )
}

fn parisi_reference() -> Outcome {
    let costs: Vec<f64> = (0..1000)
        .map(|seed| {
            solve_assignment(&matrix(&CostTensor::generate(20, 2, seed).unwrap()))
                .unwrap()
                .cost
        })
        .collect();
    let (mean, se) = mean_se(&costs);
    let reference = inverse_square_sum(20);
    let z = (mean - reference) / se;
    outcome(
        z.abs() <= 3.0,
        format!("mean {mean:.5} vs {reference:.5}, SE {se:.5}, z = {z:.2}"),
    )
}

fn axial_sandwich() -> Outcome {
    let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [20usize, 40, 80] {
        let (mut greedy, mut lower) = (Vec::new(), Vec::new());
        let mut below = 0;
        for seed in 0..100 {
            let t = CostTensor::generate(n, 3, seed).unwrap();
            let sol = greedy_axial(&t).unwrap();
            let lb = axial_lower_bound(&t).unwrap();
            if !sol.is_latin() || sol.total_cost < lb {
                below += 1;
            }
            greedy.push(sol.total_cost);
            lower.push(lb);
        }
        let (g, _) = mean_se(&greedy);
        let (l, _) = mean_se(&lower);
        let harmonic: f64 = (1..=n).map(|i| 1.0 / i as f64).sum();
        let dfm = 2.0 * n as f64 * harmonic;
        let ratio = g / (n as f64 * (n as f64).ln());
        let ok =
            below == 0 && l >= 0.9 * zeta2 * n as f64 && g <= dfm && (0.5..=2.5).contains(&ratio);
        pass &= ok && (dfm - dfm_bound(n)).abs() < 1e-9 * dfm;
        parts.push(format!(
            "n={n}: greedy {g:.2} <= {dfm:.2}, lb {l:.2}, ratio {ratio:.3}, violations {below}"
        ));
    }
    outcome(pass, parts.join("; "))
}

fn axial_oracle() -> Outcome {
    let squares = count_latin_squares(4);
    let mut bad = 0;
    for seed in 0..200 {
        let t = CostTensor::generate(4, 3, seed).unwrap();
        let g = greedy_axial(&t).unwrap().total_cost;
        let e = exact_axial(&t).unwrap().total_cost;
        if g < e - 1e-12 {
            bad += 1;
        }
    }
    outcome(
        squares == 576 && bad == 0,
        format!("{squares} Latin squares of order 4, {bad} dominance violations"),
    )
}

fn greedy_budget() -> Outcome {
    let n = 100;
    let sched = make_schedule(n, 1).unwrap();
    let bound = 2.0 * (n as f64).powf(-2.0 / 3.0);
    let mut z1 = Vec::new();
    let mut flagged = Vec::new();
    for seed in 0..100 {
        let t = CostTensor::generate(n, 3, seed).unwrap();
        let (state, cost) = greedy_phase(&t, &sched);
        assert_eq!(state.len(), 78);
        if cost > 1.5 * bound {
            flagged.push(seed);
        }
        z1.push(cost);
    }
    let (mean, _) = mean_se(&z1);
    outcome(
        mean <= bound,
        format!("mean Z1 {mean:.4} <= {bound:.4}; runs above 1.5x (flagged): {flagged:?}"),
    )
}

fn planar_validity() -> Outcome {
    let check = |n: usize, seeds: u64| {
        let mut bad = 0;
        for seed in 0..seeds {
            let t = CostTensor::generate(n, 3, seed).unwrap();
            let r = bdapta(&t, &PlanarOptions::default()).unwrap();
            let exact = exact_planar(&t).unwrap().cost;
            let recomputed: f64 = r
                .triples
                .iter()
                .map(|&[i, j, k]| t.pristine3(i, j, k))
                .sum();
            let ok = r.complete
                && is_complete_planar(n, &r.triples)
                && (recomputed - r.true_cost).abs() <= 1e-12
                && r.true_cost >= exact - 1e-12
                && r.true_cost >= lower_bound_rowmin(&t) - 1e-12;
            if !ok {
                bad += 1;
            }
        }
        bad
    };
    // n = 6 has no schedule and is answered exactly; n = 8 exercises all phases.
    let small = check(6, 200);
    let scheduled = check(8, 50);
    outcome(
        small == 0 && scheduled == 0,
        format!("n=6: {small}/200 failures; n=8 (all phases run): {scheduled}/50 failures"),
    )
}

fn planar_scaling() -> Outcome {
    let ns = [30usize, 60, 120, 240];
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    let mut pass = true;
    let mut parts = Vec::new();
    for &n in &ns {
        let (mut costs, mut lbs) = (Vec::new(), Vec::new());
        let mut incomplete = 0;
        for seed in 0..50 {
            let t = CostTensor::generate(n, 3, seed).unwrap();
            let r = bdapta(
                &t,
                &PlanarOptions {
                    mode: Mode::Empirical,
                    ..Default::default()
                },
            )
            .unwrap();
            incomplete += usize::from(!r.complete);
            costs.push(r.true_cost);
            lbs.push(lower_bound_rowmin(&t));
        }
        let (c, _) = mean_se(&costs);
        let (l, _) = mean_se(&lbs);
        let nf = n as f64;
        let upper = 50.0 * 2.0 * nf.powf(-2.0 / 3.0) * nf.ln();
        pass &= incomplete == 0 && l <= c && c <= upper;
        parts.push(format!("n={n}: {c:.4} in [{l:.4}, {upper:.2}]"));
        xs.push(nf.ln());
        ys.push(c.ln());
    }
    let s = slope(&xs, &ys);
    pass &= (-1.15..=-0.55).contains(&s);
    outcome(
        pass,
        format!("slope {s:.3} in [-1.15, -0.55]; {}", parts.join("; ")),
    )
}

fn refresh_accounting() -> Outcome {
    let n = 60;
    let mut pass = true;
    let mut worst_gap = f64::NEG_INFINITY;
    let mut budget_ok = 0;
    let mut zero_escalation = 0;
    for seed in 0..20 {
        let t = CostTensor::generate(n, 3, seed).unwrap();
        let r = bdapta(
            &t,
            &PlanarOptions {
                mode: Mode::Refresh,
                ..Default::default()
            },
        )
        .unwrap();
        let w = r.ledger_offset;
        let ledger_bound = r.selection_cost + r.triples.len() as f64 * w;
        worst_gap = worst_gap.max(r.true_cost - ledger_bound);
        pass &= r.complete && r.true_cost <= ledger_bound + 1e-9;
        pass &= r.true_cost <= r.output_bound_cost + 1e-9;
        // The round budget assumes every augmentation stays under its
        // round threshold; escalated runs are exempt.
        if r.main.escalations == 0 {
            zero_escalation += 1;
            if r.main.bound_cost <= r.main_budget + 1e-9 {
                budget_ok += 1;
            }
        }
    }
    pass &= budget_ok == zero_escalation;
    outcome(
        pass,
        format!(
            "max(true - ledger bound) = {worst_gap:.3e}; main-phase budget met on {budget_ok}/{zero_escalation} runs without escalation"
        ),
    )
}

fn bilinear() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [5usize, 50] {
        let id: Vec<usize> = (0..n).collect();
        let (mut converged, mut monotone, mut dominated) = (0, 0, 0);
        for seed in 0..100 {
            let t = CostTensor::generate(n, 3, seed).unwrap();
            let r = bilinear_heuristic(&t, &id, &id, 100, Direction::Minimize).unwrap();
            converged += usize::from(r.converged);
            monotone += usize::from(r.trace.windows(2).all(|w| w[1] <= w[0]));
            if n == 5 && r.pair.value >= exact_planar(&t).unwrap().cost - 1e-12 {
                dominated += 1;
            }
        }
        pass &= monotone == 100 && converged >= 99 && (n != 5 || dominated == 100);
        parts.push(format!(
            "n={n}: monotone {monotone}/100, converged {converged}/100"
        ));
        if n == 5 {
            parts.push(format!("n=5 above exact {dominated}/100"));
        }
    }
    let mut step_bad = 0;
    for seed in 0..100 {
        let t = CostTensor::generate(4, 3, seed).unwrap();
        let mut fixed: Vec<usize> = vec![0, 1, 2, 3];
        fixed.rotate_left((seed % 4) as usize);
        let (mut best_y, mut best_z) = (f64::INFINITY, f64::INFINITY);
        for_each_permutation(4, |p| {
            best_y = best_y.min(bilinear_value(&t, p, &fixed));
            best_z = best_z.min(bilinear_value(&t, &fixed, p));
        });
        let y = bilinear_step_y(&t, &fixed, Direction::Minimize).unwrap();
        let z = bilinear_step_z(&t, &fixed, Direction::Minimize).unwrap();
        if bilinear_value(&t, &y, &fixed) != best_y || bilinear_value(&t, &fixed, &z) != best_z {
            step_bad += 1;
        }
    }
    pass &= step_bad == 0;
    parts.push(format!("n=4 inner steps off brute force on {step_bad}/100"));
    outcome(pass, parts.join("; "))
}

fn generic_d_bound() -> Outcome {
    let (n, d) = (20, 4);
    let xs: Vec<f64> = (0..500)
        .map(|seed| lower_bound_rowmin_streaming(n, d, seed).unwrap())
        .collect();
    let (mean, se) = mean_se(&xs);
    // n slice minima, each Exp(n^{d-1}): mean n^{-(d-2)} = 1/400 here.
    let reference = (n as f64).powi(-(d as i32 - 2));
    let z = (mean - reference) / se;
    outcome(
        z.abs() <= 3.0,
        format!("mean {mean:.6} vs n^-(d-2) = {reference}, SE {se:.6}, z = {z:.2}"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("matching exactness", matching_exactness),
        ("2D mean at n=20", parisi_reference),
        ("axial sandwich", axial_sandwich),
        ("axial oracle dominance", axial_oracle),
        ("greedy-phase budget", greedy_budget),
        ("planar validity and dominance", planar_validity),
        ("planar scaling", planar_scaling),
        ("refresh accounting", refresh_accounting),
        ("bilinear heuristic", bilinear),
        ("row-minimum bound at d=4", generic_d_bound),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = (i + 1).to_string();
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {id:>2} {status} {name} ({:.1}s): {}",
            start.elapsed().as_secs_f64(),
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
