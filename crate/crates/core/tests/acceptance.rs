//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! with the measured numbers before asserting.

use std::time::Instant;

use qjoin::f2core::{gen_cross_instance, gen_f2_promise_instance, gen_promise_instance, ColumnProfile};
use qjoin::fit::fit_exponent_bootstrap;
use qjoin::joins::{bmm, bmm_cost_model, freivalds_round, mm_f2, SensingSketch};
use qjoin::qsim::{disj, disj_with_policy, optimal_iterations, CostModel, DisjOutcome, PlanPolicy, SearchState};
use qjoin::reductions::Construction;
use qjoin::{seeds, BitMatrix, BitVector, CommLedger, Direction};
use rand::seq::index::sample;
use rand::Rng;

fn verdict(criterion: u32, ok: bool, detail: &str) {
    println!("criterion {criterion}: {} {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {criterion}: {detail}");
}

fn profile(trial: u64) -> ColumnProfile {
    if trial.is_multiple_of(2) {
        ColumnProfile::Spread
    } else {
        ColumnProfile::Dense
    }
}

#[test]
fn c1_bmm_matches_boolean_oracle() {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut ok = true;
    for (cell, ell) in [8usize, 32, 64].into_iter().enumerate() {
        let (mut exact, mut spurious) = (0, 0);
        for trial in 0..100 {
            let seed = seeds::derive(1, cell as u64, trial);
            let inst = gen_promise_instance(32, 32, ell, seed).unwrap();
            let mut ledger = CommLedger::new();
            let trace = bmm(&inst, &CostModel::exact(), &mut ledger, &mut seeds::rng(seed ^ 1)).unwrap();
            let truth = inst.oracle_product();
            spurious += trace
                .product
                .ones_positions()
                .iter()
                .filter(|&&(i, j)| !truth.get(i, j))
                .count();
            exact += usize::from(&trace.product == truth);
        }
        ok &= exact >= 90 && spurious == 0;
        lines.push(format!("ℓ={ell}: {exact}/100 exact, {spurious} spurious"));
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs <= 600.0;
    verdict(1, ok, &format!("{} ({secs:.1}s)", lines.join("; ")));
}

#[test]
fn c2_mm_f2_matches_f2_oracle_with_stable_constant() {
    let mut ok = true;
    let mut constants = Vec::new();
    let mut lines = Vec::new();
    let mut cell = 0;
    for n in [64usize, 128, 256] {
        for ell in [4usize, 16, 64] {
            let (mut exact, mut bits) = (0, 0u64);
            for trial in 0..100 {
                let seed = seeds::derive(2, cell, trial);
                let inst = gen_f2_promise_instance(n, ell, seed, profile(trial)).unwrap();
                let mut ledger = CommLedger::new();
                let out = mm_f2(&inst, &mut ledger, &mut seeds::rng(seed ^ 1)).unwrap();
                exact += usize::from(&out.product == inst.oracle_product());
                bits += ledger.totals().classical_bits;
            }
            let log_n = (n as f64).log2();
            let c = bits as f64 / 100.0 / (n as f64 * (ell as f64).sqrt() * log_n * log_n);
            ok &= exact >= 90;
            constants.push(c);
            lines.push(format!("(n={n},ℓ={ell}) {exact}/100 C={c:.2}"));
            cell += 1;
        }
    }
    let max = constants.iter().cloned().fold(f64::MIN, f64::max);
    let min = constants.iter().cloned().fold(f64::MAX, f64::min);
    ok &= max / min < 2.0;
    verdict(2, ok, &format!("{}; C ratio {:.2}", lines.join(", "), max / min));
}

fn bmm_cost_cells(points: &[(usize, usize)], trials: u64) -> Vec<(f64, Vec<f64>)> {
    let model = CostModel::cost_model(1.0, 1.0, 0.0).unwrap();
    points
        .iter()
        .enumerate()
        .map(|(cell, &(n, ell))| {
            let costs = (0..trials)
                .map(|trial| {
                    let seed = seeds::derive(3, cell as u64, trial);
                    let inst = gen_cross_instance(64, n, ell, seed).unwrap();
                    let mut ledger = CommLedger::new();
                    let run = bmm_cost_model(&inst, &model, &mut ledger, &mut seeds::rng(seed ^ 1)).unwrap();
                    assert_eq!(&run.trace.product, inst.oracle_product());
                    run.totals.total() as f64
                })
                .collect();
            (0.0, costs)
        })
        .collect()
}

#[test]
fn c3_scaling_fits() {
    let mut rng = seeds::rng(3);
    let ells = [4usize, 16, 64, 256, 1024];
    let mut by_ell = bmm_cost_cells(&ells.map(|ell| (4096, ell)), 10);
    for (cell, ell) in by_ell.iter_mut().zip(ells) {
        cell.0 = ell as f64;
    }
    let fit_ell = fit_exponent_bootstrap(&by_ell, 1000, 0.95, &mut rng).unwrap();

    let ns = [256usize, 1024, 4096, 16384];
    let mut by_n = bmm_cost_cells(&ns.map(|n| (n, 256)), 10);
    for (cell, n) in by_n.iter_mut().zip(ns) {
        cell.0 = n as f64;
    }
    let fit_n = fit_exponent_bootstrap(&by_n, 1000, 0.95, &mut rng).unwrap();

    // |a| = |b| = √n, one common element
    let model = CostModel::cost_model(1.0, 1.0, 0.0).unwrap();
    let disj_cells: Vec<(f64, Vec<f64>)> = (5..=12u32)
        .map(|e| {
            let n = 1usize << (2 * e);
            let root = 1usize << e;
            let costs = (0..10)
                .map(|trial| {
                    let mut r = seeds::rng(seeds::derive(3, 100 + u64::from(e), trial));
                    let idx = sample(&mut r, n, 2 * root - 1).into_vec();
                    let a = BitVector::from_indices(n, idx[..root].iter().copied());
                    let b = BitVector::from_indices(n, idx[root - 1..].iter().copied());
                    let mut ledger = CommLedger::new();
                    let out = disj(&a, &b, &model, &mut ledger, &mut r).unwrap();
                    assert_eq!(out, DisjOutcome::Intersecting { witness: idx[root - 1] });
                    ledger.totals().total() as f64 / (n as f64).log2()
                })
                .collect();
            (n as f64, costs)
        })
        .collect();
    let fit_disj = fit_exponent_bootstrap(&disj_cells, 1000, 0.95, &mut rng).unwrap();

    let within = |slope: f64, target: f64| (slope - target).abs() <= 0.1;
    let ok = within(fit_ell.slope, 0.75) && within(fit_n.slope, 0.5) && within(fit_disj.slope, 0.25);
    let show = |f: &qjoin::fit::Fit| {
        let (lo, hi) = f.ci.unwrap();
        format!("{:.3} [{lo:.3}, {hi:.3}]", f.slope)
    };
    verdict(
        3,
        ok,
        &format!(
            "bmm vs ℓ (n=4096): {}; bmm vs n (ℓ=256): {}; disj/log n vs n: {}",
            show(&fit_ell),
            show(&fit_n),
            show(&fit_disj)
        ),
    );
}

#[test]
fn c4_grover_matches_closed_form_and_disj_witness_is_uniform() {
    let mut worst = 0.0f64;
    let n = 256;
    for size in 1..=n {
        // spread the support over [n] so it is not a prefix
        let support: Vec<usize> = (0..size).map(|i| (i * 97) % n).collect();
        let mut state = SearchState::uniform_over(n, &support).unwrap();
        for t in 0..=size {
            let marked = BitVector::from_indices(n, support[..t].iter().copied());
            let theta = (t as f64 / size as f64).sqrt().asin();
            state.reset();
            for k in 0..=50u32 {
                let expected = ((2 * k + 1) as f64 * theta).sin().powi(2);
                worst = worst.max((state.marked_probability(&marked) - expected).abs());
                state.iterate(&marked);
            }
        }
    }
    let mut ok = worst <= 1e-9;
    let mut lines = vec![format!("max |p − sin²((2k+1)θ)| = {worst:.2e}")];

    for t in [2usize, 4] {
        let mut r = seeds::rng(40 + t as u64);
        let idx = sample(&mut r, 64, 16 + 32 - t).into_vec();
        let a = BitVector::from_indices(64, idx[..16].iter().copied());
        let b = BitVector::from_indices(64, idx[16 - t..].iter().copied());
        let common = a.and(&b).unwrap().ones_vec();
        let policy = PlanPolicy::Fixed {
            iterations: optimal_iterations(16, t),
            repetitions: 1,
        };
        let mut counts = vec![0usize; t];
        for trial in 0..1000 {
            let mut ledger = CommLedger::inert();
            let out = disj_with_policy(
                &a,
                &b,
                &policy,
                &CostModel::exact(),
                &mut ledger,
                &mut seeds::rng(seeds::derive(4, t as u64, trial)),
            )
            .unwrap();
            if let DisjOutcome::Intersecting { witness } = out {
                counts[common.iter().position(|&c| c == witness).unwrap()] += 1;
            }
        }
        let hits: usize = counts.iter().sum();
        let tv = 0.5
            * counts
                .iter()
                .map(|&c| (c as f64 / hits as f64 - 1.0 / t as f64).abs())
                .sum::<f64>();
        ok &= tv < 0.1;
        lines.push(format!("t={t}: {hits}/1000 hits, TV {tv:.3}"));
    }
    verdict(4, ok, &lines.join("; "));
}

#[test]
fn c5_sparse_recovery() {
    let mut ok = true;
    let mut lines = Vec::new();
    for (n, kappa) in [(256usize, 8usize), (1024, 16)] {
        let mut rng = seeds::rng(5 + n as u64);
        let mut decoded = 0;
        for _ in 0..1000 {
            let sketch = SensingSketch::new(n, kappa, &mut rng);
            let weight = rng.gen_range(0..=kappa);
            let x = BitVector::random_with_weight(n, weight, &mut rng);
            decoded += usize::from(sketch.decode(&sketch.encode(&x).unwrap()).ok() == Some(x));
        }
        ok &= decoded > 990;
        lines.push(format!("(n={n},κ={kappa}) {decoded}/1000"));
    }
    verdict(5, ok, &lines.join(", "));
}

#[test]
fn c6_single_freivalds_round_detects_half() {
    // m = 3, AB has one nonzero column
    let a = BitMatrix::from_bools(&[&[true, false, true], &[false, true, true], &[true, true, false]]).unwrap();
    let mut b = BitMatrix::zeros(3, 3);
    b.set(0, 2, true);
    let ab = a.f2_product(&b).unwrap();
    let nonzero: Vec<usize> = (0..3).filter(|&j| !ab.column(j).is_zero()).collect();
    assert_eq!(nonzero, vec![2]);
    let mut hits = 0;
    let mut clean = true;
    for bits in 0u8..8 {
        let v = BitVector::from_bools(&[bits & 1 != 0, bits & 2 != 0, bits & 4 != 0]);
        let flagged = freivalds_round(&a, &b, &v).unwrap();
        clean &= !flagged.get(0) && !flagged.get(1);
        hits += usize::from(flagged.get(2));
    }
    verdict(6, hits == 4 && clean, &format!("{hits}/8 vectors flag the nonzero column"));
}

#[test]
fn c7_reduction_validators() {
    let mut rng = seeds::rng(7);
    let mut ok = true;
    let mut lines = Vec::new();
    for c in Construction::ALL {
        let mut passed = 0;
        for _ in 0..100 {
            let e = c.sample(&mut rng).unwrap();
            assert!(e.instance().n() <= 32);
            passed += usize::from(e.validate().is_ok() && e.decode_payload() == *e.payload());
        }
        ok &= passed == 100;
        lines.push(format!("{c} {passed}/100"));
    }
    verdict(7, ok, &lines.join(", "));
}

#[test]
fn c8_invariant_suite() {
    let model = CostModel::cost_model(1.0, 1.0, 0.0).unwrap();
    let mut failures = Vec::new();
    for seed in 0..1000u64 {
        let mut rng = seeds::rng(seeds::derive(8, 0, seed));

        // BmmTrace invariants, exact mode on a tenth of the seeds
        let ell = rng.gen_range(1..=64);
        let inst = gen_promise_instance(16, 16, ell, seed).unwrap();
        let mut ledger = CommLedger::new();
        let run = bmm_cost_model(&inst, &model, &mut ledger, &mut rng).unwrap();
        if let Err(e) = run.trace.check_invariants(inst.n(), inst.ell()) {
            failures.push(format!("seed {seed} cost model: {e}"));
        }
        if seed % 10 == 0 {
            let trace = bmm(&inst, &CostModel::exact(), &mut CommLedger::new(), &mut rng).unwrap();
            if let Err(e) = trace.check_invariants(inst.n(), inst.ell()) {
                failures.push(format!("seed {seed} exact: {e}"));
            }
        }

        // ledger additivity and monotonicity
        let mut x = CommLedger::new();
        let mut y = CommLedger::new();
        let mut last = 0;
        for i in 0..rng.gen_range(1..20) {
            let target = if i % 2 == 0 { &mut x } else { &mut y };
            let dir = if rng.gen() { Direction::AliceToBob } else { Direction::BobToAlice };
            let amount = rng.gen_range(1..1000);
            if rng.gen() {
                target.charge_bits(dir, amount, "p").unwrap();
            } else {
                target.charge_qubits(dir, amount, "q").unwrap();
            }
            if i % 2 == 0 {
                if x.totals().total() < last {
                    failures.push(format!("seed {seed}: ledger total decreased"));
                }
                last = x.totals().total();
            }
        }
        let mut joined = x.clone();
        joined.append(&y);
        if joined.totals() != x.totals() + y.totals() {
            failures.push(format!("seed {seed}: append is not additive"));
        }

        // sketch linearity
        let n = 128;
        let sketch = SensingSketch::new(n, 6, &mut rng);
        let u = BitVector::random(n, rng.gen_range(0.0..0.2), &mut rng);
        let v = BitVector::random(n, rng.gen_range(0.0..0.2), &mut rng);
        let mut sum = u.clone();
        sum.xor_assign(&v).unwrap();
        let mut lhs = sketch.encode(&u).unwrap();
        lhs.xor_assign(&sketch.encode(&v).unwrap());
        if lhs != sketch.encode(&sum).unwrap() {
            failures.push(format!("seed {seed}: sketch not linear"));
        }

        // F2 product ⊆ Boolean product
        let a = BitMatrix::random(20, 24, rng.gen_range(0.0..0.5), &mut rng);
        let b = BitMatrix::random(24, 20, rng.gen_range(0.0..0.5), &mut rng);
        let boolean = a.bool_product(&b).unwrap();
        if a.f2_product(&b).unwrap().ones_positions().iter().any(|&(i, j)| !boolean.get(i, j)) {
            failures.push(format!("seed {seed}: F2 product not dominated"));
        }
    }
    verdict(
        8,
        failures.is_empty(),
        &format!("1000 seeds, {} failures {:?}", failures.len(), failures.iter().take(5).collect::<Vec<_>>()),
    );
}
