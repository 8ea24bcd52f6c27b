//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runs without the libtest harness so the lines always show.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use coopcast::algos::{
    bip, greedy_filling, grid_all_nodes, grid_coop_rows, mst_broadcast, single_transmission,
    GridCoopParams,
};
use coopcast::analysis::{
    beta_constants, check_bright, contract_disks, grid_l_condition, grid_l_condition_value,
    grid_noncoop_lower_bound, power_transfer, selected_free_disks, theorem3_ceiling, zeta_alpha,
    SamplingSpec, TransferScenario,
};
use coopcast::broadcast::{
    check_cooperative, check_noncooperative, check_with_tolerance, DeliveryMode,
};
use coopcast::convert::convert_with;
use coopcast::experiment::{
    derive_seed, linear_fit, mean_gain_by_n, run_conversion_ratio_experiment, run_experiment,
    run_grid_experiment, write_csv, ExperimentConfig, RunOptions,
};
use coopcast::net::{
    sample_placement, GridNetwork, NodeId, PlacementKind, PlacementSpec, SourceRule,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: coopcast::Error) -> String {
    e.to_string()
}

fn cfg(json: &str) -> ExperimentConfig {
    serde_json::from_str(json).expect("valid config literal")
}

fn placements(n: usize) -> [PlacementKind; 4] {
    // Grids need a square node count; use the nearest square.
    let m = ((n as f64).sqrt().round() as usize).max(2);
    [
        PlacementKind::Grid { m, d: 1.0 },
        PlacementKind::UniformDisk { n, radius: 1.0 },
        PlacementKind::Gaussian { n, sigma: 1.0 },
        PlacementKind::Clustered {
            n,
            clusters: 4,
            sigma: 0.1,
        },
    ]
}

fn c1_conversion_delivers() -> Outcome {
    let mut runs = 0;
    for (p, base) in (0..4).zip([11u64, 12, 13, 14]) {
        for n in [5usize, 10, 25, 50, 100, 200] {
            for alpha in [2.0, 2.5, 3.0, 4.0] {
                for run in 0..100 {
                    let seed = derive_seed(base, n, alpha, run);
                    let spec = PlacementSpec {
                        kind: placements(n)[p].clone(),
                        seed,
                    };
                    let net =
                        sample_placement(&spec, alpha, SourceRule::RandomUniform).map_err(err)?;
                    let coop = greedy_filling(&net);
                    ensure(
                        check_cooperative(&net, &coop).map_err(err)?.all_delivered,
                        || {
                            format!("greedy filling fails to deliver: {} n={n} alpha={alpha} seed={seed}", spec.kind.name())
                        },
                    )?;
                    let (converted, _) = convert_with(&net, &coop, false).map_err(err)?;
                    let report =
                        check_with_tolerance(&net, &converted, DeliveryMode::NonCooperative, 0.0)
                            .map_err(err)?;
                    ensure(report.all_delivered, || {
                        format!(
                            "{} n={n} alpha={alpha} seed={seed}: node {:?} not reached",
                            spec.kind.name(),
                            report.first_failure
                        )
                    })?;
                    runs += 1;
                }
            }
        }
    }
    Ok(format!("{runs} conversions deliver at tolerance 0"))
}

fn c2_ratio_ceiling_and_slope() -> Outcome {
    let ceiling_cfg = cfg(r#"{"experiment":"conversion-ratio",
        "placement":{"kind":{"type":"uniform-disk","n":2,"radius":1.0}},
        "n_values":[100,1000],"alphas":[2.0],"base_seed":21}"#);
    let sweep_cfg = cfg(r#"{"experiment":"conversion-ratio",
        "placement":{"kind":{"type":"uniform-disk","n":2,"radius":1.0}},
        "n_values":[100,200,500,1000,2000,5000,10000],"alphas":[2.0],"runs_per_point":8,"base_seed":22}"#);
    let mut all =
        run_conversion_ratio_experiment(&ceiling_cfg, RunOptions::default()).map_err(err)?;
    let sweep = run_conversion_ratio_experiment(&sweep_cfg, RunOptions::default()).map_err(err)?;
    all.extend(sweep.iter().cloned());
    let mut worst: f64 = 0.0;
    for r in &all {
        let c = theorem3_ceiling(r.n).map_err(err)?;
        ensure(r.gain <= c, || {
            format!(
                "ratio {} above ceiling {c} (n={}, seed={})",
                r.gain, r.n, r.seed
            )
        })?;
        worst = worst.max(r.gain / c);
    }
    let means = mean_gain_by_n(&sweep);
    let xs: Vec<f64> = means.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let ys: Vec<f64> = means.iter().map(|&(_, g)| g).collect();
    let fit = linear_fit(&xs, &ys).map_err(err)?;
    ensure(fit.slope <= 15.0, || format!("slope {:.3} > 15", fit.slope))?;
    Ok(format!(
        "{} runs below 127 ln n (max ratio/ceiling {worst:.4}); slope vs ln n {:.3} <= 15",
        all.len(),
        fit.slope
    ))
}

fn c3_noncoop_grid_bound() -> Outcome {
    let mut checked = 0;
    for m in 3..=15 {
        let n = m * m;
        let bound = grid_noncoop_lower_bound(n, 1.0, 2.0).map_err(err)?;
        for s in 0..n {
            let grid = GridNetwork::new(m, 1.0, 2.0, NodeId(s)).map_err(err)?;
            let net = grid.network();
            let all = grid_all_nodes(&grid);
            ensure(all.total_power() == n as f64, || {
                format!("grid_all_nodes total {} != {n}", all.total_power())
            })?;
            for (name, sched) in [
                ("bip", bip(net)),
                ("mst", mst_broadcast(net)),
                ("grid_all_nodes", all),
                ("single_transmission", single_transmission(net)),
            ] {
                ensure(
                    check_noncooperative(net, &sched)
                        .map_err(err)?
                        .all_delivered,
                    || format!("{name} does not deliver on m={m}, source {s}"),
                )?;
                ensure(sched.total_power() >= bound, || {
                    format!(
                        "{name} total {} below n/9 = {bound} on m={m}, source {s}",
                        sched.total_power()
                    )
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!(
        "{checked} schedules on m=3..15 (every source) at or above n d^2/9"
    ))
}

fn c4_l_condition_soundness() -> Outcome {
    let v20 = grid_l_condition_value(20, 1).ok_or("undefined at (20,1)")?;
    let v50 = grid_l_condition_value(50, 2).ok_or("undefined at (50,2)")?;
    ensure((v20 - 1.126).abs() < 5e-4 && v20 >= 1.0, || {
        format!("(20,1) value {v20}")
    })?;
    ensure((v50 - 0.621).abs() < 5e-4 && v50 < 1.0, || {
        format!("(50,2) value {v50}")
    })?;
    let mut pairs = 0;
    for m in 4..=64 {
        let sources = [0, m / 2, m * (m / 2) + m / 2, m * m - 1, m * (m - 1) / 3];
        for l in 1..=m {
            if !grid_l_condition(m, l) {
                continue;
            }
            pairs += 1;
            for &s in &sources {
                let grid = GridNetwork::new(m, 1.0, 2.0, NodeId(s)).map_err(err)?;
                let sched = grid_coop_rows(&grid, GridCoopParams::new(l, false)).map_err(err)?;
                ensure(
                    check_cooperative(grid.network(), &sched)
                        .map_err(err)?
                        .all_delivered,
                    || format!("m={m}, L={l}, source {s} fails"),
                )?;
            }
        }
    }
    Ok(format!(
        "anchors {v20:.4} / {v50:.4}; {pairs} (m, L) pairs satisfy the condition and all deliver"
    ))
}

fn c5_grid_log_gain() -> Outcome {
    let n_values: Vec<String> = (10..=50).map(|m: usize| (m * m).to_string()).collect();
    let c = cfg(&format!(
        r#"{{"experiment":"grid-gain","placement":{{"kind":{{"type":"grid","m":10,"d":1.0}}}},
            "n_values":[{}],"alphas":[2.0],"runs_per_point":100,"base_seed":5}}"#,
        n_values.join(",")
    ));
    let records = run_grid_experiment(
        &c,
        RunOptions {
            jobs: None,
            verify: true,
        },
    )
    .map_err(err)?;
    let means = mean_gain_by_n(&records);
    let xs: Vec<f64> = means.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let ys: Vec<f64> = means.iter().map(|&(_, g)| g).collect();
    let fit = linear_fit(&xs, &ys).map_err(err)?;
    ensure(fit.slope > 0.0 && fit.r_squared >= 0.85, || {
        format!("slope {:.4}, R^2 {:.4}", fit.slope, fit.r_squared)
    })?;
    Ok(format!(
        "{} runs; mean gain {:.3} (m=10) to {:.3} (m=50); slope {:.4}, R^2 {:.4}",
        records.len(),
        ys[0],
        ys[ys.len() - 1],
        fit.slope,
        fit.r_squared
    ))
}

fn c6_zeta() -> Outcome {
    let z9 = zeta_alpha(9, 2.0).map_err(err)?;
    let z4 = zeta_alpha(4, 2.0).map_err(err)?;
    ensure(z9 == 6.0 && z4 == 2.5, || format!("anchors {z9}, {z4}"))?;

    // Quadrupling n (doubling m) adds a roughly constant amount for alpha = 2.
    let sides = [10usize, 20, 40, 80, 160, 320, 500, 1000];
    let mut steps = Vec::new();
    for w in sides.windows(2).filter(|w| w[1] == 2 * w[0]) {
        let a = zeta_alpha(w[0] * w[0], 2.0).map_err(err)?;
        let b = zeta_alpha(w[1] * w[1], 2.0).map_err(err)?;
        steps.push(b - a);
    }
    let (lo, hi) = steps
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(l, h), &s| (l.min(s), h.max(s)));
    ensure(lo > 1.0 && hi < 10.0, || {
        format!("zeta_2 increments {steps:?}")
    })?;

    // alpha = 3: monotone, and the spread beyond n = 10^4 must stay under 0.05.
    let mut tail = Vec::new();
    for m in [100usize, 150, 200, 300, 400, 500, 600, 700, 800, 900, 1000] {
        tail.push(zeta_alpha(m * m, 3.0).map_err(err)?);
    }
    ensure(tail.windows(2).all(|w| w[1] > w[0]), || {
        "zeta_3 not monotone".into()
    })?;
    let spread = tail[tail.len() - 1] - tail[0];
    let summary = format!(
        "anchors 6 and 2.5 exact; zeta_2 per quadrupling {lo:.4}..{hi:.4}; zeta_3 from {:.4} (n=1e4) to {:.4} (n=1e6)",
        tail[0],
        tail[tail.len() - 1]
    );
    ensure(spread < 0.05, || {
        format!("{summary}; zeta_3 tail spread {spread:.4} is not < 0.05")
    })?;
    Ok(format!("{summary}; spread {spread:.4}"))
}

fn c7_beta() -> Outcome {
    let b = beta_constants(3.0, 20.0).map_err(err)?;
    let (alpha, gamma) = (3.0f64, 20.0f64);
    let displayed = 1.0
        - ((gamma / (gamma - 1.0)).powf(alpha) + 1.0)
            * (1.0 / ((alpha - 2.0) * gamma.powf(alpha - 2.0))
                * ((2.0 * gamma + 1.0) / (2.0 * gamma - 1.0)).powf(alpha));
    ensure(b.beta >= 1.0 / 3.0, || format!("beta {} < 1/3", b.beta))?;
    ensure((b.beta - (1.0 - b.beta1 - b.beta2)).abs() <= 1e-12, || {
        "identity".into()
    })?;
    ensure((b.beta - displayed).abs() <= 1e-12, || {
        format!("closed form {displayed} vs {}", b.beta)
    })?;
    Ok(format!(
        "beta(3, 20) = {:.6} (beta1 {:.6}, beta2 {:.6}); identity within 1e-12",
        b.beta, b.beta1, b.beta2
    ))
}

fn c8_brightness() -> Outcome {
    let sampling = SamplingSpec::default();
    let mut disks_checked = 0;
    for k in 0..50u64 {
        let n = 5 + (derive_seed(81, 0, 0.0, k as usize) % 46) as usize;
        for alpha in [2.0, 3.0] {
            let seed = derive_seed(80, n, alpha, k as usize);
            let kind = placements(n)[1 + (k % 3) as usize].clone();
            let net = sample_placement(
                &PlacementSpec { kind, seed },
                alpha,
                SourceRule::Fixed(NodeId(0)),
            )
            .map_err(err)?;
            let coop = greedy_filling(&net);
            let (_, trace) = convert_with(&net, &coop, false).map_err(err)?;
            let selected = selected_free_disks(&net, &trace);
            for gamma in [2.0f64, 5.0, 20.0] {
                let scale = (1.0 + 1.0 / gamma).powf(alpha);
                let contracted = contract_disks(&selected, gamma).map_err(err)?;
                for (disk, small) in trace.selected_disks().zip(&contracted) {
                    let outside: Vec<_> = coop
                        .transmitters()
                        .filter(|&(v, _)| net.dist_sq(v, disk.center) >= disk.radius_sq)
                        .map(|(v, p)| (net.position(v), scale * p))
                        .collect();
                    let spec = SamplingSpec {
                        tolerance: sampling.tolerance * scale,
                        ..sampling
                    };
                    ensure(
                        check_bright(
                            std::slice::from_ref(small),
                            &outside,
                            alpha,
                            net.threshold(),
                            &spec,
                        ),
                        || {
                            format!("dark disk around node {} (n={n}, alpha={alpha}, gamma={gamma}, seed={seed})", disk.center)
                        },
                    )?;
                    disks_checked += 1;
                }
            }
        }
    }
    Ok(format!(
        "{disks_checked} contracted disks bright over 50 networks x 2 alphas x 3 gammas"
    ))
}

fn c9_transfer_conservation() -> Outcome {
    let mut all_full = 0;
    for k in 0..100usize {
        let n = 5 + k % 60;
        let alpha = [2.0, 3.0, 4.0][k % 3];
        let gamma: f64 = [2.0, 5.0, 20.0][(k / 3) % 3];
        let seed = derive_seed(90, n, alpha, k);
        let kind = placements(n)[k % 4].clone();
        let net = sample_placement(
            &PlacementSpec { kind, seed },
            alpha,
            SourceRule::RandomUniform,
        )
        .map_err(err)?;
        let coop = greedy_filling(&net);
        let (_, trace) = convert_with(&net, &coop, false).map_err(err)?;
        let scale = (1.0 + 1.0 / gamma).powf(alpha);
        let out = power_transfer(&net, &coop, &trace, scale).map_err(err)?;
        let total = scale * coop.total_power();
        let fills: f64 = out.buckets.iter().map(|b| b.fill).sum();
        ensure(
            (total - fills - out.leftover).abs() <= 1e-9 * total.max(1.0),
            || format!("seed {seed}: {total} != {fills} + {}", out.leftover),
        )?;
        ensure(
            out.buckets
                .iter()
                .all(|b| b.fill <= b.capacity && b.fill >= 0.0),
            || format!("seed {seed}: overfull bucket"),
        )?;
        if out.scenario == TransferScenario::AllFull {
            all_full += 1;
            let caps: f64 = out.buckets.iter().map(|b| b.capacity).sum();
            ensure(total >= caps, || {
                format!("seed {seed}: all full but {total} < {caps}")
            })?;
        }
    }
    Ok(format!(
        "100 traces conserve power; {all_full} ended with every bucket full"
    ))
}

fn c10_determinism() -> Outcome {
    let configs = [
        r#"{"experiment":"gain","placement":{"kind":{"type":"uniform-disk","n":2,"radius":1.0}},
            "n_values":[50],"alphas":[3.0],"runs_per_point":2,"base_seed":1}"#,
        r#"{"experiment":"gain","placement":{"kind":{"type":"clustered","n":2,"clusters":3,"sigma":0.2}},
            "n_values":[20,40],"alphas":[2.0,4.0],"runs_per_point":5,"base_seed":7}"#,
        r#"{"experiment":"conversion-ratio","placement":{"kind":{"type":"gaussian","n":2,"sigma":1.0}},
            "n_values":[30,60],"alphas":[2.0],"runs_per_point":5,"base_seed":8}"#,
        r#"{"experiment":"grid-gain","placement":{"kind":{"type":"grid","m":2,"d":1.0}},
            "n_values":[25,100],"alphas":[2.0],"runs_per_point":5,"base_seed":9}"#,
    ];
    let mut bytes = 0;
    for text in configs {
        let c = cfg(text);
        let mut outputs = Vec::new();
        for jobs in [Some(1), Some(3)] {
            let records = run_experiment(&c, RunOptions { jobs, verify: true }).map_err(err)?;
            let mut buf = Vec::new();
            write_csv(&records, &mut buf).map_err(err)?;
            outputs.push(buf);
        }
        ensure(outputs[0] == outputs[1], || {
            format!("{} output differs between runs", c.experiment.name())
        })?;
        bytes += outputs[0].len();
    }
    Ok(format!(
        "4 configs reproduce byte for byte ({bytes} bytes), 1 vs 3 workers"
    ))
}

fn c11_low_alpha_single_hop() -> Outcome {
    let mut parts = Vec::new();
    for m in [10usize, 20, 30] {
        for s in [0, m * (m / 2) + m / 2] {
            let grid = GridNetwork::new(m, 1.0, 1.5, NodeId(s)).map_err(err)?;
            let single = single_transmission(grid.network()).total_power();
            let all = grid_all_nodes(&grid).total_power();
            ensure(single < all, || {
                format!("m={m}, source {s}: single {single} >= all {all}")
            })?;
            if s == 0 {
                parts.push(format!("m={m}: {single:.1} < {all}"));
            }
        }
    }
    Ok(format!("corner source {}", parts.join(", ")))
}

fn main() {
    let criteria: [Criterion; 11] = [
        (
            "C1",
            "converted greedy-filling schedules deliver without cooperation",
            c1_conversion_delivers,
        ),
        (
            "C2",
            "conversion ratio below 127 ln n, slope vs ln n <= 15",
            c2_ratio_ceiling_and_slope,
        ),
        (
            "C3",
            "non-cooperative grid totals at least n d^2 / 9",
            c3_noncoop_grid_bound,
        ),
        (
            "C4",
            "row spacing condition implies delivery",
            c4_l_condition_soundness,
        ),
        ("C5", "grid gain grows linearly in ln n", c5_grid_log_gain),
        ("C6", "lattice sum anchors and growth", c6_zeta),
        ("C7", "brightening constants", c7_beta),
        ("C8", "contracted selected disks are bright", c8_brightness),
        (
            "C9",
            "power transfer conserves power",
            c9_transfer_conservation,
        ),
        (
            "C10",
            "experiments are byte-for-byte reproducible",
            c10_determinism,
        ),
        (
            "C11",
            "single hop beats every-node relay at alpha = 1.5",
            c11_low_alpha_single_hop,
        ),
    ];

    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (id, title, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|p| p.eq_ignore_ascii_case(id)) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {id:<4} {title} [{secs:.1}s]: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {id:<4} {title} [{secs:.1}s]: {detail}");
            }
        }
    }
    println!("acceptance: {failed} criteria failed");
    if failed > 0 {
        std::process::exit(1);
    }
}
