//! One PASS/FAIL line per acceptance criterion; exits nonzero on any failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use qlut_core::costs::{budgeted_infidelity, fit_exponent, general_infidelity, t_count_formula, Family};
use qlut_core::layout::{
    classify_links, link_rates, locality_violations, long_range_error, mean_link_length_by_level, place_h_tree,
    LinkPolicy, LinkResource, LongRangeLink,
};
use qlut_core::sim::containment::{cnot_router_experiment, off_path_containment, ParentState};
use qlut_core::sim::noise::{enumerate_single_errors, monte_carlo_infidelity, NoiseModel, Pauli};
use qlut_core::sim::{simulate_ideal, SparseState};
use qlut_core::sweep::{run_sweep, KRule, Metric, SweepSpec};
use qlut_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn grid(n: u32) -> impl Iterator<Item = (u64, u64)> {
    (0..=n).flat_map(|l| (0..=l).map(move |g| (1u64 << l, 1u64 << g)))
}

/// Single-bit plus both multi-bit modes at b = 1 and b = 2.
fn modes() -> Vec<(Readout, u64)> {
    let mut m = vec![(Readout::SingleBit, 1)];
    for b in [1, 2] {
        m.push((Readout::ParallelMultiBit, b));
        m.push((Readout::SequentialMultiBit, b));
    }
    m
}

fn slope(ns: impl Iterator<Item = u32>, f: impl Fn(u32) -> f64) -> f64 {
    let (s, v): (Vec<f64>, Vec<f64>) = ns.map(|n| (2f64.powi(n as i32), f(n))).unzip();
    fit_exponent(&s, &v).map(|e| e.slope).unwrap_or(f64::NAN)
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit: u64) -> bool {
    elapsed.as_secs() < limit
}

fn basis_correctness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut queries = 0u64;
    let mut worst: f64 = 1.0;
    for n in 1..=4u32 {
        let nm = 1u64 << n;
        for (lambda, gamma) in grid(n) {
            for (mode, b) in modes() {
                let p = ArchParams::new(nm, lambda, gamma, b, mode, 0).map_err(|e| e.to_string())?;
                for _ in 0..10 {
                    let data = DataTable::random(nm, b as u32, &mut rng);
                    let c = build_lookup(&p, &data, BuildOptions::default()).map_err(|e| e.to_string())?;
                    for a in 0..nm {
                        let out = simulate_ideal(&c, SparseState::address(&c, a).map_err(|e| e.to_string())?)
                            .map_err(|e| e.to_string())?;
                        worst = worst.min(out.probability_of(c.outputs(), data.word(a)));
                        queries += 1;
                    }
                }
            }
        }
    }
    let t = start.elapsed();
    check(worst > 1.0 - 1e-9 && within(t, 300), format!("{queries} queries, min probability {worst:.12}, {t:.1?}"))
}

fn superposition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 1.0;
    let mut cases = 0;
    for n in 1..=3u32 {
        let nm = 1u64 << n;
        for (lambda, gamma) in grid(n) {
            for (mode, b) in modes() {
                let p = ArchParams::new(nm, lambda, gamma, b, mode, 0).map_err(|e| e.to_string())?;
                let data = DataTable::random(nm, b as u32, &mut rng);
                let c = build_uncompute(&build_lookup(&p, &data, BuildOptions::default()).map_err(|e| e.to_string())?)
                    .map_err(|e| e.to_string())?;
                let amp = Complex64::new((nm as f64).sqrt().recip(), 0.0);
                let amps: Vec<(u64, Complex64)> = (0..nm).map(|i| (i, amp)).collect();
                let out = simulate_ideal(&c, SparseState::uniform_addresses(&c).map_err(|e| e.to_string())?)
                    .map_err(|e| e.to_string())?;
                worst = worst.min(out.overlap(&SparseState::lookup_target(&c, &amps).map_err(|e| e.to_string())?));
                cases += 1;
            }
        }
    }
    check(worst > 1.0 - 1e-9, format!("{cases} circuits, min overlap {worst:.12}"))
}

fn containment() -> Outcome {
    let mut injections = 0;
    let mut harmful = 0;
    for nm in [2u64, 4, 8, 16] {
        let c = build_reference(
            ReferenceKind::BucketBrigade,
            nm,
            &DataTable::random(nm, 1, &mut ChaCha8Rng::seed_from_u64(nm)),
        )
        .map_err(|e| e.to_string())?;
        let r = off_path_containment(&c).map_err(|e| e.to_string())?;
        injections += r.injections;
        harmful += r.harmful;
    }
    let run = |p, q| cnot_router_experiment(p, q, 1).map(|o| o.harmful).map_err(|e| e.to_string());
    let superposed = run(ParentState::Plus, Pauli::Z)?;
    let basis = run(ParentState::Zero, Pauli::Z)? || run(ParentState::One, Pauli::Z)?;
    check(
        harmful == 0 && injections > 0 && superposed && !basis,
        format!(
            "{injections} off-path X/Y injections, {harmful} harmful; CNOT-router Z kickback harmful under |+>: {superposed}, under basis: {basis}"
        ),
    )
}

fn exact_counts(fam: Family, n: u32) -> ResourceCounts {
    let p = fam.params(n).expect("family parameters");
    let c = build_lookup(&p, &DataTable::zeros(1 << n, 1), BuildOptions::default()).expect("builds");
    c.count_resources(Decomposition::T7)
}

fn table_one() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for fam in Family::ALL {
        let counts: Vec<ResourceCounts> = (4..=12).map(|n| exact_counts(fam, n)).collect();
        let t = slope(4..=12, |n| counts[n as usize - 4].t_count as f64);
        let q = slope(4..=12, |n| counts[n as usize - 4].qubit_count as f64);
        let (t_want, q_want, q_fit) = match fam {
            Family::Qrom => (1.0, 0.0, slope(4..=12, |n| counts[n as usize - 4].qubit_count as f64 / n as f64)),
            Family::SelectSwapVariant => (slope(4..=12, |n| t_count_formula(&fam.params(n).unwrap())), 0.5, q),
            Family::BucketBrigade => (1.0, 1.0, q),
            Family::Unified => (0.75, 0.5, q),
        };
        ok &= (t - t_want).abs() <= 0.15 && (q_fit - q_want).abs() <= 0.15;
        let raw = if fam == Family::Qrom { format!(" (raw {q:.3}, fit on qubits/log N)") } else { String::new() };
        parts.push(format!("{fam:?} T {t:.3}/{t_want:.3} Q {q_fit:.3}/{q_want:.1}{raw}"));
    }
    let t = start.elapsed();
    ok &= within(t, 60);
    check(ok, format!("{}; {t:.1?}", parts.join("; ")))
}

fn infidelity_exponent() -> Outcome {
    let r = ErrorRates::uniform(1e-3);
    let s = slope(6..=16, |n| general_infidelity(&Family::Unified.params(n).unwrap(), &r).unwrap().total);
    check((s - 0.75).abs() <= 0.15, format!("slope {s:.3} over N = 2^6..2^16"))
}

fn k_sweep() -> Outcome {
    let dir = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance-sweep");
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut tables = Vec::new();
    for rule in KRule::ALL {
        let t = run_sweep(&SweepSpec::eighths(rule, Metric::InfidelityExponent)).map_err(|e| e.to_string())?;
        std::fs::write(dir.join(format!("{rule:?}.csv")), t.to_csv().map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        tables.push(t);
    }
    // Pointwise infidelity must never rise with k; fitted exponents get a
    // fixed slack for the finite-size fit.
    let rates = ErrorRates::uniform(1e-3);
    let mut value_rises = 0;
    for n in (16..=56u32).step_by(8) {
        for d in (0..=n).step_by(n as usize / 8) {
            for dp in (0..=n - d).step_by(n as usize / 8) {
                let nm = 1u64 << n;
                let p = ArchParams::single(nm, nm >> d, nm >> (d + dp)).unwrap();
                let v: Vec<f64> =
                    KRule::ALL.iter().map(|r| budgeted_infidelity(&p, &rates, r.k(dp)).unwrap().total).collect();
                value_rises += v.windows(2).filter(|w| w[1] > w[0]).count();
            }
        }
    }
    let (mut rise, mut sat): (f64, f64) = (0.0, 0.0);
    for i in 0..9 {
        for j in 0..9 - i {
            let col: Vec<f64> = tables.iter().filter_map(|t| t.cells[i][j]).collect();
            if col.len() != 5 {
                return Err(format!("missing cell ({i}, {j})"));
            }
            rise = col.windows(2).fold(rise, |m, w| m.max(w[1] - w[0]));
            sat = sat.max((col[2] - col[3]).abs());
        }
    }
    let corner = tables[4].cell(0.0, 1.0).unwrap_or(f64::NAN);
    check(
        tables.len() == 5 && value_rises == 0 && rise <= 1e-3 && sat < 0.1 && corner < 0.2,
        format!(
            "5 tables in {}; value rises {value_rises}, max exponent rise {rise:.1e} (slack 1e-3), saturation {sat:.4}, k=d' λ=N exponent {corner:.3}",
            dir.display()
        ),
    )
}

fn monte_carlo() -> Outcome {
    let start = Instant::now();
    let delta = 1e-4;
    let trials = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for (lambda, gamma) in [(4u64, 2u64), (8, 1)] {
        let c =
            build_unified_lookup(&ArchParams::single(8, lambda, gamma).unwrap(), &DataTable::random(8, 1, &mut rng))
                .map_err(|e| e.to_string())?;
        let placement = place_h_tree(&c).map_err(|e| e.to_string())?;
        let links = classify_links(&c, &placement, LinkPolicy::default());
        for (i, kind) in RateKind::ALL.into_iter().enumerate() {
            let rates = ErrorRates::only(kind, delta);
            let model = NoiseModel::with_link_rates(&c, rates, &link_rates(&links, &rates));
            let table = enumerate_single_errors(&c, &model).map_err(|e| e.to_string())?;
            let want = table.predicted_infidelity(kind, delta);
            let est = monte_carlo_infidelity(&c, &model, trials, 100 + i as u64).map_err(|e| e.to_string())?;
            let sigma = est.stderr.max((want / trials as f64).sqrt());
            if sigma > 0.0 {
                worst = worst.max((est.infidelity - want).abs() / sigma);
            } else if est.infidelity != want {
                worst = f64::INFINITY;
            }
            checked += 1;
        }
    }
    let t = start.elapsed();
    check(
        worst <= 3.0 && within(t, 600),
        format!("{checked} (circuit, rate) pairs, max deviation {worst:.2} sigma, {t:.1?}"),
    )
}

fn layout() -> Outcome {
    let bb = |nm: u64| build_reference(ReferenceKind::BucketBrigade, nm, &DataTable::zeros(nm, 1)).unwrap();
    let (mut max_ratio, mut violations, mut halving_breaks): (f64, usize, usize) = (0.0, 0, 0);
    for n in 1..=12 {
        let c = bb(1 << n);
        let p = place_h_tree(&c).map_err(|e| e.to_string())?;
        max_ratio = max_ratio.max(p.area() as f64 / (1u64 << n) as f64);
        violations += locality_violations(&c, &p).len();
        let means = mean_link_length_by_level(&c, &classify_links(&c, &p, LinkPolicy::default()));
        halving_breaks += (2..means.len()).filter(|&l| means[l] * 2.0 != means[l - 2]).count();
    }
    let c = bb(16);
    let p = place_h_tree(&c).map_err(|e| e.to_string())?;
    let bad = common::mismatches(&c, &p, &common::n16_cells());
    let absolute = p.coord(c.find(&common::router(0, 'i')).unwrap()) == (8, 4);
    check(
        max_ratio <= 12.0 && violations == 0 && halving_breaks == 0 && bad.is_empty() && absolute,
        format!(
            "max area/N {max_ratio:.2}, {violations} unflagged non-local gates, {halving_breaks} halving breaks, N=16 fixture mismatches {}",
            bad.len() + !absolute as usize
        ),
    )
}

fn degeneration() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut multiset = true;
    for n in 1..=5u32 {
        let nm = 1u64 << n;
        let data = DataTable::random(nm, 1, &mut rng);
        let u = build_unified_lookup(&ArchParams::single(nm, nm, 1).unwrap(), &data).map_err(|e| e.to_string())?;
        let r = build_reference(ReferenceKind::BucketBrigade, nm, &data).map_err(|e| e.to_string())?;
        multiset &= u.role_multiset() == r.role_multiset();
    }
    let mut identical = true;
    let mut clean: f64 = 1.0;
    for n in 1..=4u32 {
        let nm = 1u64 << n;
        for (lambda, gamma) in grid(n) {
            let p = ArchParams::single(nm, lambda, gamma).unwrap();
            let data = DataTable::random(nm, 1, &mut rng);
            let single = build_unified_lookup(&p, &data).map_err(|e| e.to_string())?;
            let par = build_multi_bit_parallel(&p.with_readout(Readout::ParallelMultiBit, 1).unwrap(), &data);
            let seq = build_multi_bit_sequential(&p.with_readout(Readout::SequentialMultiBit, 1).unwrap(), &data);
            for other in [par, seq] {
                let other = other.map_err(|e| e.to_string())?;
                identical &= other.qubits() == single.qubits() && other.gates() == single.gates();
            }
            if n <= 3 {
                for (mode, b) in modes() {
                    let p = ArchParams::new(nm, lambda, gamma, b, mode, 0).unwrap();
                    let data = DataTable::random(nm, b as u32, &mut rng);
                    let u =
                        build_uncompute(&build_lookup(&p, &data, BuildOptions::default()).map_err(|e| e.to_string())?)
                            .map_err(|e| e.to_string())?;
                    let amp = Complex64::new((nm as f64).sqrt().recip(), 0.0);
                    let amps: Vec<(u64, Complex64)> = (0..nm).map(|i| (i, amp)).collect();
                    let out = simulate_ideal(&u, SparseState::uniform_addresses(&u).map_err(|e| e.to_string())?)
                        .map_err(|e| e.to_string())?;
                    clean = clean.min(out.overlap(&SparseState::lookup_target(&u, &amps).map_err(|e| e.to_string())?));
                }
            }
        }
    }
    check(
        multiset && identical && clean > 1.0 - 1e-9,
        format!("bucket-brigade multiset equal: {multiset}; b=1 builders identical: {identical}; uncompute min overlap {clean:.12}"),
    )
}

fn eps_l() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut bad = 0;
    for _ in 0..1000 {
        let m = rng.random_range(1..1u64 << 20);
        let r = ErrorRates { eps_q: rng.random(), eps_f: rng.random(), ..ErrorRates::zero() };
        let e = r.derived_eps_l(m);
        let link =
            LongRangeLink { gate: 0, source: 0, target: 1, m, level: None, resource: LinkResource::DistilledBell };
        let good = e == (m as f64 * r.eps_q).min(r.eps_f)
            && e <= r.eps_f
            && r.derived_eps_l(m + 1) >= e
            && long_range_error(&link, &r) == e;
        bad += !good as u32;
    }
    check(bad == 0, format!("1000 random (m, epsQ, epsF) triples, {bad} violations"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("basis-query correctness", basis_correctness),
        ("superposition semantics", superposition),
        ("error containment", containment),
        ("T and qubit exponents", table_one),
        ("infidelity exponent", infidelity_exponent),
        ("long-range budget sweep", k_sweep),
        ("first-order Monte Carlo", monte_carlo),
        ("layout properties", layout),
        ("degeneration identities", degeneration),
        ("epsL model", eps_l),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {:>2} {name}: {detail}", i + 1);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
