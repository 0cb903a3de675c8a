use std::collections::BTreeMap;

use proptest::prelude::*;
use qlut_core::costs::*;
use qlut_core::layout::activation_walk;
use qlut_core::sim::noise::{enumerate_single_errors, NoiseModel};
use qlut_core::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn slope(ns: impl Iterator<Item = u32>, f: impl Fn(u32) -> f64) -> f64 {
    let (s, v): (Vec<f64>, Vec<f64>) = ns.map(|n| (2f64.powi(n as i32), f(n))).unzip();
    fit_exponent(&s, &v).unwrap().slope
}

/// Least-squares degree of a coefficient as a polynomial in log N.
fn log_degree(f: impl Fn(u32) -> f64) -> f64 {
    let (x, y): (Vec<f64>, Vec<f64>) = (8..=13).map(|n| ((n as f64).log2(), f(n).log2())).unzip();
    let (mx, my) = (x.iter().sum::<f64>() / 6.0, y.iter().sum::<f64>() / 6.0);
    x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / x.iter().map(|a| (a - mx).powi(2)).sum::<f64>()
}

#[test]
fn exact_and_formula_t_exponents_agree() {
    for fam in Family::ALL {
        let exact = slope(4..=12, |n| {
            let p = fam.params(n).unwrap();
            let c = build_lookup(&p, &DataTable::zeros(1 << n, 1), BuildOptions::default()).unwrap();
            c.count_resources(Decomposition::T7).t_count as f64
        });
        let formula = slope(4..=12, |n| t_count_formula(&fam.params(n).unwrap()));
        assert!((exact - formula).abs() <= 0.15, "{fam:?}: exact {exact} formula {formula}");
    }
}

#[test]
fn formula_exponents_by_family() {
    let t = |fam: Family| slope(10..=40, |n| t_count_formula(&fam.params(n).unwrap()));
    let q = |fam: Family| slope(10..=40, |n| qubit_count_formula(&fam.params(n).unwrap()));
    // N(1 + log N) for QROM: the log factor still shows at n ≤ 40.
    assert!((t(Family::Qrom) - 1.0).abs() < 0.15);
    assert!((t(Family::BucketBrigade) - 1.0).abs() < 1e-9);
    assert!((t(Family::Unified) - 0.75).abs() < 0.05);
    assert!((q(Family::BucketBrigade) - 1.0).abs() < 1e-3);
    assert!((q(Family::Unified) - 0.5).abs() < 0.02);
    assert!(q(Family::Qrom) < 0.1);
}

#[test]
fn unified_infidelity_exponent() {
    let s = slope(6..=16, |n| {
        general_infidelity(&Family::Unified.params(n).unwrap(), &ErrorRates::uniform(1e-3)).unwrap().total
    });
    assert!((s - 0.75).abs() <= 0.15, "{s}");
}

/// At λ = N, γ = 1 both models are polylog in N, and the SWAP, CSWAP and idle
/// coefficients have the same degree in log N. The general theorem charges one
/// long-range location per CSWAP level where the planar tree pays 3(T − 1 − ℓ).
#[test]
fn general_reduces_to_bucket_brigade_structure() {
    let r = ErrorRates::uniform(1e-3);
    let gen = |n: u32, k: RateKind| {
        general_infidelity(&ArchParams::single(1 << n, 1 << n, 1).unwrap(), &r).unwrap().coefficient(k)
    };
    let bb = |n: u32, k: RateKind| bucket_brigade_infidelity(1 << n, &r).unwrap().coefficient(k);
    for kind in [RateKind::Swap, RateKind::Cswap] {
        let (g, b) = (log_degree(|n| gen(n, kind)), log_degree(|n| bb(n, kind)));
        assert!((g - b).abs() < 0.3, "{kind:?}: {g} vs {b}");
    }
    assert!((log_degree(|n| gen(n, RateKind::LongRange)) - 1.0).abs() < 0.2);
    assert!((log_degree(|n| bb(n, RateKind::LongRange)) - 2.0).abs() < 0.3);
    for n in 1..=13 {
        let b = bucket_brigade_infidelity(1 << n, &r).unwrap();
        assert!(b.terms_by_error_type.keys().all(|k| gen(n, *k) > 0.0 || b.coefficient(*k) == 0.0));
        assert_eq!(gen(n, RateKind::Ccnot), 0.0);
        assert_eq!(gen(n, RateKind::Cnot), 1.0);
    }
    // Idle totals are polylog in both.
    assert!(log_degree(|n| gen(n, RateKind::Idle)) < 3.2);
    assert!(log_degree(|n| bb(n, RateKind::Idle)) < 3.2);
}

#[test]
fn bucket_brigade_sums() {
    let r = ErrorRates::uniform(1e-3);
    for t in 1..=12u64 {
        let s = bucket_brigade_infidelity(1 << t, &r).unwrap().survival_factors.unwrap();
        assert_eq!(s.exponent_l, (0..t).map(|l| 3 * (t - 1 - l)).sum::<u64>());
        assert_eq!(s.exponent_s, 2 * t);
        assert_eq!(s.exponent_cs, (1..=t).map(|l| 2 * l).sum::<u64>());
        let walk = activation_walk(t as u32, &vec![1; t as usize]);
        assert_eq!(s.exponent_i, walk.status_idle.iter().sum::<u64>());
        let p = (1.0 - 1e-3f64).powf((s.exponent_l + s.exponent_s + s.exponent_cs + s.exponent_i) as f64);
        assert!((s.success() - p).abs() < 1e-12);
    }
}

#[test]
fn budget_keeps_every_non_long_range_term() {
    let r = ErrorRates::uniform(1e-3);
    for (nm, l, g) in [(256u64, 16u64, 4u64), (1024, 32, 4), (1 << 16, 256, 16), (64, 64, 1), (4096, 64, 2)] {
        let p = ArchParams::single(nm, l, g).unwrap();
        let gen = general_infidelity(&p, &r).unwrap();
        for k in 0..=p.n() - p.d() {
            let b = budgeted_infidelity(&p, &r, k).unwrap();
            for kind in RateKind::ALL {
                if !matches!(kind, RateKind::LongRange | RateKind::Qubit) {
                    assert_eq!(b.coefficient(kind), gen.coefficient(kind));
                }
            }
            assert_eq!(b.coefficient(RateKind::LongRange), 0.0);
        }
    }
}

/// At k = 0 every long-range link is a GHZ chain: √λ + N/√λ + γN/λ, which
/// is N^{3/4} at λ = √N, γ = 1.
#[test]
fn budget_zero_prices_ghz_chains() {
    let r = ErrorRates::only(RateKind::Qubit, 1e-6);
    let s = slope(10..=30, |n| {
        let p = ArchParams::single(1 << n, 1 << n.div_ceil(2), 1).unwrap();
        budgeted_infidelity(&p, &r, 0).unwrap().total
    });
    assert!((s - 0.75).abs() < 0.02, "{s}");
    for (nm, l, g) in [(16u64, 4u64, 2u64), (256, 16, 4), (1024, 1024, 1), (4096, 1, 1), (1 << 20, 1024, 32)] {
        let p = ArchParams::single(nm, l, g).unwrap();
        let (nm, l, g) = (nm as f64, l as f64, g as f64);
        let want = l.sqrt() + nm / l.sqrt() + g * nm / l;
        assert_eq!(budgeted_infidelity(&p, &r, 0).unwrap().coefficient(RateKind::Qubit), want);
    }
}

#[test]
fn budget_branches_meet_at_d_prime() {
    for n in 2..=30u32 {
        for l in 0..=n {
            for g in 0..=l {
                let p = ArchParams::single(1 << n, 1 << l, 1 << g).unwrap();
                let k = p.d_prime();
                let first = budgeted_infidelity(&p, &ErrorRates::only(RateKind::Qubit, 1.0), k).unwrap().total;
                let half = 2f64.powf(-(k as f64) / 2.0);
                let (nm, lambda) = ((1u64 << n) as f64, (1u64 << l) as f64);
                let second = 2f64.powi(-(k as i32)) * nm + half * lambda.sqrt();
                let ratio = first / second;
                assert!((0.5..=2.0).contains(&ratio), "n={n} λ=2^{l} γ=2^{g}: {ratio}");
            }
        }
    }
}

#[test]
fn all_to_all_budget_is_polylog() {
    let r = ErrorRates::uniform(1e-3);
    let s = slope(16..=56, |n| {
        let p = ArchParams::single(1 << n, 1 << n, 1).unwrap();
        budgeted_infidelity(&p, &r, n).unwrap().total
    });
    assert!(s < 0.2, "{s}");
}

#[test]
fn budgeted_bucket_brigade_shrinks_with_k() {
    let r = ErrorRates::uniform(1e-3);
    let mut last = f64::INFINITY;
    for k in 0..=10 {
        let t = budgeted_bucket_brigade_infidelity(1024, &r, k).unwrap().total;
        assert!(t < last);
        last = t;
    }
    assert!(budgeted_bucket_brigade_infidelity(1024, &r, 11).is_err());
}

#[test]
fn sequential_idle_grows_quadratically_in_b() {
    let idle = |b: u64| {
        let p = ArchParams::new(16, 4, 2, b, Readout::SequentialMultiBit, 0).unwrap();
        multi_bit_infidelity(&p, &ErrorRates::only(RateKind::Idle, 1e-3)).unwrap().total
    };
    let single = general_infidelity(&ArchParams::single(16, 4, 2).unwrap(), &ErrorRates::only(RateKind::Idle, 1e-3))
        .unwrap()
        .total;
    let excess = |b: u64| idle(b) - b as f64 * single;
    let ratios: Vec<f64> = [1u64, 2, 4, 8, 16, 32].iter().map(|&b| excess(2 * b) / excess(b)).collect();
    // b = 1 has no excess; small b is dominated by the d′ and n − d offsets.
    assert!(ratios[2..].windows(2).all(|w| w[1] > w[0]), "{ratios:?}");
    assert!(ratios[5] > 3.5 && ratios[5] < 4.0, "{ratios:?}");
    let totals: Vec<f64> = [1u64, 2, 4, 8, 16, 32].iter().map(|&b| idle(2 * b) / idle(b)).collect();
    assert!(totals[1..].windows(2).all(|w| w[1] > w[0]), "{totals:?}");
}

#[test]
fn parallel_and_sequential_regression() {
    let r = ErrorRates::uniform(1e-3);
    let get = |ro| {
        let f = multi_bit_infidelity(&ArchParams::new(256, 16, 4, 4, ro, 0).unwrap(), &r).unwrap();
        (f.coefficient(RateKind::Idle), f.coefficient(RateKind::LongRange), f.total)
    };
    let (pi, pl, pt) = get(Readout::ParallelMultiBit);
    let (si, sl, st) = get(Readout::SequentialMultiBit);
    assert_eq!((pi, pl), (6400.0, 600.0));
    assert_eq!((si, sl), (6445.0, 384.0));
    assert!((pt - 7.744).abs() < 1e-9 && (st - 7.573).abs() < 1e-9);
    // The parallel fan-out's long-range terms outweigh the sequential idle excess here.
    assert!(st < pt);
    assert!(multi_bit_infidelity(&ArchParams::single(256, 16, 4).unwrap(), &r).is_err());
}

/// Exact T count over the unit-constant formula at N = 16, λ = 4, γ = 2.
#[test]
fn t_count_calibration_at_n16() {
    let p = ArchParams::single(16, 4, 2).unwrap();
    let c = build_unified_lookup(&p, &DataTable::zeros(16, 1)).unwrap();
    let rep = cost_report(&p, Some(&c), Decomposition::T7);
    assert_eq!(rep.t_count, 20.0);
    assert_eq!(rep.exact_counts.as_ref().unwrap().t_count, 224);
    assert_eq!(rep.t_calibration, Some(11.2));
    let json = serde_json::to_value(&rep).unwrap();
    assert!(json.get("tCalibration").is_some() && json.get("exponentFit").is_none());
}

/// Per-rate ratio of exhaustive harmful-location coefficients to the
/// unit-constant analytic coefficients at N = 8, λ = 4, γ = 2. The ratio is
/// not constant across rates; the gate-error coefficients are upper bounds.
#[test]
fn enumeration_against_analytic_coefficients() {
    let p = ArchParams::single(8, 4, 2).unwrap();
    let data = DataTable::new(vec![1, 0, 1, 1, 0, 0, 1, 0], 1).unwrap();
    let c = build_unified_lookup(&p, &data).unwrap();
    let table = enumerate_single_errors(&c, &NoiseModel::new(&c, ErrorRates::uniform(1e-4))).unwrap();
    let analytic = general_infidelity(&p, &ErrorRates::uniform(1e-4)).unwrap();
    let ratios: BTreeMap<RateKind, f64> =
        analytic.terms_by_error_type.keys().map(|&k| (k, table.coefficient(k) / analytic.coefficient(k))).collect();
    let want = [
        (RateKind::Idle, 26.916666666666668 / 38.0),
        (RateKind::LongRange, 2.933333333333333 / 6.0),
        (RateKind::Swap, 1.833333333333333 / 3.0),
        (RateKind::Cswap, 2.611111111111111 / 7.0),
        (RateKind::Cnot, 0.8333333333333334 / 4.0),
        (RateKind::Ccnot, 0.0),
    ];
    for (k, w) in want {
        assert!((ratios[&k] - w).abs() < 1e-9, "{k:?}: {}", ratios[&k]);
    }
    // Every (λ, γ) at n = 3 with random data.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for l in 0..=3u32 {
        for g in 0..=l {
            let p = ArchParams::single(8, 1 << l, 1 << g).unwrap();
            let c = build_unified_lookup(&p, &DataTable::random(8, 1, &mut rng)).unwrap();
            let t = enumerate_single_errors(&c, &NoiseModel::new(&c, ErrorRates::uniform(1e-4))).unwrap();
            let a = general_infidelity(&p, &ErrorRates::uniform(1e-4)).unwrap();
            for k in [RateKind::Cswap, RateKind::Cnot, RateKind::Ccnot] {
                assert!(t.coefficient(k) <= a.coefficient(k) + 1e-9, "λ=2^{l} γ=2^{g} {k:?}");
            }
        }
    }
}

#[test]
fn constants_rescale_terms() {
    let p = ArchParams::single(256, 16, 4).unwrap();
    let r = ErrorRates::uniform(1e-3);
    let f = general_infidelity(&p, &r).unwrap();
    let g = f.with_constants(&BTreeMap::from([(RateKind::Idle, 2.0)]), &r);
    assert_eq!(g.coefficient(RateKind::Idle), 2.0 * f.coefficient(RateKind::Idle));
    assert_eq!(g.coefficient(RateKind::Swap), f.coefficient(RateKind::Swap));
    assert!((g.total - f.total - 1e-3 * f.coefficient(RateKind::Idle)).abs() < 1e-12);
}

fn params() -> impl Strategy<Value = ArchParams> {
    (1u32..=20)
        .prop_flat_map(|n| (Just(n), 0..=n))
        .prop_flat_map(|(n, l)| (Just(n), Just(l), 0..=l))
        .prop_map(|(n, l, g)| ArchParams::single(1 << n, 1 << l, 1 << g).unwrap())
}

proptest! {
    #[test]
    fn totals_are_weighted_sums(p in params(), eps in prop::array::uniform7(0.0..=1.0f64)) {
        let r = RateKind::ALL.iter().zip(eps).fold(ErrorRates::zero(), |r, (k, e)| r.with(*k, e));
        let f = general_infidelity(&p, &r).unwrap();
        let sum: f64 = f.terms_by_error_type.iter().map(|(k, c)| r.get(*k) * c).sum();
        prop_assert!((f.total - sum).abs() <= 1e-9 * sum.max(1.0));
        prop_assert!(f.terms_by_error_type.values().all(|c| *c >= 0.0));
        for k in 0..=p.n() - p.d() {
            prop_assert!(budgeted_infidelity(&p, &r, k).unwrap().terms_by_error_type.values().all(|c| *c >= 0.0));
        }
    }

    #[test]
    fn budget_never_increases_the_qubit_term(p in params()) {
        let r = ErrorRates::only(RateKind::Qubit, 1e-6);
        let ts: Vec<f64> = (0..=p.n() - p.d()).map(|k| budgeted_infidelity(&p, &r, k).unwrap().total).collect();
        prop_assert!(ts.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)), "{:?}", ts);
    }
}
