use num_complex::Complex64;
use qlut_core::sim::{classical_output, simulate_gates, simulate_ideal, SparseState};
use qlut_core::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn modes() -> [(Readout, u64); 3] {
    [(Readout::SingleBit, 1), (Readout::ParallelMultiBit, 2), (Readout::SequentialMultiBit, 2)]
}

/// Every (λ, γ) with γ ≤ λ ≤ N = 2^n.
fn grid(n: u32) -> impl Iterator<Item = (u64, u64)> {
    (0..=n).flat_map(|l| (0..=l).map(move |g| (1u64 << l, 1u64 << g)))
}

#[test]
fn basis_queries_return_the_table_entry() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=4u32 {
        let nm = 1u64 << n;
        for (lambda, gamma) in grid(n) {
            for (mode, b) in modes() {
                let p = ArchParams::new(nm, lambda, gamma, b, mode, 0).unwrap();
                for _ in 0..20 {
                    let data = DataTable::random(nm, b as u32, &mut rng);
                    let c = build_lookup(&p, &data, BuildOptions::default()).unwrap();
                    c.check_layer_disjointness().unwrap();
                    for a in 0..nm {
                        assert_eq!(classical_output(&c, a), data.word(a), "n={n} λ={lambda} γ={gamma} {mode:?} a={a}");
                    }
                }
            }
        }
    }
}

#[test]
fn merged_routers_are_equivalent() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for (lambda, gamma) in grid(4) {
        let p = ArchParams::single(16, lambda, gamma).unwrap();
        let data = DataTable::random(16, 1, &mut rng);
        let c = build_lookup(&p, &data, BuildOptions { merged_router: true }).unwrap();
        for a in 0..16 {
            assert_eq!(classical_output(&c, a), data.word(a));
        }
    }
}

#[test]
fn state_vector_matches_basis_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let p = ArchParams::single(4, 2, 1).unwrap();
    let data = DataTable::random(4, 1, &mut rng);
    let c = build_unified_lookup(&p, &data).unwrap();
    for a in 0..4 {
        let out = simulate_ideal(&c, SparseState::address(&c, a).unwrap()).unwrap();
        assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
        assert!(out.probability_of(c.outputs(), data.word(a)) > 1.0 - 1e-12);
    }
}

#[test]
fn superposed_queries_produce_the_lookup_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for n in 1..=3u32 {
        let nm = 1u64 << n;
        for (lambda, gamma) in grid(n) {
            for (mode, b) in modes() {
                let p = ArchParams::new(nm, lambda, gamma, b, mode, 0).unwrap();
                let data = DataTable::random(nm, b as u32, &mut rng);
                let c = build_uncompute(&build_lookup(&p, &data, BuildOptions::default()).unwrap()).unwrap();
                // Non-uniform complex amplitudes catch relative-phase mistakes.
                let raw: Vec<Complex64> =
                    (0..nm).map(|i| Complex64::from_polar(1.0 + i as f64, 0.7 * i as f64)).collect();
                let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                let amps: Vec<(u64, Complex64)> = raw.iter().enumerate().map(|(i, z)| (i as u64, z / norm)).collect();
                let out = simulate_ideal(&c, SparseState::address_superposition(&c, &amps).unwrap()).unwrap();
                let want = SparseState::lookup_target(&c, &amps).unwrap();
                let ov = out.overlap(&want);
                assert!(ov > 1.0 - 1e-9, "n={n} λ={lambda} γ={gamma} {mode:?}: overlap {ov}");
            }
        }
    }
}

#[test]
fn uncompute_leaves_ancillas_clean() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for n in 1..=3u32 {
        let nm = 1u64 << n;
        for (lambda, gamma) in grid(n) {
            for (mode, b) in modes() {
                let p = ArchParams::new(nm, lambda, gamma, b, mode, 0).unwrap();
                let data = DataTable::random(nm, b as u32, &mut rng);
                let u = build_uncompute(&build_lookup(&p, &data, BuildOptions::default()).unwrap()).unwrap();
                assert!(u.is_uncomputed());
                let out = simulate_ideal(&u, SparseState::uniform_addresses(&u).unwrap()).unwrap();
                let amps: Vec<(u64, Complex64)> =
                    (0..nm).map(|i| (i, Complex64::new((nm as f64).sqrt().recip(), 0.0))).collect();
                let want = SparseState::lookup_target(&u, &amps).unwrap();
                assert!(out.overlap(&want) > 1.0 - 1e-9, "n={n} λ={lambda} γ={gamma} {mode:?}");
            }
        }
    }
}

/// After Stage II the register q′_j holds x_{λi+j} for the repetition i and
/// CSWAP leaf block selected by the address, and 0 elsewhere.
#[test]
fn stage_two_postcondition() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for n in 1..=4u32 {
        let nm = 1u64 << n;
        for (lambda, gamma) in grid(n) {
            for (mode, b) in modes() {
                let p = ArchParams::new(nm, lambda, gamma, b, mode, 0).unwrap();
                let data = DataTable::random(nm, b as u32, &mut rng);
                let c = build_lookup(&p, &data, BuildOptions::default()).unwrap();
                let prefix = c.stage_two_prefix();
                let regs: Vec<(QubitId, u64, u32)> = c
                    .qubits()
                    .iter()
                    .enumerate()
                    .filter_map(|(q, r)| match *r {
                        QubitRole::IntermediateQ { j, word } => Some((q, j, word)),
                        _ => None,
                    })
                    .collect();
                assert_eq!(regs.len() as u64, lambda * b);
                let (d, dp) = (p.d(), p.d_prime());
                for a in 0..nm {
                    let addr = Address::new(n, a);
                    let (rep, block) = (addr.field(0, d), addr.field(d, d + dp));
                    let state = simulate_gates(&prefix, SparseState::address(&c, a).unwrap(), 24).unwrap();
                    for &(q, j, w) in &regs {
                        let want = j / gamma == block && data.bit(lambda * rep + j, w);
                        let got = state.probability_of(&[q], 1) > 0.5;
                        assert_eq!(got, want, "n={n} λ={lambda} γ={gamma} {mode:?} a={a} q'{j}^{w}");
                    }
                }
            }
        }
    }
}

#[test]
fn bucket_brigade_degeneration() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for n in 1..=5u32 {
        let nm = 1u64 << n;
        let data = DataTable::random(nm, 1, &mut rng);
        let unified = build_unified_lookup(&ArchParams::single(nm, nm, 1).unwrap(), &data).unwrap();
        let reference = build_reference(ReferenceKind::BucketBrigade, nm, &data).unwrap();
        assert_eq!(unified.role_multiset(), reference.role_multiset(), "n={n}");
    }
}

#[test]
fn single_word_multi_bit_builders_match_single_bit() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    for n in 1..=4u32 {
        let nm = 1u64 << n;
        for (lambda, gamma) in grid(n) {
            let p = ArchParams::single(nm, lambda, gamma).unwrap();
            let data = DataTable::random(nm, 1, &mut rng);
            let single = build_unified_lookup(&p, &data).unwrap();
            let par = build_multi_bit_parallel(&p.with_readout(Readout::ParallelMultiBit, 1).unwrap(), &data).unwrap();
            let seq =
                build_multi_bit_sequential(&p.with_readout(Readout::SequentialMultiBit, 1).unwrap(), &data).unwrap();
            for other in [&par, &seq] {
                assert_eq!(other.qubits(), single.qubits());
                assert_eq!(other.gates(), single.gates());
            }
        }
    }
}

#[test]
fn select_swap_reference_reads_entry_five() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let data = DataTable::random(16, 1, &mut rng);
    let c = build_reference(ReferenceKind::SelectSwap, 16, &data).unwrap();
    let out = simulate_ideal(&c, SparseState::address(&c, 0b0101).unwrap()).unwrap();
    assert!(out.probability_of(c.outputs(), data.word(5)) > 1.0 - 1e-12);
}

#[test]
fn fan_out_reference_is_correct() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for nm in [2u64, 4, 8, 16] {
        let data = DataTable::random(nm, 1, &mut rng);
        let c = build_reference(ReferenceKind::FanOut, nm, &data).unwrap();
        for a in 0..nm {
            assert_eq!(classical_output(&c, a), data.word(a));
        }
    }
}

#[test]
fn trivial_table_has_no_t_gates() {
    let p = ArchParams::single(1, 1, 1).unwrap();
    let c = build_unified_lookup(&p, &DataTable::new(vec![1], 1).unwrap()).unwrap();
    assert_eq!(c.count_resources(Decomposition::T7).t_count, 0);
    assert_eq!(classical_output(&c, 0), 1);
}

#[test]
fn frozen_counts_at_n16() {
    let p = ArchParams::single(16, 4, 2).unwrap();
    let c = build_unified_lookup(&p, &DataTable::zeros(16, 1)).unwrap();
    let r7 = c.count_resources(Decomposition::T7);
    let r4 = c.count_resources(Decomposition::T4);
    let cswaps = r7.gate_histogram.get("CSWAP").copied().unwrap_or(0) as u64;
    let ccnots = r7.gate_histogram.get("CCNOT").copied().unwrap_or(0) as u64;
    assert_eq!(r7.t_count, 7 * (cswaps + ccnots));
    assert_eq!(r4.t_count, 4 * (cswaps + ccnots));
    assert_eq!((r7.t_count, r7.qubit_count, r7.query_depth), N16_COUNTS);
}

/// (tCount, qubitCount, queryDepth) at N=16, λ=4, γ=2 with 7-T gates.
const N16_COUNTS: (u64, usize, usize) = (224, 27, 66);
