use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use qlut_core::costs::{
    bucket_brigade_infidelity, budgeted_infidelity, cost_report, general_infidelity, multi_bit_infidelity, CostReport,
    FidelityBreakdown,
};
use qlut_core::layout::{
    build_schedule, classify_links, distillation_model, link_rates, links_to_csv, place_h_tree, DistillationPlan,
    LinkPolicy, LongRangeLink,
};
use qlut_core::sim::noise::{monte_carlo_infidelity, run_trial, McEstimate, NoiseModel};
use qlut_core::sim::{simulate_ideal, SparseState};
use qlut_core::sweep::{run_sweep, SweepSpec};
use qlut_core::{build_lookup, ArchParams, BuildOptions, Circuit, Readout, Specialization};
use serde::Serialize;

use crate::config::{read_json, Config};
use crate::{CliError, GlobalOpts};

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn build(cfg: &Config) -> Result<Circuit, CliError> {
    let c = build_lookup(&cfg.params, &cfg.data()?, BuildOptions::default())?;
    c.check_layer_disjointness().map_err(CliError::Invariant)?;
    Ok(c)
}

/// The config's link policy, with the params' budget k as a floor.
fn policy(cfg: &Config) -> LinkPolicy {
    LinkPolicy { budget_k: cfg.link_policy.budget_k.max(cfg.params.k()), ..cfg.link_policy }
}

fn noise_model(c: &Circuit, cfg: &Config, links: &[LongRangeLink]) -> NoiseModel {
    NoiseModel::with_link_rates(c, cfg.rates, &link_rates(links, &cfg.rates))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct LayoutSummary {
    width: i64,
    height: i64,
    area: i64,
    area_per_memory_cell: f64,
    long_range_links: usize,
    max_m: u64,
    schedule_depth: u64,
    status_idle_total: u64,
    include_distillation_depth: bool,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SimulationSummary {
    all_addresses_correct: bool,
    monte_carlo: McEstimate,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Report {
    params: ArchParams,
    specialization: Specialization,
    repetitions: u64,
    costs: CostReport,
    infidelity: FidelityBreakdown,
    #[serde(skip_serializing_if = "Option::is_none")]
    budgeted_infidelity: Option<FidelityBreakdown>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bucket_brigade_infidelity: Option<FidelityBreakdown>,
    layout: LayoutSummary,
    /// Plan for the longest link when distilled pairs are enabled.
    #[serde(skip_serializing_if = "Option::is_none")]
    distillation: Option<DistillationPlan>,
    #[serde(skip_serializing_if = "Option::is_none")]
    simulation: Option<SimulationSummary>,
}

fn infidelity(cfg: &Config) -> Result<FidelityBreakdown, CliError> {
    let f = match cfg.params.readout() {
        Readout::SingleBit => general_infidelity(&cfg.params, &cfg.rates)?,
        _ => multi_bit_infidelity(&cfg.params, &cfg.rates)?,
    };
    Ok(f.with_constants(&cfg.constants, &cfg.rates))
}

fn breakdown_text(out: &mut String, title: &str, f: &FidelityBreakdown) {
    let _ = writeln!(out, "{title}: {:.6e}", f.total);
    for (k, c) in &f.terms_by_error_type {
        let _ = writeln!(out, "  {k}: {c}");
    }
}

pub fn report(path: &Path, out: Option<&Path>, g: GlobalOpts) -> Result<(), CliError> {
    let cfg = Config::load(path)?;
    let p = cfg.params;
    let c = build(&cfg)?;
    let decomposition = g.decomposition().or(cfg.decomposition).unwrap_or_default();
    let costs = cost_report(&p, Some(&c), decomposition);

    let placement = place_h_tree(&c)?;
    let links = classify_links(&c, &placement, policy(&cfg));
    let include = g.include_distillation_depth || cfg.include_distillation_depth;
    let schedule = build_schedule(&c, &placement, &links, include);
    let (width, height) = placement.footprint();
    let layout = LayoutSummary {
        width,
        height,
        area: placement.area(),
        area_per_memory_cell: placement.area() as f64 / p.memory_size() as f64,
        long_range_links: links.len(),
        max_m: links.iter().map(|l| l.m).max().unwrap_or(0),
        schedule_depth: schedule.total_depth,
        status_idle_total: schedule.total_idle(),
        include_distillation_depth: include,
    };

    let distillation = match policy(&cfg).distillation && layout.max_m > 0 {
        true => Some(distillation_model(layout.max_m, cfg.rates.eps_q, cfg.distillation)?),
        false => None,
    };
    let single = p.readout() == Readout::SingleBit;
    let report = Report {
        params: p,
        specialization: p.specialization(),
        repetitions: p.repetitions(),
        costs,
        infidelity: infidelity(&cfg)?,
        budgeted_infidelity: if single && p.k() > 0 { Some(budgeted_infidelity(&p, &cfg.rates, p.k())?) } else { None },
        bucket_brigade_infidelity: if p.specialization() == Specialization::BucketBrigade {
            Some(bucket_brigade_infidelity(p.memory_size(), &cfg.rates)?)
        } else {
            None
        },
        layout,
        distillation,
        simulation: if p.memory_size() <= cfg.simulation.max_n {
            Some(simulate_small(&c, &cfg, &links)?)
        } else {
            None
        },
    };

    print!("{}", report_text(&report));
    if let Some(out) = out {
        write(out, &(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"))?;
    }
    match &report.simulation {
        Some(s) if !s.all_addresses_correct => {
            Err(CliError::Invariant("noiseless lookup returned a wrong word".into()))
        }
        _ => Ok(()),
    }
}

fn simulate_small(c: &Circuit, cfg: &Config, links: &[LongRangeLink]) -> Result<SimulationSummary, CliError> {
    let mut correct = true;
    for a in 0..cfg.params.memory_size() {
        let out = simulate_ideal(c, SparseState::address(c, a)?)?;
        correct &= out.probability_of(c.outputs(), c.data.word(a)) > 1.0 - 1e-9;
    }
    let model = noise_model(c, cfg, links);
    let monte_carlo = monte_carlo_infidelity(c, &model, cfg.simulation.trials, cfg.seed)?;
    Ok(SimulationSummary { all_addresses_correct: correct, monte_carlo })
}

fn report_text(r: &Report) -> String {
    let p = &r.params;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "N: {}  lambda: {}  gamma: {}  b: {}  readout: {:?}  k: {}",
        p.memory_size(),
        p.lambda(),
        p.gamma(),
        p.b(),
        p.readout(),
        p.k()
    );
    let _ = writeln!(s, "n: {}  d: {}  d': {}  d'': {}", p.n(), p.d(), p.d_prime(), p.d_double_prime());
    let _ = writeln!(s, "specialization: {}", r.specialization);
    let _ = writeln!(s, "repetitions: {}", r.repetitions);
    let exact = r.costs.exact_counts.as_ref();
    let _ = writeln!(
        s,
        "T count: formula {}, exact {}",
        r.costs.t_count,
        exact.map_or("-".into(), |e| e.t_count.to_string())
    );
    if let Some(cal) = r.costs.t_calibration {
        let _ = writeln!(s, "T calibration (exact / formula): {cal:.3}");
    }
    let _ = writeln!(
        s,
        "qubits: formula {}, exact {}",
        r.costs.qubit_count,
        exact.map_or("-".into(), |e| e.qubit_count.to_string())
    );
    let _ = writeln!(
        s,
        "query depth: formula {}, exact {}",
        r.costs.query_depth,
        exact.map_or("-".into(), |e| e.query_depth.to_string())
    );
    breakdown_text(&mut s, "infidelity (first order, unit constants)", &r.infidelity);
    if let Some(b) = &r.budgeted_infidelity {
        breakdown_text(&mut s, &format!("infidelity with k = {} free levels", p.k()), b);
    }
    if let Some(b) = &r.bucket_brigade_infidelity {
        breakdown_text(&mut s, "planar bucket-brigade infidelity", b);
    }
    let l = &r.layout;
    let _ = writeln!(
        s,
        "layout: {} x {} (area {}, {:.2} per memory cell), {} long-range links, max m {}",
        l.width, l.height, l.area, l.area_per_memory_cell, l.long_range_links, l.max_m
    );
    let _ = writeln!(
        s,
        "schedule: depth {}, status idle {} (distillation depth {})",
        l.schedule_depth,
        l.status_idle_total,
        if l.include_distillation_depth { "included" } else { "excluded" }
    );
    if let Some(d) = &r.distillation {
        let _ = writeln!(
            s,
            "distillation at m = {}: distance {}, {} pairs, epsF {:.3e}",
            l.max_m, d.code_distance, d.pairs_consumed, d.eps_f
        );
    }
    if let Some(sim) = &r.simulation {
        let _ = writeln!(s, "noiseless lookup: {}", if sim.all_addresses_correct { "correct" } else { "WRONG" });
        let mc = &sim.monte_carlo;
        let _ = writeln!(
            s,
            "Monte Carlo infidelity: {:.6e} +/- {:.1e} ({} of {} trials failed)",
            mc.infidelity, mc.stderr, mc.failures, mc.trials
        );
    }
    s
}

pub fn sweep(path: &Path, out: &Path) -> Result<(), CliError> {
    let raw: serde_json::Value = read_json(path)?;
    let spec: SweepSpec =
        serde_json::from_value(raw).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let table = run_sweep(&spec)?;
    std::fs::create_dir_all(out).map_err(|source| CliError::Io { path: out.to_path_buf(), source })?;
    write(&out.join("table.csv"), &table.to_csv()?)?;
    write(&out.join("table.json"), &(serde_json::to_string_pretty(&table).expect("table serializes") + "\n"))?;
    print!("{}", table.to_csv()?);
    Ok(())
}

pub fn export_gates(path: &Path, out: &Path, _g: GlobalOpts) -> Result<(), CliError> {
    let cfg = Config::load(path)?;
    let c = build(&cfg)?;
    let placement = place_h_tree(&c)?;
    let lengths = classify_links(&c, &placement, policy(&cfg)).iter().map(|l| (l.gate, l.m)).collect();
    write(out, &c.export_gate_list(Some(&lengths)))
}

pub fn export_layout(path: &Path, out: &Path, _g: GlobalOpts) -> Result<(), CliError> {
    let cfg = Config::load(path)?;
    let c = build(&cfg)?;
    let placement = place_h_tree(&c)?;
    let links = classify_links(&c, &placement, policy(&cfg));
    std::fs::create_dir_all(out).map_err(|source| CliError::Io { path: out.to_path_buf(), source })?;
    write(&out.join("layout.json"), &(placement.to_json() + "\n"))?;
    write(&out.join("layout.txt"), &placement.to_text_grid(&c))?;
    write(&out.join("links.csv"), &links_to_csv(&links)?)?;
    Ok(())
}

pub fn simulate(path: &Path, trials: u64, seed: u64, log: Option<&Path>) -> Result<(), CliError> {
    let cfg = Config::load(path)?;
    let c = build(&cfg)?;
    let placement = place_h_tree(&c)?;
    let links = classify_links(&c, &placement, policy(&cfg));
    let model = noise_model(&c, &cfg, &links);
    if let Some(log) = log {
        let io = |source| CliError::Io { path: PathBuf::from(log), source };
        let mut w = std::io::BufWriter::new(std::fs::File::create(log).map_err(io)?);
        for t in 0..trials {
            let r = run_trial(&c, &model, seed, t)?;
            writeln!(w, "{}", serde_json::to_string(&r).expect("trial serializes")).map_err(io)?;
        }
        w.flush().map_err(io)?;
    }
    let est = monte_carlo_infidelity(&c, &model, trials, seed)?;
    println!("{}", serde_json::to_string_pretty(&est).expect("estimate serializes"));
    Ok(())
}
