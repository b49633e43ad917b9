//! Acceptance checks, one line per criterion. Run with
//! `cargo test -p mazer-core --release --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use mazer_core::airy::{airy_eval, wronskian, WRONSKIAN};
use mazer_core::analysis::*;
use mazer_core::bvp::solve_general;
use mazer_core::classical::classical_quantum_deviation;
use mazer_core::mesa::interior_state;
use mazer_core::overlap::{emission_via_overlap, DEFAULT_NODES};
use mazer_core::{solve_mesa, DimensionlessParams, MazerError, ModeProfile};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

struct Outcome {
    pass: bool,
    detail: String,
}

fn dp(h_e: f64, h_int: f64, delta: f64, l: f64) -> DimensionlessParams {
    DimensionlessParams::with_h_int(h_e, h_int, delta, l, 0)
}

fn random_point(rng: &mut StdRng) -> DimensionlessParams {
    dp(rng.random_range(-3.0..10.0), rng.random_range(0.1..100.0), rng.random_range(-5.0..5.0), rng.random_range(0.5..30.0))
}

fn c1() -> Outcome {
    let on = solve_mesa(&dp(-1.90991, 10.0, -1.0, 10.0)).unwrap().p_em();
    let off = solve_mesa(&dp(-2.2, 10.0, -1.0, 10.0)).unwrap().p_em();
    Outcome {
        pass: (on - 0.35).abs() <= 0.05 && off <= 0.01,
        detail: format!("P(-1.90991) = {on:.6}, P(-2.2) = {off:.3e}"),
    }
}

fn c2() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2);
    let (mut worst_mesa, mut worst_bvp, mut skipped) = (0.0f64, 0.0f64, 0);
    for _ in 0..500 {
        let p = random_point(&mut rng);
        let mode = ModeProfile::mesa(p.l).unwrap();
        match solve_mesa(&p) {
            Ok(s) => worst_mesa = worst_mesa.max(s.solution.unitarity_defect().abs()),
            Err(MazerError::Conditioning { .. }) => skipped += 1,
            Err(e) => panic!("{e}"),
        }
        match solve_general(&p, &mode, 1e-10) {
            Ok(s) => worst_bvp = worst_bvp.max(s.unitarity_defect().abs()),
            Err(MazerError::Conditioning { .. }) => skipped += 1,
            Err(e) => panic!("{e}"),
        }
    }
    Outcome {
        pass: worst_mesa <= 1e-8 && worst_bvp <= 1e-6,
        detail: format!("max defect mesa {worst_mesa:.2e}, bvp {worst_bvp:.2e}, conditioning skips {skipped}"),
    }
}

fn c3() -> Outcome {
    let mut rng = StdRng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let p = dp(rng.random_range(-3.0..10.0), rng.random_range(0.5..30.0), rng.random_range(-3.0..3.0), rng.random_range(1.0..20.0));
        let mode = ModeProfile::mesa(p.l).unwrap();
        let m = solve_mesa(&p).unwrap();
        let b = solve_general(&p, &mode, 1e-12).unwrap().p_em();
        let o = emission_via_overlap(&p, &mode, |z| Ok(interior_state(&m, z)?[0]), DEFAULT_NODES).unwrap().p_em;
        let q = m.p_em();
        worst = worst.max((q - b).abs()).max((q - o).abs()).max((b - o).abs());
    }
    Outcome { pass: worst <= 1e-5, detail: format!("max pairwise difference {worst:.2e}") }
}

fn c4() -> Outcome {
    let base = dp(1000.0, 1.0, -0.2, 0.0);
    let inside = classical_quantum_deviation(&base, &linspace(0.0, 900.0, 1801)).unwrap();
    let turning = classical_quantum_deviation(&base, &linspace(990.0, 1010.0, 401)).unwrap();
    Outcome {
        pass: inside.max <= 0.02 && turning.max > 0.02,
        detail: format!(
            "max deviation on [0, 900] {:.4} at L = {:.1}; on [990, 1010] {:.4} at L = {:.2}",
            inside.max, inside.argmax, turning.max, turning.argmax
        ),
    }
}

fn c5() -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    let mut worst_mesa = 0.0f64;
    for _ in 0..100 {
        let p = random_point(&mut rng);
        worst_mesa = worst_mesa.max(symmetry_residual(&p, &ModeProfile::mesa(p.l).unwrap(), SolverChoice::Mesa, 1e-10).unwrap());
    }
    let sine = ModeProfile::sine(10.0).unwrap();
    let mut worst_sine = 0.0f64;
    for _ in 0..20 {
        let p = dp(rng.random_range(-3.0..3.0), 10.0, rng.random_range(-3.0..3.0), 10.0);
        worst_sine = worst_sine.max(symmetry_residual(&p, &sine, SolverChoice::Bvp, 1e-10).unwrap());
    }
    Outcome {
        pass: worst_mesa <= 1e-7 && worst_sine <= 1e-5,
        detail: format!("max residual mesa {worst_mesa:.2e}, sine {worst_sine:.2e}"),
    }
}

fn c6() -> Outcome {
    let grid = linspace(-4.0, 2.0, 6001);
    let spacing = grid[1] - grid[0];
    let plus = peak_shift_check(10.0, 0, 0.5, 40.0, &grid, 1e-3).unwrap();
    let minus = peak_shift_check(10.0, 0, -0.5, 40.0, &grid, 1e-3).unwrap();
    let sp = plus.shifts();
    let sm = minus.shifts();
    let ok_plus = !sp.is_empty() && sp.iter().all(|s| (s - 0.25).abs() <= 0.025);
    let ok_minus = !sm.is_empty() && sm.iter().all(|s| (s + 0.25).abs() <= 0.025);
    let mut worst_sep = 0.0f64;
    let mut n_sep = 0;
    for (b, _, s) in &plus.pairs {
        if let Some((_, _, t)) = minus.pairs.iter().find(|q| q.0 == *b) {
            worst_sep = worst_sep.max((s - t - 0.5).abs());
            n_sep += 1;
        }
    }
    let range = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        format!("[{lo:.4}, {hi:.4}]")
    };
    Outcome {
        pass: ok_plus && ok_minus && n_sep > 0 && worst_sep <= spacing,
        detail: format!(
            "{} shifts(+0.5) in {}, {} shifts(-0.5) in {}, unmatched {}; separation error {worst_sep:.2e} over {n_sep} pairs",
            sp.len(),
            range(&sp),
            sm.len(),
            range(&sm),
            plus.unmatched_base.len() + plus.unmatched_shifted.len() + minus.unmatched_base.len() + minus.unmatched_shifted.len()
        ),
    }
}

fn envelope_errors(h_e: f64) -> Vec<(f64, f64, f64)> {
    linspace(-4.0, 2.0, 8)
        .into_iter()
        .map(|d| {
            let env = l_scan_envelope(h_e, 100.0, 0, d, &EnvelopeOptions::default()).unwrap();
            let a = amplitude_approx(h_e, d).unwrap();
            (d, env.amplitude, (env.amplitude - a).abs() / a)
        })
        .collect()
}

fn c7() -> Outcome {
    let three = envelope_errors(3.0);
    let worst = three.iter().map(|e| e.2).fold(0.0, f64::max);
    let one = envelope_errors(1.0);
    let worst_one = one.iter().map(|e| e.2).fold(0.0, f64::max);
    Outcome {
        pass: worst <= 0.10,
        detail: format!("max relative error at h_E = 3: {worst:.4}; at h_E = 1 (recorded): {worst_one:.4}"),
    }
}

fn c8() -> Outcome {
    let s = saturation_length(&dp(-1.0, 10.0, -1.0, 0.0), 30.0, 3001, 1e-3).unwrap();
    Outcome {
        pass: (s.l_sat - 8.512).abs() <= 0.05 * 8.512,
        detail: format!("L_sat = {:.3} (h_E + h+ = {:.4}, target 8.512 +- 5%)", s.l_sat, s.h_e_plus_h_plus),
    }
}

fn c9() -> Outcome {
    let fixed = dp(-2.5, 100.0, 0.0, 200.0);
    let p = tallest_peak(&mesa_curve(&fixed, SweepVar::Delta), -0.5, 0.5, 2001, 8).unwrap();
    Outcome {
        pass: p.fwhm >= 1.5e-4 && p.fwhm <= 6e-4,
        detail: format!("FWHM = {:.4e} at delta = {:.4e}, height {:.6}", p.fwhm, p.center, p.height),
    }
}

fn c10() -> Outcome {
    let text = include_str!("data/airy_oracle.csv");
    let mut worst = 0.0f64;
    let mut worst_deep = 0.0f64;
    let mut rows = 0;
    for line in text.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        let p = airy_eval(v[0]).unwrap();
        let got = [p.ai, p.aip, p.bi, p.bip];
        let (env, envp) = (v[1].hypot(v[3]), v[2].hypot(v[4]));
        let e = (0..4)
            .map(|i| {
                let scale = if v[0] < 0.0 { if i % 2 == 0 { env } else { envp } } else { v[i + 1].abs() };
                (got[i] - v[i + 1]).abs() / scale
            })
            .fold(0.0, f64::max);
        if v[0] < -300.0 {
            worst_deep = worst_deep.max(e);
        } else {
            worst = worst.max(e);
        }
        rows += 1;
    }
    let mut worst_w = 0.0f64;
    for z in linspace(-1000.0, 30.0, 1000) {
        worst_w = worst_w.max((wronskian(&airy_eval(z).unwrap()) / WRONSKIAN - 1.0).abs());
    }
    Outcome {
        pass: rows == 200 && worst <= 1e-10 && worst_deep <= 1e-8 && worst_w <= 1e-10,
        detail: format!("{rows} points: max error {worst:.2e} (z >= -300), {worst_deep:.2e} (z < -300); Wronskian {worst_w:.2e}"),
    }
}

fn c11() -> Outcome {
    let mut fails = Vec::new();
    let mut lines = Vec::new();
    let opt = EnvelopeOptions { points: 40001, ..Default::default() };
    for h_e in [1.0, 2.0, 3.0] {
        for d in [0.5, 1.0, 2.0] {
            let m = l_scan_envelope(h_e, 100.0, 0, -d, &opt).unwrap();
            let p = l_scan_envelope(h_e, 100.0, 0, d, &opt).unwrap();
            let (wm, wp) = (m.median_fwhm().unwrap_or(f64::NAN), p.median_fwhm().unwrap_or(f64::NAN));
            let ok = wm > wp && p.amplitude <= m.amplitude;
            if !ok {
                fails.push(format!("(h_E = {h_e}, d = {d})"));
            }
            lines.push(format!("{h_e}/{d}: w {wm:.3e}>{wp:.3e} A {:.6}>={:.6}", m.amplitude, p.amplitude));
        }
    }
    Outcome {
        pass: fails.is_empty(),
        detail: if fails.is_empty() { lines.join("; ") } else { format!("failed at {}; {}", fails.join(", "), lines.join("; ")) },
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Outcome); 11] = [
        ("resonance point", Duration::from_secs(1), c1),
        ("unitarity", Duration::from_secs(60), c2),
        ("three-way agreement", Duration::from_secs(60), c3),
        ("classical limit", Duration::from_secs(300), c4),
        ("symmetry relation", Duration::from_secs(120), c5),
        ("peak shift", Duration::from_secs(300), c6),
        ("amplitude formula", Duration::from_secs(900), c7),
        ("saturation length", Duration::from_secs(120), c8),
        ("narrow line width", Duration::from_secs(600), c9),
        ("Airy accuracy", Duration::from_secs(60), c10),
        ("width/amplitude asymmetry", Duration::from_secs(600), c11),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !filter.is_empty() && !filter.iter().any(|f| f == &n.to_string()) {
            continue;
        }
        let t = Instant::now();
        let out = run();
        let dt = t.elapsed();
        let pass = out.pass && dt <= *budget;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {n:>2} {}: {name}: {} [{:.2}s, budget {}s]",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            dt.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
