use mazer_core::analysis::*;
use mazer_core::classical::classical_pem;
use mazer_core::{DimensionlessParams, ModeProfile};
use proptest::prelude::*;

fn dp(h_e: f64, h_int: f64, delta: f64, l: f64) -> DimensionlessParams {
    DimensionlessParams::with_h_int(h_e, h_int, delta, l, 0)
}

#[test]
fn length_sweep_shows_resonance_spikes() {
    let fixed = dp(1.0, 100.0, 0.0, 0.0);
    let spec = SweepSpec::new(SweepVar::L, linspace(0.0, 20.0, 4001), fixed, ModeProfile::mesa(1.0).unwrap());
    let s = run_sweep(&spec).unwrap();
    assert!(s.gaps.is_empty());
    let ys = s.dense();
    assert!(ys.iter().all(|v| (0.0..=1.0 + 1e-12).contains(v)));
    let peaks = find_peaks(&s.grid, &ys, 0.5, 0.0);
    assert!(peaks.len() >= 3, "{}", peaks.len());
    let f = mesa_curve(&fixed, SweepVar::L);
    let top = refine_peak(&f, &s.grid, &ys, peaks.tallest().unwrap()).unwrap();
    assert!(top.height >= 0.99 && top.height <= 1.0 + 1e-12, "{}", top.height);
}

#[test]
fn negative_energy_resonance() {
    let fixed = dp(0.0, 10.0, -1.0, 10.0);
    let grid = linspace(-3.0, 0.0, 3001);
    let spec = SweepSpec::new(SweepVar::HE, grid.clone(), fixed, ModeProfile::mesa(10.0).unwrap());
    let s = run_sweep(&spec).unwrap();
    let peaks = find_peaks(&s.grid, &s.dense(), 0.1, 0.05);
    assert!(!peaks.is_empty());
    let near = peaks.peaks.iter().find(|p| (p.center + 1.90991).abs() < 0.01).expect("resonance near -1.91");
    assert!((near.height - 0.35).abs() < 0.05, "{near:?}");
    // a taller line sits closer to zero energy
    let top = peaks.tallest().unwrap();
    assert!((top.center + 0.85).abs() < 0.01 && (top.height - 0.704).abs() < 0.005, "{top:?}");
    assert!(grid.iter().all(|&h| classical_pem(&params_at(&fixed, SweepVar::HE, h)) == 0.0));
}

#[test]
fn narrow_line_width() {
    let fixed = dp(-2.5, 100.0, 0.0, 200.0);
    let f = mesa_curve(&fixed, SweepVar::Delta);
    let p = tallest_peak(&f, -0.5, 0.5, 2001, 8).unwrap();
    assert!((p.fwhm - 3.0242e-4).abs() < 1e-7, "{}", p.fwhm);
}

#[test]
fn shift_of_detuned_resonances() {
    let grid = linspace(-4.0, 2.0, 3001);
    let plus = peak_shift_check(10.0, 0, 0.5, 40.0, &grid, 1e-3).unwrap();
    let minus = peak_shift_check(10.0, 0, -0.5, 40.0, &grid, 1e-3).unwrap();
    assert!(!plus.pairs.is_empty() && !minus.pairs.is_empty());
    for s in plus.shifts() {
        assert!((s - 0.25).abs() < 0.025, "{s}");
    }
    for s in minus.shifts() {
        assert!((s + 0.25).abs() < 0.025, "{s}");
    }
}

#[test]
fn sine_mode_families_are_shifted_by_detuning() {
    let mode = ModeProfile::sine(10.0).unwrap();
    let grid = linspace(-4.0, 4.0, 801);
    let sweep = |delta: f64| {
        let spec = SweepSpec::new(SweepVar::HE, grid.clone(), dp(0.0, 10.0, delta, 10.0), mode.clone());
        let s = run_sweep(&spec).unwrap();
        assert!(s.gaps.is_empty());
        find_peaks(&s.grid, &s.dense(), 0.05, 0.02).peaks.iter().map(|p| p.center).collect::<Vec<_>>()
    };
    let (minus, plus) = (sweep(-2.0), sweep(2.0));
    assert!(!minus.is_empty());
    let shifted: Vec<f64> = minus.iter().map(|c| c + 2.0).filter(|c| *c < 4.0 - 0.05).collect();
    let m = match_peaks(&shifted, &plus, 0.02);
    assert!(!m.pairs.is_empty());
    assert!(m.unmatched_base.is_empty(), "{m:?}");
    for (_, _, d) in &m.pairs {
        assert!(d.abs() <= 0.0100001, "{d}");
    }
}

#[test]
fn gaussian_mode_resonance() {
    // the only strong line in the detuning scan sits at positive detuning
    let mode = ModeProfile::gaussian(1.0).unwrap();
    let fixed = dp(-2.0, 10.0, 0.0, 1.0);
    let spec = SweepSpec::new(SweepVar::Delta, linspace(-3.0, 2.0, 251), fixed, mode.clone());
    let s = run_sweep(&spec).unwrap();
    let ys = s.dense();
    let below: f64 = s.grid.iter().zip(&ys).filter(|(d, _)| **d <= 0.0).map(|(_, y)| *y).fold(0.0, f64::max);
    assert!(below < 0.06, "{below}");
    let f = |d: f64| p_em(&params_at(&fixed, SweepVar::Delta, d), &mode, SolverChoice::Auto, 1e-10);
    let peaks = find_peaks(&s.grid, &ys, 0.5, 0.1);
    assert_eq!(peaks.len(), 1);
    let p = refine_peak(&f, &s.grid, &ys, &peaks.peaks[0]).unwrap();
    assert!((p.center - 0.61).abs() < 0.02 && (p.height - 0.615).abs() < 0.01, "{p:?}");
}

#[test]
fn saturation_at_resonance() {
    let s = saturation_length(&dp(-1.0, 10.0, 0.0, 0.0), 30.0, 3001, 1e-3).unwrap();
    assert!((s.h_e_plus_h_plus - 9.0).abs() < 1e-12);
    assert!((s.l_sat - 9.73).abs() < 0.02, "{}", s.l_sat);
}

#[test]
fn amplitude_asymmetry_of_formula() {
    for h_e in [1.0, 2.0, 3.0] {
        for d in [0.5, 1.0, 2.0] {
            assert!(amplitude_approx(h_e, d).unwrap() < amplitude_approx(h_e, -d).unwrap());
        }
    }
}

fn point() -> impl Strategy<Value = DimensionlessParams> {
    (-3.0..10.0f64, 0.1..100.0f64, -5.0..5.0f64, 0.5..30.0f64).prop_map(|(h, g, d, l)| dp(h, g, d, l))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symmetry_relation_mesa(p in point()) {
        let r = symmetry_residual(&p, &ModeProfile::mesa(p.l).unwrap(), SolverChoice::Mesa, 1e-10).unwrap();
        prop_assert!(r <= 1e-7, "{r}");
    }

    #[test]
    fn probabilities_are_bounded(p in point()) {
        let s = solve_point(&p, &ModeProfile::mesa(p.l).unwrap(), SolverChoice::Mesa, 1e-10).unwrap();
        prop_assert!(s.unitarity_defect() <= 1e-8);
        let c = classical_pem(&p);
        prop_assert!((0.0..=1.0).contains(&c));
    }
}

#[test]
fn saturation_in_classical_regime() {
    let s = saturation_length(&dp(1000.0, 1.0, 0.0, 0.0), 1500.0, 3001, 1e-3).unwrap();
    assert!((s.l_sat - 1000.0).abs() <= 10.0, "{}", s.l_sat);
}

#[test]
fn detuned_saturation_sits_past_the_threshold_height() {
    // the plateau is reached about 3.4 units beyond h_E + h+ = 8.5125
    let s = saturation_length(&dp(-1.0, 10.0, -1.0, 0.0), 30.0, 3001, 1e-3).unwrap();
    assert!((s.h_e_plus_h_plus - 8.5125).abs() < 1e-3);
    assert!((s.l_sat - 11.94).abs() < 0.02, "{}", s.l_sat);
    assert!((s.plateau - 0.106281).abs() < 1e-5);
}
