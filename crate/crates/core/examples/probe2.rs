//! Deeper probe: rayleigh structure and aperture sweep details.

use std::path::Path;

use nalgebra::Vector2;
use subsurf::analysis::{extract_peaks, localization_error};
use subsurf::config::parse_scenario;
use subsurf::imaging::filter_map;
use subsurf::medium::{FrequencySet, FrequencySpacing, Inhomogeneity, Scenario};
use subsurf::spectral::{MSRDataset, SynthesisOptions};

fn rayleigh_scenario(base: &Scenario, lambda_lo: f64, lambda_hi: f64, snr: Option<f64>) -> Scenario {
    let truths = [Vector2::new(-0.1, -2.5), Vector2::new(0.1, -2.5)];
    let disks = truths
        .iter()
        .map(|&z| Inhomogeneity::new(z, 0.01, 2.0, 1.0).unwrap())
        .collect();
    Scenario::new(
        base.medium,
        disks,
        base.observation.clone(),
        base.incidence.clone(),
        FrequencySet::equispaced(
            2.0 * std::f64::consts::PI / lambda_hi,
            2.0 * std::f64::consts::PI / lambda_lo,
            10,
            FrequencySpacing::LinearLambda,
        )
        .unwrap(),
        base.c_d,
        base.c_h,
        snr,
        1,
        base.grid,
    )
    .unwrap()
}

fn main() {
    let presets = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../presets");
    let p41 = parse_scenario(&presets.join("p41_permittivity.json")).unwrap();

    for (label, snr) in [("noiseless", None), ("20dB", Some(20.0))] {
        for (lo, hi) in [(1.0, 2.0), (0.1, 0.2)] {
            let sc = rayleigh_scenario(&p41.scenario, lo, hi, snr);
            let opts = if snr.is_none() {
                SynthesisOptions::noiseless()
            } else {
                SynthesisOptions::with_seed(1)
            };
            let dataset = MSRDataset::synthesize(&sc, &opts).unwrap();
            let sig0 = &dataset.frames()[0].spectral.sigma;
            let ranks: Vec<usize> = dataset.frames().iter().map(|f| f.spectral.m_hat).collect();
            let map = filter_map(&sc, &dataset, 10, &sc.grid).unwrap();
            let peaks = extract_peaks(&map, 5, 0.0).unwrap();
            println!(
                "rayleigh {label} lambda [{lo},{hi}]: sigma2/sigma1(f0) = {:.4}, ranks = {ranks:?}",
                sig0[1] / sig0[0]
            );
            for p in peaks.peaks.iter().take(5) {
                println!("   peak ({:+.3},{:+.3}) = {:.5}", p.point.x, p.point.y, p.value);
            }
            // profile along x1 at depth -2.5
            let i2 = ((-2.5 - map.grid.x2_min) / map.grid.step).round() as usize;
            let mut profile = String::new();
            for i1 in 52..=68 {
                profile.push_str(&format!("{:.4} ", map.value_at(i1, i2)));
            }
            println!("   x1 profile @ x2=-2.5: {profile}");
        }
    }

    // aperture: which aperture has worse x2 error, with proper matched-pair x2 errors
    let seeds: Vec<u64> = (1..=20).collect();
    for name in [
        "p44_aperture_narrow",
        "p44_aperture_mid",
        "p44_aperture_wide",
        "p44_aperture_full",
    ] {
        let loaded = parse_scenario(&presets.join(format!("{name}.json"))).unwrap();
        let sc = &loaded.scenario;
        let truths = sc.scatterer_centers();
        let mut x2_errs = Vec::new();
        let mut full_errs = Vec::new();
        for &seed in &seeds {
            let dataset = MSRDataset::synthesize(
                sc,
                &SynthesisOptions {
                    seed_override: Some(seed),
                    ..Default::default()
                },
            )
            .unwrap();
            let map = filter_map(sc, &dataset, 10, &sc.grid).unwrap();
            let peaks = extract_peaks(&map, 3, 0.0).unwrap();
            let report = localization_error(&peaks, &truths);
            full_errs.push(report.mean().unwrap_or(f64::NAN));
            // matched x2 errors: redo greedy matching tracking peak indices
            let mut peak_used = vec![false; peaks.peaks.len()];
            let mut truth_used = vec![false; truths.len()];
            let mut acc = Vec::new();
            for _ in 0..truths.len().min(peaks.peaks.len()) {
                let mut best: Option<(f64, usize, usize)> = None;
                for (ti, t) in truths.iter().enumerate() {
                    if truth_used[ti] { continue; }
                    for (pi, p) in peaks.peaks.iter().enumerate() {
                        if peak_used[pi] { continue; }
                        let d = (p.point - t).norm();
                        if best.map_or(true, |b| d < b.0) {
                            best = Some((d, ti, pi));
                        }
                    }
                }
                let (_, ti, pi) = best.unwrap();
                truth_used[ti] = true;
                peak_used[pi] = true;
                acc.push((peaks.peaks[pi].point.y - truths[ti].y).abs());
            }
            x2_errs.push(acc.iter().sum::<f64>() / acc.len() as f64);
        }
        let avg = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        println!(
            "{name}: mean full err {:.4}, mean |x2| err {:.4}",
            avg(&full_errs),
            avg(&x2_errs)
        );
    }
}
