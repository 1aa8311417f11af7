//! Scratch calibration probe (not part of the test suite).

use std::path::Path;
use std::time::Instant;

use nalgebra::Vector2;
use subsurf::analysis::{extract_peaks, localization_error, resolution_test};
use subsurf::config::parse_scenario;
use subsurf::imaging::{filter_map, kirchhoff_map, music_map, MusicOptions};
use subsurf::spectral::{MSRDataset, SynthesisOptions};

fn main() {
    let presets = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../presets");
    let p41 = parse_scenario(&presets.join("p41_permittivity.json")).unwrap();
    let scenario = &p41.scenario;
    let truths = scenario.scatterer_centers();

    // rank estimates + criterion 4/5/6 stats over 20 seeds
    let seeds: Vec<u64> = (1..=20).collect();
    let mut hits = 0usize;
    let mut mean_f10 = Vec::new();
    let mut mean_f1 = Vec::new();
    let mut mean_kir = Vec::new();
    let mut mean_music = Vec::new();
    let mut rank3 = 0usize;
    let start_all = Instant::now();
    for &seed in &seeds {
        let t0 = Instant::now();
        let dataset = MSRDataset::synthesize(
            scenario,
            &SynthesisOptions {
                seed_override: Some(seed),
                ..Default::default()
            },
        )
        .unwrap();
        let ranks: Vec<usize> = dataset.frames().iter().map(|f| f.spectral.m_hat).collect();
        if ranks.iter().all(|&r| r == 3) {
            rank3 += 1;
        }
        let map10 = filter_map(scenario, &dataset, 10, &scenario.grid).unwrap();
        let map1 = filter_map(scenario, &dataset, 1, &scenario.grid).unwrap();
        let kir = kirchhoff_map(scenario, &dataset, 0, &scenario.grid).unwrap();
        let mus = music_map(scenario, &dataset, 0, &scenario.grid, &MusicOptions::default()).unwrap();
        let p10 = extract_peaks(&map10, 3, 0.0).unwrap();
        let r10 = localization_error(&p10, &truths);
        if r10.all_within(0.1) {
            hits += 1;
        }
        mean_f10.push(r10.mean().unwrap_or(f64::NAN));
        let r1 = localization_error(&extract_peaks(&map1, 3, 0.0).unwrap(), &truths);
        mean_f1.push(r1.mean().unwrap_or(f64::NAN));
        let rk = localization_error(&extract_peaks(&kir, 3, 0.0).unwrap(), &truths);
        mean_kir.push(rk.mean().unwrap_or(f64::NAN));
        let rm = localization_error(&extract_peaks(&mus, 3, 0.0).unwrap(), &truths);
        mean_music.push(rm.mean().unwrap_or(f64::NAN));
        println!(
            "seed {seed:2}: ranks {:?} f10 {:.4} f1 {:.4} kir {:.4} music {:.4}  within0.1={} ({:?})",
            &ranks[..3.min(ranks.len())],
            r10.mean().unwrap_or(f64::NAN),
            r1.mean().unwrap_or(f64::NAN),
            rk.mean().unwrap_or(f64::NAN),
            rm.mean().unwrap_or(f64::NAN),
            r10.all_within(0.1),
            t0.elapsed()
        );
    }
    let avg = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    println!("--- hits(0.1): {hits}/20, all-rank-3 seeds: {rank3}/20");
    println!(
        "--- mean errors: f10 {:.4} f1 {:.4} kir {:.4} music {:.4}",
        avg(&mean_f10),
        avg(&mean_f1),
        avg(&mean_kir),
        avg(&mean_music)
    );
    println!("--- total {:?}", start_all.elapsed());

    // criterion 9: resolution
    let t0 = Instant::now();
    let base_noiseless = {
        let mut s = scenario.clone();
        s.snr_db = None;
        s
    };
    let wide = resolution_test(0.2, 1.0, 2.0, &base_noiseless).unwrap();
    println!(
        "rayleigh wide: resolved={} per_truth={:?} ({:?})",
        wide.resolved,
        wide.report.per_truth,
        t0.elapsed()
    );
    let fine = resolution_test(0.2, 0.1, 0.2, &base_noiseless).unwrap();
    println!(
        "rayleigh fine: resolved={} per_truth={:?}",
        fine.resolved, fine.report.per_truth
    );

    // criterion 10: aperture x2 error comparison
    let mid = parse_scenario(&presets.join("p44_aperture_mid.json")).unwrap();
    let full = parse_scenario(&presets.join("p44_aperture_full.json")).unwrap();
    let mut x2_mid = Vec::new();
    let mut x2_full = Vec::new();
    for &seed in &seeds {
        for (loaded, out) in [(&mid, &mut x2_mid), (&full, &mut x2_full)] {
            let sc = &loaded.scenario;
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
            // x2-only matched error via greedy matching on full distance
            let report = localization_error(&peaks, &sc.scatterer_centers());
            // recompute x2 component: match peaks to truths again greedily
            let mut jointly = Vec::new();
            for (ti, truth) in sc.scatterer_centers().iter().enumerate() {
                if report.per_truth[ti].is_some() {
                    // find the peak that matched: nearest unconsumed; approximate by nearest
                    let best = peaks
                        .peaks
                        .iter()
                        .map(|p| (p.point - truth).norm())
                        .fold(f64::INFINITY, f64::min);
                    let peak = peaks
                        .peaks
                        .iter()
                        .find(|p| ((p.point - truth).norm() - best).abs() < 1e-12)
                        .unwrap();
                    jointly.push((peak.point.y - truth.y).abs());
                }
            }
            if !jointly.is_empty() {
                out.push(jointly.iter().sum::<f64>() / jointly.len() as f64);
            }
        }
    }
    println!(
        "aperture mid x2err {:.4}  full(wide) x2err {:.4}",
        avg(&x2_mid),
        avg(&x2_full)
    );

    // filter value at exact scatterer location, multi-scatterer noiseless
    let dataset = MSRDataset::synthesize(&base_noiseless, &SynthesisOptions::noiseless()).unwrap();
    for z in &truths {
        let v = subsurf::imaging::filter_value(*z, scenario, &dataset, 10).unwrap();
        println!("noiseless filter at ({:.2},{:.2}) = {:.4}", z.x, z.y, v);
    }
    let map = filter_map(scenario, &dataset, 10, &scenario.grid).unwrap();
    let peaks = extract_peaks(&map, 3, 0.3).unwrap();
    for p in &peaks.peaks {
        println!("noiseless peak at ({:.3},{:.3}) = {:.4}", p.point.x, p.point.y, p.value);
    }
    let _ = Vector2::new(0.0, 0.0);
}
