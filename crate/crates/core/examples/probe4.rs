//! Both-contrast sanity probe at the standard aperture.

use std::path::Path;

use subsurf::analysis::{extract_peaks, localization_error};
use subsurf::config::parse_scenario;
use subsurf::imaging::filter_map;
use subsurf::spectral::{MSRDataset, SynthesisOptions};

fn main() {
    let presets = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../presets");
    for name in [
        "p43_both_eps",
        "p43_both_mu",
        "p43_both_full",
        "p43_both_full_low",
        "p42_permeability",
        "p41_symmetric_small",
        "p41_symmetric_large",
    ] {
        let loaded = parse_scenario(&presets.join(format!("{name}.json"))).unwrap();
        let sc = &loaded.scenario;
        let truths = sc.scatterer_centers();
        let mut errs = Vec::new();
        let mut hits = 0;
        for seed in 1..=10u64 {
            let dataset = MSRDataset::synthesize(
                sc,
                &SynthesisOptions {
                    seed_override: Some(seed),
                    ..Default::default()
                },
            )
            .unwrap();
            let map = filter_map(sc, &dataset, 10.min(sc.frequencies.len()), &sc.grid).unwrap();
            let peaks = extract_peaks(&map, 3, 0.0).unwrap();
            let report = localization_error(&peaks, &truths);
            errs.push(report.mean().unwrap_or(f64::NAN));
            if report.all_within(0.1) {
                hits += 1;
            }
        }
        let avg = errs.iter().sum::<f64>() / errs.len() as f64;
        println!("{name}: mean err {avg:.4}, hits(0.1) {hits}/10");
    }
}
