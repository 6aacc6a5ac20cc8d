//! Grid sweep of the prior-likelihood spread on synthetic planar scenes.
//!
//! Runs the full pipeline (grid seeds -> prior -> grow -> gap fill ->
//! evaluate) for each sigma_p^2 candidate and prints per-scene accuracies,
//! used to pick the shipping default.

use fusegrow::imaging::PriorMap;
use fusegrow::similarity::{SimilarityParams, Statistic};
use fusegrow::synthetic::{planar_scene, PlanarSceneConfig};

fn main() {
    let scenes: Vec<(&str, PlanarSceneConfig)> = vec![
        ("planar-a", PlanarSceneConfig::default()),
        (
            "planar-b",
            PlanarSceneConfig {
                base_disparity: 22.0,
                panel: (180, 20, 320, 160),
                panel_base: 24.0,
                panel_slope: 0.08,
                foreground: (60, 40, 150, 200),
                foreground_disparity: 48.0,
                flat_band: (40, 170),
                rng_seed: 0xbeef,
                ..PlanarSceneConfig::default()
            },
        ),
        (
            "planar-c",
            PlanarSceneConfig {
                base_disparity: 10.0,
                panel: (0, 0, 120, 120),
                panel_base: 12.0,
                panel_slope: 0.05,
                foreground: (180, 30, 300, 130),
                foreground_disparity: 30.0,
                flat_band: (0, 120),
                rng_seed: 0xca4e,
                ..PlanarSceneConfig::default()
            },
        ),
    ];

    println!("sigma_p_sq  scene      epc     epc-filled  (mncc / expssd for reference)");
    for sigma_p_sq in [0.001, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
        let mut mean_filled = 0.0;
        for (name, cfg) in &scenes {
            let scene = planar_scene(cfg);
            let (w, h) = (scene.left.width(), scene.left.height());
            let seeds = fusegrow::simulate_tof_seeds(&scene.gt_left, 10);
            let prior = match fusegrow::triangulate_seeds(&seeds) {
                Ok(tri) => fusegrow::interpolate_prior(&tri, w, h),
                Err(_) => PriorMap::new_invalid(w, h),
            };
            let params = SimilarityParams {
                statistic: Statistic::Epc,
                sigma_p_sq,
                ..Default::default()
            };
            let state = fusegrow::grow(&scene.left, &scene.right, &seeds, &prior, &params, 0.5);
            let filled = fusegrow::fill_gaps(&state.disparity, 5, 13);
            let mask = fusegrow::nonoccluded_mask(&scene.gt_left, &scene.gt_right).unwrap();
            let epc = fusegrow::evaluate(&state.disparity, &scene.gt_left, &mask, name, "epc")
                .unwrap()
                .accuracy_percent;
            let epc_filled =
                fusegrow::evaluate(&filled, &scene.gt_left, &mask, name, "epc-filled")
                    .unwrap()
                    .accuracy_percent;
            mean_filled += epc_filled / scenes.len() as f64;
            println!("{sigma_p_sq:<11} {name:<10} {epc:6.2}%  {epc_filled:6.2}%");
        }
        println!("{sigma_p_sq:<11} mean epc-filled: {mean_filled:6.2}%");
    }

    // Reference: photometric-only variants at tau = 0.5.
    for stat in [Statistic::Mncc, Statistic::Expssd] {
        for (name, cfg) in &scenes {
            let scene = planar_scene(cfg);
            let (w, h) = (scene.left.width(), scene.left.height());
            let seeds = fusegrow::simulate_tof_seeds(&scene.gt_left, 10);
            let prior = PriorMap::new_invalid(w, h);
            let params = SimilarityParams {
                statistic: stat,
                ..Default::default()
            };
            let state = fusegrow::grow(&scene.left, &scene.right, &seeds, &prior, &params, 0.5);
            let mask = fusegrow::nonoccluded_mask(&scene.gt_left, &scene.gt_right).unwrap();
            let rep = fusegrow::evaluate(&state.disparity, &scene.gt_left, &mask, name, stat.name())
                .unwrap();
            println!("{:<8} {name:<10} {:6.2}%", stat.name(), rep.accuracy_percent);
        }
    }
}
