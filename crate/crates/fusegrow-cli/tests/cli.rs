//! Black-box tests of the command-line interface: flag handling, exit
//! codes, determinism, and file formats.

mod common;

use common::{bin, exit_code, run_ok, write_pgm, write_scene};
use fusegrow::synthetic::{planar_scene, shifted_texture_pair, PlanarSceneConfig};
use fusegrow::GrayImage;

#[test]
fn simulate_tof_is_deterministic_and_counts_match() {
    let dir = tempfile::tempdir().unwrap();
    let scene = planar_scene(&PlanarSceneConfig::default());
    let (_, _, gt_left, _) = write_scene(&scene, dir.path());

    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    for out in [&out_a, &out_b] {
        run_ok(bin().args([
            "simulate-tof",
            "--gt",
            gt_left.to_str().unwrap(),
            "--step",
            "10",
            "--out",
            out.to_str().unwrap(),
        ]));
    }
    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    assert_eq!(a, b, "identical invocations must be byte-identical");

    let text = String::from_utf8(a).unwrap();
    let rows = text.lines().count() - 1;
    let expected = fusegrow::simulate_tof_seeds(&scene.gt_left, 10).len();
    assert_eq!(rows, expected);
    assert!(text.starts_with("u,u_prime,v\n"));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let scene = planar_scene(&PlanarSceneConfig::default());
    let (left, _, gt_left, _) = write_scene(&scene, dir.path());
    let out = dir.path().join("x.csv");

    // Zero step.
    assert_eq!(
        exit_code(bin().args([
            "simulate-tof",
            "--gt",
            gt_left.to_str().unwrap(),
            "--step",
            "0",
            "--out",
            out.to_str().unwrap(),
        ])),
        2
    );
    // Unknown flag.
    assert_eq!(
        exit_code(bin().args(["simulate-tof", "--nope", "1"])),
        2
    );
    // evaluate needs --gt-right or --mask.
    assert_eq!(
        exit_code(bin().args([
            "evaluate",
            "--est",
            gt_left.to_str().unwrap(),
            "--gt-left",
            gt_left.to_str().unwrap(),
            "--scene",
            "s",
            "--variant",
            "v",
        ])),
        2
    );
    // Runtime failure (missing file) exits 1.
    assert_eq!(
        exit_code(bin().args([
            "simulate-tof",
            "--gt",
            dir.path().join("missing.pfm").to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])),
        1
    );
    // Unequal image sizes exit 1.
    let small = dir.path().join("small.pgm");
    write_pgm(&GrayImage::constant(8, 8, 0.5), &small);
    let seeds = dir.path().join("s.csv");
    std::fs::write(&seeds, "u,u_prime,v\n5,2,5\n").unwrap();
    assert_eq!(
        exit_code(bin().args([
            "grow",
            "--left",
            left.to_str().unwrap(),
            "--right",
            small.to_str().unwrap(),
            "--seeds",
            seeds.to_str().unwrap(),
            "--out",
            dir.path().join("d.pfm").to_str().unwrap(),
        ])),
        1
    );
}

#[test]
fn grow_deterministic_and_mncc_warns() {
    let dir = tempfile::tempdir().unwrap();
    let (left_img, right_img) = shifted_texture_pair(48, 40, 3, 1234);
    let left = dir.path().join("l.pgm");
    let right = dir.path().join("r.pgm");
    write_pgm(&left_img, &left);
    write_pgm(&right_img, &right);
    let seeds = dir.path().join("seeds.csv");
    std::fs::write(&seeds, "u,u_prime,v\n24,21,20\n").unwrap();

    let out_a = dir.path().join("a.pfm");
    let out_b = dir.path().join("b.pfm");
    for out in [&out_a, &out_b] {
        run_ok(bin().args([
            "grow",
            "--left",
            left.to_str().unwrap(),
            "--right",
            right.to_str().unwrap(),
            "--seeds",
            seeds.to_str().unwrap(),
            "--stat",
            "expssd",
            "--tau",
            "0.5",
            "--out",
            out.to_str().unwrap(),
        ]));
    }
    assert_eq!(
        std::fs::read(&out_a).unwrap(),
        std::fs::read(&out_b).unwrap()
    );
    let map = fusegrow::imaging::load_disparity_pfm(&out_a, 1.0).unwrap();
    assert!(map.valid_count() > 500);

    // --emit-seeds stamps unmatched seed pixels in after growth. A wrong
    // seed grows nothing, so only the stamp can mark its pixel.
    let wrong_seeds = dir.path().join("wrong.csv");
    std::fs::write(&wrong_seeds, "u,u_prime,v\n24,10,20\n").unwrap();
    let stamped = dir.path().join("stamped.pfm");
    run_ok(bin().args([
        "grow",
        "--left",
        left.to_str().unwrap(),
        "--right",
        right.to_str().unwrap(),
        "--seeds",
        wrong_seeds.to_str().unwrap(),
        "--stat",
        "expssd",
        "--emit-seeds",
        "--out",
        stamped.to_str().unwrap(),
    ]));
    let stamped_map = fusegrow::imaging::load_disparity_pfm(&stamped, 1.0).unwrap();
    assert_eq!(stamped_map.get(24, 20), Some(14.0));

    // Sigma flags are meaningless for mncc and must produce a warning.
    let out = run_ok(bin().args([
        "grow",
        "--left",
        left.to_str().unwrap(),
        "--right",
        right.to_str().unwrap(),
        "--seeds",
        seeds.to_str().unwrap(),
        "--stat",
        "mncc",
        "--sigma-s-sq",
        "0.2",
        "--out",
        dir.path().join("m.pfm").to_str().unwrap(),
    ]));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("ignored"), "missing warning: {stderr}");
}

#[test]
fn evaluate_perfect_estimate_and_json_schema() {
    let dir = tempfile::tempdir().unwrap();
    let scene = planar_scene(&PlanarSceneConfig::default());
    let (_, _, gt_left, gt_right) = write_scene(&scene, dir.path());
    let report = dir.path().join("report.jsonl");

    let out = run_ok(bin().args([
        "evaluate",
        "--est",
        gt_left.to_str().unwrap(),
        "--gt-left",
        gt_left.to_str().unwrap(),
        "--gt-right",
        gt_right.to_str().unwrap(),
        "--scene",
        "synthetic",
        "--variant",
        "identity",
        "--out",
        report.to_str().unwrap(),
    ]));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("100.00%"), "table row: {stdout}");

    let line = std::fs::read_to_string(&report).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
    assert_eq!(parsed["scene"], "synthetic");
    assert_eq!(parsed["variant"], "identity");
    assert_eq!(parsed["accuracy_percent"], 100.0);
    for key in ["correct", "wrong", "unmatched", "evaluated_pixels"] {
        assert!(parsed[key].is_u64(), "missing count {key}");
    }
}

#[test]
fn config_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let scene = planar_scene(&PlanarSceneConfig::default());
    let (_, _, gt_left, _) = write_scene(&scene, dir.path());
    let conf = dir.path().join("fusegrow.conf");
    std::fs::write(&conf, "step = 20\n").unwrap();

    let from_config = dir.path().join("cfg.csv");
    run_ok(bin().args([
        "simulate-tof",
        "--config",
        conf.to_str().unwrap(),
        "--gt",
        gt_left.to_str().unwrap(),
        "--out",
        from_config.to_str().unwrap(),
    ]));
    let from_flag = dir.path().join("flag.csv");
    run_ok(bin().args([
        "simulate-tof",
        "--config",
        conf.to_str().unwrap(),
        "--gt",
        gt_left.to_str().unwrap(),
        "--step",
        "5",
        "--out",
        from_flag.to_str().unwrap(),
    ]));

    let rows = |p: &std::path::Path| std::fs::read_to_string(p).unwrap().lines().count() - 1;
    assert_eq!(
        rows(&from_config),
        fusegrow::simulate_tof_seeds(&scene.gt_left, 20).len()
    );
    assert_eq!(
        rows(&from_flag),
        fusegrow::simulate_tof_seeds(&scene.gt_left, 5).len()
    );
}

fn write_pinhole_calib(path: &std::path::Path) {
    // P = K [I | -C], right camera at x = 0.5, TOF intrinsics 100/100/8/8,
    // identity TOF-to-rig transform.
    let f = 400.0;
    let (cx, cy) = (64.0, 48.0);
    let mut text = String::new();
    text.push_str(&format!("{f} 0 {cx} 0\n0 {f} {cy} 0\n0 0 1 0\n"));
    text.push_str(&format!("{f} 0 {cx} {}\n0 {f} {cy} 0\n0 0 1 0\n", -f * 0.5));
    text.push_str("100 100 8 8\n");
    text.push_str("1 0 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 1\n");
    std::fs::write(path, text).unwrap();
}

#[test]
fn project_tof_matches_library_and_no_refine_is_superset() {
    let dir = tempfile::tempdir().unwrap();
    let calib = dir.path().join("calib.txt");
    write_pinhole_calib(&calib);

    let left_img = GrayImage::constant(128, 96, 0.5);
    let left = dir.path().join("l.pgm");
    let right = dir.path().join("r.pgm");
    write_pgm(&left_img, &left);
    write_pgm(&left_img, &right);

    // A 16x16 depth frame with a grid of valid depths; nearby depths differ
    // enough that the occupancy filter has something to remove.
    let mut depth = fusegrow::DisparityMap::new_invalid(16, 16);
    for j in (2..14).step_by(2) {
        for i in (2..14).step_by(2) {
            depth.set(i, j, 1.0 + ((i * 7 + j * 3) % 5) as f32);
        }
    }
    let tof_path = dir.path().join("tof.pfm");
    fusegrow::imaging::save_disparity_pfm(&depth, &tof_path).unwrap();

    let refined_csv = dir.path().join("refined.csv");
    let raw_csv = dir.path().join("raw.csv");
    run_ok(bin().args([
        "project-tof",
        "--tof",
        tof_path.to_str().unwrap(),
        "--calib",
        calib.to_str().unwrap(),
        "--left",
        left.to_str().unwrap(),
        "--right",
        right.to_str().unwrap(),
        "--out",
        refined_csv.to_str().unwrap(),
    ]));
    run_ok(bin().args([
        "project-tof",
        "--tof",
        tof_path.to_str().unwrap(),
        "--calib",
        calib.to_str().unwrap(),
        "--left",
        left.to_str().unwrap(),
        "--right",
        right.to_str().unwrap(),
        "--no-refine",
        "--out",
        raw_csv.to_str().unwrap(),
    ]));

    // The unrefined output must equal the library projection exactly.
    let calib_rig = fusegrow::CalibrationRig::from_file(&calib).unwrap();
    let tof = fusegrow::TofFrame {
        depth,
        intensity: None,
    };
    let expected = fusegrow::project_tof_seeds(&tof, &calib_rig, &left_img, &left_img);
    let raw = fusegrow::seeding::read_seeds_csv(&raw_csv).unwrap();
    assert_eq!(raw, expected);
    assert!(!raw.is_empty());

    // Refined output is a subset of the raw output.
    let refined = fusegrow::seeding::read_seeds_csv(&refined_csv).unwrap();
    assert!(refined.len() <= raw.len());
    for s in &refined {
        assert!(raw.contains(s));
    }
}

#[test]
fn empty_tof_frame_gives_empty_csv() {
    let dir = tempfile::tempdir().unwrap();
    let calib = dir.path().join("calib.txt");
    write_pinhole_calib(&calib);
    let img = GrayImage::constant(128, 96, 0.5);
    let left = dir.path().join("l.pgm");
    write_pgm(&img, &left);

    let empty = fusegrow::DisparityMap::new_invalid(16, 16);
    let tof_path = dir.path().join("tof.pfm");
    fusegrow::imaging::save_disparity_pfm(&empty, &tof_path).unwrap();

    let out = dir.path().join("seeds.csv");
    run_ok(bin().args([
        "project-tof",
        "--tof",
        tof_path.to_str().unwrap(),
        "--calib",
        calib.to_str().unwrap(),
        "--left",
        left.to_str().unwrap(),
        "--right",
        left.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_eq!(std::fs::read_to_string(&out).unwrap(), "u,u_prime,v\n");
}

#[test]
fn malformed_calibration_reports_line_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let calib = dir.path().join("calib.txt");
    std::fs::write(&calib, "1 2 bogus\n").unwrap();
    let img = GrayImage::constant(16, 16, 0.5);
    let left = dir.path().join("l.pgm");
    write_pgm(&img, &left);
    let tof = dir.path().join("t.pfm");
    fusegrow::imaging::save_disparity_pfm(&fusegrow::DisparityMap::new_invalid(4, 4), &tof)
        .unwrap();

    let out = bin()
        .args([
            "project-tof",
            "--tof",
            tof.to_str().unwrap(),
            "--calib",
            calib.to_str().unwrap(),
            "--left",
            left.to_str().unwrap(),
            "--right",
            left.to_str().unwrap(),
            "--out",
            dir.path().join("o.csv").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("line 1") && stderr.contains("field 3"),
        "diagnostic missing position: {stderr}"
    );
}

#[test]
fn grow_epc_full_pipeline_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let scene = planar_scene(&PlanarSceneConfig::default());
    let (left, right, gt_left, gt_right) = write_scene(&scene, dir.path());

    let seeds = dir.path().join("seeds.csv");
    run_ok(bin().args([
        "simulate-tof",
        "--gt",
        gt_left.to_str().unwrap(),
        "--out",
        seeds.to_str().unwrap(),
    ]));

    let disp = dir.path().join("disp.pfm");
    let prior = dir.path().join("prior.pfm");
    let tri = dir.path().join("tri.obj");
    let color = dir.path().join("disp.png");
    let ply = dir.path().join("disp.ply");
    run_ok(bin().args([
        "grow",
        "--left",
        left.to_str().unwrap(),
        "--right",
        right.to_str().unwrap(),
        "--seeds",
        seeds.to_str().unwrap(),
        "--stat",
        "epc",
        "--fill-gaps",
        "--out",
        disp.to_str().unwrap(),
        "--prior-out",
        prior.to_str().unwrap(),
        "--tri-out",
        tri.to_str().unwrap(),
        "--color-out",
        color.to_str().unwrap(),
        "--ply-out",
        ply.to_str().unwrap(),
        "--focal",
        "1000",
        "--baseline",
        "0.49",
    ]));

    // Outputs exist and score sensibly against ground truth.
    for path in [&disp, &prior] {
        assert!(fusegrow::imaging::load_disparity_pfm(path, 1.0).is_ok());
    }
    assert!(std::fs::read_to_string(&tri).unwrap().starts_with("v "));
    assert!(std::fs::read(&color).unwrap().len() > 100);
    assert!(std::fs::read_to_string(&ply).unwrap().starts_with("ply\n"));

    let out = run_ok(bin().args([
        "evaluate",
        "--est",
        disp.to_str().unwrap(),
        "--gt-left",
        gt_left.to_str().unwrap(),
        "--gt-right",
        gt_right.to_str().unwrap(),
        "--scene",
        "synthetic",
        "--variant",
        "epc-filled",
    ]));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let json_line = stdout.lines().last().unwrap();
    let parsed: serde_json::Value = serde_json::from_str(json_line).unwrap();
    let acc = parsed["accuracy_percent"].as_f64().unwrap();
    assert!(acc > 75.0, "accuracy {acc}");
}
