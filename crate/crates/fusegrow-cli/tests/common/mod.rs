//! Shared fixtures for the CLI and acceptance suites.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fusegrow::GrayImage;

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fusegrow"))
}

pub fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("failed to spawn fusegrow");
    assert!(
        out.status.success(),
        "command failed ({:?}):\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn exit_code(cmd: &mut Command) -> i32 {
    cmd.output()
        .expect("failed to spawn fusegrow")
        .status
        .code()
        .expect("killed by signal")
}

/// Writes a luminance image as an 8-bit binary PGM.
pub fn write_pgm(img: &GrayImage, path: &Path) {
    let mut bytes = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    bytes.extend(
        img.data()
            .iter()
            .map(|&x| (x * 255.0).round().clamp(0.0, 255.0) as u8),
    );
    std::fs::write(path, bytes).unwrap();
}

/// Materializes a synthetic planar scene (images as PGM, ground truth as
/// PFM) into `dir` and returns the four paths (left, right, gt_left,
/// gt_right).
pub fn write_scene(
    scene: &fusegrow::synthetic::StereoScene,
    dir: &Path,
) -> (PathBuf, PathBuf, PathBuf, PathBuf) {
    let left = dir.join("left.pgm");
    let right = dir.join("right.pgm");
    let gt_left = dir.join("gt_left.pfm");
    let gt_right = dir.join("gt_right.pfm");
    write_pgm(&scene.left, &left);
    write_pgm(&scene.right, &right);
    fusegrow::imaging::save_disparity_pfm(&scene.gt_left, &gt_left).unwrap();
    fusegrow::imaging::save_disparity_pfm(&scene.gt_right, &gt_right).unwrap();
    (left, right, gt_left, gt_right)
}
