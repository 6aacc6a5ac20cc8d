//! Writes synthetic scenes in the Middlebury-2006 directory layout
//! (view1/view5 PNG, disp1/disp5 8-bit PNG) so the dataset harness can be
//! exercised without the real data.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use fusegrow::imaging::RgbImage;
use fusegrow::synthetic::{planar_scene, PlanarSceneConfig};
use fusegrow::{DisparityMap, GrayImage};

fn save_gray_png(img: &GrayImage, path: &Path) {
    let mut rgb = RgbImage::new(img.width(), img.height());
    for v in 0..img.height() {
        for u in 0..img.width() {
            let x = (img.get(u, v) * 255.0).round() as u8;
            rgb.set(u, v, [x, x, x]);
        }
    }
    rgb.save_png(path).unwrap();
}

fn save_disp_png(map: &DisparityMap, path: &Path) {
    let data: Vec<u8> = (0..map.height())
        .flat_map(|v| (0..map.width()).map(move |u| (u, v)))
        .map(|(u, v)| map.get(u, v).map_or(0, |d| d.round().clamp(1.0, 255.0) as u8))
        .collect();
    let file = File::create(path).unwrap();
    let mut enc = png::Encoder::new(BufWriter::new(file), map.width() as u32, map.height() as u32);
    enc.set_color(png::ColorType::Grayscale);
    enc.set_depth(png::BitDepth::Eight);
    enc.write_header().unwrap().write_image_data(&data).unwrap();
}

fn main() {
    let root = std::env::args().nth(1).unwrap_or("/tmp/fakemb".into());
    let configs = [
        ("Lampshade1", PlanarSceneConfig::default()),
        (
            "Monopoly",
            PlanarSceneConfig {
                base_disparity: 22.0,
                rng_seed: 0xbeef,
                ..PlanarSceneConfig::default()
            },
        ),
        (
            "Plastic",
            PlanarSceneConfig {
                base_disparity: 10.0,
                rng_seed: 0xca4e,
                ..PlanarSceneConfig::default()
            },
        ),
    ];
    for (name, cfg) in configs {
        let dir = Path::new(&root).join(name);
        std::fs::create_dir_all(&dir).unwrap();
        let scene = planar_scene(&cfg);
        save_gray_png(&scene.left, &dir.join("view1.png"));
        save_gray_png(&scene.right, &dir.join("view5.png"));
        save_disp_png(&scene.gt_left, &dir.join("disp1.png"));
        save_disp_png(&scene.gt_right, &dir.join("disp5.png"));
    }
    println!("fake dataset written to {root}");
}
