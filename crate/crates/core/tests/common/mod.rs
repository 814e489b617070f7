use std::path::{Path, PathBuf};

use chartscribe_core::ingestion::load_bundle;
use chartscribe_core::model::ChartBundle;

pub fn fixture_dirs() -> Vec<PathBuf> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let mut dirs: Vec<PathBuf> = std::fs::read_dir(root)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();
    dirs
}

pub fn fixtures() -> Vec<ChartBundle> {
    fixture_dirs().iter().map(|d| load_bundle(d).unwrap()).collect()
}
