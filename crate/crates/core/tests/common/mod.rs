#![allow(dead_code)]

use std::path::PathBuf;

use nsframes::config::{AnalysisConfig, System};
use nsframes::family::{FamilyRule, GenIndex, GeneratorFamily, StepRule};
use nsframes::spectrum::{PiecewiseSpectrum, Segment, C64};
use nsframes::systems::{build_gabor_family, AffineWindow, ExtendedAffineParams, GaborWindow, WeylHeisenbergParams};

pub fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture_config(name: &str) -> AnalysisConfig {
    AnalysisConfig::load(&fixture_path(name)).unwrap()
}

pub fn ramp_window(tail_slope: f64) -> PiecewiseSpectrum {
    PiecewiseSpectrum::new(
        vec![Segment::new(0.0, 1.0, c(1.0), c(1.0)).unwrap(), Segment::new(1.0, 2.0, c(0.0), c(tail_slope)).unwrap()],
        0.0,
    )
    .unwrap()
}

pub fn two_window_params() -> WeylHeisenbergParams {
    WeylHeisenbergParams {
        a: 1.0,
        b: 0.0,
        lambda: 2.0,
        windows: vec![
            GaborWindow { p0: 1.0, q0: 0.5, spectrum: ramp_window(1.0) },
            GaborWindow { p0: 1.0, q0: 0.5, spectrum: ramp_window(0.5) },
        ],
    }
}

pub fn two_window_family() -> GeneratorFamily {
    build_gabor_family(&two_window_params()).unwrap()
}

pub fn tiling(amplitude: f64) -> GeneratorFamily {
    let base = PiecewiseSpectrum::indicator(0.0, 0.5, amplitude).unwrap();
    GeneratorFamily::translates(FamilyRule::PeriodicTiling { bases: vec![base], period: 0.5 }, 2.0, 0.5).unwrap()
}

pub fn shannon() -> GeneratorFamily {
    let base = PiecewiseSpectrum::indicator(0.0, 1.0, 1.0).unwrap();
    GeneratorFamily::translates(FamilyRule::PeriodicTiling { bases: vec![base], period: 1.0 }, 1.0, 1.0).unwrap()
}

/// The tiling with generator `0` repeated in slot 1.
pub fn duplicated() -> GeneratorFamily {
    let base = PiecewiseSpectrum::indicator(0.0, 0.5, 2.0).unwrap();
    GeneratorFamily::new(
        FamilyRule::PeriodicTiling { bases: vec![base.clone()], period: 0.5 },
        StepRule::PerSlot(vec![2.0, 2.0]),
        0.5,
    )
    .unwrap()
    .with_extra(vec![(GenIndex::new(0, 1), base)])
    .unwrap()
}

pub fn shannon_gabor() -> GeneratorFamily {
    let p = WeylHeisenbergParams {
        a: 1.0,
        b: 0.0,
        lambda: 1.0,
        windows: vec![GaborWindow { p0: 0.5, q0: 1.0, spectrum: PiecewiseSpectrum::indicator(0.0, 1.0, 1.0).unwrap() }],
    };
    build_gabor_family(&p).unwrap()
}

pub fn dyadic_wavelet() -> ExtendedAffineParams {
    ExtendedAffineParams {
        c: 1.0,
        d: 1.0,
        lambda: None,
        windows: vec![AffineWindow { q0: 1.0, spectrum: PiecewiseSpectrum::indicator(1.0, 2.0, 1.0).unwrap() }],
    }
}

/// Frame fixtures with their names.
pub fn frame_fixtures() -> Vec<(&'static str, GeneratorFamily)> {
    vec![
        ("two-window", two_window_family()),
        ("tiling", tiling(2.0)),
        ("tiling-normalized", tiling(2f64.sqrt())),
        ("shannon", shannon()),
        ("shannon-gabor", shannon_gabor()),
        ("duplicated", duplicated()),
    ]
}

pub fn family_of(cfg: &AnalysisConfig) -> GeneratorFamily {
    match cfg.system.build().unwrap() {
        System::Wavelet(_) => panic!("wavelet fixture has no translate family"),
        s => s.family().unwrap(),
    }
}
