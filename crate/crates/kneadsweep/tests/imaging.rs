//! Rendering checks that cross module boundaries: grid-to-pixel
//! orientation, class and long-term-code coloring, overlays in chart
//! coordinates, and on-disk image formats.

use kneadsweep::integrate::{Branch, IntegrationConfig};
use kneadsweep::models::{ModelKind, ParamTransform};
use kneadsweep::render::{
    overlay_curves, ppm_bytes, render_grid, render_theory, write_image, Colormap, Image,
    OverlayCurve, RenderOptions,
};
use kneadsweep::sweep::{CellClass, SweepConfig, SweepGrid, DCP_CHAOTIC_BIT, DCP_ESCAPED};
use kneadsweep::symbolic::{EncodeMode, KneadingConfig};
use kneadsweep::theory::{DiagramConfig, FeasCell, ReturnMapParams, TheoryGrid, ZeroSignRule};
use std::fs;

fn hand_grid(mode: EncodeMode) -> SweepGrid {
    SweepGrid {
        config: SweepConfig {
            model: ModelKind::ChuaCubic,
            transform: ParamTransform::Identity,
            u_range: (0.0, 1.0),
            v_range: (0.0, 1.0),
            resolution: (2, 2),
            encoding: KneadingConfig::new(1, 4, 0.5, mode).unwrap(),
            integration: IntegrationConfig::default(),
            branch: Branch::Gamma1,
        },
        values: vec![0.0, 1.0, 0.5, 0.25],
        classes: vec![
            CellClass::Ok,
            CellClass::Ok,
            CellClass::Escaped,
            CellClass::TimedOut,
        ],
        dcp: if mode == EncodeMode::Dcp {
            Some(vec![2, 6, DCP_ESCAPED, DCP_CHAOTIC_BIT | 40])
        } else {
            None
        },
    }
}

#[test]
fn low_v_row_renders_at_image_bottom() {
    let grid = hand_grid(EncodeMode::Full);
    let opts = RenderOptions::default();
    let img = render_grid(&grid, &opts);
    let cmap = Colormap::new(opts.seed);
    // Grid row 0 holds values 0.0 and 1.0 and is the bottom image row.
    assert_eq!(img.get(0, 1), cmap.color(0.0));
    assert_eq!(img.get(1, 1), cmap.color(1.0));
    // Grid row 1: escaped and timed-out cells use the status colors.
    assert_eq!(img.get(0, 0), opts.escape);
    assert_eq!(img.get(1, 0), opts.timeout);
}

#[test]
fn long_term_classes_color_by_code() {
    let grid = hand_grid(EncodeMode::Dcp);
    let opts = RenderOptions::default();
    let img = render_grid(&grid, &opts);
    // Bottom row: two periodic cells with different periods get distinct
    // hashed colors.
    assert_ne!(img.get(0, 1), img.get(1, 1));
    // Top row: escaped cell black, chaotic cell gray from its value.
    assert_eq!(img.get(0, 0), opts.escape);
    let l = (255.0f64 * (1.0 - 0.25)).round() as u8;
    assert_eq!(img.get(1, 0), [l, l, l]);
}

#[test]
fn theory_cells_use_the_three_state_palette() {
    let grid = TheoryGrid {
        config: DiagramConfig {
            params: ReturnMapParams::default(),
            code: vec![1, 1],
            mu_abs_range: (1e-3, 0.5),
            nu0_range: (0.1, 0.9),
            resolution: (3, 1),
            rule: ZeroSignRule::default(),
        },
        values: vec![-0.1, 0.2, 0.0],
        cells: vec![
            FeasCell::FeasibleNeg,
            FeasCell::FeasiblePos,
            FeasCell::Infeasible,
        ],
    };
    let opts = RenderOptions::default();
    let img = render_theory(&grid, &opts);
    assert_eq!(img.get(0, 0), opts.feas_neg);
    assert_eq!(img.get(1, 0), opts.feas_pos);
    assert_eq!(img.get(2, 0), opts.infeasible);
}

#[test]
fn overlays_land_in_chart_coordinates() {
    let mut img = Image::new(100, 50);
    // Chart covers a in [6, 16], b in [0, 10]; a vertical line at a = 11
    // must paint column floor((11-6)/10 * 100) = 50.
    overlay_curves(
        &mut img,
        (6.0, 16.0),
        (0.0, 10.0),
        &[
            OverlayCurve::Vertical(11.0),
            OverlayCurve::Graph(Box::new(|u| if u < 10.0 { Some(2.5) } else { None })),
        ],
        [200, 30, 30],
    );
    assert_eq!(img.get(50, 0), [200, 30, 30]);
    assert_eq!(img.get(50, 49), [200, 30, 30]);
    // Graph row: t = 2.5/10 -> y = 50 - 1 - floor(0.25*50) = 37; columns
    // up to u < 10 i.e. x < 40.
    assert_eq!(img.get(0, 37), [200, 30, 30]);
    assert_eq!(img.get(39, 37), [200, 30, 30]);
    assert_eq!(img.get(41, 37), [255, 255, 255]);
}

#[test]
fn image_files_roundtrip_on_disk() {
    let mut img = Image::new(5, 4);
    img.set(0, 0, [9, 8, 7]);
    img.set(4, 3, [1, 2, 3]);
    let dir = tempfile::tempdir().unwrap();

    let ppm = dir.path().join("out.ppm");
    write_image(&ppm, &img).unwrap();
    assert_eq!(fs::read(&ppm).unwrap(), ppm_bytes(&img));

    let png = dir.path().join("out.png");
    write_image(&png, &img).unwrap();
    let back = image::open(&png).unwrap().to_rgb8();
    assert_eq!(back.get_pixel(0, 0).0, [9, 8, 7]);
    assert_eq!(back.get_pixel(4, 3).0, [1, 2, 3]);

    let bad = dir.path().join("out.gif");
    assert!(write_image(&bad, &img).is_err());
    assert!(!bad.exists());
}
