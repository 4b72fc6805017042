mod common;

use common::oracles::packing_count as oracle_count;
use common::*;
use proptest::prelude::*;
use roomsim::idf::IdfDocument;
use roomsim::room::{apply_room_geometry, extract_window_template, pack_windows, room_geometry, PackingRules, WindowTemplate};

const TOL: f64 = 1e-9;

fn template(width: f64) -> WindowTemplate {
    WindowTemplate {
        width,
        height: 1.2,
        sill_height: 0.9,
    }
}

fn check(wall: f64, width: f64, margin: f64, gap: f64) -> Result<(), TestCaseError> {
    let layout = pack_windows(wall, template(width), margin, gap);
    let n = oracle_count(wall, width, margin, gap);
    prop_assert_eq!(layout.window_count, n, "wall {} width {} margin {} gap {}", wall, width, margin, gap);
    prop_assert_eq!(layout.x_offsets.len(), n);
    if n == 0 {
        return Ok(());
    }
    let first = layout.x_offsets[0];
    let last_end = layout.x_offsets[n - 1] + width;
    prop_assert!(first >= margin - 1e-6, "left margin {}", first);
    prop_assert!(last_end <= wall - margin + 1e-6, "right edge {}", last_end);
    prop_assert!((first - (wall - last_end)).abs() < 1e-6, "not centered");
    for pair in layout.x_offsets.windows(2) {
        prop_assert!((pair[1] - pair[0] - width - gap).abs() < 1e-9);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn count_and_placement_match_oracle(
        wall in 0.5f64..30.0,
        width in 0.2f64..4.0,
        margin in 0.0f64..1.5,
        gap in 0.0f64..1.5,
    ) {
        check(wall, width, margin, gap)?;
    }

    #[test]
    fn exact_boundary_fits(
        n in 1usize..12,
        width in 0.2f64..3.0,
        margin in 0.0f64..1.0,
        gap in 0.0f64..1.0,
        nudge in prop::sample::select(vec![-1e-6, -1e-10, 0.0, 1e-10, 1e-6]),
    ) {
        let wall = 2.0 * margin + n as f64 * width + (n - 1) as f64 * gap + nudge;
        check(wall, width, margin, gap)?;
        let expected = if nudge < -TOL { n - 1 } else { n };
        prop_assert_eq!(pack_windows(wall, template(width), margin, gap).window_count, expected);
    }
}

#[test]
fn walls_narrower_than_one_window_get_none() {
    for wall in [0.0, 0.5, 1.0, 2.49] {
        assert_eq!(pack_windows(wall, template(1.5), 0.5, 0.5).window_count, 0);
    }
    assert_eq!(pack_windows(2.5, template(1.5), 0.5, 0.5).window_count, 1);
}

#[test]
fn applied_windows_lie_inside_the_facade() {
    let doc = IdfDocument::parse(REFERENCE_IDF).unwrap();
    let t = extract_window_template(&doc).unwrap();
    let rules = PackingRules::default();
    for width in [2.0, 2.5, 3.0, 4.0, 4.5, 6.0, 9.7, 12.0] {
        let spec = room(width, 5.0, 3.0, 0.0, 0.5);
        let g = room_geometry(&apply_room_geometry(&doc, &spec, t, rules).unwrap()).unwrap();
        let expected = oracle_count(width, t.width, rules.margin, rules.gap);
        assert_eq!(g.window_count(), expected, "width {width}");
        let facade = g.surfaces.iter().find(|s| !s.windows.is_empty());
        let Some(facade) = facade else { continue };
        assert!(facade.outside_boundary_condition.eq_ignore_ascii_case("Outdoors"));
        for w in &facade.windows {
            for v in &w.vertices {
                assert!(v[1].abs() < 1e-9, "window off the y=0 facade");
                assert!(v[0] >= rules.margin - 1e-9 && v[0] <= width - rules.margin + 1e-9);
                assert!(v[2] > 0.0 && v[2] < 3.0);
            }
        }
    }
}
