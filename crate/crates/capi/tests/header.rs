//! The cbindgen header must exist after a build and expose the full API.

#[test]
fn generated_header_covers_the_api() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/mukai_walls.h");
    let text = std::fs::read_to_string(header).expect("header generated by build.rs");
    for decl in [
        "typedef struct MwSurface MwSurface",
        "mw_surface_from_json",
        "mw_surface_free",
        "mw_surface_report",
        "mw_mukai_pairing",
        "mw_category_walls",
        "mw_stability_walls",
        "mw_star_check",
        "mw_fm_param",
        "mw_q_binomial",
        "mw_string_free",
        "mw_last_error",
        "MwErrInvalidArgument",
    ] {
        assert!(text.contains(decl), "header is missing {decl}");
    }
    assert!(text.contains("#ifndef MUKAI_WALLS_H"));
}
