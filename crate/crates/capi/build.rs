use std::env;
use std::path::PathBuf;

fn main() {
    let crate_dir = env::var("CARGO_MANIFEST_DIR").unwrap();
    let header = PathBuf::from(&crate_dir).join("include").join("mukai_walls.h");

    let config = cbindgen::Config {
        language: cbindgen::Language::C,
        include_guard: Some("MUKAI_WALLS_H".into()),
        cpp_compat: true,
        documentation: true,
        header: Some("/* C interface to the mukai-walls lattice engine. */".into()),
        ..Default::default()
    };

    match cbindgen::Builder::new().with_crate(&crate_dir).with_config(config).generate() {
        Ok(bindings) => {
            std::fs::create_dir_all(header.parent().unwrap()).ok();
            bindings.write_to_file(&header);
        }
        Err(err) => {
            // header generation failures must not break library builds
            println!("cargo:warning=cbindgen failed: {err}");
        }
    }
    println!("cargo:rerun-if-changed=src/lib.rs");
}
