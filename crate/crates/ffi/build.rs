use std::env;
use std::path::PathBuf;

fn main() {
    let crate_dir = PathBuf::from(env::var("CARGO_MANIFEST_DIR").expect("set by cargo"));
    let header = crate_dir.join("include").join("gradings.h");
    let mut config = cbindgen::Config::default();
    config.language = cbindgen::Language::C;
    config.include_guard = Some("GRADINGS_FFI_H".to_string());
    config.cpp_compat = true;
    config.documentation = true;
    cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(config)
        .generate()
        .expect("header generation")
        .write_to_file(header);
    println!("cargo:rerun-if-changed=src/lib.rs");
}
