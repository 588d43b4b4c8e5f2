use std::env;
use std::path::PathBuf;

fn main() {
    let crate_dir = PathBuf::from(env::var("CARGO_MANIFEST_DIR").unwrap());
    cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_language(cbindgen::Language::C)
        .with_include_guard("SLAB_H")
        .with_documentation(true)
        .with_cpp_compat(true)
        .generate()
        .expect("unable to generate C bindings")
        .write_to_file(crate_dir.join("include").join("slab.h"));

    println!("cargo:rerun-if-changed=src");
    println!("cargo:rerun-if-changed=build.rs");
}
