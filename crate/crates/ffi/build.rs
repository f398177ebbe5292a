fn main() {
    let crate_root = std::env::var("CARGO_MANIFEST_DIR").unwrap();
    let header = format!("{crate_root}/include/helisheet.h");
    match cbindgen::generate(&crate_root) {
        Ok(bindings) => {
            bindings.write_to_file(header);
        }
        Err(e) => {
            // keep the committed header usable even when cbindgen is absent
            println!("cargo:warning=cbindgen failed: {e}");
        }
    }
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
}
