//! Probes for a system BLAS/LAPACK library at build time.
//!
//! When one is found, the `have_system_lapack` cfg is set and the f64
//! eigensolver dispatches to LAPACK's divide-and-conquer routine, which is
//! several times faster than the pure-Rust fallback on large chains. When no
//! library is found the crate still builds and uses the pure-Rust path.

fn main() {
    println!("cargo:rustc-check-cfg=cfg(have_system_lapack)");

    if pkg_config::Config::new().probe("openblas").is_ok() {
        println!("cargo:rustc-cfg=have_system_lapack");
        return;
    }

    // Fall back to well-known multiarch locations when pkg-config metadata
    // is absent but the shared library itself is installed.
    let candidates = [
        "/usr/lib/x86_64-linux-gnu",
        "/usr/lib/aarch64-linux-gnu",
        "/usr/lib64",
        "/usr/lib",
        "/usr/local/lib",
    ];
    for dir in candidates {
        let path = format!("{dir}/libopenblas.so");
        if std::path::Path::new(&path).exists() {
            println!("cargo:rustc-link-search=native={dir}");
            println!("cargo:rustc-link-lib=dylib=openblas");
            println!("cargo:rustc-cfg=have_system_lapack");
            return;
        }
    }
}
