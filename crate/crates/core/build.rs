use std::env;
use std::path::Path;

// The reference LAPACK/BLAS archives are preferred over whatever the system
// `liblapack.so` alternative points at: some OpenBLAS CPU kernels return
// wrong eigenvalues from the nonsymmetric Hessenberg QR. Set
// PEAKON_LAPACK=system to link the shared system libraries instead.
const REFERENCE_DIRS: [&str; 2] = [
    "/usr/lib/x86_64-linux-gnu/lapack",
    "/usr/lib/x86_64-linux-gnu/blas",
];

fn main() {
    println!("cargo:rerun-if-env-changed=PEAKON_LAPACK");
    let system = env::var("PEAKON_LAPACK")
        .map(|v| v == "system")
        .unwrap_or(false);
    let reference = REFERENCE_DIRS
        .iter()
        .zip(["liblapack.a", "libblas.a"])
        .all(|(d, f)| Path::new(d).join(f).exists());
    if reference && !system {
        for d in REFERENCE_DIRS {
            println!("cargo:rustc-link-search=native={d}");
        }
        println!("cargo:rustc-link-lib=static=lapack");
        println!("cargo:rustc-link-lib=static=blas");
        println!("cargo:rustc-link-lib=gfortran");
    } else {
        println!("cargo:rustc-link-lib=lapack");
        println!("cargo:rustc-link-lib=blas");
    }
}
