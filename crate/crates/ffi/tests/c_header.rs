//! Compiles a small C program against the generated header and links it
//! with the static library.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include "aoristic.h"

int main(void) {
    double atoms[2] = {0.51, 0.58};
    double a[1] = {0.45};
    double l[1] = {0.4};
    AorObservedData *data = NULL;
    AorPrior *prior = NULL;
    AorPosteriorSample *sample = NULL;
    size_t len = 0;
    double p = 0.0;
    if (aor_observed_new(atoms, 2, a, l, 1, 0.0, 1.0, &data) != AOR_STATUS_OK) return 1;
    if (aor_estimate_atom_prob(data, &p) != AOR_STATUS_OK) return 2;
    if (aor_prior_new(12.0, 1.2, 0.1, 0.0, 1.0, &prior) != AOR_STATUS_OK) return 3;
    if (aor_posterior_run(data, prior, 100, 500, 1, 1, &sample) != AOR_STATUS_OK) return 4;
    if (aor_posterior_len(sample, &len) != AOR_STATUS_OK || len != 500) return 5;
    if (aor_prior_new(0.0, 0.0, 0.1, 0.0, 1.0, &prior) != AOR_STATUS_INVALID_ARGUMENT) return 6;
    char msg[128];
    if (aor_last_error_message(msg, sizeof msg) == 0) return 7;
    printf("p=%.6f len=%zu\n", p, len);
    aor_posterior_free(sample);
    aor_observed_free(data);
    return 0;
}
"#;

#[test]
fn c_program_links_and_runs() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libaoristic_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let bin = dir.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "p=0.666667 len=500\n");
}
