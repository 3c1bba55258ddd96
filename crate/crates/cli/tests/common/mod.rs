//! Helpers for driving the compiled binary from integration tests.

use std::path::{Path, PathBuf};
use std::process::Output;

pub fn testdata() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../testdata").canonicalize().unwrap()
}

pub fn run_carve<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    std::process::Command::new(env!("CARGO_BIN_EXE_carve"))
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

pub fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("exit code")
}
