//! Acceptance run for the workspace.
//!
//! The checks live in `tests/acceptance.rs`; run them with
//! `cargo test -p nonlocal-validation --test acceptance`. Each criterion
//! prints one `PASS` or `FAIL` line and the process exits non-zero if any
//! criterion fails.
