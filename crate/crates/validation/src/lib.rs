//! Holds the acceptance harness in `tests/acceptance.rs`.
//!
//! It lives in its own package so that `cargo test --workspace` runs it after
//! every other test suite: a failing criterion makes the harness exit
//! non-zero, and cargo stops at the first failing test binary.
