//! Holds the `acceptance` test target; see `crates/core/tests/acceptance.rs`.
