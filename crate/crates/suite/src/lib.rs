//! Holds the acceptance test (`tests/acceptance.rs`). It lives in its own
//! package so that a failing criterion does not stop the other test binaries
//! of the workspace from running.
