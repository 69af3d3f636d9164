//! Acceptance checks for `dfsim`, kept in their own package so that they run
//! after every other test target in the workspace.
//!
//! Run them alone with `cargo test -p dfsim-validation --test acceptance`.
