//! Holds the acceptance suite; see `tests/acceptance`.
