//! Benchmark fixtures shared by the criterion targets.

use spinpair::{BackendKind, CutoffPolicy, Prepared, Scenario};

/// Rubidium-85 at 2 uK with a basis of at least `modes` modes.
pub fn prepared(modes: usize, backend: BackendKind) -> Prepared {
    let mut s = Scenario::rb85(2e-6).expect("valid scenario");
    s.cutoff = CutoffPolicy::Modes(modes);
    s.backend = backend;
    s.prepare().expect("scenario prepares")
}
