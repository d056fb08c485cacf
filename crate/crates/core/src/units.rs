//! Energy unit conversions. Hartree is the internal unit everywhere.

pub const HARTREE_TO_EV: f64 = 27.211386;
pub const HARTREE_TO_CM: f64 = 219474.6313632;

/// Free-electron g value.
pub const G_ELECTRON: f64 = 2.002319;

pub fn ev_to_hartree(ev: f64) -> f64 {
    ev / HARTREE_TO_EV
}

pub fn hartree_to_ev(h: f64) -> f64 {
    h * HARTREE_TO_EV
}

pub fn cm_to_hartree(cm: f64) -> f64 {
    cm / HARTREE_TO_CM
}

pub fn hartree_to_cm(h: f64) -> f64 {
    h * HARTREE_TO_CM
}
