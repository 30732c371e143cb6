use crate::error::{Error, Result};
use crate::model::AtomWeights;

/// Values this close to zero are rounding residue of an exact cancellation
/// (`a + b = 1` or `a = b` with decimal inputs) and are treated as zero.
const SNAP: f64 = 8.0 * f64::EPSILON;

pub(crate) fn snap(x: f64) -> f64 {
    if x.abs() <= SNAP {
        0.0
    } else {
        x
    }
}

pub(crate) fn require_open_unit(name: &'static str, x: f64) -> Result<()> {
    if !x.is_finite() || x <= 0.0 || x >= 1.0 {
        return Err(Error::NormalCase(format!(
            "{name} = {x} is not in (0, 1); use the spectral measure of the normal operator"
        )));
    }
    Ok(())
}

/// Corner and continuous masses for trace `a` of the low atom of `p` and `b`
/// of the low atom of `q`.
pub fn weights(a: f64, b: f64) -> Result<AtomWeights> {
    require_open_unit("a", a)?;
    require_open_unit("b", b)?;
    let s = snap(a + b - 1.0);
    let d = snap(a - b);
    let w00 = s.max(0.0);
    let w11 = (-s).max(0.0);
    let w01 = d.max(0.0);
    let w10 = (-d).max(0.0);
    Ok(AtomWeights {
        w00,
        w01,
        w10,
        w11,
        w_cont: 1.0 - (w00 + w11) - (w01 + w10),
    })
}
