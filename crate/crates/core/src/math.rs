//! Float helpers routed through `libm` so results are identical with and
//! without the standard library.

/// Euclidean length of the vector (dx, dy).
#[inline]
pub fn hypot(dx: f64, dy: f64) -> f64 {
    libm::sqrt(dx * dx + dy * dy)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

/// Quantizes `x` to `decimals` fractional digits, rounding half-up
/// (half away from zero — the quantities this crate deals in are
/// non-negative).
///
/// The result is the f64 nearest to the decimal value it prints as, so a
/// quantized number survives a format/parse round trip bit-exactly.
#[inline]
pub fn quantize(x: f64, decimals: u32) -> f64 {
    let scale = pow10(decimals);
    libm::round(x * scale) / scale
}

#[inline]
fn pow10(decimals: u32) -> f64 {
    match decimals {
        0 => 1.0,
        1 => 10.0,
        2 => 100.0,
        3 => 1000.0,
        _ => {
            let mut p = 1000.0;
            for _ in 3..decimals {
                p *= 10.0;
            }
            p
        }
    }
}
