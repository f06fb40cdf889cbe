//! Log-likelihood ratios, `log(p0 / p1)`: positive favours bit 0, zero is an
//! erasure.

pub type Llr = f64;

/// Default saturation bound for every decoder message.
pub const MAX_LLR: Llr = 64.0;

/// 0 for `x >= 0`, 1 for `x < 0`.
#[inline]
pub fn sign_bit(x: Llr) -> u8 {
    u8::from(x < 0.0)
}

/// Hard decision; an exact zero decides bit 0.
#[inline]
pub fn hard_decision(x: Llr) -> u8 {
    sign_bit(x)
}

pub fn hard_decisions(llrs: &[Llr]) -> Vec<u8> {
    llrs.iter().map(|&x| hard_decision(x)).collect()
}

#[inline]
pub fn saturate(x: Llr, bound: Llr) -> Llr {
    x.clamp(-bound, bound)
}

/// The LLR that carries `bit` with reliability `magnitude`.
#[inline]
pub fn from_bit(bit: u8, magnitude: Llr) -> Llr {
    if bit & 1 == 0 {
        magnitude
    } else {
        -magnitude
    }
}
