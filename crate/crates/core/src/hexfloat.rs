//! C99-style hexadecimal float literals (`0x1.8p+1`) for bit-exact text round trips.

/// Formats `v` as a hexadecimal float. NaN and infinities use `nan`, `inf`, `-inf`.
pub fn format(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let bits = v.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let mant = bits & ((1u64 << 52) - 1);
    if exp == 0 && mant == 0 {
        return format!("{sign}0x0p+0");
    }
    let (lead, e) = if exp == 0 { (0, -1022) } else { (1, exp - 1023) };
    let mut digits = format!("{mant:013x}");
    while digits.ends_with('0') {
        digits.pop();
    }
    let es = if e >= 0 { format!("+{e}") } else { e.to_string() };
    if digits.is_empty() {
        format!("{sign}0x{lead}p{es}")
    } else {
        format!("{sign}0x{lead}.{digits}p{es}")
    }
}

/// Parses the output of [`format`] (and plain decimal floats as a convenience).
pub fn parse(s: &str) -> Option<f64> {
    let s = s.trim();
    match s {
        "nan" => return Some(f64::NAN),
        "inf" => return Some(f64::INFINITY),
        "-inf" => return Some(f64::NEG_INFINITY),
        _ => {}
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let Some(hex) = body.strip_prefix("0x").or_else(|| body.strip_prefix("0X")) else {
        return s.parse().ok();
    };
    let (mant_str, exp_str) = hex.split_once(['p', 'P'])?;
    let exp: i64 = exp_str.parse().ok()?;
    let (int_part, frac_part) = mant_str.split_once('.').unwrap_or((mant_str, ""));
    if int_part.is_empty() || frac_part.len() > 13 {
        return None;
    }
    let lead = u64::from_str_radix(int_part, 16).ok()?;
    let frac = if frac_part.is_empty() {
        0
    } else {
        u64::from_str_radix(frac_part, 16).ok()? << (4 * (13 - frac_part.len()))
    };
    let v = match lead {
        0 if frac == 0 => 0.0,
        0 => {
            // subnormal: exponent field zero
            if exp != -1022 {
                return None;
            }
            f64::from_bits(frac)
        }
        1 => {
            let biased = exp + 1023;
            if !(1..=2046).contains(&biased) {
                return None;
            }
            f64::from_bits(((biased as u64) << 52) | frac)
        }
        _ => return None,
    };
    Some(if neg { -v } else { v })
}
