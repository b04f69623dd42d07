//! `a+bi` / `a-bi` syntax for complex numbers on the command line and in matrix files.

use pfpauli::Complex64;

/// Parses `3`, `-2.5e-3`, `i`, `-i`, `0.5i`, `1+2i`, `1e-3-4.5e2i`. No whitespace.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let bad = || format!("malformed complex number {s:?}");
    if s.is_empty() || s.chars().any(char::is_whitespace) {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('i') else {
        return match s.parse::<f64>() {
            Ok(re) if re.is_finite() => Ok(Complex64::new(re, 0.0)),
            _ => Err(bad()),
        };
    };
    // Split before the last sign that is not the leading one and not an exponent sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (body[..k].parse::<f64>().map_err(|_| bad())?, imag(&body[k..]).ok_or_else(bad)?),
        None => (0.0, imag(body).ok_or_else(bad)?),
    };
    if !(re.is_finite() && im.is_finite()) {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

fn imag(s: &str) -> Option<f64> {
    match s {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        _ => s.parse().ok(),
    }
}

fn real(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Inverse of [`parse_complex`] with shortest round-trip digits.
pub fn format_complex(z: Complex64) -> String {
    let re = z.re + 0.0;
    let im = z.im + 0.0;
    if im.is_sign_negative() {
        format!("{}-{}i", real(re), real(-im))
    } else {
        format!("{}+{}i", real(re), real(im))
    }
}

pub fn parse_list(s: &str) -> Result<Vec<Complex64>, String> {
    s.split(',').map(|t| parse_complex(t.trim())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms() {
        let c = Complex64::new;
        assert_eq!(parse_complex("3").unwrap(), c(3.0, 0.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("0.5i").unwrap(), c(0.0, 0.5));
        assert_eq!(parse_complex("-0.5i").unwrap(), c(0.0, -0.5));
        assert_eq!(parse_complex("1+2i").unwrap(), c(1.0, 2.0));
        assert_eq!(parse_complex("1e-3-4.5e2i").unwrap(), c(1e-3, -450.0));
        assert_eq!(parse_complex("-1e+2+i").unwrap(), c(-100.0, 1.0));
        assert_eq!(parse_complex("2-i").unwrap(), c(2.0, -1.0));
        for bad in ["", "1 + 2i", "1+2j", "abc", "1+2i3", "nan", "inf+i", "++i"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn round_trip() {
        for z in [Complex64::new(0.1, -0.2), Complex64::new(-0.0, 0.0), Complex64::new(1e-300, 3.5e10)] {
            assert_eq!(parse_complex(&format_complex(z)).unwrap(), z + 0.0);
        }
        assert_eq!(format_complex(Complex64::new(-0.0, -0.0)), "0+0i");
        assert_eq!(format_complex(Complex64::new(0.5, -2e-20)), "0.5-2e-20i");
    }
}
