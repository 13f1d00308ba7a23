use num_complex::Complex64;

/// A complex number stored as `exp(ln_abs + i phase)`; zero is `ln_abs = -inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogValue {
    pub ln_abs: f64,
    pub phase: f64,
}

impl LogValue {
    pub const ZERO: LogValue = LogValue { ln_abs: f64::NEG_INFINITY, phase: 0.0 };

    pub fn from_complex(z: Complex64) -> Self {
        if z == Complex64::new(0.0, 0.0) {
            return LogValue::ZERO;
        }
        LogValue { ln_abs: z.norm().ln(), phase: z.arg() }
    }

    /// Overflows to infinity for `ln_abs > ~709`.
    pub fn to_complex(self) -> Complex64 {
        if self.ln_abs == f64::NEG_INFINITY {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(self.ln_abs.exp(), self.phase)
    }

    pub fn abs(self) -> f64 {
        self.ln_abs.exp()
    }

    /// Sum, scaled by the largest modulus so no intermediate overflows.
    pub fn sum(values: &[LogValue]) -> LogValue {
        let top = values.iter().map(|v| v.ln_abs).fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return LogValue::ZERO;
        }
        let s: Complex64 = values
            .iter()
            .map(|v| Complex64::from_polar((v.ln_abs - top).exp(), v.phase))
            .sum();
        let r = LogValue::from_complex(s);
        LogValue { ln_abs: r.ln_abs + top, phase: r.phase }
    }
}

/// `ln(sum exp(x_i))`.
pub fn ln_sum_exp(xs: impl IntoIterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let top = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY || top == f64::INFINITY {
        return top;
    }
    top + xs.iter().map(|x| (x - top).exp()).sum::<f64>().ln()
}

/// `ln(exp(a) - exp(b))`, or `-inf` when `a <= b`.
pub fn ln_diff_exp(a: f64, b: f64) -> f64 {
    if !(a > b) {
        return f64::NEG_INFINITY;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    a + (-(b - a).exp()).ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sum_survives_overflow() {
        let big = LogValue { ln_abs: 1000.0, phase: 0.0 };
        let s = LogValue::sum(&[big, big]);
        assert!((s.ln_abs - (1000.0 + 2f64.ln())).abs() < 1e-12);
        let cancel = LogValue::sum(&[big, LogValue { ln_abs: 1000.0, phase: std::f64::consts::PI }]);
        assert!(cancel.ln_abs < 1000.0 - 30.0);
    }

    #[test]
    fn diff_exp_edge_cases() {
        assert_eq!(ln_diff_exp(1.0, 2.0), f64::NEG_INFINITY);
        assert_eq!(ln_diff_exp(1.0, f64::NEG_INFINITY), 1.0);
        assert!((ln_diff_exp(2f64.ln(), 0.0) - 0.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn sum_matches_complex_addition(a in -5.0f64..5.0, b in -5.0f64..5.0, pa in -3.0f64..3.0, pb in -3.0f64..3.0) {
            let x = LogValue { ln_abs: a, phase: pa };
            let y = LogValue { ln_abs: b, phase: pb };
            let direct = x.to_complex() + y.to_complex();
            let via = LogValue::sum(&[x, y]).to_complex();
            prop_assert!((direct - via).norm() <= 1e-12 * (1.0 + direct.norm()));
        }

        #[test]
        fn ln_sum_exp_matches(xs in proptest::collection::vec(-20.0f64..20.0, 1..8)) {
            let direct: f64 = xs.iter().map(|x| x.exp()).sum::<f64>().ln();
            prop_assert!((ln_sum_exp(xs.clone()) - direct).abs() < 1e-12 * (1.0 + direct.abs()));
        }
    }
}
