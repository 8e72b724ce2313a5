use crate::error::{Error, Result};

/// Noise fractions: `alpha` bounds the per-point fraction of misplaced
/// neighbors, `nu` the fraction of adversarial points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseParams {
    pub alpha: f64,
    pub nu: f64,
}

/// The integer thresholds derived from `(alpha + nu) * n`, computed once
/// per run.
///
/// Each is the ceiling of its real-valued product:
///
/// | field       | value                 | used for                          |
/// |-------------|-----------------------|-----------------------------------|
/// | `t_init`    | `6(alpha+nu)n + 1`    | first neighborhood size           |
/// | `f_margin`  | `2(alpha+nu)n`        | point graph: `|N_t(x) ∩ N_t(y)| >= t - f_margin` |
/// | `h_margin`  | `(alpha+nu)n`         | singleton pairs: common neighbors `> h_margin` |
/// | `min_size`  | `4(alpha+nu)n`        | smallest merge worth performing   |
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Margins {
    pub t_init: usize,
    pub f_margin: usize,
    pub h_margin: usize,
    pub min_size: usize,
}

/// `ceil(x)` that ignores floating-point dust just above an integer.
pub(crate) fn ceil_count(x: f64) -> usize {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r.max(0.0) as usize
    } else {
        x.ceil().max(0.0) as usize
    }
}

impl NoiseParams {
    pub fn new(alpha: f64, nu: f64) -> Result<Self> {
        for (name, value) in [("alpha", alpha), ("nu", nu)] {
            if !(0.0..1.0).contains(&value) {
                return Err(Error::BadFraction { name, value });
            }
        }
        Ok(NoiseParams { alpha, nu })
    }

    /// `alpha + nu`; the only combination the thresholds depend on.
    pub fn total(&self) -> f64 {
        self.alpha + self.nu
    }

    /// Parameters scaled by `factor` (the inductive variant doubles them).
    pub fn scaled(&self, factor: f64) -> NoiseParams {
        NoiseParams {
            alpha: self.alpha * factor,
            nu: self.nu * factor,
        }
    }

    /// Thresholds for `n` points, rejecting parameters whose starting
    /// neighborhood would not fit: `6(alpha+nu)n + 1 <= n - 1`.
    pub fn margins(&self, n: usize) -> Result<Margins> {
        let unit = self.total() * n as f64;
        let m = Margins {
            t_init: ceil_count(6.0 * unit) + 1,
            f_margin: ceil_count(2.0 * unit),
            h_margin: ceil_count(unit),
            min_size: ceil_count(4.0 * unit),
        };
        if n < 2 || m.t_init > n - 1 {
            return Err(Error::ParamsTooLarge { t_init: m.t_init, n });
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aistat_defaults() {
        let m = NoiseParams::new(1.0 / 32.0, 0.0).unwrap().margins(512).unwrap();
        assert_eq!(m, Margins { t_init: 97, f_margin: 32, h_margin: 16, min_size: 64 });
    }

    #[test]
    fn rounds_up_fractional_products() {
        let m = NoiseParams::new(0.05, 0.05).unwrap().margins(25).unwrap();
        // (alpha+nu) n = 2.5
        assert_eq!(m, Margins { t_init: 16, f_margin: 5, h_margin: 3, min_size: 10 });
    }

    #[test]
    fn rejects_oversized_parameters() {
        let p = NoiseParams::new(0.1, 0.1).unwrap();
        assert!(matches!(p.margins(10), Err(Error::ParamsTooLarge { .. })));
        assert!(NoiseParams::new(1.0, 0.0).is_err());
        assert!(NoiseParams::new(-0.1, 0.0).is_err());
    }

    #[test]
    fn zero_noise_starts_at_one() {
        let m = NoiseParams::new(0.0, 0.0).unwrap().margins(8).unwrap();
        assert_eq!(m, Margins { t_init: 1, f_margin: 0, h_margin: 0, min_size: 0 });
    }
}
