use serde::{Deserialize, Serialize};

/// Numerical thresholds used across the crate.
///
/// Relative tolerances are scaled by the Frobenius norm of the matrix they
/// refer to. Every field can be overridden by name through [`Tolerances::set`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Eigenpair residual bound, relative to `‖A‖`.
    pub eig_tol: f64,
    /// Hermiticity check, absolute on entries.
    pub herm_tol: f64,
    /// Minimal relative eigenvalue gap before a spectrum counts as degenerate.
    pub gap_tol: f64,
    /// Smallest admissible eigenvalue for positive square roots, relative.
    pub psd_floor: f64,
    /// Largest dimension accepted by the eigensolvers.
    pub max_dim: usize,
    /// Biorthogonal structure invariants.
    pub bi_tol: f64,
    /// An eigenvalue with `|Im E| <= real_tol` counts as real.
    pub real_tol: f64,
    /// Relative distance for matching eigenvalues of `H†` to `conj(E)`.
    pub match_tol: f64,
    /// Condition number of `S_phi` above which a system is flagged.
    pub cond_limit: f64,
    /// Fail instead of flagging when `cond_limit` is exceeded.
    pub strict_conditioning: bool,
    /// Self-adjointness residual, relative to `1 + ‖X‖`.
    pub sa_tol: f64,
    /// Cross-validation of spectral propagators against the series exponential.
    pub xval_tol: f64,
    /// Max pointwise difference above which two probability laws are distinguishable.
    pub discrim_threshold: f64,
    /// Bound on the KMS residual for well-conditioned systems.
    pub kms_tol: f64,
    /// Norms at or below this are treated as zero.
    pub zero_tol: f64,
    /// Slack allowed outside `[0, 1]` before a probability is a range violation.
    pub range_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eig_tol: 1e-10,
            herm_tol: 1e-10,
            gap_tol: 1e-8,
            psd_floor: 1e-12,
            max_dim: 64,
            bi_tol: 1e-9,
            real_tol: 1e-10,
            match_tol: 1e-6,
            cond_limit: 1e8,
            strict_conditioning: false,
            sa_tol: 1e-9,
            xval_tol: 1e-9,
            discrim_threshold: 1e-6,
            kms_tol: 1e-8,
            zero_tol: 1e-14,
            range_tol: 1e-12,
        }
    }
}

impl Tolerances {
    pub const KEYS: [&'static str; 16] = [
        "eig_tol",
        "herm_tol",
        "gap_tol",
        "psd_floor",
        "max_dim",
        "bi_tol",
        "real_tol",
        "match_tol",
        "cond_limit",
        "strict_conditioning",
        "sa_tol",
        "xval_tol",
        "discrim_threshold",
        "kms_tol",
        "zero_tol",
        "range_tol",
    ];

    /// Overrides one field by name. Returns `false` for an unknown key or a
    /// value that does not parse.
    pub fn set(&mut self, key: &str, value: &str) -> bool {
        let value = value.trim();
        if key == "max_dim" {
            return match value.parse::<usize>() {
                Ok(v) if v > 0 => {
                    self.max_dim = v;
                    true
                }
                _ => false,
            };
        }
        if key == "strict_conditioning" {
            return match value.parse::<bool>() {
                Ok(v) => {
                    self.strict_conditioning = v;
                    true
                }
                Err(_) => false,
            };
        }
        let Ok(v) = value.parse::<f64>() else {
            return false;
        };
        if !v.is_finite() || v < 0.0 {
            return false;
        }
        let slot = match key {
            "eig_tol" => &mut self.eig_tol,
            "herm_tol" => &mut self.herm_tol,
            "gap_tol" => &mut self.gap_tol,
            "psd_floor" => &mut self.psd_floor,
            "bi_tol" => &mut self.bi_tol,
            "real_tol" => &mut self.real_tol,
            "match_tol" => &mut self.match_tol,
            "cond_limit" => &mut self.cond_limit,
            "sa_tol" => &mut self.sa_tol,
            "xval_tol" => &mut self.xval_tol,
            "discrim_threshold" => &mut self.discrim_threshold,
            "kms_tol" => &mut self.kms_tol,
            "zero_tol" => &mut self.zero_tol,
            "range_tol" => &mut self.range_tol,
            _ => return false,
        };
        *slot = v;
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_known_and_unknown_keys() {
        let mut t = Tolerances::default();
        assert!(t.set("kms_tol", "1e-7"));
        assert_eq!(t.kms_tol, 1e-7);
        assert!(t.set("max_dim", "8"));
        assert_eq!(t.max_dim, 8);
        assert!(!t.set("max_dim", "0"));
        assert!(!t.set("nope", "1"));
        assert!(!t.set("bi_tol", "abc"));
        assert!(!t.set("bi_tol", "-1"));
    }

    #[test]
    fn every_key_is_settable() {
        for key in Tolerances::KEYS {
            let mut t = Tolerances::default();
            let v = match key {
                "max_dim" => "3",
                "strict_conditioning" => "true",
                _ => "0.5",
            };
            assert!(t.set(key, v), "{key}");
            assert_ne!(t, Tolerances::default(), "{key}");
        }
    }
}
