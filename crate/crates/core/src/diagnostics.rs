use std::fmt;

/// Non-fatal events recorded while computing a test outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Diagnostic {
    /// Lag-1 coefficient used for bandwidth selection was clamped to ±0.97.
    BandwidthRhoClamped,
    /// Prewhitening coefficient was clamped to ±0.97.
    PrewhitenRhoClamped,
    /// Plug-in bandwidth hit the 0.5 floor.
    BandwidthFloored,
    /// Raw long-run variance was negative and was floored at zero.
    LrvFlooredAtZero,
    /// Denominator of the levels/differences ratio was degenerate; R = +inf.
    RatioDenominatorDegenerate,
    /// λ̂(1+ρ̂) ≤ 0 or σ̂_L² = 0; the truncation event is forced to fail.
    CStarDegenerate,
    /// Differenced series has zero variance; C* was not computed.
    DifferencesDegenerate,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Diagnostic::BandwidthRhoClamped => "bandwidth_rho_clamped",
            Diagnostic::PrewhitenRhoClamped => "prewhiten_rho_clamped",
            Diagnostic::BandwidthFloored => "bandwidth_floored",
            Diagnostic::LrvFlooredAtZero => "lrv_floored_at_zero",
            Diagnostic::RatioDenominatorDegenerate => "ratio_denominator_degenerate",
            Diagnostic::CStarDegenerate => "c_star_degenerate",
            Diagnostic::DifferencesDegenerate => "differences_degenerate",
        };
        f.write_str(s)
    }
}

pub(crate) fn push_unique(list: &mut Vec<Diagnostic>, d: Diagnostic) {
    if !list.contains(&d) {
        list.push(d);
    }
}
