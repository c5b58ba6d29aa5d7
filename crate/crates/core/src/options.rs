/// Numerical knobs shared by the classification pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    /// Half-width of the band around `|Φ| = 1` treated as the boundary curve.
    pub boundary_tol: f64,
    /// Relative tolerance for `λ = a_k` matches, scaled by `1 + |λ|`.
    pub match_tol: f64,
    /// Deepest index scanned for `λ = a_k`.
    pub k_max: usize,
    /// Terms computed by the boundary series heuristic.
    pub series_terms: usize,
    /// Trailing terms whose sum decides convergence in the heuristic.
    pub tail_window: usize,
    pub divergence_threshold: f64,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            boundary_tol: 1e-9,
            match_tol: 1e-12,
            k_max: 100_000,
            series_terms: 5000,
            tail_window: 500,
            divergence_threshold: 1e12,
        }
    }
}

impl Options {
    pub fn match_tolerance(&self, lambda_abs: f64) -> f64 {
        self.match_tol * (1.0 + lambda_abs)
    }
}
