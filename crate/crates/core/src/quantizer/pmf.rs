use crate::error::Result;
use crate::model::{CellPmf, ScenarioConfig, ThresholdVector};
use crate::quadrature::integrate;
use crate::signal::{gaussian_cdf, AmplitudePrior};

/// Absolute tolerance for amplitude-averaged cell masses.
pub(crate) const PMF_QUADRATURE_TOL: f64 = 1e-10;
pub(crate) const MAX_SEGMENTS: usize = 400;

/// Writes the cell masses of `N(mean, sigma^2)` into `out` (length `cuts + 1`).
pub(crate) fn fill_cell_masses(cuts: &[f64], mean: f64, sigma: f64, out: &mut [f64]) {
    let mut prev = 0.0;
    for (slot, &c) in out.iter_mut().zip(cuts) {
        let cdf = gaussian_cdf((c - mean) / sigma);
        *slot = (cdf - prev).max(0.0);
        prev = cdf;
    }
    // Upper tail from the complementary side keeps precision when the mean is far right.
    let last = match cuts.last() {
        Some(&c) => gaussian_cdf((mean - c) / sigma),
        None => 1.0,
    };
    out[cuts.len()] = last;
}

/// Cell masses of a Gaussian observation with the given mean and standard deviation.
///
/// `mass_m = Phi((beta_m - mean)/sigma) - Phi((beta_{m-1} - mean)/sigma)`.
pub fn cell_pmf_given_mean(thresholds: &ThresholdVector, mean: f64, sigma: f64) -> CellPmf {
    let mut masses = vec![0.0; thresholds.levels()];
    fill_cell_masses(thresholds.cuts(), mean, sigma, &mut masses);
    normalize(&mut masses);
    CellPmf::from_raw(masses).expect("Gaussian cell masses form a pmf")
}

/// Renormalizes to absorb the rounding left by differencing CDFs.
fn normalize(masses: &mut [f64]) {
    let total: f64 = masses.iter().sum();
    if total > 0.0 {
        masses.iter_mut().for_each(|m| *m /= total);
    }
}

/// Expectation of a vector-valued function of the amplitude under `prior`.
///
/// Integrates `g(F^{-1}(u))` over `u in [0, 1]`; a point-mass prior evaluates `g(a_max)`.
pub(crate) fn expect_over_prior<G>(prior: &AmplitudePrior, dim: usize, tol: f64, g: G) -> Result<Vec<f64>>
where
    G: Fn(f64, &mut [f64]),
{
    if prior.is_point_mass() {
        let mut out = vec![0.0; dim];
        g(prior.a_max, &mut out);
        return Ok(out);
    }
    let r = integrate(|u, out: &mut [f64]| g(prior.quantile(u), out), 0.0, 1.0, dim, tol, MAX_SEGMENTS)?;
    Ok(r.values)
}

/// Cell masses under H1 averaged over an amplitude prior.
pub(crate) fn averaged_pmf_with_prior(
    thresholds: &ThresholdVector,
    prior: &AmplitudePrior,
    sigma: f64,
) -> Result<CellPmf> {
    let cuts = thresholds.cuts();
    let mut masses = expect_over_prior(prior, thresholds.levels(), PMF_QUADRATURE_TOL, |a, out| {
        fill_cell_masses(cuts, a, sigma, out)
    })?;
    normalize(&mut masses);
    CellPmf::from_raw(masses)
}

/// H1 cell masses averaged over the scenario's amplitude prior,
/// `p_m = int p_m(A) p(A) dA`.
///
/// With `L = 1` this is the pmf at `a_max`.
pub fn averaged_pmf_h1(thresholds: &ThresholdVector, config: &ScenarioConfig) -> Result<CellPmf> {
    averaged_pmf_with_prior(thresholds, &AmplitudePrior::detection(config), config.sigma())
}

/// H0 cell masses, `N(0, sigma^2)`.
pub fn pmf_h0(thresholds: &ThresholdVector, config: &ScenarioConfig) -> CellPmf {
    cell_pmf_given_mean(thresholds, 0.0, config.sigma())
}
