#pragma once

#include "fluctrack/models.hpp"

#include <utility>

namespace fluctrack {

enum class SwerlingKind { One = 1, Three = 3 };

/// Fluctuation model and detection threshold of the envelope detector.
struct SwerlingModel {
    SwerlingKind kind = SwerlingKind::One;
    double threshold = 2.0;  ///< tau
};

/// SNR(dB) = 10 log10(1 + d). All dB <-> linear conversions go through this pair.
double snr_to_db(double snr_linear);
double db_to_snr(double snr_db);

/// Probability that the amplitude exceeds the threshold.
///   Swerling 1: exp(-tau^2 / (2(1+d)))
///   Swerling 3: (1 + 3 tau^2 / (2(1+d))) exp(-3 tau^2 / (2(1+d)))
double detection_probability(double d, const SwerlingModel& model);

/// Unthresholded amplitude density p(a | d).
double raw_amplitude_pdf(double a, double d, const SwerlingModel& model);

/// Amplitude density renormalized to a > tau. Throws DomainError for a <= tau.
double amplitude_likelihood(double a, double d, const SwerlingModel& model);
/// log of amplitude_likelihood; same domain.
double log_amplitude_likelihood(double a, double d, const SwerlingModel& model);

/// Clutter amplitude density: amplitude_likelihood with d = 0.
double clutter_amplitude_pdf(double a, const SwerlingModel& model);

/// Draws a > tau from the renormalized density. Swerling 1 inverts the CDF; Swerling 3
/// uses acceptance-rejection under a Swerling 1 envelope with matched mean square.
double sample_amplitude(double d, const SwerlingModel& model, Rng& rng);

/// Draws the unthresholded amplitude (may fall below tau).
double sample_raw_amplitude(double d, const SwerlingModel& model, Rng& rng);

/// Amplitude likelihood ratio averaged uniformly (in dB) over an SNR interval,
/// divided by the clutter density. Trapezoid rule at `step_db`.
double marginalized_amplitude_likelihood_ratio(double a, const SwerlingModel& model,
                                               std::pair<double, double> snr_interval_db,
                                               double step_db = 0.1);

/// Log of the same ratio, evaluated without forming the clutter density (which underflows
/// for bright amplitudes).
double log_marginalized_amplitude_likelihood_ratio(double a, const SwerlingModel& model,
                                                   std::pair<double, double> snr_interval_db,
                                                   double step_db = 0.1);

}  // namespace fluctrack
