#pragma once

#include "tenkontract/amplitudes.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace tenkontract {

/// 2^N * mean(|amplitude|^2) - 1 over all samples (with multiplicity).
[[nodiscard]] double lxeb(const AmplitudeSet& amps);

/// Sample standard error of the lxeb estimate.
[[nodiscard]] double lxeb_standard_error(const AmplitudeSet& amps);

/// |L2^2(ref) - L2^2(test)| / L2^2(ref); both sets must hold the same samples.
[[nodiscard]] double squared_l2_error(const AmplitudeSet& reference, const AmplitudeSet& test);

/// eps_L2^2 * (1 + F) / F; nullopt when F <= 0.
[[nodiscard]] std::optional<double> fl_error(double eps_l2sq, double fidelity);

/// (1 + F (e^x - 1)) e^(x - e^x) with x = log(D p).
[[nodiscard]] double porter_thomas_pdf(double x, double fidelity);
/// Closed-form integral of porter_thomas_pdf from -inf to x.
[[nodiscard]] double porter_thomas_cdf(double x, double fidelity);

struct HistogramBin {
    double x_lo = 0.0;
    double x_hi = 0.0;
    double mass = 0.0;    // fraction of samples
    double theory = 0.0;  // integral of the theory density over the bin
};

struct Histogram {
    std::vector<HistogramBin> bins;
    std::size_t excluded_zero = 0;  // zero-probability samples left out
    double ks_distance = 0.0;       // sup |empirical CDF - theory CDF|
};

struct HistogramOptions {
    std::size_t bins = 50;
    double x_min = -8.0;
    double x_max = 4.0;
};

/// Normalized histogram of x = log(2^N p); out-of-range samples land in the
/// edge bins. Theory uses `fidelity` (the measured F_l by default).
[[nodiscard]] Histogram histogram_logdp(const AmplitudeSet& amps, const HistogramOptions& options = {},
                                        std::optional<double> fidelity = std::nullopt);

struct VerificationReport {
    double fidelity = 0.0;
    double fidelity_stderr = 0.0;
    std::optional<double> eps_l2sq;
    std::optional<double> eps_fl;
    Histogram histogram;
};

[[nodiscard]] VerificationReport make_report(const AmplitudeSet& amps, const AmplitudeSet* reference = nullptr,
                                             const HistogramOptions& options = {});
[[nodiscard]] nlohmann::json report_to_json(const VerificationReport& report);
[[nodiscard]] std::string report_to_csv(const VerificationReport& report);

}  // namespace tenkontract
