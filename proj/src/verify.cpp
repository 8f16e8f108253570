#include "tenkontract/verify.hpp"

#include "tenkontract/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tenkontract {

namespace {

double dimension(const AmplitudeSet& amps) { return std::ldexp(1.0, amps.n_qubits); }

void require_samples(const AmplitudeSet& amps) {
    if (amps.entries.empty()) throw ValidationError("amplitude set is empty");
}

}  // namespace

double lxeb(const AmplitudeSet& amps) {
    require_samples(amps);
    double sum = 0.0;
    for (const auto& e : amps.entries) sum += std::norm(e.amplitude);
    return dimension(amps) * sum / static_cast<double>(amps.entries.size()) - 1.0;
}

double lxeb_standard_error(const AmplitudeSet& amps) {
    require_samples(amps);
    const auto m = static_cast<double>(amps.entries.size());
    if (amps.entries.size() < 2) return 0.0;
    const double d = dimension(amps);
    double mean = 0.0;
    for (const auto& e : amps.entries) mean += d * std::norm(e.amplitude);
    mean /= m;
    double var = 0.0;
    for (const auto& e : amps.entries) {
        const double dv = d * std::norm(e.amplitude) - mean;
        var += dv * dv;
    }
    var /= m - 1.0;
    return std::sqrt(var / m);
}

double squared_l2_error(const AmplitudeSet& reference, const AmplitudeSet& test) {
    if (reference.entries.size() != test.entries.size()) throw ValidationError("amplitude sets differ in size");
    double ref = 0.0;
    double tst = 0.0;
    for (std::size_t i = 0; i < reference.entries.size(); ++i) {
        if (reference.entries[i].bitstring != test.entries[i].bitstring) {
            throw ValidationError("amplitude sets list different bitstrings");
        }
        ref += std::norm(reference.entries[i].amplitude);
        tst += std::norm(test.entries[i].amplitude);
    }
    if (ref == 0.0) throw ValidationError("reference amplitudes are all zero");
    return std::fabs(ref - tst) / ref;
}

std::optional<double> fl_error(double eps_l2sq, double fidelity) {
    if (!(fidelity > 0.0)) return std::nullopt;
    return eps_l2sq * (1.0 + fidelity) / fidelity;
}

double porter_thomas_pdf(double x, double fidelity) {
    const double u = std::exp(x);
    return (1.0 + fidelity * (u - 1.0)) * std::exp(x - u);
}

double porter_thomas_cdf(double x, double fidelity) {
    const double u = std::exp(x);
    const double tail = std::exp(-u);
    return (1.0 - fidelity) * (1.0 - tail) + fidelity * (1.0 - (u + 1.0) * tail);
}

Histogram histogram_logdp(const AmplitudeSet& amps, const HistogramOptions& options, std::optional<double> fidelity) {
    require_samples(amps);
    if (options.bins == 0 || !(options.x_max > options.x_min)) throw ValidationError("invalid histogram range");
    const double f = std::clamp(fidelity.value_or(lxeb(amps)), 0.0, 1.0);
    const double d = dimension(amps);
    Histogram h;
    std::vector<double> xs;
    for (const auto& e : amps.entries) {
        const double p = std::norm(e.amplitude);
        if (p == 0.0) {
            ++h.excluded_zero;
            continue;
        }
        xs.push_back(std::log(d * p));
    }
    const double width = (options.x_max - options.x_min) / static_cast<double>(options.bins);
    h.bins.resize(options.bins);
    for (std::size_t i = 0; i < options.bins; ++i) {
        auto& bin = h.bins[i];
        bin.x_lo = options.x_min + width * static_cast<double>(i);
        bin.x_hi = i + 1 == options.bins ? options.x_max : bin.x_lo + width;
        const double lo = i == 0 ? 0.0 : porter_thomas_cdf(bin.x_lo, f);
        const double hi = i + 1 == options.bins ? 1.0 : porter_thomas_cdf(bin.x_hi, f);
        bin.theory = hi - lo;
    }
    if (xs.empty()) return h;
    const double share = 1.0 / static_cast<double>(xs.size());
    for (double x : xs) {
        const double pos = std::floor((x - options.x_min) / width);
        const auto idx = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(options.bins - 1)));
        h.bins[idx].mass += share;
    }
    std::sort(xs.begin(), xs.end());
    const auto n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double c = porter_thomas_cdf(xs[i], f);
        h.ks_distance = std::max({h.ks_distance, std::fabs(static_cast<double>(i + 1) / n - c),
                                  std::fabs(static_cast<double>(i) / n - c)});
    }
    return h;
}

VerificationReport make_report(const AmplitudeSet& amps, const AmplitudeSet* reference,
                               const HistogramOptions& options) {
    VerificationReport r;
    r.fidelity = lxeb(amps);
    r.fidelity_stderr = lxeb_standard_error(amps);
    if (reference) {
        r.eps_l2sq = squared_l2_error(*reference, amps);
        r.eps_fl = fl_error(*r.eps_l2sq, lxeb(*reference));
    }
    r.histogram = histogram_logdp(amps, options);
    return r;
}

nlohmann::json report_to_json(const VerificationReport& report) {
    nlohmann::json bins = nlohmann::json::array();
    for (const auto& b : report.histogram.bins) {
        bins.push_back({{"x_lo", b.x_lo}, {"x_hi", b.x_hi}, {"mass", b.mass}, {"theory", b.theory}});
    }
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    return {{"F_l", report.fidelity},
            {"fidelity_stderr", report.fidelity_stderr},
            {"eps_l2sq", opt(report.eps_l2sq)},
            {"eps_Fl", opt(report.eps_fl)},
            {"ks_distance", report.histogram.ks_distance},
            {"excluded_zero", report.histogram.excluded_zero},
            {"histogram", bins}};
}

std::string report_to_csv(const VerificationReport& report) {
    std::ostringstream out;
    out.precision(17);
    out << "x_lo,x_hi,mass,theory\n";
    for (const auto& b : report.histogram.bins) out << b.x_lo << ',' << b.x_hi << ',' << b.mass << ',' << b.theory << '\n';
    return out.str();
}

}  // namespace tenkontract
