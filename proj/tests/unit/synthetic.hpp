#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "vulncure/severity.hpp"

namespace testing {

/// Records with random v2 vectors whose v3 score follows
/// clamp(0.9 * v2 + 1.0 + 0.5 * conf * 10, 0, 10), conf being the encoded
/// confidentiality impact in {0, 0.5, 1}.
struct Synthetic {
    std::vector<vulncure::severity::Sample> samples;
    vulncure::severity::CweTable table;
};

inline double synthetic_target(double v2_score, double conf) {
    return std::clamp(0.9 * v2_score + 1.0 + 0.5 * conf * 10.0, 0.0, 10.0);
}

inline Synthetic make_synthetic(std::size_t n, std::uint64_t seed) {
    using namespace vulncure;
    std::mt19937_64 rng(seed);
    std::vector<std::string> cwes;
    for (int i = 0; i < 20; ++i) cwes.push_back("CWE-" + std::to_string(20 + 7 * i));
    Synthetic out{{}, severity::CweTable(cwes)};
    for (std::size_t i = 0; i < n; ++i) {
        CveRecord r;
        r.id = CveId(2017, static_cast<std::int64_t>(10000 + i));
        CvssV2Assessment v2;
        v2.access_vector = static_cast<AccessVector>(rng() % 3);
        v2.access_complexity = static_cast<AccessComplexity>(rng() % 3);
        v2.authentication = static_cast<Authentication>(rng() % 3);
        v2.conf_impact = static_cast<Impact>(rng() % 3);
        v2.integ_impact = static_cast<Impact>(rng() % 3);
        v2.avail_impact = static_cast<Impact>(rng() % 3);
        v2.base_score = static_cast<double>(rng() % 101) / 10.0;
        v2.obtain_all_privilege = rng() % 7 == 0;
        v2.obtain_user_privilege = rng() % 5 == 0;
        v2.obtain_other_privilege = rng() % 6 == 0;
        v2.user_interaction_required = rng() % 3 == 0;
        r.v2 = v2;
        if (rng() % 5) r.cwe_ids.insert(cwes[rng() % cwes.size()]);
        severity::Sample s;
        s.features = severity::encode_features(r, out.table);
        s.v2_label = v2.label();
        s.v3_score = synthetic_target(v2.base_score, s.features[severity::kConfImpact]);
        s.id = r.id.str();
        out.samples.push_back(s);
    }
    return out;
}

/// Samples whose target was not clipped at 10, where the relation is exactly linear.
inline std::vector<vulncure::severity::Sample> unclamped(const std::vector<vulncure::severity::Sample>& in) {
    using namespace vulncure::severity;
    std::vector<Sample> out;
    for (const auto& s : in) {
        const double raw = 0.9 * s.features[kBaseScore] * 10.0 + 1.0 + 5.0 * s.features[kConfImpact];
        if (raw <= 10.0) out.push_back(s);
    }
    return out;
}

}  // namespace testing
