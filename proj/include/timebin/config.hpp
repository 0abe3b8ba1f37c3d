#ifndef TIMEBIN_CONFIG_HPP
#define TIMEBIN_CONFIG_HPP

#include <cstdint>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "errors.hpp"

namespace timebin {

enum class SourceModel { quantum, lhv };

inline std::string to_string(SourceModel m) { return m == SourceModel::quantum ? "quantum" : "lhv"; }

inline SourceModel source_model_from_string(const std::string& s)
{
    if (s == "quantum") return SourceModel::quantum;
    if (s == "lhv") return SourceModel::lhv;
    throw invalid_argument("model must be 'quantum' or 'lhv', got '" + s + "'");
}

struct DetectorEfficiency {
    double alice = 0.1;
    double bob = 0.1;
};

/// Pulsed time-bin source, interferometers and detection chain.
///
/// Physical validity assumes tau_c << delta_t << tau_p (photon coherence time,
/// slot separation, pump coherence time); those times are not simulated.
/// Emission jitter inside a pulse (~150 fs) is far below one TDC bin and is ignored.
struct ExperimentConfig {
    double rep_rate = 76e6;          ///< Hz
    double delta_t = 2.0e-9;         ///< s, slot separation dL/c
    double tdc_bin = 81e-12;         ///< s
    double pair_prob_per_pulse = 2.2e-3;
    DetectorEfficiency detector_efficiency{};
    double dark_count_rate = 100.0;  ///< Hz per detector
    double visibility = 0.99;
    double phase_jitter_rms = 0.0;   ///< rad, per side, drawn once per run
    SourceModel model = SourceModel::quantum;
    std::uint64_t seed = 1;
    int coincidence_half_width = 5;  ///< TDC bins around the slot centre

    double rep_period() const noexcept { return 1.0 / rep_rate; }

    void validate() const
    {
        auto unit = [](double v, const char* what) {
            if (!(v >= 0.0 && v <= 1.0)) throw invalid_argument(std::string(what) + " must lie in [0, 1]");
        };
        if (!(rep_rate > 0.0)) throw invalid_argument("rep_rate must be positive");
        if (!(delta_t > 0.0)) throw invalid_argument("delta_t must be positive");
        if (!(tdc_bin > 0.0)) throw invalid_argument("tdc_bin must be positive");
        unit(pair_prob_per_pulse, "pair_prob_per_pulse");
        unit(detector_efficiency.alice, "detector_efficiency.alice");
        unit(detector_efficiency.bob, "detector_efficiency.bob");
        unit(visibility, "visibility");
        if (!(dark_count_rate >= 0.0)) throw invalid_argument("dark_count_rate must be >= 0");
        if (!(phase_jitter_rms >= 0.0)) throw invalid_argument("phase_jitter_rms must be >= 0");
        if (coincidence_half_width < 0) throw invalid_argument("coincidence_half_width must be >= 0");
        if (!(delta_t > 2.0 * coincidence_half_width * tdc_bin))
            throw invalid_argument("delta_t must exceed the coincidence window width so the slots are resolvable");
        if (!(rep_period() > 2.0 * delta_t))
            throw invalid_argument("pulse period must exceed 2 * delta_t");
    }
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                                const std::string& where)
{
    if (!j.is_object()) throw invalid_argument(where + " must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key)) throw invalid_argument("unknown key '" + key + "' in " + where);
}

template <typename T>
void read_if_present(const nlohmann::json& j, const char* key, T& out)
{
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw invalid_argument(std::string("bad value for '") + key + "': " + e.what());
    }
}

} // namespace detail

inline nlohmann::json to_json(const ExperimentConfig& c)
{
    return {
        {"rep_rate", c.rep_rate},
        {"delta_t", c.delta_t},
        {"tdc_bin", c.tdc_bin},
        {"pair_prob_per_pulse", c.pair_prob_per_pulse},
        {"detector_efficiency", {{"alice", c.detector_efficiency.alice}, {"bob", c.detector_efficiency.bob}}},
        {"dark_count_rate", c.dark_count_rate},
        {"visibility", c.visibility},
        {"phase_jitter_rms", c.phase_jitter_rms},
        {"model", to_string(c.model)},
        {"seed", c.seed},
        {"coincidence_half_width", c.coincidence_half_width},
    };
}

/// Missing keys keep their defaults; unknown keys are rejected.
inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j)
{
    detail::reject_unknown_keys(j,
                                {"rep_rate", "delta_t", "tdc_bin", "pair_prob_per_pulse",
                                 "detector_efficiency", "dark_count_rate", "visibility",
                                 "phase_jitter_rms", "model", "seed", "coincidence_half_width"},
                                "experiment config");
    ExperimentConfig c;
    detail::read_if_present(j, "rep_rate", c.rep_rate);
    detail::read_if_present(j, "delta_t", c.delta_t);
    detail::read_if_present(j, "tdc_bin", c.tdc_bin);
    detail::read_if_present(j, "pair_prob_per_pulse", c.pair_prob_per_pulse);
    if (j.contains("detector_efficiency")) {
        const auto& e = j.at("detector_efficiency");
        if (e.is_number()) {
            c.detector_efficiency.alice = c.detector_efficiency.bob = e.get<double>();
        } else {
            detail::reject_unknown_keys(e, {"alice", "bob"}, "detector_efficiency");
            detail::read_if_present(e, "alice", c.detector_efficiency.alice);
            detail::read_if_present(e, "bob", c.detector_efficiency.bob);
        }
    }
    detail::read_if_present(j, "dark_count_rate", c.dark_count_rate);
    detail::read_if_present(j, "visibility", c.visibility);
    detail::read_if_present(j, "phase_jitter_rms", c.phase_jitter_rms);
    if (j.contains("model")) c.model = source_model_from_string(j.at("model").get<std::string>());
    detail::read_if_present(j, "seed", c.seed);
    detail::read_if_present(j, "coincidence_half_width", c.coincidence_half_width);
    c.validate();
    return c;
}

} // namespace timebin

#endif // TIMEBIN_CONFIG_HPP
