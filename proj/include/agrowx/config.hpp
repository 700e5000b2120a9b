#pragma once

#include "agrowx/advisor.hpp"
#include "agrowx/error.hpp"
#include "agrowx/experiments.hpp"
#include "agrowx/ingest.hpp"
#include "agrowx/preprocess.hpp"
#include "agrowx/text.hpp"
#include "agrowx/training.hpp"
#include "agrowx/windowing.hpp"

#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace agrowx {

/// Everything a pipeline run needs. Loaded from a flat `key = value` file;
/// see docs/config.md for the key list.
struct RunConfig {
    std::string raw_dir = "data/raw";
    std::string work_dir = "work";
    std::string model_dir = "models";
    std::string kb_dir = "data";
    std::vector<std::string> stations;  // empty = every station found
    TrainingMode mode = TrainingMode::PerStation;
    std::vector<Feature> features{Feature::Rainfall, Feature::Sunshine, Feature::Humidity, Feature::Temperature};
    ImputationMethod impute = ImputationMethod::LinearInterpolation;
    WindowSpec window;
    SplitSpec split;
    TrainConfig train;
    advisor::RuleConfig rules;

    void validate() const {
        window.validate();
        train.validate();
        if (features.empty()) fail(ErrorKind::Config, "features must not be empty");
        const double sum = split.train_fraction + split.val_fraction + split.test_fraction;
        if (std::abs(sum - 1.0) > 1e-9 || split.train_fraction <= 0 || split.val_fraction <= 0 ||
            split.test_fraction <= 0)
            fail(ErrorKind::Config, "split fractions must be positive and sum to 1");
        if (rules.consecutive_months < 1) fail(ErrorKind::Config, "consecutive_months must be >= 1");
    }

    [[nodiscard]] bool selected(const std::string& station) const {
        if (stations.empty()) return true;
        for (const auto& s : stations)
            if (s == station) return true;
        return false;
    }
};

namespace detail {

inline std::vector<std::string> list_value(std::string_view v) {
    std::vector<std::string> out;
    for (const auto& item : text::split(v, ','))
        if (!text::trim(item).empty()) out.emplace_back(text::trim(item));
    return out;
}

inline long integer_value(std::string_view key, std::string_view v) {
    const double d = text::require_double(v, key);
    if (d != std::floor(d)) fail(ErrorKind::Config, std::string(key) + " must be an integer");
    return static_cast<long>(d);
}

inline bool bool_value(std::string_view key, std::string_view v) {
    const auto k = text::lower(text::trim(v));
    if (k == "true" || k == "1" || k == "yes") return true;
    if (k == "false" || k == "0" || k == "no") return false;
    fail(ErrorKind::Config, std::string(key) + " must be true or false");
}

}  // namespace detail

/// Applies one key. Unknown keys are a ConfigError.
inline void set_config_value(RunConfig& c, const std::string& key, std::string_view value) {
    const auto v = text::trim(value);
    const auto num = [&] {
        try {
            return text::require_double(v, key);
        } catch (const Error& e) {
            fail(ErrorKind::Config, e.what());
        }
    };
    const auto integer = [&] {
        try {
            return detail::integer_value(key, v);
        } catch (const Error& e) {
            fail(ErrorKind::Config, e.what());
        }
    };
    using Setter = std::function<void()>;
    const std::map<std::string, Setter, std::less<>> setters = {
        {"raw_dir", [&] { c.raw_dir = std::string(v); }},
        {"work_dir", [&] { c.work_dir = std::string(v); }},
        {"model_dir", [&] { c.model_dir = std::string(v); }},
        {"kb_dir", [&] { c.kb_dir = std::string(v); }},
        {"stations",
         [&] { c.stations = text::lower(v) == "all" ? std::vector<std::string>{} : detail::list_value(v); }},
        {"mode", [&] { c.mode = parse_training_mode(v); }},
        {"features",
         [&] {
             c.features.clear();
             for (const auto& f : detail::list_value(v)) c.features.push_back(parse_feature(f));
         }},
        {"impute", [&] { c.impute = parse_imputation(v); }},
        {"input_width", [&] { c.window.input_width = integer(); }},
        {"label_width", [&] { c.window.label_width = integer(); }},
        {"shift", [&] { c.window.shift = integer(); }},
        {"train_fraction", [&] { c.split.train_fraction = num(); }},
        {"val_fraction", [&] { c.split.val_fraction = num(); }},
        {"test_fraction", [&] { c.split.test_fraction = num(); }},
        {"learning_rate", [&] { c.train.learning_rate = num(); }},
        {"epochs", [&] { c.train.epochs = static_cast<int>(integer()); }},
        {"patience", [&] { c.train.patience = static_cast<int>(integer()); }},
        {"batch_size",
         [&] {
             const long b = integer();
             if (b < 1) fail(ErrorKind::Config, "batch_size must be >= 1");
             c.train.batch_size = static_cast<std::size_t>(b);
         }},
        {"l1", [&] { c.train.l1 = num(); }},
        {"l2", [&] { c.train.l2 = num(); }},
        {"seed",
         [&] {
             const long s = integer();
             if (s < 0) fail(ErrorKind::Config, "seed must be >= 0");
             c.train.seed = static_cast<std::uint64_t>(s);
         }},
        {"shuffle", [&] { c.train.shuffle = detail::bool_value(key, v); }},
        {"min_delta", [&] { c.train.min_delta = num(); }},
        {"temperature_margin", [&] { c.rules.temperature_margin_c = num(); }},
        {"rainfall_low", [&] { c.rules.rainfall_low = num(); }},
        {"rainfall_high", [&] { c.rules.rainfall_high = num(); }},
        {"consecutive_months", [&] { c.rules.consecutive_months = static_cast<int>(integer()); }},
    };
    const auto it = setters.find(key);
    if (it == setters.end()) fail(ErrorKind::Config, "unknown config key '" + key + "'");
    it->second();
}

/// Parses `key = value` lines; '#' starts a comment line. Relative paths are
/// taken relative to `base_dir` when it is given.
inline RunConfig parse_config(std::string_view content, const std::string& base_dir = {}) {
    RunConfig c;
    std::map<std::string, int> seen;
    for (const auto& line : text::content_lines(content)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(ErrorKind::Config, "expected 'key = value': " + line);
        const std::string key(text::trim(std::string_view(line).substr(0, eq)));
        if (seen[key]++) fail(ErrorKind::Config, "duplicate config key '" + key + "'");
        set_config_value(c, key, std::string_view(line).substr(eq + 1));
    }
    if (!base_dir.empty()) {
        for (auto* p : {&c.raw_dir, &c.work_dir, &c.model_dir, &c.kb_dir})
            if (std::filesystem::path(*p).is_relative()) *p = (std::filesystem::path(base_dir) / *p).string();
    }
    c.validate();
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::string content;
    try {
        content = text::read_file(path);
    } catch (const Error&) {
        fail(ErrorKind::Config, "cannot read config file " + path);
    }
    return parse_config(content, std::filesystem::path(path).parent_path().string());
}

}  // namespace agrowx
