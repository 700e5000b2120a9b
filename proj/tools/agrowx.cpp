// agrowx: command-line driver for the forecasting and advisory pipeline.

#include "agrowx/agrowx.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace agrowx;

namespace {

struct Paths {
    const RunConfig& cfg;

    [[nodiscard]] fs::path daily_dir() const { return fs::path(cfg.work_dir) / "daily"; }
    [[nodiscard]] fs::path daily(const std::string& station) const {
        return daily_dir() / (file_stem(station) + ".csv");
    }
    [[nodiscard]] fs::path prepared(const std::string& station) const {
        return fs::path(cfg.work_dir) / "prepared" / file_stem(station);
    }
    [[nodiscard]] fs::path kb(const char* name) const { return fs::path(cfg.kb_dir) / name; }

    static std::string file_stem(const std::string& station) {
        const auto p = store::bundle_path("", station);
        return p.substr(1, p.size() - 1 - std::string(".agwx").size());
    }
};

RunConfig load_run_config(const std::string& path) {
    if (path.empty()) {
        RunConfig c;
        c.validate();
        return c;
    }
    return load_config(path);
}

void ensure_dir(const fs::path& p) {
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) fail(ErrorKind::Io, "cannot create directory " + p.string());
}

std::vector<std::string> daily_stations(const RunConfig& cfg) {
    const Paths paths{cfg};
    if (!fs::is_directory(paths.daily_dir()))
        fail(ErrorKind::MissingArtifact, "no ingested data in " + paths.daily_dir().string() + "; run ingest first");
    std::vector<std::string> out;
    for (const auto& e : fs::directory_iterator(paths.daily_dir())) {
        if (e.path().extension() != ".csv") continue;
        for (const auto& s : read_daily_csv(text::read_file(e.path().string())))
            if (cfg.selected(s.station)) out.push_back(s.station);
    }
    std::sort(out.begin(), out.end());
    if (out.empty()) fail(ErrorKind::MissingArtifact, "no selected stations in " + paths.daily_dir().string());
    for (const auto& want : cfg.stations)
        if (std::find(out.begin(), out.end(), want) == out.end())
            fail(ErrorKind::UnknownStation, "station '" + want + "' has no ingested data");
    return out;
}

DailySeries load_daily(const RunConfig& cfg, const std::string& station) {
    const auto path = Paths{cfg}.daily(station);
    if (!fs::exists(path)) fail(ErrorKind::MissingArtifact, "no ingested data for " + station + "; run ingest first");
    auto all = read_daily_csv(text::read_file(path.string()));
    if (all.size() != 1 || all.front().station != station)
        fail(ErrorKind::Format, path.string() + " does not hold exactly station " + station);
    return all.front();
}

DailySeries load_imputed(const RunConfig& cfg, const std::string& station) {
    return impute(load_daily(cfg, station), cfg.impute, cfg.features);
}

json metrics_json(const MetricsReport& r) {
    return {{"mae", r.mae}, {"mse", r.mse}, {"msle", r.msle}, {"r2", r.r2}, {"smape", r.smape}};
}

std::string matrix_csv(const std::vector<std::string>& header, const Eigen::MatrixXd& m) {
    std::string out;
    for (std::size_t k = 0; k < header.size(); ++k) out += (k ? "," : "") + header[k];
    out += '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index k = 0; k < m.cols(); ++k) out += (k ? "," : "") + text::format_double(m(i, k));
        out += '\n';
    }
    return out;
}

struct EpochCsv {
    std::string text = "epoch,train_loss,val_loss\n";
    void add(const EpochLog& e) {
        text += std::to_string(e.epoch) + "," + text::format_double(e.train_loss) + "," +
                text::format_double(e.val_loss) + "\n";
    }
};

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

// ---------------------------------------------------------------------------

void cmd_synth(const std::string& out, std::uint64_t seed, int stations, const std::vector<std::string>& names, int years) {
    synth::Options o;
    o.seed = seed;
    o.station_count = stations;
    o.stations = names;
    o.years = years;
    ensure_dir(out);
    json written = json::array();
    for (const auto& [var, content] : synth::generate(o)) {
        const auto path = fs::path(out) / (std::string(variable_name(var)) + ".csv");
        text::write_file(path.string(), content);
        written.push_back(path.string());
    }
    print({{"seed", seed}, {"stations", synth::station_list(o)}, {"years", years}, {"files", written}});
}

void cmd_ingest(const RunConfig& cfg, const std::string& aliases_file) {
    const Paths paths{cfg};
    auto aliases = StationAliases::bangladesh();
    const auto alias_path = aliases_file.empty() ? paths.kb("aliases.csv") : fs::path(aliases_file);
    if (fs::exists(alias_path)) aliases.load_csv(text::read_file(alias_path.string()));
    else if (!aliases_file.empty()) fail(ErrorKind::MissingArtifact, "alias file not found: " + aliases_file);

    const auto series = load_raw_directory(cfg.raw_dir, aliases);
    ensure_dir(paths.daily_dir());
    json out = json::array();
    for (const auto& s : series) {
        if (!cfg.selected(s.station)) continue;
        text::write_file(paths.daily(s.station).string(), write_daily_csv(s));
        std::size_t missing = 0;
        for (const auto& r : s.records)
            for (const auto& v : r.values) missing += v ? 0 : 1;
        out.push_back({{"station", s.station},
                       {"first", to_iso(s.records.front().date)},
                       {"last", to_iso(s.records.back().date)},
                       {"days", s.size()},
                       {"missing_cells", missing},
                       {"file", paths.daily(s.station).string()}});
    }
    print(out);
}

void cmd_preprocess(const RunConfig& cfg) {
    const Paths paths{cfg};
    json out = json::array();
    for (const auto& station : daily_stations(cfg)) {
        const auto p = prepare(load_imputed(cfg, station), cfg.features, cfg.split);
        const auto dir = paths.prepared(station);
        ensure_dir(dir);
        text::write_file((dir / "train.csv").string(), matrix_csv(p.features, p.splits.train));
        text::write_file((dir / "val.csv").string(), matrix_csv(p.features, p.splits.val));
        text::write_file((dir / "test.csv").string(), matrix_csv(p.features, p.splits.test));
        text::write_file((dir / "stats.txt").string(), write_stats(p.stats));
        out.push_back({{"station", station},
                       {"impute", to_string(cfg.impute)},
                       {"train_rows", p.splits.train.rows()},
                       {"val_rows", p.splits.val.rows()},
                       {"test_rows", p.splits.test.rows()},
                       {"dir", dir.string()}});
    }
    print(out);
}

void cmd_adf(const RunConfig& cfg, const std::string& station, const std::string& feature,
             std::optional<std::size_t> max_lag) {
    const Feature f = parse_feature(feature);
    const auto s = impute(load_daily(cfg, station), cfg.impute, {f});
    std::vector<double> values;
    for (const auto& r : s.records) values.push_back(*r[f]);
    const auto r = stats::adf_test(values, max_lag);
    json p = r.p_value;
    print({{"station", station},
           {"feature", feature},
           {"statistic", r.statistic},
           {"p_value", r.p_value_clamped ? json("< 0.001") : p},
           {"lags_used", r.lags_used},
           {"nobs", r.nobs},
           {"critical_values", {{"1%", r.critical_values.pct1}, {"5%", r.critical_values.pct5}, {"10%", r.critical_values.pct10}}},
           {"decision", stats::to_string(r.decision)}});
}

nn::Topology default_topology(int features, int inputs) {
    nn::Topology t;
    t.input_features = inputs;
    t.targets = features;
    return t;
}

void cmd_train(const RunConfig& cfg) {
    const auto stations = daily_stations(cfg);
    ensure_dir(cfg.model_dir);
    const auto names = feature_labels(cfg.features);
    const int nf = static_cast<int>(names.size());
    json out = json::array();
    const auto log_epoch = [](const std::string& who, const EpochLog& e) {
        std::cerr << who << " epoch " << e.epoch << " train_loss " << e.train_loss << " val_loss " << e.val_loss << '\n';
    };

    if (cfg.mode == TrainingMode::PerStation) {
        for (const auto& station : stations) {
            const auto p = prepare(load_imputed(cfg, station), cfg.features, cfg.split);
            const auto w = make_station_windows(p, cfg.window);
            auto model = make_model<double>(default_topology(nf, nf), names, names, cfg.train.seed);
            model.stats = p.stats;
            EpochCsv csv;
            const auto h = train(model, w.train, w.val, cfg.train, [&](const EpochLog& e) {
                csv.add(e);
                log_epoch(station, e);
            });
            const auto path = store::bundle_path(cfg.model_dir, station);
            const auto receipt = store::save({station, model, cfg.train, cfg.window}, path);
            const auto log_path = fs::path(path).replace_extension(".history.csv");
            text::write_file(log_path.string(), csv.text);
            out.push_back({{"station", station},
                           {"bundle", path},
                           {"checksum", store::checksum_hex(receipt.checksum)},
                           {"best_epoch", h.best_epoch},
                           {"stopped_epoch", h.stopped_epoch},
                           {"history", log_path.string()}});
        }
        print(out);
        return;
    }

    // Combined: pooled statistics, one-hot station columns, one model.
    std::vector<std::pair<std::string, Splits>> raw;
    Eigen::Index rows = 0;
    for (const auto& station : stations) {
        raw.emplace_back(station, split(to_matrix(load_imputed(cfg, station), cfg.features), cfg.split));
        rows += raw.back().second.train.rows();
    }
    Eigen::MatrixXd pooled(rows, nf);
    Eigen::Index at = 0;
    for (const auto& [s, sp] : raw) {
        pooled.middleRows(at, sp.train.rows()) = sp.train;
        at += sp.train.rows();
    }
    const auto st = fit_normalizer(pooled, names);
    const auto table = [&](Eigen::MatrixXd Splits::*part) {
        std::vector<std::pair<std::string, Eigen::MatrixXd>> per;
        for (const auto& [s, sp] : raw) per.emplace_back(s, normalize(sp.*part, st));
        return encode_station_onehot(stations, per, names);
    };
    const auto tr = table(&Splits::train);
    const auto va = table(&Splits::val);
    const auto targets = leading_columns(nf);
    auto model = make_model<double>(default_topology(nf, static_cast<int>(tr.columns.size())), tr.columns, names,
                                    cfg.train.seed);
    model.stats = st;
    EpochCsv csv;
    const auto h = train(model, WindowSet(tr.blocks, targets, cfg.window), WindowSet(va.blocks, targets, cfg.window),
                         cfg.train, [&](const EpochLog& e) {
                             csv.add(e);
                             log_epoch("combined", e);
                         });
    const auto path = store::bundle_path(cfg.model_dir, "combined");
    const auto receipt = store::save({"combined", model, cfg.train, cfg.window}, path);
    const auto log_path = fs::path(path).replace_extension(".history.csv");
    text::write_file(log_path.string(), csv.text);
    print({{"station", "combined"},
           {"stations", stations},
           {"bundle", path},
           {"checksum", store::checksum_hex(receipt.checksum)},
           {"best_epoch", h.best_epoch},
           {"stopped_epoch", h.stopped_epoch},
           {"history", log_path.string()}});
}

void cmd_evaluate(const RunConfig& cfg) {
    const auto stations = daily_stations(cfg);
    json out = json::object();
    const auto names = feature_labels(cfg.features);
    const auto targets = leading_columns(static_cast<Eigen::Index>(names.size()));
    if (cfg.mode == TrainingMode::PerStation) {
        for (const auto& station : stations) {
            const auto b = store::load(store::bundle_path(cfg.model_dir, station));
            if (b.model.feature_names != names)
                fail(ErrorKind::Config, station + " bundle was trained on different features");
            const auto p = prepare(load_imputed(cfg, station), cfg.features, cfg.split);
            const auto w = make_station_windows(p, b.window);
            out[station] = metrics_json(evaluate(b.model, w.test, b.model.stats));
        }
    } else {
        const auto b = store::load(store::bundle_path(cfg.model_dir, "combined"));
        std::vector<std::string> order;
        for (const auto& c : b.model.feature_names)
            if (c.starts_with("station=")) order.push_back(c.substr(8));
        for (const auto& station : stations) {
            const auto sp = split(to_matrix(load_imputed(cfg, station), cfg.features), cfg.split);
            const auto t = encode_station_onehot(order, {{station, normalize(sp.test, b.model.stats)}}, names);
            out[station] = metrics_json(evaluate(b.model, WindowSet(t.blocks, targets, b.window), b.model.stats));
        }
    }
    ensure_dir(cfg.work_dir);
    text::write_file((fs::path(cfg.work_dir) / "metrics.json").string(), out.dump(2) + "\n");
    print(out);
}

geo::StationRegistry load_registry(const RunConfig& cfg) {
    const auto path = Paths{cfg}.kb("stations.csv");
    if (!fs::exists(path)) fail(ErrorKind::MissingArtifact, "station registry not found: " + path.string());
    return geo::StationRegistry::load(path.string());
}

struct Located {
    geo::NearestResult nearest;
    Forecast forecast;
};

Located locate_and_forecast(const RunConfig& cfg, double lat, double lon, Eigen::Index horizon) {
    const auto near = load_registry(cfg).nearest(geo::GeoPoint(lat, lon));
    const auto bundle = store::load(store::bundle_path(cfg.model_dir, near.station));
    return {near, make_forecast(bundle, impute(load_daily(cfg, near.station), cfg.impute, [&] {
                                    std::vector<Feature> fs;
                                    for (const auto& n : bundle.model.feature_names) fs.push_back(parse_feature(n));
                                    return fs;
                                }()),
                                horizon)};
}

void cmd_forecast(const RunConfig& cfg, double lat, double lon, int horizon, const std::string& granularity) {
    const auto g = advisor::parse_granularity(granularity);
    const auto [near, f] = locate_and_forecast(cfg, lat, lon, horizon);
    json rows = json::array();
    for (const auto& r : advisor::aggregate_forecast(to_daily(f), g)) rows.push_back(advisor::to_json(r));
    print({{"station", near.station},
           {"distance_km", near.distance_km},
           {"observed_until", to_iso(f.observed_until)},
           {"first_date", to_iso(f.dates.front())},
           {"last_date", to_iso(f.dates.back())},
           {"granularity", advisor::to_string(g)},
           {"rows", rows}});
}

std::string station_district(const RunConfig& cfg, const std::string& station) {
    const auto path = Paths{cfg}.kb("station_districts.csv");
    if (!fs::exists(path)) return station;
    for (const auto& line : text::content_lines(text::read_file(path.string()))) {
        const auto f = text::split(line, ',');
        if (f.size() == 2 && text::trim(f[0]) == station) return std::string(text::trim(f[1]));
    }
    return station;
}

advisor::KnowledgeBase load_kb(const RunConfig& cfg) {
    const Paths paths{cfg};
    const auto read = [&](const char* name) {
        const auto p = paths.kb(name);
        if (!fs::exists(p)) fail(ErrorKind::MissingArtifact, "knowledge-base file not found: " + p.string());
        return text::read_file(p.string());
    };
    return {advisor::HazardRegistry::parse_csv(read("hazards.csv")), advisor::ThresholdTable::parse_csv(read("thresholds.csv")),
            advisor::CropTable::parse(read("crops.txt"))};
}

void cmd_recommend(const RunConfig& cfg, double lat, double lon, const std::string& date, const std::string& district,
                   const std::string& format) {
    const auto kb = load_kb(cfg);
    const auto [near, f] = locate_and_forecast(cfg, lat, lon, 0);
    const Date when = date.empty() ? add_days(f.observed_until, 1) : parse_iso(date);
    const auto where = district.empty() ? station_district(cfg, near.station) : district;
    const auto a = advisor::recommend(where, to_daily(f), when, kb, cfg.rules);
    if (format == "text") {
        std::cout << "Nearest station: " << near.station << " (" << text::format_double(std::round(near.distance_km * 100) / 100)
                  << " km)\n"
                  << advisor::render_text(a);
        return;
    }
    auto j = advisor::to_json(a);
    j["station"] = near.station;
    j["distance_km"] = near.distance_km;
    print(j);
}

void cmd_nearest(const RunConfig& cfg, double lat, double lon) {
    const auto n = load_registry(cfg).nearest(geo::GeoPoint(lat, lon));
    print({{"station", n.station}, {"distance_km", n.distance_km}});
}

void cmd_inspect(const std::string& path) {
    const auto bytes = text::read_file(path);
    const auto h = store::check_envelope(bytes);
    const auto b = store::deserialize(bytes);
    const auto& t = b.model.topology;
    json stats = json::array();
    for (std::size_t i = 0; i < b.model.stats.size(); ++i)
        stats.push_back({{"feature", b.model.stats.features[i]}, {"mean", b.model.stats.mean[i]}, {"stddev", b.model.stats.stddev[i]}});
    print({{"station", b.station},
           {"format_version", h.version},
           {"checksum", store::checksum_hex(h.checksum)},
           {"topology",
            {{"input_features", t.input_features},
             {"targets", t.targets},
             {"recurrent_layers", t.recurrent_layers},
             {"units", t.units},
             {"bidirectional", t.bidirectional},
             {"dense_units", t.dense_units}}},
           {"parameters", nn::param_count(t)},
           {"seed", b.model.seed},
           {"features", b.model.feature_names},
           {"targets", b.model.target_names},
           {"normalization", stats},
           {"window", {{"input_width", b.window.input_width}, {"label_width", b.window.label_width}, {"shift", b.window.shift}}},
           {"train_config",
            {{"learning_rate", b.config.learning_rate},
             {"epochs", b.config.epochs},
             {"patience", b.config.patience},
             {"batch_size", b.config.batch_size},
             {"l1", b.config.l1},
             {"l2", b.config.l2},
             {"seed", b.config.seed},
             {"shuffle", b.config.shuffle},
             {"min_delta", b.config.min_delta}}}});
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"agrowx: weather forecasting and crop advisory"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "Run configuration file (key = value)");

    std::string station_flag;
    const auto add_station = [&](CLI::App* c) {
        c->add_option("--station", station_flag, "Restrict to these stations (comma separated)");
    };

    auto* synth = app.add_subcommand("synth", "Write a synthetic raw dataset");
    std::string synth_out = "data/raw";
    std::uint64_t seed = 7;
    int synth_stations = 3, synth_years = 20;
    synth->add_option("--out", synth_out, "Output directory")->capture_default_str();
    synth->add_option("--seed", seed, "Random seed")->capture_default_str();
    synth->add_option("--stations", synth_stations, "Number of stations")->capture_default_str();
    synth->add_option("--years", synth_years, "Years of daily data")->capture_default_str();
    add_station(synth);

    auto* ingest = app.add_subcommand("ingest", "Parse raw monthly matrices into daily CSV per station");
    std::string aliases_file;
    ingest->add_option("--aliases", aliases_file, "Extra station alias CSV");
    add_station(ingest);

    auto* preprocess = app.add_subcommand("preprocess", "Impute, split and normalize");
    add_station(preprocess);

    auto* adf = app.add_subcommand("adf", "Augmented Dickey-Fuller test on one feature");
    std::string adf_station, adf_feature;
    std::optional<std::size_t> max_lag;
    adf->add_option("station", adf_station)->required();
    adf->add_option("feature", adf_feature)->required();
    adf->add_option("--max-lag", max_lag, "Largest lag considered");

    auto* train_cmd = app.add_subcommand("train", "Train and save models");
    std::optional<std::uint64_t> train_seed;
    train_cmd->add_option("--seed", train_seed, "Override the config seed");
    add_station(train_cmd);

    auto* evaluate_cmd = app.add_subcommand("evaluate", "Score saved models on the test split");
    add_station(evaluate_cmd);

    double lat = 0, lon = 0;
    const auto add_coords = [&](CLI::App* c) {
        c->add_option("--lat", lat, "Latitude (deg)")->required();
        c->add_option("--lon", lon, "Longitude (deg)")->required();
    };
    auto* forecast = app.add_subcommand("forecast", "Forecast at the nearest station");
    add_coords(forecast);
    int horizon = 0;
    std::string granularity = "monthly";
    forecast->add_option("--horizon", horizon, "Days to report (default: full label window)");
    forecast->add_option("--granularity", granularity, "daily|weekly|monthly|seasonal|yearly")->capture_default_str();

    auto* recommend = app.add_subcommand("recommend", "Crop advisory at the nearest station");
    add_coords(recommend);
    std::string date, district, format = "json";
    recommend->add_option("--date", date, "Advisory date YYYY-MM-DD (default: day after the data)");
    recommend->add_option("--district", district, "Override the station's district");
    recommend->add_option("--format", format, "json|text")->check(CLI::IsMember({"json", "text"}))->capture_default_str();

    auto* nearest = app.add_subcommand("nearest", "Nearest weather station");
    add_coords(nearest);

    auto* inspect = app.add_subcommand("inspect", "Describe a model bundle");
    std::string bundle;
    inspect->add_option("bundle", bundle)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(ErrorKind::Config);
    }

    try {
        RunConfig cfg = load_run_config(config_path);
        if (!station_flag.empty()) {
            cfg.stations.clear();
            for (const auto& s : text::split(station_flag, ','))
                if (!text::trim(s).empty()) cfg.stations.emplace_back(text::trim(s));
        }
        if (train_seed) cfg.train.seed = *train_seed;

        if (*synth) {
            cmd_synth(synth_out, seed, synth_stations, cfg.stations, synth_years);
        } else if (*ingest) {
            cmd_ingest(cfg, aliases_file);
        } else if (*preprocess) {
            cmd_preprocess(cfg);
        } else if (*adf) {
            cmd_adf(cfg, adf_station, adf_feature, max_lag);
        } else if (*train_cmd) {
            cmd_train(cfg);
        } else if (*evaluate_cmd) {
            cmd_evaluate(cfg);
        } else if (*forecast) {
            cmd_forecast(cfg, lat, lon, horizon, granularity);
        } else if (*recommend) {
            cmd_recommend(cfg, lat, lon, date, district, format);
        } else if (*nearest) {
            cmd_nearest(cfg, lat, lon);
        } else if (*inspect) {
            cmd_inspect(bundle);
        }
    } catch (const Error& e) {
        std::cerr << "agrowx: " << e.what() << '\n';
        return static_cast<int>(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "agrowx: internal error: " << e.what() << '\n';
        return 100;
    }
    return 0;
}
