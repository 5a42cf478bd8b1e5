#include "qkdmem/experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace qkdmem {

namespace {

std::string json_string(const ordered_json& v, const std::string& key) {
    if (!v.is_string()) throw ConfigError("config field \"" + key + "\" must be a string");
    return v.get<std::string>();
}

std::uint64_t json_uint(const ordered_json& v, const std::string& key) {
    // Accept any integer representation as long as the value is >= 0.
    if (!v.is_number_integer() ||
        (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
        throw ConfigError("config field \"" + key + "\" must be a nonnegative integer");
    return v.get<std::uint64_t>();
}

double json_number(const ordered_json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError("config field \"" + key + "\" must be a number");
    return v.get<double>();
}

TestSelection parse_test_selection(const ordered_json& v) {
    if (!v.is_object()) throw ConfigError("config field \"test_selection\" must be an object");
    TestSelection sel;
    bool mode_seen = false;
    for (const auto& [key, val] : v.items()) {
        if (key == "mode") {
            const std::string mode = json_string(val, "test_selection.mode");
            if (mode == "spot_check")
                sel.mode = TestSelection::Mode::SpotCheck;
            else if (mode == "fixed_subset")
                sel.mode = TestSelection::Mode::FixedSubset;
            else
                throw ConfigError("config field \"test_selection.mode\": unknown mode \"" +
                                  mode + "\"");
            mode_seen = true;
        } else if (key == "gamma") {
            sel.gamma = json_number(val, "test_selection.gamma");
        } else if (key == "size") {
            sel.subset_size = json_uint(val, "test_selection.size");
        } else {
            throw ConfigError("unknown config key: test_selection." + key);
        }
    }
    if (!mode_seen) throw ConfigError("config field \"test_selection\" needs a mode");
    return sel;
}

Basis parse_basis_checked(const std::string& s, const std::string& key) {
    try {
        return parse_basis(s);
    } catch (const QkdError&) {
        throw ConfigError("config field \"" + key + "\": unknown basis \"" + s + "\"");
    }
}

}  // namespace

std::size_t ExperimentConfig::protocol_rounds() const {
    return protocol == "example_protocol" ? 2 * n_pairs : bb84.n_rounds;
}

void ExperimentConfig::check() const {
    const auto ids = known_device_ids();
    if (std::find(ids.begin(), ids.end(), device_id) == ids.end())
        throw ConfigError("config field \"device\": unknown device id \"" + device_id + "\"");
    if (protocol == "bb84") {
        try {
            bb84.check();
        } catch (const QkdError& e) {
            throw ConfigError(e.what());
        }
    } else if (protocol == "example_protocol") {
        if (n_pairs == 0) throw ConfigError("config field \"n_pairs\" must be positive");
        if (!(gamma > 0.0 && gamma < 1.0))
            throw ConfigError("config field \"gamma\" must lie in (0, 1)");
    } else {
        throw ConfigError("config field \"protocol\": unknown protocol \"" + protocol + "\"");
    }
    if (trials == 0) throw ConfigError("config field \"trials\" must be positive");
    if (analyses.empty()) throw ConfigError("config field \"analyses\" must be nonempty");
    const auto known = known_analysis_ids();
    for (const auto& a : analyses) {
        if (std::find(known.begin(), known.end(), a) == known.end())
            throw ConfigError("config field \"analyses\": unknown analysis id \"" + a + "\"");
        if ((a == "eve_guessing" || a == "eve_guessing_map") && protocol != "example_protocol")
            throw ConfigError("analysis \"" + a + "\" needs the example protocol");
        if (a == "eve_guessing_map" && n_pairs > 4)
            throw ConfigError("analysis \"eve_guessing_map\" supports n_pairs <= 4");
        if (a == "signalling" && (protocol_rounds() < 2 || protocol_rounds() > 6))
            throw ConfigError("analysis \"signalling\" enumerates exactly; 2 <= rounds <= 6");
        if (a == "contradiction" && protocol_rounds() > 12)
            throw ConfigError("analysis \"contradiction\" enumerates exactly; rounds <= 12");
    }
    if (format != "json" && format != "csv")
        throw ConfigError("config field \"output.format\" must be json or csv");
}

ordered_json ExperimentConfig::to_json() const {
    ordered_json j;
    j["device"] = device_id;
    j["protocol"] = protocol;
    if (protocol == "example_protocol") {
        j["n_pairs"] = n_pairs;
        j["gamma"] = gamma;
    } else {
        const ordered_json bj = bb84.to_json();  // keep alive across items()
        for (const auto& [k, v] : bj.items()) j[k] = v;
    }
    j["trials"] = trials;
    j["seed"] = seed;
    j["analyses"] = analyses;
    ordered_json out;
    out["path"] = out_path;
    out["format"] = format;
    j["output"] = std::move(out);
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const ordered_json& j) {
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    ExperimentConfig c;
    bool device_seen = false;
    bool rounds_seen = false;
    bool pairs_seen = false;
    for (const auto& [key, val] : j.items()) {
        if (key == "device") {
            c.device_id = json_string(val, key);
            device_seen = true;
        } else if (key == "protocol") {
            c.protocol = json_string(val, key);
        } else if (key == "n_rounds") {
            c.bb84.n_rounds = json_uint(val, key);
            rounds_seen = true;
        } else if (key == "key_basis") {
            c.bb84.key_basis = parse_basis_checked(json_string(val, key), key);
        } else if (key == "test_selection") {
            c.bb84.test_selection = parse_test_selection(val);
        } else if (key == "basis_bias") {
            c.bb84.basis_bias = json_number(val, key);
        } else if (key == "pa_output_length") {
            if (val.is_string()) {
                if (val.get<std::string>() != "auto")
                    throw ConfigError(
                        "config field \"pa_output_length\" must be \"auto\" or an integer");
                c.bb84.pa_output_length.reset();
            } else {
                c.bb84.pa_output_length = json_uint(val, key);
            }
        } else if (key == "n_pairs") {
            c.n_pairs = json_uint(val, key);
            pairs_seen = true;
        } else if (key == "gamma") {
            c.gamma = json_number(val, key);
        } else if (key == "trials") {
            c.trials = json_uint(val, key);
        } else if (key == "seed") {
            c.seed = json_uint(val, key);
        } else if (key == "analyses") {
            if (!val.is_array()) throw ConfigError("config field \"analyses\" must be a list");
            c.analyses.clear();
            for (const auto& a : val) c.analyses.push_back(json_string(a, "analyses[]"));
        } else if (key == "output") {
            if (!val.is_object()) throw ConfigError("config field \"output\" must be an object");
            for (const auto& [ok, ov] : val.items()) {
                if (ok == "path")
                    c.out_path = json_string(ov, "output.path");
                else if (ok == "format")
                    c.format = json_string(ov, "output.format");
                else
                    throw ConfigError("unknown config key: output." + ok);
            }
        } else {
            throw ConfigError("unknown config key: " + key);
        }
    }
    if (!device_seen) throw ConfigError("config field \"device\" is required");
    if (c.protocol == "bb84" && !rounds_seen)
        throw ConfigError("config field \"n_rounds\" is required for bb84");
    if (c.protocol == "example_protocol" && !pairs_seen)
        throw ConfigError("config field \"n_pairs\" is required for the example protocol");
    if (c.protocol == "example_protocol" && rounds_seen)
        throw ConfigError("config field \"n_rounds\" applies to bb84 only");
    if (c.protocol == "bb84" && pairs_seen)
        throw ConfigError("config field \"n_pairs\" applies to the example protocol only");
    c.check();
    return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    ordered_json j;
    try {
        j = ordered_json::parse(ss.str());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file is not valid JSON: " + std::string(e.what()));
    }
    return from_json(j);
}

std::vector<std::string> known_analysis_ids() {
    return {"qber", "key_claim", "eve_guessing", "eve_guessing_map", "signalling",
            "contradiction"};
}

Transcript run_single_trial(const ExperimentConfig& cfg, std::uint64_t trial) {
    Rng rng = trial_rng(cfg.seed, trial);
    const Device dev = make_device(cfg.device_id, cfg.protocol_rounds());
    Transcript t = cfg.protocol == "example_protocol"
                       ? run_example_protocol(cfg.n_pairs, dev, rng, cfg.gamma)
                       : run_bb84(cfg.bb84, dev, rng);
    t.seed = cfg.seed;
    t.trial_index = trial;
    t.config = cfg.to_json();
    t.config_hash = content_hash(t.config.dump());
    return t;
}

namespace {

ordered_json qber_summary(const std::vector<Transcript>& batch) {
    std::map<std::string, TestStats> agg;
    std::uint64_t sift_total = 0;
    std::uint64_t sift_mismatch = 0;
    std::uint64_t pa_bits = 0;
    for (const auto& t : batch) {
        for (const auto& [b, s] : t.test_stats) {
            agg[b].rounds += s.rounds;
            agg[b].errors += s.errors;
        }
        for (std::size_t i = 0; i < t.sifted_key_a.size(); ++i) {
            ++sift_total;
            if (t.sifted_key_a[i] != t.sifted_key_b[i]) ++sift_mismatch;
        }
        if (t.pa.present) pa_bits += t.pa.output_length;
    }
    ordered_json j;
    ordered_json per = ordered_json::object();
    for (const auto& [b, s] : agg) {
        ordered_json e;
        e["rounds"] = s.rounds;
        e["errors"] = s.errors;
        e["qber"] = s.qber();
        per[b] = std::move(e);
    }
    j["test"] = std::move(per);
    j["mean_sifted_length"] =
        static_cast<double>(sift_total) / static_cast<double>(batch.size());
    j["sifted_mismatch_rate"] =
        sift_total ? static_cast<double>(sift_mismatch) / static_cast<double>(sift_total) : 0.0;
    j["mean_pa_length"] = static_cast<double>(pa_bits) / static_cast<double>(batch.size());
    return j;
}

ordered_json key_claim_summary(const std::vector<Transcript>& batch) {
    std::size_t ok = 0;
    double sum_dph = 0.0;
    double sum_len = 0.0;
    for (const auto& t : batch) {
        try {
            const KeyClaim c = naive_key_claim(t);
            ++ok;
            sum_dph += c.delta_ph;
            sum_len += c.claimed_length;
        } catch (const QkdError&) {
            // trial produced no X-basis tests; excluded from the averages
        }
    }
    ordered_json j;
    j["trials_with_x_tests"] = ok;
    j["mean_delta_ph"] = ok ? sum_dph / static_cast<double>(ok) : 0.0;
    j["mean_claimed_length"] = ok ? sum_len / static_cast<double>(ok) : 0.0;
    j["formula_id"] = "naive_cpa";
    return j;
}

std::pair<std::size_t, double> example_params(const Transcript& t) {
    if (t.protocol_id != "example_protocol" || !t.config.contains("n_pairs") ||
        !t.config.contains("gamma"))
        throw ConfigError("analysis needs example-protocol transcripts with n_pairs/gamma");
    return {t.config.at("n_pairs").get<std::size_t>(), t.config.at("gamma").get<double>()};
}

}  // namespace

ordered_json analyze_batch(const std::vector<std::string>& ids,
                           const std::vector<Transcript>& batch) {
    if (batch.empty()) throw ConfigError("no transcripts to analyze");
    for (const auto& t : batch) {
        if (t.schema_version != batch.front().schema_version)
            throw ConfigError("transcript batch mixes schema versions");
        if (t.config_hash != batch.front().config_hash)
            throw ConfigError("transcript batch mixes config hashes");
    }
    const std::size_t n = batch.front().rounds.size();
    ordered_json out = ordered_json::object();
    for (const auto& id : ids) {
        if (id == "qber") {
            out[id] = qber_summary(batch);
        } else if (id == "key_claim") {
            out[id] = key_claim_summary(batch);
        } else if (id == "eve_guessing") {
            out[id] = to_json(eve_guessing(batch, "copy_decoder"));
        } else if (id == "eve_guessing_map") {
            const auto [n_pairs, gamma] = example_params(batch.front());
            ordered_json j = to_json(eve_guessing(batch, "map_decoder"));
            j["exact"] = to_json(
                map_decoder_exact(make_device(batch.front().device_id, 2 * n_pairs),
                                  n_pairs, gamma));
            out[id] = std::move(j);
        } else if (id == "signalling") {
            if (n < 2 || n > 6)
                throw ConfigError("analysis \"signalling\" enumerates exactly; 2 <= rounds <= 6");
            out[id] = to_json(signalling_measure(make_device(batch.front().device_id, n), n));
        } else if (id == "contradiction") {
            if (n == 0 || n > 12)
                throw ConfigError("analysis \"contradiction\" enumerates exactly; rounds <= 12");
            out[id] = to_json(contradiction_report(make_device(batch.front().device_id, n), n));
        } else {
            throw ConfigError("unknown analysis id: " + id);
        }
    }
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.check();
    ExperimentResult res;
    res.config = cfg;
    std::string jsonl;
    for (std::uint64_t i = 0; i < cfg.trials; ++i) {
        res.transcripts.push_back(run_single_trial(cfg, i));
        jsonl += to_jsonl(res.transcripts.back());
    }
    res.transcripts_jsonl = std::move(jsonl);
    ordered_json rep;
    rep["schema_version"] = kTranscriptSchemaVersion;
    rep["rng_stream"] = kRngStreamId;
    rep["config"] = cfg.to_json();
    rep["config_hash"] = content_hash(rep["config"].dump());
    rep["transcript_hash"] = content_hash(res.transcripts_jsonl);
    rep["trials"] = cfg.trials;
    rep["analyses"] = analyze_batch(cfg.analyses, res.transcripts);
    res.report = std::move(rep);
    return res;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw QkdError("cannot open for writing: " + path);
    f << content;
    if (!f) throw QkdError("write failed: " + path);
}

void write_report_files(const ExperimentResult& r) {
    namespace fs = std::filesystem;
    fs::create_directories(r.config.out_path);
    const fs::path dir(r.config.out_path);
    write_text_file((dir / "transcripts.jsonl").string(), r.transcripts_jsonl);
    if (r.config.format == "csv")
        write_text_file((dir / "report.csv").string(), metrics_csv(r.report));
    else
        write_text_file((dir / "report.json").string(), r.report.dump(2) + "\n");
}

}  // namespace qkdmem
