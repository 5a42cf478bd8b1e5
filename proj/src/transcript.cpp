#include "qkdmem/transcript.hpp"

#include <fstream>
#include <sstream>

namespace qkdmem {

namespace {

const char* kHexDigits = "0123456789abcdef";

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw QkdError(std::string("invalid hex digit: ") + c);
}

}  // namespace

std::string bits_to_hex(const std::vector<int>& bits) {
    std::string hex((bits.size() + 3) / 4, '0');
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] & 1) {
            std::size_t nibble = i / 4;
            int weight = 8 >> (i % 4);
            hex[nibble] = kHexDigits[hex_value(hex[nibble]) | weight];
        }
    }
    return hex;
}

std::vector<int> hex_to_bits(const std::string& hex, std::size_t n_bits) {
    if (hex.size() != (n_bits + 3) / 4)
        throw QkdError("hex string length does not match bit count");
    std::vector<int> bits(n_bits);
    for (std::size_t i = 0; i < n_bits; ++i)
        bits[i] = (hex_value(hex[i / 4]) >> (3 - i % 4)) & 1;
    return bits;
}

std::string content_hash(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    std::string out = "fnv1a64:";
    for (int shift = 60; shift >= 0; shift -= 4) out += kHexDigits[(h >> shift) & 0xf];
    return out;
}

double TestStats::qber() const {
    return rounds == 0 ? 0.0 : static_cast<double>(errors) / static_cast<double>(rounds);
}

void Transcript::add_log(const std::string& type, ordered_json data) {
    ordered_json entry;
    entry["type"] = type;
    for (auto& [k, v] : data.items()) entry[k] = v;
    public_log.push_back(std::move(entry));
}

void Transcript::validate() const {
    for (std::size_t i = 0; i < rounds.size(); ++i) {
        if (rounds[i].round_index != i + 1)
            throw QkdError("round indices must be contiguous from 1");
    }
    for (const auto& entry : public_log) {
        const std::string type = entry.at("type");
        if (type == "basis") {
            const auto& r = rounds.at(entry.at("round").get<std::size_t>() - 1);
            if (!r.ann_input_a || !r.ann_input_b)
                throw QkdError("announced bases not flagged in the round record");
        } else if (type == "output") {
            const auto& r = rounds.at(entry.at("round").get<std::size_t>() - 1);
            if (!r.ann_output_a || !r.ann_output_b)
                throw QkdError("announced outputs not flagged in the round record");
        }
    }
    if (sifted_key_a.size() != sifted_key_b.size() ||
        sifted_key_a.size() != sifted_rounds.size())
        throw QkdError("sifted key lengths disagree");
}

namespace {

ordered_json bits_json(const std::vector<int>& bits) {
    ordered_json j;
    j["bits"] = bits.size();
    j["hex"] = bits_to_hex(bits);
    return j;
}

std::vector<int> bits_from_json(const ordered_json& j) {
    return hex_to_bits(j.at("hex").get<std::string>(), j.at("bits").get<std::size_t>());
}

ordered_json header_json(const Transcript& t) {
    ordered_json j;
    j["kind"] = "header";
    j["schema_version"] = t.schema_version;
    j["device_id"] = t.device_id;
    j["protocol_id"] = t.protocol_id;
    j["seed"] = t.seed;
    j["trial_index"] = t.trial_index;
    j["rng_stream"] = t.rng_stream;
    j["config"] = t.config;
    j["config_hash"] = t.config_hash;
    return j;
}

ordered_json round_json(const RoundRecord& r) {
    ordered_json j;
    j["kind"] = "round";
    j["j"] = r.round_index;
    j["xa"] = to_string(r.input_a);
    j["xb"] = to_string(r.input_b);
    j["a"] = r.output_a;
    j["b"] = r.output_b;
    j["test"] = r.is_test;
    ordered_json ann;
    ann["xa"] = r.ann_input_a;
    ann["xb"] = r.ann_input_b;
    ann["a"] = r.ann_output_a;
    ann["b"] = r.ann_output_b;
    j["ann"] = std::move(ann);
    return j;
}

ordered_json footer_json(const Transcript& t) {
    ordered_json j;
    j["kind"] = "footer";
    j["public_log"] = t.public_log;
    j["sifted_rounds"] = t.sifted_rounds;
    j["sifted_key_a"] = bits_json(t.sifted_key_a);
    j["sifted_key_b"] = bits_json(t.sifted_key_b);
    ordered_json stats = ordered_json::object();
    for (const auto& [basis, s] : t.test_stats) {
        ordered_json e;
        e["rounds"] = s.rounds;
        e["errors"] = s.errors;
        stats[basis] = std::move(e);
    }
    j["test_stats"] = std::move(stats);
    j["ec_leakage_bits"] = t.ec_leakage_bits;
    ordered_json pa;
    pa["present"] = t.pa.present;
    if (t.pa.present) {
        pa["input_length"] = t.pa.input_length;
        pa["output_length"] = t.pa.output_length;
        pa["seed"] = bits_json(t.pa.seed);
        pa["key_a"] = bits_json(t.pa.key_a);
        pa["key_b"] = bits_json(t.pa.key_b);
    }
    j["pa"] = std::move(pa);
    return j;
}

}  // namespace

std::string to_jsonl(const Transcript& t) {
    std::ostringstream os;
    append_jsonl(os, t);
    return os.str();
}

void append_jsonl(std::ostream& os, const Transcript& t) {
    os << header_json(t).dump() << '\n';
    for (const auto& r : t.rounds) os << round_json(r).dump() << '\n';
    os << footer_json(t).dump() << '\n';
}

namespace {

RoundRecord round_from_json(const ordered_json& j) {
    RoundRecord r;
    r.round_index = j.at("j").get<std::size_t>();
    r.input_a = parse_basis(j.at("xa").get<std::string>());
    r.input_b = parse_basis(j.at("xb").get<std::string>());
    r.output_a = j.at("a").get<int>();
    r.output_b = j.at("b").get<int>();
    r.is_test = j.at("test").get<bool>();
    const auto& ann = j.at("ann");
    r.ann_input_a = ann.at("xa").get<bool>();
    r.ann_input_b = ann.at("xb").get<bool>();
    r.ann_output_a = ann.at("a").get<bool>();
    r.ann_output_b = ann.at("b").get<bool>();
    return r;
}

}  // namespace

std::vector<Transcript> parse_jsonl(const std::string& text) {
    std::vector<Transcript> out;
    std::istringstream is(text);
    std::string line;
    Transcript cur;
    bool in_transcript = false;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        ordered_json j;
        try {
            j = ordered_json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw QkdError("line " + std::to_string(line_no) + ": not valid JSON");
        }
        const std::string kind = j.at("kind");
        if (kind == "header") {
            if (in_transcript) throw QkdError("header before previous footer");
            cur = Transcript{};
            cur.schema_version = j.at("schema_version").get<int>();
            if (cur.schema_version != kTranscriptSchemaVersion)
                throw QkdError("unsupported schema_version " +
                               std::to_string(cur.schema_version));
            cur.device_id = j.at("device_id").get<std::string>();
            cur.protocol_id = j.at("protocol_id").get<std::string>();
            cur.seed = j.at("seed").get<std::uint64_t>();
            cur.trial_index = j.at("trial_index").get<std::uint64_t>();
            cur.rng_stream = j.at("rng_stream").get<std::string>();
            cur.config = j.at("config");
            cur.config_hash = j.at("config_hash").get<std::string>();
            in_transcript = true;
        } else if (kind == "round") {
            if (!in_transcript) throw QkdError("round record outside a transcript");
            cur.rounds.push_back(round_from_json(j));
        } else if (kind == "footer") {
            if (!in_transcript) throw QkdError("footer without a header");
            cur.public_log = j.at("public_log");
            cur.sifted_rounds = j.at("sifted_rounds").get<std::vector<std::size_t>>();
            cur.sifted_key_a = bits_from_json(j.at("sifted_key_a"));
            cur.sifted_key_b = bits_from_json(j.at("sifted_key_b"));
            for (auto& [basis, e] : j.at("test_stats").items()) {
                TestStats s;
                s.rounds = e.at("rounds").get<std::uint64_t>();
                s.errors = e.at("errors").get<std::uint64_t>();
                cur.test_stats[basis] = s;
            }
            cur.ec_leakage_bits = j.at("ec_leakage_bits").get<std::size_t>();
            const auto& pa = j.at("pa");
            cur.pa.present = pa.at("present").get<bool>();
            if (cur.pa.present) {
                cur.pa.input_length = pa.at("input_length").get<std::size_t>();
                cur.pa.output_length = pa.at("output_length").get<std::size_t>();
                cur.pa.seed = bits_from_json(pa.at("seed"));
                cur.pa.key_a = bits_from_json(pa.at("key_a"));
                cur.pa.key_b = bits_from_json(pa.at("key_b"));
            }
            cur.validate();
            out.push_back(std::move(cur));
            cur = Transcript{};
            in_transcript = false;
        } else {
            throw QkdError("unknown record kind: " + kind);
        }
    }
    if (in_transcript) throw QkdError("transcript truncated: missing footer");
    return out;
}

std::vector<Transcript> read_transcript_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw QkdError("cannot open transcript file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_jsonl(ss.str());
}

}  // namespace qkdmem
