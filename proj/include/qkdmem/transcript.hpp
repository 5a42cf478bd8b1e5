#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "qkdmem/devices.hpp"

namespace qkdmem {

using ordered_json = nlohmann::ordered_json;

// Bit strings are serialized as {bits, hex}: bit i lands in nibble i/4, MSB
// first within the nibble, so "1010" is hex "a" and "11011" is hex "d8".
std::string bits_to_hex(const std::vector<int>& bits);
std::vector<int> hex_to_bits(const std::string& hex, std::size_t n_bits);

// FNV-1a 64-bit content hash, rendered as "fnv1a64:<16 hex digits>".
std::string content_hash(const std::string& bytes);

inline constexpr int kTranscriptSchemaVersion = 1;

struct TestStats {
    std::uint64_t rounds = 0;
    std::uint64_t errors = 0;
    double qber() const;
};

struct PaRecord {
    bool present = false;
    std::size_t input_length = 0;
    std::size_t output_length = 0;
    std::vector<int> seed;
    std::vector<int> key_a;
    std::vector<int> key_b;
};

// Full record of one protocol run. public_log is exactly Eve's view; the
// sifted keys and per-round data beyond the announced fields are ground
// truth available to analyses but never to reconstruction strategies.
struct Transcript {
    int schema_version = kTranscriptSchemaVersion;
    std::string device_id;
    std::string protocol_id;
    std::uint64_t seed = 0;
    std::uint64_t trial_index = 0;
    std::string rng_stream;
    ordered_json config = ordered_json::object();
    std::string config_hash;

    std::vector<RoundRecord> rounds;
    ordered_json public_log = ordered_json::array();

    std::vector<std::size_t> sifted_rounds;  // 1-based indices, ascending
    std::vector<int> sifted_key_a;
    std::vector<int> sifted_key_b;
    std::map<std::string, TestStats> test_stats;  // keyed by basis name
    std::size_t ec_leakage_bits = 0;
    PaRecord pa;

    void add_log(const std::string& type, ordered_json data);
    // Announced log fields must match round records flagged announced=true.
    void validate() const;
};

std::string to_jsonl(const Transcript& t);
void append_jsonl(std::ostream& os, const Transcript& t);
std::vector<Transcript> parse_jsonl(const std::string& text);
std::vector<Transcript> read_transcript_file(const std::string& path);

}  // namespace qkdmem
