#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dtilink {

/// Machine-readable error categories. The C API surfaces these verbatim;
/// the CLI groups them into usage / data / computation exit codes.
enum class Errc {
    ok = 0,
    invalid_argument,
    empty_dataset,
    invalid_weight,
    invalid_node,
    observed_pair,
    beta_too_large,
    solve_failed,
    spectral_estimate_failed,
    empty_scores,
    too_many_folds,
    leakage_detected,
    no_curves,
    schema_error,
    parse_error,
    io_error,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, std::string message) {
    throw Error(code, std::move(message));
}

enum class Side : uint8_t { Drug = 0, Protein = 1 };

/// Dense index plus the side it lives on. Drug and protein index spaces are
/// independent, so a bare integer is ambiguous.
struct NodeRef {
    Side side;
    uint32_t index;
};

inline NodeRef drug_node(uint32_t index) { return {Side::Drug, index}; }
inline NodeRef protein_node(uint32_t index) { return {Side::Protein, index}; }

/// One observed drug-protein interaction with external identifiers kept as
/// opaque tokens. Weight defaults to 1.0 when the source has no score column.
struct Interaction {
    std::string drug;
    std::string protein;
    double weight = 1.0;
};

enum class DedupRule { Sum, Max, First };

// --- deterministic mixing / hashing helpers -------------------------------
//
// Seeded behaviour (fold shuffles, tie shuffles) must reproduce bit-for-bit
// across platforms, so we avoid std::shuffle / distributions and use an
// explicit splitmix64 stream everywhere.

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform-ish value in [0, bound). Modulo bias is far below anything the
    /// fold sizes here can observe.
    uint64_t next_below(uint64_t bound) { return bound ? next() % bound : 0; }

    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    uint64_t state_;
};

/// Derivation of purpose-specific sub-seeds from one master seed. Stream ids
/// keep fold splitting and per-(fold, config) tie shuffles independent while
/// staying reproducible from a single integer.
namespace seed_stream {
constexpr uint64_t kFoldSplit = 0x466f6c6453706c74ULL;  // "FoldSplt"
constexpr uint64_t kTieBreak = 0x5469654272656b30ULL;   // "TieBrek0"

inline uint64_t derive(uint64_t master, uint64_t stream) {
    return splitmix64(master ^ splitmix64(stream));
}

inline uint64_t derive(uint64_t master, uint64_t stream, uint64_t a, uint64_t b) {
    return splitmix64(derive(master, stream) ^ splitmix64(a * 0x100000001b3ULL + b));
}
}  // namespace seed_stream

// FNV-1a, used for content hashes and graph fingerprints.
constexpr uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr uint64_t kFnvPrime = 0x100000001b3ULL;

inline uint64_t fnv1a(const void* data, size_t size, uint64_t hash = kFnvOffset) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < size; ++i) {
        hash ^= bytes[i];
        hash *= kFnvPrime;
    }
    return hash;
}

inline uint64_t fnv1a_u64(uint64_t value, uint64_t hash) {
    return fnv1a(&value, sizeof value, hash);
}

}  // namespace dtilink
