#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "cf/errors.hpp"

namespace cf {

using Vec = std::vector<double>;

// Pre-softmax scores. Finite by contract.
struct Logits {
    Vec values;
};

// A distribution over the K labels. Produced by softmax; entries in (0,1],
// sum 1 within 1e-9.
struct ProbDist {
    Vec values;

    size_t size() const { return values.size(); }
    double operator[](size_t i) const { return values[i]; }
};

// Max-shifted softmax. Throws ContractError on non-finite input.
ProbDist softmax(const Logits& logits);

// ln(max(p_class, eps)). Throws ContractError if class_id is out of range or
// eps <= 0.
double log_prob(const ProbDist& dist, int class_id, double eps = 1e-12);

constexpr double kDefaultProbFloor = 1e-12;

// Deterministic RNG: a std::mt19937_64 engine (output sequence fixed by the
// C++ standard) with hand-rolled transforms, so streams are identical across
// platforms and compilers. Identical seed => identical stream. Single-owner;
// never shared between threads.
class SeededRng {
public:
    explicit SeededRng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n). Rejection sampling, no modulo bias.
    uint64_t next_below(uint64_t n) {
        if (n == 0) throw ContractError("SeededRng::next_below: n must be > 0");
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t r;
        do {
            r = next_u64();
        } while (r >= limit);
        return r % n;
    }

    double next_uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // Fisher-Yates, descending.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            const size_t j = static_cast<size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Inverse-CDF draw from an explicit distribution (sums to ~1).
    int sample_categorical(const Vec& probs);

private:
    std::mt19937_64 engine_;
};

// Stable sub-seed derivation so every source of randomness funnels through
// one manifest seed. splitmix64 over (base, FNV(tag), index).
uint64_t derive_seed(uint64_t base, std::string_view tag, uint64_t index = 0);

// FNV-1a 64-bit. Distinct names: a string literal passed with a chained hash
// would otherwise prefer the (void*, size_t) overload, taking the hash as a
// byte count.
uint64_t fnv1a64_bytes(const void* data, size_t len,
                       uint64_t h = 0xcbf29ce484222325ull);
uint64_t fnv1a64(std::string_view s, uint64_t h = 0xcbf29ce484222325ull);

// 16-digit lowercase hex of a 64-bit hash.
std::string to_hex(uint64_t v);
uint64_t from_hex(const std::string& s);

// Central-difference gradient check. Returns the max over coordinates of
//   |fd_i - analytic_i| / max(1, |analytic_i|).
// grad_f is evaluated once at `point`; f is probed at 2*dim shifted points.
// Throws ContractError if f is non-finite at any probe or step <= 0.
double check_gradient(const std::function<double(const Vec&)>& f,
                      const std::function<Vec(const Vec&)>& grad_f,
                      const Vec& point, double step = 1e-5);

bool all_finite(const Vec& v);

}  // namespace cf
