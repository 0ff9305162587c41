#include "cf/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace cf {

bool all_finite(const Vec& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

ProbDist softmax(const Logits& logits) {
    const Vec& z = logits.values;
    if (z.empty()) throw ContractError("softmax: empty logits");
    if (!all_finite(z)) throw ContractError("softmax: non-finite logit");

    const double zmax = *std::max_element(z.begin(), z.end());
    ProbDist out;
    out.values.resize(z.size());
    double sum = 0.0;
    for (size_t k = 0; k < z.size(); ++k) {
        out.values[k] = std::exp(z[k] - zmax);
        sum += out.values[k];
    }
    const double inv = 1.0 / sum;
    for (double& p : out.values) p *= inv;
    return out;
}

double log_prob(const ProbDist& dist, int class_id, double eps) {
    if (class_id < 0 || static_cast<size_t>(class_id) >= dist.size()) {
        throw ContractError("log_prob: class id " + std::to_string(class_id) +
                            " out of range [0, " + std::to_string(dist.size()) + ")");
    }
    if (!(eps > 0.0)) throw ContractError("log_prob: eps must be > 0");
    return std::log(std::max(dist.values[class_id], eps));
}

int SeededRng::sample_categorical(const Vec& probs) {
    if (probs.empty()) throw ContractError("sample_categorical: empty distribution");
    const double u = next_double();
    double cum = 0.0;
    for (size_t k = 0; k < probs.size(); ++k) {
        cum += probs[k];
        if (u < cum) return static_cast<int>(k);
    }
    // Rounding slack: u landed past the accumulated mass.
    return static_cast<int>(probs.size()) - 1;
}

uint64_t fnv1a64_bytes(const void* data, size_t len, uint64_t h) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

uint64_t fnv1a64(std::string_view s, uint64_t h) {
    return fnv1a64_bytes(s.data(), s.size(), h);
}

std::string to_hex(uint64_t v) {
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = "0123456789abcdef"[v & 0xf];
        v >>= 4;
    }
    return out;
}

uint64_t from_hex(const std::string& s) {
    uint64_t v = 0;
    for (char c : s) {
        v <<= 4;
        if (c >= '0' && c <= '9') {
            v |= static_cast<uint64_t>(c - '0');
        } else if (c >= 'a' && c <= 'f') {
            v |= static_cast<uint64_t>(c - 'a' + 10);
        } else {
            throw ConfigError("bad hex string: " + s);
        }
    }
    return v;
}

namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

}  // namespace

uint64_t derive_seed(uint64_t base, std::string_view tag, uint64_t index) {
    return splitmix64(base ^ splitmix64(fnv1a64(tag) ^ splitmix64(index)));
}

double check_gradient(const std::function<double(const Vec&)>& f,
                      const std::function<Vec(const Vec&)>& grad_f,
                      const Vec& point, double step) {
    if (!(step > 0.0)) throw ContractError("check_gradient: step must be > 0");
    const Vec analytic = grad_f(point);
    if (analytic.size() != point.size()) {
        throw ContractError("check_gradient: gradient dimension mismatch");
    }
    Vec probe = point;
    double worst = 0.0;
    for (size_t i = 0; i < point.size(); ++i) {
        const double saved = probe[i];
        probe[i] = saved + step;
        const double fp = f(probe);
        probe[i] = saved - step;
        const double fm = f(probe);
        probe[i] = saved;
        if (!std::isfinite(fp) || !std::isfinite(fm)) {
            throw ContractError("check_gradient: non-finite f at probe " + std::to_string(i));
        }
        const double fd = (fp - fm) / (2.0 * step);
        const double rel = std::abs(fd - analytic[i]) / std::max(1.0, std::abs(analytic[i]));
        worst = std::max(worst, rel);
    }
    return worst;
}

}  // namespace cf
