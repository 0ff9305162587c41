#include "cf/losses.hpp"

#include <cmath>
#include <cstddef>

#include "cf/errors.hpp"

namespace cf {

LossMode loss_mode_from_string(const std::string& s) {
    if (s == "ce") return LossMode::kCe;
    if (s == "cs_pop") return LossMode::kCsPop;
    if (s == "cs_ins") return LossMode::kCsIns;
    if (s == "focal") return LossMode::kFocal;
    if (s == "hinge") return LossMode::kHinge;
    throw ConfigError("unknown loss mode '" + s +
                      "' (expected ce|cs_pop|cs_ins|focal|hinge)");
}

std::string to_string(LossMode mode) {
    switch (mode) {
        case LossMode::kCe: return "ce";
        case LossMode::kCsPop: return "cs_pop";
        case LossMode::kCsIns: return "cs_ins";
        case LossMode::kFocal: return "focal";
        case LossMode::kHinge: return "hinge";
    }
    throw ContractError("invalid LossMode");
}

void LossConfig::validate() const {
    if (lambda < 0) throw ConfigError("loss.lambda: must be >= 0");
    if (gamma < 0) throw ConfigError("loss.gamma: must be >= 0");
    if (margin <= 0) throw ConfigError("loss.margin: must be > 0");
    if (eps <= 0) throw ConfigError("loss.eps: must be > 0");
}

namespace {

void check_gold(int gold, size_t k) {
    if (gold < 0 || static_cast<size_t>(gold) >= k)
        throw ContractError("gold label id out of range");
}

}  // namespace

LossResult ce_loss(const ProbDist& dist, int gold, double eps) {
    check_gold(gold, dist.size());
    LossResult r;
    r.loss = -log_prob(dist, gold, eps);
    r.dlogits.resize(dist.size());
    for (size_t k = 0; k < dist.size(); ++k)
        r.dlogits[k] = dist.values[k] - (static_cast<int>(k) == gold ? 1.0 : 0.0);
    return r;
}

LossResult cs_regularizer(const ProbDist& dist, int gold, const Vec& costs, double eps) {
    check_gold(gold, dist.size());
    if (costs.size() != dist.size())
        throw ContractError("cost row length does not match distribution");
    for (double c : costs)
        if (c < 0) throw ContractError("negative cost in cost row");

    LossResult r;
    r.dlogits.assign(dist.size(), 0.0);
    double cost_sum = 0.0;  // sum of C(gold,j) over j != gold
    for (size_t j = 0; j < dist.size(); ++j) {
        if (static_cast<int>(j) == gold) continue;
        r.loss += costs[j] * log_prob(dist, static_cast<int>(j), eps);
        r.dlogits[j] += costs[j];
        cost_sum += costs[j];
    }
    // dReg/dz_k = sum_{j!=gold} C_j (d_jk - p_k) = C_k·[k!=gold] - p_k·sum C_j
    for (size_t k = 0; k < dist.size(); ++k)
        r.dlogits[k] -= dist.values[k] * cost_sum;
    return r;
}

LossResult cs_instance_loss(const ProbDist& dist, int gold, const LossConfig& config) {
    check_gold(gold, dist.size());
    LossResult ce = ce_loss(dist, gold, config.eps);
    if (config.lambda == 0.0) return ce;

    const size_t k_count = dist.size();
    LossResult r;
    r.dlogits.assign(k_count, 0.0);
    double reg = 0.0;
    if (config.ins_cost_gradient == InsCostGradient::kFrozen) {
        // Treat the p_j in the cost slot as a captured constant: same gradient
        // shape as cs_regularizer with C_j = p_j.
        double cost_sum = 0.0;
        for (size_t j = 0; j < k_count; ++j) {
            if (static_cast<int>(j) == gold) continue;
            double pj = dist.values[j];
            reg += pj * log_prob(dist, static_cast<int>(j), config.eps);
            r.dlogits[j] += pj;
            cost_sum += pj;
        }
        for (size_t k = 0; k < k_count; ++k)
            r.dlogits[k] -= dist.values[k] * cost_sum;
    } else {
        // Full derivative: dReg/dp_j = ln p_j + 1 for j != gold, then chain
        // through softmax: dReg/dz_k = p_k·(g_k - sum_j p_j·g_j) where
        // g_j = (ln p_j + 1)·[j != gold].
        Vec g(k_count, 0.0);
        double dot = 0.0;
        for (size_t j = 0; j < k_count; ++j) {
            if (static_cast<int>(j) == gold) continue;
            double lnp = log_prob(dist, static_cast<int>(j), config.eps);
            reg += dist.values[j] * lnp;
            g[j] = lnp + 1.0;
            dot += dist.values[j] * g[j];
        }
        for (size_t k = 0; k < k_count; ++k)
            r.dlogits[k] = dist.values[k] * (g[k] - dot);
    }
    r.loss = ce.loss + config.lambda * reg;
    for (size_t k = 0; k < k_count; ++k)
        r.dlogits[k] = ce.dlogits[k] + config.lambda * r.dlogits[k];
    return r;
}

LossResult focal_loss(const ProbDist& dist, int gold, double gamma, double eps) {
    check_gold(gold, dist.size());
    if (gamma < 0) throw ContractError("focal gamma must be >= 0");
    if (gamma == 0.0) return ce_loss(dist, gold, eps);

    const double pg = dist.values[gold];
    const double lnpg = log_prob(dist, gold, eps);
    const double u = 1.0 - pg;
    LossResult r;
    r.dlogits.assign(dist.size(), 0.0);
    if (u <= 0.0) return r;  // perfect prediction: loss 0, flat gradient

    const double ug = std::pow(u, gamma);
    r.loss = -ug * lnpg;
    // dLoss/dp_gold = gamma·u^(gamma-1)·ln(p_gold) - u^gamma / p_gold,
    // then dp_gold/dz_k = p_gold·(d_{k,gold} - p_k).
    const double dl_dpg = gamma * std::pow(u, gamma - 1.0) * lnpg - ug / pg;
    for (size_t k = 0; k < dist.size(); ++k) {
        double dpg_dzk = pg * ((static_cast<int>(k) == gold ? 1.0 : 0.0) - dist.values[k]);
        r.dlogits[k] = dl_dpg * dpg_dzk;
    }
    return r;
}

LossResult hinge_loss(const Logits& logits, int gold, double margin) {
    check_gold(gold, logits.values.size());
    if (margin <= 0) throw ContractError("hinge margin must be > 0");

    int violator = -1;
    double best = 0.0;
    for (size_t j = 0; j < logits.values.size(); ++j) {
        if (static_cast<int>(j) == gold) continue;
        if (violator < 0 || logits.values[j] > best) {
            violator = static_cast<int>(j);
            best = logits.values[j];
        }
    }
    LossResult r;
    r.dlogits.assign(logits.values.size(), 0.0);
    if (violator < 0) return r;  // K == 1: nothing to violate

    double loss = margin + best - logits.values[gold];
    if (loss > 0.0) {
        r.loss = loss;
        r.dlogits[violator] = 1.0;
        r.dlogits[gold] = -1.0;
    }
    return r;
}

LossResult total_loss(const Logits& logits, const ProbDist& dist, int gold,
                      const LossConfig& config, const Vec* cost_row) {
    switch (config.mode) {
        case LossMode::kCe:
            return ce_loss(dist, gold, config.eps);
        case LossMode::kCsPop: {
            LossResult ce = ce_loss(dist, gold, config.eps);
            if (config.lambda == 0.0) return ce;
            if (cost_row == nullptr)
                throw ContractError("cs_pop loss requires a cost row");
            LossResult reg = cs_regularizer(dist, gold, *cost_row, config.eps);
            LossResult r;
            r.loss = ce.loss + config.lambda * reg.loss;
            r.dlogits.resize(dist.size());
            for (size_t k = 0; k < dist.size(); ++k)
                r.dlogits[k] = ce.dlogits[k] + config.lambda * reg.dlogits[k];
            return r;
        }
        case LossMode::kCsIns:
            return cs_instance_loss(dist, gold, config);
        case LossMode::kFocal:
            return focal_loss(dist, gold, config.gamma, config.eps);
        case LossMode::kHinge:
            return hinge_loss(logits, gold, config.margin);
    }
    throw ContractError("invalid LossMode");
}

}  // namespace cf
