#pragma once

#include <string>

#include "cf/numerics.hpp"

namespace cf {

enum class LossMode { kCe, kCsPop, kCsIns, kFocal, kHinge };

// frozen: the p_j in the cost slot is a constant during differentiation.
// flow:   full derivative of p·ln p, i.e. (ln p + 1)·dp.
enum class InsCostGradient { kFrozen, kFlow };

LossMode loss_mode_from_string(const std::string& s);
std::string to_string(LossMode mode);

struct LossConfig {
    LossMode mode = LossMode::kCe;
    double lambda = 1.0;
    double gamma = 2.0;
    double margin = 1.0;
    InsCostGradient ins_cost_gradient = InsCostGradient::kFrozen;
    double eps = kDefaultProbFloor;

    void validate() const;
};

struct LossResult {
    double loss = 0.0;
    Vec dlogits;  // dLoss/dz, length K
};

// loss = -ln(max(p_gold, eps)); dLoss/dz_k = p_k - [k == gold].
LossResult ce_loss(const ProbDist& dist, int gold, double eps = kDefaultProbFloor);

// reg = sum_{j != gold} C(gold,j) * ln(max(p_j, eps)); costs are constants
// during differentiation: dReg/dz_k = sum_{j != gold} C(gold,j) * ([j==k] - p_k).
// Negative costs are a contract violation.
LossResult cs_regularizer(const ProbDist& dist, int gold, const Vec& costs,
                          double eps = kDefaultProbFloor);

// reg = sum_{j != gold} p_j * ln(max(p_j, eps)); total = CE + lambda * reg.
LossResult cs_instance_loss(const ProbDist& dist, int gold, const LossConfig& config);

// loss = -(1 - p_gold)^gamma * ln(max(p_gold, eps)); gamma == 0 falls back to CE.
LossResult focal_loss(const ProbDist& dist, int gold, double gamma,
                      double eps = kDefaultProbFloor);

// Single-winner multiclass hinge: loss = max(0, margin + max_{j!=gold} z_j - z_gold).
// Subgradient +1 at the lowest-index argmax violator and -1 at gold when loss > 0.
LossResult hinge_loss(const Logits& logits, int gold, double margin);

// Dispatch on config.mode. cost_row is the row C(gold, ·) and is required for
// CS_POP (ignored otherwise). lambda == 0 short-circuits to plain CE so the CS
// modes are bit-identical to CE there.
LossResult total_loss(const Logits& logits, const ProbDist& dist, int gold,
                      const LossConfig& config, const Vec* cost_row = nullptr);

}  // namespace cf
