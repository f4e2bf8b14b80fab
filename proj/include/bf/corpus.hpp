#pragma once

// The bundled decision problems, built in code.

#include <string>
#include <vector>

#include "bf/lottery.hpp"
#include "bf/utility.hpp"

namespace bf::corpus {

/// Outcomes {$100, $0}, best first.
OutcomeOrder money();

/// Table assessment on money() with (u, v, 1-u-v) on {$100, $0}.
UtilityAssessment money_table(double u_amb, double v_amb);

/// Ambiguity-averse assessment shipped with the ellsberg bundle:
/// constant indices alpha = 0.8, beta = 0.7, i.e. (0.2, 0.7, 0.1).
UtilityAssessment ellsberg_assessment();

struct Ellsberg {
  FramePtr states;  // {r, b, y}
  Bpa m_x;
  std::vector<Act> acts;
  std::vector<BfLottery> lotteries;  // L1..L4
};
Ellsberg ellsberg();

struct OneRedBall {
  FramePtr states;  // six colours
  Bpa m_x;
  BfLottery red;
  BfLottery other;  // any colour but red
};
/// n >= 2 balls, exactly one red.
OneRedBall one_red_ball(int n);

struct ThousandBalls {
  BfLottery urn1;  // 0.001 on $100
  BfLottery urn2;  // vacuous
};
ThousandBalls thousand_balls();

/// Two-stage urn: a first draw picks Ellsberg's L1 or L2.
CompoundLottery two_urn_compound();

struct ConditionalEmbedding {
  ProductFramePtr joint;  // X x Y
  Bpa cond;               // on Y: 0.8 on {y}, 0.2 on Y
  SubsetMask given;       // {x}
};
ConditionalEmbedding conditional_embedding();

std::vector<std::string> bundle_names();

}  // namespace bf::corpus
