#ifndef EGMRSI_EGMRSI_HPP
#define EGMRSI_EGMRSI_HPP

#include "egmrsi/config.hpp"
#include "egmrsi/emotion.hpp"
#include "egmrsi/environment.hpp"
#include "egmrsi/errors.hpp"
#include "egmrsi/fig3.hpp"
#include "egmrsi/goal_world.hpp"
#include "egmrsi/goals.hpp"
#include "egmrsi/meaning.hpp"
#include "egmrsi/metacognition.hpp"
#include "egmrsi/reward.hpp"
#include "egmrsi/rng.hpp"
#include "egmrsi/runner.hpp"
#include "egmrsi/safety.hpp"
#include "egmrsi/self_modification.hpp"
#include "egmrsi/trace.hpp"
#include "egmrsi/verify.hpp"

#endif
