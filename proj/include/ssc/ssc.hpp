#pragma once

#include "ssc/decision_tree.hpp"
#include "ssc/errors.hpp"
#include "ssc/eval.hpp"
#include "ssc/exact.hpp"
#include "ssc/experiments.hpp"
#include "ssc/instance.hpp"
#include "ssc/json_io.hpp"
#include "ssc/strategies.hpp"
