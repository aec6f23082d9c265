#pragma once

#include "camab/abstraction.hpp"
#include "camab/bandit.hpp"
#include "camab/error.hpp"
#include "camab/experiments.hpp"
#include "camab/io.hpp"
#include "camab/metrics.hpp"
#include "camab/model.hpp"
#include "camab/models.hpp"
#include "camab/rng.hpp"
#include "camab/transfer.hpp"
