#pragma once

#include "rangeband/rng.hpp"
#include "rangeband/distributions.hpp"
#include "rangeband/problem.hpp"
#include "rangeband/hedge.hpp"
#include "rangeband/policies.hpp"
#include "rangeband/baselines.hpp"
#include "rangeband/policy.hpp"
#include "rangeband/linear.hpp"
#include "rangeband/analysis.hpp"
#include "rangeband/harness.hpp"
#include "rangeband/io.hpp"
