#pragma once

#include "errors.hpp"
#include "pmath.hpp"
#include "weights.hpp"
#include "sampled_weight.hpp"
#include "transform.hpp"
#include "shooting.hpp"
#include "lyapunov.hpp"
#include "higher_order.hpp"
#include "homog.hpp"
#include "io.hpp"
