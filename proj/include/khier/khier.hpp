#pragma once

#include "khier/common.hpp"
#include "khier/hierarchy.hpp"
#include "khier/cost.hpp"
#include "khier/multicast.hpp"
#include "khier/exact.hpp"
#include "khier/approx_uniform.hpp"
#include "khier/approx_routed.hpp"
#include "khier/instance.hpp"
#include "khier/io.hpp"
#include "khier/generators.hpp"
#include "khier/bench.hpp"
