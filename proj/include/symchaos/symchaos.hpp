#pragma once

#include "symchaos/analysis.hpp"
#include "symchaos/chaos_metrics.hpp"
#include "symchaos/descriptors.hpp"
#include "symchaos/error.hpp"
#include "symchaos/json_io.hpp"
#include "symchaos/marking.hpp"
#include "symchaos/pair_search.hpp"
#include "symchaos/robust_gen.hpp"
#include "symchaos/series.hpp"
#include "symchaos/state_model.hpp"
