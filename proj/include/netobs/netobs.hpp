#pragma once

#include "netobs/analysis.hpp"
#include "netobs/config.hpp"
#include "netobs/error.hpp"
#include "netobs/impact.hpp"
#include "netobs/method.hpp"
#include "netobs/overhead.hpp"
#include "netobs/presets.hpp"
#include "netobs/runner.hpp"
#include "netobs/scenario.hpp"
#include "netobs/sim.hpp"
#include "netobs/units.hpp"
#include "netobs/units_text.hpp"
#include "netobs/version.hpp"
