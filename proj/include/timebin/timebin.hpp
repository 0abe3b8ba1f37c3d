#ifndef TIMEBIN_TIMEBIN_HPP
#define TIMEBIN_TIMEBIN_HPP

#include "errors.hpp"
#include "phase.hpp"
#include "rng.hpp"
#include "parallel.hpp"
#include "outcome.hpp"
#include "chain.hpp"
#include "settings.hpp"
#include "quantum.hpp"
#include "lhv.hpp"
#include "bell.hpp"
#include "config.hpp"
#include "timing.hpp"
#include "timetag.hpp"
#include "simulator.hpp"
#include "analysis.hpp"
#include "commands.hpp"

#endif // TIMEBIN_TIMEBIN_HPP
