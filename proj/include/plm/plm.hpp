#pragma once

#include "checkpoint.hpp"
#include "common.hpp"
#include "config.hpp"
#include "data.hpp"
#include "engine.hpp"
#include "network.hpp"
#include "regularize.hpp"
#include "report.hpp"
#include "rng.hpp"
