#pragma once

// Umbrella header for the full engine.

#include "ctabsim/bench.hpp"
#include "ctabsim/datagen.hpp"
#include "ctabsim/parser.hpp"
#include "ctabsim/store_io.hpp"
