#pragma once

#include "complex_poly.hpp"
#include "ensemble.hpp"
#include "errors.hpp"
#include "experiment.hpp"
#include "io.hpp"
#include "orbit.hpp"
#include "parallel.hpp"
#include "pipeline.hpp"
#include "rng.hpp"
#include "starting_grid.hpp"
#include "svg.hpp"
