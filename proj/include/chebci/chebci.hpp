#pragma once

#include "chebci/chains.hpp"
#include "chebci/core.hpp"
#include "chebci/coverage.hpp"
#include "chebci/errors.hpp"
#include "chebci/rng.hpp"
#include "chebci/trace.hpp"
#include "chebci/trace_io.hpp"
#include "chebci/variance.hpp"
