#pragma once

// Everything in one include.

#include "egwg/curves.hpp"
#include "egwg/distribution.hpp"
#include "egwg/errors.hpp"
#include "egwg/estimation.hpp"
#include "egwg/fixtures.hpp"
#include "egwg/gof.hpp"
#include "egwg/io.hpp"
#include "egwg/numerics.hpp"
#include "egwg/optimize.hpp"
#include "egwg/reliability.hpp"
#include "egwg/submodels.hpp"
