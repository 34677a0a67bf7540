// crwqed.hpp — umbrella header

#pragma once

#include "crwqed/version.hpp"
#include "crwqed/errors.hpp"
#include "crwqed/model.hpp"
#include "crwqed/green.hpp"
#include "crwqed/quadrature.hpp"
#include "crwqed/propagator.hpp"
#include "crwqed/analytic.hpp"
#include "crwqed/scenario.hpp"
#include "crwqed/runner.hpp"
