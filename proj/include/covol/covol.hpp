#pragma once

#include "covol/asymptotics.hpp"
#include "covol/design.hpp"
#include "covol/errors.hpp"
#include "covol/estimators.hpp"
#include "covol/grid.hpp"
#include "covol/interval.hpp"
#include "covol/io.hpp"
#include "covol/mdp.hpp"
#include "covol/model.hpp"
#include "covol/parallel.hpp"
#include "covol/paths.hpp"
#include "covol/quadrature.hpp"
#include "covol/rng.hpp"
#include "covol/stats.hpp"
