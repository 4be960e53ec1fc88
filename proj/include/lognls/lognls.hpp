#pragma once

#include "lognls/error.hpp"
#include "lognls/ode.hpp"
#include "lognls/gaussian_dynamics.hpp"
#include "lognls/grid.hpp"
#include "lognls/fft.hpp"
#include "lognls/solver.hpp"
#include "lognls/quadrature.hpp"
#include "lognls/fit.hpp"
#include "lognls/superposition.hpp"
#include "lognls/inequalities.hpp"
#include "lognls/multisoliton.hpp"
#include "lognls/localized.hpp"
#include "lognls/io.hpp"
