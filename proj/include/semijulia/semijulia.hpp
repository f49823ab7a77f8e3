#pragma once

#include "semijulia/backward.hpp"
#include "semijulia/config.hpp"
#include "semijulia/error.hpp"
#include "semijulia/measure.hpp"
#include "semijulia/polynomial.hpp"
#include "semijulia/ratmap.hpp"
#include "semijulia/render.hpp"
#include "semijulia/rng.hpp"
#include "semijulia/runner.hpp"
#include "semijulia/semigroup.hpp"
#include "semijulia/sphere.hpp"
#include "semijulia/verify.hpp"
