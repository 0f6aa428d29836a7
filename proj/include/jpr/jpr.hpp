#pragma once
// Umbrella header.

#include "jpr/dynamics.hpp"
#include "jpr/error.hpp"
#include "jpr/gridcalc.hpp"
#include "jpr/gridio.hpp"
#include "jpr/jointdist.hpp"
#include "jpr/opalg.hpp"
#include "jpr/parse.hpp"
#include "jpr/states.hpp"
#include "jpr/symbols.hpp"
#include "jpr/tomography.hpp"
#include "jpr/verify.hpp"
