#pragma once

#include "stratwave/error.hpp"
#include "stratwave/grid.hpp"
#include "stratwave/profiles.hpp"
#include "stratwave/height_equation.hpp"
#include "stratwave/laminar.hpp"
#include "stratwave/wave_solver.hpp"
#include "stratwave/diagnostics.hpp"
#include "stratwave/eigen.hpp"
#include "stratwave/certificates.hpp"
#include "stratwave/symmetry.hpp"
#include "stratwave/verify.hpp"
#include "stratwave/pipeline.hpp"
