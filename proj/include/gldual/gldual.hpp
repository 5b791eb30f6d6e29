#pragma once

// Umbrella header for the duality verification toolkit.

#include "gldual/grid.hpp"
#include "gldual/laplacian.hpp"
#include "gldual/linsolve.hpp"
#include "gldual/eig.hpp"
#include "gldual/primal.hpp"
#include "gldual/dual.hpp"
#include "gldual/stagger.hpp"
#include "gldual/complex_gl.hpp"
#include "gldual/report.hpp"
#include "gldual/config.hpp"
#include "gldual/runner.hpp"
