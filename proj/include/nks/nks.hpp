#pragma once

// Umbrella header for the library (everything except the CLI).

#include "nks/errors.hpp"
#include "nks/parallel.hpp"
#include "nks/quadrature.hpp"
#include "nks/polynomial.hpp"
#include "nks/activations.hpp"
#include "nks/hermite.hpp"
#include "nks/dual.hpp"
#include "nks/kernels.hpp"
#include "nks/spectrum.hpp"
#include "nks/random.hpp"
#include "nks/gp_paths.hpp"
#include "nks/finite_width.hpp"
#include "nks/io.hpp"
