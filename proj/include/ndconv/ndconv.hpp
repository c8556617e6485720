#pragma once

// Umbrella header for the whole library.

#include "ndconv/convolution.hpp"
#include "ndconv/error.hpp"
#include "ndconv/explicit_matrix.hpp"
#include "ndconv/imageio.hpp"
#include "ndconv/kernel.hpp"
#include "ndconv/shape.hpp"
#include "ndconv/simulation.hpp"
#include "ndconv/solvers.hpp"
#include "ndconv/tensor.hpp"
#include "ndconv/verification.hpp"
#include "ndconv/version.hpp"
