#pragma once

#include "orthant/bandwidth.hpp"
#include "orthant/dataset.hpp"
#include "orthant/diagnostics.hpp"
#include "orthant/errors.hpp"
#include "orthant/estimators.hpp"
#include "orthant/indexes.hpp"
#include "orthant/io.hpp"
#include "orthant/kernels.hpp"
#include "orthant/parametric.hpp"
#include "orthant/quadrature.hpp"
#include "orthant/special.hpp"
