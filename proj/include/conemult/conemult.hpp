#pragma once

#include "conemult/bessel.hpp"
#include "conemult/bochner_riesz.hpp"
#include "conemult/characterization.hpp"
#include "conemult/cutoffs.hpp"
#include "conemult/errors.hpp"
#include "conemult/fft.hpp"
#include "conemult/grid_field.hpp"
#include "conemult/interpolation.hpp"
#include "conemult/lorentz.hpp"
#include "conemult/multiplier_ops.hpp"
#include "conemult/opnorm.hpp"
#include "conemult/parallel.hpp"
#include "conemult/quadrature.hpp"
#include "conemult/radial_fourier.hpp"
#include "conemult/wave_decomp.hpp"
