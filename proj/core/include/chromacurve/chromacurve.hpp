#pragma once

#include "chromacurve/curve_model.hpp"
#include "chromacurve/error.hpp"
#include "chromacurve/image_io.hpp"
#include "chromacurve/matcher.hpp"
#include "chromacurve/nearest_index.hpp"
#include "chromacurve/pipeline.hpp"
#include "chromacurve/quantize.hpp"
#include "chromacurve/raster.hpp"
#include "chromacurve/shading.hpp"
#include "chromacurve/spectral.hpp"
#include "chromacurve/synthetic.hpp"
#include "chromacurve/vec3.hpp"
