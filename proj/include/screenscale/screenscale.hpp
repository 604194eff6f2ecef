/**
 * @file screenscale.hpp
 * @brief Umbrella header for the content-adaptive screen image scaling library.
 */
#pragma once

#include "raster.hpp"
#include "instrument.hpp"
#include "classifier.hpp"
#include "sli.hpp"
#include "baselines.hpp"
#include "pipeline.hpp"
#include "spectral.hpp"
#include "synth.hpp"
#include "serialization.hpp"
