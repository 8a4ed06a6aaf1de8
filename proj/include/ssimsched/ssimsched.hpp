#pragma once

#include "conditioning.hpp"
#include "csv.hpp"
#include "denoiser.hpp"
#include "errors.hpp"
#include "fit.hpp"
#include "image.hpp"
#include "metrics.hpp"
#include "png_io.hpp"
#include "precondition.hpp"
#include "rng.hpp"
#include "sampler.hpp"
#include "schedule.hpp"
#include "transforms.hpp"
