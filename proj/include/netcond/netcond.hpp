#pragma once

#include "netcond/base64.hpp"
#include "netcond/conditioning.hpp"
#include "netcond/dataset.hpp"
#include "netcond/errors.hpp"
#include "netcond/fixtures.hpp"
#include "netcond/layer.hpp"
#include "netcond/model_io.hpp"
#include "netcond/network.hpp"
#include "netcond/norms.hpp"
#include "netcond/parallel.hpp"
#include "netcond/perturb.hpp"
#include "netcond/quantize.hpp"
#include "netcond/report.hpp"
#include "netcond/rng.hpp"
#include "netcond/tensor.hpp"
#include "netcond/version.hpp"
