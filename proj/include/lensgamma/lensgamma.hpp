#pragma once

// Umbrella header.

#include "lensgamma/brackets.hpp"
#include "lensgamma/errors.hpp"
#include "lensgamma/log_gamma.hpp"
#include "lensgamma/models.hpp"
#include "lensgamma/numerics.hpp"
#include "lensgamma/params.hpp"
#include "lensgamma/products.hpp"
#include "lensgamma/report.hpp"
#include "lensgamma/report_io.hpp"
#include "lensgamma/sampling.hpp"
#include "lensgamma/special_functions.hpp"
#include "lensgamma/sweep.hpp"
#include "lensgamma/verify.hpp"
