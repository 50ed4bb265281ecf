#pragma once

// Umbrella header.

#include "versatility/catalog.hpp"
#include "versatility/distribution.hpp"
#include "versatility/entropy.hpp"
#include "versatility/errors.hpp"
#include "versatility/expectation.hpp"
#include "versatility/families.hpp"
#include "versatility/fisher.hpp"
#include "versatility/outcome.hpp"
#include "versatility/prior.hpp"
#include "versatility/quadrature.hpp"
#include "versatility/report.hpp"
#include "versatility/special.hpp"
#include "versatility/symbols.hpp"
